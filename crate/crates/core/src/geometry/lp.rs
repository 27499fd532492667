//! Dense two-phase tableau simplex.
//!
//! Solves `min c'x` subject to `A_eq x = b_eq`, `A_ub x <= b_ub`, `x >= 0`.
//! Bland's rule makes pivoting cycle-free, so the iteration cap only guards
//! against numerical trouble.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    c: Vec<f64>,
    a_eq: Vec<Vec<f64>>,
    b_eq: Vec<f64>,
    a_ub: Vec<Vec<f64>>,
    b_ub: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpStatus {
    /// The optimal solution, or a numerical error naming `what`.
    pub fn optimal(self, what: &str) -> Result<LpSolution> {
        match self {
            LpStatus::Optimal(s) => Ok(s),
            other => Err(Error::Numerical(format!("{what}: LP reported {other:?}"))),
        }
    }
}

impl LinearProgram {
    pub fn new(c: Vec<f64>) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn set_objective(&mut self, c: Vec<f64>) {
        debug_assert_eq!(c.len(), self.c.len());
        self.c = c;
    }

    pub fn eq(&mut self, row: Vec<f64>, b: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.c.len());
        self.a_eq.push(row);
        self.b_eq.push(b);
        self
    }

    pub fn le(&mut self, row: Vec<f64>, b: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.c.len());
        self.a_ub.push(row);
        self.b_ub.push(b);
        self
    }

    pub fn solve(&self) -> Result<LpStatus> {
        Tableau::build(self).run(&self.c)
    }
}

struct Tableau {
    /// Row-major `m x (cols + 1)`; the last column is the right-hand side.
    t: Vec<f64>,
    m: usize,
    cols: usize,
    n: usize,
    first_artificial: usize,
    basis: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.c.len();
        let m_ub = lp.a_ub.len();
        let m = m_ub + lp.a_eq.len();
        // Rows needing an artificial: equalities and inequalities with b < 0.
        let needs_art: Vec<bool> = (0..m)
            .map(|i| if i < m_ub { lp.b_ub[i] < 0.0 } else { true })
            .collect();
        let n_art = needs_art.iter().filter(|&&a| a).count();
        let first_artificial = n + m_ub;
        let cols = first_artificial + n_art;
        let w = cols + 1;
        let mut t = vec![0.0; m * w];
        let mut basis = vec![0; m];
        let mut art = first_artificial;
        for i in 0..m {
            let (row, b) = if i < m_ub {
                (&lp.a_ub[i], lp.b_ub[i])
            } else {
                (&lp.a_eq[i - m_ub], lp.b_eq[i - m_ub])
            };
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            let r = &mut t[i * w..(i + 1) * w];
            for (dst, &a) in r.iter_mut().zip(row) {
                *dst = sign * a;
            }
            if i < m_ub {
                r[n + i] = sign;
            }
            r[cols] = sign * b;
            if needs_art[i] {
                r[art] = 1.0;
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = n + i;
            }
        }
        Self {
            t,
            m,
            cols,
            n,
            first_artificial,
            basis,
            iterations: 0,
        }
    }

    fn w(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.w() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64]) {
        let w = self.w();
        let p = self.t[r * w + c];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for (v, &pr) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * w + c] = 0.0;
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, &pr) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row `[d_0 .. d_{cols-1}, -z]` for column costs `c`.
    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let w = self.w();
        let mut d = vec![0.0; w];
        d[..c.len()].copy_from_slice(c);
        for i in 0..self.m {
            let cb = c.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (dj, &a) in d.iter_mut().zip(&self.t[i * w..(i + 1) * w]) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Bland-rule simplex over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &mut [f64], allowed: usize) -> Result<bool> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| cost[j] < -COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, enter);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, enter, cost);
            self.iterations += 1;
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::Numerical(format!(
                    "simplex exceeded {MAX_ITERATIONS} pivots ({} rows, {} columns)",
                    self.m, self.cols
                )));
            }
        }
    }

    fn run(mut self, c: &[f64]) -> Result<LpStatus> {
        if self.first_artificial < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            phase1[self.first_artificial..].fill(1.0);
            let mut cost = self.reduced_costs(&phase1);
            self.optimize(&mut cost, self.cols)?;
            let infeasibility: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.first_artificial)
                .map(|i| self.rhs(i))
                .sum();
            let scale = 1.0 + (0..self.m).map(|i| self.rhs(i).abs()).fold(0.0, f64::max);
            if infeasibility > FEAS_TOL * scale {
                return Ok(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }
        let mut cost = self.reduced_costs(c);
        if !self.optimize(&mut cost, self.first_artificial)? {
            return Ok(LpStatus::Unbounded);
        }
        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
        Ok(LpStatus::Optimal(LpSolution {
            x,
            objective,
            iterations: self.iterations,
        }))
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn drive_out_artificials(&mut self) {
        let mut dummy = vec![0.0; self.w()];
        let mut i = 0;
        while i < self.m {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| self.at(i, j).abs() > PIVOT_TOL) {
                Some(j) => {
                    self.pivot(i, j, &mut dummy);
                    i += 1;
                }
                None => {
                    let w = self.w();
                    self.t.drain(i * w..(i + 1) * w);
                    self.basis.remove(i);
                    self.m -= 1;
                }
            }
        }
    }
}

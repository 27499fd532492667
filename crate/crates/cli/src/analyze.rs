use std::path::PathBuf;

use clap::{Args, ValueEnum};
use eqtrack_core::game::StageGame;
use eqtrack_core::geometry::{distance, EquilibriumKind, EquilibriumPolytope, JointDistribution, Norm};
use eqtrack_core::welfare::{best_lambda, poa, WelfareFunction};
use serde::Serialize;

use crate::error::{read_json, CliError, Result};
use crate::{parse_kind, parse_norm};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Welfare {
    Additive,
    Minimum,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Stage game JSON: {"players", "actions", "M", "payoffs"}.
    game: PathBuf,

    /// Equilibrium notion: hannan or ce.
    #[arg(long = "eq", value_parser = parse_kind, default_value = "hannan")]
    eq: EquilibriumKind,

    /// Approximation slack of the equilibrium set.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,

    #[arg(long = "p-norm", value_parser = parse_norm, default_value = "2")]
    p_norm: Norm,

    /// Joint distribution over outcomes in lexicographic order, comma separated.
    /// Repeatable.
    #[arg(long = "dist", value_delimiter = ',', num_args = 1, action = clap::ArgAction::Append)]
    dist: Vec<String>,

    #[arg(long, value_enum, default_value = "additive")]
    welfare: Welfare,

    /// Values of mu at which to report the best smoothness lambda.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
    mu: Vec<f64>,
}

#[derive(Serialize)]
struct PolytopeStats {
    kind: EquilibriumKind,
    epsilon: f64,
    outcomes: usize,
    constraints: usize,
}

#[derive(Serialize)]
struct DistributionReport {
    q: Vec<f64>,
    member: bool,
    norm: Norm,
    distance: f64,
    nearest: Vec<f64>,
}

#[derive(Serialize)]
struct Frontier {
    mu: f64,
    lambda: f64,
}

#[derive(Serialize)]
struct Report {
    polytope: PolytopeStats,
    distributions: Vec<DistributionReport>,
    poa: f64,
    smoothness: Vec<Frontier>,
}

fn split_distributions(raw: &[String], outcomes: usize) -> Result<Vec<Vec<f64>>> {
    let values = raw
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("--dist entry {s:?} is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() % outcomes != 0 {
        return Err(CliError::Config(format!(
            "--dist takes {outcomes} probabilities per distribution, got {} values",
            values.len()
        )));
    }
    Ok(values.chunks(outcomes).map(<[f64]>::to_vec).collect())
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    let game: StageGame = read_json(&args.game)?;
    let outcomes = game.space().outcome_count();
    let poly = EquilibriumPolytope::build(&game, args.eq, args.epsilon)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut distributions = Vec::new();
    for q in split_distributions(&args.dist, outcomes)? {
        let jd = JointDistribution::new(q.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        let d = distance(&jd, &poly, args.p_norm)?;
        distributions.push(DistributionReport {
            member: poly.contains(&jd, 1e-9)?,
            q,
            norm: args.p_norm,
            distance: d.value,
            nearest: d.witness,
        });
    }
    let w = match args.welfare {
        Welfare::Additive => WelfareFunction::Additive,
        Welfare::Minimum => WelfareFunction::Minimum,
    };
    let smoothness = args
        .mu
        .iter()
        .map(|&mu| Ok(Frontier { mu, lambda: best_lambda(&game, &w, mu)? }))
        .collect::<Result<Vec<_>>>()?;
    let report = Report {
        polytope: PolytopeStats {
            kind: poly.kind(),
            epsilon: poly.epsilon(),
            outcomes,
            constraints: poly.rows().len(),
        },
        distributions,
        poa: poa(&game, &w, args.eq)?,
        smoothness,
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(eqtrack_core::Error::from)?);
    Ok(())
}

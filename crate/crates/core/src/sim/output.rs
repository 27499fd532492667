use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::SimConfig;
use super::monte_carlo::ReplicationSummary;
use crate::error::Result;

/// Exact header of `summary.csv` for an `n`-player game:
/// `T,batch,batch_len,distance,err_per_T,regret_p1,...,regret_pN,welfare`.
///
/// `batch` is 1-based. `distance` is the batch's distance to its equilibrium
/// set, `err_per_T` the run-level tracking error over `T` (repeated on every
/// batch row), `regret_pI` player I's mean static regret within the batch and
/// `welfare` the mean per-period welfare in the batch. Metrics that were not
/// requested are left empty.
pub fn csv_header(players: usize) -> String {
    let mut cols = vec!["T", "batch", "batch_len", "distance", "err_per_T"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    cols.extend((1..=players).map(|i| format!("regret_p{i}")));
    cols.push("welfare".into());
    cols.join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub horizon: usize,
    pub batch: usize,
    pub batch_len: usize,
    pub distance: Option<f64>,
    pub err_per_t: Option<f64>,
    pub regrets: Vec<f64>,
    pub welfare: Option<f64>,
}

impl SummaryRow {
    fn fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut out = vec![
            self.horizon.to_string(),
            self.batch.to_string(),
            self.batch_len.to_string(),
            opt(self.distance),
            opt(self.err_per_t),
        ];
        out.extend(self.regrets.iter().map(f64::to_string));
        out.push(opt(self.welfare));
        out
    }
}

pub fn summary_rows(summaries: &[ReplicationSummary]) -> Vec<SummaryRow> {
    summaries
        .iter()
        .flat_map(|s| {
            s.batches.iter().enumerate().map(move |(k, b)| SummaryRow {
                horizon: s.horizon,
                batch: k + 1,
                batch_len: b.len(),
                distance: b.distance,
                err_per_t: s.err_per_t(),
                regrets: b.regrets.iter().map(|r| r.mean).collect(),
                welfare: b.welfare.map(|w| w.mean),
            })
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(out: W, players: usize, summaries: &[ReplicationSummary]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(csv_header(players).split(','))?;
    for row in summary_rows(summaries) {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// SHA-256 of the config's canonical JSON encoding, hex encoded.
pub fn config_hash(config: &SimConfig) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSeeds {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seeds: Vec<u64>,
}

/// Everything needed to reproduce a run. Feeding `config` back in yields the
/// same summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub config_hash: String,
    pub csv_header: String,
    pub config: SimConfig,
    pub seeds: Vec<HorizonSeeds>,
}

impl Manifest {
    pub fn new(config: &SimConfig, preset: Option<&str>, summaries: &[ReplicationSummary], players: usize) -> Result<Self> {
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            preset: preset.map(str::to_string),
            config_hash: config_hash(config)?,
            csv_header: csv_header(players),
            config: config.clone(),
            seeds: summaries
                .iter()
                .map(|s| HorizonSeeds {
                    horizon: s.horizon,
                    seeds: s.seeds.clone(),
                })
                .collect(),
        })
    }
}

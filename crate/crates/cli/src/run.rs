use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;
use eqtrack_core::geometry::{EquilibriumKind, Norm};
use eqtrack_core::presets::{self, DEFAULT_HORIZON, DEFAULT_REPLICATIONS, DEFAULT_SEED};
use eqtrack_core::sim::{convergence_sweep_with_jobs, write_summary_csv, Manifest, SimConfig, TrackingMetric};
use crate::error::{read_json, CliError, Result};
use crate::{default_out, parse_count, parse_kind, parse_norm};

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Preset name; see `list-presets`.
    #[arg(required_unless_present = "config", conflicts_with = "config")]
    preset: Option<String>,

    /// JSON experiment config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Single horizon; shorthand for a one-point grid.
    #[arg(long = "T", value_parser = parse_count, conflicts_with = "grid")]
    horizon: Option<usize>,

    /// Comma-separated horizons, e.g. 1e3,1e4,1e5.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    grid: Option<Vec<usize>>,

    #[arg(long, value_parser = parse_count)]
    reps: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; 0 uses every core.
    #[arg(long, env = "EQTRACK_JOBS", value_parser = parse_count)]
    jobs: Option<usize>,

    /// Norm for distances: 1, 2 or inf.
    #[arg(long = "p-norm", value_parser = parse_norm)]
    p_norm: Option<Norm>,

    /// Equilibrium notion tracked: hannan or ce.
    #[arg(long = "eq", value_parser = parse_kind)]
    eq: Option<EquilibriumKind>,

    /// Root of the results tree.
    #[arg(long, default_value_os_t = default_out())]
    out: PathBuf,

    /// Run directory name; defaults to the current Unix time.
    #[arg(long)]
    tag: Option<String>,
}

fn load(args: &RunArgs) -> Result<(String, SimConfig)> {
    if let Some(name) = &args.preset {
        if !presets::PRESET_NAMES.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "unknown preset '{name}' (known: {})",
                presets::PRESET_NAMES.join(", ")
            )));
        }
        let grid = args
            .grid
            .clone()
            .or(args.horizon.map(|t| vec![t]))
            .unwrap_or_else(|| vec![DEFAULT_HORIZON]);
        let cfg = presets::preset(
            name,
            grid,
            args.reps.unwrap_or(DEFAULT_REPLICATIONS),
            args.seed.unwrap_or(DEFAULT_SEED),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        return Ok((name.clone(), cfg));
    }
    let path = args.config.as_deref().expect("clap enforces preset or config");
    // A config file holds either a bare config or a whole manifest.
    let probe: serde_json::Value = read_json(path)?;
    let (name, mut cfg) = if probe.get("config").is_some() {
        let m: Manifest = read_json(path)?;
        (m.preset, m.config)
    } else {
        (None, read_json::<SimConfig>(path)?)
    };
    if let Some(grid) = args.grid.clone().or(args.horizon.map(|t| vec![t])) {
        cfg.grid = grid;
    }
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let name = name.unwrap_or_else(|| stem(path));
    Ok((name, cfg))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "config".into())
}

pub fn run(args: RunArgs) -> Result<()> {
    let (name, mut cfg) = load(&args)?;
    if args.p_norm.is_some() || args.eq.is_some() {
        let t = cfg.metrics.tracking.get_or_insert_with(TrackingMetric::default);
        if let Some(p) = args.p_norm {
            t.norm = p;
        }
        if let Some(k) = args.eq {
            t.kind = k;
        }
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let players = cfg.learners.len();
    let summaries = convergence_sweep_with_jobs(&cfg, args.jobs.unwrap_or(0))?;

    let tag = args.tag.clone().unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .to_string()
    });
    let dir = args.out.join(&name).join(tag);
    fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;

    let csv_path = dir.join("summary.csv");
    let f = File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    write_summary_csv(BufWriter::new(f), players, &summaries)?;

    let preset = args.preset.as_deref().or(Some(name.as_str()).filter(|n| presets::PRESET_NAMES.contains(n)));
    let manifest = Manifest::new(&cfg, preset, &summaries, players)?;
    write_json(&dir.join("manifest.json"), &manifest)?;
    write_json(&dir.join("summary.json"), &summaries)?;
    println!("{}", dir.display());
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(CliError::io(path))?;
    serde_json::to_writer_pretty(BufWriter::new(f), value).map_err(eqtrack_core::Error::from)?;
    Ok(())
}

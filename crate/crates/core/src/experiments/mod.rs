//! Simulation harness: configs in, CSV tables and optional SVG charts out.

pub mod config;
mod runners;
pub mod svg;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;
use crate::noise::RNG_ALGORITHM;

pub use config::{ExperimentConfig, ExperimentKind};
pub use runners::{level_grid, log_log_slope, median, ExperimentOutput, Reference, REFERENCE_METHOD};
pub use table::{Cell, SummaryRow, Table};

/// Runs the experiment without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    runners::run(cfg)
}

#[derive(Serialize)]
struct Metadata<'a> {
    generated_unix_seconds: u64,
    crate_version: &'static str,
    rng: &'static str,
    config: &'a ExperimentConfig,
}

/// Runs the experiment and writes `<stem>.csv`, `<stem>_summary.csv`,
/// `<stem>_meta.json` and, when enabled, `<stem>.svg` into `out_dir`.
/// Only the metadata file carries a timestamp.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let output = execute(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let stem = cfg.stem();
    let mut written = Vec::new();

    let main = out_dir.join(format!("{stem}.csv"));
    output.table.write_csv(&main)?;
    written.push(main);

    let summary = out_dir.join(format!("{stem}_summary.csv"));
    table::summary_table(&output.summary).write_csv(&summary)?;
    written.push(summary);

    if cfg.svg {
        let path = out_dir.join(format!("{stem}.svg"));
        std::fs::write(&path, output.chart.render())?;
        written.push(path);
    }

    let meta = Metadata {
        generated_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        crate_version: env!("CARGO_PKG_VERSION"),
        rng: RNG_ALGORITHM,
        config: cfg,
    };
    let path = out_dir.join(format!("{stem}_meta.json"));
    let json = serde_json::to_string_pretty(&meta).map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
    std::fs::write(&path, json + "\n")?;
    written.push(path);
    Ok(written)
}

//! Batch front end for the two-photon laser model: JSON configurations in,
//! CSV data files and a JSON run manifest out.
//!
//! Exit status: 0 success, 2 configuration error, 3 physics finding (for
//! example an entangled symmetric resonant point or a failed oracle
//! comparison), 4 numerical or output failure.

pub mod coeffs;
pub mod config;
pub mod error;
pub mod evolve;
pub mod oracle;
pub mod output;
pub mod sweep;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

pub use config::{ExperimentConfig, Mode};
pub use error::{CliError, Result};
use output::{ArtifactEntry, Manifest, Table};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FINDING: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// In-memory result of one mode, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    /// Parameters as actually used (tuned dampings, converted angles).
    pub resolved: Value,
    pub summary: Value,
    pub findings: Vec<String>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.findings.is_empty() {
            EXIT_SUCCESS
        } else {
            EXIT_FINDING
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Validates `cfg` for `mode` and evaluates it on the current thread pool.
pub fn execute(cfg: &ExperimentConfig, mode: Mode, seed: Option<u64>) -> Result<RunOutput> {
    cfg.validate(mode)?;
    match mode {
        Mode::Coeffs => coeffs::run_coeffs(cfg, seed),
        Mode::Evolve => evolve::run_evolve(cfg),
        Mode::Steady => sweep::run_steady(cfg),
        Mode::ScanReit => sweep::run_scan_reit(cfg),
        Mode::ScanDrr => sweep::run_scan_drr(cfg),
        Mode::OracleCompare => oracle::run_oracle(cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` lets the pool choose.
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

/// Runs `mode` on a dedicated pool of `opts.workers` threads and writes the
/// data files plus `manifest.json` into `opts.out_dir`.
pub fn run(cfg: &ExperimentConfig, mode: Mode, opts: &RunOptions) -> Result<Manifest> {
    if opts.workers == Some(0) {
        return Err(CliError::config("--workers must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()?;
    let out = pool.install(|| execute(cfg, mode, opts.seed))?;
    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|e| CliError::io(format!("cannot create {}", opts.out_dir.display()), e))?;
    for t in &out.tables {
        t.write(&opts.out_dir)?;
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        core_version: twophoton_core::VERSION,
        mode,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        workers: pool.current_num_threads(),
        seed: opts.seed,
        config: cfg.clone(),
        resolved: out.resolved.clone(),
        artifacts: out
            .tables
            .iter()
            .map(|t| ArtifactEntry {
                file: t.file_name(),
                rows: t.rows.len(),
                columns: t.columns.iter().map(|(h, _)| *h).collect(),
            })
            .collect(),
        summary: out.summary.clone(),
        findings: out.findings.clone(),
        exit_code: out.exit_code(),
    };
    manifest.write(&opts.out_dir)?;
    Ok(manifest)
}

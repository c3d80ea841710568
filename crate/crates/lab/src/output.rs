//! Files written by a run: `sweep.csv`, `manifest.json`, optional `points.json`
//! and, for oracle runs, `reference.csv`.

use std::fs;
use std::path::{Path, PathBuf};

use dimerlab::NoiseModel;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::metrics::Metrics;
use crate::records::write_records;
use crate::runner::{Command, RunOutput};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const POINTS_JSON: &str = "points.json";
pub const REFERENCE_CSV: &str = "reference.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    /// How per-run seeds follow from the master seed.
    pub derivation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub seeds: SeedInfo,
    pub noise_model: NoiseModel,
    pub threads: usize,
    pub wall_time_s: f64,
    pub metrics: Metrics,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn read(path: &Path) -> LabResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        m.config.validate()?;
        Ok(m)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| LabError::Write { path: path.to_path_buf(), source })
}

/// Writes every output of `run` into `dir`, creating it if needed.
pub fn emit_outputs(dir: &Path, run: &RunOutput, threads: usize) -> LabResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| LabError::Write { path: dir.to_path_buf(), source })?;
    let mut files = vec![SWEEP_CSV.to_string()];
    write_records(&dir.join(SWEEP_CSV), &run.records)?;
    if run.command == Command::Oracle {
        if let Some(reference) = &run.reference {
            reference.write(&dir.join(REFERENCE_CSV))?;
            files.push(REFERENCE_CSV.into());
        }
    }
    if run.config.points_json {
        write_json(&dir.join(POINTS_JSON), &run.points)?;
        files.push(POINTS_JSON.into());
    }
    files.push(MANIFEST_JSON.into());
    let manifest = Manifest {
        tool: "dimerlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: run.command,
        config: run.config.clone(),
        seeds: SeedInfo {
            master_seed: run.config.master_seed,
            derivation: "splitmix64 chain over (master_seed, t_index, repetition)".into(),
        },
        noise_model: run.config.noise.resolve(),
        threads,
        wall_time_s: run.wall_time_s,
        metrics: run.metrics.clone(),
        files: files.clone(),
    };
    write_json(&dir.join(MANIFEST_JSON), &manifest)?;
    Ok(files.into_iter().map(|f| dir.join(f)).collect())
}

//! Run configuration documents.

use std::fs;
use std::path::{Path, PathBuf};

use dimerlab::oracle::linear_grid;
use dimerlab::vqt::{AnsatzConfig, VqtConfig};
use dimerlab::{DimerParams, Method, NoiseModel, OptimOptions, T_MIN};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub t_min_k: f64,
    pub t_max_k: f64,
    pub t_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { t_min_k: 1.0, t_max_k: 300.0, t_points: 31 }
    }
}

impl GridConfig {
    pub fn temperatures(&self) -> Vec<f64> {
        linear_grid(self.t_min_k, self.t_max_k, self.t_points)
    }

    fn validate(&self) -> LabResult<()> {
        if self.t_points == 0 {
            return Err(LabError::Config("grid.t_points must be at least 1".into()));
        }
        if !(self.t_min_k >= T_MIN) || !self.t_max_k.is_finite() {
            return Err(LabError::Config(format!("grid.t_min_k must be at least {T_MIN} K")));
        }
        if self.t_points > 1 && !(self.t_max_k > self.t_min_k) {
            return Err(LabError::Config("grid.t_max_k must exceed grid.t_min_k".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePreset {
    Off,
    Table1,
}

/// `"off"`, `"table1"` or a full noise-model object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSetting {
    Preset(NoisePreset),
    Model(NoiseModel),
}

impl Default for NoiseSetting {
    fn default() -> Self {
        NoiseSetting::Preset(NoisePreset::Off)
    }
}

impl NoiseSetting {
    pub fn resolve(&self) -> NoiseModel {
        match self {
            NoiseSetting::Preset(NoisePreset::Off) => NoiseModel::ideal(),
            NoiseSetting::Preset(NoisePreset::Table1) => NoiseModel::table1(),
            NoiseSetting::Model(nm) => nm.clone(),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.resolve().enabled
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactTag {
    Exact,
}

/// `"exact"` expectation values or a finite shot count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shots {
    Exact(ExactTag),
    Count(u64),
}

impl Default for Shots {
    fn default() -> Self {
        Shots::Exact(ExactTag::Exact)
    }
}

impl Shots {
    pub fn count(self) -> Option<u64> {
        match self {
            Shots::Exact(_) => None,
            Shots::Count(n) => Some(n),
        }
    }
}

/// Which states the `extract` command feeds to the protocol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSource {
    #[default]
    Oracle,
    Vqt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimer: DimerParams<f64>,
    pub grid: GridConfig,
    pub ansatz: AnsatzConfig,
    pub optimizer: Method,
    pub max_evals: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub ftol: f64,
    pub xtol: f64,
    /// `null` picks 1 without noise and 30 with noise.
    pub repetitions: Option<usize>,
    pub noise: NoiseSetting,
    pub master_seed: u64,
    pub shots: Shots,
    pub states: StateSource,
    pub output_dir: PathBuf,
    pub points_json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let o = OptimOptions::default();
        RunConfig {
            dimer: DimerParams::default(),
            grid: GridConfig::default(),
            ansatz: AnsatzConfig::default(),
            optimizer: Method::Cobyla,
            max_evals: o.max_evals,
            rho_begin: o.rho_begin,
            rho_end: o.rho_end,
            ftol: o.ftol,
            xtol: o.xtol,
            repetitions: None,
            noise: NoiseSetting::default(),
            master_seed: 0,
            shots: Shots::default(),
            states: StateSource::default(),
            output_dir: PathBuf::from("out"),
            points_json: false,
        }
    }
}

impl RunConfig {
    /// `"default"` gives the built-in configuration; anything else is a JSON file.
    pub fn load(spec: &str) -> LabResult<Self> {
        if spec == "default" {
            return Ok(RunConfig::default());
        }
        Self::from_file(Path::new(spec))
    }

    pub fn from_file(path: &Path) -> LabResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> LabResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> LabResult<()> {
        let bad = |e: dimerlab::Error| LabError::Config(e.to_string());
        self.dimer.validate().map_err(bad)?;
        self.grid.validate()?;
        self.ansatz.validate().map_err(bad)?;
        self.noise.resolve().validate().map_err(bad)?;
        if self.max_evals == 0 {
            return Err(LabError::Config("max_evals must be at least 1".into()));
        }
        if self.repetitions == Some(0) {
            return Err(LabError::Config("repetitions must be at least 1".into()));
        }
        if self.shots.count() == Some(0) {
            return Err(LabError::Config("shots must be \"exact\" or a positive count".into()));
        }
        if !(self.rho_begin > 0.0 && self.rho_end > 0.0 && self.rho_end <= self.rho_begin) {
            return Err(LabError::Config("need 0 < rho_end <= rho_begin".into()));
        }
        Ok(())
    }

    pub fn resolved_repetitions(&self) -> usize {
        self.repetitions.unwrap_or(if self.noise.is_enabled() { 30 } else { 1 })
    }

    /// Pins `repetitions` and expands the noise preset, so the document alone
    /// reproduces the run.
    pub fn resolved(&self) -> RunConfig {
        RunConfig {
            repetitions: Some(self.resolved_repetitions()),
            noise: NoiseSetting::Model(self.noise.resolve()),
            ..self.clone()
        }
    }

    /// `--noise on` keeps a custom model (switched on) or falls back to Table 1.
    pub fn set_noise(&mut self, on: bool) {
        self.noise = match (&self.noise, on) {
            (_, false) => NoiseSetting::Preset(NoisePreset::Off),
            (NoiseSetting::Model(nm), true) => NoiseSetting::Model(NoiseModel { enabled: true, ..nm.clone() }),
            (NoiseSetting::Preset(_), true) => NoiseSetting::Preset(NoisePreset::Table1),
        };
    }

    pub fn vqt_config(&self) -> VqtConfig {
        VqtConfig {
            optimizer: self.optimizer,
            max_evals: self.max_evals,
            master_seed: self.master_seed,
            ansatz: self.ansatz,
            noise: self.noise.resolve(),
            repetitions: self.resolved_repetitions(),
            rho_begin: self.rho_begin,
            rho_end: self.rho_end,
            ftol: self.ftol,
            xtol: self.xtol,
        }
    }
}

//! Per-temperature sweep rows and their CSV form.

use std::path::Path;

use dimerlab::extraction::ExtractionReportRow;
use dimerlab::oracle::ThermalPoint;
use dimerlab::vqt::{MeanStd, VqtPoint};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

/// One CSV row. Columns a command does not produce are left empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "T_K")]
    pub t_k: f64,
    pub runs: usize,
    pub ergotropy_norm_mean: Option<f64>,
    pub ergotropy_norm_std: Option<f64>,
    pub discord_mean: Option<f64>,
    pub discord_std: Option<f64>,
    pub susceptibility_reduced_mean: Option<f64>,
    pub susceptibility_reduced_std: Option<f64>,
    pub cost_mean: Option<f64>,
    pub cost_std: Option<f64>,
    pub n_evals_mean: Option<f64>,
    pub pop00_mean: Option<f64>,
    pub pop00_std: Option<f64>,
    pub pop01_mean: Option<f64>,
    pub pop01_std: Option<f64>,
    pub pop10_mean: Option<f64>,
    pub pop10_std: Option<f64>,
    pub pop11_mean: Option<f64>,
    pub pop11_std: Option<f64>,
    pub fidelity_mean: Option<f64>,
    pub fidelity_std: Option<f64>,
    pub delta_e_k_mean: Option<f64>,
    pub delta_e_k_std: Option<f64>,
    pub ergotropy_k_mean: Option<f64>,
    pub ergotropy_k_std: Option<f64>,
    pub delta_sigma_k_mean: Option<f64>,
    pub delta_sigma_k_std: Option<f64>,
    pub abs_delta_sigma_k_mean: Option<f64>,
    pub abs_delta_sigma_k_std: Option<f64>,
}

fn split(s: MeanStd) -> (Option<f64>, Option<f64>) {
    (Some(s.mean), Some(s.std))
}

impl SweepRecord {
    pub fn from_oracle(pt: &ThermalPoint<f64>) -> Self {
        SweepRecord {
            t_k: pt.temperature,
            runs: 1,
            ergotropy_norm_mean: Some(pt.ergotropy_normalized),
            ergotropy_norm_std: Some(0.0),
            discord_mean: Some(pt.discord),
            discord_std: Some(0.0),
            susceptibility_reduced_mean: Some(pt.susceptibility),
            susceptibility_reduced_std: Some(0.0),
            cost_mean: Some(-pt.ln_partition),
            cost_std: Some(0.0),
            ergotropy_k_mean: Some(pt.ergotropy),
            ergotropy_k_std: Some(0.0),
            ..Default::default()
        }
    }

    pub fn from_vqt(pt: &VqtPoint<f64>) -> Self {
        let mut r = SweepRecord { t_k: pt.temperature, runs: pt.runs.len(), ..Default::default() };
        (r.ergotropy_norm_mean, r.ergotropy_norm_std) = split(pt.ergotropy_normalized);
        (r.discord_mean, r.discord_std) = split(pt.discord);
        (r.susceptibility_reduced_mean, r.susceptibility_reduced_std) = split(pt.susceptibility);
        (r.cost_mean, r.cost_std) = split(pt.cost);
        r.n_evals_mean = Some(pt.n_evals.mean);
        r
    }

    /// Fills the extraction columns from the rows of every run at this temperature.
    pub fn with_extraction(mut self, rows: &[ExtractionReportRow<f64>]) -> Self {
        let stat = |f: &dyn Fn(&ExtractionReportRow<f64>) -> f64| split(MeanStd::of(rows.iter().map(f)));
        (self.pop00_mean, self.pop00_std) = stat(&|r| r.populations[0]);
        (self.pop01_mean, self.pop01_std) = stat(&|r| r.populations[1]);
        (self.pop10_mean, self.pop10_std) = stat(&|r| r.populations[2]);
        (self.pop11_mean, self.pop11_std) = stat(&|r| r.populations[3]);
        (self.fidelity_mean, self.fidelity_std) = stat(&|r| r.fidelity);
        (self.delta_e_k_mean, self.delta_e_k_std) = stat(&|r| r.delta_e);
        (self.ergotropy_k_mean, self.ergotropy_k_std) = stat(&|r| r.ergotropy_oracle);
        (self.delta_sigma_k_mean, self.delta_sigma_k_std) = stat(&|r| r.delta_sigma);
        (self.abs_delta_sigma_k_mean, self.abs_delta_sigma_k_std) = stat(&|r| r.abs_delta_sigma());
        self.runs = self.runs.max(rows.len());
        self
    }

    pub fn populations_mean(&self) -> Option<[f64; 4]> {
        Some([self.pop00_mean?, self.pop01_mean?, self.pop10_mean?, self.pop11_mean?])
    }
}

pub fn write_records(path: &Path, records: &[SweepRecord]) -> LabResult<()> {
    let csv_err = |source| LabError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| LabError::Write { path: path.to_path_buf(), source })
}

pub fn read_records(path: &Path) -> LabResult<Vec<SweepRecord>> {
    let csv_err = |source| LabError::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<Result<Vec<SweepRecord>, _>>().map_err(csv_err)
}

//! Sweep-level comparison metrics.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::records::SweepRecord;
use crate::reference::ReferenceCurve;

/// Largest temperature offset accepted when joining a sweep to a reference.
pub const MAX_JOIN_GAP_K: f64 = 1.0;

/// Mean |reference − simulated| normalized ergotropy over the sweep points.
pub fn avg_error_accumulation(reference: &ReferenceCurve, sim: &[SweepRecord]) -> LabResult<f64> {
    if sim.is_empty() {
        return Err(LabError::Metric("no simulated points to compare".into()));
    }
    let mut total = 0.0;
    for r in sim {
        let value = r.ergotropy_norm_mean.ok_or_else(|| LabError::Metric(format!("no ergotropy_norm_mean at T = {} K", r.t_k)))?;
        let want = reference.nearest(r.t_k, MAX_JOIN_GAP_K).ok_or(LabError::GridMismatch { t: r.t_k, max_gap: MAX_JOIN_GAP_K })?;
        total += (want - value).abs();
    }
    Ok(total / sim.len() as f64)
}

/// Mean per-point optimizer evaluation count.
pub fn avg_function_evaluations(sim: &[SweepRecord]) -> LabResult<f64> {
    if sim.is_empty() {
        return Err(LabError::Metric("no simulated points".into()));
    }
    let counts = sim
        .iter()
        .map(|r| r.n_evals_mean.ok_or_else(|| LabError::Metric(format!("no n_evals_mean at T = {} K", r.t_k))))
        .collect::<LabResult<Vec<f64>>>()?;
    Ok(counts.iter().sum::<f64>() / counts.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub reference_source: Option<String>,
    pub avg_error_accumulation: Option<f64>,
    pub avg_function_evaluations: Option<f64>,
    /// Mean measured populations over points below 100 K.
    pub low_t_populations: Option<[f64; 4]>,
    pub points: usize,
}

impl Metrics {
    pub fn collect(reference: Option<&ReferenceCurve>, sim: &[SweepRecord]) -> LabResult<Self> {
        let avg_error_accumulation = reference.map(|r| avg_error_accumulation(r, sim)).transpose()?;
        let avg_function_evaluations = if sim.iter().all(|r| r.n_evals_mean.is_some()) { avg_function_evaluations(sim).ok() } else { None };
        Ok(Metrics {
            reference_source: reference.map(|r| r.source.clone()),
            avg_error_accumulation,
            avg_function_evaluations,
            low_t_populations: low_temperature_populations(sim, 100.0),
            points: sim.len(),
        })
    }
}

pub fn low_temperature_populations(sim: &[SweepRecord], t_max: f64) -> Option<[f64; 4]> {
    let low: Vec<[f64; 4]> = sim.iter().filter(|r| r.t_k < t_max).map(|r| r.populations_mean()).collect::<Option<_>>()?;
    if low.is_empty() {
        return None;
    }
    let mut avg = [0.0; 4];
    for p in &low {
        for (a, x) in avg.iter_mut().zip(p) {
            *a += x / low.len() as f64;
        }
    }
    Some(avg)
}

//! Executes one sweep command against a resolved configuration.

use std::time::Instant;

use dimerlab::circuit::{frequencies, sample_counts};
use dimerlab::extraction::{extraction_sweep, ExtractionReportRow};
use dimerlab::oracle::oracle_sweep;
use dimerlab::seeding::derive_seed;
use dimerlab::vqt::vqt_sweep;
use dimerlab::DensityMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, StateSource};
use crate::error::LabResult;
use crate::metrics::Metrics;
use crate::records::SweepRecord;
use crate::reference::ReferenceCurve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Oracle,
    Vqt,
    Extract,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Oracle => "oracle",
            Command::Vqt => "vqt",
            Command::Extract => "extract",
        }
    }
}

/// Raw values of one (temperature, repetition) run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub t_index: usize,
    #[serde(rename = "T_K")]
    pub t_k: f64,
    pub repetition: usize,
    pub seed: Option<u64>,
    pub cost: Option<f64>,
    pub n_evals: Option<usize>,
    pub converged: Option<bool>,
    pub ergotropy_norm: f64,
    pub discord: f64,
    pub susceptibility_reduced: f64,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub extraction: Option<ExtractionReportRow<f64>>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub command: Command,
    pub config: RunConfig,
    pub records: Vec<SweepRecord>,
    pub points: Vec<PointSample>,
    pub metrics: Metrics,
    pub reference: Option<ReferenceCurve>,
    pub wall_time_s: f64,
}

/// Separate stream for shot sampling so it never reuses an optimizer seed.
const SHOT_STREAM: u64 = 0x5807_5EED;

pub fn execute(command: Command, cfg: &RunConfig) -> LabResult<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let cfg = cfg.resolved();
    let grid = cfg.grid.temperatures();
    let oracle = ReferenceCurve::oracle(&cfg.dimer, &grid)?;

    let mut points = states(command, &cfg, &grid)?;
    let mut records: Vec<SweepRecord> = points.iter().map(|(rec, _)| rec.clone()).collect();

    if command == Command::Extract {
        let nm = cfg.noise.resolve();
        let flat: Vec<(f64, DensityMatrix<f64>)> = points.iter().flat_map(|(_, runs)| runs.iter().map(|(s, rho)| (s.t_k, *rho))).collect();
        let mut rows = extraction_sweep(&flat, &nm, &cfg.dimer)?.into_iter();
        for (rec, (_, runs)) in records.iter_mut().zip(points.iter_mut()) {
            let mut here = Vec::with_capacity(runs.len());
            for (sample, _) in runs.iter_mut() {
                let mut row = rows.next().expect("one extraction row per state");
                if let Some(shots) = cfg.shots.count() {
                    let seed = derive_seed(cfg.master_seed ^ SHOT_STREAM, sample.t_index, sample.repetition);
                    row.populations = frequencies(&sample_counts(&row.populations, shots, seed)?);
                }
                sample.extraction = Some(row.clone());
                here.push(row);
            }
            *rec = rec.clone().with_extraction(&here);
        }
    }

    let reference = Some(oracle);
    let metrics = Metrics::collect(reference.as_ref(), &records)?;
    Ok(RunOutput {
        command,
        config: cfg,
        records,
        points: points.into_iter().flat_map(|(_, runs)| runs.into_iter().map(|(s, _)| s)).collect(),
        metrics,
        reference,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

type PointStates = (SweepRecord, Vec<(PointSample, DensityMatrix<f64>)>);

fn states(command: Command, cfg: &RunConfig, grid: &[f64]) -> LabResult<Vec<PointStates>> {
    let use_vqt = match command {
        Command::Oracle => false,
        Command::Vqt => true,
        Command::Extract => cfg.states == StateSource::Vqt,
    };
    if use_vqt {
        return vqt_states(cfg, grid);
    }
    // oracle states are exact; repeat them only when shot noise makes runs differ
    let reps = if command == Command::Extract && cfg.shots.count().is_some() { cfg.resolved_repetitions() } else { 1 };
    Ok(oracle_sweep(&cfg.dimer, grid)?
        .into_iter()
        .enumerate()
        .map(|(i, pt)| {
            let runs = (0..reps)
                .map(|rep| {
                    let sample = PointSample {
                        t_index: i,
                        t_k: pt.temperature,
                        repetition: rep,
                        seed: None,
                        cost: Some(-pt.ln_partition),
                        n_evals: None,
                        converged: None,
                        ergotropy_norm: pt.ergotropy_normalized,
                        discord: pt.discord,
                        susceptibility_reduced: pt.susceptibility,
                        theta: Vec::new(),
                        phi: Vec::new(),
                        extraction: None,
                    };
                    (sample, pt.rho)
                })
                .collect();
            (SweepRecord::from_oracle(&pt), runs)
        })
        .collect())
}

fn vqt_states(cfg: &RunConfig, grid: &[f64]) -> LabResult<Vec<PointStates>> {
    let sweep = vqt_sweep(grid, &cfg.vqt_config(), &cfg.dimer)?;
    Ok(sweep
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let runs = pt
                .runs
                .iter()
                .map(|run| {
                    let res = &run.result;
                    let sample = PointSample {
                        t_index: i,
                        t_k: pt.temperature,
                        repetition: run.repetition,
                        seed: Some(run.seed),
                        cost: Some(res.cost),
                        n_evals: Some(res.n_evals),
                        converged: Some(res.converged),
                        ergotropy_norm: run.ergotropy_normalized,
                        discord: run.discord,
                        susceptibility_reduced: run.susceptibility,
                        theta: res.params.theta.clone(),
                        phi: res.params.phi.clone(),
                        extraction: None,
                    };
                    (sample, res.rho)
                })
                .collect();
            (SweepRecord::from_vqt(pt), runs)
        })
        .collect())
}

//! Variational thermalizer: latent distribution, layered ansatz, free-energy cost
//! and temperature sweeps.

use std::cell::RefCell;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{run, Circuit, Gate, NoiseModel};
use crate::optim::{minimize, Method, OptimOptions};
use crate::oracle::{build_hamiltonian, discord_from_susceptibility, reduced_susceptibility, DimerParams, T_MIN};
use crate::qmatrix::{von_neumann_entropy, CMatrix, DensityMatrix};
use crate::seeding::derive_seed;
use crate::{Error, Real, Result};

/// Map from latent parameters to a distribution over the four basis states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentModel {
    /// Softmax over four logits with the `|00>` logit pinned at zero.
    #[default]
    Categorical,
    /// Independent sigmoid-Bernoulli bit per qubit.
    Product,
}

impl LatentModel {
    pub fn n_params(self) -> usize {
        match self {
            LatentModel::Categorical => 3,
            LatentModel::Product => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LatentModel::Categorical => "categorical",
            LatentModel::Product => "product",
        }
    }
}

impl FromStr for LatentModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "categorical" => Ok(LatentModel::Categorical),
            "product" => Ok(LatentModel::Product),
            other => Err(Error::InvalidParameter(format!("unknown latent model {other:?}"))),
        }
    }
}

fn sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Basis-state probabilities `p(|q0 q1>)`, indexed as `2*q0 + q1`.
pub fn latent_probabilities<T: Real>(theta: &[T], model: LatentModel) -> Result<[T; 4]> {
    if theta.len() != model.n_params() {
        return Err(Error::ParamLength { expected: model.n_params(), got: theta.len() });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("latent parameters must be finite".into()));
    }
    Ok(match model {
        LatentModel::Categorical => {
            let logits = [T::zero(), theta[0], theta[1], theta[2]];
            let top = logits.iter().copied().fold(T::neg_infinity(), T::max);
            let w = logits.map(|l| (l - top).exp());
            let z: T = w.iter().copied().sum();
            w.map(|x| x / z)
        }
        LatentModel::Product => {
            let (p0, p1) = (sigmoid(theta[0]), sigmoid(theta[1]));
            let (q0, q1) = (T::one() - p0, T::one() - p1);
            [q0 * q1, q0 * p1, p0 * q1, p0 * p1]
        }
    })
}

/// Diagonal latent state `sum_x p(x) |x><x|`.
pub fn latent_state<T: Real>(theta: &[T], model: LatentModel) -> Result<DensityMatrix<T>> {
    DensityMatrix::diagonal(latent_probabilities(theta, model)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzConfig {
    pub layers: usize,
    pub latent: LatentModel,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        AnsatzConfig { layers: 4, latent: LatentModel::Categorical }
    }
}

impl AnsatzConfig {
    pub fn new(layers: usize) -> Result<Self> {
        let cfg = AnsatzConfig { layers, ..Default::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_latent(self, latent: LatentModel) -> Self {
        AnsatzConfig { latent, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::InvalidParameter("ansatz needs at least one layer".into()));
        }
        Ok(())
    }

    /// Rotation angles: layers × 2 qubits × (rx, ry, rz).
    pub fn n_angles(&self) -> usize {
        self.layers * 6
    }

    pub fn n_params(&self) -> usize {
        self.latent.n_params() + self.n_angles()
    }
}

/// Per layer: rx, ry, rz on qubit 0, the same on qubit 1, then cx(0, 1).
pub fn ansatz_circuit<T: Real>(phi: &[T], cfg: &AnsatzConfig) -> Result<Circuit<T>> {
    cfg.validate()?;
    if phi.len() != cfg.n_angles() {
        return Err(Error::ParamLength { expected: cfg.n_angles(), got: phi.len() });
    }
    let mut c = Circuit::new();
    for layer in phi.chunks_exact(6) {
        for q in 0..2 {
            let a = &layer[3 * q..3 * q + 3];
            c.push(Gate::rx(q, a[0]));
            c.push(Gate::ry(q, a[1]));
            c.push(Gate::rz(q, a[2]));
        }
        c.push(Gate::cx(0, 1));
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqtParams<T> {
    pub theta: Vec<T>,
    pub phi: Vec<T>,
}

impl<T: Real> VqtParams<T> {
    pub fn from_flat(x: &[T], cfg: &AnsatzConfig) -> Result<Self> {
        if x.len() != cfg.n_params() {
            return Err(Error::ParamLength { expected: cfg.n_params(), got: x.len() });
        }
        let (theta, phi) = x.split_at(cfg.latent.n_params());
        Ok(VqtParams { theta: theta.to_vec(), phi: phi.to_vec() })
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.theta.iter().chain(&self.phi).copied().collect()
    }
}

/// Output state of the ansatz on the latent mixture.
///
/// The circuit is run once on the mixed latent state; by linearity this is the
/// weighted sum of the four basis-state runs.
pub fn prepare_state<T: Real>(params: &VqtParams<T>, cfg: &AnsatzConfig, nm: &NoiseModel) -> Result<DensityMatrix<T>> {
    let latent = latent_state(&params.theta, cfg.latent)?;
    let circuit = ansatz_circuit(&params.phi, cfg)?;
    if nm.enabled {
        run(&circuit, &latent, nm)
    } else {
        Ok(latent.evolve(&circuit.unitary()?))
    }
}

/// `tr(rho H)/T - S(rho)`.
pub fn free_energy_cost<T: Real>(rho: &DensityMatrix<T>, t: T, h: &CMatrix<T>) -> Result<T> {
    if !(t >= T::lit(T_MIN)) {
        return Err(Error::TemperatureTooLow { t: t.as_f64(), t_min: T_MIN });
    }
    Ok(rho.expectation(h) / t - von_neumann_entropy(rho)?)
}

pub fn vqt_cost<T: Real>(params: &VqtParams<T>, t: T, h: &CMatrix<T>, cfg: &AnsatzConfig, nm: &NoiseModel) -> Result<T> {
    free_energy_cost(&prepare_state(params, cfg, nm)?, t, h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqtConfig {
    pub optimizer: Method,
    pub max_evals: usize,
    pub master_seed: u64,
    pub ansatz: AnsatzConfig,
    pub noise: NoiseModel,
    pub repetitions: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub ftol: f64,
    pub xtol: f64,
}

impl Default for VqtConfig {
    fn default() -> Self {
        let o = OptimOptions::default();
        VqtConfig {
            optimizer: Method::Cobyla,
            max_evals: 5000,
            master_seed: 0,
            ansatz: AnsatzConfig::default(),
            noise: NoiseModel::ideal(),
            repetitions: 1,
            rho_begin: o.rho_begin,
            rho_end: o.rho_end,
            ftol: o.ftol,
            xtol: o.xtol,
        }
    }
}

impl VqtConfig {
    pub fn noisy() -> Self {
        VqtConfig { noise: NoiseModel::table1(), repetitions: 30, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        self.noise.validate()?;
        if self.max_evals == 0 {
            return Err(Error::InvalidParameter("max_evals must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> OptimOptions {
        OptimOptions {
            max_evals: self.max_evals,
            ftol: self.ftol,
            xtol: self.xtol,
            initial_step: None,
            rho_begin: self.rho_begin,
            rho_end: self.rho_end,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqtResult<T> {
    pub params: VqtParams<T>,
    pub rho: DensityMatrix<T>,
    pub cost: T,
    pub n_evals: usize,
    pub converged: bool,
}

/// Random starting point: zero latent parameters, angles uniform in [0, 2π).
pub fn initial_params<T: Real>(cfg: &AnsatzConfig, seed: u64) -> VqtParams<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    VqtParams {
        theta: vec![T::zero(); cfg.latent.n_params()],
        phi: (0..cfg.n_angles()).map(|_| T::lit(rng.random_range(0.0..two_pi))).collect(),
    }
}

/// Minimize the free-energy cost at one temperature from a seeded start.
pub fn optimize_point<T: Real>(t: T, cfg: &VqtConfig, p: &DimerParams<T>, seed: u64) -> Result<VqtResult<T>> {
    cfg.validate()?;
    p.validate()?;
    if !(t >= T::lit(T_MIN)) {
        return Err(Error::TemperatureTooLow { t: t.as_f64(), t_min: T_MIN });
    }
    let h = build_hamiltonian(p);
    let ansatz = cfg.ansatz;
    let x0 = initial_params::<T>(&ansatz, seed).to_flat();
    let failure = RefCell::new(None);
    let objective = |x: &[T]| {
        let cost = VqtParams::from_flat(x, &ansatz).and_then(|v| vqt_cost(&v, t, &h, &ansatz, &cfg.noise));
        cost.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            T::infinity()
        })
    };
    let res = minimize(cfg.optimizer, objective, &x0, &cfg.options())?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let params = VqtParams::from_flat(&res.x, &ansatz)?;
    let rho = prepare_state(&params, &ansatz, &cfg.noise)?;
    Ok(VqtResult { params, rho, cost: res.fx, n_evals: res.n_evals, converged: res.converged })
}

/// Population mean and standard deviation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return MeanStd { mean: f64::NAN, std: f64::NAN };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        MeanStd { mean, std: var.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqtRun<T> {
    pub repetition: usize,
    pub seed: u64,
    pub result: VqtResult<T>,
    pub susceptibility: T,
    pub discord: T,
    pub ergotropy_normalized: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqtPoint<T> {
    pub temperature: T,
    pub runs: Vec<VqtRun<T>>,
    pub ergotropy_normalized: MeanStd,
    pub discord: MeanStd,
    pub susceptibility: MeanStd,
    pub cost: MeanStd,
    pub n_evals: MeanStd,
}

impl<T: Real> VqtPoint<T> {
    fn from_runs(temperature: T, runs: Vec<VqtRun<T>>) -> Self {
        let stat = |f: &dyn Fn(&VqtRun<T>) -> f64| MeanStd::of(runs.iter().map(f));
        VqtPoint {
            temperature,
            ergotropy_normalized: stat(&|r| r.ergotropy_normalized.as_f64()),
            discord: stat(&|r| r.discord.as_f64()),
            susceptibility: stat(&|r| r.susceptibility.as_f64()),
            cost: stat(&|r| r.result.cost.as_f64()),
            n_evals: stat(&|r| r.result.n_evals as f64),
            runs,
        }
    }
}

/// Runs `cfg.repetitions` optimizations per temperature in parallel. Output is in
/// grid order and depends only on the inputs and `cfg.master_seed`.
pub fn vqt_sweep<T: Real>(grid: &[T], cfg: &VqtConfig, p: &DimerParams<T>) -> Result<Vec<VqtPoint<T>>> {
    cfg.validate()?;
    p.validate()?;
    let tasks: Vec<(usize, usize)> = (0..grid.len()).flat_map(|i| (0..cfg.repetitions).map(move |r| (i, r))).collect();
    let runs: Vec<Result<VqtRun<T>>> = tasks
        .par_iter()
        .map(|&(i, rep)| {
            let t = grid[i];
            let seed = derive_seed(cfg.master_seed, i, rep);
            let result = optimize_point(t, cfg, p, seed).map_err(|e| Error::at_temperature(t.as_f64(), e))?;
            let susceptibility = reduced_susceptibility(&result.rho);
            let discord = discord_from_susceptibility(susceptibility);
            Ok(VqtRun { repetition: rep, seed, result, susceptibility, discord, ergotropy_normalized: discord + discord })
        })
        .collect();
    let mut runs = runs.into_iter();
    grid.iter()
        .map(|&t| {
            let point_runs = runs.by_ref().take(cfg.repetitions).collect::<Result<Vec<_>>>()?;
            Ok(VqtPoint::from_runs(t, point_runs))
        })
        .collect()
}

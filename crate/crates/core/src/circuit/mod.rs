//! Two-qubit density-matrix simulator with a gate-level noise model.

mod gate;
mod noise;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

pub use gate::{embed, Gate, GateKind};
use gate::mask;
pub use noise::{
    dephase_qubit, depolarize_qubit, relax_qubit, relaxation_factors, reset_qubit, symmetric_assignment,
    Assignment, NoiseModel, DEFAULT_READOUT_FLIP, TABLE1_FREQUENCY_HZ, TABLE1_T1_S, TABLE1_T2_S,
};

use crate::qmatrix::{CMatrix, DensityMatrix};
use crate::{Error, Real, Result};

/// Ordered gate list on two qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit<T> {
    pub gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new() -> Self {
        Circuit { gates: Vec::new() }
    }

    pub fn from_gates(gates: Vec<Gate<T>>) -> Result<Self> {
        let c = Circuit { gates };
        c.validate()?;
        Ok(c)
    }

    pub fn push(&mut self, g: Gate<T>) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        2
    }

    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            g.validate().map_err(|e| Error::at_gate(i, e))?;
        }
        Ok(())
    }

    /// Product of the gate unitaries, first gate rightmost.
    pub fn unitary(&self) -> Result<CMatrix<T>> {
        let mut u = CMatrix::eye(4);
        for (i, g) in self.gates.iter().enumerate() {
            left_multiply(&mut u, g).map_err(|e| Error::at_gate(i, e))?;
        }
        Ok(u)
    }

    /// Rewrites convenience gates into the hardware basis; durations are left unset.
    ///
    /// h → rz(π/2)·sx·rz(π/2); rx(θ) → rz(π/2)·sx·rz(θ+π)·sx·rz(π/2);
    /// ry(θ) → sx·rz(θ+π)·sx·rz(π); zero-controlled CNOT → x·cx·x on the control.
    /// Each sequence equals the original up to a global phase.
    pub fn transpile(&self) -> Result<Circuit<T>> {
        self.validate()?;
        let half_pi = T::FRAC_PI_2();
        let pi = T::PI();
        let mut out = Vec::with_capacity(self.gates.len() * 3);
        for g in &self.gates {
            let q = g.qubits()[0];
            match g.kind {
                GateKind::H => out.extend([Gate::rz(q, half_pi), Gate::sx(q), Gate::rz(q, half_pi)]),
                GateKind::Rx => out.extend([
                    Gate::rz(q, half_pi),
                    Gate::sx(q),
                    Gate::rz(q, g.angle + pi),
                    Gate::sx(q),
                    Gate::rz(q, half_pi),
                ]),
                GateKind::Ry => {
                    out.extend([Gate::sx(q), Gate::rz(q, g.angle + pi), Gate::sx(q), Gate::rz(q, pi)])
                }
                GateKind::CnotZeroCtrl => {
                    let t = g.qubits()[1];
                    out.extend([Gate::x(q), Gate::cx(q, t), Gate::x(q)])
                }
                _ => out.push(*g),
            }
        }
        Ok(Circuit { gates: out })
    }

    /// [`Circuit::transpile`], then fill missing durations from `nm` and check
    /// every kind against its basis set.
    pub fn transpile_with(&self, nm: &NoiseModel) -> Result<Circuit<T>> {
        let mut c = self.transpile()?;
        for (i, g) in c.gates.iter_mut().enumerate() {
            if !nm.is_basis(g.kind) {
                return Err(Error::at_gate(i, Error::NotTranspiled(g.kind.to_string())));
            }
            if g.duration.is_none() {
                *g = g.with_duration(Some(nm.duration_s(g.kind)));
            }
        }
        Ok(c)
    }
}

/// u·ρ·u† for a 2×2 `u` on qubit `q`, in place.
fn apply_local<T: Real>(m: &mut CMatrix<T>, u: &CMatrix<T>, q: usize) {
    let bit = mask(q);
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    for i0 in (0..4).filter(|i| i & bit == 0) {
        let i1 = i0 | bit;
        for j in 0..4 {
            let (a, b) = (m[(i0, j)], m[(i1, j)]);
            m[(i0, j)] = u00 * a + u01 * b;
            m[(i1, j)] = u10 * a + u11 * b;
        }
    }
    let (c00, c01, c10, c11) = (u00.conj(), u01.conj(), u10.conj(), u11.conj());
    for j0 in (0..4).filter(|j| j & bit == 0) {
        let j1 = j0 | bit;
        for i in 0..4 {
            let (a, b) = (m[(i, j0)], m[(i, j1)]);
            m[(i, j0)] = a * c00 + b * c01;
            m[(i, j1)] = a * c10 + b * c11;
        }
    }
}

/// u ← G·u for a unitary gate G, using row operations only.
fn left_multiply<T: Real>(u: &mut CMatrix<T>, g: &Gate<T>) -> Result<()> {
    g.validate()?;
    let q = g.qubits()[0];
    match g.kind {
        GateKind::Cx | GateKind::CnotZeroCtrl => {
            let on = usize::from(g.kind == GateKind::Cx);
            let perm = controlled_flip(q, g.qubits()[1], on);
            let orig = *u;
            for (a, &pa) in perm.iter().enumerate() {
                for j in 0..4 {
                    u[(pa, j)] = orig[(a, j)];
                }
            }
        }
        GateKind::Measure | GateKind::Reset => return Err(Error::NonUnitary(g.kind.to_string())),
        GateKind::Id | GateKind::Delay => {}
        _ => {
            let m = g.local_matrix()?;
            let bit = mask(q);
            for i0 in (0..4).filter(|i| i & bit == 0) {
                let i1 = i0 | bit;
                for j in 0..4 {
                    let (a, b) = (u[(i0, j)], u[(i1, j)]);
                    u[(i0, j)] = m[(0, 0)] * a + m[(0, 1)] * b;
                    u[(i1, j)] = m[(1, 0)] * a + m[(1, 1)] * b;
                }
            }
        }
    }
    Ok(())
}

/// Conjugation by a basis permutation, `perm[b]` being the image of |b⟩.
fn apply_permutation<T: Real>(m: &mut CMatrix<T>, perm: [usize; 4]) {
    let orig = *m;
    for a in 0..4 {
        for b in 0..4 {
            m[(perm[a], perm[b])] = orig[(a, b)];
        }
    }
}

fn controlled_flip(control: usize, target: usize, on: usize) -> [usize; 4] {
    let (c, t) = (mask(control), mask(target));
    let mut perm = [0; 4];
    for (b, p) in perm.iter_mut().enumerate() {
        *p = if b & c == on * c { b ^ t } else { b };
    }
    perm
}

/// Ideal action of `g`, then (if noise is on and `g` is a noisy instruction)
/// relaxation and depolarizing error on each participating qubit.
pub(crate) fn apply_gate_in_place<T: Real>(m: &mut CMatrix<T>, g: &Gate<T>, nm: &NoiseModel) -> Result<()> {
    g.validate()?;
    if nm.enabled && !nm.is_basis(g.kind) {
        return Err(Error::NotTranspiled(g.kind.to_string()));
    }
    let q = g.qubits()[0];
    match g.kind {
        GateKind::Cx => apply_permutation(m, controlled_flip(q, g.qubits()[1], 1)),
        GateKind::CnotZeroCtrl => apply_permutation(m, controlled_flip(q, g.qubits()[1], 0)),
        GateKind::Measure => dephase_qubit(m, q),
        GateKind::Reset => reset_qubit(m, q),
        GateKind::Delay | GateKind::Id => {}
        _ => apply_local(m, &g.local_matrix()?, q),
    }
    if nm.is_noisy(g.kind) {
        let dt = g.duration.unwrap_or_else(|| nm.duration_s(g.kind));
        let (pop, coh) = relaxation_factors(nm.t1_s, nm.t2_s, dt)?;
        for &qq in g.qubits() {
            relax_qubit(m, qq, pop, coh);
            depolarize_qubit(m, qq, nm.depolarizing_prob);
        }
    }
    Ok(())
}

pub fn apply_gate<T: Real>(rho: &DensityMatrix<T>, g: &Gate<T>, nm: &NoiseModel) -> Result<DensityMatrix<T>> {
    let mut m = *rho.matrix();
    apply_gate_in_place(&mut m, g, nm)?;
    Ok(DensityMatrix::from_trusted(m))
}

/// Runs `c` on `rho0`. With noise enabled the circuit is transpiled first.
pub fn run<T: Real>(c: &Circuit<T>, rho0: &DensityMatrix<T>, nm: &NoiseModel) -> Result<DensityMatrix<T>> {
    let transpiled;
    let gates = if nm.enabled {
        nm.validate()?;
        transpiled = c.transpile_with(nm)?;
        &transpiled.gates
    } else {
        &c.gates
    };
    let mut m = *rho0.matrix();
    for (i, g) in gates.iter().enumerate() {
        apply_gate_in_place(&mut m, g, nm).map_err(|e| Error::at_gate(i, e))?;
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Computational-basis populations, passed through the readout assignment
/// matrices A₀ ⊗ A₁ when noise is enabled.
pub fn measure_populations<T: Real>(rho: &DensityMatrix<T>, nm: &NoiseModel) -> [T; 4] {
    let p = rho.populations();
    if !nm.enabled {
        return p;
    }
    let (a0, a1) = (&nm.readout[0], &nm.readout[1]);
    let mut out = [T::zero(); 4];
    for (read, slot) in out.iter_mut().enumerate() {
        let (r0, r1) = (read >> 1, read & 1);
        for (prep, &pp) in p.iter().enumerate() {
            let (s0, s1) = (prep >> 1, prep & 1);
            *slot += T::lit(a0[r0][s0] * a1[r1][s1]) * pp;
        }
    }
    out
}

/// Multinomial shot counts drawn as successive conditional binomials.
pub fn sample_counts<T: Real>(pops: &[T; 4], shots: u64, seed: u64) -> Result<[u64; 4]> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let p: Vec<f64> = pops.iter().map(|x| x.as_f64()).collect();
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 || p.iter().any(|&x| !(x >= -1e-12)) {
        return Err(Error::NotDistribution(total));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0u64; 4];
    let mut remaining = shots;
    let mut mass = 1.0;
    for k in 0..3 {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 { (p[k].max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        counts[k] = draw.sample(&mut rng);
        remaining -= counts[k];
        mass -= p[k].max(0.0);
    }
    counts[3] = remaining;
    Ok(counts)
}

/// Relative frequencies from counts.
pub fn frequencies<T: Real>(counts: &[u64; 4]) -> [T; 4] {
    let n: u64 = counts.iter().sum();
    counts.map(|c| T::lit(c as f64 / n as f64))
}

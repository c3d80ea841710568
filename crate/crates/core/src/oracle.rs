//! Exact thermodynamics of the Heisenberg spin dimer in a field.
//!
//! Energies are in Kelvin (k_B = 1). Basis order is |00⟩, |01⟩, |10⟩, |11⟩
//! with qubit 0 the high bit, and |00⟩ the Zeeman ground state.

use itertools::Itertools;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::qmatrix::{hermitian_eigen, jacobi, CMatrix, DensityMatrix, EigenSystem};
use crate::{Error, Real, Result};

/// Lowest temperature accepted by the thermal routines, in Kelvin.
pub const T_MIN: f64 = 0.5;

/// Bohr magneton over Boltzmann constant, K/T.
pub const MU_B_OVER_KB: f64 = 0.67171;

/// Below E0/T = 0.1 the susceptibility route to the ergotropy is accurate.
pub const CLOSED_FORM_REGIME: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimerParams<T> {
    /// Exchange coupling J in Kelvin.
    #[serde(rename = "j_k")]
    pub coupling: T,
    #[serde(rename = "g")]
    pub g_factor: T,
    /// External field in Tesla.
    #[serde(rename = "b_t")]
    pub field: T,
    pub mu_b_over_kb: T,
}

impl<T: Real> Default for DimerParams<T> {
    fn default() -> Self {
        DimerParams {
            coupling: T::lit(748.0),
            g_factor: T::lit(2.0),
            field: T::lit(1.0),
            mu_b_over_kb: T::lit(MU_B_OVER_KB),
        }
    }
}

impl<T: Real> DimerParams<T> {
    pub fn new(coupling: T, g_factor: T, field: T) -> Result<Self> {
        let p = DimerParams { coupling, g_factor, field, ..Self::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_field(self, field: T) -> Self {
        DimerParams { field, ..self }
    }

    /// Zeeman energy E0 = g·(μ_B/k_B)·B in Kelvin.
    pub fn e0(&self) -> T {
        self.g_factor * self.mu_b_over_kb * self.field
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.coupling, self.g_factor, self.field, self.mu_b_over_kb];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("dimer parameters must be finite".into()));
        }
        if self.coupling <= T::zero() {
            return Err(Error::InvalidParameter(format!("coupling J = {} K must be positive", self.coupling)));
        }
        let e0 = self.e0();
        if e0 < T::zero() {
            return Err(Error::InvalidParameter(format!("Zeeman energy E0 = {e0} K must be non-negative")));
        }
        if e0 >= self.coupling {
            return Err(Error::InvalidParameter(format!(
                "E0 = {e0} K reaches the level crossing at J = {} K",
                self.coupling
            )));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> DimerParams<U> {
        DimerParams {
            coupling: U::lit(self.coupling.as_f64()),
            g_factor: U::lit(self.g_factor.as_f64()),
            field: U::lit(self.field.as_f64()),
            mu_b_over_kb: U::lit(self.mu_b_over_kb.as_f64()),
        }
    }
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Single-spin operators (sx, sy, sz) in the convention where |0⟩ carries S_z = −1/2.
fn spin_operators<T: Real>() -> [CMatrix<T>; 3] {
    let sx = CMatrix::from_row_major(&[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    let sy = CMatrix::from_row_major(&[c(0.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.0, 0.0)]).unwrap();
    let sz = CMatrix::from_row_major(&[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
    [sx, sy, sz]
}

/// E0·(S₁ᶻ + S₂ᶻ) + J·S₁·S₂ for explicit J and E0 (no validation).
pub fn dimer_hamiltonian<T: Real>(coupling: T, e0: T) -> CMatrix<T> {
    let id = CMatrix::eye(2);
    let s = spin_operators::<T>();
    let kron = |a: &CMatrix<T>, b: &CMatrix<T>| CMatrix::kron(a, b).unwrap();
    let zeeman = kron(&s[2], &id) + kron(&id, &s[2]);
    let exchange = s.iter().map(|op| kron(op, op)).fold(CMatrix::zeroed(4), |acc, m| acc + m);
    zeeman.scale_real(e0) + exchange.scale_real(coupling)
}

pub fn build_hamiltonian<T: Real>(p: &DimerParams<T>) -> CMatrix<T> {
    dimer_hamiltonian(p.coupling, p.e0())
}

/// Zeeman reference Hamiltonian diag(−E0, 0, 0, E0).
pub fn build_reference_hamiltonian<T: Real>(p: &DimerParams<T>) -> CMatrix<T> {
    let e0 = p.e0();
    CMatrix::diag(&[-e0, T::zero(), T::zero(), e0]).unwrap()
}

/// Singlet amplitudes (|01⟩ − |10⟩)/√2.
pub fn singlet_vector<T: Real>() -> [Complex<T>; 4] {
    let a = T::FRAC_1_SQRT_2();
    [Complex::zero(), Complex::new(a, T::zero()), Complex::new(-a, T::zero()), Complex::zero()]
}

pub fn singlet_state<T: Real>() -> DensityMatrix<T> {
    DensityMatrix::pure(singlet_vector()).expect("singlet is normalized")
}

fn check_temperature<T: Real>(t: T) -> Result<()> {
    if !(t.as_f64() >= T_MIN) {
        return Err(Error::TemperatureTooLow { t: t.as_f64(), t_min: T_MIN });
    }
    Ok(())
}

/// Gibbs state together with ln Z, built from the spectrum of `h` with the
/// ground energy shifted out so no exponential overflows.
pub fn gibbs_with_log_partition<T: Real>(h: &CMatrix<T>, t: T) -> Result<(DensityMatrix<T>, T)> {
    check_temperature(t)?;
    let es = hermitian_eigen(h)?;
    let ground = es.values[0];
    let weights: Vec<T> = es.values.iter().map(|&e| (-(e - ground) / t).exp()).collect();
    let z_shifted: T = weights.iter().copied().sum();
    let shape = EigenSystem { values: weights.iter().map(|&w| w / z_shifted).collect(), vectors: es.vectors };
    let rho = DensityMatrix::new(shape.reconstruct())?;
    Ok((rho, z_shifted.ln() - ground / t))
}

/// ρ = e^{−H/T} / Z.
pub fn gibbs_state<T: Real>(h: &CMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    gibbs_with_log_partition(h, t).map(|(rho, _)| rho)
}

pub fn log_partition_function<T: Real>(h: &CMatrix<T>, t: T) -> Result<T> {
    gibbs_with_log_partition(h, t).map(|(_, ln_z)| ln_z)
}

/// ξ = −J/(4T)
pub fn xi<T: Real>(coupling: T, t: T) -> T {
    -coupling / (T::lit(4.0) * t)
}

/// Closed-form thermal X-state of the dimer, written in terms of u = e^{4ξ}
/// so it stays finite down to T_MIN:
///
/// ρ₀₀ = u·e^{βE0}/D, ρ₃₃ = u·e^{−βE0}/D, ρ₁₁ = ρ₂₂ = (u+1)/(2D),
/// ρ₁₂ = ρ₂₁ = (u−1)/(2D), with D = u·(1 + 2cosh βE0) + 1.
pub fn x_state_closed_form<T: Real>(p: &DimerParams<T>, t: T) -> CMatrix<T> {
    let u = (T::lit(4.0) * xi(p.coupling, t)).exp();
    let be0 = p.e0() / t;
    let d = u * (T::one() + T::lit(2.0) * be0.cosh()) + T::one();
    let half = T::lit(0.5);
    let mut m = CMatrix::zeroed(4);
    m[(0, 0)] = Complex::new(u * be0.exp() / d, T::zero());
    m[(3, 3)] = Complex::new(u * (-be0).exp() / d, T::zero());
    m[(1, 1)] = Complex::new(half * (u + T::one()) / d, T::zero());
    m[(2, 2)] = m[(1, 1)];
    m[(1, 2)] = Complex::new(half * (u - T::one()) / d, T::zero());
    m[(2, 1)] = m[(1, 2)];
    m
}

/// Closed-form ln Z = ξ + ln(1 + 2cosh βE0 + e^{−4ξ}), evaluated stably.
pub fn log_partition_closed_form<T: Real>(p: &DimerParams<T>, t: T) -> T {
    let x = xi(p.coupling, t);
    let u = (T::lit(4.0) * x).exp();
    let be0 = p.e0() / t;
    // Z = e^{−3ξ}·(u·(1 + 2cosh βE0) + 1)
    -T::lit(3.0) * x + (u * (T::one() + T::lit(2.0) * be0.cosh()) + T::one()).ln()
}

/// s = ⟨M²⟩ − ⟨M⟩² with M = diag(−1, 0, 0, 1), the total magnetization in units of g·μ_B.
pub fn reduced_susceptibility<T: Real>(rho: &DensityMatrix<T>) -> T {
    let p = rho.populations();
    let m = p[3] - p[0];
    (p[0] + p[3] - m * m).max(T::zero()).min(T::one())
}

/// Zero-field Bleaney-Bowers susceptibility in reduced units, 2/(3 + e^{J/T}).
pub fn bleaney_bowers_reduced<T: Real>(coupling: T, t: T) -> T {
    let u = (-coupling / t).exp();
    T::lit(2.0) * u / (T::lit(3.0) * u + T::one())
}

/// Schatten one-norm discord from the reduced susceptibility: ½|2s − 1|.
pub fn discord_from_susceptibility<T: Real>(s: T) -> T {
    T::lit(0.5) * (T::lit(2.0) * s - T::one()).abs()
}

struct OrderedSpectra<T> {
    /// ρ eigenvalues descending with eigenvectors as columns.
    rho: EigenSystem<T>,
    /// H0 eigenvalues ascending.
    h0: EigenSystem<T>,
}

fn ordered_spectra<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> Result<OrderedSpectra<T>> {
    let h0 = hermitian_eigen(h0)?;
    let asc = jacobi(rho.matrix());
    let mut vectors = CMatrix::zeroed(4);
    for k in 0..4 {
        for i in 0..4 {
            vectors[(i, k)] = asc.vectors[(i, 3 - k)];
        }
    }
    let values = asc.values.iter().rev().copied().collect();
    Ok(OrderedSpectra { rho: EigenSystem { values, vectors }, h0 })
}

fn overlap_sq<T: Real>(a: &CMatrix<T>, i: usize, b: &CMatrix<T>, j: usize) -> T {
    let mut acc = Complex::zero();
    for k in 0..a.dim() {
        acc = acc + a[(k, i)].conj() * b[(k, j)];
    }
    acc.norm_sqr()
}

/// Spectral ergotropy Σ_{i,j} ϱ_i ε_j (|⟨ϱ_i|ε_j⟩|² − δ_ij), with ϱ descending
/// and ε ascending.
pub fn ergotropy_spectral<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> Result<T> {
    let sp = ordered_spectra(rho, h0)?;
    Ok(spectral_sum(&sp.rho, &sp.h0))
}

fn spectral_sum<T: Real>(rho: &EigenSystem<T>, h0: &EigenSystem<T>) -> T {
    let mut w = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            let delta = if i == j { T::one() } else { T::zero() };
            let ov = overlap_sq(&rho.vectors, i, &h0.vectors, j);
            w += rho.values[i] * h0.values[j] * (ov - delta);
        }
    }
    w.max(T::zero())
}

/// Ergotropy by exhaustive search over the 24 unitaries that map ρ's
/// eigenvectors onto H0's eigenvectors.
pub fn brute_force_ergotropy<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> Result<T> {
    let eps = hermitian_eigen(h0)?.values;
    let rhos = jacobi(rho.matrix()).values;
    let initial = rho.expectation(h0);
    let min_final = (0..4)
        .permutations(4)
        .map(|perm| perm.iter().enumerate().map(|(i, &j)| rhos[i] * eps[j]).sum::<T>())
        .fold(T::infinity(), T::min);
    Ok((initial - min_final).max(T::zero()))
}

/// σ = Σ_i ϱ_i |ε_i⟩⟨ε_i| with ϱ descending on ε ascending.
pub fn passive_state<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> Result<DensityMatrix<T>> {
    let sp = ordered_spectra(rho, h0)?;
    let values = sp.rho.values.iter().map(|&x| x.max(T::zero())).collect();
    let sigma = EigenSystem { values, vectors: sp.h0.vectors }.reconstruct();
    DensityMatrix::with_tolerance(sigma, rho.tolerance())
}

/// U = Σ_i |ε_i⟩⟨ϱ_i|, the unitary taking ρ to its passive state.
pub fn passive_unitary<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> Result<CMatrix<T>> {
    let sp = ordered_spectra(rho, h0)?;
    Ok(sp.h0.vectors * sp.rho.vectors.adjoint())
}

/// V = tr(H0²ρ) − tr(H0ρ)², clamped at zero.
pub fn energy_variance<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> T {
    let mean = rho.expectation(h0);
    let second = rho.expectation(&(*h0 * *h0));
    (second - mean * mean).max(T::zero())
}

/// Δσ = sqrt(V(active)) − sqrt(V(passive)).
pub fn precision_delta_sigma<T: Real>(active: &DensityMatrix<T>, passive: &DensityMatrix<T>, h0: &CMatrix<T>) -> T {
    energy_variance(active, h0).sqrt() - energy_variance(passive, h0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormErgotropy<T> {
    /// 2·E0·D in Kelvin.
    pub ergotropy: T,
    /// |2s − 1| = 2D.
    pub normalized: T,
    pub discord: T,
    /// False when E0/T > 0.1, where the susceptibility route loses accuracy.
    pub within_regime: bool,
}

/// Ergotropy through the zero-field susceptibility and the discord relation.
pub fn ergotropy_closed<T: Real>(t: T, p: &DimerParams<T>) -> Result<ClosedFormErgotropy<T>> {
    check_temperature(t)?;
    let s = bleaney_bowers_reduced(p.coupling, t);
    let discord = discord_from_susceptibility(s);
    let normalized = T::lit(2.0) * discord;
    Ok(ClosedFormErgotropy {
        ergotropy: p.e0() * normalized,
        normalized,
        discord,
        within_regime: (p.e0() / t).as_f64() <= CLOSED_FORM_REGIME,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalPoint<T> {
    pub temperature: T,
    pub xi: T,
    /// ln Z; Z itself overflows near T_MIN.
    pub ln_partition: T,
    pub rho: DensityMatrix<T>,
    pub susceptibility: T,
    pub discord: T,
    /// Spectral ergotropy against the Zeeman Hamiltonian, Kelvin.
    pub ergotropy: T,
    /// Closed-form (susceptibility) ergotropy, Kelvin.
    pub ergotropy_closed: T,
    /// 2·discord.
    pub ergotropy_normalized: T,
    pub variance_active: T,
    pub variance_passive: T,
}

impl<T: Real> ThermalPoint<T> {
    pub fn partition_function(&self) -> T {
        self.ln_partition.exp()
    }
}

pub fn thermal_point<T: Real>(p: &DimerParams<T>, t: T) -> Result<ThermalPoint<T>> {
    let h = build_hamiltonian(p);
    let h0 = build_reference_hamiltonian(p);
    let (rho, ln_partition) = gibbs_with_log_partition(&h, t)?;
    let susceptibility = reduced_susceptibility(&rho);
    let discord = discord_from_susceptibility(susceptibility);
    let passive = passive_state(&rho, &h0)?;
    Ok(ThermalPoint {
        temperature: t,
        xi: xi(p.coupling, t),
        ln_partition,
        susceptibility,
        discord,
        ergotropy: ergotropy_spectral(&rho, &h0)?,
        ergotropy_closed: ergotropy_closed(t, p)?.ergotropy,
        ergotropy_normalized: T::lit(2.0) * discord,
        variance_active: energy_variance(&rho, &h0),
        variance_passive: energy_variance(&passive, &h0),
        rho,
    })
}

/// One [`ThermalPoint`] per grid temperature, in grid order.
pub fn oracle_sweep<T: Real>(p: &DimerParams<T>, grid: &[T]) -> Result<Vec<ThermalPoint<T>>> {
    p.validate()?;
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("temperature grid must be strictly ascending".into()));
    }
    grid.iter()
        .map(|&t| thermal_point(p, t).map_err(|e| Error::at_temperature(t.as_f64(), e)))
        .collect()
}

/// `n` evenly spaced temperatures from `t_min` to `t_max` inclusive.
pub fn linear_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_min],
        _ => (0..n).map(|k| t_min + (t_max - t_min) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_density};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_field() -> DimerParams<f64> {
        DimerParams::<f64>::default().with_field(0.0)
    }

    /// Faddeev-LeVerrier coefficients of det(λI − A), highest power first.
    fn char_poly(a: &CMatrix<f64>) -> Vec<f64> {
        let n = a.dim();
        let mut coeffs = vec![1.0];
        let mut m = CMatrix::zeroed(n);
        for k in 1..=n {
            let prev = *coeffs.last().unwrap();
            m = *a * m + CMatrix::eye(n).scale_real(prev);
            let ck = -(*a * m).trace().re / k as f64;
            coeffs.push(ck);
        }
        coeffs
    }

    fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().fold(0.0, |acc, c| acc * x + c)
    }

    #[test]
    fn hamiltonian_spectrum_at_zero_field() {
        let h = build_hamiltonian(&zero_field());
        let es = hermitian_eigen(&h).unwrap();
        let expected = [-561.0, 187.0, 187.0, 187.0];
        for (got, want) in es.values.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
        // Independent check: the characteristic polynomial is (λ + 561)(λ − 187)³.
        let coeffs = char_poly(&h);
        for x in [-700.0, -561.0, 0.0, 100.0, 187.0, 400.0] {
            let want = (x + 561.0) * (x - 187.0f64).powi(3);
            assert!((poly_eval(&coeffs, x) - want).abs() <= 1e-9 * (1.0 + want.abs()).max(1e7));
        }
        let v = es.vector(0);
        let s = singlet_vector::<f64>();
        let overlap: Complex<f64> = v.iter().zip(s.iter()).map(|(a, b)| a.conj() * b).sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_matrix_elements() {
        let (j, e0) = (3.0, 0.7);
        let h = dimer_hamiltonian(j, e0);
        let mut expected = CMatrix::diag(&[-e0 + j / 4.0, -j / 4.0, -j / 4.0, e0 + j / 4.0]).unwrap();
        expected[(1, 2)] = Complex::new(j / 2.0, 0.0);
        expected[(2, 1)] = Complex::new(j / 2.0, 0.0);
        assert!(h.max_abs_diff(&expected) < 1e-15);
        assert!(h.max_abs_diff(&h.adjoint()) == 0.0);
    }

    #[test]
    fn pure_zeeman_hamiltonian() {
        let h = dimer_hamiltonian(0.0, 1.0);
        assert!(h.max_abs_diff(&CMatrix::diag(&[-1.0, 0.0, 0.0, 1.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn reference_hamiltonian_examples() {
        let p = DimerParams { g_factor: 1.0, mu_b_over_kb: 1.0, field: 1.0, ..DimerParams::<f64>::default() };
        assert_eq!(build_reference_hamiltonian(&p), CMatrix::diag(&[-1.0, 0.0, 0.0, 1.0]).unwrap());
        let h0 = build_reference_hamiltonian(&zero_field());
        assert_eq!(h0, CMatrix::zeros(4).unwrap());
        let es = hermitian_eigen(&build_reference_hamiltonian(&p)).unwrap();
        assert!(es.vectors.max_abs_diff(&CMatrix::eye(4)) < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(DimerParams::<f64>::default().validate().is_ok());
        assert!(DimerParams::new(-1.0, 2.0, 1.0).is_err());
        assert!(DimerParams::new(1.0, 2.0, 1.0).is_err());
        assert!(DimerParams::new(748.0, 2.0, -1.0).is_err());
        assert_abs_diff_eq!(DimerParams::<f64>::default().e0(), 1.34342, epsilon = 1e-12);
    }

    #[test]
    fn gibbs_ground_state_limit() {
        let rho = gibbs_state(&build_hamiltonian(&zero_field()), T_MIN).unwrap();
        assert!(rho.matrix().max_abs_diff(singlet_state::<f64>().matrix()) < 1e-12);
    }

    #[test]
    fn gibbs_below_t_min_is_rejected() {
        let h = build_hamiltonian(&zero_field());
        assert!(matches!(gibbs_state(&h, 0.4), Err(Error::TemperatureTooLow { .. })));
        assert!(gibbs_state(&h, f64::NAN).is_err());
    }

    #[test]
    fn partition_function_at_room_temperature() {
        let h = build_hamiltonian(&zero_field());
        let ln_z = log_partition_function(&h, 300.0).unwrap();
        // Z = 3e^ξ + e^{−3ξ}, ξ = −748/1200.
        let x = -748.0 / 1200.0f64;
        let z = 3.0 * x.exp() + (-3.0 * x).exp();
        assert_abs_diff_eq!(ln_z.exp(), z, epsilon = 1e-10);
        assert_abs_diff_eq!(ln_z.exp(), 8.097, epsilon = 1e-3);
        assert_abs_diff_eq!(-ln_z, -2.0917, epsilon = 5e-4);
    }

    #[test]
    fn gibbs_commutes_with_hamiltonian() {
        let p = DimerParams::<f64>::default();
        let h = build_hamiltonian(&p);
        let rho = gibbs_state(&h, 120.0).unwrap();
        assert!(rho.matrix().commutator(&h).frobenius_norm() < 1e-10);
    }

    #[test]
    fn susceptibility_examples() {
        assert_abs_diff_eq!(reduced_susceptibility(&singlet_state::<f64>()), 0.0, epsilon = 1e-15);
        let h = build_hamiltonian(&zero_field());
        let hot = gibbs_state(&h, 1e9).unwrap();
        assert_abs_diff_eq!(reduced_susceptibility(&hot), 0.5, epsilon = 1e-6);
        let room = gibbs_state(&h, 300.0).unwrap();
        let want = 2.0 / (3.0 + (748.0f64 / 300.0).exp());
        assert_abs_diff_eq!(reduced_susceptibility(&room), want, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced_susceptibility(&room), 0.13244, epsilon = 1e-4);
    }

    #[test]
    fn discord_examples() {
        assert_eq!(discord_from_susceptibility(0.0), 0.5);
        assert_eq!(discord_from_susceptibility(0.5), 0.0);
        assert_abs_diff_eq!(discord_from_susceptibility(0.13244), 0.36756, epsilon = 1e-12);
    }

    #[test]
    fn spectral_ergotropy_examples() {
        let p = DimerParams::<f64>::default();
        let h0 = build_reference_hamiltonian(&p);
        let e0 = p.e0();
        assert_abs_diff_eq!(ergotropy_spectral(&singlet_state(), &h0).unwrap(), e0, epsilon = 1e-12);
        assert_abs_diff_eq!(brute_force_ergotropy(&singlet_state(), &h0).unwrap(), e0, epsilon = 1e-12);
        assert_eq!(ergotropy_spectral(&DensityMatrix::basis(0).unwrap(), &h0).unwrap(), 0.0);
        assert_abs_diff_eq!(ergotropy_spectral(&DensityMatrix::maximally_mixed(), &h0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn brute_force_examples() {
        let unit = DimerParams { g_factor: 1.0, mu_b_over_kb: 1.0, field: 1.0, ..DimerParams::<f64>::default() };
        let h0 = build_reference_hamiltonian(&unit);
        assert_abs_diff_eq!(brute_force_ergotropy(&singlet_state(), &h0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(brute_force_ergotropy(&DensityMatrix::maximally_mixed(), &h0).unwrap(), 0.0, epsilon = 1e-15);
        let p = DimerParams::<f64>::default();
        let h0 = build_reference_hamiltonian(&p);
        let rho = gibbs_state(&build_hamiltonian(&p), 150.0).unwrap();
        let a = ergotropy_spectral(&rho, &h0).unwrap();
        let b = brute_force_ergotropy(&rho, &h0).unwrap();
        assert!((a - b).abs() <= 1e-12);
        assert!(a > 0.0);
    }

    #[test]
    fn closed_form_ergotropy_values() {
        let p = DimerParams::<f64>::default();
        assert_abs_diff_eq!(ergotropy_closed(T_MIN, &p).unwrap().normalized, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ergotropy_closed(300.0, &p).unwrap().normalized, 0.7351, epsilon = 1e-3);
        assert_abs_diff_eq!(ergotropy_closed(100.0, &p).unwrap().normalized, 0.9978, epsilon = 1e-3);
        assert!(ergotropy_closed(300.0, &p).unwrap().within_regime);
        assert!(!ergotropy_closed(5.0, &p).unwrap().within_regime);
        let e = ergotropy_closed(300.0, &p).unwrap();
        assert_abs_diff_eq!(e.ergotropy, 2.0 * p.e0() * e.discord, epsilon = 1e-15);
    }

    #[test]
    fn passive_state_examples() {
        let p = DimerParams::<f64>::default();
        let h0 = build_reference_hamiltonian(&p);
        let sigma = passive_state(&singlet_state(), &h0).unwrap();
        assert!(sigma.matrix().max_abs_diff(DensityMatrix::<f64>::basis(0).unwrap().matrix()) < 1e-12);
        let mixed = passive_state(&DensityMatrix::maximally_mixed(), &h0).unwrap();
        assert!(mixed.matrix().max_abs_diff(DensityMatrix::<f64>::maximally_mixed().matrix()) < 1e-12);

        let rho = gibbs_state(&build_hamiltonian(&p), 150.0).unwrap();
        let sigma = passive_state(&rho, &h0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(sigma.matrix()[(i, j)].norm() < 1e-12);
                }
            }
        }
        let pops = sigma.populations();
        assert!(pops[0] >= pops[1] && pops[1] >= pops[2] && pops[2] >= pops[3]);
        // Middle pair is degenerate in H0, so only the outer ordering is fixed by energy.
        let mut eig = rho.eigen().values;
        eig.reverse();
        assert_abs_diff_eq!(pops[0], eig[0], epsilon = 1e-12);
        assert_abs_diff_eq!(pops[3], eig[3], epsilon = 1e-12);
    }

    #[test]
    fn variance_examples() {
        let unit = DimerParams { g_factor: 1.0, mu_b_over_kb: 1.0, field: 1.0, ..DimerParams::<f64>::default() };
        let h0 = build_reference_hamiltonian(&unit);
        assert_abs_diff_eq!(energy_variance(&singlet_state(), &h0), 0.0, epsilon = 1e-15);
        assert_eq!(energy_variance(&DensityMatrix::basis(0).unwrap(), &h0), 0.0);
        assert_abs_diff_eq!(energy_variance(&DensityMatrix::maximally_mixed(), &h0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn delta_sigma_examples() {
        let p = DimerParams::<f64>::default();
        let h0 = build_reference_hamiltonian(&p);
        let ground = DensityMatrix::basis(0).unwrap();
        assert_abs_diff_eq!(precision_delta_sigma(&singlet_state(), &ground, &h0), 0.0, epsilon = 1e-12);
        let mm = DensityMatrix::maximally_mixed();
        assert_eq!(precision_delta_sigma(&mm, &mm, &h0), 0.0);

        let rho = gibbs_state(&build_hamiltonian(&p), 150.0).unwrap();
        let sigma = passive_state(&rho, &h0).unwrap();
        let ds = precision_delta_sigma(&rho, &sigma, &h0);
        let want = energy_variance(&rho, &h0).sqrt() - energy_variance(&sigma, &h0).sqrt();
        assert_eq!(ds, want);
        assert!(ds.abs() > 1e-6);
    }

    #[test]
    fn sweep_examples() {
        let p = DimerParams::<f64>::default();
        let low = oracle_sweep(&p, &[1.0]).unwrap();
        assert_abs_diff_eq!(low[0].ergotropy_normalized, 1.0, epsilon = 1e-6);
        let room = oracle_sweep(&p, &[300.0]).unwrap();
        assert_abs_diff_eq!(room[0].ergotropy_normalized, 0.7351, epsilon = 1e-3);
        let grid = linear_grid(1.0, 300.0, 31);
        let sweep = oracle_sweep(&p, &grid).unwrap();
        assert_eq!(sweep.len(), 31);
        assert!(sweep.windows(2).all(|w| w[1].ergotropy_normalized <= w[0].ergotropy_normalized));
        for pt in &sweep {
            assert!(pt.discord >= 0.0 && pt.discord <= 0.5);
            assert!(pt.ergotropy_normalized >= 0.0 && pt.ergotropy_normalized <= 1.0);
            assert!(pt.ln_partition.is_finite());
        }
    }

    #[test]
    fn sweep_reports_offending_temperature() {
        let err = oracle_sweep(&DimerParams::<f64>::default(), &[0.1, 10.0]).unwrap_err();
        assert!(matches!(err, Error::AtTemperature { t, .. } if t == 0.1));
        assert!(oracle_sweep(&DimerParams::<f64>::default(), &[10.0, 5.0]).is_err());
    }

    fn rotate_columns(es: &EigenSystem<f64>, cols: (usize, usize), u: &CMatrix<f64>) -> EigenSystem<f64> {
        let mut block = CMatrix::eye(4);
        block[(cols.0, cols.0)] = u[(0, 0)];
        block[(cols.0, cols.1)] = u[(0, 1)];
        block[(cols.1, cols.0)] = u[(1, 0)];
        block[(cols.1, cols.1)] = u[(1, 1)];
        EigenSystem { values: es.values.clone(), vectors: es.vectors * block }
    }

    #[test]
    fn degenerate_eigenbasis_choice_does_not_matter() {
        // Zero-field Gibbs states have a threefold degenerate triplet block and H0
        // has a degenerate middle pair; any basis of those subspaces must give the
        // same ergotropy.
        let rho = gibbs_state(&build_hamiltonian(&zero_field()), 200.0).unwrap();
        let h0 = build_reference_hamiltonian(&DimerParams::<f64>::default());
        let sp = ordered_spectra(&rho, &h0).unwrap();
        let base = spectral_sum(&sp.rho, &sp.h0);
        assert!((base - ergotropy_spectral(&rho, &h0).unwrap()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = haar_unitary::<f64, _>(&mut rng, 2);
            // ρ descending: singlet weight first, then the three triplet weights.
            let r = rotate_columns(&sp.rho, (1, 2), &u);
            assert!(r.reconstruct().max_abs_diff(rho.matrix()) < 1e-12);
            let v = haar_unitary::<f64, _>(&mut rng, 2);
            let h = rotate_columns(&sp.h0, (1, 2), &v);
            assert!((spectral_sum(&r, &h) - base).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_oracle() {
        let p = DimerParams::<f32>::default();
        let pt = thermal_point(&p, 300.0f32).unwrap();
        assert!((pt.ergotropy_normalized - 0.7351).abs() < 1e-3);
        assert!((pt.ln_partition - 2.0917).abs() < 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn gibbs_matches_closed_form(t in 0.5f64..2000.0, b in 0.0f64..50.0) {
            let p = DimerParams::<f64>::default().with_field(b);
            let (rho, ln_z) = gibbs_with_log_partition(&build_hamiltonian(&p), t).unwrap();
            prop_assert!(rho.matrix().max_abs_diff(&x_state_closed_form(&p, t)) <= 1e-12);
            prop_assert!((ln_z - log_partition_closed_form(&p, t)).abs() <= 1e-10 * ln_z.abs().max(1.0));
        }

        #[test]
        fn susceptibility_matches_bleaney_bowers(t in 0.5f64..1e5) {
            let p = zero_field();
            let rho = gibbs_state(&build_hamiltonian(&p), t).unwrap();
            prop_assert!((reduced_susceptibility(&rho) - bleaney_bowers_reduced(748.0, t)).abs() <= 1e-10);
        }

        #[test]
        fn normalized_ergotropy_is_twice_discord(t in 0.5f64..1e4) {
            let pt = thermal_point(&DimerParams::<f64>::default(), t).unwrap();
            prop_assert_eq!(pt.ergotropy_normalized, 2.0 * pt.discord);
            prop_assert!((0.0..=1.0).contains(&pt.ergotropy_normalized));
        }

        #[test]
        fn closed_form_tracks_spectral_in_high_temperature_regime(t in 50.0f64..300.0, b in 0.0f64..=1.0) {
            let p = DimerParams::<f64>::default().with_field(b);
            prop_assume!(p.e0() > 0.0);
            let h0 = build_reference_hamiltonian(&p);
            let rho = gibbs_state(&build_hamiltonian(&p), t).unwrap();
            let spectral = ergotropy_spectral(&rho, &h0).unwrap();
            let closed = ergotropy_closed(t, &p).unwrap().ergotropy;
            prop_assert!((closed - spectral).abs() <= 0.01 * spectral);
        }

        #[test]
        fn spectral_matches_brute_force(seed in any::<u64>(), rank in 1usize..=4, b in 0.1f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density::<f64, _>(&mut rng, rank);
            let h0 = build_reference_hamiltonian(&DimerParams::<f64>::default().with_field(b));
            let a = ergotropy_spectral(&rho, &h0).unwrap();
            let bf = brute_force_ergotropy(&rho, &h0).unwrap();
            prop_assert!((a - bf).abs() <= 1e-12);
        }

        #[test]
        fn passive_state_is_passive(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density::<f64, _>(&mut rng, 4);
            let h0 = build_reference_hamiltonian(&DimerParams::<f64>::default());
            let sigma = passive_state(&rho, &h0).unwrap();
            prop_assert!(ergotropy_spectral(&sigma, &h0).unwrap() <= 1e-12);
            prop_assert!(sigma.matrix().commutator(&h0).frobenius_norm() <= 1e-10);
            let released = rho.expectation(&h0) - sigma.expectation(&h0);
            prop_assert!((released - ergotropy_spectral(&rho, &h0).unwrap()).abs() <= 1e-12);
        }
    }
}

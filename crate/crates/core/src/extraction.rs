//! Work extraction: the fixed gate protocol, the optimal unitary, and per-state
//! energy/precision reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{measure_populations, run, Circuit, Gate, NoiseModel};
use crate::oracle::{build_reference_hamiltonian, ergotropy_spectral, passive_unitary, precision_delta_sigma, DimerParams};
use crate::qmatrix::{ground_fidelity, CMatrix, DensityMatrix};
use crate::{Error, Real, Result};

/// Zero-controlled CNOT(0→1), H on 0, X on 0. Takes the singlet to |00⟩.
pub fn protocol_circuit<T: Real>() -> Circuit<T> {
    let mut c = Circuit::new();
    c.push(Gate::cnot_zero_ctrl(0, 1)).push(Gate::h(0)).push(Gate::x(0));
    c
}

/// The operator sequence CNOT(0→1) then H on 0, kept for comparison. It sends
/// the singlet to |11⟩.
pub fn printed_protocol_circuit<T: Real>() -> Circuit<T> {
    let mut c = Circuit::new();
    c.push(Gate::cx(0, 1)).push(Gate::h(0));
    c
}

/// U = Σ_i |ε_i⟩⟨ϱ_i|.
pub fn optimal_extraction_unitary<T: Real>(rho: &DensityMatrix<T>, h0: &CMatrix<T>) -> Result<CMatrix<T>> {
    passive_unitary(rho, h0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    #[default]
    Noiseless,
    Noisy,
}

impl ExtractionMode {
    pub fn of(nm: &NoiseModel) -> Self {
        if nm.enabled {
            ExtractionMode::Noisy
        } else {
            ExtractionMode::Noiseless
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExtractionMode::Noiseless => "noiseless",
            ExtractionMode::Noisy => "noisy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReportRow<T> {
    pub temperature: T,
    /// Measured basis populations (after readout error when noisy).
    pub populations: [T; 4],
    /// sqrt(⟨00|σ|00⟩) of the output state.
    pub fidelity: T,
    /// tr(H0 ρ) − tr(H0 σ), Kelvin.
    pub delta_e: T,
    pub ergotropy_oracle: T,
    /// sqrt(V(ρ)) − sqrt(V(σ)), Kelvin.
    pub delta_sigma: T,
    pub mode: ExtractionMode,
}

impl<T: Real> ExtractionReportRow<T> {
    pub fn abs_delta_sigma(&self) -> T {
        self.delta_sigma.abs()
    }
}

/// Applies [`protocol_circuit`] to `rho` and reports against the Zeeman Hamiltonian.
pub fn run_extraction<T: Real>(t: T, rho: &DensityMatrix<T>, nm: &NoiseModel, p: &DimerParams<T>) -> Result<ExtractionReportRow<T>> {
    let h0 = build_reference_hamiltonian(p);
    let sigma = run(&protocol_circuit(), rho, nm)?;
    Ok(ExtractionReportRow {
        temperature: t,
        populations: measure_populations(&sigma, nm),
        fidelity: ground_fidelity(&sigma)?,
        delta_e: rho.expectation(&h0) - sigma.expectation(&h0),
        ergotropy_oracle: ergotropy_spectral(rho, &h0)?,
        delta_sigma: precision_delta_sigma(rho, &sigma, &h0),
        mode: ExtractionMode::of(nm),
    })
}

/// One row per state, in input order.
pub fn extraction_sweep<T: Real>(states: &[(T, DensityMatrix<T>)], nm: &NoiseModel, p: &DimerParams<T>) -> Result<Vec<ExtractionReportRow<T>>> {
    p.validate()?;
    nm.validate()?;
    states
        .par_iter()
        .map(|(t, rho)| run_extraction(*t, rho, nm, p).map_err(|e| Error::at_temperature(t.as_f64(), e)))
        .collect()
}

/// Mean measured populations over rows with temperature below `t_max`.
pub fn average_populations<T: Real>(rows: &[ExtractionReportRow<T>], t_max: f64) -> Option<[f64; 4]> {
    let low: Vec<_> = rows.iter().filter(|r| r.temperature.as_f64() < t_max).collect();
    if low.is_empty() {
        return None;
    }
    let mut avg = [0.0; 4];
    for r in &low {
        for (a, p) in avg.iter_mut().zip(r.populations) {
            *a += p.as_f64() / low.len() as f64;
        }
    }
    Some(avg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{build_hamiltonian, gibbs_state, passive_state, singlet_state, singlet_vector, thermal_point};
    use crate::random::random_density;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> DimerParams<f64> {
        DimerParams::default()
    }

    #[test]
    fn protocol_sends_singlet_to_ground_with_unit_amplitude() {
        let u = protocol_circuit::<f64>().unitary().unwrap();
        let psi = singlet_vector::<f64>();
        let out: Vec<Complex<f64>> = (0..4).map(|i| (0..4).map(|j| u[(i, j)] * psi[j]).sum()).collect();
        assert_abs_diff_eq!(out[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[0].im, 0.0, epsilon = 1e-15);
        let nm = NoiseModel::ideal();
        let sigma = run(&protocol_circuit(), &singlet_state(), &nm).unwrap();
        assert!(sigma.matrix().max_abs_diff(DensityMatrix::<f64>::basis(0).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn printed_order_lands_on_top_state() {
        let u = printed_protocol_circuit::<f64>().unitary().unwrap();
        let psi = singlet_vector::<f64>();
        let amp: Complex<f64> = (0..4).map(|j| u[(3, j)] * psi[j]).sum();
        assert_abs_diff_eq!(amp.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_goes_to_even_superposition() {
        // the zero-controlled flip fires on |00>, giving (|01> + |11>)/sqrt2
        let sigma = run(&protocol_circuit(), &DensityMatrix::<f64>::basis(0).unwrap(), &NoiseModel::ideal()).unwrap();
        let mut u = CMatrix::identity(4).unwrap();
        for g in &protocol_circuit::<f64>().gates {
            u = g.unitary().unwrap() * u;
        }
        let want = [0.0, 0.5, 0.0, 0.5];
        for k in 0..4 {
            assert_abs_diff_eq!(sigma.populations()[k], want[k], epsilon = 1e-15);
            assert_abs_diff_eq!(u[(k, 0)].norm_sqr(), want[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn protocol_transpiles_faithfully() {
        let c = protocol_circuit::<f64>();
        let t = c.transpile().unwrap();
        assert!(t.gates.iter().all(|g| g.kind.is_basis()));
        assert!(t.unitary().unwrap().phase_distance(&c.unitary().unwrap()) <= 1e-10);
    }

    #[test]
    fn optimal_unitary_examples() {
        let h0 = build_reference_hamiltonian(&params());
        let s = singlet_state::<f64>();
        let u = optimal_extraction_unitary(&s, &h0).unwrap();
        assert!(s.evolve(&u).matrix().max_abs_diff(DensityMatrix::<f64>::basis(0).unwrap().matrix()) < 1e-12);
        let mixed = DensityMatrix::<f64>::maximally_mixed();
        let u = optimal_extraction_unitary(&mixed, &h0).unwrap();
        assert!(mixed.evolve(&u).matrix().max_abs_diff(mixed.matrix()) < 1e-14);
    }

    #[test]
    fn optimal_unitary_reaches_passive_state() {
        let h0 = build_reference_hamiltonian(&params());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for k in 0..1000 {
            let rho = random_density::<f64, _>(&mut rng, 1 + k % 4);
            let u = optimal_extraction_unitary(&rho, &h0).unwrap();
            assert!(u.is_unitary(1e-10));
            let passive = passive_state(&rho, &h0).unwrap();
            assert!(rho.evolve(&u).matrix().max_abs_diff(passive.matrix()) < 1e-10);
            let drop = rho.expectation(&h0) - rho.evolve(&u).expectation(&h0);
            assert_abs_diff_eq!(drop, ergotropy_spectral(&rho, &h0).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn singlet_report() {
        let p = params();
        let row = run_extraction(1.0, &singlet_state(), &NoiseModel::ideal(), &p).unwrap();
        for (got, want) in row.populations.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(row.fidelity, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(row.delta_e, p.e0(), epsilon = 1e-12);
        assert_abs_diff_eq!(row.delta_sigma, 0.0, epsilon = 1e-9);
        assert_eq!(row.mode, ExtractionMode::Noiseless);

        let row = run_extraction(1.0, &DensityMatrix::maximally_mixed(), &NoiseModel::ideal(), &p).unwrap();
        assert_abs_diff_eq!(row.delta_sigma, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(row.delta_e, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn noisy_singlet_mostly_reaches_ground() {
        let row = run_extraction(1.0, &singlet_state(), &NoiseModel::table1(), &params()).unwrap();
        assert_eq!(row.mode, ExtractionMode::Noisy);
        assert!(row.populations[0] >= 0.8, "{:?}", row.populations);
        assert!(row.fidelity < 1.0);
        assert_abs_diff_eq!(row.populations.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn fixed_circuit_never_beats_ergotropy(seed in any::<u64>(), rank in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density::<f64, _>(&mut rng, rank);
            let row = run_extraction(1.0, &rho, &NoiseModel::ideal(), &params()).unwrap();
            prop_assert!(row.delta_e <= row.ergotropy_oracle + 1e-9);
            prop_assert!((0.0..=1.0).contains(&row.fidelity));
            prop_assert!((row.populations.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn gibbs_states_give_bounded_work(t in 0.5f64..400.0) {
            let p = params();
            let h0 = build_reference_hamiltonian(&p);
            let rho = gibbs_state(&build_hamiltonian(&p), t).unwrap();
            let row = run_extraction(t, &rho, &NoiseModel::ideal(), &p).unwrap();
            let min_energy = -p.e0();
            prop_assert!(row.delta_e >= -1e-12, "ΔE {}", row.delta_e);
            prop_assert!(row.delta_e <= row.ergotropy_oracle + 1e-9);
            prop_assert!(row.ergotropy_oracle <= rho.expectation(&h0) - min_energy + 1e-12);
        }
    }

    #[test]
    fn pure_singlet_regime_is_optimal() {
        let p = params();
        let grid: Vec<f64> = (1..=83).map(f64::from).collect();
        let states: Vec<_> = grid.iter().map(|&t| (t, thermal_point(&p, t).unwrap().rho)).collect();
        let rows = extraction_sweep(&states, &NoiseModel::ideal(), &p).unwrap();
        for (r, (_, rho)) in rows.iter().zip(&states) {
            assert!(r.fidelity >= 0.999, "T = {}: {}", r.temperature, r.fidelity);
            // |00> and |11> triplets land at E0/2 instead of 0 and E0
            let pops = rho.populations();
            let gap = (pops[0] - pops[3]) * p.e0() / 2.0;
            assert_abs_diff_eq!(r.ergotropy_oracle - r.delta_e, gap, epsilon = 1e-12);
            if r.temperature <= 40.0 {
                assert!(gap <= 1e-9);
            }
        }
        let avg = average_populations(&rows, 100.0).unwrap();
        assert!(avg[0] > 0.99);
    }

    #[test]
    fn fidelity_falls_with_temperature() {
        let p = params();
        let states: Vec<_> = [50.0, 280.0].iter().map(|&t| (t, thermal_point(&p, t).unwrap().rho)).collect();
        let rows = extraction_sweep(&states, &NoiseModel::ideal(), &p).unwrap();
        assert_eq!(rows[0].temperature, 50.0);
        assert!(rows[1].fidelity < rows[0].fidelity);
        assert!(average_populations(&rows, 10.0).is_none());
    }
}

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::gate::{mask, GateKind};
use crate::qmatrix::CMatrix;
use crate::{Error, Real, Result};

/// Readout assignment matrix A with A[i][j] = P(read i | prepared j).
pub type Assignment = [[f64; 2]; 2];

pub const TABLE1_T1_S: f64 = 1.5774397097652505e-4;
pub const TABLE1_T2_S: f64 = 1.0861203881817735e-4;
pub const TABLE1_FREQUENCY_HZ: f64 = 5227644738.696302;
pub const DEFAULT_READOUT_FLIP: f64 = 0.02;

/// Gate-level noise: thermal relaxation after noisy instructions, optional
/// depolarizing error, and per-qubit readout assignment errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub enabled: bool,
    pub basis_gates: Vec<GateKind>,
    pub noisy_instructions: Vec<GateKind>,
    pub qubits: Vec<usize>,
    pub t1_s: f64,
    pub t2_s: f64,
    /// Qubit frequency; metadata only at zero environment temperature.
    pub frequency_hz: f64,
    pub durations_ns: BTreeMap<GateKind, f64>,
    pub readout: [Assignment; 2],
    pub depolarizing_prob: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::table1()
    }
}

pub fn symmetric_assignment(p: f64) -> Assignment {
    [[1.0 - p, p], [p, 1.0 - p]]
}

impl NoiseModel {
    /// Backend description with the published T1/T2 and default durations and readout.
    pub fn table1() -> Self {
        let durations_ns = [
            (GateKind::Sx, 35.6),
            (GateKind::X, 35.6),
            (GateKind::Id, 35.6),
            (GateKind::Cx, 320.0),
            (GateKind::Measure, 1000.0),
            (GateKind::Rz, 0.0),
            (GateKind::Delay, 0.0),
            (GateKind::Reset, 0.0),
        ]
        .into_iter()
        .collect();
        NoiseModel {
            enabled: true,
            basis_gates: GateKind::BASIS.to_vec(),
            noisy_instructions: vec![GateKind::Sx, GateKind::Id, GateKind::X, GateKind::Cx, GateKind::Measure],
            qubits: vec![0, 1],
            t1_s: TABLE1_T1_S,
            t2_s: TABLE1_T2_S,
            frequency_hz: TABLE1_FREQUENCY_HZ,
            durations_ns,
            readout: [symmetric_assignment(DEFAULT_READOUT_FLIP); 2],
            depolarizing_prob: 0.0,
        }
    }

    /// Same document with noise switched off.
    pub fn ideal() -> Self {
        NoiseModel { enabled: false, ..Self::table1() }
    }

    pub fn with_readout_flip(mut self, p: f64) -> Self {
        self.readout = [symmetric_assignment(p); 2];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNoiseModel(msg));
        if !(self.t1_s > 0.0 && self.t1_s.is_finite()) || !(self.t2_s > 0.0 && self.t2_s.is_finite()) {
            return bad(format!("t1_s and t2_s must be positive and finite (got {}, {})", self.t1_s, self.t2_s));
        }
        if self.t2_s > 2.0 * self.t1_s {
            return Err(Error::InvalidRelaxation { t1: self.t1_s, t2: self.t2_s });
        }
        if self.qubits != [0, 1] {
            return bad(format!("qubits must be [0, 1], got {:?}", self.qubits));
        }
        for (kind, &ns) in &self.durations_ns {
            if !(ns >= 0.0 && ns.is_finite()) {
                return bad(format!("duration of `{kind}` must be a non-negative number of ns, got {ns}"));
            }
        }
        for (q, a) in self.readout.iter().enumerate() {
            for (j, (&top, &bottom)) in a[0].iter().zip(&a[1]).enumerate() {
                if (top + bottom - 1.0).abs() > 1e-12 || top < 0.0 || bottom < 0.0 {
                    return bad(format!("readout matrix of qubit {q}: column {j} is not a distribution"));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.depolarizing_prob) {
            return bad(format!("depolarizing_prob {} outside [0, 1]", self.depolarizing_prob));
        }
        Ok(())
    }

    pub fn duration_s(&self, kind: GateKind) -> f64 {
        self.durations_ns.get(&kind).copied().unwrap_or(0.0) * 1e-9
    }

    pub fn is_noisy(&self, kind: GateKind) -> bool {
        self.enabled && self.noisy_instructions.contains(&kind)
    }

    pub fn is_basis(&self, kind: GateKind) -> bool {
        self.basis_gates.contains(&kind)
    }
}

/// (e^{−dt/T1}, e^{−dt/T2}): excited-population and coherence decay over `dt`.
pub fn relaxation_factors(t1: f64, t2: f64, dt: f64) -> Result<(f64, f64)> {
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(Error::InvalidNoiseModel(format!("T1 and T2 must be positive (got {t1}, {t2})")));
    }
    if t2 > 2.0 * t1 {
        return Err(Error::InvalidRelaxation { t1, t2 });
    }
    if !(dt >= 0.0) {
        return Err(Error::InvalidParameter(format!("duration {dt} s must be non-negative")));
    }
    Ok(((-dt / t1).exp(), (-dt / t2).exp()))
}

/// Thermal relaxation toward |0⟩ on qubit `q`, applied entrywise:
/// |1⟩⟨1| blocks scale by `pop`, coherences by `coh`, and the lost excited
/// population flows into the |0⟩⟨0| block.
pub fn relax_qubit<T: Real>(m: &mut CMatrix<T>, q: usize, pop: f64, coh: f64) {
    let bit = mask(q);
    let p = T::lit(pop);
    let loss = T::lit(1.0 - pop);
    let cd = T::lit(coh);
    for i in 0..4 {
        for j in 0..4 {
            if i & bit == 0 && j & bit == 0 {
                let flow = m[(i | bit, j | bit)] * loss;
                m[(i, j)] = m[(i, j)] + flow;
            }
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            match (i & bit != 0, j & bit != 0) {
                (true, true) => m[(i, j)] = m[(i, j)] * p,
                (false, false) => {}
                _ => m[(i, j)] = m[(i, j)] * cd,
            }
        }
    }
}

/// ρ → (1 − p)ρ + p·(Tr_q ρ) ⊗ I/2 on qubit `q`.
pub fn depolarize_qubit<T: Real>(m: &mut CMatrix<T>, q: usize, prob: f64) {
    if prob == 0.0 {
        return;
    }
    let bit = mask(q);
    let keep = T::lit(1.0 - prob);
    let mix = T::lit(0.5 * prob);
    let orig = *m;
    for i in 0..4 {
        for j in 0..4 {
            let replaced = if (i & bit) == (j & bit) {
                orig[(i & !bit, j & !bit)] + orig[(i | bit, j | bit)]
            } else {
                Complex::zero()
            };
            m[(i, j)] = orig[(i, j)] * keep + replaced * mix;
        }
    }
}

/// Non-selective computational-basis measurement of qubit `q`.
pub fn dephase_qubit<T: Real>(m: &mut CMatrix<T>, q: usize) {
    let bit = mask(q);
    for i in 0..4 {
        for j in 0..4 {
            if (i & bit) != (j & bit) {
                m[(i, j)] = Complex::zero();
            }
        }
    }
}

/// Replaces qubit `q` with |0⟩, keeping the reduced state of the other qubit.
pub fn reset_qubit<T: Real>(m: &mut CMatrix<T>, q: usize) {
    let bit = mask(q);
    let orig = *m;
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = if i & bit == 0 && j & bit == 0 {
                orig[(i, j)] + orig[(i | bit, j | bit)]
            } else {
                Complex::zero()
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::embed;
    use crate::qmatrix::DensityMatrix;
    use crate::random::random_density;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Amplitude damping followed by pure dephasing, as explicit Kraus operators.
    fn kraus_relaxation(rho: &CMatrix<f64>, q: usize, pop: f64, coh: f64) -> CMatrix<f64> {
        let c = |re: f64| Complex::new(re, 0.0);
        let z = Complex::zero();
        let ad = [
            CMatrix::from_row_major(&[c(1.0), z, z, c(pop.sqrt())]).unwrap(),
            CMatrix::from_row_major(&[z, c((1.0 - pop).sqrt()), z, z]).unwrap(),
        ];
        let lambda = coh / pop.sqrt();
        let pd = [
            CMatrix::from_row_major(&[c(1.0), z, z, c(1.0)]).unwrap().scale_real(((1.0 + lambda) / 2.0).sqrt()),
            CMatrix::from_row_major(&[c(1.0), z, z, c(-1.0)]).unwrap().scale_real(((1.0 - lambda) / 2.0).sqrt()),
        ];
        let apply = |ops: &[CMatrix<f64>; 2], r: &CMatrix<f64>| {
            ops.iter().fold(CMatrix::zeroed(4), |acc, k| {
                let k4 = embed(k, q).unwrap();
                acc + k4 * *r * k4.adjoint()
            })
        };
        apply(&pd, &apply(&ad, rho))
    }

    #[test]
    fn relaxation_factor_examples() {
        assert_eq!(relaxation_factors(1e-4, 1e-4, 0.0).unwrap(), (1.0, 1.0));
        let (p, _) = relaxation_factors(1e-4, 1e-4, 1e-4 * 2f64.ln()).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_eq!(relaxation_factors(1e-4, 1e-4, f64::INFINITY).unwrap(), (0.0, 0.0));
        assert!(matches!(relaxation_factors(1e-4, 3e-4, 1e-9), Err(Error::InvalidRelaxation { .. })));
    }

    #[test]
    fn full_relaxation_reaches_ground() {
        let mut m = *DensityMatrix::<f64>::basis(3).unwrap().matrix();
        relax_qubit(&mut m, 0, 0.0, 0.0);
        relax_qubit(&mut m, 1, 0.0, 0.0);
        assert!(m.max_abs_diff(DensityMatrix::<f64>::basis(0).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn table1_model_is_valid_and_round_trips() {
        let nm = NoiseModel::table1();
        nm.validate().unwrap();
        assert!(nm.t2_s <= 2.0 * nm.t1_s);
        let json = serde_json::to_string(&nm).unwrap();
        assert!(json.contains("\"durations_ns\":{\"cx\":320.0"));
        let back: NoiseModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, nm);
    }

    #[test]
    fn invalid_models_are_rejected() {
        let nm = NoiseModel { t2_s: 3.0 * TABLE1_T1_S, ..NoiseModel::table1() };
        assert!(matches!(nm.validate(), Err(Error::InvalidRelaxation { .. })));
        let mut nm = NoiseModel::table1();
        nm.readout[1] = [[0.9, 0.1], [0.2, 0.9]];
        assert!(matches!(nm.validate(), Err(Error::InvalidNoiseModel(_))));
        let err = serde_json::from_str::<NoiseModel>(r#"{"t3_s": 1.0}"#).unwrap_err();
        assert!(err.to_string().contains("t3_s"));
    }

    #[test]
    fn reset_and_dephase() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density::<f64, _>(&mut rng, 4);
        let mut m = *rho.matrix();
        reset_qubit(&mut m, 1);
        let out = DensityMatrix::new(m).unwrap();
        let p = out.populations();
        assert!(p[1].abs() < 1e-15 && p[3].abs() < 1e-15);
        let mut m = *rho.matrix();
        dephase_qubit(&mut m, 0);
        assert!(m[(0, 2)].norm() == 0.0 && m[(1, 3)].norm() == 0.0);
        assert_abs_diff_eq!(m.trace().re, 1.0, epsilon = 1e-12);
    }

    type Channel<'a> = dyn Fn(&mut CMatrix<f64>) + 'a;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn relaxation_matches_kraus_form(seed in any::<u64>(), q in 0usize..2, t in 0.0f64..5.0, ratio in 0.05f64..=2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density::<f64, _>(&mut rng, 4);
            let (pop, coh) = relaxation_factors(1.0, ratio, t).unwrap();
            let mut m = *rho.matrix();
            relax_qubit(&mut m, q, pop, coh);
            prop_assert!(m.max_abs_diff(&kraus_relaxation(rho.matrix(), q, pop, coh)) <= 1e-12);
        }

        #[test]
        fn channels_are_cptp_on_random_states(seed in any::<u64>(), q in 0usize..2, dt in 0.0f64..1e-3, prob in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density::<f64, _>(&mut rng, 1 + (seed % 4) as usize);
            let (pop, coh) = relaxation_factors(TABLE1_T1_S, TABLE1_T2_S, dt).unwrap();
            let maps: [&Channel; 4] = [
                &|m| relax_qubit(m, q, pop, coh),
                &|m| depolarize_qubit(m, q, prob),
                &|m| dephase_qubit(m, q),
                &|m| reset_qubit(m, q),
            ];
            for f in maps {
                let mut m = *rho.matrix();
                f(&mut m);
                prop_assert!((m.trace().re - 1.0).abs() <= 1e-9);
                prop_assert!(crate::qmatrix::hermitian_eigen(&m).unwrap().values[0] >= -1e-9);
            }
        }
    }
}

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::qmatrix::CMatrix;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Cx,
    Delay,
    Id,
    Measure,
    Reset,
    Rz,
    Sx,
    X,
    H,
    Rx,
    Ry,
    CnotZeroCtrl,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::Cx,
        GateKind::Delay,
        GateKind::Id,
        GateKind::Measure,
        GateKind::Reset,
        GateKind::Rz,
        GateKind::Sx,
        GateKind::X,
        GateKind::H,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::CnotZeroCtrl,
    ];

    /// The eight hardware basis kinds.
    pub const BASIS: [GateKind; 8] = [
        GateKind::Cx,
        GateKind::Delay,
        GateKind::Id,
        GateKind::Measure,
        GateKind::Reset,
        GateKind::Rz,
        GateKind::Sx,
        GateKind::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Cx => "cx",
            GateKind::Delay => "delay",
            GateKind::Id => "id",
            GateKind::Measure => "measure",
            GateKind::Reset => "reset",
            GateKind::Rz => "rz",
            GateKind::Sx => "sx",
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::CnotZeroCtrl => "cnot_zero_ctrl",
        }
    }

    pub fn is_basis(self) -> bool {
        Self::BASIS.contains(&self)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::CnotZeroCtrl => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::Rx | GateKind::Ry)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// One instruction on the two-qubit register. For two-qubit kinds the first
/// qubit is the control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate<T> {
    pub kind: GateKind,
    qubits: [usize; 2],
    /// Rotation angle in radians; zero for non-rotation kinds.
    pub angle: T,
    /// Duration in seconds, filled in by transpilation or set for `delay`.
    pub duration: Option<f64>,
}

impl<T: Real> Gate<T> {
    /// Checked constructor.
    pub fn new(kind: GateKind, qubits: &[usize], angle: T) -> Result<Self> {
        let invalid = || Error::InvalidQubits { kind: kind.to_string(), qubits: qubits.to_vec() };
        if qubits.len() != kind.arity() || qubits.iter().any(|&q| q > 1) {
            return Err(invalid());
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(invalid());
        }
        let second = if kind.arity() == 2 { qubits[1] } else { 0 };
        Ok(Gate { kind, qubits: [qubits[0], second], angle, duration: None })
    }

    fn one(kind: GateKind, q: usize, angle: T) -> Self {
        Gate { kind, qubits: [q, 0], angle, duration: None }
    }

    fn two(kind: GateKind, control: usize, target: usize) -> Self {
        Gate { kind, qubits: [control, target], angle: T::zero(), duration: None }
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, T::zero())
    }
    pub fn sx(q: usize) -> Self {
        Self::one(GateKind::Sx, q, T::zero())
    }
    pub fn id(q: usize) -> Self {
        Self::one(GateKind::Id, q, T::zero())
    }
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, T::zero())
    }
    pub fn rz(q: usize, theta: T) -> Self {
        Self::one(GateKind::Rz, q, theta)
    }
    pub fn rx(q: usize, theta: T) -> Self {
        Self::one(GateKind::Rx, q, theta)
    }
    pub fn ry(q: usize, theta: T) -> Self {
        Self::one(GateKind::Ry, q, theta)
    }
    pub fn measure(q: usize) -> Self {
        Self::one(GateKind::Measure, q, T::zero())
    }
    pub fn reset(q: usize) -> Self {
        Self::one(GateKind::Reset, q, T::zero())
    }
    pub fn delay(q: usize, seconds: f64) -> Self {
        Gate { duration: Some(seconds), ..Self::one(GateKind::Delay, q, T::zero()) }
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::Cx, control, target)
    }
    pub fn cnot_zero_ctrl(control: usize, target: usize) -> Self {
        Self::two(GateKind::CnotZeroCtrl, control, target)
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn validate(&self) -> Result<()> {
        Gate::new(self.kind, self.qubits(), self.angle).map(|_| ())
    }

    pub(crate) fn with_duration(self, duration: Option<f64>) -> Self {
        Gate { duration, ..self }
    }

    /// 2×2 matrix of a single-qubit unitary kind.
    pub fn local_matrix(&self) -> Result<CMatrix<T>> {
        let z = Complex::zero();
        let o = Complex::one();
        let half = T::lit(0.5);
        let (s, c) = (self.angle * half).sin_cos();
        let entries = match self.kind {
            GateKind::Id | GateKind::Delay => [o, z, z, o],
            GateKind::X => [z, o, o, z],
            GateKind::Sx => {
                let p = Complex::new(half, half);
                let m = Complex::new(half, -half);
                [p, m, m, p]
            }
            GateKind::H => {
                let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                [r, r, r, -r]
            }
            GateKind::Rz => [Complex::new(c, -s), z, z, Complex::new(c, s)],
            GateKind::Rx => [Complex::new(c, T::zero()), Complex::new(T::zero(), -s), Complex::new(T::zero(), -s), Complex::new(c, T::zero())],
            GateKind::Ry => [Complex::new(c, T::zero()), Complex::new(-s, T::zero()), Complex::new(s, T::zero()), Complex::new(c, T::zero())],
            GateKind::Cx | GateKind::CnotZeroCtrl | GateKind::Measure | GateKind::Reset => {
                return Err(Error::NonUnitary(format!("{} as a single-qubit matrix", self.kind)))
            }
        };
        CMatrix::from_row_major(&entries)
    }

    /// Full 4×4 unitary on the register.
    pub fn unitary(&self) -> Result<CMatrix<T>> {
        match self.kind {
            GateKind::Cx | GateKind::CnotZeroCtrl => {
                let (ctrl, tgt) = (mask(self.qubits[0]), mask(self.qubits[1]));
                let want = if self.kind == GateKind::Cx { ctrl } else { 0 };
                let mut u = CMatrix::zeroed(4);
                for b in 0..4 {
                    let out = if b & ctrl == want { b ^ tgt } else { b };
                    u[(out, b)] = Complex::one();
                }
                Ok(u)
            }
            GateKind::Measure | GateKind::Reset => Err(Error::NonUnitary(self.kind.to_string())),
            _ => embed(&self.local_matrix()?, self.qubits[0]),
        }
    }
}

/// Bit of qubit `q` in a basis index; qubit 0 is the high bit.
#[inline]
pub(crate) fn mask(q: usize) -> usize {
    1 << (1 - q)
}

/// u acting on qubit `q`, identity on the other.
pub fn embed<T: Real>(u: &CMatrix<T>, q: usize) -> Result<CMatrix<T>> {
    let id = CMatrix::eye(2);
    match q {
        0 => CMatrix::kron(u, &id),
        1 => CMatrix::kron(&id, u),
        _ => Err(Error::InvalidQubits { kind: "embed".into(), qubits: vec![q] }),
    }
}

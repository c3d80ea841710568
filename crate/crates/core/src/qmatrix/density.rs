use num_complex::Complex;

use super::eigen::{hermitian_eigen, jacobi, EigenSystem};
use super::CMatrix;
use crate::{Error, Real, Result};

/// Default validation tolerance: 1e-9 in double precision, looser in single.
pub fn default_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(1e3))
}

/// Two-qubit density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
    tol: T,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, default_tolerance())
    }

    pub fn with_tolerance(matrix: CMatrix<T>, tol: T) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimMismatch(matrix.dim(), 4));
        }
        matrix.check_hermitian(tol)?;
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || !tr.re.is_finite() {
            return Err(Error::Trace(tr.re.as_f64()));
        }
        let min = jacobi(&matrix).values[0];
        if min < -tol {
            return Err(Error::NotPositive(min.as_f64()));
        }
        Ok(DensityMatrix { matrix, tol })
    }

    /// Skips validation; for matrices produced by maps known to be CPTP.
    pub(crate) fn from_trusted(matrix: CMatrix<T>) -> Self {
        debug_assert_eq!(matrix.dim(), 4);
        DensityMatrix { matrix, tol: default_tolerance() }
    }

    /// Computational basis projector |k⟩⟨k|, k in 0..4 (qubit 0 is the high bit).
    pub fn basis(k: usize) -> Result<Self> {
        if k >= 4 {
            return Err(Error::InvalidParameter(format!("basis index {k} out of range 0..4")));
        }
        let mut m = CMatrix::zeroed(4);
        m[(k, k)] = Complex::new(T::one(), T::zero());
        Ok(Self::from_trusted(m))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_trusted(CMatrix::eye(4).scale_real(T::lit(0.25)))
    }

    pub fn diagonal(populations: [T; 4]) -> Result<Self> {
        Self::new(CMatrix::diag(&populations)?)
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn pure(psi: [Complex<T>; 4]) -> Result<Self> {
        Self::new(CMatrix::outer(&psi)?)
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn populations(&self) -> [T; 4] {
        [self.matrix[(0, 0)].re, self.matrix[(1, 1)].re, self.matrix[(2, 2)].re, self.matrix[(3, 3)].re]
    }

    /// tr(ρ·A) for Hermitian A.
    pub fn expectation(&self, observable: &CMatrix<T>) -> T {
        self.matrix.real_trace_product(observable)
    }

    pub fn eigen(&self) -> EigenSystem<T> {
        jacobi(&self.matrix)
    }

    /// U ρ U†; `u` is assumed unitary.
    pub fn evolve(&self, u: &CMatrix<T>) -> Self {
        DensityMatrix { matrix: self.matrix.conjugate_by(u), tol: self.tol }
    }

    /// Convex combination Σ w_k ρ_k; weights must be a probability vector.
    pub fn mixture(parts: &[(T, DensityMatrix<T>)]) -> Result<Self> {
        let total: T = parts.iter().map(|(w, _)| *w).sum();
        if (total - T::one()).abs() > default_tolerance::<T>() || parts.iter().any(|(w, _)| *w < T::zero()) {
            return Err(Error::NotDistribution(total.as_f64()));
        }
        let mut m = CMatrix::zeroed(4);
        for (w, rho) in parts {
            m = m + rho.matrix.scale_real(*w);
        }
        Ok(Self::from_trusted(m))
    }

    pub fn cast<U: Real>(&self) -> DensityMatrix<U> {
        DensityMatrix { matrix: self.matrix.cast(), tol: default_tolerance() }
    }
}

/// Von Neumann entropy in nats, with 0·ln 0 = 0.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    entropy_of_spectrum(&rho.eigen().values, rho.tolerance())
}

pub(crate) fn entropy_of_spectrum<T: Real>(values: &[T], tol: T) -> Result<T> {
    let mut s = T::zero();
    for &lambda in values {
        if lambda < -tol {
            return Err(Error::NotPositive(lambda.as_f64()));
        }
        if lambda > T::zero() {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s.max(T::zero()))
}

/// sqrt(⟨00|ρ|00⟩)
pub fn ground_fidelity<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let p = rho.matrix()[(0, 0)].re;
    if p < -rho.tolerance() {
        return Err(Error::NotPositive(p.as_f64()));
    }
    Ok(p.max(T::zero()).sqrt().min(T::one()))
}

/// Uhlmann fidelity tr sqrt(sqrt(ρ) σ sqrt(ρ)), in [0, 1].
pub fn state_fidelity<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    let root = rho.eigen().map_spectrum(|x| x.max(T::zero()).sqrt());
    let inner = root * *sigma.matrix() * root;
    let es = hermitian_eigen(&inner)?;
    let f: T = es.values.iter().map(|&x| x.max(T::zero()).sqrt()).sum();
    Ok(f.min(T::one()))
}

/// Trace distance ½‖ρ − σ‖₁.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    let diff = *rho.matrix() - *sigma.matrix();
    let es = hermitian_eigen(&diff)?;
    Ok(es.values.iter().map(|x| x.abs()).sum::<T>() * T::lit(0.5))
}

impl<T: Real> Default for DensityMatrix<T> {
    fn default() -> Self {
        Self::maximally_mixed()
    }
}

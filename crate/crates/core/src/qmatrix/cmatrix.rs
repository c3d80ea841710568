use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::{Error, Real, Result};

const MAX_ENTRIES: usize = 16;

/// Dense complex matrix of dimension 2 (one qubit) or 4 (two qubits),
/// stored row-major in a fixed-size buffer so it stays `Copy`.
#[derive(Clone, Copy, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: [Complex<T>; MAX_ENTRIES],
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        other => Err(Error::UnsupportedDim(other)),
    }
}

impl<T: Real> CMatrix<T> {
    /// Zero matrix of a dimension already known to be 2 or 4.
    pub(crate) fn zeroed(dim: usize) -> Self {
        debug_assert!(dim == 2 || dim == 4);
        CMatrix { dim, data: [Complex::zero(); MAX_ENTRIES] }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::zeroed(dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::eye(dim))
    }

    pub(crate) fn eye(dim: usize) -> Self {
        let mut m = Self::zeroed(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries; the entry count fixes the dimension.
    pub fn from_row_major(entries: &[Complex<T>]) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            got => return Err(Error::EntryCount { expected: 16, got }),
        };
        let mut m = Self::zeroed(dim);
        m.data[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_real_row_major(entries: &[T]) -> Result<Self> {
        let complex: Vec<Complex<T>> = entries.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::from_row_major(&complex)
    }

    pub fn diag(values: &[T]) -> Result<Self> {
        check_dim(values.len())?;
        let mut m = Self::zeroed(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        Ok(m)
    }

    /// Projector |v⟩⟨v| (the vector is used as given, not normalized).
    pub fn outer(v: &[Complex<T>]) -> Result<Self> {
        check_dim(v.len())?;
        let mut m = Self::zeroed(v.len());
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    /// Tensor product of two single-qubit operators; `a` acts on qubit 0.
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != 2 || b.dim != 2 {
            return Err(Error::DimMismatch(a.dim, b.dim));
        }
        let mut m = Self::zeroed(4);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data[..self.dim * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeroed(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::zero(), |acc, z| acc + z)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        let mut m = *self;
        for z in m.data.iter_mut() {
            *z = *z * factor;
        }
        m
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    /// `u · self · u†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest deviation between `self` and `e^{iα}·other`, with α fixed by the
    /// largest-magnitude entry of `other`.
    pub fn phase_distance(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let (k, _) = other
            .entries()
            .iter()
            .enumerate()
            .fold((0, T::zero()), |best, (k, z)| if z.norm() > best.1 { (k, z.norm()) } else { best });
        let pivot = other.data[k];
        if pivot.norm() == T::zero() {
            return self.frobenius_norm();
        }
        let ratio = self.data[k] / pivot;
        let phase = if ratio.norm() > T::zero() { ratio / ratio.norm() } else { Complex::one() };
        self.max_abs_diff(&other.scale(phase))
    }

    /// Fails on the first pair `(i, j)` with `|m_ij − conj(m_ji)| > tol`.
    pub fn check_hermitian(&self, tol: T) -> Result<()> {
        for i in 0..self.dim {
            for j in i..self.dim {
                let deviation = (self[(i, j)] - self[(j, i)].conj()).norm();
                if deviation > tol || deviation.is_nan() {
                    return Err(Error::NotHermitian { row: i, col: j, deviation: deviation.as_f64() });
                }
            }
        }
        Ok(())
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        (*self * self.adjoint()).max_abs_diff(&Self::eye(self.dim)) <= tol
    }

    /// Re tr(self · other); exact expectation value for Hermitian pairs.
    pub fn real_trace_product(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = T::zero();
        for i in 0..n {
            for k in 0..n {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    /// Elementwise cast to another scalar type.
    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        let mut m = CMatrix::<U>::zeroed(self.dim);
        for (dst, src) in m.data.iter_mut().zip(self.data.iter()) {
            *dst = Complex::new(U::lit(src.re.as_f64()), U::lit(src.im.as_f64()));
        }
        m
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeroed(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a = *a + *b;
        }
        out
    }
}

impl<T: Real> Sub for CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a = *a - *b;
        }
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Complex<T>]> = self.data[..self.dim * self.dim].chunks(self.dim).collect();
        f.debug_struct("CMatrix").field("dim", &self.dim).field("rows", &rows).finish()
    }
}

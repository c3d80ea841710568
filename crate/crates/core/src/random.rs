//! Random operators for property tests and benchmarks.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::qmatrix::{CMatrix, DensityMatrix};
use crate::Real;

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeroed(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary: Gram-Schmidt on a complex Ginibre matrix.
///
/// Panics if `dim` is not 2 or 4.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    assert!(dim == 2 || dim == 4, "unsupported dimension {dim}");
    loop {
        let g = ginibre::<T, R>(rng, dim);
        let mut q = CMatrix::zeroed(dim);
        let mut degenerate = false;
        for j in 0..dim {
            let mut v = g.column(j);
            for k in 0..j {
                let mut proj = Complex::zero();
                for i in 0..dim {
                    proj = proj + q[(i, k)].conj() * v[i];
                }
                for i in 0..dim {
                    v[i] = v[i] - q[(i, k)] * proj;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm < T::lit(1e-6) {
                degenerate = true;
                break;
            }
            for i in 0..dim {
                q[(i, j)] = v[i] / norm;
            }
        }
        if !degenerate {
            return q;
        }
    }
}

/// Random Hermitian matrix with Gaussian entries of the given scale.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: T) -> CMatrix<T> {
    let g = ginibre::<T, R>(rng, dim);
    (g + g.adjoint()).scale_real(scale * T::lit(0.5))
}

/// Random density matrix of the given rank (1..=4) from the induced Ginibre measure.
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, rank: usize) -> DensityMatrix<T> {
    assert!((1..=4).contains(&rank), "rank must be in 1..=4");
    let mut g = ginibre::<T, R>(rng, 4);
    for i in 0..4 {
        for j in rank..4 {
            g[(i, j)] = Complex::zero();
        }
    }
    let m = g * g.adjoint();
    let tr = m.trace().re;
    let mut m = m.scale_real(T::one() / tr);
    for i in 0..4 {
        m[(i, i)] = Complex::new(m[(i, i)].re, T::zero());
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }
    DensityMatrix::new(m).expect("Gram matrix is a valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert!(haar_unitary::<f64, _>(&mut rng, 4).is_unitary(1e-12));
            assert!(haar_unitary::<f64, _>(&mut rng, 2).is_unitary(1e-12));
        }
    }

    #[test]
    fn low_rank_states_have_zero_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density::<f64, _>(&mut rng, 2);
        let es = rho.eigen();
        assert!(es.values[0].abs() < 1e-12 && es.values[1].abs() < 1e-12);
        assert!(es.values[2] > 1e-6);
    }
}

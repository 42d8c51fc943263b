//! Seeded random operators for experiments and property checks.
//!
//! All generators draw from ChaCha20 so that a seed reproduces the same
//! matrices on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{operator_norm, ComplexMatrix, HermitianMatrix, UnitaryMatrix};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(dim, data).expect("finite gaussian entries")
}

/// Haar-distributed unitary: Gram–Schmidt on a Ginibre matrix with phases fixed.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> UnitaryMatrix {
    let g = random_matrix(rng, dim);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        // Two passes of modified Gram–Schmidt keep the columns orthonormal to rounding.
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..dim {
                    let v = cols[k][i];
                    cols[j][i] -= proj * v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut m = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] = cols[j][i];
        }
    }
    UnitaryMatrix::new(m).expect("orthonormalized columns")
}

/// Random Hermitian matrix rescaled to the given operator norm.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, norm: f64) -> HermitianMatrix {
    let h = random_matrix(rng, dim).hermitian_part();
    let n = operator_norm(&h);
    HermitianMatrix::symmetrized(&h.scale_real(norm / n))
}

/// Random traceless Hermitian matrix rescaled to the given operator norm.
pub fn random_traceless_hermitian<R: Rng>(rng: &mut R, dim: usize, norm: f64) -> HermitianMatrix {
    let mut h = random_matrix(rng, dim).hermitian_part();
    let shift = h.trace().re / dim as f64;
    for k in 0..dim {
        h[(k, k)] -= shift;
    }
    let n = operator_norm(&h);
    HermitianMatrix::symmetrized(&h.scale_real(norm / n))
}

/// Normalized random pure state of the given dimension.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

/// Uniform point of the probability simplex.
pub fn random_simplex<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
    w
}

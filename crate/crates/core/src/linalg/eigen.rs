//! Cyclic Jacobi diagonalization of a commuting family of Hermitian matrices.
//!
//! Each 2×2 pivot block of a Hermitian matrix is written as
//! `c·𝟙 + ½ n·σ` with a real Bloch vector `n`. A unitary rotation of the
//! pivot plane acts on `n` as an SO(3) rotation, so the rotation that best
//! diagonalizes all matrices at once maps the dominant eigenvector of
//! `Σ_k n_k n_kᵀ` onto the `z` axis. With a single matrix this is the usual
//! complex Jacobi method; with the Hermitian and skew parts of a normal
//! matrix it diagonalizes the normal matrix.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

const MAX_SWEEPS: usize = 60;

/// Diagonalizes all of `mats` in place by a common unitary `Q`, returned.
///
/// On success each `mats[k]` holds `Q† M_k Q`, diagonal up to rounding (or up
/// to the commutator defect of the inputs).
pub(crate) fn joint_diagonalize(mats: &mut [ComplexMatrix]) -> Result<ComplexMatrix, LinalgError> {
    let n = mats[0].dim();
    let mut q = ComplexMatrix::identity(n);
    if n == 1 {
        return Ok(q);
    }
    let scale: f64 = mats.iter().map(|m| m.frobenius_norm()).sum();
    if scale == 0.0 {
        return Ok(q);
    }
    let floor = (f64::EPSILON * scale).powi(2);

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal(mats) <= floor {
            return Ok(q);
        }
        let mut largest_rotation = 0.0_f64;
        for p in 0..n - 1 {
            for r in p + 1..n {
                let pivot: f64 = mats.iter().map(|m| m[(p, r)].norm_sqr()).sum();
                if pivot <= floor * 1e-6 {
                    continue;
                }
                let u = dominant_axis(mats, p, r);
                let Some(rot) = rotation_to_z(u) else {
                    continue;
                };
                largest_rotation = largest_rotation.max(rot[1][0].norm());
                for m in mats.iter_mut() {
                    rotate(m, p, r, &rot);
                }
                rotate_columns(&mut q, p, r, &rot);
            }
        }
        // Rotations this small no longer change anything at working precision.
        if largest_rotation < 1e-15 {
            return Ok(q);
        }
    }
    if off_diagonal(mats) <= floor * 1e6 {
        return Ok(q);
    }
    Err(LinalgError::ConvergenceFailure { sweeps: MAX_SWEEPS })
}

fn off_diagonal(mats: &[ComplexMatrix]) -> f64 {
    let mut s = 0.0;
    for m in mats {
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
    }
    s
}

/// Unit vector maximizing `Σ_k (n_k·u)²` over the Bloch vectors of the pivot blocks.
fn dominant_axis(mats: &[ComplexMatrix], p: usize, r: usize) -> [f64; 3] {
    let mut g = [[0.0; 3]; 3];
    for m in mats {
        let b = m[(p, r)];
        let v = [2.0 * b.re, -2.0 * b.im, m[(p, p)].re - m[(r, r)].re];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += v[i] * v[j];
            }
        }
    }
    top_eigenvector_sym3(g)
}

/// Columns are the ±1 eigenvectors of `u·σ`; `None` when `u` is already the `z` axis.
fn rotation_to_z(u: [f64; 3]) -> Option<[[Complex64; 2]; 2]> {
    let (mut ux, mut uy, mut uz) = (u[0], u[1], u[2]);
    if uz < 0.0 {
        ux = -ux;
        uy = -uy;
        uz = -uz;
    }
    if ux == 0.0 && uy == 0.0 {
        return None;
    }
    let s = (2.0 * (1.0 + uz)).sqrt();
    let a = Complex64::new((1.0 + uz) / s, 0.0);
    let b = Complex64::new(ux / s, uy / s);
    // R = [[a, -b*], [b, a]]
    Some([[a, -b.conj()], [b, a]])
}

/// `M ← R† M R` acting on the (p, r) plane.
fn rotate(m: &mut ComplexMatrix, p: usize, r: usize, rot: &[[Complex64; 2]; 2]) {
    rotate_columns(m, p, r, rot);
    let n = m.dim();
    for j in 0..n {
        let mp = m[(p, j)];
        let mr = m[(r, j)];
        m[(p, j)] = rot[0][0].conj() * mp + rot[1][0].conj() * mr;
        m[(r, j)] = rot[0][1].conj() * mp + rot[1][1].conj() * mr;
    }
}

fn rotate_columns(m: &mut ComplexMatrix, p: usize, r: usize, rot: &[[Complex64; 2]; 2]) {
    let n = m.dim();
    for i in 0..n {
        let mp = m[(i, p)];
        let mr = m[(i, r)];
        m[(i, p)] = mp * rot[0][0] + mr * rot[1][0];
        m[(i, r)] = mp * rot[0][1] + mr * rot[1][1];
    }
}

/// Dominant eigenvector of a real symmetric 3×3 matrix (cyclic real Jacobi).
fn top_eigenvector_sym3(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..50 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let diag = a[0][0].powi(2) + a[1][1].powi(2) + a[2][2].powi(2);
        if off <= 1e-34 * diag || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let k = (0..3)
        .max_by(|&i, &j| a[i][i].total_cmp(&a[j][j]))
        .unwrap_or(0);
    let u = [v[0][k], v[1][k], v[2][k]];
    let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    [u[0] / norm, u[1] / norm, u[2] / norm]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym3_dominant_vector() {
        let g = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 1.0]];
        let u = top_eigenvector_sym3(g);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[0].abs() - h).abs() < 1e-14);
        assert!((u[1].abs() - h).abs() < 1e-14);
        assert!(u[2].abs() < 1e-14);
    }

    #[test]
    fn rotation_diagonalizes_pauli_x() {
        let x = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        let mut mats = [x];
        joint_diagonalize(&mut mats).unwrap();
        assert!(mats[0][(0, 1)].norm() < 1e-15);
        let mut d = [mats[0][(0, 0)].re, mats[0][(1, 1)].re];
        d.sort_by(f64::total_cmp);
        assert!((d[0] + 1.0).abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
    }
}

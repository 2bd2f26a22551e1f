//! Givens-rotation decomposition of basis-change isometries.
//!
//! Both factorized walks apply basis rotations as a network of two-level
//! rotations, each specified by two angles of `ℶ` bits. The angles are
//! extracted here by a QR sweep (columns left to right, eliminations bottom
//! up) so they can be counted; the estimator never applies them.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// One two-level rotation acting on rows `(i, j = i + 1)`, with mixing angle
/// `theta` and relative phase `phi`.
#[derive(Debug, Clone, Copy)]
pub struct GivensRotation {
    pub row: usize,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Default)]
pub struct GivensDecomposition {
    pub rotations: Vec<GivensRotation>,
    /// Residual diagonal phases after triangularization.
    pub phases: Vec<f64>,
}

impl GivensDecomposition {
    /// Two stored angles per rotation.
    pub fn angle_count(&self) -> usize {
        2 * self.rotations.len()
    }
}

/// Decompose a `dim × r` isometry (orthonormal columns, `r ≤ dim`) into
/// `Σ_{j<r} (dim − 1 − j)` adjacent-row rotations and `r` column phases.
pub fn decompose_isometry(mat: &DMatrix<Complex64>) -> GivensDecomposition {
    let dim = mat.nrows();
    let r = mat.ncols();
    let mut work = mat.clone();
    let mut rotations = Vec::new();

    for j in 0..r {
        for i in (j + 1..dim).rev() {
            let a = work[(i - 1, j)];
            let b = work[(i, j)];
            if b.norm() == 0.0 {
                rotations.push(GivensRotation {
                    row: i - 1,
                    theta: 0.0,
                    phi: 0.0,
                });
                continue;
            }
            let r_abs = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let alpha = if a.norm() == 0.0 { 0.0 } else { a.arg() };
            let theta = b.norm().atan2(a.norm());
            let phi = alpha - b.arg();
            let c = Complex64::new(a.norm() / r_abs, 0.0);
            let s = Complex64::from_polar(b.norm() / r_abs, phi);
            // rows (i-1, i) <- [[c, s], [-s*, c]] · rows (i-1, i)
            for col in 0..r {
                let top = work[(i - 1, col)];
                let bot = work[(i, col)];
                work[(i - 1, col)] = c * top + s * bot;
                work[(i, col)] = -s.conj() * top + c * bot;
            }
            rotations.push(GivensRotation {
                row: i - 1,
                theta,
                phi,
            });
        }
    }

    let phases = (0..r).map(|j| work[(j, j)].arg()).collect();
    GivensDecomposition { rotations, phases }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen_sorted;

    fn random_unitary(dim: usize, seed: u64) -> DMatrix<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                h[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let (_, vecs) = hermitian_eigen_sorted(&herm);
        vecs
    }

    #[test]
    fn rotation_count_matches_triangle() {
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, dim as u64);
            let dec = decompose_isometry(&u);
            assert_eq!(dec.rotations.len(), dim * (dim - 1) / 2);
            assert_eq!(dec.angle_count(), dim * (dim - 1));
            assert_eq!(dec.phases.len(), dim);
        }
    }

    #[test]
    fn triangularization_leaves_pure_phases() {
        let u = random_unitary(4, 9);
        // verify by re-running the sweep and checking the residual is the
        // claimed diagonal of phases
        let dec = decompose_isometry(&u);
        let mut work = u.clone();
        let mut it = dec.rotations.iter();
        for j in 0..4 {
            for i in (j + 1..4).rev() {
                let rot = it.next().unwrap();
                assert_eq!(rot.row, i - 1);
                let c = Complex64::new(rot.theta.cos(), 0.0);
                let s = Complex64::from_polar(rot.theta.sin(), rot.phi);
                for col in 0..4 {
                    let top = work[(i - 1, col)];
                    let bot = work[(i, col)];
                    work[(i - 1, col)] = c * top + s * bot;
                    work[(i, col)] = -s.conj() * top + c * bot;
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let val = work[(i, j)];
                if i == j {
                    assert!((val.norm() - 1.0).abs() < 1e-10);
                    assert!((val.arg() - dec.phases[j]).abs() < 1e-10);
                } else {
                    assert!(val.norm() < 1e-10, "({i},{j}) = {val}");
                }
            }
        }
    }

    #[test]
    fn isometry_columns_decompose_too() {
        let u = random_unitary(5, 13);
        let iso = u.columns(0, 2).into_owned();
        let dec = decompose_isometry(&iso);
        assert_eq!(dec.rotations.len(), (5 - 1) + (5 - 2));
        assert_eq!(dec.phases.len(), 2);
    }
}

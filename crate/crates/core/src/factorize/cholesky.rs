//! Iterative pivoted Cholesky factorization of the two-body tensor.
//!
//! For each momentum transfer `Q` the tensor block is matricized with rows
//! `x = (k, p, q)` and columns `y = (k', s, r)`:
//!
//! ```text
//!   W(Q)[x, y] = V[Q][k][k'][p][q][r][s],     V[Q] = Σ_n L_n(Q) L_n(Q)†
//! ```
//!
//! `W(Q)` is Hermitian positive semidefinite for a physical tensor, so the
//! factorization proceeds by greedy pivoting on the residual diagonal until
//! the largest entry falls below the tolerance. For a PSD residual `R`,
//! `|R_xy| ≤ √(R_xx·R_yy)`, so the stopping rule bounds the max-abs
//! reconstruction error by `tol`.

use ndarray::ArrayD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{GramFactors, KHamiltonian};
use crate::kmesh::Mesh;

/// Gram factors `L[Q][n][(k·n_s + p)·n_s + q]` with per-transfer ranks.
#[derive(Debug, Clone)]
pub struct CholeskyFactors {
    pub mesh: Mesh,
    pub n_spatial: usize,
    pub tol: f64,
    pub vectors: Vec<Vec<Vec<Complex64>>>,
}

impl CholeskyFactors {
    /// Auxiliary rank `M = max_Q` of the retained vector count.
    pub fn m_rank(&self) -> usize {
        self.vectors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.vectors.iter().map(Vec::len).collect()
    }

    /// Dense two-body tensor rebuilt from the factors.
    pub fn reconstruct(&self) -> ArrayD<Complex64> {
        GramFactors {
            mesh: self.mesh,
            n_spatial: self.n_spatial,
            factors: self.vectors.clone(),
        }
        .assemble_v()
    }

    /// Factor matrix entry `L_{p k q (k⊖Q), n}`.
    #[inline]
    pub fn at(&self, q: usize, n_vec: usize, k: usize, p: usize, qq: usize) -> Complex64 {
        self.vectors[q][n_vec][(k * self.n_spatial + p) * self.n_spatial + qq]
    }
}

/// Iteratively factorize every momentum-transfer block to max-abs accuracy
/// `tol`. Fails when a residual diagonal drops below `−tol` (the block is not
/// positive semidefinite). Pivot ties break toward the lowest flat index.
pub fn cholesky_sf(ham: &KHamiltonian, tol: f64) -> Result<CholeskyFactors> {
    ham.check_shapes()?;
    if tol < 0.0 {
        return Err(Error::DegenerateInput("cholesky tolerance must be >= 0".into()));
    }
    let mesh = ham.mesh;
    let nk = mesh.num_kpoints();
    let n = ham.n_spatial;
    let dim = nk * n * n;

    let mut vectors = Vec::with_capacity(nk);
    for q in 0..nk {
        // dense matricized block
        let mut w = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..nk {
            for p in 0..n {
                for qq in 0..n {
                    let x = (k * n + p) * n + qq;
                    for kp in 0..nk {
                        for s in 0..n {
                            for r in 0..n {
                                let y = (kp * n + s) * n + r;
                                w[x * dim + y] = ham.v_at(q, k, kp, p, qq, r, s);
                            }
                        }
                    }
                }
            }
        }

        let mut diag: Vec<f64> = (0..dim).map(|x| w[x * dim + x].re).collect();
        let scale = diag.iter().cloned().fold(0.0f64, f64::max);
        // numerical floor keeps tol = 0 meaning "machine exact"
        let stop = tol.max(scale * 1e-14);

        let mut vecs: Vec<Vec<Complex64>> = Vec::new();
        loop {
            let mut piv = 0;
            let mut dmax = f64::NEG_INFINITY;
            for (x, &dx) in diag.iter().enumerate() {
                if dx > dmax {
                    dmax = dx;
                    piv = x;
                }
            }
            if let Some(dmin) = diag.iter().cloned().reduce(f64::min) {
                if dmin < -(tol + scale * 1e-12) {
                    return Err(Error::NotPositiveSemidefinite {
                        q_index: q,
                        pivot: dmin,
                        tol,
                    });
                }
            }
            if dmax <= stop || vecs.len() == dim {
                break;
            }
            let root = dmax.sqrt();
            let mut col: Vec<Complex64> = (0..dim).map(|x| w[x * dim + piv]).collect();
            for prev in &vecs {
                let scale = prev[piv].conj();
                for (c, &p_val) in col.iter_mut().zip(prev.iter()) {
                    *c -= p_val * scale;
                }
            }
            for c in col.iter_mut() {
                *c /= root;
            }
            for (x, d) in diag.iter_mut().enumerate() {
                *d -= col[x].norm_sqr();
            }
            vecs.push(col);
        }
        vectors.push(vecs);
    }

    Ok(CholeskyFactors {
        mesh,
        n_spatial: n,
        tol,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{generate_synthetic, generate_synthetic_with_rank};
    use ndarray::IxDyn;

    fn max_abs_diff(a: &ArrayD<Complex64>, b: &ArrayD<Complex64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn exact_rank_recovery() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic_with_rank(mesh, 2, 17, 0.1, 3);
        let fac = cholesky_sf(&ham, 1e-12).unwrap();
        assert_eq!(fac.m_rank(), 3, "ranks: {:?}", fac.ranks());
        let rec = fac.reconstruct();
        assert!(max_abs_diff(&rec, &ham.v) <= 1e-12);
    }

    #[test]
    fn reconstruction_within_tolerance() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 23, 0.3);
        for tol in [1e-8, 1e-4] {
            let fac = cholesky_sf(&ham, tol).unwrap();
            let rec = fac.reconstruct();
            let err = max_abs_diff(&rec, &ham.v);
            assert!(err <= tol, "tol {tol:.1e}: err {err:.3e}");
        }
    }

    #[test]
    fn zero_v_gives_empty_factors() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = KHamiltonian::zero(mesh, 2);
        let fac = cholesky_sf(&ham, 1e-10).unwrap();
        assert_eq!(fac.m_rank(), 0);
        assert!(fac.vectors.iter().all(Vec::is_empty));
    }

    #[test]
    fn rejects_indefinite_block() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let mut ham = KHamiltonian::zero(mesh, 1);
        // a negative diagonal entry makes the single block indefinite
        ham.v[IxDyn(&[0, 0, 0, 0, 0, 0, 0])] = Complex64::new(-1.0, 0.0);
        let err = cholesky_sf(&ham, 1e-10);
        assert!(matches!(
            err,
            Err(Error::NotPositiveSemidefinite { q_index: 0, .. })
        ));
    }

    #[test]
    fn truncation_is_monotone_in_tolerance() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 31, 0.2);
        let tight = cholesky_sf(&ham, 1e-12).unwrap();
        let loose = cholesky_sf(&ham, 1e-2).unwrap();
        assert!(loose.m_rank() <= tight.m_rank());
    }
}

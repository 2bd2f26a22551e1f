//! Tensor-hypercontraction factors with a symmetry-reduced central tensor.
//!
//! The two-body tensor is written as
//!
//! ```text
//!   V[Q][k][k'][p][q][r][s] =
//!     Σ_{μν} χ*_{p k, μ} χ_{q (k⊖Q), μ} · ζ^{Q, G1, G2}_{μν}
//!            · χ*_{r (k'⊖Q), ν} χ_{s k', ν}
//! ```
//!
//! where `G1 = G_{k, k−Q}` and `G2 = G_{k', k'−Q}` are the folding vectors of
//! the two momentum pairs, stored as 3-bit flags. The four-fold integral
//! symmetry appears in the central tensor as
//!
//! ```text
//!   ζ^{Q,G1,G2}_{μν} = (ζ^{⊖Q,!G1,!G2}_{μν})* = ζ^{⊖Q,!G2,!G1}_{νμ}
//!                    = (ζ^{Q,G2,G1}_{νμ})* ,
//! ```
//!
//! a Klein four-group of index maps; enforcement is by group averaging.
//! Blocks `(Q, G)` with `G_dim ≠ 0` on a direction where `Q_dim = 0` can
//! never arise from a momentum pair and are held at zero.

use ndarray::{Array2, Array3, Array5, ArrayD, IxDyn};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::{synthetic_one_body, KHamiltonian};
use crate::kmesh::{g_flag, gvector, modneg, modsub, KVector, Mesh};

/// Normalized factors plus the central tensor.
#[derive(Debug, Clone)]
pub struct ThcFactors {
    pub mesh: Mesh,
    pub n_spatial: usize,
    pub m_rank: usize,
    /// Raw collocation factors `χ[k][p][μ]`.
    pub chi: Array3<Complex64>,
    /// Unit-norm columns `χ̃[k][p][μ]`.
    pub chi_tilde: Array3<Complex64>,
    /// Column norms `N[k][μ]` with `χ = N·χ̃`.
    pub norms: Array2<f64>,
    /// Central tensor `ζ[Q][g1][g2][μ][ν]` over 3-bit G flags.
    pub zeta: Array5<Complex64>,
}

/// Whether the flag combination `(Q, g)` can arise from a momentum pair.
pub fn flag_reachable(q: KVector, g: usize) -> bool {
    (0..3).all(|d| q.0[d] != 0 || g & (1 << d) == 0)
}

/// Complement flag `!g` for the transfer `Q`: components with `Q_dim ≠ 0`
/// toggle, components with `Q_dim = 0` stay clear.
pub fn complement_flag(q: KVector, g: usize) -> usize {
    let mut out = 0;
    for d in 0..3 {
        if q.0[d] != 0 && g & (1 << d) == 0 {
            out |= 1 << d;
        }
    }
    out
}

/// Folding flag `G_{k, k−Q}` of the pair `(k, k⊖Q)`.
pub fn pair_flag(mesh: &Mesh, k: KVector, q: KVector) -> usize {
    let kq = modsub(mesh, k, q).expect("valid");
    let (_, g) = gvector(mesh, k, kq).expect("valid");
    g_flag(mesh, g)
}

/// Group-average the central tensor onto the symmetric subspace and zero the
/// unreachable blocks. Idempotent, and the identity on already-symmetric
/// input.
pub fn symmetrize_zeta(mesh: &Mesh, zeta: &Array5<Complex64>) -> Array5<Complex64> {
    let nk = mesh.num_kpoints();
    let m = zeta.shape()[3];
    let mut out = Array5::zeros((nk, 8, 8, m, m));
    for q in 0..nk {
        let qv = mesh.from_flat(q);
        let neg_q = mesh.flat_index(modneg(mesh, qv).expect("valid"));
        for g1 in 0..8 {
            for g2 in 0..8 {
                if !flag_reachable(qv, g1) || !flag_reachable(qv, g2) {
                    continue;
                }
                let ng1 = complement_flag(qv, g1);
                let ng2 = complement_flag(qv, g2);
                for mu in 0..m {
                    for nu in 0..m {
                        let a = zeta[[q, g1, g2, mu, nu]];
                        let b = zeta[[neg_q, ng1, ng2, mu, nu]].conj();
                        let c = zeta[[neg_q, ng2, ng1, nu, mu]];
                        let d = zeta[[q, g2, g1, nu, mu]].conj();
                        out[[q, g1, g2, mu, nu]] = (a + b + c + d) * 0.25;
                    }
                }
            }
        }
    }
    out
}

/// Largest deviation of the central tensor from its own symmetrization.
pub fn zeta_symmetry_violation(mesh: &Mesh, zeta: &Array5<Complex64>) -> f64 {
    let sym = symmetrize_zeta(mesh, zeta);
    zeta.iter()
        .zip(sym.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Validate shapes, enforce the central-tensor symmetry by averaging, and
/// split the factors into unit columns and norms. Inputs whose symmetry
/// deviation before averaging exceeds `tol` are rejected.
pub fn ingest_thc(
    mesh: Mesh,
    chi: Array3<Complex64>,
    zeta: Array5<Complex64>,
    tol: f64,
) -> Result<ThcFactors> {
    let nk = mesh.num_kpoints();
    let n_spatial = chi.shape()[1];
    let m_rank = chi.shape()[2];
    if chi.shape()[0] != nk {
        return Err(Error::ShapeMismatch {
            context: "collocation factors".into(),
            expected: vec![nk, n_spatial, m_rank],
            got: chi.shape().to_vec(),
        });
    }
    if zeta.shape() != [nk, 8, 8, m_rank, m_rank] {
        return Err(Error::ShapeMismatch {
            context: "central tensor".into(),
            expected: vec![nk, 8, 8, m_rank, m_rank],
            got: zeta.shape().to_vec(),
        });
    }

    let max_dev = zeta_symmetry_violation(&mesh, &zeta);
    if max_dev > tol {
        return Err(Error::ThcSymmetryViolation { max_dev, tol });
    }
    let zeta = symmetrize_zeta(&mesh, &zeta);

    let mut chi_tilde = chi.clone();
    let mut norms = Array2::zeros((nk, m_rank));
    for k in 0..nk {
        for mu in 0..m_rank {
            let norm: f64 = (0..n_spatial)
                .map(|p| chi[[k, p, mu]].norm_sqr())
                .sum::<f64>()
                .sqrt();
            norms[[k, mu]] = norm;
            if norm > 0.0 {
                for p in 0..n_spatial {
                    chi_tilde[[k, p, mu]] /= norm;
                }
            }
        }
    }

    Ok(ThcFactors {
        mesh,
        n_spatial,
        m_rank,
        chi,
        chi_tilde,
        norms,
        zeta,
    })
}

impl ThcFactors {
    /// Normalization sums `Σ_{k | G(k,Q) = g} N_{k,μ}·N_{k⊖Q,μ}`, the
    /// transfer-dependent weights entering the state preparation and λ.
    pub fn normalization_sums(&self) -> Array3<f64> {
        let nk = self.mesh.num_kpoints();
        let mut out = Array3::zeros((nk, 8, self.m_rank));
        for q in 0..nk {
            let qv = self.mesh.from_flat(q);
            for k in 0..nk {
                let kv = self.mesh.from_flat(k);
                let g = pair_flag(&self.mesh, kv, qv);
                let kq = self.mesh.flat_index(modsub(&self.mesh, kv, qv).expect("valid"));
                for mu in 0..self.m_rank {
                    out[[q, g, mu]] += self.norms[[k, mu]] * self.norms[[kq, mu]];
                }
            }
        }
        out
    }

    /// Dense two-body tensor rebuilt from the factors.
    pub fn reconstruct(&self) -> ArrayD<Complex64> {
        let mesh = self.mesh;
        let nk = mesh.num_kpoints();
        let n = self.n_spatial;
        let m = self.m_rank;
        let mut v = ArrayD::zeros(IxDyn(&KHamiltonian::v_shape(&mesh, n)));

        for q in 0..nk {
            let qv = mesh.from_flat(q);
            // pair densities D[k][μ][p][qq] = χ*_{p k, μ} χ_{qq (k⊖Q), μ}
            let mut pair = vec![Complex64::new(0.0, 0.0); nk * m * n * n];
            let mut flags = vec![0usize; nk];
            for k in 0..nk {
                let kv = mesh.from_flat(k);
                let kq = mesh.flat_index(modsub(&mesh, kv, qv).expect("valid"));
                flags[k] = pair_flag(&mesh, kv, qv);
                for mu in 0..m {
                    for p in 0..n {
                        for qq in 0..n {
                            pair[((k * m + mu) * n + p) * n + qq] =
                                self.chi[[k, p, mu]].conj() * self.chi[[kq, qq, mu]];
                        }
                    }
                }
            }
            for k in 0..nk {
                for kp in 0..nk {
                    let (g1, g2) = (flags[k], flags[kp]);
                    for mu in 0..m {
                        for nu in 0..m {
                            let zeta = self.zeta[[q, g1, g2, mu, nu]];
                            if zeta.norm_sqr() == 0.0 {
                                continue;
                            }
                            for p in 0..n {
                                for qq in 0..n {
                                    let left = pair[((k * m + mu) * n + p) * n + qq] * zeta;
                                    if left.norm_sqr() == 0.0 {
                                        continue;
                                    }
                                    for r in 0..n {
                                        for s in 0..n {
                                            // second factor is the conjugate
                                            // pair density of (k', ν)
                                            let right =
                                                pair[((kp * m + nu) * n + s) * n + r].conj();
                                            v[IxDyn(&[q, k, kp, p, qq, r, s])] += left * right;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        v
    }

    /// A Hamiltonian whose two-body tensor is exactly this factorization,
    /// with a deterministic Hermitian one-body part.
    pub fn into_hamiltonian(&self, seed: u64, decay: f64) -> KHamiltonian {
        let mut ham = KHamiltonian::zero(self.mesh, self.n_spatial);
        ham.h = synthetic_one_body(self.mesh, self.n_spatial, seed, decay);
        ham.v = self.reconstruct();
        ham
    }
}

/// Seeded random factors with an exactly symmetric, positive-semidefinite
/// central tensor (so the reconstructed tensor admits an exact iterated
/// Cholesky factorization).
pub fn synthesize_thc(mesh: Mesh, n_spatial: usize, m_rank: usize, seed: u64) -> ThcFactors {
    let nk = mesh.num_kpoints();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    let mut chi = Array3::zeros((nk, n_spatial, m_rank));
    for k in 0..nk {
        for p in 0..n_spatial {
            for mu in 0..m_rank {
                chi[[k, p, mu]] =
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }

    // per transfer: Gram matrix over the (flag, μ) index, rows of
    // unreachable flags zeroed; the ⊖Q block mirrors the Q block
    let dim = 8 * m_rank;
    let rank = (2 * m_rank).max(2);
    let scale = 0.35 / ((rank * m_rank) as f64).sqrt();
    let mut zeta = Array5::zeros((nk, 8, 8, m_rank, m_rank));
    for q in 0..nk {
        let qv = mesh.from_flat(q);
        let neg_q = mesh.flat_index(modneg(&mesh, qv).expect("valid"));
        if neg_q < q {
            continue; // filled when its partner was drawn
        }
        let mut r_mat = vec![Complex64::new(0.0, 0.0); dim * rank];
        for g in 0..8 {
            if !flag_reachable(qv, g) {
                continue;
            }
            for mu in 0..m_rank {
                for c in 0..rank {
                    r_mat[(g * m_rank + mu) * rank + c] = Complex64::new(
                        scale * rng.gen_range(-1.0..1.0),
                        scale * rng.gen_range(-1.0..1.0),
                    );
                }
            }
        }
        // Z = R·R† is Hermitian PSD
        let mut z = vec![Complex64::new(0.0, 0.0); dim * dim];
        for x in 0..dim {
            for y in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..rank {
                    acc += r_mat[x * rank + c] * r_mat[y * rank + c].conj();
                }
                z[x * dim + y] = acc;
            }
        }
        if neg_q == q {
            // self-inverse transfer: average with the flag-permuted conjugate
            // (both summands are PSD, so the average stays PSD). The
            // complement map only permutes the reachable flags; everything
            // else stays zero.
            let mut sym = vec![Complex64::new(0.0, 0.0); dim * dim];
            for g1 in (0..8).filter(|&g| flag_reachable(qv, g)) {
                let ng1 = complement_flag(qv, g1);
                for g2 in (0..8).filter(|&g| flag_reachable(qv, g)) {
                    let ng2 = complement_flag(qv, g2);
                    for mu in 0..m_rank {
                        for nu in 0..m_rank {
                            let x = g1 * m_rank + mu;
                            let y = g2 * m_rank + nu;
                            let xm = ng1 * m_rank + mu;
                            let ym = ng2 * m_rank + nu;
                            sym[x * dim + y] =
                                (z[x * dim + y] + z[xm * dim + ym].conj()) * 0.5;
                        }
                    }
                }
            }
            z = sym;
        }
        for g1 in 0..8 {
            for g2 in 0..8 {
                // the complement map is only injective on reachable flags
                let mirror = neg_q != q
                    && flag_reachable(qv, g1)
                    && flag_reachable(qv, g2);
                for mu in 0..m_rank {
                    for nu in 0..m_rank {
                        let val = z[(g1 * m_rank + mu) * dim + (g2 * m_rank + nu)];
                        zeta[[q, g1, g2, mu, nu]] = val;
                        if mirror {
                            let ng1 = complement_flag(qv, g1);
                            let ng2 = complement_flag(qv, g2);
                            zeta[[neg_q, ng1, ng2, mu, nu]] = val.conj();
                        }
                    }
                }
            }
        }
    }

    ingest_thc(mesh, chi, zeta, 1e-9).expect("synthesized tensor is symmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorize::cholesky_sf;
    use crate::hamiltonian::HARTREE_TOL_EXACT;

    #[test]
    fn single_real_entry_is_fixed_by_symmetrization() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let mut zeta = Array5::zeros((1, 8, 8, 1, 1));
        zeta[[0, 0, 0, 0, 0]] = Complex64::new(0.7, 0.0);
        let sym = symmetrize_zeta(&mesh, &zeta);
        assert_eq!(sym, zeta);
    }

    #[test]
    fn symmetrization_is_idempotent() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut zeta = Array5::zeros((2, 8, 8, 3, 3));
        for v in zeta.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let once = symmetrize_zeta(&mesh, &zeta);
        let twice = symmetrize_zeta(&mesh, &once);
        let dev = once
            .iter()
            .zip(twice.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-14, "projector must be idempotent, dev {dev:.3e}");
        assert!(zeta_symmetry_violation(&mesh, &once) < 1e-14);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut chi = Array3::zeros((2, 2, 3));
        for v in chi.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        }
        let mut zeta = Array5::zeros((2, 8, 8, 3, 3));
        zeta[[1, 0, 0, 0, 1]] = Complex64::new(1.0, 0.5);
        let err = ingest_thc(mesh, chi, zeta, 1e-6);
        assert!(matches!(err, Err(Error::ThcSymmetryViolation { .. })));
    }

    #[test]
    fn ingest_is_idempotent_on_synthesized_factors() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let f = synthesize_thc(mesh, 2, 3, 11);
        let again = ingest_thc(mesh, f.chi.clone(), f.zeta.clone(), 1e-12).unwrap();
        let dev = f
            .zeta
            .iter()
            .zip(again.zeta.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-14);
        assert_eq!(f.norms, again.norms);
    }

    #[test]
    fn chi_tilde_columns_have_unit_norm() {
        let mesh = Mesh::new(1, 2, 2).unwrap();
        let f = synthesize_thc(mesh, 2, 3, 21);
        for k in 0..4 {
            for mu in 0..3 {
                let norm: f64 = (0..2).map(|p| f.chi_tilde[[k, p, mu]].norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12);
                // chi = N · chi_tilde
                for p in 0..2 {
                    let dev =
                        (f.chi[[k, p, mu]] - f.chi_tilde[[k, p, mu]] * f.norms[[k, mu]]).norm();
                    assert!(dev < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reconstruction_has_exact_symmetry_and_is_factorizable() {
        for (mesh, n, m) in [
            (Mesh::new(1, 1, 2).unwrap(), 2, 3),
            (Mesh::new(1, 1, 3).unwrap(), 1, 2),
            (Mesh::new(1, 2, 2).unwrap(), 1, 2),
        ] {
            let f = synthesize_thc(mesh, n, m, 31);
            let ham = f.into_hamiltonian(31, 0.0);
            let rep = ham.validate().unwrap();
            assert!(
                rep.max_violation() < 1e-10,
                "mesh {mesh}: violation {:.3e}",
                rep.max_violation()
            );
            // the central tensor is PSD, so the Cholesky route must succeed
            let fac = cholesky_sf(&ham, 1e-10).unwrap();
            let rec = fac.reconstruct();
            let err = rec
                .iter()
                .zip(ham.v.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-10, "mesh {mesh}: cholesky error {err:.3e}");
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let a = synthesize_thc(mesh, 2, 3, 77);
        let b = synthesize_thc(mesh, 2, 3, 77);
        assert_eq!(a.chi, b.chi);
        assert_eq!(a.zeta, b.zeta);
        assert!(zeta_symmetry_violation(&mesh, &a.zeta) < HARTREE_TOL_EXACT);
    }
}

//! k-point Hamiltonian container, symmetry checks, synthetic instances, and
//! exact supercell folding.
//!
//! The one-body blocks `h(k)` are Hermitian `n_s × n_s` matrices (`n_s`
//! spatial orbitals per cell, `N = 2·n_s` spin-orbitals). The two-body tensor
//! is stored over momentum-conserving blocks only,
//! `V[Q][k][k'][p][q][r][s] = V_{p k, q (k⊖Q), r (k'⊖Q), s k'}`, and obeys the
//! four-fold integral symmetry
//!
//! ```text
//!   V_{pk_p,qk_q,rk_r,sk_s} = V_{rk_r,sk_s,pk_p,qk_q}
//!                           = V*_{qk_q,pk_p,sk_s,rk_r}
//!                           = V*_{sk_s,rk_r,qk_q,pk_p} .
//! ```

use ndarray::{Array3, ArrayD, IxDyn};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::kmesh::{modadd, modneg, modsub, KVector, Mesh};

pub const HARTREE_TOL_EXACT: f64 = 1e-12;

/// Hamiltonian in the Bloch-orbital basis.
#[derive(Debug, Clone)]
pub struct KHamiltonian {
    pub mesh: Mesh,
    pub n_spatial: usize,
    /// `h[k][p][q]`, Hermitian in (p, q) for every k.
    pub h: Array3<Complex64>,
    /// `V[Q][k][k'][p][q][r][s]` over momentum-conserving blocks.
    pub v: ArrayD<Complex64>,
}

/// Maximum deviation from each symmetry relation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SymmetryReport {
    pub hermiticity: f64,
    /// `V(t) = V(swap of the two orbital pairs)`
    pub pair_swap: f64,
    /// `V(t) = V*(simultaneous swaps within both pairs)`
    pub conjugate_swap: f64,
    /// `V(t) = V*(full reversal)`
    pub conjugate_reversal: f64,
}

impl SymmetryReport {
    pub fn max_violation(&self) -> f64 {
        self.hermiticity
            .max(self.pair_swap)
            .max(self.conjugate_swap)
            .max(self.conjugate_reversal)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

impl KHamiltonian {
    /// Spin-orbitals per cell, `N = 2·n_s`.
    pub fn spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    /// Total spin-orbitals across the simulation cell, `N·N_k`.
    pub fn total_spin_orbitals(&self) -> usize {
        self.spin_orbitals() * self.mesh.num_kpoints()
    }

    pub fn v_shape(mesh: &Mesh, n_spatial: usize) -> Vec<usize> {
        let nk = mesh.num_kpoints();
        vec![nk, nk, nk, n_spatial, n_spatial, n_spatial, n_spatial]
    }

    pub fn zero(mesh: Mesh, n_spatial: usize) -> KHamiltonian {
        let nk = mesh.num_kpoints();
        KHamiltonian {
            mesh,
            n_spatial,
            h: Array3::zeros((nk, n_spatial, n_spatial)),
            v: ArrayD::zeros(IxDyn(&Self::v_shape(&mesh, n_spatial))),
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        let nk = self.mesh.num_kpoints();
        let n = self.n_spatial;
        if self.h.shape() != [nk, n, n] {
            return Err(Error::ShapeMismatch {
                context: "one-body blocks".into(),
                expected: vec![nk, n, n],
                got: self.h.shape().to_vec(),
            });
        }
        let want = Self::v_shape(&self.mesh, n);
        if self.v.shape() != want.as_slice() {
            return Err(Error::ShapeMismatch {
                context: "two-body blocks".into(),
                expected: want,
                got: self.v.shape().to_vec(),
            });
        }
        Ok(())
    }

    #[inline]
    pub fn v_at(&self, q: usize, k: usize, kp: usize, p: usize, qq: usize, r: usize, s: usize) -> Complex64 {
        self.v[IxDyn(&[q, k, kp, p, qq, r, s])]
    }

    /// Effective one-body coefficients
    /// `h'_{pq}(k) = h_{pq}(k) + Σ_{k',r} V_{p k, q k, r k', r k'}`,
    /// shared by every representation's one-body term.
    pub fn effective_one_body(&self) -> Array3<Complex64> {
        let nk = self.mesh.num_kpoints();
        let n = self.n_spatial;
        let mut out = self.h.clone();
        for k in 0..nk {
            for p in 0..n {
                for q in 0..n {
                    let mut corr = Complex64::new(0.0, 0.0);
                    for kp in 0..nk {
                        for r in 0..n {
                            corr += self.v_at(0, k, kp, p, q, r, r);
                        }
                    }
                    out[[k, p, q]] += corr;
                }
            }
        }
        out
    }

    /// Index maps of the four-fold symmetry on `(Q, k, k', p, q, r, s)`
    /// tuples; the boolean marks complex conjugation.
    pub fn symmetry_images(
        mesh: &Mesh,
        t: (usize, usize, usize, usize, usize, usize, usize),
    ) -> [((usize, usize, usize, usize, usize, usize, usize), bool); 3] {
        let (q, k, kp, a, b, c, d) = t;
        let qv = mesh.from_flat(q);
        let kv = mesh.from_flat(k);
        let kpv = mesh.from_flat(kp);
        let neg_q = mesh.flat_index(modneg(mesh, qv).expect("valid"));
        let k_minus_q = mesh.flat_index(modsub(mesh, kv, qv).expect("valid"));
        let kp_minus_q = mesh.flat_index(modsub(mesh, kpv, qv).expect("valid"));
        [
            // swap the two orbital pairs
            ((neg_q, kp_minus_q, k_minus_q, c, d, a, b), false),
            // simultaneous swaps within both pairs, conjugated
            ((neg_q, k_minus_q, kp_minus_q, b, a, d, c), true),
            // full reversal, conjugated
            ((q, kp, k, d, c, b, a), true),
        ]
    }

    /// Max deviation from Hermiticity of `h` and the three `V` relations.
    pub fn validate(&self) -> Result<SymmetryReport> {
        self.check_shapes()?;
        let nk = self.mesh.num_kpoints();
        let n = self.n_spatial;

        let mut herm = 0.0f64;
        for k in 0..nk {
            for p in 0..n {
                for q in 0..n {
                    let dev = (self.h[[k, p, q]] - self.h[[k, q, p]].conj()).norm();
                    herm = herm.max(dev);
                }
            }
        }

        let mut dev = [0.0f64; 3];
        for q in 0..nk {
            for k in 0..nk {
                for kp in 0..nk {
                    for a in 0..n {
                        for b in 0..n {
                            for c in 0..n {
                                for d in 0..n {
                                    let val = self.v_at(q, k, kp, a, b, c, d);
                                    let images =
                                        Self::symmetry_images(&self.mesh, (q, k, kp, a, b, c, d));
                                    for (i, ((q2, k2, kp2, a2, b2, c2, d2), conj)) in
                                        images.into_iter().enumerate()
                                    {
                                        let mut other = self.v_at(q2, k2, kp2, a2, b2, c2, d2);
                                        if conj {
                                            other = other.conj();
                                        }
                                        dev[i] = dev[i].max((val - other).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        Ok(SymmetryReport {
            hermiticity: herm,
            pair_swap: dev[0],
            conjugate_swap: dev[1],
            conjugate_reversal: dev[2],
        })
    }

    /// Exact embedding into a Γ-point cell of `N_k·n_s` spatial orbitals.
    ///
    /// The composite orbital index is `P = k·n_s + p` (k major), matching the
    /// Jordan-Wigner ordering, so the represented second-quantized operator
    /// is unchanged. `V_sc` is nonzero only on momentum-conserving index
    /// combinations.
    pub fn fold_to_supercell(&self) -> KHamiltonian {
        let nk = self.mesh.num_kpoints();
        let n = self.n_spatial;
        let n_sc = nk * n;
        let mesh_sc = Mesh::new(1, 1, 1).expect("unit mesh");
        let mut out = KHamiltonian::zero(mesh_sc, n_sc);

        for k in 0..nk {
            for p in 0..n {
                for q in 0..n {
                    out.h[[0, k * n + p, k * n + q]] = self.h[[k, p, q]];
                }
            }
        }

        // V_sc[(k1 p),(k2 q),(k3 r),(k4 s)] = V[Q][k1][k4][pqrs] when
        // k2 = k1 ⊖ Q and k3 = k4 ⊖ Q for Q = k1 ⊖ k2; zero otherwise.
        for k1 in 0..nk {
            let k1v = self.mesh.from_flat(k1);
            for k2 in 0..nk {
                let k2v = self.mesh.from_flat(k2);
                let qv = modsub(&self.mesh, k1v, k2v).expect("valid");
                let q = self.mesh.flat_index(qv);
                for k4 in 0..nk {
                    let k4v = self.mesh.from_flat(k4);
                    let k3v = modsub(&self.mesh, k4v, qv).expect("valid");
                    let k3 = self.mesh.flat_index(k3v);
                    for p in 0..n {
                        for qq in 0..n {
                            for r in 0..n {
                                for s in 0..n {
                                    out.v[IxDyn(&[
                                        0,
                                        0,
                                        0,
                                        k1 * n + p,
                                        k2 * n + qq,
                                        k3 * n + r,
                                        k4 * n + s,
                                    ])] = self.v_at(q, k1, k4, p, qq, r, s);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Per-Q coefficient blocks `L[(k, p, q), n]` whose Gram form reproduces the
/// two-body tensor exactly: `V[Q] = Σ_n L(Q) ⊗ L(Q)*`.
pub(crate) struct GramFactors {
    pub mesh: Mesh,
    pub n_spatial: usize,
    /// `factors[q][n][(k·n_s + p)·n_s + q]`
    pub factors: Vec<Vec<Vec<Complex64>>>,
}

impl GramFactors {
    pub fn assemble_v(&self) -> ArrayD<Complex64> {
        let nk = self.mesh.num_kpoints();
        let n = self.n_spatial;
        let mut v = ArrayD::zeros(IxDyn(&KHamiltonian::v_shape(&self.mesh, n)));
        for q in 0..nk {
            for vec in &self.factors[q] {
                for k in 0..nk {
                    for p in 0..n {
                        for qq in 0..n {
                            let left = vec[(k * n + p) * n + qq];
                            if left.norm_sqr() == 0.0 {
                                continue;
                            }
                            for kp in 0..nk {
                                for r in 0..n {
                                    for s in 0..n {
                                        let right = vec[(kp * n + s) * n + r].conj();
                                        v[IxDyn(&[q, k, kp, p, qq, r, s])] += left * right;
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
}

/// Mirror map tying the `⊖Q` factor block to the `Q` block:
/// `L(⊖Q)[(κ, a, b), n] = L(Q)*[(κ ⊕ Q, b, a), n]`. Applying it to a block
/// with a self-inverse `Q` must leave it fixed.
fn mirror_factor(mesh: &Mesh, n: usize, q: KVector, vec: &[Complex64]) -> Vec<Complex64> {
    let nk = mesh.num_kpoints();
    let mut out = vec![Complex64::new(0.0, 0.0); vec.len()];
    for k in 0..nk {
        let kv = mesh.from_flat(k);
        let k_shift = mesh.flat_index(modadd(mesh, kv, q).expect("valid"));
        for a in 0..n {
            for b in 0..n {
                out[(k * n + a) * n + b] = vec[(k_shift * n + b) * n + a].conj();
            }
        }
    }
    out
}

/// Deterministic pseudo-random Hamiltonian with exact Hermiticity and exact
/// four-fold two-body symmetry.
///
/// The two-body tensor is built per momentum transfer as a Gram form
/// `Σ_n L L†` (so an iterated Cholesky factorization exists exactly), with
/// the `⊖Q` block mirrored from the `Q` block and self-inverse blocks
/// symmetrized under the mirror map. Entry magnitudes decay exponentially in
/// `|p − q|` and in the minimum-image length of `Q` at rate `decay`.
pub fn generate_synthetic(mesh: Mesh, n_spatial: usize, seed: u64, decay: f64) -> KHamiltonian {
    let rank = (mesh.num_kpoints() * n_spatial * n_spatial).div_ceil(2).max(1);
    generate_synthetic_with_rank(mesh, n_spatial, seed, decay, rank)
}

/// [`generate_synthetic`] with an explicit Gram rank per momentum transfer.
pub fn generate_synthetic_with_rank(
    mesh: Mesh,
    n_spatial: usize,
    seed: u64,
    decay: f64,
    rank: usize,
) -> KHamiltonian {
    let gram = synthetic_gram_factors(mesh, n_spatial, seed, decay, rank);
    let mut ham = KHamiltonian::zero(mesh, n_spatial);
    ham.v = gram.assemble_v();
    ham.h = synthetic_one_body(mesh, n_spatial, seed, decay);
    ham
}

/// Hermitized decaying random one-body blocks.
pub(crate) fn synthetic_one_body(
    mesh: Mesh,
    n_spatial: usize,
    seed: u64,
    decay: f64,
) -> Array3<Complex64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0b5e55ed_c0ffee00);
    let nk = mesh.num_kpoints();
    let mut h = Array3::zeros((nk, n_spatial, n_spatial));
    for k in 0..nk {
        let mut block = vec![Complex64::new(0.0, 0.0); n_spatial * n_spatial];
        for p in 0..n_spatial {
            for q in 0..n_spatial {
                let w = (-decay * (p as f64 - q as f64).abs()).exp();
                block[p * n_spatial + q] = Complex64::new(
                    w * rng.gen_range(-1.0..1.0),
                    w * rng.gen_range(-1.0..1.0),
                );
            }
        }
        for p in 0..n_spatial {
            for q in 0..n_spatial {
                h[[k, p, q]] = (block[p * n_spatial + q] + block[q * n_spatial + p].conj()) * 0.5;
            }
        }
    }
    h
}

pub(crate) fn synthetic_gram_factors(
    mesh: Mesh,
    n_spatial: usize,
    seed: u64,
    decay: f64,
    rank: usize,
) -> GramFactors {
    let nk = mesh.num_kpoints();
    let n = n_spatial;
    let dim = nk * n * n;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut factors: Vec<Vec<Vec<Complex64>>> = vec![Vec::new(); nk];

    // overall scale keeps two-body magnitudes comparable to one-body ones
    let scale = 0.5 / (rank as f64).sqrt();

    for q in 0..nk {
        let qv = mesh.from_flat(q);
        let neg_q = mesh.flat_index(modneg(&mesh, qv).expect("valid"));
        if neg_q < q {
            // mirrored from the already-generated partner block
            factors[q] = factors[neg_q]
                .iter()
                .map(|vec| {
                    let neg_qv = mesh.from_flat(neg_q);
                    mirror_factor(&mesh, n, neg_qv, vec)
                })
                .collect();
            continue;
        }
        let q_dist: f64 = (0..3)
            .map(|d| (qv.0[d].min(mesh.dims()[d] - qv.0[d])) as f64)
            .sum();
        let mut vecs = Vec::with_capacity(rank);
        for _ in 0..rank {
            let mut vec = vec![Complex64::new(0.0, 0.0); dim];
            for k in 0..nk {
                for p in 0..n {
                    for b in 0..n {
                        let w = scale
                            * (-decay * ((p as f64 - b as f64).abs() + q_dist)).exp();
                        vec[(k * n + p) * n + b] = Complex64::new(
                            w * rng.gen_range(-1.0..1.0),
                            w * rng.gen_range(-1.0..1.0),
                        );
                    }
                }
            }
            if neg_q == q {
                // self-inverse transfer: project onto the mirror-fixed subspace
                let mirrored = mirror_factor(&mesh, n, qv, &vec);
                for (x, m) in vec.iter_mut().zip(mirrored) {
                    *x = (*x + m) * 0.5;
                }
            }
            vecs.push(vec);
        }
        factors[q] = vecs;
    }
    GramFactors {
        mesh,
        n_spatial,
        factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_v_validates_clean() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = KHamiltonian::zero(mesh, 2);
        let rep = ham.validate().unwrap();
        assert_eq!(rep.max_violation(), 0.0);
    }

    #[test]
    fn synthetic_is_exactly_symmetric() {
        for (mesh, n) in [
            (Mesh::new(1, 1, 1).unwrap(), 2),
            (Mesh::new(1, 1, 2).unwrap(), 2),
            (Mesh::new(1, 2, 2).unwrap(), 1),
            (Mesh::new(1, 1, 3).unwrap(), 2),
        ] {
            let ham = generate_synthetic(mesh, n, 7, 0.5);
            let rep = ham.validate().unwrap();
            assert!(
                rep.passes(HARTREE_TOL_EXACT),
                "mesh {mesh}: max violation {:.3e}",
                rep.max_violation()
            );
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let a = generate_synthetic(mesh, 2, 42, 0.3);
        let b = generate_synthetic(mesh, 2, 42, 0.3);
        assert_eq!(a.h, b.h);
        assert_eq!(a.v, b.v);
        let c = generate_synthetic(mesh, 2, 43, 0.3);
        assert_ne!(a.v, c.v);
    }

    #[test]
    fn perturbed_entry_is_reported() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let mut ham = generate_synthetic(mesh, 2, 3, 0.2);
        ham.v[IxDyn(&[1, 0, 1, 0, 1, 1, 0])] += Complex64::new(1e-3, 0.0);
        let rep = ham.validate().unwrap();
        let dev = rep.max_violation();
        assert!(dev >= 0.9e-3 && dev <= 1.1e-3, "got {dev:.3e}");
        assert!(!rep.passes(1e-6));
    }

    #[test]
    fn fold_identity_on_unit_mesh() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let ham = generate_synthetic(mesh, 2, 5, 0.0);
        let sc = ham.fold_to_supercell();
        assert_eq!(sc.h, ham.h);
        assert_eq!(sc.v, ham.v);
    }

    #[test]
    fn fold_preserves_symmetry_and_entries() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 1, 11, 0.1);
        let sc = ham.fold_to_supercell();
        assert_eq!(sc.n_spatial, 2);
        let rep = sc.validate().unwrap();
        assert!(rep.passes(HARTREE_TOL_EXACT), "violation {:.3e}", rep.max_violation());

        // the nonzero coefficient multiset is preserved
        let mut orig: Vec<f64> = ham.v.iter().map(|c| c.norm()).filter(|x| *x > 0.0).collect();
        let mut folded: Vec<f64> = sc.v.iter().map(|c| c.norm()).filter(|x| *x > 0.0).collect();
        orig.sort_by(f64::total_cmp);
        folded.sort_by(f64::total_cmp);
        assert_eq!(orig.len(), folded.len());
        for (a, b) in orig.iter().zip(&folded) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn effective_one_body_is_hermitian() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 9, 0.4);
        let hp = ham.effective_one_body();
        for k in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    let dev = (hp[[k, p, q]] - hp[[k, q, p]].conj()).norm();
                    assert!(dev < 1e-12);
                }
            }
        }
    }
}

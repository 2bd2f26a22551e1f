//! Monkhorst-Pack mesh algebra.
//!
//! Crystal momenta live on a Γ-centered uniform grid with `N_x × N_y × N_z`
//! points, indexed componentwise by integers in `[0, N_dim)`. Differences of
//! momenta are taken modulo the grid (written `⊖` below); the reciprocal-lattice
//! vector `G` records what a non-modular difference lost when folded back into
//! the first Brillouin zone:
//!
//! ```text
//!   kp − kq = Q + G,          Q = kp ⊖ kq,   G_dim ∈ {0, −N_dim}
//!   kq − kp = (⊖Q) + !G,      ⊖Q = 0 ⊖ Q,    !G = −(Q + G + (⊖Q))
//! ```
//!
//! Both identities hold exactly in integer arithmetic and pin every derived
//! quantity uniquely. For example on a `[4, 4, 4]` mesh with `kp = (2, 1, 3)`,
//! `kq = (3, 1, 2)` the second identity forces `⊖Q = (1, 0, 3)`: the x
//! component is `(0 − 3) mod 4 = 1`, and no other value satisfies
//! `kq − kp = (⊖Q) + !G` with `!G_dim ∈ {0, −N_dim}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Γ-centered Monkhorst-Pack grid, `dims = [N_x, N_y, N_z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mesh {
    dims: [i64; 3],
}

/// A crystal momentum as grid indices, each component in `[0, N_dim)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KVector(pub [i64; 3]);

/// A reciprocal-lattice vector in units of the mesh extent.
///
/// Outputs of [`gvector`] and [`complement_g`] have components in
/// `{0, −N_dim}`; kept as signed integers so the integer identities stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GVector(pub [i64; 3]);

impl fmt::Display for Mesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.dims[0], self.dims[1], self.dims[2])
    }
}

/// Ceiling of log2, with `ceil_log2(1) = 0` and `ceil_log2(0) = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

impl Mesh {
    pub fn new(nx: i64, ny: i64, nz: i64) -> Result<Mesh> {
        if nx < 1 || ny < 1 || nz < 1 {
            return Err(Error::InvalidMesh(nx, ny, nz));
        }
        Ok(Mesh { dims: [nx, ny, nz] })
    }

    pub fn dims(&self) -> [i64; 3] {
        self.dims
    }

    /// Total number of k-points, `N_k`.
    pub fn num_kpoints(&self) -> usize {
        (self.dims[0] * self.dims[1] * self.dims[2]) as usize
    }

    /// Register width `n_k = ⌈log N_x⌉ + ⌈log N_y⌉ + ⌈log N_z⌉`.
    ///
    /// A dimension of size 1 needs no bits.
    pub fn momentum_bits(&self) -> u32 {
        self.dims.iter().map(|&n| ceil_log2(n as u64)).sum()
    }

    /// Number of even entries among `N_x, N_y, N_z` (written `v` in cost
    /// formulas).
    pub fn even_dim_count(&self) -> u32 {
        self.dims.iter().filter(|&&n| n % 2 == 0).count() as u32
    }

    pub fn contains(&self, k: KVector) -> bool {
        (0..3).all(|d| k.0[d] >= 0 && k.0[d] < self.dims[d])
    }

    fn check(&self, k: KVector) -> Result<KVector> {
        if self.contains(k) {
            Ok(k)
        } else {
            Err(Error::InvalidKVector(k.0[0], k.0[1], k.0[2], *self))
        }
    }

    /// Flat index with x slowest: `(k_x·N_y + k_y)·N_z + k_z`.
    pub fn flat_index(&self, k: KVector) -> usize {
        ((k.0[0] * self.dims[1] + k.0[1]) * self.dims[2] + k.0[2]) as usize
    }

    pub fn from_flat(&self, idx: usize) -> KVector {
        let idx = idx as i64;
        let kz = idx % self.dims[2];
        let ky = (idx / self.dims[2]) % self.dims[1];
        let kx = idx / (self.dims[1] * self.dims[2]);
        KVector([kx, ky, kz])
    }

    /// All k-points in flat-index order (lexicographic, x slowest).
    pub fn kpoints(&self) -> impl Iterator<Item = KVector> + '_ {
        (0..self.num_kpoints()).map(|i| self.from_flat(i))
    }
}

/// Componentwise modular subtraction `a ⊖ b`.
pub fn modsub(mesh: &Mesh, a: KVector, b: KVector) -> Result<KVector> {
    mesh.check(a)?;
    mesh.check(b)?;
    let mut out = [0i64; 3];
    for d in 0..3 {
        out[d] = (a.0[d] - b.0[d]).rem_euclid(mesh.dims()[d]);
    }
    Ok(KVector(out))
}

/// Modular negation `⊖b = 0 ⊖ b`.
pub fn modneg(mesh: &Mesh, b: KVector) -> Result<KVector> {
    modsub(mesh, KVector([0, 0, 0]), b)
}

/// Componentwise modular addition, `a ⊕ b = a ⊖ (⊖b)`.
pub fn modadd(mesh: &Mesh, a: KVector, b: KVector) -> Result<KVector> {
    let nb = modneg(mesh, b)?;
    modsub(mesh, a, nb)
}

/// Momentum transfer and folding vector for a pair of k-points:
/// `Q = kp ⊖ kq` and `G = (kp − kq) − Q` with non-modular subtraction.
pub fn gvector(mesh: &Mesh, kp: KVector, kq: KVector) -> Result<(KVector, GVector)> {
    let q = modsub(mesh, kp, kq)?;
    let mut g = [0i64; 3];
    for d in 0..3 {
        g[d] = (kp.0[d] - kq.0[d]) - q.0[d];
    }
    Ok((q, GVector(g)))
}

/// The complement pair `(⊖Q, !G)` with `!G = −(Q + G + (⊖Q))`, satisfying
/// `kq − kp = (⊖Q) + !G` whenever `(Q, G)` came from [`gvector`].
pub fn complement_g(mesh: &Mesh, q: KVector, g: GVector) -> Result<(KVector, GVector)> {
    let neg_q = modneg(mesh, q)?;
    let mut not_g = [0i64; 3];
    for d in 0..3 {
        not_g[d] = -(q.0[d] + g.0[d] + neg_q.0[d]);
    }
    Ok((neg_q, GVector(not_g)))
}

/// Number of momentum transfers with `Q = ⊖Q`; equals `2^v` where `v` is the
/// number of even mesh dimensions.
pub fn count_self_inverse_q(mesh: &Mesh) -> usize {
    mesh.kpoints()
        .filter(|&q| modneg(mesh, q).expect("q valid on own mesh") == q)
        .count()
}

/// Pack a G vector into a 3-bit flag, one bit per dimension (set when the
/// component is `−N_dim`). Used to index central-tensor blocks.
pub fn g_flag(mesh: &Mesh, g: GVector) -> usize {
    let mut f = 0usize;
    for d in 0..3 {
        debug_assert!(g.0[d] == 0 || g.0[d] == -mesh.dims()[d]);
        if g.0[d] != 0 {
            f |= 1 << d;
        }
    }
    f
}

/// Inverse of [`g_flag`].
pub fn g_from_flag(mesh: &Mesh, flag: usize) -> GVector {
    let mut g = [0i64; 3];
    for d in 0..3 {
        if flag & (1 << d) != 0 {
            g[d] = -mesh.dims()[d];
        }
    }
    GVector(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh(nx: i64, ny: i64, nz: i64) -> Mesh {
        Mesh::new(nx, ny, nz).unwrap()
    }

    fn kv(x: i64, y: i64, z: i64) -> KVector {
        KVector([x, y, z])
    }

    fn gv(x: i64, y: i64, z: i64) -> GVector {
        GVector([x, y, z])
    }

    #[test]
    fn modsub_examples() {
        let m = mesh(1, 1, 4);
        assert_eq!(modsub(&m, kv(0, 0, 3), kv(0, 0, 1)).unwrap(), kv(0, 0, 2));

        let m = mesh(4, 4, 4);
        assert_eq!(modsub(&m, kv(2, 1, 2), kv(3, 3, 3)).unwrap(), kv(3, 2, 3));

        // identity case
        for k in m.kpoints() {
            assert_eq!(modsub(&m, k, k).unwrap(), kv(0, 0, 0));
        }
    }

    #[test]
    fn modsub_rejects_out_of_range() {
        let m = mesh(2, 2, 2);
        assert!(modsub(&m, kv(0, 0, 2), kv(0, 0, 0)).is_err());
        assert!(modsub(&m, kv(0, 0, 0), kv(-1, 0, 0)).is_err());
    }

    #[test]
    fn gvector_examples() {
        let m = mesh(1, 4, 4);
        let (q, g) = gvector(&m, kv(0, 2, 1), kv(0, 3, 1)).unwrap();
        assert_eq!(q, kv(0, 3, 0));
        assert_eq!(g, gv(0, -4, 0));

        let m = mesh(1, 1, 4);
        let (q, g) = gvector(&m, kv(0, 0, 3), kv(0, 0, 1)).unwrap();
        assert_eq!(q, kv(0, 0, 2));
        assert_eq!(g, gv(0, 0, 0));

        let (q, g) = gvector(&m, kv(0, 0, 2), kv(0, 0, 2)).unwrap();
        assert_eq!(q, kv(0, 0, 0));
        assert_eq!(g, gv(0, 0, 0));
    }

    #[test]
    fn complement_examples() {
        let m = mesh(1, 1, 4);
        let (nq, ng) = complement_g(&m, kv(0, 0, 2), gv(0, 0, 0)).unwrap();
        assert_eq!(nq, kv(0, 0, 2));
        assert_eq!(ng, gv(0, 0, -4));

        let m = mesh(1, 4, 4);
        let (nq, ng) = complement_g(&m, kv(0, 1, 0), gv(0, 0, 0)).unwrap();
        assert_eq!(nq, kv(0, 3, 0));
        assert_eq!(ng, gv(0, -4, 0));

        let m = mesh(3, 3, 3);
        let (nq, ng) = complement_g(&m, kv(0, 0, 0), gv(0, 0, 0)).unwrap();
        assert_eq!(nq, kv(0, 0, 0));
        assert_eq!(ng, gv(0, 0, 0));
    }

    /// Published example values for the momentum-label mapping, one row per
    /// (mesh, kp, kq): expected Q, G, ⊖Q, !G. The row for mesh [4,4,4] with
    /// kp=(2,1,3), kq=(3,1,2) is sometimes quoted with ⊖Q=(0,0,3); the
    /// defining identity forces (1,0,3) and that is what we assert.
    #[test]
    fn momentum_table_examples() {
        #[rustfmt::skip]
        let rows: Vec<([i64;3], KVector, KVector, KVector, GVector, KVector, GVector)> = vec![
            ([1,1,4], kv(0,0,3), kv(0,0,1), kv(0,0,2), gv(0,0,0),   kv(0,0,2), gv(0,0,-4)),
            ([1,4,4], kv(0,2,1), kv(0,3,1), kv(0,3,0), gv(0,-4,0),  kv(0,1,0), gv(0,0,0)),
            ([1,4,4], kv(0,2,1), kv(0,3,3), kv(0,3,2), gv(0,-4,-4), kv(0,1,2), gv(0,0,0)),
            ([1,4,4], kv(0,1,2), kv(0,1,3), kv(0,0,3), gv(0,0,-4),  kv(0,0,1), gv(0,0,0)),
            ([1,4,4], kv(0,1,3), kv(0,1,2), kv(0,0,1), gv(0,0,0),   kv(0,0,3), gv(0,0,-4)),
            ([4,4,4], kv(2,1,3), kv(3,1,2), kv(3,0,1), gv(-4,0,0),  kv(1,0,3), gv(0,0,-4)),
            ([4,4,4], kv(2,1,2), kv(3,3,3), kv(3,2,3), gv(-4,-4,-4),kv(1,2,1), gv(0,0,0)),
        ];
        for (dims, kp, kq, want_q, want_g, want_nq, want_ng) in rows {
            let m = mesh(dims[0], dims[1], dims[2]);
            let (q, g) = gvector(&m, kp, kq).unwrap();
            assert_eq!(q, want_q, "Q for {dims:?} {kp:?} {kq:?}");
            assert_eq!(g, want_g, "G for {dims:?} {kp:?} {kq:?}");
            let (nq, ng) = complement_g(&m, q, g).unwrap();
            assert_eq!(nq, want_nq, "neg-Q for {dims:?} {kp:?} {kq:?}");
            assert_eq!(ng, want_ng, "not-G for {dims:?} {kp:?} {kq:?}");
        }
    }

    #[test]
    fn integer_identities_exhaustive() {
        for m in [mesh(1, 1, 4), mesh(1, 4, 4), mesh(4, 4, 4), mesh(2, 3, 5)] {
            for kp in m.kpoints() {
                for kq in m.kpoints() {
                    let (q, g) = gvector(&m, kp, kq).unwrap();
                    for d in 0..3 {
                        assert_eq!(kp.0[d] - kq.0[d], q.0[d] + g.0[d]);
                        assert!(g.0[d] == 0 || g.0[d] == -m.dims()[d]);
                    }
                    let (nq, ng) = complement_g(&m, q, g).unwrap();
                    assert!(m.contains(nq));
                    for d in 0..3 {
                        assert_eq!(kq.0[d] - kp.0[d], nq.0[d] + ng.0[d]);
                    }
                    // complement is an involution
                    let (q2, g2) = complement_g(&m, nq, ng).unwrap();
                    assert_eq!((q2, g2), (q, g));
                    // complement pair matches gvector of the swapped pair
                    let (q_swap, g_swap) = gvector(&m, kq, kp).unwrap();
                    assert_eq!((q_swap, g_swap), (nq, ng));
                }
            }
        }
    }

    #[test]
    fn self_inverse_counts() {
        assert_eq!(count_self_inverse_q(&mesh(3, 3, 3)), 1);
        assert_eq!(count_self_inverse_q(&mesh(2, 3, 3)), 2);
        assert_eq!(count_self_inverse_q(&mesh(2, 2, 2)), 8);
        for m in [mesh(1, 1, 1), mesh(2, 2, 2), mesh(2, 3, 4), mesh(1, 4, 6)] {
            assert_eq!(
                count_self_inverse_q(&m),
                1usize << m.even_dim_count(),
                "formula 2^v for {m}"
            );
        }
    }

    #[test]
    fn momentum_bits() {
        assert_eq!(mesh(1, 1, 4).momentum_bits(), 2);
        assert_eq!(mesh(1, 1, 1).momentum_bits(), 0);
        assert_eq!(mesh(3, 3, 3).momentum_bits(), 6);
        assert_eq!(mesh(4, 4, 4).momentum_bits(), 6);
    }

    #[test]
    fn g_flag_roundtrip() {
        let m = mesh(2, 3, 4);
        for f in 0..8 {
            assert_eq!(g_flag(&m, g_from_flag(&m, f)), f);
        }
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_mesh() -> impl Strategy<Value = Mesh> {
        (1i64..5, 1i64..5, 1i64..5).prop_map(|(x, y, z)| Mesh::new(x, y, z).unwrap())
    }

    proptest! {
        #[test]
        fn modsub_roundtrip(m in arb_mesh(), ia in 0usize..64, ib in 0usize..64) {
            let a = m.from_flat(ia % m.num_kpoints());
            let b = m.from_flat(ib % m.num_kpoints());
            let d = modsub(&m, a, b).unwrap();
            prop_assert!(m.contains(d));
            prop_assert_eq!(modadd(&m, d, b).unwrap(), a);
        }

        #[test]
        fn flat_index_roundtrip(m in arb_mesh(), i in 0usize..64) {
            let i = i % m.num_kpoints();
            prop_assert_eq!(m.flat_index(m.from_flat(i)), i);
        }
    }
}

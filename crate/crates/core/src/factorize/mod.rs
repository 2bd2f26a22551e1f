//! The four LCU data representations of a k-point Hamiltonian.
//!
//! `sparsify` thresholds and deduplicates coefficients under the four-fold
//! symmetry; `cholesky_sf` produces per-transfer Gram factors;
//! `double_factorize` eigendecomposes each factor block; the `thc` submodule
//! ingests or synthesizes tensor-hypercontraction factors.

pub mod cholesky;
pub mod df;
pub mod givens;
pub mod thc;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::hamiltonian::KHamiltonian;
use crate::kmesh::Mesh;

pub use cholesky::{cholesky_sf, CholeskyFactors};
pub use df::{double_factorize, DfFactors};
pub use thc::{ingest_thc, synthesize_thc, ThcFactors};

pub type VIndex = (usize, usize, usize, usize, usize, usize, usize);

/// One symmetry-unique two-body coefficient.
#[derive(Debug, Clone, Copy)]
pub struct SparseEntry {
    /// Canonical (lexicographically smallest) index in the orbit.
    pub index: VIndex,
    pub value: Complex64,
    /// Orbit size under the four-fold symmetry (1, 2, or 4).
    pub multiplicity: u32,
}

/// One unique one-body coefficient `h'_{pq}(k)` with `p ≤ q`.
#[derive(Debug, Clone, Copy)]
pub struct OneBodyEntry {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub value: Complex64,
    /// 1 on the diagonal, 2 off it.
    pub multiplicity: u32,
}

/// Thresholded, symmetry-deduplicated coefficient list.
#[derive(Debug, Clone)]
pub struct SparseEntries {
    pub mesh: Mesh,
    pub n_spatial: usize,
    pub threshold: f64,
    pub two_body: Vec<SparseEntry>,
    pub one_body: Vec<OneBodyEntry>,
}

impl SparseEntries {
    /// Unique-entry count `d` entering the lookup costs: one-body plus
    /// two-body representatives, doubled for the separate real and imaginary
    /// amplitude channels.
    pub fn d(&self) -> u64 {
        2 * (self.two_body.len() as u64 + self.one_body.len() as u64)
    }

    /// L1 norms recomputed from the retained entries (one-body, two-body).
    /// An independent path to λ: sums representative values weighted by
    /// orbit multiplicity instead of sweeping the full tensor.
    pub fn lambda_from_entries(&self) -> (f64, f64) {
        let one: f64 = self
            .one_body
            .iter()
            .map(|e| e.multiplicity as f64 * (e.value.re.abs() + e.value.im.abs()))
            .sum();
        let two: f64 = self
            .two_body
            .iter()
            .map(|e| e.multiplicity as f64 * (e.value.re.abs() + e.value.im.abs()))
            .sum();
        (one, two)
    }
}

/// The orbit of an index tuple under the four-fold symmetry; the flag marks
/// entries whose value is the complex conjugate of the representative's.
fn orbit(mesh: &Mesh, t: VIndex) -> [(VIndex, bool); 4] {
    let images = KHamiltonian::symmetry_images(mesh, t);
    [
        (t, false),
        (images[0].0, images[0].1),
        (images[1].0, images[1].1),
        (images[2].0, images[2].1),
    ]
}

/// Threshold the coefficients and count symmetry-unique entries.
///
/// An orbit is retained when `max(|Re|, |Im|)` of its value exceeds the
/// threshold, so the zeroing pattern is identical for the real and imaginary
/// channels. The effective one-body coefficients (bare `h` plus the two-body
/// contraction) are thresholded the same way.
pub fn sparsify(ham: &KHamiltonian, threshold: f64) -> SparseEntries {
    let mesh = ham.mesh;
    let nk = mesh.num_kpoints();
    let n = ham.n_spatial;

    let mut two_body = Vec::new();
    for q in 0..nk {
        for k in 0..nk {
            for kp in 0..nk {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for d in 0..n {
                                let t = (q, k, kp, a, b, c, d);
                                let orb = orbit(&mesh, t);
                                if orb.iter().any(|(u, _)| *u < t) {
                                    continue; // not the canonical representative
                                }
                                let val = ham.v_at(q, k, kp, a, b, c, d);
                                if val.re.abs().max(val.im.abs()) <= threshold {
                                    continue;
                                }
                                let mut distinct: Vec<VIndex> =
                                    orb.iter().map(|(u, _)| *u).collect();
                                distinct.sort_unstable();
                                distinct.dedup();
                                two_body.push(SparseEntry {
                                    index: t,
                                    value: val,
                                    multiplicity: distinct.len() as u32,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    let hp = ham.effective_one_body();
    let mut one_body = Vec::new();
    for k in 0..nk {
        for p in 0..n {
            for q in p..n {
                let val = hp[[k, p, q]];
                if val.re.abs().max(val.im.abs()) <= threshold {
                    continue;
                }
                one_body.push(OneBodyEntry {
                    k,
                    p,
                    q,
                    value: val,
                    multiplicity: if p == q { 1 } else { 2 },
                });
            }
        }
    }

    SparseEntries {
        mesh,
        n_spatial: n,
        threshold,
        two_body,
        one_body,
    }
}

/// Dense two-body tensor spanned by the retained entries (symmetry images
/// filled back in).
pub fn reconstruct_sparse(entries: &SparseEntries) -> ArrayD<Complex64> {
    let mut v = ArrayD::zeros(IxDyn(&KHamiltonian::v_shape(&entries.mesh, entries.n_spatial)));
    for e in &entries.two_body {
        for (t, conj) in orbit(&entries.mesh, e.index) {
            let (q, k, kp, a, b, c, d) = t;
            v[IxDyn(&[q, k, kp, a, b, c, d])] = if conj { e.value.conj() } else { e.value };
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::generate_synthetic;
    use crate::kmesh::Mesh;

    #[test]
    fn threshold_zero_loses_nothing() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 13, 0.2);
        let entries = sparsify(&ham, 0.0);
        let rec = reconstruct_sparse(&entries);
        let err = (&rec - &ham.v).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert_eq!(err, 0.0, "orbit representatives must restore V exactly");
    }

    #[test]
    fn d_matches_brute_force_orbit_count() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 29, 0.0);
        let entries = sparsify(&ham, 0.0);

        // brute force: group every nonzero tuple into orbits
        let nk = mesh.num_kpoints();
        let n = ham.n_spatial;
        let mut canonical = std::collections::HashSet::new();
        for q in 0..nk {
            for k in 0..nk {
                for kp in 0..nk {
                    for a in 0..n {
                        for b in 0..n {
                            for c in 0..n {
                                for d in 0..n {
                                    let val = ham.v_at(q, k, kp, a, b, c, d);
                                    if val.norm() == 0.0 {
                                        continue;
                                    }
                                    let t = (q, k, kp, a, b, c, d);
                                    let min = orbit(&mesh, t)
                                        .iter()
                                        .map(|(u, _)| *u)
                                        .min()
                                        .unwrap();
                                    canonical.insert(min);
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(entries.two_body.len(), canonical.len());
        assert_eq!(
            entries.d(),
            2 * (canonical.len() as u64 + entries.one_body.len() as u64)
        );
    }

    #[test]
    fn huge_threshold_leaves_nothing() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let ham = generate_synthetic(mesh, 2, 3, 0.0);
        let entries = sparsify(&ham, 1e9);
        assert_eq!(entries.d(), 0);
    }

    #[test]
    fn multiplicities_sum_to_tuple_count() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 5, 0.0);
        let entries = sparsify(&ham, 0.0);
        let total: u64 = entries.two_body.iter().map(|e| e.multiplicity as u64).sum();
        let nonzero = ham.v.iter().filter(|c| c.norm() > 0.0).count() as u64;
        assert_eq!(total, nonzero);
    }
}

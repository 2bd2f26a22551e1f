//! L1 norms λ of the four LCU representations, split into one- and two-body
//! parts.
//!
//! The one-body coefficients are the effective `h'` (bare `h` plus the
//! two-body contraction) for the sparse, SF, and DF walks. The THC walk
//! implements the bare two-body operator with ladder operators, so nothing
//! is folded into the one-body term there; its one-body norm uses the bare
//! `h` eigenvalues with the doubled spin weight. All sums are compensated
//! and run in a fixed index order so reported values are reproducible.

use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use crate::costmodel::Lcu;
use crate::factorize::{CholeskyFactors, DfFactors, ThcFactors};
use crate::hamiltonian::KHamiltonian;
use crate::linalg::{hermitian_eigenvalues, KahanSum};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaReport {
    pub lcu: Lcu,
    pub lambda_one: f64,
    pub lambda_two: f64,
    pub lambda_total: f64,
    /// Intensive value `λ / N_k`.
    pub lambda_per_cell: f64,
}

impl LambdaReport {
    fn new(lcu: Lcu, one: f64, two: f64, nk: usize) -> LambdaReport {
        LambdaReport {
            lcu,
            lambda_one: one,
            lambda_two: two,
            lambda_total: one + two,
            lambda_per_cell: (one + two) / nk as f64,
        }
    }
}

/// `λ_H̃₁ = Σ_k Σ_pq (|Re h'| + |Im h'|)` over the effective one-body
/// coefficients.
fn lambda_one_body_entrywise(ham: &KHamiltonian) -> f64 {
    let hp = ham.effective_one_body();
    let mut acc = KahanSum::new();
    for v in hp.iter() {
        acc.add(v.re.abs());
        acc.add(v.im.abs());
    }
    acc.value()
}

/// Eigenvalue L1 norm `Σ_k Σ_p |λ_{k,p}|` of per-k Hermitian blocks.
fn lambda_eigenvalue_sum(blocks: &ndarray::Array3<num_complex::Complex64>) -> f64 {
    let nk = blocks.shape()[0];
    let n = blocks.shape()[1];
    let mut acc = KahanSum::new();
    for k in 0..nk {
        let mat = DMatrix::from_fn(n, n, |p, q| blocks[[k, p, q]]);
        for f in hermitian_eigenvalues(&mat) {
            acc.add(f.abs());
        }
    }
    acc.value()
}

/// Sparse LCU: entrywise L1 norms of `h'` and of the full two-body tensor.
pub fn lambda_sparse(ham: &KHamiltonian) -> LambdaReport {
    let one = lambda_one_body_entrywise(ham);
    let mut acc = KahanSum::new();
    for v in ham.v.iter() {
        acc.add(v.re.abs());
        acc.add(v.im.abs());
    }
    LambdaReport::new(Lcu::Sparse, one, acc.value(), ham.mesh.num_kpoints())
}

/// Single factorization:
/// `λ_V = ½ Σ_{Q,n} (Σ_{k,pq} |Re L| + |Im L|)²`, one-body part as sparse.
pub fn lambda_sf(ham: &KHamiltonian, fac: &CholeskyFactors) -> LambdaReport {
    let one = lambda_one_body_entrywise(ham);
    let mut acc = KahanSum::new();
    for per_q in &fac.vectors {
        for vec in per_q {
            let mut inner = KahanSum::new();
            for v in vec {
                inner.add(v.re.abs());
                inner.add(v.im.abs());
            }
            let s = inner.value();
            acc.add(0.5 * s * s);
        }
    }
    LambdaReport::new(Lcu::Sf, one, acc.value(), ham.mesh.num_kpoints())
}

/// Double factorization:
/// `λ_DF,2 = ¼ Σ_{Q,n} [(Σ_{k,p} |f^A|)² + (Σ_{k,p} |f^B|)²]`,
/// `λ_DF,1 = Σ_{k,p} |eig_p(h'(k))|`.
pub fn lambda_df(ham: &KHamiltonian, fac: &DfFactors) -> LambdaReport {
    let one = lambda_eigenvalue_sum(&ham.effective_one_body());
    let mut acc = KahanSum::new();
    for per_n in &fac.blocks {
        for per_k in per_n {
            let mut sum_a = KahanSum::new();
            let mut sum_b = KahanSum::new();
            for block in per_k {
                for f in &block.a.values {
                    sum_a.add(f.abs());
                }
                for f in &block.b.values {
                    sum_b.add(f.abs());
                }
            }
            let (a, b) = (sum_a.value(), sum_b.value());
            acc.add(0.25 * (a * a + b * b));
        }
    }
    LambdaReport::new(Lcu::Df, one, acc.value(), ham.mesh.num_kpoints())
}

/// Tensor hypercontraction:
/// `λ_THC,1 = 2 Σ_{k,p} |eig_p(h(k))|` on the bare one-body blocks, and
/// `λ_THC,2 = 2 Σ_{Q,G1,G2,μν} (|Re ζ| + |Im ζ|) · S^{Q,G1}_μ · S^{Q,G2}_ν`
/// with `S` the transfer-dependent normalization sums.
pub fn lambda_thc(ham: &KHamiltonian, fac: &ThcFactors) -> LambdaReport {
    let one = 2.0 * lambda_eigenvalue_sum(&ham.h);
    let sums = fac.normalization_sums();
    let m = fac.m_rank;
    let nk = fac.mesh.num_kpoints();
    let mut acc = KahanSum::new();
    for q in 0..nk {
        for g1 in 0..8 {
            for g2 in 0..8 {
                for mu in 0..m {
                    for nu in 0..m {
                        let z = fac.zeta[[q, g1, g2, mu, nu]];
                        let w = z.re.abs() + z.im.abs();
                        if w == 0.0 {
                            continue;
                        }
                        acc.add(2.0 * w * sums[[q, g1, mu]] * sums[[q, g2, nu]]);
                    }
                }
            }
        }
    }
    LambdaReport::new(Lcu::Thc, one, acc.value(), nk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorize::{cholesky_sf, double_factorize, sparsify, synthesize_thc};
    use crate::hamiltonian::{generate_synthetic, KHamiltonian};
    use crate::kmesh::Mesh;
    use ndarray::IxDyn;
    use num_complex::Complex64;

    #[test]
    fn single_real_diagonal_h() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let mut ham = KHamiltonian::zero(mesh, 1);
        ham.h[[0, 0, 0]] = Complex64::new(0.5, 0.0);
        let rep = lambda_sparse(&ham);
        assert_eq!(rep.lambda_total, 0.5);
        assert_eq!(rep.lambda_two, 0.0);
        assert_eq!(rep.lambda_per_cell, 0.5);
    }

    #[test]
    fn two_body_counts_full_index_sum() {
        // one entry plus its three symmetry images, summed over all tuples
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let mut ham = KHamiltonian::zero(mesh, 2);
        let v = 0.3;
        let t = (1usize, 0usize, 1usize, 0usize, 1usize, 1usize, 0usize);
        for (idx, conj) in [
            (t, false),
            KHamiltonian::symmetry_images(&mesh, t)[0],
            KHamiltonian::symmetry_images(&mesh, t)[1],
            KHamiltonian::symmetry_images(&mesh, t)[2],
        ] {
            let (q, k, kp, a, b, c, d) = idx;
            let val = Complex64::new(v, 0.0);
            ham.v[IxDyn(&[q, k, kp, a, b, c, d])] = if conj { val.conj() } else { val };
        }
        let rep = lambda_sparse(&ham);
        assert!((rep.lambda_two - 4.0 * v).abs() < 1e-14);
    }

    #[test]
    fn sf_formula_structure() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let ham = KHamiltonian::zero(mesh, 2);
        let mut fac = cholesky_sf(&ham, 1e-12).unwrap();

        // single real entry l: lambda_V = l²/2
        let l = 0.8;
        fac.vectors[0] = vec![vec![
            Complex64::new(l, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]];
        let rep = lambda_sf(&ham, &fac);
        assert!((rep.lambda_two - 0.5 * l * l).abs() < 1e-14);

        // two entries in the same vector: (|l1| + |l2|)²/2
        let (l1, l2) = (0.8, 0.4);
        fac.vectors[0] = vec![vec![
            Complex64::new(l1, 0.0),
            Complex64::new(l2, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]];
        let rep = lambda_sf(&ham, &fac);
        assert!((rep.lambda_two - 0.5 * (l1 + l2) * (l1 + l2)).abs() < 1e-14);

        // two separate vectors: (l1² + l2²)/2
        fac.vectors[0] = vec![
            vec![
                Complex64::new(l1, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            vec![
                Complex64::new(l2, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        ];
        let rep = lambda_sf(&ham, &fac);
        assert!((rep.lambda_two - 0.5 * (l1 * l1 + l2 * l2)).abs() < 1e-14);
    }

    #[test]
    fn sf_matches_reversed_order_transcription() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 61, 0.15);
        let fac = cholesky_sf(&ham, 1e-12).unwrap();
        let rep = lambda_sf(&ham, &fac);

        // reversed iteration order, plain summation
        let mut two = 0.0;
        for per_q in fac.vectors.iter().rev() {
            for vec in per_q.iter().rev() {
                let s: f64 = vec.iter().rev().map(|v| v.re.abs() + v.im.abs()).sum();
                two += 0.5 * s * s;
            }
        }
        assert!((rep.lambda_two - two).abs() < 1e-9 * two.max(1.0));

        let hp = ham.effective_one_body();
        let entries: Vec<f64> = hp.iter().map(|v| v.re.abs() + v.im.abs()).collect();
        let one: f64 = entries.into_iter().rev().sum();
        assert!((rep.lambda_one - one).abs() < 1e-9 * one.max(1.0));
    }

    #[test]
    fn df_formula_structure() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 67, 0.1);
        let fac = cholesky_sf(&ham, 1e-12).unwrap();
        let df = double_factorize(&fac, 0.0, false).unwrap();
        let rep = lambda_df(&ham, &df);

        let mut two = 0.0;
        for per_n in df.blocks.iter().rev() {
            for per_k in per_n.iter().rev() {
                let a: f64 = per_k
                    .iter()
                    .flat_map(|b| b.a.values.iter())
                    .map(|f| f.abs())
                    .sum();
                let b: f64 = per_k
                    .iter()
                    .flat_map(|b| b.b.values.iter())
                    .map(|f| f.abs())
                    .sum();
                two += 0.25 * (a * a + b * b);
            }
        }
        assert!((rep.lambda_two - two).abs() < 1e-9 * two.max(1.0));
    }

    #[test]
    fn thc_unit_norm_sums_reduce_to_two_zeta() {
        // mesh [1,1,1], one orbital, one grid point: chi has a single entry
        // of unit modulus, so both normalization sums are 1
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let mut chi = ndarray::Array3::zeros((1, 1, 1));
        chi[[0, 0, 0]] = Complex64::new(1.0, 0.0);
        let mut zeta = ndarray::Array5::zeros((1, 8, 8, 1, 1));
        let r = 0.45;
        zeta[[0, 0, 0, 0, 0]] = Complex64::new(r, 0.0);
        let fac = crate::factorize::ingest_thc(mesh, chi, zeta, 1e-12).unwrap();
        let ham = KHamiltonian::zero(mesh, 1);
        let rep = lambda_thc(&ham, &fac);
        assert!((rep.lambda_two - 2.0 * r).abs() < 1e-14);
        assert_eq!(rep.lambda_one, 0.0);
    }

    #[test]
    fn thc_matches_brute_force_over_momenta() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let fac = synthesize_thc(mesh, 2, 3, 99);
        let ham = fac.into_hamiltonian(99, 0.0);
        let rep = lambda_thc(&ham, &fac);

        // brute force over (Q, k, k') instead of the (G1, G2) regrouping
        use crate::factorize::thc::pair_flag;
        let nk = 2;
        let mut two = 0.0;
        for q in 0..nk {
            let qv = mesh.from_flat(q);
            for mu in 0..3 {
                for nu in 0..3 {
                    for k in 0..nk {
                        for kp in 0..nk {
                            let g1 = pair_flag(&mesh, mesh.from_flat(k), qv);
                            let g2 = pair_flag(&mesh, mesh.from_flat(kp), qv);
                            let z = fac.zeta[[q, g1, g2, mu, nu]];
                            let kq = mesh
                                .flat_index(crate::kmesh::modsub(&mesh, mesh.from_flat(k), qv).unwrap());
                            let kpq = mesh
                                .flat_index(crate::kmesh::modsub(&mesh, mesh.from_flat(kp), qv).unwrap());
                            two += 2.0
                                * (z.re.abs() + z.im.abs())
                                * fac.norms[[k, mu]]
                                * fac.norms[[kq, mu]]
                                * fac.norms[[kpq, nu]]
                                * fac.norms[[kp, nu]];
                        }
                    }
                }
            }
        }
        assert!(
            (rep.lambda_two - two).abs() < 1e-9 * two.max(1.0),
            "{} vs {}",
            rep.lambda_two,
            two
        );
    }

    #[test]
    fn fold_invariance_of_sparse_lambda() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 71, 0.2);
        let sc = ham.fold_to_supercell();
        let a = lambda_sparse(&ham);
        let b = lambda_sparse(&sc);
        let rel = (a.lambda_total - b.lambda_total).abs() / a.lambda_total;
        assert!(rel < 1e-12, "relative deviation {rel:.3e}");
    }

    #[test]
    fn lambda_from_entries_matches_full_sweep_and_decreases() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 73, 0.3);
        let full = lambda_sparse(&ham);
        let entries = sparsify(&ham, 0.0);
        let (one, two) = entries.lambda_from_entries();
        assert!((one - full.lambda_one).abs() < 1e-9 * full.lambda_one.max(1.0));
        assert!((two - full.lambda_two).abs() < 1e-9 * full.lambda_two.max(1.0));

        let mut last = f64::INFINITY;
        for thresh in [0.0, 1e-4, 1e-2, 1e-1] {
            let (o, t) = sparsify(&ham, thresh).lambda_from_entries();
            assert!(o + t <= last + 1e-12);
            last = o + t;
        }
    }
}

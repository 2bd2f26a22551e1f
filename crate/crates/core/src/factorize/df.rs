//! Second factorization: eigendecomposition of the Hermitian one-body blocks
//! built from the Cholesky factors.
//!
//! Each factor vector `L_n(Q)` splits over `k` into blocks coupling the
//! orbitals at `k` and `k ⊖ Q`. The Hermitian combinations
//!
//! ```text
//!   A_n(Q, k) = (ρ_n(Q, k) + ρ_n(Q, k)†) / 2
//!   B_n(Q, k) = i (ρ_n(Q, k) − ρ_n(Q, k)†) / 2
//! ```
//!
//! are eigendecomposed on the `(k, k⊖Q)` pair space (dimension `2·n_s`, or
//! `n_s` when `Q = 0` and the pair degenerates to a single block). Retained
//! ranks feed the average rank `Ξ = Σ(Ξ_A + Ξ_B) / (2·N_k·M)`.

use nalgebra::DMatrix;
use ndarray::ArrayD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::GramFactors;
use crate::kmesh::{modsub, Mesh};
use crate::linalg::hermitian_eigen_sorted;

use super::cholesky::CholeskyFactors;

/// Eigendata of one `(Q, n, k)` block for either `A` or `B`.
#[derive(Debug, Clone)]
pub struct BlockEigen {
    /// Eigenvalues with `|f|` above the cutoff, ascending.
    pub values: Vec<f64>,
    /// Matching eigenvector columns (block dimension × retained rank).
    pub vectors: DMatrix<Complex64>,
}

impl BlockEigen {
    pub fn rank(&self) -> usize {
        self.values.len()
    }

    fn reconstruct(&self, dim: usize) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(dim, dim);
        for (j, &f) in self.values.iter().enumerate() {
            let col = self.vectors.column(j);
            for r in 0..dim {
                for c in 0..dim {
                    out[(r, c)] += col[r] * col[c].conj() * Complex64::new(f, 0.0);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DfBlock {
    /// `2·n_s`, or `n_s` for the degenerate `Q = 0` block.
    pub dim: usize,
    pub a: BlockEigen,
    pub b: BlockEigen,
}

/// Truncated eigensystems for every `(Q, n, k)` block.
#[derive(Debug, Clone)]
pub struct DfFactors {
    pub mesh: Mesh,
    pub n_spatial: usize,
    pub eigtol: f64,
    /// Cutoff interpreted relative to each block's largest `|f|`.
    pub relative: bool,
    pub m_rank: usize,
    /// `blocks[q][n][k]`
    pub blocks: Vec<Vec<Vec<DfBlock>>>,
}

impl DfFactors {
    /// Total retained eigenvalue count `Σ_{Q,n,k} (Ξ_A + Ξ_B)`.
    pub fn rank_total(&self) -> u64 {
        self.blocks
            .iter()
            .flatten()
            .flatten()
            .map(|b| (b.a.rank() + b.b.rank()) as u64)
            .sum()
    }

    /// Average rank `Ξ = rank_total / (2·N_k·M)`.
    pub fn xi_average(&self) -> f64 {
        let denom = 2 * self.mesh.num_kpoints() * self.m_rank.max(1);
        self.rank_total() as f64 / denom as f64
    }

    /// Number of stored rotation angles: each retained eigenvector is
    /// prepared by a ladder of two-level rotations with two angles apiece.
    /// Only the count matters for the cost model; nothing applies them.
    pub fn givens_angle_count(&self) -> usize {
        self.blocks
            .iter()
            .flatten()
            .flatten()
            .map(|b| {
                super::givens::decompose_isometry(&b.a.vectors).angle_count()
                    + super::givens::decompose_isometry(&b.b.vectors).angle_count()
            })
            .sum()
    }

    /// Dense two-body tensor rebuilt from the truncated eigensystems.
    pub fn reconstruct(&self) -> ArrayD<Complex64> {
        let mesh = self.mesh;
        let nk = mesh.num_kpoints();
        let n = self.n_spatial;
        let mut factors: Vec<Vec<Vec<Complex64>>> = vec![Vec::new(); nk];
        for (q, per_n) in self.blocks.iter().enumerate() {
            for blocks_k in per_n {
                let mut vec = vec![Complex64::new(0.0, 0.0); nk * n * n];
                for (k, block) in blocks_k.iter().enumerate() {
                    let a = block.a.reconstruct(block.dim);
                    let b = block.b.reconstruct(block.dim);
                    // rho = A − i·B recovers the factor block exactly at
                    // zero cutoff; its upper corner holds L
                    let rho = &a - &b * Complex64::new(0.0, 1.0);
                    for p in 0..n {
                        for qq in 0..n {
                            let val = if block.dim == n {
                                rho[(p, qq)]
                            } else {
                                rho[(p, n + qq)]
                            };
                            vec[(k * n + p) * n + qq] = val;
                        }
                    }
                }
                factors[q].push(vec);
            }
        }
        GramFactors {
            mesh,
            n_spatial: n,
            factors,
        }
        .assemble_v()
    }
}

/// Eigendecompose every factor block, discarding eigenvalues with `|f|` at or
/// below the cutoff (`eigtol` absolute, or `eigtol · max|f|` per block when
/// `relative` is set).
pub fn double_factorize(fac: &CholeskyFactors, eigtol: f64, relative: bool) -> Result<DfFactors> {
    if eigtol < 0.0 {
        return Err(Error::DegenerateInput("eigenvalue cutoff must be >= 0".into()));
    }
    let mesh = fac.mesh;
    let nk = mesh.num_kpoints();
    let n = fac.n_spatial;

    let mut blocks = Vec::with_capacity(nk);
    for q in 0..nk {
        let qv = mesh.from_flat(q);
        let mut per_n = Vec::with_capacity(fac.vectors[q].len());
        for n_vec in 0..fac.vectors[q].len() {
            let mut per_k = Vec::with_capacity(nk);
            for k in 0..nk {
                let kv = mesh.from_flat(k);
                let k_minus_q = mesh.flat_index(modsub(&mesh, kv, qv).expect("valid"));
                let l_block = DMatrix::from_fn(n, n, |p, qq| fac.at(q, n_vec, k, p, qq));

                let (a_mat, b_mat, dim) = if k_minus_q == k {
                    // degenerate pair: rho acts within the k block
                    let adj = l_block.adjoint();
                    let a = (&l_block + &adj) * Complex64::new(0.5, 0.0);
                    let b = (&l_block - &adj) * Complex64::new(0.0, 0.5);
                    (a, b, n)
                } else {
                    let dim = 2 * n;
                    let mut a = DMatrix::zeros(dim, dim);
                    let mut b = DMatrix::zeros(dim, dim);
                    for p in 0..n {
                        for qq in 0..n {
                            let val = l_block[(p, qq)];
                            a[(p, n + qq)] = val * 0.5;
                            a[(n + qq, p)] = val.conj() * 0.5;
                            b[(p, n + qq)] = val * Complex64::new(0.0, 0.5);
                            b[(n + qq, p)] = val.conj() * Complex64::new(0.0, -0.5);
                        }
                    }
                    (a, b, dim)
                };

                per_k.push(DfBlock {
                    dim,
                    a: truncate_eigen(&a_mat, eigtol, relative),
                    b: truncate_eigen(&b_mat, eigtol, relative),
                });
            }
            per_n.push(per_k);
        }
        blocks.push(per_n);
    }

    Ok(DfFactors {
        mesh,
        n_spatial: n,
        eigtol,
        relative,
        m_rank: fac.m_rank(),
        blocks,
    })
}

fn truncate_eigen(mat: &DMatrix<Complex64>, eigtol: f64, relative: bool) -> BlockEigen {
    let (values, vectors) = hermitian_eigen_sorted(mat);
    let cutoff = if relative {
        eigtol * values.iter().map(|f| f.abs()).fold(0.0, f64::max)
    } else {
        eigtol
    };
    let keep: Vec<usize> = (0..values.len())
        .filter(|&j| values[j].abs() > cutoff)
        .collect();
    let mut kept_vecs = DMatrix::zeros(mat.nrows(), keep.len());
    for (col, &j) in keep.iter().enumerate() {
        kept_vecs.set_column(col, &vectors.column(j));
    }
    BlockEigen {
        values: keep.iter().map(|&j| values[j]).collect(),
        vectors: kept_vecs,
    }
}

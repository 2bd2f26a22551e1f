//! Qubitized-walk eigenphase verification.
//!
//! For an LCU `H = Σ_ℓ ω_ℓ U_ℓ` with self-inverse unitaries, the walk
//! `W = R·SELECT` (with `R = 2|L⟩⟨L| ⊗ 1 − 1` and
//! `|L⟩ = Σ √(ω_ℓ/λ)|ℓ⟩`) acts on the invariant subspace spanned by
//! `|L⟩|n⟩` and `SELECT|L⟩|n⟩` with eigenvalues `e^{±i·arccos(E_n/λ)}`. The
//! check assembles `H`, eigendecomposes it, projects `W` onto each two-
//! dimensional subspace, and compares phases. `W` is applied matrix-free so
//! the `L × dim` product space is never materialized.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen_sorted;

/// Cap on `term count × system dimension`.
pub const MAX_WALK_DIM: usize = 1 << 14;

/// One LCU term: nonnegative weight and a self-inverse unitary.
#[derive(Debug, Clone)]
pub struct LcuTerm {
    pub weight: f64,
    pub unitary: DMatrix<Complex64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct WalkReport {
    pub lambda: f64,
    pub terms: usize,
    pub eigenphase_pairs: usize,
    /// Largest `| |phase| − arccos(E_n/λ) |` over all eigenvectors.
    pub max_phase_deviation: f64,
    /// Largest leakage of `W` out of an invariant subspace.
    pub max_subspace_leak: f64,
}

struct WalkOperator<'a> {
    terms: &'a [LcuTerm],
    amps: Vec<f64>,
    dim: usize,
}

impl WalkOperator<'_> {
    /// `SELECT` applied blockwise: `(S v)_ℓ = U_ℓ v_ℓ`.
    fn select(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (l, term) in self.terms.iter().enumerate() {
            let block = &v[l * self.dim..(l + 1) * self.dim];
            let vec = DVector::from_column_slice(block);
            let res = &term.unitary * vec;
            out[l * self.dim..(l + 1) * self.dim].copy_from_slice(res.as_slice());
        }
        out
    }

    /// `R v = 2|L⟩⟨L| ⊗ 1 · v − v`.
    fn reflect(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut overlap = vec![Complex64::new(0.0, 0.0); self.dim];
        for (l, &a) in self.amps.iter().enumerate() {
            for i in 0..self.dim {
                overlap[i] += v[l * self.dim + i] * a;
            }
        }
        let mut out = Vec::with_capacity(v.len());
        for (l, &a) in self.amps.iter().enumerate() {
            for i in 0..self.dim {
                out.push(overlap[i] * (2.0 * a) - v[l * self.dim + i]);
            }
        }
        out
    }

    fn walk(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.reflect(&self.select(v))
    }

    /// `|L⟩ ⊗ |n⟩` for a system vector.
    fn lift(&self, n_vec: &DVector<Complex64>) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.amps.len() * self.dim);
        for &a in &self.amps {
            for i in 0..self.dim {
                out.push(n_vec[i] * a);
            }
        }
        out
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

/// Verify the walk eigenphase relation for an explicit LCU.
pub fn walk_spectrum(terms: &[LcuTerm], lambda: f64) -> Result<WalkReport> {
    if terms.is_empty() {
        return Err(Error::DegenerateInput("walk needs at least one LCU term".into()));
    }
    let dim = terms[0].unitary.nrows();
    if terms.len() * dim > MAX_WALK_DIM {
        return Err(Error::DimensionCap {
            qubits: terms.len() * dim,
            cap: MAX_WALK_DIM,
        });
    }
    let weight_sum: f64 = terms.iter().map(|t| t.weight).sum();
    if (weight_sum - lambda).abs() > 1e-9 * lambda.max(1.0) {
        return Err(Error::DegenerateInput(format!(
            "weights sum to {weight_sum}, expected lambda = {lambda}"
        )));
    }
    for (index, term) in terms.iter().enumerate() {
        if term.weight < 0.0 {
            return Err(Error::DegenerateInput(format!(
                "negative LCU weight at term {index}"
            )));
        }
        let dev = (term.unitary.adjoint() * &term.unitary - DMatrix::identity(dim, dim))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::NonUnitaryTerm { index, dev });
        }
    }

    // assembled Hamiltonian and its eigensystem
    let mut ham = DMatrix::zeros(dim, dim);
    for term in terms {
        ham += &term.unitary * Complex64::new(term.weight, 0.0);
    }
    let herm_dev = crate::linalg::hermiticity_error(&ham);
    if herm_dev > 1e-9 {
        return Err(Error::DegenerateInput(format!(
            "LCU does not assemble to a Hermitian operator (deviation {herm_dev:.3e})"
        )));
    }
    let (energies, vectors) = hermitian_eigen_sorted(&ham);

    let walk = WalkOperator {
        terms,
        amps: terms.iter().map(|t| (t.weight / lambda).sqrt()).collect(),
        dim,
    };

    let mut max_phase_dev = 0.0f64;
    let mut max_leak = 0.0f64;
    let mut pairs = 0usize;
    for (j, &energy) in energies.iter().enumerate() {
        let n_vec = vectors.column(j).into_owned();
        let psi = walk.lift(&n_vec);
        let s_psi = walk.select(&psi);

        // orthonormal basis of span{psi, S psi}
        let mut basis: Vec<Vec<Complex64>> = vec![psi.clone()];
        let overlap = dot(&psi, &s_psi);
        let mut residual = s_psi.clone();
        for (r, &p) in residual.iter_mut().zip(psi.iter()) {
            *r -= overlap * p;
        }
        let res_norm = norm(&residual);
        if res_norm > 1e-9 {
            for r in residual.iter_mut() {
                *r /= res_norm;
            }
            basis.push(residual);
        }

        // project W onto the subspace and measure the leakage
        let k = basis.len();
        let mut block = DMatrix::zeros(k, k);
        for (col, b) in basis.iter().enumerate() {
            let w_b = walk.walk(b);
            let mut proj = vec![Complex64::new(0.0, 0.0); w_b.len()];
            for (row, b2) in basis.iter().enumerate() {
                let c = dot(b2, &w_b);
                block[(row, col)] = c;
                for (pr, &x) in proj.iter_mut().zip(b2.iter()) {
                    *pr += c * x;
                }
            }
            let leak: f64 = w_b
                .iter()
                .zip(&proj)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_leak = max_leak.max(leak);
        }

        // eigenphases of the (at most 2×2) block
        let expected = (energy / lambda).clamp(-1.0, 1.0).acos();
        let phases: Vec<f64> = if k == 1 {
            vec![block[(0, 0)].arg()]
        } else {
            let tr = block[(0, 0)] + block[(1, 1)];
            let det = block[(0, 0)] * block[(1, 1)] - block[(0, 1)] * block[(1, 0)];
            let disc = (tr * tr - det * 4.0).sqrt();
            vec![((tr + disc) * 0.5).arg(), ((tr - disc) * 0.5).arg()]
        };
        pairs += phases.len();
        for phase in phases {
            max_phase_dev = max_phase_dev.max((phase.abs() - expected).abs());
        }
    }

    Ok(WalkReport {
        lambda,
        terms: terms.len(),
        eigenphase_pairs: pairs,
        max_phase_deviation: max_phase_dev,
        max_subspace_leak: max_leak,
    })
}

/// Decompose a Hermitian operator on `qubits` qubits into weighted Pauli
/// strings with nonnegative weights (the sign is absorbed into the
/// unitary). The identity component is dropped and returned separately.
pub fn pauli_lcu(matrix: &DMatrix<Complex64>, qubits: usize) -> (Vec<LcuTerm>, f64) {
    let dim = 1usize << qubits;
    assert_eq!(matrix.nrows(), dim);
    let paulis = [
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]),
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]),
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ]),
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]),
    ];

    let mut terms = Vec::new();
    let mut identity_weight = 0.0;
    for code in 0..4usize.pow(qubits as u32) {
        // tensor product over qubits, most significant first
        let mut op = DMatrix::identity(1, 1);
        let mut c = code;
        for _ in 0..qubits {
            op = op.kronecker(&paulis[c % 4]);
            c /= 4;
        }
        let coeff = (op.adjoint() * matrix).trace() / dim as f64;
        if code == 0 {
            identity_weight = coeff.re;
            continue;
        }
        if coeff.norm() < 1e-14 {
            continue;
        }
        // Hermitian input: coefficients are real up to rounding
        let w = coeff.re;
        terms.push(LcuTerm {
            weight: w.abs(),
            unitary: if w < 0.0 { -op } else { op },
        });
    }
    (terms, identity_weight)
}

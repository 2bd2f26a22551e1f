//! Dense brute-force verification at tiny sizes: representation
//! equivalence, λ bounds, and walk eigenphases.

pub mod fock;
pub mod walk;

pub use fock::{
    assemble_df, assemble_direct, assemble_sf, assemble_sparse, assemble_thc, check_lambda_bound,
    identity_shift_deviation, DenseOperator, LambdaBoundReport, MAX_QUBITS,
};
pub use walk::{pauli_lcu, walk_spectrum, LcuTerm, WalkReport, MAX_WALK_DIM};

use crate::error::Result;
use crate::factorize::{cholesky_sf, double_factorize, synthesize_thc};
use crate::hamiltonian::KHamiltonian;
use crate::kmesh::Mesh;
use crate::lambda;

/// Outcome of the full verification suite on one instance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub mesh: [i64; 3],
    pub n_spatial: usize,
    pub seed: u64,
    /// Max deviation of each representation from the direct assembly, after
    /// removing the identity shift: (sparse, sf, df, thc).
    pub equivalence_dev: [f64; 4],
    /// λ-bound margins per representation.
    pub lambda_margins: [f64; 4],
    /// False when no factors were supplied for the thc slots.
    pub thc_checked: bool,
    pub walk_phase_deviation: f64,
    pub pass: bool,
}

/// Build a THC-sourced instance (so all four representations are exact),
/// assemble every representation, and check spectra, λ bounds, and — for
/// instances of at most two spatial orbitals in total — walk eigenphases.
pub fn verify_instance(mesh: Mesh, n_spatial: usize, seed: u64) -> Result<VerifyReport> {
    let m_rank = (n_spatial + 1).min(3);
    let thc = synthesize_thc(mesh, n_spatial, m_rank, seed);
    let ham = thc.into_hamiltonian(seed, 0.1);
    verify_hamiltonian(&ham, Some(&thc), seed)
}

/// Run the suite on an explicit Hamiltonian; the tensor-hypercontraction
/// checks need matching factors and are skipped without them.
pub fn verify_hamiltonian(
    ham: &KHamiltonian,
    thc: Option<&crate::factorize::ThcFactors>,
    seed: u64,
) -> Result<VerifyReport> {
    let direct = assemble_direct(ham)?;
    let sparse = assemble_sparse(ham)?;
    let chol = cholesky_sf(ham, 0.0)?;
    let sf = assemble_sf(ham, &chol)?;
    let df_fac = double_factorize(&chol, 0.0, false)?;
    let df = assemble_df(ham, &df_fac)?;
    let thc_op = thc.map(|fac| assemble_thc(ham, fac)).transpose()?;

    let mut equivalence_dev = [
        identity_shift_deviation(&direct.matrix, &sparse.matrix).1,
        identity_shift_deviation(&direct.matrix, &sf.matrix).1,
        identity_shift_deviation(&direct.matrix, &df.matrix).1,
        0.0,
    ];
    if let Some(op) = &thc_op {
        equivalence_dev[3] = identity_shift_deviation(&direct.matrix, &op.matrix).1;
    }

    let mut lambdas = vec![
        lambda::lambda_sparse(ham).lambda_total,
        lambda::lambda_sf(ham, &chol).lambda_total,
        lambda::lambda_df(ham, &df_fac).lambda_total,
    ];
    let mut ops = vec![&sparse, &sf, &df];
    if let (Some(op), Some(fac)) = (&thc_op, thc) {
        lambdas.push(lambda::lambda_thc(ham, fac).lambda_total);
        ops.push(op);
    }
    let mut lambda_margins = [0.0f64; 4];
    let mut bounds_ok = true;
    for (i, (op, lam)) in ops.iter().zip(&lambdas).enumerate() {
        let rep = check_lambda_bound(op, *lam);
        lambda_margins[i] = rep.margin;
        bounds_ok &= rep.pass;
    }

    // walk check on small instances via the explicit Pauli LCU
    let qubits = ham.total_spin_orbitals();
    let walk_phase_deviation = if qubits <= 4 {
        let (terms, _) = pauli_lcu(&sparse.matrix, qubits);
        if terms.is_empty() {
            0.0
        } else {
            let lam: f64 = terms.iter().map(|t| t.weight).sum();
            walk_spectrum(&terms, lam)?.max_phase_deviation
        }
    } else {
        0.0
    };

    let pass = equivalence_dev.iter().all(|&d| d <= 1e-9)
        && bounds_ok
        && walk_phase_deviation <= 1e-8;

    Ok(VerifyReport {
        mesh: ham.mesh.dims(),
        n_spatial: ham.n_spatial,
        seed,
        equivalence_dev,
        lambda_margins,
        thc_checked: thc.is_some(),
        walk_phase_deviation,
        pass,
    })
}

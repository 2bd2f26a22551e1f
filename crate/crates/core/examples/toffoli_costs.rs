//! Itemized walk-step Toffoli costs and phase-estimation totals for every
//! block encoding of one instance, including the supercell baseline.
//!
//! Run with `cargo run --example toffoli_costs`.

use kblock::costmodel::{cost_df, cost_sf, cost_sparse, CostParams};
use kblock::factorize::{cholesky_sf, double_factorize, sparsify};
use kblock::hamiltonian::generate_synthetic;
use kblock::kmesh::Mesh;
use kblock::lambda::{lambda_df, lambda_sf, lambda_sparse};

fn main() {
    let mesh = Mesh::new(1, 1, 2).unwrap();
    let ham = generate_synthetic(mesh, 2, 7, 0.2);
    let mut params = CostParams::new(ham.spin_orbitals() as u64, mesh);

    // sparse
    let entries = sparsify(&ham, 0.0);
    params.d = entries.d();
    params.lambda = lambda_sparse(&ham).lambda_total;
    let sparse = cost_sparse(&params).unwrap();

    // single factorization
    let fac = cholesky_sf(&ham, 1e-10).unwrap();
    params.m_rank = fac.m_rank() as u64;
    params.lambda = lambda_sf(&ham, &fac).lambda_total;
    let sf = cost_sf(&params).unwrap();

    // double factorization
    let df_fac = double_factorize(&fac, 1e-8, false).unwrap();
    params.xi = df_fac.xi_average().max(1.0);
    params.lambda = lambda_df(&ham, &df_fac).lambda_total;
    let df = cost_df(&params).unwrap();

    for report in [&sparse, &sf, &df] {
        println!(
            "{}: per-step {} Toffolis, {} logical qubits, {} iterations, total {}",
            report.lcu.name(),
            report.per_step_toffoli,
            report.logical_qubits,
            report.iterations,
            report.total_toffoli
        );
    }

    println!("\nitemized sparse walk step:");
    for item in &sparse.items {
        println!("  {:>8}  {}", item.toffolis, item.label);
    }
    println!("  chosen block sizes: {:?}", sparse.block_sizes);

    // the same workload folded to a Γ-point supercell costs more per step
    let folded = ham.fold_to_supercell();
    let entries_sc = sparsify(&folded, 0.0);
    let mut params_sc = CostParams::new(folded.spin_orbitals() as u64, folded.mesh);
    params_sc.d = entries_sc.d();
    params_sc.lambda = lambda_sparse(&folded).lambda_total;
    let sparse_sc = cost_sparse(&params_sc).unwrap();
    println!(
        "\nsupercell sparse step: {} Toffolis (symmetry-adapted: {})",
        sparse_sc.per_step_toffoli, sparse.per_step_toffoli
    );
}

//! L1 norms λ of all four representations on one instance, with the
//! one-/two-body split that multiplies the phase-estimation step count.
//!
//! Run with `cargo run --example lambda_norms`.

use kblock::factorize::{cholesky_sf, double_factorize, synthesize_thc};
use kblock::kmesh::Mesh;
use kblock::lambda::{lambda_df, lambda_sf, lambda_sparse, lambda_thc};

fn main() {
    let mesh = Mesh::new(1, 1, 2).unwrap();
    let thc = synthesize_thc(mesh, 2, 3, 21);
    let ham = thc.into_hamiltonian(21, 0.1);

    let chol = cholesky_sf(&ham, 1e-12).unwrap();
    let df = double_factorize(&chol, 0.0, false).unwrap();

    let reports = [
        lambda_sparse(&ham),
        lambda_sf(&ham, &chol),
        lambda_df(&ham, &df),
        lambda_thc(&ham, &thc),
    ];
    println!("{:<8} {:>12} {:>12} {:>12} {:>12}", "lcu", "one-body", "two-body", "total", "per cell");
    for r in &reports {
        println!(
            "{:<8} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            r.lcu.name(),
            r.lambda_one,
            r.lambda_two,
            r.lambda_total,
            r.lambda_per_cell
        );
    }
}

//! The four LCU data representations of one instance: thresholded sparse
//! entries, iterated Cholesky factors, truncated second factorization, and
//! synthesized tensor-hypercontraction factors.
//!
//! Run with `cargo run --example factorizations`.

use kblock::factorize::{cholesky_sf, double_factorize, sparsify, synthesize_thc};
use kblock::kmesh::Mesh;

fn max_abs_diff(
    a: &ndarray::ArrayD<num_complex::Complex64>,
    b: &ndarray::ArrayD<num_complex::Complex64>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn main() {
    let mesh = Mesh::new(1, 1, 2).unwrap();
    // source the tensor from THC factors so every route below is exact
    let thc = synthesize_thc(mesh, 2, 3, 11);
    let ham = thc.into_hamiltonian(11, 0.1);

    let entries = sparsify(&ham, 1e-4);
    println!(
        "sparse: threshold 1e-4 keeps {} two-body orbits + {} one-body entries (d = {})",
        entries.two_body.len(),
        entries.one_body.len(),
        entries.d()
    );

    let fac = cholesky_sf(&ham, 1e-10).unwrap();
    let err = max_abs_diff(&fac.reconstruct(), &ham.v);
    println!(
        "single factorization: ranks {:?} (M = {}), reconstruction error {:.2e}",
        fac.ranks(),
        fac.m_rank(),
        err
    );

    for eigtol in [0.0, 1e-4, 1e-2] {
        let df = double_factorize(&fac, eigtol, false).unwrap();
        let err = max_abs_diff(&df.reconstruct(), &ham.v);
        println!(
            "double factorization: eigtol {eigtol:.0e} keeps {} eigenvalues (avg rank {:.2}), error {:.2e}",
            df.rank_total(),
            df.xi_average(),
            err
        );
    }

    let err = max_abs_diff(&thc.reconstruct(), &ham.v);
    println!(
        "tensor hypercontraction: M = {}, norms shape {:?}, reconstruction error {:.2e}",
        thc.m_rank,
        thc.norms.shape(),
        err
    );
}

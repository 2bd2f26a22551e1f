//! Mesh-size scaling of the per-step Toffoli cost: formula-driven sweeps
//! over cubic meshes with log-log exponent fits, symmetry-adapted versus
//! supercell.
//!
//! Run with `cargo run --release --example scaling_sweep`.

use kblock::costmodel::Lcu;
use kblock::kmesh::Mesh;
use kblock::report::fit_loglog;
use kblock::sweep::{run_sweep, SweepConfig, XiModel};

fn fitted_slope(lcu: Lcu, n: u64, c_rank: u64, supercell: bool, sizes: &[i64]) -> f64 {
    let mut config = SweepConfig::new(lcu, n);
    config.supercell = supercell;
    config.c_rank = c_rank;
    config.xi_model = XiModel::Const(256.0);
    let meshes: Vec<Mesh> = sizes.iter().map(|&m| Mesh::new(m, m, m).unwrap()).collect();
    let rows = run_sweep(&config, &meshes).unwrap();
    let xs: Vec<f64> = rows.iter().map(|r| r.nk as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.per_step_toffoli as f64).collect();
    fit_loglog(&xs, &ys).unwrap().0
}

fn main() {
    let small: Vec<i64> = (2..=16).collect();
    let large: Vec<i64> = (8..=40).step_by(2).collect();

    println!("per-step Toffoli exponents in N_k (cubic meshes):");
    println!("{:<8} {:>10} {:>10} {:>8}", "lcu", "adapted", "supercell", "gap");
    for (lcu, c_rank, sizes) in [
        (Lcu::Sparse, 8, &small),
        (Lcu::Sf, 8, &small),
        (Lcu::Df, 8, &small),
        (Lcu::Thc, 1, &large),
    ] {
        let sym = fitted_slope(lcu, 8, c_rank, false, sizes);
        let sc = fitted_slope(lcu, 8, c_rank, true, sizes);
        println!(
            "{:<8} {:>10.3} {:>10.3} {:>8.3}",
            lcu.name(),
            sym,
            sc,
            sc - sym
        );
    }
    println!(
        "\n(N_k spans {}..{} for the first three rows, {}..{} for the last)",
        small[0].pow(3),
        small.last().unwrap().pow(3),
        large[0].pow(3),
        large.last().unwrap().pow(3)
    );
}

//! Per-step cost of the sparse (Pauli) block encoding.
//!
//! The walk step prepares a state over the `d` symmetry-unique nonzero
//! coefficients via coherent alias sampling (dominant lookup cost), applies
//! four selected Pauli strings, and undoes the preparation. The closed form
//! for the per-step Toffoli count is
//!
//! ```text
//!   ⌈d/k₁⌉ + m(k₁−1) + ⌈d/k₂⌉ + k₂
//!     + 6·N·N_k + 8·n_N + 12·n_k + 2ℵ + 7⌈log d⌉ − 6η + 4·b_r − 8
//! ```
//!
//! with output size `m = ℵ + 8·n_N + 6·n_k + 5`, `n_N = ⌈log(N/2)⌉`, and
//! `2^η` the largest power of two dividing `d`. The itemization below sums to
//! exactly this value; `tests::closed_form` keeps the two in lock step.

use crate::error::{Error, Result};
use crate::kmesh::ceil_log2;

use super::qroam::{equal_superposition_cost, qroam_cost, QroamMode};
use super::{CostParams, CostReport, ItemAcc, Lcu};

/// Alias-sampling lookup output width `m = ℵ + 8·n_N + 6·n_k + 5`.
pub fn output_bits(p: &CostParams) -> u64 {
    let n_n = ceil_log2(p.n / 2) as u64;
    let n_k = p.mesh.momentum_bits() as u64;
    p.aleph as u64 + 8 * n_n + 6 * n_k + 5
}

pub fn cost_sparse(p: &CostParams) -> Result<CostReport> {
    p.check_common()?;
    if p.d < 2 {
        return Err(Error::DegenerateInput(format!(
            "sparse costing needs at least 2 unique entries, got d = {}",
            p.d
        )));
    }
    let n = p.n;
    let nk_total = p.num_kpoints();
    let n_n = ceil_log2(n / 2) as i64;
    let n_k = p.mesh.momentum_bits() as i64;
    let aleph = p.aleph as i64;
    let log_d = ceil_log2(p.d) as i64;
    let m = output_bits(p);

    let mut acc = ItemAcc::new();

    let (sup, sup_clamped) = equal_superposition_cost(p.d, p.b_r)?;
    acc.push_clamped("equal superposition over entries (prepare + unprepare)", 2 * sup, sup_clamped);

    let (qr1, k1, _) = qroam_cost(p.d, m, QroamMode::Output)?;
    acc.push_u("alias-sampling lookup (ind/alt/keep output)", qr1);
    acc.block("k1", k1);

    let (qr2, k2, _) = qroam_cost(p.d, 0, QroamMode::Erase)?;
    acc.push_u("alias-sampling lookup erasure", qr2);
    acc.block("k2", k2);

    acc.push("selected Pauli strings and spin swaps", 6 * (n * nk_total) as i64 - 6);
    acc.push("inequality test and alias swap", aleph + 4 * n_n + 3 * n_k + 2);
    acc.push("symmetry swaps and momentum subtraction", 4 * n_n + 9 * n_k);
    acc.push("reflection on preparation ancillas", log_d + aleph + 6);
    acc.push_u("walk-step control by phase-estimation register", 2);
    acc.push_u("phase fixups", 3);
    // residual of the closed form over the enumerated steps
    acc.push_u("term-selection control bits", 3);

    let qubits = logical_qubits(p, m, k1)?;
    acc.finish(Lcu::Sparse, qubits, p.lambda, p.eps_pea)
}

/// `2⌈log(I+1)⌉ + N·N_k + ⌈log d⌉ + b_r + ℵ + m·k₁ + ⌈log(d/k₁)⌉ + 8`.
fn logical_qubits(p: &CostParams, m: u64, k1: u64) -> Result<u64> {
    let (iterations, _) = super::pea_total(1, p.lambda, p.eps_pea)?;
    Ok(2 * ceil_log2(iterations + 1) as u64
        + p.n * p.num_kpoints()
        + ceil_log2(p.d) as u64
        + p.b_r as u64
        + p.aleph as u64
        + m * k1
        + ceil_log2(p.d.div_ceil(k1)) as u64
        + 8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::qroam::two_adic_valuation;
    use crate::kmesh::Mesh;

    fn params(n: u64, mesh: Mesh, d: u64) -> CostParams {
        let mut p = CostParams::new(n, mesh);
        p.d = d;
        p.lambda = 50.0;
        p
    }

    /// Independent transcription of the closed-form per-step count.
    fn closed_form(p: &CostParams) -> u64 {
        let n_n = ceil_log2(p.n / 2) as i64;
        let n_k = p.mesh.momentum_bits() as i64;
        let m = (p.aleph as i64) + 8 * n_n + 6 * n_k + 5;
        let d = p.d;
        let eta = two_adic_valuation(d) as i64;
        let qrom1 = (0..=ceil_log2(d))
            .map(|lk| {
                let k = 1u64 << lk;
                (d.div_ceil(k) + m as u64 * (k - 1)) as i64
            })
            .min()
            .unwrap();
        let qrom2 = (0..=ceil_log2(d))
            .map(|lk| {
                let k = 1u64 << lk;
                (d.div_ceil(k) + k) as i64
            })
            .min()
            .unwrap();
        let rest = 6 * (p.n * p.num_kpoints()) as i64 + 8 * n_n + 12 * n_k
            + 2 * p.aleph as i64
            + 7 * ceil_log2(d) as i64
            - 6 * eta
            + 4 * p.b_r as i64
            - 8;
        (qrom1 + qrom2 + rest) as u64
    }

    #[test]
    fn itemization_matches_closed_form() {
        for (n, mesh, d) in [
            (2, Mesh::new(1, 1, 1).unwrap(), 2),
            (2, Mesh::new(1, 1, 2).unwrap(), 17),
            (8, Mesh::new(2, 2, 2).unwrap(), 20_000),
            (52, Mesh::new(3, 3, 3).unwrap(), 1_000_000),
            (8, Mesh::new(1, 3, 5).unwrap(), 4096),
        ] {
            let p = params(n, mesh, d);
            let rep = cost_sparse(&p).unwrap();
            assert_eq!(rep.per_step_toffoli, rep.items_sum());
            assert_eq!(rep.per_step_toffoli, closed_form(&p), "n={n} mesh={mesh} d={d}");
        }
    }

    #[test]
    fn per_step_increases_with_d() {
        let mesh = Mesh::new(2, 2, 2).unwrap();
        let mut last = 0;
        for d in [100, 200, 400, 800, 1600, 3200] {
            let rep = cost_sparse(&params(8, mesh, d)).unwrap();
            assert!(rep.per_step_toffoli > last, "d = {d}");
            last = rep.per_step_toffoli;
        }
    }

    #[test]
    fn rejects_degenerate_d() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        assert!(cost_sparse(&params(2, mesh, 0)).is_err());
        assert!(cost_sparse(&params(2, mesh, 1)).is_err());
    }

    #[test]
    fn total_is_iterations_times_per_step() {
        let p = params(4, Mesh::new(1, 1, 2).unwrap(), 300);
        let rep = cost_sparse(&p).unwrap();
        assert_eq!(rep.total_toffoli, rep.iterations as u128 * rep.per_step_toffoli as u128);
    }
}

//! Per-step cost of the tensor-hypercontraction block encoding.
//!
//! The walk prepares a state over central-tensor labels
//! `(Q, G1, G2, μ, ν)` — after symmetry reduction there are
//! `d = 32(N_k + 2^v)·M² + N·N_k/2` items, with `v` the number of even mesh
//! dimensions — then rotates into the non-orthogonal factor basis around
//! ladder operators. Unary iteration over the basis makes the cost linear in
//! `N·N_k` for large meshes.

use crate::error::{Error, Result};
use crate::kmesh::ceil_log2;

use super::qroam::{equal_superposition_cost, qroam_cost, QroamMode};
use super::{CostParams, CostReport, ItemAcc, Lcu};

/// Central-tensor item count `d = 32(N_k + 2^v)·M² + N·N_k/2`.
pub fn thc_item_count(p: &CostParams) -> u64 {
    let nk = p.num_kpoints();
    let v = p.mesh.even_dim_count();
    32 * (nk + (1u64 << v)) * p.m_rank * p.m_rank + p.n * nk / 2
}

/// Lookup output width `m = 2(2⌈log M⌉ + n_k + 8) + ℵ`.
pub fn output_bits(p: &CostParams) -> u64 {
    2 * (2 * ceil_log2(p.m_rank) as u64 + p.mesh.momentum_bits() as u64 + 8) + p.aleph as u64
}

/// Worst-case Toffoli count for assembling the contiguous index
/// `((((k_x·N_y + k_y)·N_z + k_z)·N_x + k'_x)·N_y + k'_y)·N_z·…·M + μ`
/// out of classically known factors (all-ones multiplicands).
pub fn contiguous_index_cost(p: &CostParams) -> u64 {
    let [nx, ny, nz] = p.mesh.dims().map(|d| d as u64);
    let nk = p.num_kpoints();
    let lg = |x: u64| ceil_log2(x) as u64;
    lg(nx) * lg(ny)
        + lg(nx * ny)
        + lg(nx * ny) * lg(nz)
        + lg(nk)
        + lg(nk) * lg(nx)
        + lg(nx * nk)
        + lg(nx * nk) * lg(ny)
        + lg(nx * ny * nk)
        + lg(nx * ny * nk) * lg(nz)
        + lg(nk * nk)
        + lg(nk * nk) * lg(p.m_rank)
        + lg(nk * nk * p.m_rank)
}

/// Minimize `2⌈a/k⌉ + 2⌈b/k⌉ + w(k−1)` over powers of two.
fn min_rot(a: u64, b: u64, w: u64) -> (u64, u64) {
    let mut best = (u64::MAX, 1);
    for lk in 0..=ceil_log2(a.max(b)) {
        let k = 1u64 << lk;
        let c = 2 * a.div_ceil(k) + 2 * b.div_ceil(k) + w * (k - 1);
        if c < best.0 {
            best = (c, k);
        }
    }
    best
}

/// Minimize `2⌈a/k⌉ + 2⌈b/k⌉ + 4k` over powers of two.
fn min_rot_erase(a: u64, b: u64) -> (u64, u64) {
    let mut best = (u64::MAX, 1);
    for lk in 0..=ceil_log2(a.max(b)) {
        let k = 1u64 << lk;
        let c = 2 * a.div_ceil(k) + 2 * b.div_ceil(k) + 4 * k;
        if c < best.0 {
            best = (c, k);
        }
    }
    best
}

pub fn cost_thc(p: &CostParams) -> Result<CostReport> {
    p.check_common()?;
    if p.m_rank < 1 {
        return Err(Error::DegenerateInput("tensor hypercontraction needs M >= 1".into()));
    }
    let nk = p.num_kpoints();
    let n = p.n;
    let n_k = p.mesh.momentum_bits() as u64;
    let n_m = ceil_log2(p.m_rank) as u64;
    let [nx, ny, nz] = p.mesh.dims().map(|d| d as u64);
    let d = thc_item_count(p);
    let m = output_bits(p);
    let aleph = p.aleph as u64;
    let br = p.b_r as u64;
    let beth = p.beth as u64;

    let mut acc = ItemAcc::new();

    acc.push_u("spin-controlled system swaps", 3 * nk * n / 2);

    let (sup, sup_clamped) = equal_superposition_cost(d, p.b_r)?;
    acc.push_clamped("equal superposition over entries (prepare + unprepare)", 2 * sup, sup_clamped);

    let (qr, k_p, _) = qroam_cost(d, m, QroamMode::Output)?;
    acc.push_u("alias-sampling lookup", qr);
    acc.block("k_p", k_p);
    let (er, k_pe, _) = qroam_cost(d, 0, QroamMode::Erase)?;
    acc.push_u("alias-sampling lookup erasure", er);
    acc.block("k_p'", k_pe);

    acc.push_u("inequality tests for alias sampling", 2 * aleph);
    acc.push_u("alias swaps", 4 * n_m + 2 * n_k + 14);
    acc.push_u("factor-label swap symmetry", 4 * n_m + 12);
    acc.push_u("momentum-negation symmetry", 2 * n_k);

    acc.push(
        "momentum superposition (4 uses)",
        4 * (nx as i64 + ny as i64 + nz as i64 + 8 * n_k as i64 + 6 * br as i64 - 24),
    );
    acc.push_u("one-body branch control", 1);

    acc.push_u("momentum-difference arithmetic", 8 * n_k);
    acc.push_u("contiguous-index arithmetic (4 uses)", 4 * contiguous_index_cost(p));

    let norm_items = nk * nk * p.m_rank;
    let (qr_nrm, k_nrm, _) = qroam_cost(norm_items, n_k + aleph, QroamMode::Output)?;
    acc.push_u("normalization lookup (2 uses)", 2 * qr_nrm);
    acc.block("k_nrm", k_nrm);
    let (er_nrm, k_era, _) = qroam_cost(norm_items, 0, QroamMode::Erase)?;
    acc.push_u("normalization lookup erasure (2 uses)", 2 * er_nrm);
    acc.block("k_era", k_era);
    acc.push_u("normalization inequality tests and swaps (4 uses)", 4 * (aleph + n_k));

    acc.push_u("second momentum-difference arithmetic and working swap", 12 * n_k);
    acc.push_u("system swaps into working registers", 4 * n * (nk - 1));

    let with_ob = nk * (p.m_rank + n / 2);
    let without_ob = nk * p.m_rank;
    let (qr_rot, k_r) = min_rot(with_ob, without_ob, 4 * n * beth);
    acc.push_u("rotation-angle lookups (4 uses)", qr_rot);
    acc.block("k_r", k_r);
    let (er_rot, k_re) = min_rot_erase(with_ob, without_ob);
    acc.push_u("rotation-angle lookup erasures (4 uses)", er_rot);
    acc.block("k_r'", k_re);
    acc.push("givens rotations (8 sequences)", 16 * n as i64 * (beth as i64 - 2));
    acc.push_u(
        "rotation contiguous registers",
        12 * nk + 4 * ceil_log2(with_ob) as u64 + 4 * ceil_log2(without_ob) as u64,
    );

    acc.push_u("one-body ladder control", 2);
    acc.push_u("unary iteration for parity strings", 4 * (nk - 1));
    acc.push_u(
        "walk reflection and phase-estimation control",
        ceil_log2(d) as u64 + 3 * aleph + 2 * n_k + 9,
    );

    let qubits = logical_qubits(p, d, m, k_p, k_nrm, k_r)?;
    acc.finish(Lcu::Thc, qubits, p.lambda, p.eps_pea)
}

/// Logical qubits with the max-of-temporaries rule: the first lookup's
/// temporary block competes with everything the inner preparations and
/// rotation lookups hold live at once.
fn logical_qubits(
    p: &CostParams,
    d: u64,
    m: u64,
    k_p: u64,
    k_nrm: u64,
    k_r: u64,
) -> Result<u64> {
    let (iterations, _) = super::pea_total(1, p.lambda, p.eps_pea)?;
    let nk = p.num_kpoints();
    let n_k = p.mesh.momentum_bits() as u64;
    let aleph = p.aleph as u64;
    let beth = p.beth as u64;
    let with_ob = nk * (p.m_rank + p.n / 2);
    let norm_items = nk * nk * p.m_rank;

    // persistent registers (system, control, reflection set, phase gradient,
    // catalytic T state, first lookup output)
    let fixed = p.n * nk
        + 2 * ceil_log2(iterations + 1) as u64 - 1
        + (ceil_log2(d) as u64 + aleph + n_k + 12)
        + beth
        + 1
        + m;
    // temporaries of the first lookup
    let first_tmp = m * (k_p - 1) + ceil_log2(d.div_ceil(k_p)) as u64 - 1;
    // registers live through the inner preparations
    let inner_fixed = 1 + 1 + (n_k + 4 * p.b_r as u64) + (n_k + ceil_log2(nk * nk * p.m_rank) as u64) + (n_k + aleph);
    // temporaries of the normalization lookup
    let norm_tmp = ((k_nrm - 1) * (n_k + aleph) + ceil_log2(norm_items.div_ceil(k_nrm)) as u64)
        .saturating_sub(1);
    // rotation stage: inequality result, contiguous register, lookup output
    let rot = (aleph + 1)
        + ceil_log2(with_ob) as u64
        + p.n * beth * k_r
        + ceil_log2(with_ob.div_ceil(k_r)) as u64
        - 1;

    Ok(fixed + first_tmp.max(inner_fixed + norm_tmp.max(rot)))
}

//! Per-step cost of the double-factorized block encoding.
//!
//! On top of the single factorization, each Hermitian one-body block is
//! eigendecomposed; the walk looks up Givens-rotation angles for the retained
//! eigenvectors and applies rotated number operators. `L = 2·N_k·M` counts
//! the (Q, n, A/B) blocks and `Ξ` is the average retained rank per block, so
//! the rotation lookup iterates over `⌈L·Ξ⌉` items (plus `N·N_k/2` one-body
//! entries) and outputs `4·N·ℶ + n_k` bits per item. That lookup dominates.

use crate::error::{Error, Result};
use crate::kmesh::ceil_log2;

use super::qroam::{qroam_cost, two_adic_valuation, QroamMode};
use super::{CostParams, CostReport, ItemAcc, Lcu};

struct DfDims {
    l: u64,         // 2·N_k·M blocks
    rank_items: u64, // ⌈L·Ξ⌉ retained eigenvalues
    one_body: u64,  // N·N_k/2 one-body entries in the same register
    n_l: u64,
    n_xi: u64,
    n_lxi: u64,
    b_p1: u64,
    b_p2: u64,
    b_o: u64,
}

fn dims(p: &CostParams) -> DfDims {
    let nk = p.num_kpoints();
    let n_k = p.mesh.momentum_bits() as u64;
    let l = 2 * nk * p.m_rank;
    let rank_items = (l as f64 * p.xi).ceil() as u64;
    let one_body = p.n * nk / 2;
    let n_l = ceil_log2(l) as u64;
    let n_xi = ceil_log2(p.xi.ceil().max(1.0) as u64) as u64;
    let n_lxi = ceil_log2(rank_items + one_body) as u64;
    DfDims {
        l,
        rank_items,
        one_body,
        n_l,
        n_xi,
        n_lxi,
        b_p1: n_l + p.aleph1 as u64,
        b_p2: n_xi + p.aleph2 as u64 + 2,
        b_o: n_k + n_xi + n_lxi + p.b_r as u64 + 1,
    }
}

/// Minimize `⌈a/k⌉ + ⌈b/k⌉ + w(k−1)` over powers of two (shared block size
/// for the two item ranges of the rotation lookup).
fn min_paired(a: u64, b: u64, w: u64) -> (u64, u64) {
    let mut best = (u64::MAX, 1);
    for lk in 0..=ceil_log2(a.max(b)) {
        let k = 1u64 << lk;
        let c = a.div_ceil(k) + b.div_ceil(k) + w * (k - 1);
        if c < best.0 {
            best = (c, k);
        }
    }
    best
}

/// Minimize `⌈a/k⌉ + ⌈b/k⌉ + 2k` over powers of two (paired erasure).
fn min_paired_erase(a: u64, b: u64) -> (u64, u64) {
    let mut best = (u64::MAX, 1);
    for lk in 0..=ceil_log2(a.max(b)) {
        let k = 1u64 << lk;
        let c = a.div_ceil(k) + b.div_ceil(k) + 2 * k;
        if c < best.0 {
            best = (c, k);
        }
    }
    best
}

pub fn cost_df(p: &CostParams) -> Result<CostReport> {
    p.check_common()?;
    if p.m_rank < 1 || p.xi < 1.0 {
        return Err(Error::DegenerateInput(
            "double factorization needs M >= 1 and Xi >= 1".into(),
        ));
    }
    let d = dims(p);
    let n_k = p.mesh.momentum_bits() as u64;
    let nn_k = p.n * p.num_kpoints();
    let br = p.b_r as u64;
    let beth = p.beth as u64;
    let eta = two_adic_valuation(d.l + 1) as i64;

    let mut acc = ItemAcc::new();

    // step 1: outer preparation over the L+1 block labels
    acc.push(
        "outer equal superposition",
        3 * d.n_l as i64 - 3 * eta + 2 * br as i64 - 9,
    );
    let (qr1, k_l, _) = qroam_cost(d.l + 1, d.b_p1, QroamMode::Output)?;
    acc.push_u("outer alias-sampling lookup", qr1);
    acc.block("k_l", k_l);
    acc.push_u("outer inequality test and alias swap", p.aleph1 as u64 + d.n_l);

    // step 2: lookup of Q and the contiguous-register offset
    let (qr_o, k_o, _) = qroam_cost(d.l + 1, d.b_o, QroamMode::Output)?;
    acc.push_u("offset and momentum lookup", qr_o);
    acc.block("k_o", k_o);

    // step 3: inner preparation over the retained eigenvalues (both passes)
    acc.push(
        "inner uniform preparation (4 uses)",
        4 * (7 * d.n_xi as i64 + 2 * br as i64 - 6),
    );
    acc.push("contiguous-register offsets (4 uses)", 4 * (d.n_lxi as i64 - 1));
    let (qr_p2, k_p2) = min_paired(d.rank_items + d.one_body, d.rank_items, 2 * d.b_p2);
    acc.push_u("inner alias-sampling lookup (both passes)", qr_p2);
    acc.block("k_p2", k_p2);
    acc.push_u(
        "inner inequality tests and alias swaps (4 uses)",
        4 * (p.aleph2 as u64 + d.n_xi),
    );

    // step 4: rotation-angle lookup, Givens rotations, spin swaps
    let (qr_r, k_r) = min_paired(d.rank_items + d.one_body, d.rank_items, 4 * p.n * beth + n_k);
    acc.push_u("rotation-angle lookup (both passes)", qr_r);
    acc.block("k_r", k_r);
    let (er_r, k_re) = min_paired_erase(d.rank_items + d.one_body, d.rank_items);
    acc.push_u("rotation-angle lookup erasure (both passes)", er_r);
    acc.block("k_r'", k_re);
    acc.push("rotation offsets (4 uses)", 4 * (d.n_lxi as i64 - 1));
    acc.push("givens rotations", 16 * p.n as i64 * (beth as i64 - 2));
    acc.push_u("spin-controlled swaps and number-operator control", 2 * nn_k + 2);

    // step 5: inverse inner preparation (both passes)
    acc.push(
        "inverse inner uniform preparation (2 uses)",
        2 * (7 * d.n_xi as i64 + 2 * br as i64 - 6),
    );
    acc.push("inverse contiguous offsets (2 uses)", 2 * (d.n_lxi as i64 - 1));
    let (er_p2, k_p2e) = min_paired_erase(d.rank_items + d.one_body, d.rank_items);
    acc.push_u("inner lookup erasure (both passes)", er_p2);
    acc.block("k_p2'", k_p2e);
    acc.push_u(
        "inverse inner inequality tests and swaps (2 uses)",
        2 * (p.aleph2 as u64 + d.n_xi),
    );

    // step 6: reflection for the amplitude amplification
    acc.push_u("amplification reflection", d.n_xi + p.aleph2 as u64 + 2);

    // step 8: invert the outer preparation and the offset lookup
    acc.push(
        "outer inverse equal superposition",
        3 * d.n_l as i64 - 3 * eta + 2 * br as i64 - 9,
    );
    let (er_l, k_le, _) = qroam_cost(d.l + 1, 0, QroamMode::Erase)?;
    acc.push_u("outer lookup erasure", er_l);
    acc.block("k_l'", k_le);
    acc.push_u("outer inverse inequality test and swap", p.aleph1 as u64 + d.n_l);
    let (er_o, k_oe, _) = qroam_cost(d.l + 1, 0, QroamMode::Erase)?;
    acc.push_u("offset lookup erasure", er_o);
    acc.block("k_o'", k_oe);

    // steps 9-11
    acc.push_u(
        "walk reflection",
        d.n_l + d.n_xi + p.aleph1 as u64 + p.aleph2 as u64 + 1,
    );
    acc.push_u("walk-step control by phase-estimation register", 2);
    acc.push_u("working-register swaps and momentum subtraction", 4 * nn_k + 12 * n_k);

    let qubits = logical_qubits(p, &d, k_r)?;
    acc.finish(Lcu::Df, qubits, p.lambda, p.eps_pea)
}

/// Logical qubits, dominated by the rotation-angle lookup output.
///
/// Itemized as: phase-estimation control `2⌈log(I+1)⌉ − 1`; system `N·N_k`;
/// outer register with keep/rotation/success bits `n_L + ℵ₁ + 3`; momentum
/// registers `2·n_k`; contiguous offset `n_{L,Ξ}`; inner register with keep
/// bits `n_Ξ + ℵ₂ + 2`; `N` working qubits; phase gradient `b_r`; lookup
/// output and remnant `(4Nℶ + n_k)·k_r + ⌈log((LΞ + N·N_k/2)/k_r)⌉`.
fn logical_qubits(p: &CostParams, d: &DfDims, k_r: u64) -> Result<u64> {
    let (iterations, _) = super::pea_total(1, p.lambda, p.eps_pea)?;
    let n_k = p.mesh.momentum_bits() as u64;
    Ok(2 * ceil_log2(iterations + 1) as u64 - 1
        + p.n * p.num_kpoints()
        + d.n_l + p.aleph1 as u64 + 3
        + 2 * n_k
        + d.n_lxi
        + d.n_xi + p.aleph2 as u64 + 2
        + p.n
        + p.b_r as u64
        + (4 * p.n * p.beth as u64 + n_k) * k_r
        + ceil_log2((d.rank_items + d.one_body).div_ceil(k_r)) as u64)
}

//! Per-step cost of the single-factorized block encoding.
//!
//! The walk prepares an outer state over the `M·N_k + 1` factorization
//! indices (the `+1` holds the one-body term), then block encodes two
//! Hermitian one-body operators twice each with a reflection in between
//! (oblivious amplitude amplification). Each inner block encoding prepares a
//! state over `L̄ = N_k·N²/2` coefficient labels through a two-register
//! lookup, which dominates the cost.

use crate::error::{Error, Result};
use crate::kmesh::ceil_log2;

use super::qroam::{equal_superposition_cost, qroam2_cost, qroam2_erase_cost, qroam_cost, QroamMode};
use super::{CostParams, CostReport, ItemAcc, Lcu};

/// Index sizes shared by the Toffoli and qubit costings.
struct SfDims {
    outer_items: u64, // M·N_k + 1
    l_bar: u64,       // N_k·N²/2 inner coefficient labels
    n_mn: u64,
    n_l: u64,
    b_mn: u64, // outer lookup output width
    b_p: u64,  // inner lookup output width
}

fn dims(p: &CostParams) -> SfDims {
    let nk = p.num_kpoints();
    let n_k = p.mesh.momentum_bits() as u64;
    let n_n = ceil_log2(p.n / 2) as u64;
    let outer_items = p.m_rank * nk + 1;
    let l_bar = nk * p.n * p.n / 2;
    let n_mn = ceil_log2(outer_items) as u64;
    SfDims {
        outer_items,
        l_bar,
        n_mn,
        n_l: ceil_log2(l_bar) as u64,
        b_mn: p.aleph1 as u64 + n_mn + 2 * n_k + 2,
        b_p: 2 * n_k + 4 * n_n + p.aleph2 as u64 + 3,
    }
}

pub fn cost_sf(p: &CostParams) -> Result<CostReport> {
    p.check_common()?;
    if p.m_rank < 1 {
        return Err(Error::DegenerateInput("single factorization needs M >= 1".into()));
    }
    let d = dims(p);
    let n_k = p.mesh.momentum_bits() as u64;
    let n_n = ceil_log2(p.n / 2) as u64;
    let n_m = ceil_log2(p.m_rank) as u64;
    let nn_k = p.n * p.num_kpoints();

    let mut acc = ItemAcc::new();

    // outer preparation over (Q, n) plus the one-body slot
    acc.push(
        "outer equal superposition",
        3 * d.n_mn as i64 + 2 * p.b_r as i64 - 9,
    );
    let (qr_mn, k_mn, _) = qroam_cost(d.outer_items, d.b_mn, QroamMode::Output)?;
    acc.push_u("outer alias-sampling lookup", qr_mn);
    acc.block("k_mn", k_mn);
    acc.push_u("outer inequality test", p.aleph1 as u64);
    acc.push_u("outer alias swap", n_k + n_m + 1);

    // inner preparation over (k, p, q, re/im); prepared and unprepared in each
    // of the two block-encoding passes
    let (sup, sup_clamped) = equal_superposition_cost(d.l_bar, p.b_r)?;
    acc.push_clamped("inner equal superposition (4 uses)", 4 * sup, sup_clamped);

    let (qr_p_a, kp1, kp2) = qroam2_cost(d.outer_items, d.l_bar, d.b_p)?;
    acc.push_u("inner two-register lookup (first pass)", qr_p_a);
    acc.block("k_p1", kp1);
    acc.block("k_p2", kp2);
    let (qr_p_b, kp1b, kp2b) = qroam2_cost(d.outer_items - 1, d.l_bar, d.b_p)?;
    acc.push_u("inner two-register lookup (second pass)", qr_p_b);
    acc.block("k_p1'", kp1b);
    acc.block("k_p2'", kp2b);

    let (er_a, ke1, ke2) = qroam2_erase_cost(d.outer_items, d.l_bar)?;
    acc.push_u("inner lookup erasure (first pass)", er_a);
    acc.block("k_e1", ke1);
    acc.block("k_e2", ke2);
    let (er_b, ke1b, ke2b) = qroam2_erase_cost(d.outer_items - 1, d.l_bar)?;
    acc.push_u("inner lookup erasure (second pass)", er_b);
    acc.block("k_e1'", ke1b);
    acc.block("k_e2'", ke2b);

    acc.push_u("inner inequality tests (4 uses)", 4 * p.aleph2 as u64);
    acc.push_u("inner alias swaps (4 uses)", 4 * (n_k + 2 * n_n + 1));
    acc.push_u("momentum subtraction (4 uses)", 16 * n_k);

    // two selected Pauli-string applications with spin swaps
    acc.push("selected Pauli strings and spin swaps (2 passes)", 6 * nn_k as i64 - 6);
    acc.push_u("one-body control of second pass", 4);

    acc.push_u(
        "amplification reflection",
        d.n_l + p.aleph2 as u64 + 5,
    );

    // outer inverse preparation
    acc.push(
        "outer inverse equal superposition",
        3 * d.n_mn as i64 + 2 * p.b_r as i64 - 9,
    );
    let (er_mn, k_el, _) = qroam_cost(d.outer_items, 0, QroamMode::Erase)?;
    acc.push_u("outer lookup erasure", er_mn);
    acc.block("k_l'", k_el);
    acc.push_u("outer inverse inequality test", p.aleph1 as u64);
    acc.push_u("outer inverse alias swap", n_k + n_m + 1);

    acc.push_u(
        "walk reflection",
        d.n_mn + d.n_l + p.aleph1 as u64 + p.aleph2 as u64 + 4,
    );
    acc.push_u("walk-step control by phase-estimation register", 2);

    let qubits = logical_qubits(p, &d, kp1, kp2)?;
    acc.finish(Lcu::Sf, qubits, p.lambda, p.eps_pea)
}

fn logical_qubits(p: &CostParams, d: &SfDims, kp1: u64, kp2: u64) -> Result<u64> {
    let (iterations, _) = super::pea_total(1, p.lambda, p.eps_pea)?;
    let n_k = p.mesh.momentum_bits() as u64;
    Ok(2 * ceil_log2(iterations) as u64
        + p.n * p.num_kpoints()
        + d.n_mn
        + d.n_l
        + 2 * n_k
        + 2 * ceil_log2(p.m_rank) as u64
        + 2 * p.aleph1 as u64
        + p.aleph2 as u64
        + p.b_r as u64
        + 9
        + d.b_p * kp1 * kp2
        + ceil_log2(d.outer_items.div_ceil(kp1)) as u64
        + ceil_log2(d.l_bar.div_ceil(kp2)) as u64)
}

//! Surface-code translation of logical resource counts under the frozen
//! default operating point (0.01% physical error, 1 µs cycle, four
//! factories).
//!
//! Run with `cargo run --example physical_estimate`.

use kblock::physical::{estimate_physical, PhysicalParams};

fn main() {
    let params = PhysicalParams::default();
    println!(
        "profile: p = {:.0e}, cycle = {:.0e} s, {} factories, budget {}",
        params.p_phys, params.cycle_seconds, params.factories, params.failure_budget
    );
    println!(
        "{:>14} {:>10} {:>10} {:>16} {:>14}",
        "toffolis", "logical", "distance", "physical qubits", "runtime"
    );

    // representative diamond-scale workloads, smallest to largest
    let cases: [(f64, u64); 5] = [
        (9.61e8, 2396),
        (4.84e9, 2478),
        (6.74e10, 18_693),
        (2.66e12, 75_287),
        (1.13e15, 47_665),
    ];
    for (toffolis, logical) in cases {
        let rep = estimate_physical(toffolis as u128, logical, &params).unwrap();
        println!(
            "{toffolis:>14.2e} {logical:>10} {:>10} {:>16.3e} {:>11.2} days",
            rep.code_distance, rep.physical_qubits, rep.runtime_days
        );
    }
}

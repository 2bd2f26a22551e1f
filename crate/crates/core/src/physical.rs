//! Surface-code translation of logical resource counts.
//!
//! Maps (total Toffoli count, logical qubit count) to a code distance,
//! physical qubit count, and wall-clock runtime under a frozen model
//! profile. The default profile assumes a physical error rate of 0.01%, a
//! 1 µs cycle, and four Toffoli factories; its remaining constants were
//! tuned once against published full-stack estimates for diamond and then
//! frozen (every tabulated row lands within a factor of two).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operating point and model constants for the surface-code translation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalParams {
    /// Physical error rate per operation.
    pub p_phys: f64,
    /// Surface-code cycle time in seconds.
    pub cycle_seconds: f64,
    /// Number of Toffoli (CCZ) factories running in parallel.
    pub factories: u32,
    /// Error-suppression threshold; logical error per qubit per cycle is
    /// `a·(p/p_th)^((d+1)/2)`.
    pub p_threshold: f64,
    /// Prefactor `a` in the logical-error model.
    pub error_prefactor: f64,
    /// Total tolerated logical failure probability for the whole run.
    pub failure_budget: f64,
    /// Cycles per produced Toffoli state per factory; consumption is
    /// pipelined across factories, so one Toffoli takes
    /// `factory_cycles_per_distance · d / factories` cycles.
    pub factory_cycles_per_distance: f64,
    /// Physical qubits per logical qubit, in units of `2d²` tiles.
    pub routing_overhead: f64,
    /// Footprint of one factory, in `2d²` tiles.
    pub factory_tiles: f64,
    /// Largest code distance considered before declaring the run infeasible.
    pub max_distance: u32,
}

impl Default for PhysicalParams {
    fn default() -> PhysicalParams {
        PhysicalParams {
            p_phys: 1e-4,
            cycle_seconds: 1e-6,
            factories: 4,
            p_threshold: 1e-2,
            error_prefactor: 0.1,
            failure_budget: 0.5,
            factory_cycles_per_distance: 5.0,
            routing_overhead: 2.0,
            factory_tiles: 36.0,
            max_distance: 51,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_phys > 0.0 && self.p_phys < self.p_threshold) {
            return Err(Error::DegenerateInput(format!(
                "physical error rate {} must sit below the threshold {}",
                self.p_phys, self.p_threshold
            )));
        }
        if self.cycle_seconds <= 0.0 || self.factories == 0 {
            return Err(Error::DegenerateInput(
                "cycle time must be positive and at least one factory is needed".into(),
            ));
        }
        Ok(())
    }

    /// Logical error probability per logical qubit per code cycle.
    fn logical_error_rate(&self, distance: u32) -> f64 {
        self.error_prefactor * (self.p_phys / self.p_threshold).powf((distance as f64 + 1.0) / 2.0)
    }

    /// Cycles consumed per Toffoli at the given distance.
    fn cycles_per_toffoli(&self, distance: u32) -> f64 {
        self.factory_cycles_per_distance * distance as f64 / self.factories as f64
    }
}

/// Surface-code estimate for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhysicalReport {
    pub code_distance: u32,
    pub physical_qubits: f64,
    pub runtime_days: f64,
    pub total_cycles: f64,
    pub logical_failure: f64,
}

/// Choose the smallest odd distance whose total logical failure fits the
/// budget, then translate footprint and runtime.
pub fn estimate_physical(
    toffolis: u128,
    logical_qubits: u64,
    params: &PhysicalParams,
) -> Result<PhysicalReport> {
    params.validate()?;
    if toffolis == 0 || logical_qubits == 0 {
        return Err(Error::DegenerateInput(
            "physical estimate needs at least one Toffoli and one logical qubit".into(),
        ));
    }
    let toffolis = toffolis as f64;
    let mut distance = None;
    let mut d = 3;
    while d <= params.max_distance {
        let cycles = toffolis * params.cycles_per_toffoli(d);
        let failure = params.logical_error_rate(d) * logical_qubits as f64 * cycles;
        if failure <= params.failure_budget {
            distance = Some((d, cycles, failure));
            break;
        }
        d += 2;
    }
    let (code_distance, total_cycles, logical_failure) = distance.ok_or(Error::NoFeasibleDistance {
        max_distance: params.max_distance,
    })?;

    let tile = 2.0 * (code_distance as f64).powi(2);
    let physical_qubits = params.routing_overhead * logical_qubits as f64 * tile
        + params.factories as f64 * params.factory_tiles * tile;
    let runtime_days = total_cycles * params.cycle_seconds / 86_400.0;

    Ok(PhysicalReport {
        code_distance,
        physical_qubits,
        runtime_days,
        total_cycles,
        logical_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Published diamond estimates: (toffolis, logical qubits,
    /// physical qubits, runtime in days). All rows must reproduce within a
    /// factor of two under the single default profile.
    #[allow(clippy::approx_constant)] // 3.14 is a runtime in days
    pub const DIAMOND_ROWS: [(&str, f64, u64, f64, f64); 11] = [
        ("sparse [1,1,1]", 4.84e9, 2478, 2.20e6, 0.910),
        ("sparse [2,2,2]", 2.66e12, 75_287, 90.57e6, 577.0),
        ("sparse [3,3,3]", 1.06e14, 374_274, 543.76e6, 2.61e4),
        ("sf [1,1,1]", 3.20e9, 2283, 2.05e6, 0.602),
        ("sf [2,2,2]", 3.27e12, 20_567, 24.91e6, 711.0),
        ("sf [3,3,3]", 1.13e15, 47_665, 69.52e6, 3.10e5),
        ("df [1,1,1]", 9.61e8, 2396, 1.55e6, 0.181),
        ("df [2,2,2]", 6.74e10, 18_693, 18.47e6, 12.7),
        ("df [3,3,3]", 1.09e12, 68_470, 82.39e6, 237.0),
        ("thc [1,1,1]", 1.67e10, 18_095, 14.20e6, 3.14),
        ("thc [2,2,2]", 4.85e11, 36_393, 35.60e6, 105.0),
    ];

    #[test]
    fn diamond_rows_within_factor_two() {
        let params = PhysicalParams::default();
        for (name, toff, logical, want_phys, want_days) in DIAMOND_ROWS {
            let rep = estimate_physical(toff as u128, logical, &params).unwrap();
            let qr = rep.physical_qubits / want_phys;
            let tr = rep.runtime_days / want_days;
            assert!(
                qr > 0.5 && qr < 2.0,
                "{name}: physical qubits {:.3e} vs {want_phys:.3e} (ratio {qr:.2})",
                rep.physical_qubits
            );
            assert!(
                tr > 0.5 && tr < 2.0,
                "{name}: runtime {:.3} vs {want_days:.3} days (ratio {tr:.2})",
                rep.runtime_days
            );
        }
    }

    #[test]
    fn spec_calibration_rows() {
        let params = PhysicalParams::default();
        let rep = estimate_physical(4_840_000_000, 2478, &params).unwrap();
        assert!((rep.physical_qubits / 2.20e6 - 1.0).abs() < 1.0);
        assert!((rep.runtime_days / 0.910 - 1.0).abs() < 1.0);

        let rep = estimate_physical(67_400_000_000, 18_693, &params).unwrap();
        assert!((rep.physical_qubits / 18.47e6 - 1.0).abs() < 1.0);
        assert!((rep.runtime_days / 12.7 - 1.0).abs() < 1.0);
    }

    #[test]
    fn runtime_linear_in_toffolis_at_fixed_distance() {
        let params = PhysicalParams::default();
        let a = estimate_physical(1_000_000_000, 10, &params).unwrap();
        let b = estimate_physical(10_000_000_000, 10, &params).unwrap();
        assert_eq!(a.code_distance, b.code_distance);
        assert!((b.runtime_days / a.runtime_days - 10.0).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_inputs() {
        let params = PhysicalParams::default();
        let base = estimate_physical(1_000_000_000, 1000, &params).unwrap();
        let more_t = estimate_physical(2_000_000_000, 1000, &params).unwrap();
        let more_q = estimate_physical(1_000_000_000, 2000, &params).unwrap();
        assert!(more_t.runtime_days >= base.runtime_days);
        assert!(more_q.physical_qubits >= base.physical_qubits);
    }

    #[test]
    fn infeasible_when_budget_is_tiny() {
        let mut params = PhysicalParams::default();
        params.failure_budget = 1e-30;
        params.max_distance = 11;
        let err = estimate_physical(u64::MAX as u128, 1 << 40, &params);
        assert!(matches!(err, Err(Error::NoFeasibleDistance { .. })));
    }
}

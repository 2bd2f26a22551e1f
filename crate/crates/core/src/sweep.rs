//! Formula-driven cost sweeps over mesh sizes.
//!
//! Sweeps evaluate the per-step cost formulas on synthetic workload models
//! so the asymptotic mesh-size scaling of each block encoding can be read
//! off a log-log fit (real factorizations at thousands of k-points are not
//! materializable). The models fix the basis size `N` and scale the
//! representation-size inputs the way the factorizations do:
//!
//! * sparse: `d ∝ N_k³` symmetry-unique entries (`∝ N_k⁴` for a supercell);
//! * SF / DF / THC: auxiliary rank `M = c_rank·N/2`, independent of the
//!   mesh, with a configurable average-rank model for DF.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costmodel::{cost_df, cost_sf, cost_sparse, cost_thc, CostParams, CostReport, Lcu};
use crate::error::Result;
use crate::kmesh::Mesh;

/// Average-rank model for DF sweeps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum XiModel {
    /// `Ξ` held constant across the sweep.
    Const(f64),
    /// `Ξ = c·N_k` (rank growing with the transfer count).
    PerKpoint(f64),
}

impl XiModel {
    pub fn value(&self, nk: u64) -> f64 {
        match self {
            XiModel::Const(c) => *c,
            XiModel::PerKpoint(c) => c * nk as f64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lcu: Lcu,
    pub n: u64,
    pub supercell: bool,
    pub xi_model: XiModel,
    /// Auxiliary rank parameter: `M = c_rank · N / 2`.
    pub c_rank: u64,
    pub aleph: u32,
    pub b_r: u32,
    pub beth: u32,
    pub eps_pea: f64,
}

impl SweepConfig {
    pub fn new(lcu: Lcu, n: u64) -> SweepConfig {
        SweepConfig {
            lcu,
            n,
            supercell: false,
            xi_model: XiModel::Const(256.0),
            c_rank: 8,
            aleph: 10,
            b_r: 7,
            beth: 20,
            eps_pea: 0.0016,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lcu: Lcu,
    pub dims: [i64; 3],
    pub nk: u64,
    pub n: u64,
    pub per_step_toffoli: u64,
    pub qubits: u64,
    pub lambda: f64,
    pub iterations: u64,
    pub total_toffoli: u128,
}

/// Synthetic sparse entry counts: `N_k³` symmetry-unique blocks of `(N/2)⁴`
/// coefficients with fourfold deduplication; the supercell variant loses the
/// factor `N_k` of translational redundancy.
fn sparse_d_model(nk: u64, n: u64, supercell: bool) -> u64 {
    let orbital_block = (n / 2).pow(4).max(1);
    if supercell {
        2 * (nk.pow(4) * orbital_block).div_ceil(8)
    } else {
        2 * (nk.pow(3) * orbital_block).div_ceil(4)
    }
}

/// Simple intensive-λ model: λ grows linearly with the cell count.
fn lambda_model(nk: u64, n: u64) -> f64 {
    0.05 * (n * n) as f64 * nk as f64
}

fn params_for(config: &SweepConfig, mesh: Mesh) -> CostParams {
    let nk = mesh.num_kpoints() as u64;
    let mut p = CostParams::new(config.n, mesh);
    p.aleph = config.aleph;
    p.aleph1 = config.aleph;
    p.aleph2 = config.aleph;
    p.b_r = config.b_r;
    p.beth = config.beth;
    p.eps_pea = config.eps_pea;
    p.m_rank = (config.c_rank * config.n).div_ceil(2).max(1);
    p.xi = config.xi_model.value(nk).max(1.0);
    p.d = sparse_d_model(nk, config.n, false);
    p.lambda = lambda_model(nk, config.n);

    if config.supercell {
        // same workload folded into one Γ-point cell
        let d_sc = sparse_d_model(nk, config.n, true);
        let xi_sc = p.xi;
        let lambda_sc = p.lambda;
        p = p.to_supercell(d_sc, xi_sc, lambda_sc);
    }
    p
}

pub fn evaluate_point(config: &SweepConfig, mesh: Mesh) -> Result<CostReport> {
    let p = params_for(config, mesh);
    match config.lcu {
        Lcu::Sparse => cost_sparse(&p),
        Lcu::Sf => cost_sf(&p),
        Lcu::Df => cost_df(&p),
        Lcu::Thc => cost_thc(&p),
    }
}

/// Evaluate the sweep; points are independent, so they run in parallel and
/// are collected back in mesh order.
pub fn run_sweep(config: &SweepConfig, meshes: &[Mesh]) -> Result<Vec<SweepRow>> {
    meshes
        .par_iter()
        .map(|&mesh| {
            let nk = mesh.num_kpoints() as u64;
            let report = evaluate_point(config, mesh)?;
            Ok(SweepRow {
                lcu: config.lcu,
                dims: mesh.dims(),
                nk,
                n: config.n,
                per_step_toffoli: report.per_step_toffoli,
                qubits: report.logical_qubits,
                lambda: lambda_model(nk, config.n),
                iterations: report.iterations,
                total_toffoli: report.total_toffoli,
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str =
    "lcu,Nx,Ny,Nz,Nk,N,per_step_toffoli,qubits,lambda,iterations,total_toffoli";

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.lcu.name(),
            r.dims[0],
            r.dims[1],
            r.dims[2],
            r.nk,
            r.n,
            r.per_step_toffoli,
            r.qubits,
            r.lambda,
            r.iterations,
            r.total_toffoli
        ));
    }
    out
}

/// Parse a `;`-separated list of comma-separated mesh dimensions, e.g.
/// `"2,2,2;3,3,3;4,4,4"`.
pub fn parse_mesh_list(text: &str) -> Result<Vec<Mesh>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|part| {
            let dims: Vec<i64> = part
                .trim()
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| crate::error::Error::Data(format!("mesh '{part}': {e}")))
                })
                .collect::<Result<_>>()?;
            if dims.len() != 3 {
                return Err(crate::error::Error::Data(format!(
                    "mesh '{part}' needs exactly three dimensions"
                )));
            }
            Mesh::new(dims[0], dims[1], dims[2])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic_meshes(range: std::ops::RangeInclusive<i64>) -> Vec<Mesh> {
        range.map(|n| Mesh::new(n, n, n).unwrap()).collect()
    }

    #[test]
    fn rows_are_monotone_in_mesh_size() {
        for lcu in Lcu::ALL {
            let config = SweepConfig::new(lcu, 8);
            let rows = run_sweep(&config, &cubic_meshes(2..=5)).unwrap();
            for pair in rows.windows(2) {
                assert!(
                    pair[1].per_step_toffoli >= pair[0].per_step_toffoli,
                    "{lcu:?}: {} then {}",
                    pair[0].per_step_toffoli,
                    pair[1].per_step_toffoli
                );
            }
        }
    }

    #[test]
    fn mesh_list_parsing() {
        let meshes = parse_mesh_list("2,2,2;3,3,3; 4,4,4").unwrap();
        assert_eq!(meshes.len(), 3);
        assert_eq!(meshes[2].num_kpoints(), 64);
        assert!(parse_mesh_list("2,2").is_err());
        assert!(parse_mesh_list("a,b,c").is_err());
    }

    #[test]
    fn csv_shape() {
        let config = SweepConfig::new(Lcu::Df, 4);
        let rows = run_sweep(&config, &cubic_meshes(2..=4)).unwrap();
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("lcu,"));
    }
}

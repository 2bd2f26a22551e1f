//! Command-line pipeline: generation, factorization, λ, costs, physical
//! translation, sweeps, verification, and exponent reports.
//!
//! Every artifact embeds the format version, a hash of the parsed
//! configuration, and the seed where one applies, so identical invocations
//! produce byte-identical outputs. Exit codes: 0 success, 1 verification
//! failure, 2 usage error, 3 data error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::costmodel::{self, CostParams, CostReport, Lcu};
use crate::error::{Error, Result};
use crate::factorize::{self, cholesky_sf, double_factorize, sparsify, synthesize_thc};
use crate::hamiltonian::{generate_synthetic, KHamiltonian};
use crate::io;
use crate::kmesh::Mesh;
use crate::lambda::{lambda_df, lambda_sf, lambda_sparse, lambda_thc, LambdaReport};
use crate::oracle;
use crate::physical::{estimate_physical, PhysicalParams};
use crate::report;
use crate::sweep::{self, SweepConfig, XiModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_DATA: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "kblock",
    version,
    about = "Resource estimation for qubitized k-point electronic-structure simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic Hamiltonian instance
    Gen(GenArgs),
    /// Factorize a stored Hamiltonian
    Factor(FactorArgs),
    /// Compute the L1 norm of one representation
    Lambda(LambdaArgs),
    /// Itemized per-step and total Toffoli costs for one representation
    Cost(CostArgs),
    /// Surface-code translation of logical counts
    Phys(PhysArgs),
    /// Formula-driven cost sweep over mesh sizes
    Sweep(SweepArgs),
    /// Dense verification suite (equivalence, λ bounds, walk phases)
    Verify(VerifyArgs),
    /// Merge sweep CSVs and fit log-log exponents
    Report(ReportArgs),
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    /// Mesh dimensions, e.g. 1,1,2
    #[arg(long, default_value = "1,1,1")]
    mesh: String,
    /// Spatial orbitals per cell
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Locality decay rate of the synthetic magnitudes
    #[arg(long, default_value_t = 0.2)]
    decay: f64,
    /// Source the two-body tensor from synthesized THC factors of this rank
    /// (the factors are stored alongside the instance)
    #[arg(long)]
    thc_rank: Option<usize>,
    #[serde(skip)]
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct FactorArgs {
    #[arg(long)]
    method: Lcu,
    #[arg(short, long)]
    input: PathBuf,
    #[serde(skip)]
    #[arg(short, long)]
    output: PathBuf,
    /// Sparse coefficient threshold
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Cholesky reconstruction tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Eigenvalue cutoff of the second factorization
    #[arg(long, default_value_t = 1e-8)]
    eigtol: f64,
    /// Interpret the eigenvalue cutoff relative to each block maximum
    #[arg(long, default_value_t = false)]
    relative: bool,
}

#[derive(Args, Debug, Serialize)]
struct LambdaArgs {
    #[arg(long)]
    lcu: Lcu,
    #[arg(short, long)]
    input: PathBuf,
    /// Factor directory (required for thc; recomputed when omitted for sf/df)
    #[arg(long)]
    factors: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0.0)]
    eigtol: f64,
    #[serde(skip)]
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CostArgs {
    #[arg(long)]
    lcu: Lcu,
    #[arg(short, long)]
    input: PathBuf,
    /// Cost the equivalent Γ-point supercell instead
    #[arg(long, default_value_t = false)]
    supercell: bool,
    #[arg(long)]
    factors: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0.0)]
    eigtol: f64,
    /// Phase-estimation precision in Hartree
    #[arg(long, default_value_t = 0.0016)]
    eps: f64,
    #[arg(long, default_value_t = 10)]
    aleph: u32,
    #[arg(long, default_value_t = 7)]
    br: u32,
    #[arg(long, default_value_t = 20)]
    beth: u32,
    #[serde(skip)]
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Append a one-row CSV record here
    #[serde(skip)]
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PhysArgs {
    #[arg(long)]
    toffoli: f64,
    #[arg(long)]
    logical: u64,
    /// JSON model profile overriding the frozen default
    #[arg(long)]
    profile: Option<PathBuf>,
    #[serde(skip)]
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long)]
    lcu: Lcu,
    /// Semicolon-separated meshes, e.g. 2,2,2;3,3,3;4,4,4
    #[arg(long)]
    meshes: String,
    #[arg(long, default_value_t = 8)]
    n: u64,
    #[arg(long, default_value_t = false)]
    supercell: bool,
    /// Constant average-rank model for DF
    #[arg(long, default_value_t = 256.0)]
    xi: f64,
    /// Average rank grows as xi·N_k instead of staying constant
    #[arg(long, default_value_t = false)]
    xi_per_kpoint: bool,
    /// Auxiliary rank parameter: M = c_rank·N/2
    #[arg(long, default_value_t = 8)]
    c_rank: u64,
    #[serde(skip)]
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Verify a stored instance instead of a synthetic one
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(long)]
    factors: Option<PathBuf>,
    #[arg(long, default_value = "1,1,2")]
    mesh: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// Sweep CSV files to merge
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "Nk")]
    x_col: String,
    #[arg(long, default_value = "per_step_toffoli")]
    y_col: String,
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[serde(skip)]
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    format_version: u32,
    command: String,
    config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    result: T,
}

fn config_hash<T: Serialize>(command: &str, args: &T) -> String {
    let bytes =
        serde_json::to_vec(&(command, args)).expect("argument structs always serialize");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_json<T: Serialize>(
    path: Option<&Path>,
    command: &str,
    hash: &str,
    seed: Option<u64>,
    result: T,
) -> Result<()> {
    let envelope = Envelope {
        format_version: io::FORMAT_VERSION,
        command: command.to_string(),
        config_hash: hash.to_string(),
        seed,
        result,
    };
    let json = serde_json::to_string_pretty(&envelope)? + "\n";
    if let Some(path) = path {
        std::fs::write(path, json)?;
    } else {
        print!("{json}");
    }
    Ok(())
}

fn parse_mesh(text: &str) -> Result<Mesh> {
    let meshes = sweep::parse_mesh_list(text)?;
    match meshes.as_slice() {
        [one] => Ok(*one),
        _ => Err(Error::Data(format!("expected one mesh, got '{text}'"))),
    }
}

/// Parse and run; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(argv);
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::VerificationFailed(_) => EXIT_VERIFY,
                _ => EXIT_DATA,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Factor(args) => cmd_factor(args),
        Command::Lambda(args) => cmd_lambda(args),
        Command::Cost(args) => cmd_cost(args),
        Command::Phys(args) => cmd_phys(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let mesh = parse_mesh(&args.mesh)?;
    let hash = config_hash("gen", &args);
    let ham = match args.thc_rank {
        Some(m_rank) => {
            let thc = synthesize_thc(mesh, args.n, m_rank, args.seed);
            io::write_thc(&args.output.join("thc_factors"), &thc, Some(hash.clone()))?;
            thc.into_hamiltonian(args.seed, args.decay)
        }
        None => generate_synthetic(mesh, args.n, args.seed, args.decay),
    };
    io::write_hamiltonian(&args.output, &ham, Some(args.seed), Some(hash))?;
    println!(
        "gen mesh={} n={} seed={} spin_orbitals={} -> {}",
        mesh,
        args.n,
        args.seed,
        ham.total_spin_orbitals(),
        args.output.display()
    );
    Ok(EXIT_OK)
}

fn cmd_factor(args: FactorArgs) -> Result<i32> {
    let ham = io::read_hamiltonian(&args.input)?;
    let hash = config_hash("factor", &args);
    match args.method {
        Lcu::Sparse => {
            let entries = sparsify(&ham, args.threshold);
            io::write_sparse(&args.output, &entries, Some(hash))?;
            println!(
                "factor sparse threshold={} d={} -> {}",
                args.threshold,
                entries.d(),
                args.output.display()
            );
        }
        Lcu::Sf => {
            let fac = cholesky_sf(&ham, args.tol)?;
            io::write_cholesky(&args.output, &fac, Some(hash))?;
            println!(
                "factor sf tol={} M={} -> {}",
                args.tol,
                fac.m_rank(),
                args.output.display()
            );
        }
        Lcu::Df => {
            // stored as the underlying Gram factors; the eigensystems are
            // recomputed deterministically by consumers
            let fac = cholesky_sf(&ham, args.tol)?;
            let df = double_factorize(&fac, args.eigtol, args.relative)?;
            io::write_cholesky(&args.output, &fac, Some(hash))?;
            println!(
                "factor df tol={} eigtol={} M={} Xi={:.3} -> {}",
                args.tol,
                args.eigtol,
                df.m_rank,
                df.xi_average(),
                args.output.display()
            );
        }
        Lcu::Thc => {
            let dir = args.input.join("thc_factors");
            if !dir.join("manifest.json").exists() {
                return Err(Error::Data(
                    "thc factors are ingested, not fitted: generate the instance with \
                     `gen --thc-rank` or place factors under <input>/thc_factors"
                        .into(),
                ));
            }
            let thc = io::read_thc(&dir)?;
            io::write_thc(&args.output, &thc, Some(hash))?;
            println!(
                "factor thc M={} -> {}",
                thc.m_rank,
                args.output.display()
            );
        }
    }
    Ok(EXIT_OK)
}

fn thc_factors_for(
    input: &Path,
    explicit: Option<&Path>,
) -> Result<factorize::ThcFactors> {
    let dir = match explicit {
        Some(dir) => dir.to_path_buf(),
        None => input.join("thc_factors"),
    };
    if !dir.join("manifest.json").exists() {
        return Err(Error::Data(format!(
            "no THC factors at {}; they are ingested, not fitted",
            dir.display()
        )));
    }
    io::read_thc(&dir)
}

fn lambda_for(args: &LambdaArgs, ham: &KHamiltonian) -> Result<LambdaReport> {
    Ok(match args.lcu {
        Lcu::Sparse => lambda_sparse(ham),
        Lcu::Sf => {
            let fac = match &args.factors {
                Some(dir) => io::read_cholesky(dir)?,
                None => cholesky_sf(ham, args.tol)?,
            };
            lambda_sf(ham, &fac)
        }
        Lcu::Df => {
            let fac = match &args.factors {
                Some(dir) => io::read_cholesky(dir)?,
                None => cholesky_sf(ham, args.tol)?,
            };
            let df = double_factorize(&fac, args.eigtol, false)?;
            lambda_df(ham, &df)
        }
        Lcu::Thc => {
            let thc = thc_factors_for(&args.input, args.factors.as_deref())?;
            lambda_thc(ham, &thc)
        }
    })
}

fn cmd_lambda(args: LambdaArgs) -> Result<i32> {
    let ham = io::read_hamiltonian(&args.input)?;
    let seed = io::read_manifest(&args.input)?.seed;
    let hash = config_hash("lambda", &args);
    let report = lambda_for(&args, &ham)?;
    println!(
        "lambda lcu={} one={:.12e} two={:.12e} total={:.12e} per_cell={:.12e}",
        report.lcu.name(),
        report.lambda_one,
        report.lambda_two,
        report.lambda_total,
        report.lambda_per_cell
    );
    write_json(args.output.as_deref(), "lambda", &hash, seed, &report)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CostResult {
    lambda: LambdaReport,
    cost: CostReport,
}

fn cmd_cost(args: CostArgs) -> Result<i32> {
    let ham = io::read_hamiltonian(&args.input)?;
    let seed = io::read_manifest(&args.input)?.seed;
    let hash = config_hash("cost", &args);

    let working = if args.supercell {
        ham.fold_to_supercell()
    } else {
        ham.clone()
    };

    let mut params = CostParams::new(working.spin_orbitals() as u64, working.mesh);
    params.aleph = args.aleph;
    params.aleph1 = args.aleph;
    params.aleph2 = args.aleph;
    params.b_r = args.br;
    params.beth = args.beth;
    params.eps_pea = args.eps;

    let (lambda, cost) = match args.lcu {
        Lcu::Sparse => {
            let entries = sparsify(&working, args.threshold);
            params.d = entries.d();
            let lambda = lambda_sparse(&working);
            params.lambda = lambda.lambda_total;
            (lambda, costmodel::cost_sparse(&params)?)
        }
        Lcu::Sf => {
            let fac = cholesky_sf(&working, args.tol)?;
            params.m_rank = fac.m_rank().max(1) as u64;
            let lambda = lambda_sf(&working, &fac);
            params.lambda = lambda.lambda_total;
            (lambda, costmodel::cost_sf(&params)?)
        }
        Lcu::Df => {
            let fac = cholesky_sf(&working, args.tol)?;
            let df = double_factorize(&fac, args.eigtol, false)?;
            params.m_rank = df.m_rank.max(1) as u64;
            params.xi = df.xi_average().max(1.0);
            let lambda = lambda_df(&working, &df);
            params.lambda = lambda.lambda_total;
            (lambda, costmodel::cost_df(&params)?)
        }
        Lcu::Thc => {
            if args.supercell {
                return Err(Error::Data(
                    "supercell THC needs supercell factors, which are not derivable from \
                     symmetry-adapted ones"
                        .into(),
                ));
            }
            let thc = thc_factors_for(&args.input, args.factors.as_deref())?;
            params.m_rank = thc.m_rank.max(1) as u64;
            let lambda = lambda_thc(&working, &thc);
            params.lambda = lambda.lambda_total;
            (lambda, costmodel::cost_thc(&params)?)
        }
    };

    println!(
        "cost lcu={} per_step={} qubits={} iterations={} total={}",
        cost.lcu.name(),
        cost.per_step_toffoli,
        cost.logical_qubits,
        cost.iterations,
        cost.total_toffoli
    );
    if let Some(csv) = &args.csv {
        let line = format!(
            "{},{},{},{},{},{},{},{}\n",
            cost.lcu.name(),
            working.mesh.num_kpoints(),
            working.spin_orbitals(),
            cost.per_step_toffoli,
            cost.logical_qubits,
            lambda.lambda_total,
            cost.iterations,
            cost.total_toffoli
        );
        let mut text = if csv.exists() {
            std::fs::read_to_string(csv)?
        } else {
            "lcu,Nk,N,per_step_toffoli,qubits,lambda,iterations,total_toffoli\n".to_string()
        };
        text.push_str(&line);
        std::fs::write(csv, text)?;
    }
    write_json(
        args.output.as_deref(),
        "cost",
        &hash,
        seed,
        &CostResult { lambda, cost },
    )?;
    Ok(EXIT_OK)
}

fn cmd_phys(args: PhysArgs) -> Result<i32> {
    // profile resolution: explicit flag, then KBLOCK_PROFILE_DIR/physical.json,
    // then the frozen default; the resolved constants join the config hash
    let profile_path = args.profile.clone().or_else(|| {
        std::env::var_os("KBLOCK_PROFILE_DIR")
            .map(|dir| Path::new(&dir).join("physical.json"))
            .filter(|p| p.exists())
    });
    let params = match &profile_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<PhysicalParams>(&text)?
        }
        None => PhysicalParams::default(),
    };
    let hash = config_hash("phys", &(&args, &params));
    if args.toffoli < 1.0 {
        return Err(Error::DegenerateInput("toffoli count must be at least 1".into()));
    }
    let report = estimate_physical(args.toffoli as u128, args.logical, &params)?;
    println!(
        "phys distance={} physical_qubits={:.4e} runtime_days={:.4e}",
        report.code_distance, report.physical_qubits, report.runtime_days
    );
    write_json(args.output.as_deref(), "phys", &hash, None, &report)?;
    Ok(EXIT_OK)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let meshes = sweep::parse_mesh_list(&args.meshes)?;
    let hash = config_hash("sweep", &args);
    let mut config = SweepConfig::new(args.lcu, args.n);
    config.supercell = args.supercell;
    config.c_rank = args.c_rank;
    config.xi_model = if args.xi_per_kpoint {
        XiModel::PerKpoint(args.xi)
    } else {
        XiModel::Const(args.xi)
    };
    let rows = sweep::run_sweep(&config, &meshes)?;
    let mut csv = format!("# config_hash={hash}\n");
    csv.push_str(&sweep::rows_to_csv(&rows));
    std::fs::write(&args.output, csv)?;
    println!(
        "sweep lcu={} points={} -> {}",
        args.lcu.name(),
        rows.len(),
        args.output.display()
    );
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let report = match &args.input {
        Some(dir) => {
            let ham = io::read_hamiltonian(dir)?;
            let thc_dir = args
                .factors
                .clone()
                .unwrap_or_else(|| dir.join("thc_factors"));
            let thc = if thc_dir.join("manifest.json").exists() {
                Some(io::read_thc(&thc_dir)?)
            } else {
                None
            };
            oracle::verify_hamiltonian(&ham, thc.as_ref(), args.seed)?
        }
        None => {
            let mesh = parse_mesh(&args.mesh)?;
            oracle::verify_instance(mesh, args.n, args.seed)?
        }
    };
    println!(
        "verify mesh=[{}, {}, {}] n={} equivalence_dev={:?} walk_dev={:.3e} pass={}",
        report.mesh[0],
        report.mesh[1],
        report.mesh[2],
        report.n_spatial,
        report.equivalence_dev,
        report.walk_phase_deviation,
        report.pass
    );
    if report.pass {
        Ok(EXIT_OK)
    } else {
        Err(Error::VerificationFailed(format!(
            "equivalence deviations {:?}, lambda margins {:?}",
            report.equivalence_dev, report.lambda_margins
        )))
    }
}

#[derive(Serialize)]
struct ReportResult {
    fit: report::FitResult,
    rows: usize,
}

fn cmd_report(args: ReportArgs) -> Result<i32> {
    if args.inputs.is_empty() {
        return Err(Error::Data("report needs at least one CSV input".into()));
    }
    let hash = config_hash("report", &args);
    let tables = args
        .inputs
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            // sweep CSVs may carry a leading hash comment
            let body: String = text
                .lines()
                .filter(|l| !l.starts_with('#'))
                .collect::<Vec<_>>()
                .join("\n");
            report::parse_csv(&body)
        })
        .collect::<Result<Vec<_>>>()?;
    let merged = report::merge_tables(tables)?;
    let fit = report::fit_table(&merged, &args.x_col, &args.y_col, args.x_min, args.x_max)?;
    println!(
        "report fit {} ~ {}^{:.4} over {} points (x in [{}, {}])",
        fit.y_column, fit.x_column, fit.slope, fit.points, fit.x_min, fit.x_max
    );
    let rows = merged.rows.len();
    write_json(
        args.output.as_deref(),
        "report",
        &hash,
        None,
        &ReportResult { fit, rows },
    )?;
    Ok(EXIT_OK)
}

// a BTreeMap is kept here so the derived Serialize for clap structs stays
// deterministic if argument maps are ever added
#[allow(dead_code)]
type ArgMap = BTreeMap<String, String>;

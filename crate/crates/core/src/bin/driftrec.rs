//! Command-line interface: generate drift matrices, check recovery
//! assumptions, simulate trajectories, estimate signed supports, evaluate
//! sample-complexity bounds, and run Monte-Carlo sweeps.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use driftrec::basis::{linear_basis, mass_spring_basis, monomial_basis_deg2, BasisSet};
use driftrec::bounds;
use driftrec::ensembles::{self, DriftMatrix, GraphMode, GraphSpec};
use driftrec::estimator::{recover, RlsConfig};
use driftrec::harness::{empirical_sample_complexity, parse_sweep_config, run_sweep};
use driftrec::io;
use driftrec::lyapunov::{assumption_report, solve_continuous, solve_discrete};
use driftrec::sim::{sample_stationary_init, simulate_continuous, simulate_discrete};
use driftrec::{DriftError, Result};

#[derive(Parser)]
#[command(name = "driftrec", version, about = "Signed-support recovery for SDE drift matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random drift matrix and write it to a matrix file.
    Gen(GenArgs),
    /// Print the per-row assumption report for a drift matrix as JSON.
    Check(CheckArgs),
    /// Simulate a trajectory of the linear model.
    Simulate(SimulateArgs),
    /// Estimate coefficients and signed support from a trajectory file.
    Estimate(EstimateArgs),
    /// Evaluate a sample-complexity bound.
    Bounds(BoundsArgs),
    /// Run a Monte-Carlo sweep from a key = value config file.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// sparse-shift | dense | dense-symmetric | signed-regular | laplacian
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "theta-min")]
    theta_min: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    shift: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Row to report on; all rows when omitted.
    #[arg(long)]
    row: Option<usize>,
    /// Report for the discrete model at this step instead of the continuous one.
    #[arg(long)]
    eta: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// discrete | continuous
    #[arg(long, default_value = "discrete")]
    model: String,
    #[arg(long)]
    eta: f64,
    /// Transition count (discrete model).
    #[arg(long)]
    n: Option<usize>,
    /// Observation horizon (continuous model).
    #[arg(long)]
    t: Option<f64>,
    /// Fine integration step; defaults to eta/10 for the continuous model.
    #[arg(long = "eta-fine")]
    eta_fine: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    traj: PathBuf,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// linear | monomial2 | mass-spring
    #[arg(long, default_value = "linear")]
    basis: String,
    /// Spatial dimension for the mass-spring basis.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// 1 | 2 | 3 | 4 | 5 | 6 | lemma7
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long = "rho-min")]
    rho_min: Option<f64>,
    #[arg(long = "theta-min")]
    theta_min: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "c-min")]
    c_min: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    l: Option<f64>,
    /// Entropy H of the support variable (lemma7).
    #[arg(long)]
    entropy: Option<f64>,
    /// log of the alphabet size (lemma7).
    #[arg(long = "log-alphabet")]
    log_alphabet: Option<f64>,
    /// Mutual information I(Theta; x(0)) (lemma7).
    #[arg(long = "mutual-info")]
    mutual_info: Option<f64>,
    /// Per-dimension denominator (lemma7), e.g. from the closed forms.
    #[arg(long)]
    denominator: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key = value config file.
    config: PathBuf,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| DriftError::InvalidParameter(format!("missing required flag --{flag}")))
}

fn run_gen(args: &GenArgs) -> Result<ExitCode> {
    let m = match args.ensemble.as_str() {
        "sparse-shift" => ensembles::gen_sparse_shift(
            args.p,
            need(args.k, "k")?,
            need(args.shift, "shift")?,
            args.seed,
        )?,
        "dense" => ensembles::gen_dense(args.p, need(args.rho, "rho")?, args.seed)?,
        "dense-symmetric" => ensembles::gen_dense_symmetric(
            args.p,
            need(args.theta_min, "theta-min")?,
            need(args.rho, "rho")?,
            args.seed,
        )?,
        "signed-regular" => ensembles::gen_signed_regular(
            args.p,
            need(args.k, "k")?,
            need(args.theta_min, "theta-min")?,
            need(args.rho, "rho")?,
            args.seed,
        )?,
        "laplacian" => {
            let spec = GraphSpec {
                p: args.p,
                k: need(args.k, "k")?,
                mode: GraphMode::BoundedDegreeBernoulli,
                seed: args.seed,
            };
            ensembles::gen_laplacian(&spec, need(args.m, "m")?)?
        }
        other => {
            return Err(DriftError::InvalidParameter(format!("unknown ensemble `{other}`")))
        }
    };
    io::write_matrix(&args.out, &m.entries)?;
    eprintln!("wrote {} ({}x{})", args.out.display(), args.p, args.p);
    Ok(ExitCode::SUCCESS)
}

fn run_check(args: &CheckArgs) -> Result<ExitCode> {
    let entries = io::read_matrix(&args.matrix)?;
    let theta = DriftMatrix::custom(entries);
    let cov = match args.eta {
        Some(eta) => solve_discrete(&theta, eta)?,
        None => solve_continuous(&theta)?,
    };
    let rows: Vec<usize> = match args.row {
        Some(r) => vec![r],
        None => (0..theta.dim()).collect(),
    };
    let reports: Result<Vec<_>> = rows
        .iter()
        .map(|&r| assumption_report(&theta, &cov, r, args.eta))
        .collect();
    let reports = reports?;
    let out = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .expect("report serialization");
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let entries = io::read_matrix(&args.matrix)?;
    let theta = DriftMatrix::custom(entries);
    let traj = match args.model.as_str() {
        "discrete" => {
            let cov = solve_discrete(&theta, args.eta)?;
            let x0 = sample_stationary_init(&cov, driftrec::seed::mix(args.seed, 1))?;
            simulate_discrete(&theta, args.eta, need(args.n, "n")?, &x0, args.seed)?
        }
        "continuous" => {
            let eta_fine = args.eta_fine.unwrap_or(args.eta / 10.0);
            let cov = solve_discrete(&theta, eta_fine)?;
            let x0 = sample_stationary_init(&cov, driftrec::seed::mix(args.seed, 1))?;
            simulate_continuous(&theta, need(args.t, "t")?, args.eta, eta_fine, &x0, args.seed)?
        }
        other => return Err(DriftError::InvalidParameter(format!("unknown model `{other}`"))),
    };
    io::write_trajectory(&args.out, &traj)?;
    eprintln!("wrote {} ({} transitions)", args.out.display(), traj.n());
    Ok(ExitCode::SUCCESS)
}

fn pick_basis(name: &str, p: usize, dim: usize) -> Result<BasisSet> {
    match name {
        "linear" => Ok(linear_basis(p)),
        "monomial2" => Ok(monomial_basis_deg2(p)),
        "mass-spring" => Ok(mass_spring_basis(p, dim)),
        other => Err(DriftError::InvalidParameter(format!("unknown basis `{other}`"))),
    }
}

fn run_estimate(args: &EstimateArgs) -> Result<ExitCode> {
    let traj = io::read_trajectory(&args.traj)?;
    let basis = pick_basis(&args.basis, traj.p, args.dim)?;
    let cfg = RlsConfig { tol: args.tol, ..RlsConfig::with_lambda(args.lambda) };
    let res = recover(&traj, &basis, &cfg)?;
    let signs_compact: Vec<String> = (0..res.signed_support.nrows())
        .map(|r| {
            res.signed_support
                .row(r)
                .iter()
                .map(|&s| match s {
                    1 => '+',
                    -1 => '-',
                    _ => '0',
                })
                .collect()
        })
        .collect();
    let coeffs: Vec<Vec<f64>> = (0..res.theta_hat.nrows())
        .map(|r| res.theta_hat.row(r).iter().copied().collect())
        .collect();
    let signs_numeric: Vec<Vec<i8>> = (0..res.signed_support.nrows())
        .map(|r| res.signed_support.row(r).iter().copied().collect())
        .collect();
    let out = json!({
        "lambda": res.lambda_used,
        "converged": res.converged,
        "feature_names": basis.names,
        "coefficients": coeffs,
        "signed_support": signs_numeric,
        "signs": signs_compact,
        "per_row_iters": res.per_row_iters,
        "per_row_kkt_residual": res.per_row_kkt_residual,
    });
    let text = serde_json::to_string_pretty(&out).expect("result serialization");
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bounds(args: &BoundsArgs) -> Result<ExitCode> {
    let report = match args.theorem.as_str() {
        "1" => bounds::ub_sparse_continuous(
            need(args.k, "k")?,
            need(args.rho_min, "rho-min")?,
            need(args.theta_min, "theta-min")?,
            need(args.alpha, "alpha")?,
            need(args.c_min, "c-min")?,
            need(args.p, "p")?,
            need(args.delta, "delta")?,
        )?,
        "2" => bounds::lb_sparse(
            need(args.k, "k")?,
            need(args.rho_min, "rho-min")?,
            need(args.theta_min, "theta-min")?,
            need(args.p, "p")?,
            args.constant,
        )?,
        "3" => bounds::ub_laplacian(
            need(args.k, "k")?,
            need(args.m, "m")?,
            need(args.p, "p")?,
            need(args.delta, "delta")?,
        )?,
        "4" => bounds::ub_discrete(
            need(args.k, "k")?,
            need(args.d, "d")?,
            need(args.theta_min, "theta-min")?,
            need(args.alpha, "alpha")?,
            need(args.c_min, "c-min")?,
            need(args.p, "p")?,
            need(args.delta, "delta")?,
        )?,
        "5" => bounds::lb_dense(
            need(args.rho_min, "rho-min")?,
            need(args.theta_min, "theta-min")?,
            need(args.p, "p")?,
            args.constant,
        )?,
        "6" => bounds::lb_nonlinear(
            need(args.k, "k")?,
            need(args.p, "p")?,
            need(args.b, "b")?,
            need(args.l, "l")?,
            need(args.d, "d")?,
            args.constant,
        )?,
        "lemma7" => bounds::lb_generic(
            need(args.entropy, "entropy")?,
            need(args.log_alphabet, "log-alphabet")?,
            need(args.mutual_info, "mutual-info")?,
            need(args.denominator, "denominator")?,
            need(args.p, "p")?,
        )?,
        other => {
            return Err(DriftError::InvalidParameter(format!("unknown theorem `{other}`")))
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serialization"));
    Ok(ExitCode::SUCCESS)
}

fn run_sweep_cmd(args: &SweepArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.config)?;
    let spec = parse_sweep_config(&text)?;
    let result = run_sweep(&spec)?;
    std::fs::create_dir_all(&args.out_dir)?;
    std::fs::write(
        args.out_dir.join("results.json"),
        serde_json::to_string_pretty(&result).expect("sweep serialization"),
    )?;
    for &p in &spec.p_list {
        let mut csv = String::from("n_eta,success,se\n");
        let mut cells: Vec<_> = result.cells.iter().filter(|c| c.p == p).collect();
        cells.sort_by(|a, b| {
            (a.n as f64 * a.eta).partial_cmp(&(b.n as f64 * b.eta)).unwrap()
        });
        for c in cells {
            csv.push_str(&format!(
                "{},{},{}\n",
                c.n as f64 * c.eta,
                c.best_success(),
                c.best_se()
            ));
        }
        std::fs::write(args.out_dir.join(format!("curve_{p}.csv")), csv)?;
    }
    let mut csv = String::from("p,n_eta_at_delta\n");
    for (p, v) in empirical_sample_complexity(&result, spec.delta) {
        match v {
            Some(x) => csv.push_str(&format!("{p},{x}\n")),
            None => csv.push_str(&format!("{p},not-reached\n")),
        }
    }
    std::fs::write(args.out_dir.join("complexity.csv"), csv)?;
    if result.has_incomplete() {
        eprintln!("warning: some cells had incomplete instances");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Check(a) => run_check(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Sweep(a) => run_sweep_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

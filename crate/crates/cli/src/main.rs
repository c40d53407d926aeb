//! Command-line driver emitting plain-text data tables: trajectories,
//! convergence sweeps, error decompositions, stiff-limit residual probes and
//! stability boundaries. Numbers are printed with 17 significant digits so
//! tables round-trip exactly; identical invocations produce byte-identical
//! output.
//!
//! Exit status: 0 on success, 1 on a parameter error, 2 on a solver failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use mdimex::analysis::{
    ap_residual_sweep, asymptotic_decompose, convergence_study, stability_scan, Scheme,
};
use mdimex::problems::{van_der_pol, TestProblem, VanDerPolSpec};
use mdimex::{SolverConfig, SolverError};

#[derive(Parser)]
#[command(
    name = "mdimex",
    version,
    about = "Semi-implicit two-derivative IMEX solver for stiff ODEs",
    after_help = "Tables are whitespace-separated with one `#` header line, \
                  ready for external plotting tools."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one problem; rows are `t  y  z ...`
    Solve(SolveArgs),
    /// End-time error table; rows are `dt  err(eps1) slope(eps1)  err(eps2) slope(eps2) ...`
    Converge(ConvergeArgs),
    /// Stiffness decomposition of the error; rows are `dt  delta0  delta1`
    Asymptotic(AsymptoticArgs),
    /// Largest constraint residual per stiffness; rows are `eps  max|g|`
    Apresid(ApresidArgs),
    /// Stability boundary scan; rows are `-gamma  mu_max`
    Stability(StabilityArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    /// Van der Pol in relaxation form
    Vdp,
    /// Kaps problem (split form, exact solution known)
    Kaps,
    /// Linear prototype w' = (lambda + i mu) w
    Linear,
}

#[derive(Args)]
struct ProblemSelect {
    /// Which shipped problem to run
    #[arg(long, value_enum)]
    problem: ProblemArg,
    /// Implicit eigenvalue of the linear prototype (requires --problem linear)
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Explicit eigenvalue of the linear prototype (requires --problem linear)
    #[arg(long)]
    mu: Option<f64>,
}

impl ProblemSelect {
    fn family(&self) -> Result<TestProblem, CliError> {
        match self.problem {
            ProblemArg::Vdp => Ok(TestProblem::VanDerPol),
            ProblemArg::Kaps => Ok(TestProblem::Kaps),
            ProblemArg::Linear => {
                let lambda = self
                    .lambda
                    .ok_or_else(|| CliError::Param("--problem linear needs --lambda".into()))?;
                let mu = self
                    .mu
                    .ok_or_else(|| CliError::Param("--problem linear needs --mu".into()))?;
                Ok(TestProblem::Linear { lambda, mu })
            }
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    select: ProblemSelect,
    /// Stiffness parameter (ignored by the linear prototype)
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Time step (the grid is re-derived to land exactly on --tend)
    #[arg(long)]
    dt: f64,
    /// Final time
    #[arg(long)]
    tend: f64,
    /// Correction sweeps per step
    #[arg(long, default_value_t = 2)]
    kmax: usize,
    /// Newton residual tolerance
    #[arg(long, default_value_t = mdimex::DEFAULT_NEWTON_TOL)]
    newton_tol: f64,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    select: ProblemSelect,
    /// Comma-separated stiffness values, e.g. 1e-1,1e-2,1e-3
    #[arg(long)]
    eps: String,
    /// Step sizes: `halving:<start>:<count>` or a comma-separated decreasing list
    #[arg(long)]
    dts: String,
    /// Final time
    #[arg(long)]
    tend: f64,
    /// Correction sweeps per step
    #[arg(long, default_value_t = 2)]
    kmax: usize,
    /// Newton residual tolerance
    #[arg(long, default_value_t = 1e-13)]
    newton_tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AsymptoticArgs {
    #[command(flatten)]
    select: ProblemSelect,
    /// Step sizes: `halving:<start>:<count>` or a comma-separated decreasing list
    #[arg(long)]
    dts: String,
    /// Final time
    #[arg(long)]
    tend: f64,
    /// Correction sweeps per step
    #[arg(long, default_value_t = 2)]
    kmax: usize,
    /// Stiffness ratio between adjacent runs
    #[arg(long, default_value_t = 5.0 / 6.0)]
    alpha: f64,
    /// Base stiffness; the runs use eps, alpha*eps, alpha^2*eps
    #[arg(long, default_value_t = (5.0f64 / 6.0) * (5.0 / 6.0) * 1e-5)]
    eps_base: f64,
    /// Newton residual tolerance
    #[arg(long, default_value_t = 1e-13)]
    newton_tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ApresidArgs {
    #[command(flatten)]
    select: ProblemSelect,
    /// Comma-separated stiffness values
    #[arg(long)]
    eps: String,
    /// Fixed time step
    #[arg(long)]
    dt: f64,
    /// Final time
    #[arg(long, default_value_t = 0.5)]
    tend: f64,
    /// Correction sweeps per step
    #[arg(long, default_value_t = 2)]
    kmax: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    /// One-step map: `predictor`, `limit`, or `fullk<N>` (e.g. fullk2)
    #[arg(long)]
    scheme: String,
    /// `logspace` (forty ratios, -gamma from 1e-3 to 10) or a comma-separated
    /// list of non-positive ratios
    #[arg(long, default_value = "logspace", allow_hyphen_values = true)]
    gammas: String,
    /// Upper end of the scaled-rotation search range
    #[arg(long, default_value_t = 1e3)]
    mu_max: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum CliError {
    Param(String),
    Solver(SolverError),
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidParameter(_) | SolverError::UnsupportedProblem(_) => {
                CliError::Param(e.to_string())
            }
            other => CliError::Solver(other),
        }
    }
}

/// 17 significant digits: round-trip exact for doubles.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Param(format!("cannot parse {what} list `{s}`"))),
    }
}

/// `halving:<start>:<count>` expands to start, start/2, ..., start/2^(count-1).
fn parse_dts(s: &str) -> Result<Vec<f64>, CliError> {
    if let Some(rest) = s.strip_prefix("halving:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(CliError::Param(format!(
                "expected halving:<start>:<count>, got `{s}`"
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::Param(format!("bad halving start `{}`", parts[0])))?;
        let count: usize = parts[1]
            .parse()
            .map_err(|_| CliError::Param(format!("bad halving count `{}`", parts[1])))?;
        if !start.is_finite() || start <= 0.0 || count == 0 {
            return Err(CliError::Param(
                "halving sequence needs a positive start and count >= 1".into(),
            ));
        }
        Ok((0..count).map(|j| start / 2f64.powi(j as i32)).collect())
    } else {
        parse_f64_list(s, "step-size")
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, CliError> {
    match s {
        "predictor" => Ok(Scheme::Predictor),
        "limit" => Ok(Scheme::LimitMethod),
        _ => {
            if let Some(k) = s.strip_prefix("fullk") {
                let k: usize = k
                    .parse()
                    .map_err(|_| CliError::Param(format!("bad scheme `{s}`")))?;
                return Ok(Scheme::FullK(k));
            }
            Err(CliError::Param(format!(
                "unknown scheme `{s}` (expected predictor, limit, or fullk<N>)"
            )))
        }
    }
}

/// All table values must be finite; a non-finite cell means the underlying
/// solve silently degraded, which is treated as a solver failure.
fn push_row(out: &mut String, values: &[f64]) -> Result<(), CliError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Solver(SolverError::NonFinite {
            context: "output table",
        }));
    }
    let row: Vec<String> = values.iter().map(|v| fmt(*v)).collect();
    writeln!(out, "{}", row.join(" ")).expect("string write");
    Ok(())
}

fn emit(output: Option<&PathBuf>, table: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, table)
            .map_err(|e| CliError::Param(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let family = args.select.family()?;
    let problem = family.instantiate(args.eps)?;
    let cfg = SolverConfig::new(args.dt, args.tend)?
        .with_k_max(args.kmax)
        .with_newton_tol(args.newton_tol);
    let result = problem.integrate(&cfg)?;

    let mut table = String::new();
    writeln!(table, "# t  state[0..{}]", problem.dim()).unwrap();
    for (t, w) in result.times.iter().zip(&result.states) {
        let mut row = vec![*t];
        row.extend_from_slice(w.as_slice());
        push_row(&mut table, &row)?;
    }
    emit(args.output.as_ref(), &table)
}

fn run_converge(args: ConvergeArgs) -> Result<(), CliError> {
    let family = args.select.family()?;
    let epsilons = parse_f64_list(&args.eps, "stiffness")?;
    let dts = parse_dts(&args.dts)?;
    let dt0 = dts[0];
    let cfg = SolverConfig::new(dt0.min(args.tend), args.tend)?.with_newton_tol(args.newton_tol);
    let records = convergence_study(&family, &cfg, &dts, &epsilons, args.kmax)?;

    let mut table = String::new();
    write!(table, "# dt").unwrap();
    for eps in &epsilons {
        write!(table, "  err(eps={eps:e}) slope").unwrap();
    }
    writeln!(table).unwrap();

    for (i, &dt) in dts.iter().enumerate() {
        let mut row = vec![dt];
        for (e_idx, _) in epsilons.iter().enumerate() {
            let rec = &records[e_idx * dts.len() + i];
            let err = rec.error.ok_or(CliError::Solver(SolverError::NonFinite {
                context: "convergence cell",
            }))?;
            row.push(err);
            row.push(rec.slope_vs_prev.unwrap_or(0.0));
        }
        push_row(&mut table, &row)?;
    }
    emit(args.output.as_ref(), &table)
}

fn run_asymptotic(args: AsymptoticArgs) -> Result<(), CliError> {
    let family = args.select.family()?;
    let dts = parse_dts(&args.dts)?;
    let cfg = SolverConfig::new(dts[0].min(args.tend), args.tend)?.with_newton_tol(args.newton_tol);
    let rows = asymptotic_decompose(&family, &cfg, &dts, args.alpha, args.eps_base, args.kmax)?;

    let mut table = String::new();
    writeln!(
        table,
        "# dt  delta0  delta1   (alpha={:e}, eps_base={:e})",
        args.alpha, args.eps_base
    )
    .unwrap();
    for r in &rows {
        push_row(&mut table, &[r.dt, r.delta0, r.delta1])?;
    }
    emit(args.output.as_ref(), &table)
}

fn run_apresid(args: ApresidArgs) -> Result<(), CliError> {
    if args.select.problem != ProblemArg::Vdp {
        return Err(CliError::Param(
            "apresid needs the relaxation form; only --problem vdp ships one".into(),
        ));
    }
    let epsilons = parse_f64_list(&args.eps, "stiffness")?;
    let cfg = SolverConfig::new(args.dt, args.tend)?.with_k_max(args.kmax);
    let sweep = ap_residual_sweep(
        |e| van_der_pol(VanDerPolSpec { epsilon: e }),
        &cfg,
        &epsilons,
    )?;

    let mut table = String::new();
    writeln!(
        table,
        "# eps  max|g(y,z)|   (loglog slope {})",
        fmt(sweep.slope)
    )
    .unwrap();
    for (eps, resid) in &sweep.points {
        push_row(&mut table, &[*eps, *resid])?;
    }
    emit(args.output.as_ref(), &table)
}

fn run_stability(args: StabilityArgs) -> Result<(), CliError> {
    let scheme = parse_scheme(&args.scheme)?;
    let gammas = if args.gammas == "logspace" {
        mdimex::analysis::default_gammas()
    } else {
        parse_f64_list(&args.gammas, "ratio")?
    };
    let points = stability_scan(scheme, &gammas, args.mu_max)?;

    let mut table = String::new();
    writeln!(
        table,
        "# -gamma  mu_max   (search cap {}; a row at the cap means stable throughout)",
        fmt(args.mu_max)
    )
    .unwrap();
    for p in &points {
        // The sentinel for "stable across the whole range" prints as the
        // search cap so every table cell stays finite.
        push_row(
            &mut table,
            &[-p.gamma, p.mu_tilde_max.unwrap_or(args.mu_max)],
        )?;
    }
    emit(args.output.as_ref(), &table)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Converge(a) => run_converge(a),
        Command::Asymptotic(a) => run_asymptotic(a),
        Command::Apresid(a) => run_apresid(a),
        Command::Stability(a) => run_stability(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Param(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Solver(e)) => {
            eprintln!("solver failure: {e}");
            ExitCode::from(2)
        }
    }
}

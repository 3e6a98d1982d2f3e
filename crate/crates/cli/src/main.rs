//! `codeserve`: servability checks, t-parameters, Hall pairings and
//! random-matrix experiments from the command line.

mod report;

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use codeserve::batch::{serve_by_hall, verify_service, ServeError};
use codeserve::format::{parse_matrix, parse_requests, parse_vectors};
use codeserve::gf2::{GroupVector, Matrix};
use codeserve::hall::{hall_pairing, HallError};
use codeserve::montecarlo::{
    estimate_stat, fb_gap_search, sweep, write_csv, ConfigSpec, MonteCarloError, RequestDist, SimConfig,
    SimResult, Statistic,
};
use codeserve::solver::{
    is_servable, lift_witness, t_param, Budget, Regime, Servability, SolverError, TParamKind,
};
use serde_json::{json, Value};

use report::Report;

#[derive(Debug, Parser)]
#[command(name = "codeserve", version, about = "Serving requests from binary coded storage")]
struct Cli {
    /// write the document here instead of standard output
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a t-parameter of a matrix, or search random matrices for t_fb < t_fP
    Tparam(TparamArgs),
    /// Decide whether a request sequence can be served
    Serve(ServeArgs),
    /// Find permutations a, b with a_i + b_i = s_i for a zero-sum sequence
    Hall(HallArgs),
    /// Sample a statistic over random matrices
    Simulate(SimulateArgs),
    /// Run a JSON array of simulation configs
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    B,
    P,
    Fb,
    Fp,
    Rp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dist {
    Uniform,
    Point,
}

#[derive(Debug, Args)]
struct TparamArgs {
    #[arg(long, value_enum, required_unless_present = "search")]
    kind: Option<Kind>,
    /// request vector for --kind rp
    #[arg(long)]
    r: Option<String>,
    /// largest recovery set allowed
    #[arg(long)]
    wcap: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    /// matrix file, `-` for standard input
    #[arg(required_unless_present = "search", conflicts_with = "search")]
    matrix: Option<PathBuf>,
    /// sample random k x n matrices and report those with t_fb < t_fP
    #[arg(long, conflicts_with_all = ["kind", "r", "wcap"], requires_all = ["k", "n", "trials", "seed"])]
    search: bool,
    #[arg(long)]
    k: Option<u8>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    matrix: PathBuf,
    requests: PathBuf,
    /// serve with the Hall-pairing construction instead of exact search
    #[arg(long)]
    constructive: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "constructive")]
    wcap: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Args)]
struct HallArgs {
    /// one bitstring per line, `-` or absent for standard input
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    k: u8,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// trp, fp, fb2, v, l, or any t-parameter name with an optional size cap
    #[arg(long)]
    stat: String,
    #[arg(long)]
    r: Option<String>,
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    q: Dist,
    #[arg(long, default_value_t = SimConfig::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// default budget for configs that do not set one
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = run(&cli.command).unwrap_or_else(|r| r);
    if let Err(e) = report.emit(cli.output.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.exit as u8)
}

/// `Err` carries an early exit; both arms are emitted the same way.
type Outcome = Result<Report, Report>;

fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Tparam(a) if a.search => with_jobs(a.jobs, || search(a)),
        Command::Tparam(a) => tparam(a),
        Command::Serve(a) => serve(a),
        Command::Hall(a) => hall(a),
        Command::Simulate(a) => with_jobs(a.jobs, || simulate(a)),
        Command::Sweep(a) => with_jobs(a.jobs, || run_sweep(a)),
    }
}

fn with_jobs(jobs: Option<usize>, f: impl FnOnce() -> Outcome + Send) -> Outcome {
    let Some(j) = jobs else { return f() };
    if j == 0 {
        return Err(Report::input("usage", "--jobs must be at least 1", json!({})));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(j)
        .build()
        .map_err(|e| Report::input("usage", format!("cannot start thread pool: {e}"), json!({})))?;
    pool.install(f)
}

fn read_input(path: &Path) -> Result<String, Report> {
    let io_err = |e: io::Error| Report::input("io", format!("{}: {e}", path.display()), json!({"file": path.display().to_string()}));
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn load_matrix(path: &Path) -> Result<Matrix, Report> {
    parse_matrix(&read_input(path)?).map_err(|e| Report::parse(path, &e))
}

fn budget(b: Option<u64>) -> Budget {
    b.map(Budget::new).unwrap_or_default()
}

fn vector(bits: &str, k: u8) -> Result<GroupVector, Report> {
    let v = GroupVector::parse(bits).map_err(|e| Report::input("usage", format!("--r: {e}"), json!({})))?;
    if v.k() != k {
        return Err(Report::input("usage", format!("--r has {} bits, matrix has k = {k}", v.k()), json!({})));
    }
    if v.is_zero() {
        return Err(Report::input("usage", "--r must be nonzero", json!({})));
    }
    Ok(v)
}

fn solver_failure(e: SolverError) -> Report {
    match e {
        SolverError::BudgetExceeded { limit } => Report::budget(limit),
        other => Report::input("usage", other.to_string(), json!({})),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn tparam(a: &TparamArgs) -> Outcome {
    let path = a.matrix.as_deref().expect("clap requires a matrix");
    let g = load_matrix(path)?;
    let regime = match a.kind.expect("clap requires --kind") {
        Kind::B => Regime::Batch,
        Kind::P => Regime::Pir,
        Kind::Fb => Regime::FunctionalBatch,
        Kind::Fp => Regime::FunctionalPir,
        Kind::Rp => {
            let r = a.r.as_deref().ok_or_else(|| Report::input("usage", "--kind rp needs --r", json!({})))?;
            Regime::RequestPir(vector(r, g.k())?)
        }
    };
    let kind = TParamKind { regime, weight_cap: a.wcap };
    let out = t_param(&g.profile(), &kind, budget(a.budget)).map_err(solver_failure)?;
    let name = Statistic::TParam(kind).name();
    Ok(Report::ok(json!({
        "kind": name,
        "k": g.k(),
        "n": g.n(),
        "weight_cap": a.wcap,
        "value": out.value,
        "witness": to_json(&out.witness),
    })))
}

fn search(a: &TparamArgs) -> Outcome {
    let (k, n, trials, seed) = (a.k.unwrap(), a.n.unwrap(), a.trials.unwrap(), a.seed.unwrap());
    let rep = fb_gap_search(k, n, trials, seed, budget(a.budget)).map_err(mc_failure)?;
    Ok(Report::ok(to_json(&rep)))
}

fn serve(a: &ServeArgs) -> Outcome {
    let g = load_matrix(&a.matrix)?;
    let r = parse_requests(&read_input(&a.requests)?, Some(g.k())).map_err(|e| Report::parse(&a.requests, &e))?;
    if a.constructive {
        let s = serve_by_hall(&g, &r, a.seed).map_err(|e| match e {
            ServeError::Hall(HallError::Exhausted { attempts }) => Report {
                exit: report::Exit::BudgetExceeded,
                ..Report::input("hall_exhausted", format!("no pairing found after {attempts} attempts"), json!({}))
            },
            other => Report::input("precondition", other.to_string(), json!({})),
        })?;
        debug_assert!(verify_service(&g, &r, &s));
        return Ok(Report::ok(json!({"servable": true, "method": "hall", "service": to_json(&s)})));
    }
    match is_servable(&g.profile(), &r.profile(), a.wcap, budget(a.budget)).map_err(solver_failure)? {
        Servability::Servable(w) => {
            let s = lift_witness(&g, &r, &w).expect("solver witness fits the matrix");
            Ok(Report::ok(json!({"servable": true, "method": "search", "service": to_json(&s)})))
        }
        Servability::Unservable { bound } => {
            let reason = if bound.holds() { "exhaustive_search" } else { "bound_violated" };
            Ok(Report::negative(json!({
                "servable": false,
                "certificate": {"reason": reason, "lhs": bound.lhs, "rhs": bound.rhs, "bound_holds": bound.holds()},
            })))
        }
    }
}

fn hall(a: &HallArgs) -> Outcome {
    let path = a.input.clone().unwrap_or_else(|| PathBuf::from("-"));
    let s = parse_vectors(&read_input(&path)?).map_err(|e| Report::parse(&path, &e))?;
    let p = hall_pairing(&s, a.seed).map_err(|e| match e {
        HallError::NonZeroSum { sum } => {
            Report::input("non_zero_sum", e.to_string(), json!({"xor_total": sum.to_string()}))
        }
        HallError::Exhausted { attempts } => Report {
            exit: report::Exit::BudgetExceeded,
            ..Report::input("hall_exhausted", format!("no pairing found after {attempts} attempts"), json!({}))
        },
        other => Report::input("precondition", other.to_string(), json!({})),
    })?;
    Ok(Report::ok(to_json(&p)))
}

fn mc_failure(e: MonteCarloError) -> Report {
    match e {
        MonteCarloError::Solver(s) => solver_failure(s),
        other => Report::input("config", other.to_string(), json!({})),
    }
}

fn render(results: &[SimResult], format: Format, dists: &[RequestDist]) -> Outcome {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(results, &mut buf).map_err(mc_failure)?;
            Ok(Report::csv(String::from_utf8(buf).expect("csv output is utf-8")))
        }
        Format::Json => {
            let docs: Vec<Value> = results
                .iter()
                .zip(dists)
                .map(|(res, q)| {
                    let mut v = to_json(res);
                    let q = match q {
                        RequestDist::Uniform => json!("uniform"),
                        RequestDist::Point(r) => json!({"point": r.to_string()}),
                    };
                    v.as_object_mut().expect("results are objects").insert("q".into(), q);
                    v
                })
                .collect();
            Ok(Report::ok(json!({"results": docs})))
        }
    }
}

fn simulate(a: &SimulateArgs) -> Outcome {
    let spec = ConfigSpec {
        k: a.k,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        stat: a.stat.clone(),
        r: a.r.clone(),
        q: Some(match a.q {
            Dist::Uniform => "uniform".into(),
            Dist::Point => "point".into(),
        }),
        alpha: Some(a.alpha),
        budget: a.budget,
    };
    let cfg = spec.into_config(Budget::default()).map_err(mc_failure)?;
    let res = estimate_stat(&cfg).map_err(mc_failure)?;
    match a.format {
        Format::Csv => render(&[res], Format::Csv, &[]),
        Format::Json => {
            let mut doc = to_json(&res);
            let q = match cfg.request_dist {
                RequestDist::Uniform => json!("uniform"),
                RequestDist::Point(r) => json!({"point": r.to_string()}),
            };
            doc.as_object_mut().expect("results are objects").insert("q".into(), q);
            Ok(Report::ok(doc))
        }
    }
}

fn run_sweep(a: &SweepArgs) -> Outcome {
    let text = read_input(&a.config)?;
    let specs: Vec<ConfigSpec> = serde_json::from_str(&text).map_err(|e| {
        Report::input(
            "parse",
            format!("{}: line {}, column {}: {e}", a.config.display(), e.line(), e.column()),
            json!({"file": a.config.display().to_string(), "line": e.line(), "column": e.column()}),
        )
    })?;
    let cfgs = specs
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.into_config(budget(a.budget))
                .map_err(|e| Report::input("config", format!("config {i}: {e}"), json!({"index": i})))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let results = sweep(&cfgs).map_err(mc_failure)?;
    let dists: Vec<RequestDist> = cfgs.iter().map(|c| c.request_dist).collect();
    render(&results, a.format, &dists)
}

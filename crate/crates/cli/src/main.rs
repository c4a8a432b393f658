use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use bpl::asymptotics::{check_smooth_after_reparam, estimate_limit, fit_exponents, propose_rho, AsymptoticsReport, FitOptions};
use bpl::classify::{classify_limit, ClassifyOptions};
use bpl::infinity::{certify_infinity, MAX_VARS};
use bpl::ingest::{catalog, load_problem, parse_in_default_vars, POProblem};
use bpl::numerics::{newton_solve, NewtonConfig, PolyFunction};
use bpl::pathtrace::{seed_search, trace_many, trace_path, PathTrace, TraceConfig, TraceStatus};
use bpl::poly::RatPoly;
use bpl::strata::{
    active_rank, check_general_position_in_box, critical_on_stratum, enumerate_strata, locate_stratum,
    stratum_witnesses, StrataError, StratumReport,
};
use bpl::systems::{build_cleared_system, build_kkt_system, dump_system};

#[derive(Parser, Debug)]
#[command(name = "bpl", version, about = "Barrier critical paths of polynomial optimization problems")]
struct Cli {
    /// Raise log verbosity (BPL_LOG takes precedence).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace one critical path and write it as CSV.
    Trace(TraceArgs),
    /// Seed search, tracing, classification and exponent fits in one report.
    Analyze(AnalyzeArgs),
    /// Certify whether a polynomial family has real zeros at infinity.
    Bounded(BoundedArgs),
    /// Strata of the feasible boundary, or the stratum of one point.
    Strata(StrataArgs),
    /// Solve the KKT system of `F` on the fibre `P = xi`.
    Kkt(KktArgs),
    /// List catalog ids.
    List,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    /// Problem file (JSON) or catalog id.
    #[arg(long)]
    problem: String,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Newton residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Print the cleared system as JSON and exit.
    #[arg(long)]
    dump_system: bool,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    sched: ScheduleArgs,
    /// Starting point; defaults to the problem's seed or the best seed found in the box.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    seed: Option<Vec<f64>>,
    /// Search box: `lo hi` for every axis, or `lo1 hi1 lo2 hi2 ...`.
    #[arg(long = "box", num_args = 2.., allow_negative_numbers = true)]
    bbox: Option<Vec<f64>>,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    sched: ScheduleArgs,
    #[arg(long = "box", num_args = 2.., allow_negative_numbers = true)]
    bbox: Option<Vec<f64>>,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Largest denominator tried when rationalizing exponents.
    #[arg(long, default_value_t = 16)]
    max_den: u64,
    /// JSON destination (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundedArgs {
    /// Catalog system id.
    #[arg(long, conflicts_with = "p")]
    system: Option<String>,
    /// Polynomial of the family in x1..xn (repeatable).
    #[arg(long = "P", id = "p")]
    polys: Vec<String>,
    #[arg(long, default_value_t = 24)]
    depth: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StrataArgs {
    #[arg(long)]
    problem: String,
    /// Report the stratum containing this point.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    point: Option<Vec<f64>>,
    /// Activity tolerance `|g_i| <= tol`.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long = "box", num_args = 2.., allow_negative_numbers = true)]
    bbox: Option<Vec<f64>>,
    #[arg(long, default_value_t = 12)]
    grid: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KktArgs {
    /// Catalog KKT fixture id.
    #[arg(long, conflicts_with_all = ["f", "p"])]
    fixture: Option<String>,
    #[arg(long = "F", id = "f")]
    objective: Option<String>,
    /// Fibre polynomial (repeatable).
    #[arg(long = "P", id = "p")]
    polys: Vec<String>,
    /// Fibre value, one per `P`.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    xi: Vec<f64>,
    /// Newton start `(x, u)`; defaults to all ones.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    seed: Option<Vec<f64>>,
    #[arg(long)]
    dump_system: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Malformed input; maps to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<(), InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BPL_LOG", level)).init();
    let result = match &cli.command {
        Command::Trace(a) => cmd_trace(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Bounded(a) => cmd_bounded(a),
        Command::Strata(a) => cmd_strata(a),
        Command::Kkt(a) => cmd_kkt(a),
        Command::List => cmd_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, dest: Option<&Path>) -> CmdResult {
    match dest {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json(v: &Value, dest: Option<&Path>) -> CmdResult {
    emit(&serde_json::to_string_pretty(v)?, dest)
}

fn positive(name: &str, v: f64) -> CmdResult {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(InputError(format!("--{name} must be positive, got {v}")))
    }
}

/// Trace schedule from problem options overridden by flags.
fn trace_config(prob: &POProblem, a: &ScheduleArgs) -> Result<TraceConfig, InputError> {
    let o = &prob.options;
    let mut cfg = TraceConfig::default();
    if let Some(v) = a.mu0.or(o.mu0) {
        positive("mu0", v)?;
        cfg.mu0 = v;
    }
    if let Some(v) = a.theta.or(o.theta) {
        if !(v > 0.0 && v < 1.0) {
            return Err(InputError(format!("--theta must lie in (0,1), got {v}")));
        }
        cfg.theta = v;
    }
    if let Some(v) = a.steps.or(o.steps) {
        if v == 0 {
            return Err(InputError("--steps must be positive".into()));
        }
        cfg.steps = v;
    }
    if let Some(v) = a.tol.or(o.tol) {
        positive("tol", v)?;
        cfg.newton = NewtonConfig { tol_residual: v, tol_step: cfg.newton.tol_step.min(v * 1e-2), ..cfg.newton };
    }
    Ok(cfg)
}

fn parse_box(prob: &POProblem, flag: Option<&[f64]>) -> Result<Vec<[f64; 2]>, InputError> {
    let n = prob.nvars();
    let b: Vec<[f64; 2]> = match (flag, &prob.options.bbox) {
        (Some(v), _) if v.len() == 2 => vec![[v[0], v[1]]; n],
        (Some(v), _) if v.len() == 2 * n => v.chunks(2).map(|c| [c[0], c[1]]).collect(),
        (Some(v), _) => {
            return Err(InputError(format!("--box needs 2 or {} values, got {}", 2 * n, v.len())));
        }
        (None, Some(b)) => b.clone(),
        (None, None) => vec![[-2.0, 2.0]; n],
    };
    if b.len() != n || b.iter().any(|[lo, hi]| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less)) {
        return Err(InputError("box must give one nonempty interval per variable".into()));
    }
    Ok(b)
}

fn load(src: &str) -> Result<POProblem, InputError> {
    Ok(load_problem(src)?)
}

fn dump_cleared(prob: &POProblem) -> CmdResult {
    emit(&dump_system(&build_cleared_system(prob).system), None)
}

fn status_name(s: &TraceStatus) -> &'static str {
    match s {
        TraceStatus::Converged { .. } => "Converged",
        TraceStatus::Diverged => "Diverged",
        TraceStatus::LostIsolation => "LostIsolation",
        TraceStatus::NoSolution => "NoSolution",
        TraceStatus::LeftInterior => "LeftInterior",
        TraceStatus::Incomplete => "Incomplete",
    }
}

fn summarize(t: &PathTrace) {
    eprintln!("status: {}", status_name(&t.status));
    eprintln!("samples: {}", t.samples.len());
    if !t.samples.is_empty() {
        eprintln!("mu0_used: {:e} (halvings {})", t.mu0_used, t.mu0_halvings);
    }
    if let Some(l) = t.limit() {
        eprintln!("limit: {l:?}");
    }
}

fn cmd_trace(a: &TraceArgs) -> CmdResult {
    let prob = load(&a.sched.problem)?;
    if a.sched.dump_system {
        return dump_cleared(&prob);
    }
    let cfg = trace_config(&prob, &a.sched)?;
    let seed = match a.seed.clone().or_else(|| prob.options.seed.clone()) {
        Some(s) => Some(s),
        None => {
            let bbox = parse_box(&prob, a.bbox.as_deref())?;
            seed_search(&prob, &bbox, a.grid.max(1), cfg.mu0).into_iter().next().map(|s| s.point)
        }
    };
    let trace = match seed {
        Some(s) => trace_path(&prob, &s, &cfg)?,
        None => {
            log::info!("no interior seed found; reporting an empty trace");
            PathTrace {
                samples: vec![],
                status: TraceStatus::NoSolution,
                mu0_requested: cfg.mu0,
                mu0_used: cfg.mu0,
                mu0_halvings: 0,
                theta: cfg.theta,
                steps: cfg.steps,
                refinements: 0,
            }
        }
    };
    summarize(&trace);
    let csv = trace.to_csv(prob.nvars(), prob.nconstraints());
    match &a.csv {
        Some(p) => emit(&csv, Some(p)),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_analyze(a: &AnalyzeArgs) -> CmdResult {
    let prob = load(&a.sched.problem)?;
    if a.sched.dump_system {
        return dump_cleared(&prob);
    }
    let cfg = trace_config(&prob, &a.sched)?;
    let bbox = parse_box(&prob, a.bbox.as_deref())?;
    let seeds = seed_search(&prob, &bbox, a.grid.max(1), cfg.mu0);
    let starts: Vec<Vec<f64>> = seeds.iter().map(|s| s.point.clone()).collect();
    let traces = trace_many(&prob, &starts, &cfg);

    let mut paths = Vec::with_capacity(traces.len());
    let mut limits: Vec<Vec<f64>> = Vec::new();
    for (seed, t) in seeds.iter().zip(traces) {
        let t = t?;
        let classification = match classify_limit(&prob, &t, &ClassifyOptions::default()) {
            Ok(r) => serde_json::to_value(r)?,
            Err(e) => json!({ "error": e.to_string() }),
        };
        let asymptotics = match t.limit() {
            Some(lim) => {
                if !limits.iter().any(|l| l.iter().zip(lim).all(|(p, q)| (p - q).abs() <= 1e-6)) {
                    limits.push(lim.to_vec());
                }
                // the last sample sits O(mu) from the limit; extrapolate instead
                let xbar = estimate_limit(&t.samples).unwrap_or_else(|| lim.to_vec());
                match fit_exponents(&t.samples, &xbar, &FitOptions::default()) {
                    Ok(fit) => {
                        let rho = propose_rho(&fit, a.max_den).ok();
                        let smooth = rho.as_ref().map(|r| check_smooth_after_reparam(&t.samples, &xbar, r.rho, 2));
                        serde_json::to_value(AsymptoticsReport::new(&fit, rho.as_ref(), smooth.as_ref()))?
                    }
                    Err(e) => json!({ "error": e.to_string() }),
                }
            }
            None => Value::Null,
        };
        paths.push(json!({
            "seed": seed.point,
            "status": status_name(&t.status),
            "limit": t.limit(),
            "samples": t.samples.len(),
            "mu0_used": t.mu0_used,
            "final_mu": t.samples.last().map(|s| s.mu),
            "classification": classification,
            "asymptotics": asymptotics,
        }));
    }
    eprintln!("paths: {}, distinct limits: {}", paths.len(), limits.len());
    let report = json!({
        "problem": prob.name,
        "provenance": prob.provenance,
        "config": {
            "mu0": cfg.mu0,
            "theta": cfg.theta,
            "steps": cfg.steps,
            "box": bbox,
            "grid": a.grid,
        },
        "limits": limits,
        "paths": paths,
    });
    emit_json(&report, a.output.as_deref())
}

fn cmd_bounded(a: &BoundedArgs) -> CmdResult {
    let ps: Vec<RatPoly> = match &a.system {
        Some(id) => catalog::system(id).ok_or_else(|| InputError(format!("unknown system id '{id}'")))?,
        None if !a.polys.is_empty() => {
            let srcs: Vec<&str> = a.polys.iter().map(String::as_str).collect();
            parse_in_default_vars(&srcs, 1)?
        }
        None => return Err(InputError("give --system or at least one --P".into())),
    };
    if ps[0].nvars() > MAX_VARS {
        return Err(InputError(format!("at most {MAX_VARS} variables are supported")));
    }
    positive("tol", a.tol)?;
    let cert = certify_infinity(&ps, a.depth, a.tol)?;
    eprintln!("verdict: {}", cert.verdict);
    emit_json(&serde_json::to_value(cert)?, a.output.as_deref())
}

fn cmd_strata(a: &StrataArgs) -> CmdResult {
    let prob = load(&a.problem)?;
    positive("tol", a.tol)?;
    let report = match &a.point {
        Some(x) => {
            if x.len() != prob.nvars() {
                return Err(InputError(format!("--point needs {} coordinates", prob.nvars())));
            }
            match locate_stratum(&prob.gs, x, a.tol) {
                Ok(s) => {
                    let criticality = match critical_on_stratum(&prob.f, &prob.gs, &s, x, 1e-6) {
                        Ok(c) => serde_json::to_value(c)?,
                        Err(e @ StrataError::RankDeficientActiveSet { .. }) => json!({ "error": e.to_string() }),
                        Err(e) => return Err(e.into()),
                    };
                    eprintln!("active: {:?}", s.active_one_based());
                    json!({
                        "point": x,
                        "stratum": StratumReport::new(&s, vec![x.clone()]),
                        "active_rank": active_rank(&prob.gs, &s.active, x),
                        "criticality": criticality,
                    })
                }
                Err(StrataError::NotOnBoundary { min_abs, .. }) => {
                    eprintln!("active: []");
                    json!({ "point": x, "stratum": Value::Null, "min_abs_constraint": min_abs })
                }
                Err(e) => return Err(e.into()),
            }
        }
        None => {
            let bbox = parse_box(&prob, a.bbox.as_deref())?;
            let strata = enumerate_strata(&prob.gs)?;
            let reports: Vec<StratumReport> = strata
                .iter()
                .map(|s| StratumReport::new(s, stratum_witnesses(&prob.gs, s, &bbox, a.grid.max(1), a.tol)))
                .collect();
            let gp = check_general_position_in_box(&prob.gs, &bbox, a.grid.max(1))?;
            json!({ "strata": reports, "general_position": gp })
        }
    };
    emit_json(&report, a.output.as_deref())
}

fn cmd_kkt(a: &KktArgs) -> CmdResult {
    let (f, ps) = match (&a.fixture, &a.objective) {
        (Some(id), _) => catalog::kkt_fixture(id).ok_or_else(|| InputError(format!("unknown fixture '{id}'")))?,
        (None, Some(fsrc)) => {
            if a.polys.is_empty() {
                return Err(InputError("give at least one --P".into()));
            }
            let mut srcs = vec![fsrc.as_str()];
            srcs.extend(a.polys.iter().map(String::as_str));
            let mut all = parse_in_default_vars(&srcs, 1)?;
            let f = all.remove(0);
            (f, all)
        }
        (None, None) => return Err(InputError("give --fixture or --F with --P".into())),
    };
    let sys = build_kkt_system(&f, &ps);
    if a.dump_system {
        return emit(&dump_system(&sys.system), None);
    }
    if a.xi.len() != sys.s {
        return Err(InputError(format!("--xi needs {} values, got {}", sys.s, a.xi.len())));
    }
    let k = sys.n + sys.s;
    let seed = a.seed.clone().unwrap_or_else(|| vec![1.0; k]);
    if seed.len() != k {
        return Err(InputError(format!("--seed needs {k} values (x then u), got {}", seed.len())));
    }
    let func = PolyFunction::from_system(&sys.system, &a.xi);
    let report = match newton_solve(&func, &seed, &NewtonConfig::default()) {
        Ok(r) => {
            eprintln!("x: {:?}, u: {:?}", &r.x[..sys.n], &r.x[sys.n..]);
            json!({
                "converged": true,
                "xi": a.xi,
                "x": &r.x[..sys.n],
                "u": &r.x[sys.n..],
                "residual": r.residual,
                "iterations": r.iterations,
            })
        }
        Err(e) => {
            eprintln!("no KKT point: {e}");
            json!({ "converged": false, "xi": a.xi, "error": e.to_string() })
        }
    };
    emit_json(&report, a.output.as_deref())
}

fn cmd_list() -> CmdResult {
    let problems: Vec<Value> = catalog::problem_ids()
        .into_iter()
        .map(|id| json!({ "id": id, "description": catalog::describe(id) }))
        .collect();
    emit_json(
        &json!({
            "problems": problems,
            "kkt_fixtures": catalog::kkt_ids(),
            "systems": catalog::system_ids(),
        }),
        None,
    )
}

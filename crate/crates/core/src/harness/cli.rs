use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use super::scenario::{load_scenarios, ManifoldSpec, Prepared, Scenario};
use super::{cauchy_goursat_check, shrinking_cube_study, write_csv, DerivMode, VerificationReport};
use crate::chain::Chain;
use crate::fieldlang::parse_field;
use crate::gauge::{hk_integrate_1d, SingularPoint};
use crate::tangential::{tangential_derivative_coordinate, tangential_derivative_limit_with, LimitOptions};
use crate::Error;

const EXIT_PASS: i32 = 0;
const EXIT_BREACH: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "geocalc", version, about = "Numerical geometric calculus: verification campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate both sides of the fundamental theorem for scenarios.
    Verify(VerifyArgs),
    /// One-dimensional gauge integration of a derivative.
    Hk(HkArgs),
    /// Both derivative estimators at one parameter point.
    Grad(GradArgs),
    /// Monogenic defect and contour integral (Cauchy-Goursat).
    Monogenic(MonogenicArgs),
    /// Shrinking-cube and refinement-order campaigns.
    #[command(subcommand)]
    Study(StudyCommand),
}

#[derive(Args, Debug)]
struct Output {
    /// CSV destination (stdout if absent).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write 0 in the seconds column so runs are byte-identical.
    #[arg(long)]
    omit_timing: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// JSON scenario file (object or array); may be repeated.
    #[arg(long)]
    scenario: Vec<PathBuf>,
    /// Manifold for a single inline scenario, e.g. identity_cube:2.
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    field: Option<String>,
    #[arg(long, default_value_t = 4, value_parser = positive)]
    order: usize,
    #[arg(long, default_value = "coordinate")]
    mode: DerivMode,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = 0)]
    refinements: usize,
    #[arg(long)]
    id: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    /// Derivative of x^2 cos(pi/x^2) on [0, 1]; exact value -1.
    Pathological,
}

#[derive(Args, Debug)]
struct HkArgs {
    #[arg(long, conflicts_with = "expr")]
    builtin: Option<Builtin>,
    /// Integrand as an expression in x1.
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Points where the integrand is not evaluated (comma separated).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    singular: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Expected value; the run fails when off by more than `tol`.
    #[arg(long, allow_negative_numbers = true)]
    expect: Option<f64>,
}

#[derive(Args, Debug)]
struct GradArgs {
    #[arg(long, default_value = "identity_cube:2")]
    manifold: String,
    #[arg(long)]
    field: String,
    /// Parameter point, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    at: Vec<f64>,
    #[arg(long, default_value_t = 1e-2)]
    eps0: f64,
    #[arg(long, default_value_t = 4, value_parser = positive)]
    levels: usize,
    /// Gauss order on the faces of the shrinking cubes.
    #[arg(long, default_value_t = 4, value_parser = positive)]
    order: usize,
}

#[derive(Args, Debug)]
struct MonogenicArgs {
    #[arg(long, default_value = "identity_cube:2")]
    manifold: String,
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 64, value_parser = positive)]
    samples: usize,
    /// Largest defect accepted as monogenic.
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    #[arg(long, default_value_t = 4, value_parser = positive)]
    order: usize,
    /// Largest accepted contour integral.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand, Debug)]
enum StudyCommand {
    /// Both sides on [1/j, 1-1/j]^n for a list of j.
    Shrinking(ShrinkingArgs),
    /// Residuals under h -> h/2 parameter-cube refinement.
    Refinement(RefinementArgs),
}

#[derive(Args, Debug)]
struct ShrinkingArgs {
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 2, value_parser = positive)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    j: Vec<usize>,
    #[arg(long, default_value_t = 32, value_parser = positive)]
    order: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct RefinementArgs {
    #[arg(long)]
    manifold: String,
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 2, value_parser = positive)]
    order: usize,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value = "coordinate")]
    mode: DerivMode,
    /// Largest accepted residual at the finest level.
    #[arg(long, default_value_t = 1e-5)]
    tolerance: f64,
    #[arg(long, default_value_t = 1.5)]
    min_order: f64,
    #[command(flatten)]
    out: Output,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Breach(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidOrder(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Breach(other.to_string()),
        }
    }
}

impl From<crate::fieldlang::ParseError> for Failure {
    fn from(e: crate::fieldlang::ParseError) -> Self {
        Failure::Usage(format!("field expression: {e}"))
    }
}

type Outcome = Result<bool, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_BREACH,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Breach(msg)) => {
            eprintln!("error: {msg}");
            EXIT_BREACH
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GEOCALC_THREADS") {
        let k = positive(v.trim()).map_err(|e| format!("GEOCALC_THREADS=`{v}`: {e}"))?;
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| e.to_string())
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Verify(a) => verify(a),
        Command::Hk(a) => hk(a),
        Command::Grad(a) => grad(a),
        Command::Monogenic(a) => monogenic(a),
        Command::Study(StudyCommand::Shrinking(a)) => shrinking(a),
        Command::Study(StudyCommand::Refinement(a)) => refinement(a),
    }
}

fn emit(reports: &[VerificationReport], out: &Output) -> Result<(), Failure> {
    let result = match &out.csv {
        Some(path) => fs::File::create(path)
            .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))
            .and_then(|f| write_csv(reports, f, out.omit_timing).map_err(|e| Failure::Breach(e.to_string()))),
        None => write_csv(reports, io::stdout().lock(), out.omit_timing).map_err(|e| Failure::Breach(e.to_string())),
    };
    for r in reports {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.scenario);
        }
    }
    result
}

fn verify(a: VerifyArgs) -> Outcome {
    let mut scenarios: Vec<Scenario> = Vec::new();
    for path in &a.scenario {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut batch = load_scenarios(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        scenarios.append(&mut batch);
    }
    match (a.manifold, a.field) {
        (Some(manifold), Some(field)) => scenarios.push(Scenario {
            id: a.id,
            manifold: ManifoldSpec::Named(manifold),
            n: None,
            field,
            order: a.order,
            mode: a.mode,
            tolerance: a.tolerance,
            refinements: a.refinements,
        }),
        (None, None) => {}
        _ => return Err(Failure::Usage("--manifold and --field go together".into())),
    }
    if scenarios.is_empty() {
        return Err(Failure::Usage("nothing to verify: give --scenario or --manifold/--field".into()));
    }
    let mut prepared: Vec<Prepared> = scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| s.prepare(&format!("scenario{i:03}")))
        .collect::<Result<_, _>>()?;
    prepared.sort_by(|p, q| p.id.cmp(&q.id));
    let reports: Vec<VerificationReport> = prepared.par_iter().map(Prepared::run).collect();
    let ok = prepared.iter().zip(&reports).all(|(p, r)| p.passes(r));
    emit(&reports, &a.out)?;
    Ok(ok)
}

fn pathological(x: f64) -> f64 {
    use std::f64::consts::PI;
    2.0 * x * (PI / (x * x)).cos() + 2.0 * PI / x * (PI / (x * x)).sin()
}

fn hk(a: HkArgs) -> Outcome {
    let (result, expect) = match (a.builtin, a.expr) {
        (Some(Builtin::Pathological), _) => (
            hk_integrate_1d(pathological, 0.0, 1.0, &[SingularPoint::new(0.0)], a.tol)?,
            Some(a.expect.unwrap_or(-1.0)),
        ),
        (None, Some(text)) => {
            let expr = parse_field(&text, 1)?;
            if expr.max_coordinate() > 1 {
                return Err(Failure::Usage("the integrand may only use x1".into()));
            }
            let sings: Vec<SingularPoint> = a.singular.iter().map(|&s| SingularPoint::new(s)).collect();
            let f = |x: f64| match expr.eval(&[x]) {
                Ok(v) if v.is_scalar(0.0) => v.scalar_part(),
                _ => f64::NAN,
            };
            (hk_integrate_1d(f, a.a, a.b, &sings, a.tol)?, a.expect)
        }
        (None, None) => return Err(Failure::Usage("give --builtin or --expr".into())),
    };
    println!(
        "value={} converged={} levels={} cells={} error_estimate={}",
        result.value,
        result.converged,
        result.history.len(),
        result.cells_used,
        result.error_estimate
    );
    let on_target = expect.is_none_or(|e| (result.value - e).abs() <= a.tol);
    Ok(result.converged && on_target)
}

fn grad(a: GradArgs) -> Outcome {
    let cube = super::build_manifold(&ManifoldSpec::Named(a.manifold), None)?;
    let field = parse_field(&a.field, cube.m())?;
    if a.at.len() != cube.n() {
        return Err(Failure::Usage(format!("--at needs {} coordinates", cube.n())));
    }
    let coord = tangential_derivative_coordinate(&cube, &field, &a.at)?;
    let opts = LimitOptions {
        eps0: a.eps0,
        levels: a.levels,
        face_order: a.order,
    };
    let lim = tangential_derivative_limit_with(&cube, &field, &a.at, opts)?;
    println!("coordinate = {coord}");
    println!("limit      = {}", lim.value);
    println!("spread     = {}", lim.spread);
    println!("difference = {}", (&lim.value - &coord).norm());
    Ok(true)
}

fn monogenic(a: MonogenicArgs) -> Outcome {
    let cube = super::build_manifold(&ManifoldSpec::Named(a.manifold.clone()), None)?;
    let field = parse_field(&a.field, cube.m())?;
    let report = cauchy_goursat_check(&a.manifold, &Chain::single(cube), &field, a.order, a.threshold, a.samples);
    if let Some(d) = report.defect {
        eprintln!("defect = {d} (threshold {}), contour = {}", a.threshold, report.residual);
    }
    if report.flagged {
        eprintln!("field is not monogenic at the requested threshold");
    }
    emit(std::slice::from_ref(&report), &a.out)?;
    Ok(report.within(a.tolerance))
}

fn shrinking(a: ShrinkingArgs) -> Outcome {
    let field = parse_field(&a.field, a.n)?;
    let study = shrinking_cube_study(&field, a.n, &a.j, a.order)?;
    for s in &study.steps {
        eprintln!("j = {}: residual = {}, gap = {}", s.j, s.report.residual, s.gap);
    }
    let reports: Vec<VerificationReport> = study.steps.iter().map(|s| s.report.clone()).collect();
    emit(&reports, &a.out)?;
    let ok = reports.iter().all(|r| r.within(a.tolerance)) && study.gaps_decreasing();
    Ok(ok)
}

fn refinement(a: RefinementArgs) -> Outcome {
    let cube = super::build_manifold(&ManifoldSpec::Named(a.manifold.clone()), None)?;
    let field = parse_field(&a.field, cube.m())?;
    let report = super::refinement_study(&a.manifold, &Chain::single(cube), &field, a.order, a.mode, a.levels);
    for (level, r) in &report.history {
        eprintln!("level {level}: residual = {r}");
    }
    emit(std::slice::from_ref(&report), &a.out)?;
    let order_ok = a.levels == 0 || report.observed_order.is_some_and(|o| o >= a.min_order);
    Ok(report.within(a.tolerance) && order_ok)
}

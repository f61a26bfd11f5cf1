//! The `qkmech` command line: `check`, `derive`, `simulate`, `validate`.
//!
//! Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or parse
//! failure.

pub mod config;
pub mod validate;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::json;

use crate::dsl::render_span;
use crate::error::Error;
use crate::flow::{integrate, write_csv, Method};
use crate::forms::{kahler_from_hessian, metric_compatibility, vertical_differential, MetricTensor};
use crate::mechanics::{el_residual, energy, energy_differential, identity_deviation, solve_semispray_detailed};
use crate::structure::{verify_relations, StructureKind, StructureOperator};

use config::{parse_vector, PartialConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qkmech",
    version,
    about = "Lagrangian mechanics on flat quaternion Kähler charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify the quaternion relations and metric compatibility of F, G, H.
    Check(CheckArgs),
    /// Print every object of the derivation chain at one point.
    Derive(CommonArgs),
    /// Integrate the Euler–Lagrange flow and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Run the identity suite at seeded random points.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Block size; the chart is R^{4n}.
    #[arg(long)]
    n: Option<usize>,
    /// Structure operator: F, G or H.
    #[arg(long)]
    structure: Option<StructureKind>,
    /// Built-in Lagrangian, e.g. `gravity:1,9.8`.
    #[arg(long, conflicts_with = "lagrangian_expr")]
    builtin: Option<String>,
    /// Lagrangian expression in x0..x{4n-1}.
    #[arg(long)]
    lagrangian_expr: Option<String>,
    /// Point or initial state, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Seed for random sample points
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also print the signed matrix of this operator.
    #[arg(long)]
    dump_matrix: Option<StructureKind>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Step size (initial step for rk45)
    #[arg(long)]
    dt: Option<f64>,
    /// End time
    #[arg(long)]
    t_end: Option<f64>,
    /// rk4 or rk45
    #[arg(long)]
    method: Option<Method>,
    /// CSV path; the JSON summary goes next to it with a `.json` extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of random points.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Replace every check tolerance with this value.
    #[arg(long)]
    tolerance: Option<f64>,
}

/// A failed command: exit code and message for stderr.
struct Failure {
    code: i32,
    message: String,
}

type CmdResult = std::result::Result<i32, Failure>;

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: format!("I/O error: {e}"),
    }
}

/// Maps a library error to an exit code, rendering a caret under the
/// offending part of the expression when there is one.
fn failure(e: &Error, src: Option<&str>) -> Failure {
    let code = if e.is_usage() { EXIT_USAGE } else { EXIT_FAILURE };
    let mut inner = e;
    while let Error::Stage { source, .. } = inner {
        inner = source;
    }
    let message = match (inner, src) {
        (Error::Parse(pe), Some(src)) => pe.render(src),
        (Error::Domain { span: Some(span), .. }, Some(src)) => render_span(src, *span, &e.to_string()),
        _ => e.to_string(),
    };
    Failure { code, message }
}

fn resolve(common: &CommonArgs, extra: PartialConfig) -> std::result::Result<RunConfig, Failure> {
    let file = match &common.config {
        Some(path) => PartialConfig::load(path).map_err(|e| failure(&e, None))?,
        None => PartialConfig::default(),
    };
    let x0 = match &common.x0 {
        Some(s) => Some(parse_vector(s).map_err(|e| failure(&e, None))?),
        None => None,
    };
    let flags = PartialConfig {
        n: common.n,
        structure: common.structure,
        builtin: common.builtin.clone(),
        expr: common.lagrangian_expr.clone(),
        x0,
        seed: common.seed,
        ..extra
    };
    RunConfig::resolve(&file, &flags).map_err(|e| failure(&e, None))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn fmt_vec(v: &DVector<f64>) -> String {
    // `+ 0.0` turns -0 into 0 for display
    v.iter()
        .map(|x| format!("{:>13.6e}", x + 0.0))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_matrix(out: &mut dyn Write, label: &str, m: &DMatrix<f64>) -> std::io::Result<()> {
    writeln!(out, "{label}:")?;
    for r in m.row_iter() {
        let v: DVector<f64> = r.transpose();
        writeln!(out, "  {}", fmt_vec(&v))?;
    }
    Ok(())
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    writeln!(out, "{text}")
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = resolve(&args.common, PartialConfig::default())?;
    let dim = cfg.dim();
    let report = verify_relations(dim);
    let identity = MetricTensor::euclidean(dim);
    let mut metric = Vec::new();
    for kind in StructureKind::ALL {
        let c = metric_compatibility(&identity, &StructureOperator::build(kind, dim)).map_err(|e| failure(&e, None))?;
        metric.push((kind, c));
    }
    let passed = report.all_passed() && metric.iter().all(|(_, c)| c.compatible);
    let matrix = args
        .dump_matrix
        .map(|k| StructureOperator::build(k, dim).perm().to_int_matrix());

    if args.common.json {
        let metric_json: Vec<_> = metric
            .iter()
            .map(|(k, c)| json!({"structure": k, "compatible": c.compatible, "max_violation": c.max_violation}))
            .collect();
        write_json(
            out,
            &json!({
                "config": cfg,
                "relations": report,
                "metric_identity": metric_json,
                "matrix": matrix,
                "passed": passed,
            }),
        )
        .map_err(io_failure)?;
    } else {
        let w = |out: &mut dyn Write| -> std::io::Result<()> {
            writeln!(
                out,
                "quaternion relations, n = {} (chart dimension {})",
                dim.n(),
                dim.total()
            )?;
            for c in &report.checks {
                writeln!(out, "{}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
            }
            writeln!(out, "metric compatibility, g = I")?;
            for (k, c) in &metric {
                let status = if c.compatible { "PASS" } else { "FAIL" };
                writeln!(out, "{status}  {k}: max violation {:.3e}", c.max_violation)?;
            }
            if let (Some(k), Some(m)) = (args.dump_matrix, &matrix) {
                writeln!(out, "matrix of {k} (row = target, column = source):")?;
                for r in m {
                    let line: Vec<String> = r.iter().map(|x| format!("{x:>2}")).collect();
                    writeln!(out, "  {}", line.join(" "))?;
                }
            }
            writeln!(
                out,
                "{}",
                if passed {
                    "all checks passed"
                } else {
                    "some checks FAILED"
                }
            )
        };
        w(out).map_err(io_failure)?;
    }
    if passed {
        Ok(EXIT_OK)
    } else {
        Err(Failure {
            code: EXIT_FAILURE,
            message: "structure checks failed".into(),
        })
    }
}

fn cmd_derive(args: &CommonArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = resolve(args, PartialConfig::default())?;
    let src = cfg.lagrangian.expr_source();
    let fail = |e: Error| failure(&e, src);
    let field = cfg.lagrangian.build(cfg.dim()).map_err(fail)?;
    let field = field.as_ref();
    let p = cfg.point().map_err(fail)?;
    let op = StructureOperator::build(cfg.structure, cfg.dim());

    let detail = solve_semispray_detailed(field, &p, &op).map_err(fail)?;
    let j = &detail.jet;
    let xi = &detail.semispray;
    let d_j = vertical_differential(field, &p, &op).map_err(fail)?;
    let phi = kahler_from_hessian(&op, &j.hessian).map_err(fail)?;
    let e = energy(field, xi).map_err(fail)?;
    let de = energy_differential(field, xi).map_err(fail)?;
    let residual = el_residual(field, &p, &xi.velocity, &op).map_err(fail)?;
    let identity = identity_deviation(&op, j, xi).map_err(fail)?;

    if args.json {
        write_json(
            out,
            &json!({
                "config": cfg,
                "value": j.value,
                "gradient": j.gradient.as_slice(),
                "hessian": rows(&j.hessian),
                "hessian_cond": detail.cond,
                "vertical_differential": d_j.components.as_slice(),
                "kahler_form": rows(phi.matrix()),
                "semispray": xi.velocity.as_slice(),
                "energy": e.value,
                "energy_differential": de.components.as_slice(),
                "el_residual": residual.components.as_slice(),
                "el_residual_norm": residual.norm,
                "identity_deviation": identity,
                "literal_deviation": detail.literal_deviation,
            }),
        )
        .map_err(io_failure)?;
    } else {
        let w = |out: &mut dyn Write| -> std::io::Result<()> {
            writeln!(
                out,
                "structure {}, n = {}, L = {}",
                cfg.structure,
                cfg.n,
                describe(&cfg)
            )?;
            writeln!(out, "point:      {}", fmt_vec(p.coords()))?;
            writeln!(out, "L:          {:>13.6e}", j.value)?;
            writeln!(out, "grad L:     {}", fmt_vec(&j.gradient))?;
            write_matrix(out, "Hess L", &j.hessian)?;
            writeln!(out, "cond(Hess): {:.3e}", detail.cond)?;
            writeln!(out, "d_J L:      {}", fmt_vec(&d_j.components))?;
            write_matrix(out, "Kähler form", phi.matrix())?;
            writeln!(out, "xi:         {}", fmt_vec(&xi.velocity))?;
            writeln!(out, "E:          {:>13.6e}", e.value)?;
            writeln!(out, "dE:         {}", fmt_vec(&de.components))?;
            for b in 0..4 {
                let block = DVector::from_column_slice(residual.block(b));
                writeln!(out, "EL block {b}: {}", fmt_vec(&block))?;
            }
            writeln!(out, "EL residual norm: {:.3e}", residual.norm)?;
            writeln!(out, "|i_xi Phi - dE|:  {identity:.3e}")
        };
        w(out).map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}

fn describe(cfg: &RunConfig) -> String {
    match &cfg.lagrangian {
        config::LagrangianSource::Builtin(b) => b.clone(),
        config::LagrangianSource::Expr(e) => e.clone(),
    }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let extra = PartialConfig {
        dt: args.dt,
        t_end: args.t_end,
        method: args.method,
        out: args.out.clone(),
        ..Default::default()
    };
    let cfg = resolve(&args.common, extra)?;
    let src = cfg.lagrangian.expr_source();
    let fail = |e: Error| failure(&e, src);
    let field = cfg.lagrangian.build(cfg.dim()).map_err(fail)?;
    let p = cfg.point().map_err(fail)?;
    let op = StructureOperator::build(cfg.structure, cfg.dim());

    let result = integrate(field.as_ref(), &op, &p, &cfg.integrator);
    let (trajectory, report, error) = match result {
        Ok((t, r)) => (t, r, None),
        Err(f) => {
            let f = *f;
            (f.trajectory, f.report, Some(f.error))
        }
    };

    let csv_path = cfg.out.clone().unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    let json_path = csv_path.with_extension("json");
    let file = File::create(&csv_path).map_err(io_failure)?;
    write_csv(&trajectory, cfg.dim().total(), BufWriter::new(file)).map_err(io_failure)?;

    let summary = json!({
        "config": cfg,
        "status": if error.is_none() { "completed" } else { "failed" },
        "error": error.as_ref().map(|e| e.to_string()),
        "report": report,
        "samples": trajectory.samples.len(),
        "final_t": trajectory.samples.last().map(|s| s.t),
        "final_state": trajectory.final_state().map(|s| s.as_slice().to_vec()),
        "csv": csv_path,
    });
    let file = File::create(&json_path).map_err(io_failure)?;
    let mut w = BufWriter::new(file);
    write_json(&mut w, &summary).map_err(io_failure)?;
    w.flush().map_err(io_failure)?;

    if args.common.json {
        write_json(out, &summary).map_err(io_failure)?;
    } else {
        writeln!(
            out,
            "{}: {} steps to t = {}, energy drift {:.3e}, max EL residual {:.3e}, worst cond {:.3e} -> {}",
            if error.is_none() { "completed" } else { "FAILED" },
            report.steps,
            trajectory.samples.last().map_or(0.0, |s| s.t),
            report.max_energy_drift_rel,
            report.max_residual,
            report.worst_cond,
            csv_path.display()
        )
        .map_err(io_failure)?;
    }
    match error {
        None => Ok(EXIT_OK),
        Some(e) => Err(failure(&e, src)),
    }
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = resolve(&args.common, PartialConfig::default())?;
    let src = cfg.lagrangian.expr_source();
    let field = cfg.lagrangian.build(cfg.dim()).map_err(|e| failure(&e, src))?;
    if let Some(t) = args.tolerance {
        if t.is_nan() || t < 0.0 {
            return Err(Failure {
                code: EXIT_USAGE,
                message: format!("tolerance must be non-negative (got {t})"),
            });
        }
    }
    let report = validate::run_suite(
        field.as_ref(),
        cfg.structure,
        cfg.dim(),
        args.samples,
        cfg.seed,
        args.tolerance,
    );
    if args.common.json {
        write_json(out, &json!({"config": cfg, "samples": args.samples, "report": report})).map_err(io_failure)?;
    } else {
        let w = |out: &mut dyn Write| -> std::io::Result<()> {
            writeln!(
                out,
                "validate: structure {}, n = {}, seed {}, {} of {} points used ({} outside the domain)",
                cfg.structure,
                cfg.n,
                cfg.seed,
                report.points_used,
                report.points_requested,
                report.points_outside_domain
            )?;
            for c in &report.checks {
                let status = match (c.skipped, c.passed) {
                    (true, _) => "SKIP",
                    (false, true) => "PASS",
                    (false, false) => "FAIL",
                };
                write!(
                    out,
                    "{status}  {:<30} max violation {:.3e}  tolerance {:.1e}",
                    c.name, c.max_violation, c.tolerance
                )?;
                match &c.note {
                    Some(n) => writeln!(out, "  ({n})")?,
                    None => writeln!(out)?,
                }
            }
            Ok(())
        };
        w(out).map_err(io_failure)?;
    }
    match report.first_failure() {
        None => Ok(EXIT_OK),
        Some(c) => Err(Failure {
            code: EXIT_FAILURE,
            message: format!("check '{}' failed", c.name),
        }),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, out),
        Command::Derive(a) => cmd_derive(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

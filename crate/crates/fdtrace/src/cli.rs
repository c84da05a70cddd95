//! Command-line plumbing: JSON in, JSON out, exit codes.
//!
//! Exit code 0 means every requested check passed, 1 means a check failed,
//! 2 means the input could not be parsed or violated a structural invariant.

use std::fs;
use std::io::Read as _;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dualspace::{compact_base, hat, minimal_norm_lift, sup_over_contractive_traces, tensor_trace};
use crate::error::Error;
use crate::groupoid::{all_traces, invariant_measures, measure_trace_iso_check, validate};
use crate::json::{
    DualJson, ElementJson, GroupoidJson, K0ClassJson, PolytopeJson, TracialJson,
};
use crate::ktrace::pairing;
use crate::matalg::Tolerance;
use crate::verify::{run_all, VerifyConfig};

#[derive(Parser)]
#[command(name = "fdtrace", version, about = "Finite-dimensional trace toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Numerical tolerance for approximate comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for all randomized checks.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Case count for randomized checks.
    #[arg(long, global = true, default_value_t = 1000)]
    cases: usize,
    /// Output path; `-` writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on tracial functionals.
    Trace {
        #[command(subcommand)]
        op: TraceOp,
    },
    /// K-theory pairing.
    K0 {
        #[command(subcommand)]
        op: K0Op,
    },
    /// Dual-space operations.
    Dual {
        #[command(subcommand)]
        op: DualOp,
    },
    /// Twisted groupoid operations.
    Groupoid {
        #[command(subcommand)]
        op: GroupoidOp,
    },
    /// Randomized verification suite.
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
}

#[derive(Args)]
struct OneInput {
    /// Input JSON file; `-` reads standard input.
    input: String,
}

#[derive(Args)]
struct TwoInputs {
    /// First input JSON file; `-` reads standard input.
    a: String,
    /// Second input JSON file.
    b: String,
}

#[derive(Subcommand)]
enum TraceOp {
    /// Split a trace into positive and negative parts.
    Jordan(OneInput),
    /// Coordinatewise maximum of two traces.
    Join(TwoInputs),
    /// Coordinatewise minimum of two traces.
    Meet(TwoInputs),
    /// Restrict a trace to the corner cut out by a projection.
    Restrict {
        /// Trace JSON file.
        trace: String,
        /// Projection JSON file.
        projection: String,
    },
}

#[derive(Subcommand)]
enum K0Op {
    /// Pair a K0 class with a trace. Input: {"class": .., "trace": ..}.
    Pair(OneInput),
}

#[derive(Subcommand)]
enum DualOp {
    /// Minimal-norm self-adjoint lift of a coordinate vector.
    Lift(OneInput),
    /// Compact base of the positive trace cone cut by a strictly positive element.
    Base(OneInput),
    /// Tensor product of two traces.
    Tensor(TwoInputs),
}

#[derive(Subcommand)]
enum GroupoidOp {
    /// Check groupoid axioms and cocycle identities.
    Validate(OneInput),
    /// Basis of the self-adjoint tracial functionals on the twisted algebra.
    Traces(OneInput),
    /// Basis of the invariant measures on the unit space.
    Measures(OneInput),
    /// Exit 0 when the groupoid is principal, 1 otherwise.
    CheckPrincipal(OneInput),
    /// Check the measure/trace correspondence.
    CheckIso(OneInput),
}

#[derive(Subcommand)]
enum VerifyOp {
    /// Run every check and write the aggregated report.
    All,
}

#[derive(Serialize, Deserialize)]
struct PairInput {
    class: K0ClassJson,
    trace: TracialJson,
}

fn read_input(path: &str) -> crate::Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(Error::Io)?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))
    }
}

fn parse<T: for<'de> Deserialize<'de>>(path: &str) -> crate::Result<T> {
    let text = read_input(path)?;
    // serde_json error messages carry line and column positions
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{path}: {e}")))
}

fn write_output(out: &str, value: &serde_json::Value) -> crate::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Json(e.to_string()))?;
    text.push('\n');
    if out == "-" {
        print!("{text}");
        Ok(())
    } else {
        fs::write(out, text).map_err(|e| Error::Invalid(format!("{out}: {e}")))
    }
}

fn complex_pairs(values: &[num_complex::Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

/// Runs one command; the returned number is the process exit code.
fn dispatch(cli: &Cli, tol: Tolerance) -> crate::Result<i32> {
    let out = cli.out.as_str();
    match &cli.command {
        Command::Trace { op } => match op {
            TraceOp::Jordan(i) => {
                let tau = parse::<TracialJson>(&i.input)?.to_tracial()?;
                let (plus, minus) = tau.jordan();
                let residual = (tau.norm() - plus.norm() - minus.norm()).abs();
                let pass = residual <= tol.eps * (1.0 + tau.norm());
                write_output(
                    out,
                    &json!({
                        "plus": TracialJson::from_tracial(&plus),
                        "minus": TracialJson::from_tracial(&minus),
                        "norm_identity_residual": residual,
                        "norm_identity_pass": pass,
                    }),
                )?;
                Ok(if pass { 0 } else { 1 })
            }
            TraceOp::Join(i) | TraceOp::Meet(i) => {
                let a = parse::<TracialJson>(&i.a)?.to_tracial()?;
                let b = parse::<TracialJson>(&i.b)?.to_tracial()?;
                let r = match op {
                    TraceOp::Join(_) => a.join(&b)?,
                    _ => a.meet(&b)?,
                };
                write_output(out, &serde_json::to_value(TracialJson::from_tracial(&r)).unwrap())?;
                Ok(0)
            }
            TraceOp::Restrict { trace, projection } => {
                let tau = parse::<TracialJson>(trace)?.to_tracial()?;
                let p = parse::<ElementJson>(projection)?.to_element()?;
                let (restricted, kept) = tau.restrict_hereditary(&p, tol)?;
                write_output(
                    out,
                    &json!({
                        "trace": TracialJson::from_tracial(&restricted),
                        "kept_blocks": kept,
                    }),
                )?;
                Ok(0)
            }
        },
        Command::K0 { op } => match op {
            K0Op::Pair(i) => {
                let input: PairInput = parse(&i.input)?;
                let class = input.class.to_class()?;
                let tau = input.trace.to_tracial()?;
                let value = pairing(&class, &tau)?;
                write_output(out, &json!({ "value": value }))?;
                Ok(0)
            }
        },
        Command::Dual { op } => match op {
            DualOp::Lift(i) => {
                let f = parse::<DualJson>(&i.input)?.to_dual()?;
                let a = minimal_norm_lift(&f);
                let back = hat(&a, tol)?;
                write_output(
                    out,
                    &json!({
                        "element": ElementJson::from_element(&a),
                        "norm": a.op_norm(),
                        "dual_value": sup_over_contractive_traces(&f),
                        "hat": DualJson::from_dual(&back),
                    }),
                )?;
                Ok(0)
            }
            DualOp::Base(i) => {
                let e = parse::<ElementJson>(&i.input)?.to_element()?;
                let base = compact_base(e.parent(), &e, tol)?;
                write_output(
                    out,
                    &serde_json::to_value(PolytopeJson {
                        hyperplane: base.hyperplane.clone(),
                        vertices: base.vertices.clone(),
                    })
                    .unwrap(),
                )?;
                Ok(0)
            }
            DualOp::Tensor(i) => {
                let a = parse::<TracialJson>(&i.a)?.to_tracial()?;
                let b = parse::<TracialJson>(&i.b)?.to_tracial()?;
                let t = tensor_trace(&a, &b);
                write_output(out, &serde_json::to_value(TracialJson::from_tracial(&t)).unwrap())?;
                Ok(0)
            }
        },
        Command::Groupoid { op } => {
            let input = match op {
                GroupoidOp::Validate(i)
                | GroupoidOp::Traces(i)
                | GroupoidOp::Measures(i)
                | GroupoidOp::CheckPrincipal(i)
                | GroupoidOp::CheckIso(i) => &i.input,
            };
            let (g, sigma) = parse::<GroupoidJson>(input)?.to_groupoid()?;
            let violations = validate(&g, &sigma, tol);
            if let GroupoidOp::Validate(_) = op {
                write_output(
                    out,
                    &json!({
                        "valid": violations.is_empty(),
                        "violations": violations,
                    }),
                )?;
                return if violations.is_empty() {
                    Ok(0)
                } else {
                    Err(Error::InvalidGroupoid(violations.join("; ")))
                };
            }
            if let Some(first) = violations.first() {
                return Err(Error::InvalidGroupoid(first.clone()));
            }
            match op {
                GroupoidOp::Traces(_) => {
                    let basis = all_traces(&g, &sigma);
                    write_output(
                        out,
                        &json!({
                            "dimension": basis.len(),
                            "arrow_ids": g.arrow_ids(),
                            "basis": basis.iter().map(|t| complex_pairs(t.values())).collect::<Vec<_>>(),
                            "positive": basis.iter().map(|t| t.is_positive(&g, &sigma, tol)).collect::<Vec<_>>(),
                        }),
                    )?;
                    Ok(0)
                }
                GroupoidOp::Measures(_) => {
                    let basis = invariant_measures(&g);
                    write_output(
                        out,
                        &json!({
                            "dimension": basis.len(),
                            "unit_ids": g.unit_ids(),
                            "basis": basis.iter().map(|m| m.weights().to_vec()).collect::<Vec<_>>(),
                        }),
                    )?;
                    Ok(0)
                }
                GroupoidOp::CheckPrincipal(_) => {
                    let principal = g.is_principal();
                    let witness = (0..g.num_arrows()).find(|&a| {
                        !g.is_unit_arrow(a) && g.src(a) == g.rng(a)
                    });
                    write_output(
                        out,
                        &json!({
                            "principal": principal,
                            "isotropy_witness": witness.map(|a| g.arrow_ids()[a].clone()),
                        }),
                    )?;
                    Ok(if principal { 0 } else { 1 })
                }
                GroupoidOp::CheckIso(_) => {
                    let report = measure_trace_iso_check(&g, &sigma, tol);
                    let pass = report.holds();
                    write_output(
                        out,
                        &json!({
                            "principal": report.principal,
                            "trace_dim": report.trace_dim,
                            "measure_dim": report.measure_dim,
                            "restrictions_invariant": report.restrictions_invariant,
                            "max_restriction_residual": report.max_restriction_residual,
                            "round_trip_ok": report.round_trip_ok,
                            "max_round_trip_residual": report.max_round_trip_residual,
                            "cones_match": report.cones_match,
                            "pass": pass,
                        }),
                    )?;
                    Ok(if pass { 0 } else { 1 })
                }
                GroupoidOp::Validate(_) => unreachable!(),
            }
        }
        Command::Verify { op: VerifyOp::All } => {
            let cfg = VerifyConfig {
                seed: cli.seed,
                cases: cli.cases,
                tol,
            };
            let report = run_all(&cfg);
            write_output(out, &serde_json::to_value(&report).unwrap())?;
            Ok(if report.all_passed { 0 } else { 1 })
        }
    }
}

/// Entry point used by `main`; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let tol = match Tolerance::new(cli.tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match dispatch(&cli, tol) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

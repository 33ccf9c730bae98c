//! Batch front end for `ovf-core`: reads JSON artifacts, runs one operation and
//! writes a canonical JSON report.
//!
//! Exit codes: 0 success, 2 mathematical rejection (report still written, with
//! residuals), 1 I/O or format error (diagnostic on stderr, no report).

pub mod format;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use thiserror::Error;

use ovf_core::calculus::{compose, left_right_compatible, phi, right_similarity};
use ovf_core::duality::{
    canonical_dual, direct_sum, dual_from_parameter, dual_residual, strong_complement, DualOutcome,
};
use ovf_core::frames::{analyze, dilate, parsevalize, AnalysisBundle, FrameKind};
use ovf_core::groups::{
    central_projections, generator_orbit, generator_parametrize, group_frame_to_rep,
    parseval_generator_residual, GroupFrameOutcome, ParametrizeOutcome,
};
use ovf_core::homotopy::{connect_general, connect_parseval, verify_path};
use ovf_core::linalg::distance;

use format::{frame_json, matrix_json, num, path_json, rep_json, to_canonical_string};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "ovf", version, about = "Operator-valued frame engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for randomized constructions.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of path steps for `homotopy`.
    #[arg(long, global = true, default_value_t = 256)]
    pub samples: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds, classification and residuals of a frame.
    Analyze { frame: PathBuf },
    /// Factorization through orthogonal isometries.
    Dilate { frame: PathBuf },
    /// The Parseval frame `A_j S^{-1/2}`.
    Parsevalize { frame: PathBuf },
    /// The parameter of frame `b` relative to frame `a`.
    Phi { a: PathBuf, b: PathBuf },
    /// Right similarity with a frame, or left/right compatibility with a matrix.
    Similar { a: PathBuf, other: PathBuf },
    /// Composition `B_m A_j`.
    Compose { a: PathBuf, b: PathBuf },
    /// Canonical dual; with a frame, the dual test; with a matrix, the dual it parametrizes.
    Dual { a: PathBuf, other: Option<PathBuf> },
    /// Direct sum and disjointness class.
    Disjoint { a: PathBuf, b: PathBuf },
    /// Strong complement, optionally weighted by a positive matrix.
    Complement { a: PathBuf, t: Option<PathBuf> },
    /// Group structure; with a group-indexed frame, recover its representation.
    GroupCheck {
        group: PathBuf,
        frame: Option<PathBuf>,
    },
    /// Orbit frame of a generator.
    Generator { rep: PathBuf, generator: PathBuf },
    /// Generator `L_e* M θ_A` for a parameter `M`.
    Parametrize {
        rep: PathBuf,
        generator: PathBuf,
        m: PathBuf,
    },
    /// Path between two generators of one representation.
    Homotopy { input: PathBuf },
    /// Re-check a path file.
    VerifyPath { path: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] ovf_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_rejection() => 2,
            _ => 1,
        }
    }
}

/// Finished command: the report and whether the input was rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rendered: String,
    pub rejected: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.rejected {
            2
        } else {
            0
        }
    }
}

struct Ctx {
    tol: f64,
    seed: u64,
    samples: usize,
}

/// Numeric fields of a core error, for rejection reports.
fn error_details(e: &ovf_core::Error) -> Value {
    use ovf_core::Error as E;
    let mut o = Map::new();
    match e {
        E::NonHermitian { residual }
        | E::NonUnitary { residual }
        | E::NotParseval { residual }
        | E::NotInvariant { residual }
        | E::NotAProjection { residual }
        | E::NotInAlgebra { residual } => {
            o.insert("residual".into(), num(*residual));
        }
        E::InvalidParameter { reason, residual } | E::NotARepresentation { reason, residual } => {
            o.insert("reason".into(), reason.as_str().into());
            o.insert("residual".into(), num(*residual));
        }
        E::InvariantViolated { check, residual } => {
            o.insert("check".into(), check.as_str().into());
            o.insert("residual".into(), num(*residual));
        }
        E::NotPositive { min_eigenvalue } | E::SingularMatrix { min_eigenvalue } => {
            o.insert("min_eigenvalue".into(), num(*min_eigenvalue));
        }
        E::NotAFrame { lower_bound } => {
            o.insert("lower_bound".into(), num(*lower_bound));
        }
        E::SingularR { min_singular } => {
            o.insert("min_singular".into(), num(*min_singular));
        }
        E::GenericityFailure { attempts } | E::DecompositionFailed { attempts } => {
            o.insert("attempts".into(), (*attempts).into());
        }
        _ => {}
    }
    Value::Object(o)
}

fn residual_map(m: &std::collections::BTreeMap<String, f64>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), num(*v))).collect())
}

fn bundle_json(b: &AnalysisBundle) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), b.kind.name().into());
    if let FrameKind::Tight(a) = b.kind {
        o.insert("tight_bound".into(), num(a));
    }
    o.insert("bounds".into(), json!([num(b.bounds.0), num(b.bounds.1)]));
    o.insert("count".into(), b.count.into());
    o.insert("dim_H".into(), b.dim_h().into());
    o.insert("dim_Ho".into(), b.dim_ho.into());
    o.insert("residuals".into(), residual_map(&b.residuals));
    Value::Object(o)
}

fn envelope(cli_name: &str, ctx: &Ctx, status: &str, result: Value) -> Value {
    json!({
        "command": cli_name,
        "version": VERSION,
        "tol": num(ctx.tol),
        "seed": ctx.seed,
        "status": status,
        "result": result,
    })
}

fn is_frame_file(v: &Value) -> bool {
    v.get("dim_H").is_some()
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze { .. } => "analyze",
        Command::Dilate { .. } => "dilate",
        Command::Parsevalize { .. } => "parsevalize",
        Command::Phi { .. } => "phi",
        Command::Similar { .. } => "similar",
        Command::Compose { .. } => "compose",
        Command::Dual { .. } => "dual",
        Command::Disjoint { .. } => "disjoint",
        Command::Complement { .. } => "complement",
        Command::GroupCheck { .. } => "group-check",
        Command::Generator { .. } => "generator",
        Command::Parametrize { .. } => "parametrize",
        Command::Homotopy { .. } => "homotopy",
        Command::VerifyPath { .. } => "verify-path",
    }
}

/// Result of a command body: the payload and whether it is a rejection.
type Body = Result<(Value, bool), CliError>;

fn run_command(cmd: &Command, ctx: &Ctx) -> Body {
    let tol = ctx.tol;
    match cmd {
        Command::Analyze { frame } => {
            let f = format::load_frame(frame)?;
            let b = analyze(&f, tol)?;
            let mut r = bundle_json(&b);
            r["multiplicity"] = f.multiplicity(tol).into();
            Ok((r, !b.kind.is_frame()))
        }
        Command::Dilate { frame } => {
            let f = format::load_frame(frame)?;
            let d = dilate(&f, tol)?;
            Ok((
                json!({
                    "isometries": d.isometries.iter().map(matrix_json).collect::<Vec<_>>(),
                    "t": matrix_json(&d.t),
                    "embedding": matrix_json(&d.embedding),
                    "factorization_residual": num(d.factorization_residual(&f)),
                }),
                false,
            ))
        }
        Command::Parsevalize { frame } => {
            let f = format::load_frame(frame)?;
            let p = parsevalize(&f, tol)?;
            Ok((json!({ "frame": frame_json(&p) }), false))
        }
        Command::Phi { a, b } => {
            let (fa, fb) = (format::load_frame(a)?, format::load_frame(b)?);
            let p = phi(&fa, &fb, tol)?;
            let gram = &p.m.adjoint() * &p.m;
            let iso = distance(&gram, &p.base.projection);
            Ok((
                json!({
                    "parameter": matrix_json(&p.m),
                    "partial_isometry_residual": num(iso),
                    "partial_isometry": iso <= tol,
                }),
                false,
            ))
        }
        Command::Similar { a, other } => {
            let fa = format::load_frame(a)?;
            let v = format::read_value(other)?;
            if is_frame_file(&v) {
                let ff: format::FrameFile = format::parse_json(other, v)?;
                let fb = format::frame_from_file(other, &ff)?;
                let rep = right_similarity(&fa, &fb, tol)?;
                let similar = rep.right.is_some();
                Ok((
                    json!({
                        "mode": "right",
                        "similar": similar,
                        "t": rep.right.as_ref().map(matrix_json),
                        "diagnostics": residual_map(&rep.diagnostics),
                    }),
                    !similar,
                ))
            } else {
                let mf: format::MatrixFile = format::parse_json(other, v)?;
                let r = mf.to_matrix("matrix").map_err(|message| CliError::Format {
                    path: other.clone(),
                    message,
                })?;
                let rep = left_right_compatible(&fa, &r, tol)?;
                let verdicts: Map<String, Value> = rep
                    .condition_verdicts(tol)
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v.into()))
                    .collect();
                Ok((
                    json!({
                        "mode": "left",
                        "left_right_ok": rep.left_right_ok,
                        "t": rep.right.as_ref().map(matrix_json),
                        "diagnostics": residual_map(&rep.diagnostics),
                        "conditions": verdicts,
                        "conditions_agree": rep.conditions_agree(tol),
                    }),
                    !rep.left_right_ok,
                ))
            }
        }
        Command::Compose { a, b } => {
            let c = compose(&format::load_frame(a)?, &format::load_frame(b)?, tol)?;
            let kind = analyze(&c, tol)?.kind;
            Ok((
                json!({ "frame": frame_json(&c), "kind": kind.name() }),
                false,
            ))
        }
        Command::Dual { a, other } => {
            let fa = format::load_frame(a)?;
            let Some(other) = other else {
                let d = canonical_dual(&fa, tol)?;
                return Ok((
                    json!({ "mode": "canonical", "frame": frame_json(&d) }),
                    false,
                ));
            };
            let v = format::read_value(other)?;
            if is_frame_file(&v) {
                let ff: format::FrameFile = format::parse_json(other, v)?;
                let fb = format::frame_from_file(other, &ff)?;
                let residual = dual_residual(&fa, &fb)?;
                let dual = residual <= tol;
                Ok((
                    json!({ "mode": "test", "dual": dual, "residual": num(residual) }),
                    !dual,
                ))
            } else {
                let mf: format::MatrixFile = format::parse_json(other, v)?;
                let m = mf.to_matrix("matrix").map_err(|message| CliError::Format {
                    path: other.clone(),
                    message,
                })?;
                match dual_from_parameter(&fa, &m, tol)? {
                    DualOutcome::Accepted(d) => Ok((
                        json!({ "mode": "parameter", "frame": frame_json(&d) }),
                        false,
                    )),
                    DualOutcome::Rejected { residual } => Ok((
                        json!({ "mode": "parameter", "residual": num(residual) }),
                        true,
                    )),
                }
            }
        }
        Command::Disjoint { a, b } => {
            let (sum, v) = direct_sum(&format::load_frame(a)?, &format::load_frame(b)?, tol)?;
            Ok((
                json!({
                    "kind": v.kind.name(),
                    "residuals": residual_map(&v.residuals),
                    "direct_sum": sum.as_ref().map(frame_json),
                }),
                false,
            ))
        }
        Command::Complement { a, t } => {
            let fa = format::load_frame(a)?;
            let t = t.as_deref().map(format::load_matrix).transpose()?;
            let c = strong_complement(&fa, t.as_ref(), tol)?;
            Ok((json!({ "frame": frame_json(&c) }), false))
        }
        Command::GroupCheck { group, frame } => {
            let g = format::load_group(group)?;
            let classes = g.conjugacy_classes();
            let algebra = central_projections(&g, 1, ctx.seed, tol)?;
            let mut r = json!({
                "name": g.name(),
                "order": g.order(),
                "abelian": g.is_abelian(),
                "class_sizes": classes.iter().map(Vec::len).collect::<Vec<_>>(),
                "irrep_dims": algebra.irrep_dims,
            });
            let Some(frame) = frame else {
                return Ok((r, false));
            };
            let f = format::load_frame(frame)?;
            match group_frame_to_rep(&f, &g, tol)? {
                GroupFrameOutcome::Accepted { rep, residual } => {
                    r["frame"] =
                        json!({ "orbit": true, "residual": num(residual), "rep": rep_json(&rep) });
                    Ok((r, false))
                }
                GroupFrameOutcome::Rejected { residual } => {
                    r["frame"] = json!({ "orbit": false, "residual": num(residual) });
                    Ok((r, true))
                }
            }
        }
        Command::Generator { rep, generator } => {
            let rep = format::load_rep(rep)?;
            let a = format::load_matrix(generator)?;
            let o = generator_orbit(&a, &rep, tol)?;
            let mut r = bundle_json(&o.bundle);
            r["structure"] = residual_map(&o.residuals);
            r["parseval_residual"] = num(parseval_generator_residual(&a, &rep));
            r["orbit"] = frame_json(&o.frame);
            Ok((r, false))
        }
        Command::Parametrize { rep, generator, m } => {
            let rep = format::load_rep(rep)?;
            let a = format::load_matrix(generator)?;
            let m = format::load_matrix(m)?;
            match generator_parametrize(&a, &rep, &m, tol)? {
                ParametrizeOutcome::Accepted {
                    generator,
                    orbit,
                    parseval_recovery,
                } => Ok((
                    json!({
                        "member": true,
                        "generator": matrix_json(&generator),
                        "kind": orbit.bundle.kind.name(),
                        "parseval_recovery": parseval_recovery.map(num),
                    }),
                    false,
                )),
                ParametrizeOutcome::Rejected { residual } => {
                    Ok((json!({ "member": false, "residual": num(residual) }), true))
                }
            }
        }
        Command::Homotopy { input } => {
            let h: format::HomotopyFile = format::read_json(input)?;
            let rep = format::rep_from_ref(input, &h.rep)?;
            let bad = |m: String| CliError::Format {
                path: input.clone(),
                message: m,
            };
            let a = h.start.to_matrix("start").map_err(bad)?;
            let b = h.end.to_matrix("end").map_err(bad)?;
            let parseval = parseval_generator_residual(&a, &rep) <= tol
                && parseval_generator_residual(&b, &rep) <= tol;
            log::info!(
                "connecting {} generators",
                if parseval { "Parseval" } else { "general" }
            );
            let path = if parseval {
                connect_parseval(&a, &b, &rep, ctx.samples, ctx.seed, tol)?
            } else {
                connect_general(&a, &b, &rep, ctx.samples, ctx.seed, tol)?
            };
            let path = path.with_endpoint_ids(
                h.start_id.unwrap_or_else(|| "start".into()),
                h.end_id.unwrap_or_else(|| "end".into()),
            );
            Ok((path_json(&path, &rep, tol), false))
        }
        Command::VerifyPath { path } => {
            let pf: format::PathFile = format::read_json(path)?;
            let (fp, rep) = format::path_from_file(path, &pf)?;
            let r = verify_path(&fp, &rep, tol);
            Ok((
                json!({
                    "ok": r.ok,
                    "sample_count": r.sample_count,
                    "generator_failures": r.generator_failures,
                    "max_parseval_residual": num(r.max_parseval_residual),
                    "min_bound_ratio": num(r.min_bound_ratio),
                    "start_residual": num(r.start_residual),
                    "end_residual": num(r.end_residual),
                    "monotonicity_failures": r.monotonicity_failures,
                    "max_step": num(r.max_step),
                    "step_violations": r.step_violations,
                    "failures": r.failures(),
                }),
                !r.ok,
            ))
        }
    }
}

/// Runs one command and renders its report without writing it.
///
/// Rejections raised as core errors become rejected reports; other errors are
/// returned.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Ctx {
        tol: cli.tol,
        seed: cli.seed,
        samples: cli.samples,
    };
    let name = command_name(&cli.command);
    let (value, rejected) = match run_command(&cli.command, &ctx) {
        Ok((result, rejected)) => {
            if matches!(cli.command, Command::Homotopy { .. }) {
                // the path file is the artifact; it carries tol, seed and version itself
                (result, rejected)
            } else {
                let status = if rejected { "rejected" } else { "ok" };
                (envelope(name, &ctx, status, result), rejected)
            }
        }
        Err(CliError::Core(e)) if e.is_rejection() => {
            log::info!("{name} rejected: {e}");
            let result = json!({ "error": e.to_string(), "details": error_details(&e) });
            (envelope(name, &ctx, "rejected", result), true)
        }
        Err(e) => return Err(e),
    };
    Ok(Outcome {
        rendered: to_canonical_string(&value),
        rejected,
    })
}

/// Runs one command and writes its report to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let outcome = execute(cli)?;
    match &cli.out {
        Some(path) => write_file(path, &outcome.rendered)?,
        None => print!("{}", outcome.rendered),
    }
    Ok(outcome.exit_code())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

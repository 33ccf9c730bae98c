//! JSON artifacts: schemas for input files and a canonical writer.
//!
//! The writer prints every float with 17 significant digits in exponent form,
//! which `serde_json` (with `float_roundtrip`) parses back to the same bits.
//! Object keys are sorted, so equal values always render to equal bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use ovf_core::frames::OvFrame;
use ovf_core::groups::{FiniteGroup, GroupRep};
use ovf_core::homotopy::{FramePath, PathMeta, PathSample};
use ovf_core::linalg::{ComplexMatrix, C64};

use crate::CliError;

/// Tolerance for validating representation files.
const REP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn to_matrix(&self, what: &str) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "{what}: {} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            ));
        }
        let entries = self
            .data
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        ComplexMatrix::new(self.rows, self.cols, entries).map_err(|e| format!("{what}: {e}"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    #[serde(rename = "dim_H")]
    pub dim_h: usize,
    #[serde(rename = "dim_Ho")]
    pub dim_ho: usize,
    pub ops: Vec<MatrixFile>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
    #[serde(default)]
    pub name: Option<String>,
}

/// A group given inline or as a path relative to the referencing file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    pub group: GroupRef,
    pub matrices: Vec<MatrixFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RepRef {
    Path(String),
    Inline(RepFile),
}

/// Input of the `homotopy` command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyFile {
    pub rep: RepRef,
    pub start: MatrixFile,
    pub end: MatrixFile,
    #[serde(default)]
    pub start_id: Option<String>,
    #[serde(default)]
    pub end_id: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub t: f64,
    pub generator: MatrixFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaFile {
    pub seed: u64,
    pub n_samples: usize,
    pub max_step: f64,
    pub lipschitz: f64,
    pub log_norm: f64,
    pub parseval: bool,
    pub initial_projection_drift: f64,
}

/// Output of `homotopy`, input of `verify-path`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub samples: Vec<SampleFile>,
    pub meta: MetaFile,
    pub start: MatrixFile,
    pub end: MatrixFile,
    pub endpoint_ids: [String; 2],
    pub rep: RepFile,
    pub tol: f64,
    pub version: String,
}

fn format_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn read_value(path: &Path) -> Result<Value, CliError> {
    read_json(path)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| format_err(path, e.to_string()))
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, value: Value) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| format_err(path, e.to_string()))
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let m: MatrixFile = read_json(path)?;
    m.to_matrix("matrix").map_err(|e| format_err(path, e))
}

pub fn frame_from_file(path: &Path, f: &FrameFile) -> Result<OvFrame, CliError> {
    let ops = f
        .ops
        .iter()
        .enumerate()
        .map(|(j, m)| m.to_matrix(&format!("block {j}")))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format_err(path, e))?;
    let frame =
        OvFrame::new(f.dim_h, f.dim_ho, ops).map_err(|e| format_err(path, e.to_string()))?;
    match &f.labels {
        Some(labels) => frame
            .with_labels(labels.clone())
            .map_err(|e| format_err(path, e.to_string())),
        None => Ok(frame),
    }
}

pub fn load_frame(path: &Path) -> Result<OvFrame, CliError> {
    let f: FrameFile = read_json(path)?;
    frame_from_file(path, &f)
}

fn resolve(base: &Path, relative: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(relative)
}

pub fn group_from_file(path: &Path, g: &GroupFile) -> Result<FiniteGroup, CliError> {
    if g.order != g.cayley.len() {
        return Err(format_err(
            path,
            format!(
                "order {} but the Cayley table has {} rows",
                g.order,
                g.cayley.len()
            ),
        ));
    }
    let name = g.name.clone().unwrap_or_else(|| format!("G{}", g.order));
    Ok(FiniteGroup::new(g.cayley.clone(), name)?)
}

pub fn load_group(path: &Path) -> Result<FiniteGroup, CliError> {
    let g: GroupFile = read_json(path)?;
    group_from_file(path, &g)
}

fn group_from_ref(base: &Path, g: &GroupRef) -> Result<FiniteGroup, CliError> {
    match g {
        GroupRef::Inline(g) => group_from_file(base, g),
        GroupRef::Path(p) => load_group(&resolve(base, p)),
    }
}

pub fn rep_from_file(path: &Path, r: &RepFile) -> Result<GroupRep, CliError> {
    let group = group_from_ref(path, &r.group)?;
    let matrices = r
        .matrices
        .iter()
        .enumerate()
        .map(|(g, m)| m.to_matrix(&format!("representation matrix {g}")))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format_err(path, e))?;
    Ok(GroupRep::new(group, matrices, REP_TOL)?)
}

pub fn load_rep(path: &Path) -> Result<GroupRep, CliError> {
    let r: RepFile = read_json(path)?;
    rep_from_file(path, &r)
}

pub fn rep_from_ref(base: &Path, r: &RepRef) -> Result<GroupRep, CliError> {
    match r {
        RepRef::Inline(r) => rep_from_file(base, r),
        RepRef::Path(p) => load_rep(&resolve(base, p)),
    }
}

pub fn path_from_file(path: &Path, f: &PathFile) -> Result<(FramePath, GroupRep), CliError> {
    let rep = rep_from_file(path, &f.rep)?;
    let samples = f
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(PathSample {
                t: s.t,
                generator: s.generator.to_matrix(&format!("sample {i}"))?,
            })
        })
        .collect::<Result<Vec<_>, String>>()
        .map_err(|e| format_err(path, e))?;
    let m = &f.meta;
    let fp = FramePath {
        samples,
        start: f
            .start
            .to_matrix("start")
            .map_err(|e| format_err(path, e))?,
        end: f.end.to_matrix("end").map_err(|e| format_err(path, e))?,
        endpoint_ids: (f.endpoint_ids[0].clone(), f.endpoint_ids[1].clone()),
        meta: PathMeta {
            seed: m.seed,
            n_samples: m.n_samples,
            max_step: m.max_step,
            lipschitz: m.lipschitz,
            log_norm: m.log_norm,
            parseval: m.parseval,
            initial_projection_drift: m.initial_projection_drift,
        },
    };
    Ok((fp, rep))
}

/// Float as a JSON value; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let data = m
        .entries_row_major()
        .into_iter()
        .map(|z| Value::Array(vec![num(z.re), num(z.im)]))
        .collect();
    let mut o = Map::new();
    o.insert("rows".into(), m.rows().into());
    o.insert("cols".into(), m.cols().into());
    o.insert("data".into(), Value::Array(data));
    Value::Object(o)
}

pub fn frame_json(f: &OvFrame) -> Value {
    let mut o = Map::new();
    o.insert("dim_H".into(), f.dim_h().into());
    o.insert("dim_Ho".into(), f.dim_ho().into());
    o.insert("ops".into(), f.ops().iter().map(matrix_json).collect());
    if let Some(labels) = f.labels() {
        o.insert(
            "labels".into(),
            labels.iter().map(|l| Value::from(l.as_str())).collect(),
        );
    }
    Value::Object(o)
}

pub fn group_json(g: &FiniteGroup) -> Value {
    let mut o = Map::new();
    o.insert("order".into(), g.order().into());
    o.insert(
        "cayley".into(),
        g.cayley()
            .iter()
            .map(|row| Value::Array(row.iter().map(|&x| Value::from(x)).collect()))
            .collect::<Value>(),
    );
    o.insert("name".into(), g.name().into());
    Value::Object(o)
}

pub fn rep_json(r: &GroupRep) -> Value {
    let mut o = Map::new();
    o.insert("group".into(), group_json(r.group()));
    o.insert(
        "matrices".into(),
        r.matrices().iter().map(matrix_json).collect(),
    );
    Value::Object(o)
}

pub fn path_json(p: &FramePath, rep: &GroupRep, tol: f64) -> Value {
    let samples = p
        .samples
        .iter()
        .map(|s| {
            let mut o = Map::new();
            o.insert("t".into(), num(s.t));
            o.insert("generator".into(), matrix_json(&s.generator));
            Value::Object(o)
        })
        .collect();
    let m = &p.meta;
    let mut meta = Map::new();
    meta.insert("seed".into(), m.seed.into());
    meta.insert("n_samples".into(), m.n_samples.into());
    meta.insert("max_step".into(), num(m.max_step));
    meta.insert("lipschitz".into(), num(m.lipschitz));
    meta.insert("log_norm".into(), num(m.log_norm));
    meta.insert("parseval".into(), m.parseval.into());
    meta.insert(
        "initial_projection_drift".into(),
        num(m.initial_projection_drift),
    );
    let mut o = Map::new();
    o.insert("samples".into(), Value::Array(samples));
    o.insert("meta".into(), Value::Object(meta));
    o.insert("start".into(), matrix_json(&p.start));
    o.insert("end".into(), matrix_json(&p.end));
    o.insert(
        "endpoint_ids".into(),
        Value::Array(vec![
            p.endpoint_ids.0.clone().into(),
            p.endpoint_ids.1.clone().into(),
        ]),
    );
    o.insert("rep".into(), rep_json(rep));
    o.insert("tol".into(), num(tol));
    o.insert("version".into(), crate::VERSION.into());
    Value::Object(o)
}

/// Canonical rendering: two-space indentation, sorted keys, floats as
/// `{:.16e}`.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, Some(i), _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, _, Some(x)) => out.push_str(&format!("{x:.16e}")),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // short numeric pairs stay on one line
            if items.iter().all(|x| x.is_number()) && items.len() <= 2 {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, depth, out);
                }
                out.push(']');
                return;
            }
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                indent(depth + 1, out);
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                indent(depth + 1, out);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*k], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(depth, out);
            out.push('}');
        }
    }
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

//! JSON circuit format and report types.
//!
//! ```json
//! {"name": "dong", "d": 2,
//!  "layout": [{"dim": 2, "role": "control"}, {"dim": 2, "role": "task"},
//!             {"dim": 2, "role": "ancilla", "group": 0}],
//!  "steps": [{"unitary": {...matrix...}, "targets": [2]},
//!            {"unitary": "v.json", "targets": [1, 2], "control": [0, 1]},
//!            {"query": "id", "targets": [1]}],
//!  "projector": "identity",
//!  "input": [0, 1], "output": [0, 1]}
//! ```
//!
//! A matrix is either inline or a path relative to the IR file. A unitary
//! without `targets` acts on every factor. `projector` is `"identity"`, a
//! full-space matrix, or a list of `{"op", "targets"}` factors. `input` and
//! `output` default to the non-ancilla factors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::linalg::{CMatrix, Factor, RegisterLayout, Role};
use crate::model::{OracleAlgorithm, Program, QueryLetter, StepKind};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct FactorJson {
    dim: usize,
    role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<u32>,
}

impl FactorJson {
    fn from_factor(f: &Factor) -> Self {
        let (role, group) = match f.role {
            Role::Control => ("control", None),
            Role::Task => ("task", None),
            Role::Ancilla(g) => ("ancilla", Some(g)),
        };
        FactorJson { dim: f.dim, role: role.into(), group }
    }

    fn to_factor(&self) -> Result<Factor> {
        let role = match self.role.as_str() {
            "control" => Role::Control,
            "task" => Role::Task,
            "ancilla" => Role::Ancilla(self.group.unwrap_or(0)),
            other => return Err(Error::InvalidCircuit(format!("unknown factor role `{other}`"))),
        };
        Ok(Factor { dim: self.dim, role })
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Resolves an inline matrix or a path relative to `base`.
fn matrix_value(v: &Value, base: Option<&Path>) -> Result<CMatrix> {
    match v {
        Value::String(p) => {
            let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
            let text = std::fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
            CMatrix::from_json(&serde_json::from_str(&text)?)
        }
        other => CMatrix::from_json(other),
    }
}

fn index_list(v: Option<&Value>, what: &str) -> Result<Option<Vec<usize>>> {
    match v {
        None => Ok(None),
        Some(v) => {
            serde_json::from_value(v.clone()).map(Some).map_err(|e| Error::InvalidCircuit(format!("`{what}`: {e}")))
        }
    }
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::InvalidCircuit(format!("missing field `{key}`")))
}

/// Parses an IR document; relative matrix paths resolve against `base`.
pub fn parse(doc: &Value, base: Option<&Path>) -> Result<OracleAlgorithm> {
    let d: usize =
        serde_json::from_value(field(doc, "d")?.clone()).map_err(|e| Error::InvalidCircuit(format!("`d`: {e}")))?;
    let factors: Vec<FactorJson> = serde_json::from_value(field(doc, "layout")?.clone())
        .map_err(|e| Error::InvalidCircuit(format!("`layout`: {e}")))?;
    let layout = RegisterLayout::new(factors.iter().map(FactorJson::to_factor).collect::<Result<_>>()?)?;
    let name = doc.get("name").and_then(Value::as_str).unwrap_or("ir");
    let mut alg = OracleAlgorithm::new(name, layout, d);

    let steps =
        field(doc, "steps")?.as_array().ok_or_else(|| Error::InvalidCircuit("`steps` must be an array".into()))?;
    for (i, step) in steps.iter().enumerate() {
        let targets = index_list(step.get("targets"), "targets")?;
        if let Some(op) = step.get("unitary") {
            let op = matrix_value(op, base)?;
            let targets = targets.unwrap_or_default();
            match index_list(step.get("control"), "control")? {
                None => alg.gate(op, &targets)?,
                Some(c) if c.len() == 2 && c[1] <= 1 => alg.controlled_gate(op, &targets, c[0], c[1] as u8)?,
                Some(c) => {
                    return Err(Error::InvalidCircuit(format!("step {i}: control must be [factor, 0|1], got {c:?}")))
                }
            }
        } else if let Some(q) = step.get("query") {
            let letter =
                q.as_str().ok_or_else(|| Error::InvalidCircuit(format!("step {i}: query letter must be a string")))?;
            let targets = targets.ok_or_else(|| Error::InvalidCircuit(format!("step {i}: query needs `targets`")))?;
            alg.query(QueryLetter::from_name(letter)?, &targets)?;
        } else {
            return Err(Error::InvalidCircuit(format!("step {i} is neither a unitary nor a query")));
        }
    }

    match doc.get("projector") {
        None => {}
        Some(Value::String(s)) if s == "identity" => {}
        Some(Value::Array(parts)) => {
            for part in parts {
                let op = matrix_value(field(part, "op")?, base)?;
                let targets = index_list(part.get("targets"), "targets")?.unwrap_or_default();
                alg.project(op, &targets)?;
            }
        }
        Some(other) => alg.project(matrix_value(other, base)?, &[])?,
    }

    let input = index_list(doc.get("input"), "input")?;
    let output = index_list(doc.get("output"), "output")?;
    if input.is_some() || output.is_some() {
        let default = alg.layout().task_factors();
        alg.set_registers(input.unwrap_or_else(|| default.clone()), output.unwrap_or(default))?;
    }
    alg.validate()?;
    Ok(alg)
}

pub fn parse_str(text: &str, base: Option<&Path>) -> Result<OracleAlgorithm> {
    parse(&serde_json::from_str(text)?, base)
}

pub fn read_file(path: &Path) -> Result<OracleAlgorithm> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_str(&text, path.parent())
}

/// Serializes with every matrix inline. Custom query letters have no
/// portable form and are rejected.
pub fn to_value(alg: &OracleAlgorithm) -> Result<Value> {
    let layout: Vec<FactorJson> = alg.layout().factors().iter().map(FactorJson::from_factor).collect();
    let mut steps = Vec::new();
    for s in alg.steps() {
        steps.push(match &s.kind {
            StepKind::Gate { op, control: None } => json!({"unitary": op, "targets": s.targets}),
            StepKind::Gate { op, control: Some((c, p)) } => {
                json!({"unitary": op, "targets": s.targets, "control": [c, p]})
            }
            StepKind::Query(QueryLetter::Custom { name, .. }) => {
                return Err(Error::Unsupported(format!("custom query letter `{name}` cannot be serialized")))
            }
            StepKind::Query(l) => json!({"query": l.name(), "targets": s.targets}),
        });
    }
    let projector = if alg.projector().is_empty() {
        json!("identity")
    } else {
        Value::Array(alg.projector().iter().map(|p| json!({"op": p.op, "targets": p.targets})).collect())
    };
    Ok(json!({
        "name": alg.name(),
        "d": alg.oracle_dim(),
        "layout": layout,
        "steps": steps,
        "projector": projector,
        "input": alg.input_register(),
        "output": alg.output_register(),
    }))
}

pub fn to_string_pretty(alg: &OracleAlgorithm) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_value(alg)?)?)
}

pub fn write_file(alg: &OracleAlgorithm, path: &Path) -> Result<()> {
    std::fs::write(path, to_string_pretty(alg)? + "\n").map_err(|e| io_error(path, e))
}

/// Outcome of one verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    ModelViolation,
}

/// `{"check", "U_seed", "result", "residual", …}` as written by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    #[serde(rename = "U_seed")]
    pub u_seed: u64,
    pub result: Outcome,
    /// Worst residual over the sample.
    pub residual: f64,
    pub samples: usize,
    #[serde(default)]
    pub details: Value,
}

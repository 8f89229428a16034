//! JSON problem files, solve results and CSV traces.
//!
//! ```json
//! {"m":1,"n":2,"A":[5,-3],"b":[12],"c":[2,3],"cones":[{"type":"nonneg","dim":2}]}
//! ```
//!
//! `A` is row-major. Reals are written in the shortest form that parses back
//! to the same bits.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::barrier::{ConeSpec, PrimitiveCone};
use crate::error::{Error, Result};
use crate::hsd::ConicProblem;
use crate::solver::{Certificate, IterationTrace, SolveOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Nonneg,
    Exp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeEntry {
    #[serde(rename = "type")]
    pub kind: ConeKind,
    pub dim: usize,
}

/// On-disk form of a [`ConicProblem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub cones: Vec<ConeEntry>,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Configuration(format!("field `{field}`: {msg}"))
}

impl ProblemFile {
    pub fn from_problem(p: &ConicProblem) -> Self {
        let (m, n) = (p.m(), p.n());
        let mut a = Vec::with_capacity(m * n);
        for i in 0..m {
            a.extend(p.a.row(i).iter().copied());
        }
        let cones = p
            .cones
            .cones
            .iter()
            .map(|c| match c {
                PrimitiveCone::Nonnegative(d) => ConeEntry {
                    kind: ConeKind::Nonneg,
                    dim: *d,
                },
                PrimitiveCone::Exponential => ConeEntry {
                    kind: ConeKind::Exp,
                    dim: 3,
                },
            })
            .collect();
        Self {
            m,
            n,
            a,
            b: p.b.iter().copied().collect(),
            c: p.c.iter().copied().collect(),
            cones,
        }
    }

    /// Checks every field, naming the first offending one.
    pub fn into_problem(self) -> Result<ConicProblem> {
        let ProblemFile { m, n, a, b, c, cones } = self;
        if n == 0 {
            return Err(field_error("n", "problem must have at least one variable"));
        }
        if a.len() != m * n {
            return Err(field_error(
                "A",
                format!("expected m*n = {} entries, found {}", m * n, a.len()),
            ));
        }
        if b.len() != m {
            return Err(field_error(
                "b",
                format!("expected {m} entries, found {}", b.len()),
            ));
        }
        if c.len() != n {
            return Err(field_error(
                "c",
                format!("expected {n} entries, found {}", c.len()),
            ));
        }
        if cones.is_empty() {
            return Err(field_error("cones", "at least one cone is required"));
        }
        let mut spec = Vec::with_capacity(cones.len());
        for (i, cone) in cones.iter().enumerate() {
            match cone.kind {
                ConeKind::Nonneg if cone.dim == 0 => {
                    return Err(field_error(&format!("cones[{i}].dim"), "must be positive"));
                }
                ConeKind::Nonneg => spec.push(PrimitiveCone::Nonnegative(cone.dim)),
                ConeKind::Exp if cone.dim != 3 => {
                    return Err(field_error(
                        &format!("cones[{i}].dim"),
                        format!("exp cone must have dim 3, found {}", cone.dim),
                    ));
                }
                ConeKind::Exp => spec.push(PrimitiveCone::Exponential),
            }
        }
        let spec = ConeSpec::new(spec);
        if spec.dim() != n {
            return Err(field_error(
                "cones",
                format!("dimensions sum to {} but n = {n}", spec.dim()),
            ));
        }
        ConicProblem::new(
            DMatrix::from_row_slice(m, n, &a),
            DVector::from_vec(b),
            DVector::from_vec(c),
            spec,
        )
    }
}

pub fn parse_problem_str(text: &str) -> Result<ConicProblem> {
    let file: ProblemFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    file.into_problem()
}

pub fn parse_problem(path: &Path) -> Result<ConicProblem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_problem_str(&text)
}

pub fn serialize_problem(p: &ConicProblem) -> String {
    serde_json::to_string(&ProblemFile::from_problem(p)).expect("problem data is finite")
}

fn vec_json(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

/// Machine-readable summary of a solve.
pub fn outcome_json(out: &SolveOutcome) -> Value {
    let mut v = json!({
        "status": out.status.as_str(),
        "iterations": out.iterations,
        "mu": out.mu,
        "residual_norm": out.residual_norm,
        "tau": out.tau,
        "kappa": out.kappa,
        "tolerance": out.tolerance,
    });
    let obj = v.as_object_mut().expect("object literal");
    if let Some(sol) = &out.solution {
        obj.insert("primal_objective".into(), json!(sol.primal_objective));
        obj.insert("dual_objective".into(), json!(sol.dual_objective));
        obj.insert("x".into(), vec_json(&sol.x));
        obj.insert("y".into(), vec_json(&sol.y));
        obj.insert("s".into(), vec_json(&sol.s));
    }
    match &out.certificate {
        Some(Certificate::PrimalInfeasibility {
            y,
            s,
            evidence,
            violation,
        }) => {
            obj.insert(
                "certificate".into(),
                json!({"kind": "primal-infeasibility", "y": vec_json(y), "s": vec_json(s),
                       "b_dot_y": evidence, "violation": violation}),
            );
        }
        Some(Certificate::DualInfeasibility {
            x,
            evidence,
            violation,
        }) => {
            obj.insert(
                "certificate".into(),
                json!({"kind": "dual-infeasibility", "x": vec_json(x),
                       "neg_c_dot_x": evidence, "violation": violation}),
            );
        }
        None => {}
    }
    if !out.diagnostics.is_empty() {
        obj.insert("diagnostics".into(), json!(out.diagnostics));
    }
    v
}

pub const TRACE_HEADER: &str = "iter,phase,alpha,mu,residual_norm,proximity,wall_ms";

/// One row per predictor or corrector step; `proximity` is measured after the
/// step.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.3}",
            r.iter,
            r.phase.as_str(),
            r.alpha,
            r.mu,
            r.residual_norm,
            r.proximity_after,
            r.wall_ms
        );
    }
    out
}

pub fn write_trace(path: &Path, trace: &IterationTrace) -> Result<()> {
    std::fs::write(path, trace_csv(trace)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_LP: &str =
        r#"{"m":1,"n":2,"A":[5,-3],"b":[12],"c":[2,3],"cones":[{"type":"nonneg","dim":2}]}"#;

    #[test]
    fn small_problem_parses() {
        let p = parse_problem_str(SMALL_LP).unwrap();
        assert_eq!(p.a.as_slice(), &[5.0, -3.0]);
        assert_eq!(p.b[0], 12.0);
        assert_eq!(p.c.as_slice(), &[2.0, 3.0]);
        assert_eq!(p.cones.cones, vec![PrimitiveCone::Nonnegative(2)]);
        assert_eq!(parse_problem_str(&serialize_problem(&p)).unwrap(), p);
    }

    #[test]
    fn validation_names_the_field() {
        let short = SMALL_LP.replace(r#""dim":2"#, r#""dim":1"#);
        let err = parse_problem_str(&short).unwrap_err().to_string();
        assert!(err.contains("`cones`"), "{err}");

        let empty = r#"{"m":0,"n":0,"A":[],"b":[],"c":[],"cones":[]}"#;
        let err = parse_problem_str(empty).unwrap_err().to_string();
        assert!(err.contains("`n`"), "{err}");

        let bad_a = SMALL_LP.replace("[5,-3]", "[5,-3,1]");
        assert!(parse_problem_str(&bad_a).unwrap_err().to_string().contains("`A`"));

        let bad_exp = r#"{"m":0,"n":2,"A":[],"b":[],"c":[1,1],"cones":[{"type":"exp","dim":2}]}"#;
        assert!(parse_problem_str(bad_exp)
            .unwrap_err()
            .to_string()
            .contains("cones[0].dim"));
    }

    #[test]
    fn malformed_json_reports_location() {
        match parse_problem_str("{\"m\": 1,\n \"n\": }") {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("line 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_problem_str(&SMALL_LP.replace("\"cones\"", "\"extra\":1,\"cones\"")),
            Err(Error::Parse(_))
        ));
    }
}

//! The problem-spec file format: a JSON document with `variables`,
//! `constraints` and `objectives` sections.
//!
//! Schema (see the repository README for the full field reference):
//!
//! ```json
//! {
//!   "name": "example",
//!   "variables": [
//!     {"name": "x1", "lower": 0.0, "upper": 1.0, "kind": "design"}
//!   ],
//!   "constraints": [
//!     {"lhs": {"coefficients": {"x1": 1.0}, "constant": 0.0},
//!      "relation": ">=", "rhs": 0.0}
//!   ],
//!   "objectives": [
//!     {"name": "f1", "sense_in_utility": 1,
//!      "affine": {"coefficients": {"x1": 1.0}, "constant": 0.0}},
//!     {"name": "f2", "sense_in_utility": 1,
//!      "quadratic": {"scale": 1.0,
//!                    "direction": {"coefficients": {"x1": 1.0}, "constant": 0.0},
//!                    "offset": 0.0,
//!                    "linear": {"coefficients": {}, "constant": 0.0}}}
//!   ]
//! }
//! ```
//!
//! `lower`/`upper` may be `null` for unbounded variables. An objective must
//! carry exactly one of `affine` or `quadratic`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    AffineForm, LinearConstraint, MultiObjectiveProblem, Objective, ObjectiveForm, QuadraticForm,
    Relation, ScalarizedProblem, VariableKind, VariableSpec,
};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    #[serde(default)]
    name: Option<String>,
    variables: Vec<VariableDoc>,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
    objectives: Vec<ObjectiveDoc>,
}

#[derive(Serialize, Deserialize)]
struct VariableDoc {
    name: String,
    lower: Option<f64>,
    upper: Option<f64>,
    #[serde(default = "default_kind")]
    kind: String,
}

fn default_kind() -> String {
    "design".into()
}

#[derive(Serialize, Deserialize, Default)]
struct AffineDoc {
    #[serde(default)]
    coefficients: BTreeMap<String, f64>,
    #[serde(default)]
    constant: f64,
}

#[derive(Serialize, Deserialize)]
struct ConstraintDoc {
    lhs: AffineDoc,
    relation: String,
    rhs: f64,
}

#[derive(Serialize, Deserialize)]
struct QuadraticDoc {
    scale: f64,
    direction: AffineDoc,
    #[serde(default)]
    offset: f64,
    #[serde(default)]
    linear: AffineDoc,
}

#[derive(Serialize, Deserialize)]
struct ObjectiveDoc {
    name: String,
    sense_in_utility: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    affine: Option<AffineDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quadratic: Option<QuadraticDoc>,
}

impl From<&AffineForm> for AffineDoc {
    fn from(a: &AffineForm) -> Self {
        Self {
            coefficients: a.coefficients.clone(),
            constant: a.constant,
        }
    }
}

impl From<AffineDoc> for AffineForm {
    fn from(d: AffineDoc) -> Self {
        Self {
            coefficients: d.coefficients,
            constant: d.constant,
        }
    }
}

/// Serialize a problem to the spec document (pretty JSON).
pub fn to_json(problem: &MultiObjectiveProblem) -> String {
    let doc = ProblemDoc {
        name: Some(problem.name.clone()),
        variables: problem
            .variables
            .iter()
            .map(|v| VariableDoc {
                name: v.name.clone(),
                lower: v.lower.is_finite().then_some(v.lower),
                upper: v.upper.is_finite().then_some(v.upper),
                kind: match v.kind {
                    VariableKind::Design => "design".into(),
                    VariableKind::Auxiliary => "auxiliary".into(),
                },
            })
            .collect(),
        constraints: problem
            .constraints
            .iter()
            .map(|c| ConstraintDoc {
                lhs: (&c.lhs).into(),
                relation: c.relation.to_string(),
                rhs: c.rhs,
            })
            .collect(),
        objectives: problem
            .objectives
            .iter()
            .map(|o| match &o.form {
                ObjectiveForm::Affine(a) => ObjectiveDoc {
                    name: o.name.clone(),
                    sense_in_utility: o.sense_in_utility,
                    affine: Some(a.into()),
                    quadratic: None,
                },
                ObjectiveForm::Quadratic(q) => ObjectiveDoc {
                    name: o.name.clone(),
                    sense_in_utility: o.sense_in_utility,
                    affine: None,
                    quadratic: Some(QuadraticDoc {
                        scale: q.scale,
                        direction: (&q.direction).into(),
                        offset: q.offset,
                        linear: (&q.linear).into(),
                    }),
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("problem serialization cannot fail")
}

/// Parse a problem from the spec document, validating every invariant.
pub fn from_json(text: &str) -> Result<MultiObjectiveProblem> {
    let doc: ProblemDoc = serde_json::from_str(text)?;
    let variables: Vec<VariableSpec> = doc
        .variables
        .into_iter()
        .map(|v| {
            let kind = match v.kind.as_str() {
                "design" => Ok(VariableKind::Design),
                "auxiliary" => Ok(VariableKind::Auxiliary),
                other => Err(Error::InvalidProblem(format!(
                    "variable `{}` has unknown kind `{other}` (expected design|auxiliary)",
                    v.name
                ))),
            }?;
            Ok(VariableSpec {
                name: v.name,
                lower: v.lower.unwrap_or(f64::NEG_INFINITY),
                upper: v.upper.unwrap_or(f64::INFINITY),
                kind,
            })
        })
        .collect::<Result<_>>()?;
    let constraints: Vec<LinearConstraint> = doc
        .constraints
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let relation = match c.relation.as_str() {
                ">=" => Ok(Relation::Ge),
                "<=" => Ok(Relation::Le),
                "=" | "==" => Ok(Relation::Eq),
                other => Err(Error::InvalidProblem(format!(
                    "constraint {i} has unknown relation `{other}` (expected >=|<=|=)"
                ))),
            }?;
            Ok(LinearConstraint {
                lhs: c.lhs.into(),
                relation,
                rhs: c.rhs,
            })
        })
        .collect::<Result<_>>()?;
    let objectives: Vec<Objective> = doc
        .objectives
        .into_iter()
        .map(|o| {
            let form = match (o.affine, o.quadratic) {
                (Some(a), None) => Ok(ObjectiveForm::Affine(a.into())),
                (None, Some(q)) => Ok(ObjectiveForm::Quadratic(QuadraticForm {
                    scale: q.scale,
                    direction: q.direction.into(),
                    offset: q.offset,
                    linear: q.linear.into(),
                })),
                (None, None) => Err(Error::InvalidProblem(format!(
                    "objective `{}` has neither `affine` nor `quadratic`",
                    o.name
                ))),
                (Some(_), Some(_)) => Err(Error::InvalidProblem(format!(
                    "objective `{}` has both `affine` and `quadratic`",
                    o.name
                ))),
            }?;
            Ok(Objective {
                name: o.name,
                form,
                sense_in_utility: o.sense_in_utility,
            })
        })
        .collect::<Result<_>>()?;

    let problem = MultiObjectiveProblem {
        name: doc.name.unwrap_or_else(|| "unnamed".into()),
        variables,
        constraints,
        objectives,
    };
    problem.validate()?;
    Ok(problem)
}

/// Render a compiled instance in the same document shape, for repro reports.
/// The cost appears as one `cost_linear` objective plus one objective per
/// rank-one quadratic term; re-scalarizing the parts with unit weights
/// reproduces the instance.
pub(crate) fn dump_scalarized(sp: &ScalarizedProblem) -> String {
    let var_doc: Vec<VariableDoc> = sp
        .var_names
        .iter()
        .enumerate()
        .map(|(j, name)| VariableDoc {
            name: name.clone(),
            lower: sp.lower[j].is_finite().then_some(sp.lower[j]),
            upper: sp.upper[j].is_finite().then_some(sp.upper[j]),
            kind: "design".into(),
        })
        .collect();
    let named = |coeffs: &[f64]| -> BTreeMap<String, f64> {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(j, &c)| (sp.var_names[j].clone(), c))
            .collect()
    };
    let mut objectives = vec![ObjectiveDoc {
        name: "cost_linear".into(),
        sense_in_utility: 1,
        affine: Some(AffineDoc {
            coefficients: named(&sp.linear_cost),
            constant: sp.cost_constant,
        }),
        quadratic: None,
    }];
    for (k, t) in sp.quad_terms.iter().enumerate() {
        objectives.push(ObjectiveDoc {
            name: format!("cost_quad_{k}"),
            sense_in_utility: 1,
            affine: None,
            quadratic: Some(QuadraticDoc {
                scale: t.scale,
                direction: AffineDoc {
                    coefficients: named(&t.direction),
                    constant: t.direction_constant,
                },
                offset: 0.0,
                linear: AffineDoc::default(),
            }),
        });
    }
    let doc = ProblemDoc {
        name: Some("scalarized_instance".into()),
        variables: var_doc,
        constraints: sp
            .rows
            .iter()
            .map(|r| ConstraintDoc {
                lhs: AffineDoc {
                    coefficients: named(&r.coeffs),
                    constant: 0.0,
                },
                relation: r.relation.to_string(),
                rhs: r.rhs,
            })
            .collect(),
        objectives,
    };
    serde_json::to_string_pretty(&doc).expect("dump serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_case_study, build_toy_continuous, CaseStudy};
    use crate::rng::Stream;
    use rand::Rng;

    #[test]
    fn round_trip_preserves_evaluation() {
        for problem in [
            build_case_study(CaseStudy::Ackermann),
            build_case_study(CaseStudy::PivotSkid),
            build_toy_continuous(),
        ] {
            let parsed = from_json(&to_json(&problem)).unwrap();
            let mut rng = Stream::new(11, 0).rng();
            for _ in 0..100 {
                let point: Vec<f64> = problem
                    .variables
                    .iter()
                    .map(|v| {
                        let lo = v.lower.max(-50.0);
                        let hi = v.upper.min(50.0);
                        lo + (hi - lo) * rng.random::<f64>()
                    })
                    .collect();
                let a = problem.evaluate_objectives_unchecked(&point);
                let b = parsed.evaluate_objectives_unchecked(&point);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn rejects_objective_with_both_forms() {
        let text = r#"{
            "variables": [{"name": "x", "lower": 0.0, "upper": 1.0}],
            "objectives": [
                {"name": "f", "sense_in_utility": 1,
                 "affine": {"coefficients": {"x": 1.0}},
                 "quadratic": {"scale": 1.0, "direction": {"coefficients": {"x": 1.0}}}},
                {"name": "g", "sense_in_utility": 1,
                 "affine": {"coefficients": {"x": -1.0}}}
            ]
        }"#;
        let err = from_json(text).unwrap_err();
        assert!(err.to_string().contains("both"), "{err}");
    }

    #[test]
    fn rejects_unknown_relation() {
        let text = r#"{
            "variables": [{"name": "x", "lower": 0.0, "upper": 1.0}],
            "constraints": [{"lhs": {"coefficients": {"x": 1.0}}, "relation": ">>", "rhs": 0.0}],
            "objectives": [
                {"name": "f", "sense_in_utility": 1, "affine": {"coefficients": {"x": 1.0}}},
                {"name": "g", "sense_in_utility": 1, "affine": {"coefficients": {"x": -1.0}}}
            ]
        }"#;
        let err = from_json(text).unwrap_err();
        assert!(err.to_string().contains("relation"), "{err}");
    }

    #[test]
    fn rejects_undeclared_variable_reference() {
        let text = r#"{
            "variables": [{"name": "x", "lower": 0.0, "upper": 1.0}],
            "objectives": [
                {"name": "f", "sense_in_utility": 1, "affine": {"coefficients": {"y": 1.0}}},
                {"name": "g", "sense_in_utility": 1, "affine": {"coefficients": {"x": -1.0}}}
            ]
        }"#;
        assert!(from_json(text).is_err());
    }

    #[test]
    fn dump_of_scalarized_instance_parses_back() {
        let p = build_case_study(CaseStudy::PivotSkid);
        let sp = p.scalarize(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let dumped = sp.dump_spec();
        let parsed = from_json(&dumped).unwrap();
        // Unit re-scalarization of the parts reproduces the original cost.
        let sp2 = parsed.scalarize(&[1.0, 1.0]).unwrap();
        let x = [4.5, 6.0, 1.0, 1.0, 7.0, 60.0, 0.0, 0.0];
        assert!((sp.cost(&x) - sp2.cost(&x)).abs() <= 1e-12);
    }
}

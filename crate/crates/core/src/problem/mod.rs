//! Multi-objective problem model and scalarization.
//!
//! A [`MultiObjectiveProblem`] is a set of bounded variables, linear
//! constraints and `m >= 2` objectives, each affine or convex-quadratic of the
//! rank-one form `scale * (a'x + c)^2 + linear(x) + offset`. A preference
//! vector collapses the objectives into a single [`ScalarizedProblem`]
//! (LP or convex QP) ready for the embedded solvers.
//!
//! [`build_case_study`] constructs the two built-in ground vehicle problems:
//! six design variables (mount insets, wheel radii, frame length), two
//! epigraph auxiliaries, and four normalized objectives — back deck overhang,
//! vehicle length, running gear contact patch area (entering the utility with
//! a negative sign because larger is better) and turning diameter. The two
//! variants differ only in the fourth objective: affine for Ackermann
//! steering, convex quadratic for pivot/skid steering.

mod normalize;
mod spec_file;

pub use normalize::{minmax_normalize, MaxEstimate, NormalizationNote, NormalizedProblem};
pub use spec_file::{from_json, to_json};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    Design,
    Auxiliary,
}

#[derive(Debug, Clone)]
pub struct VariableSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VariableKind,
}

impl VariableSpec {
    pub fn design(name: &str, lower: f64, upper: f64) -> Self {
        Self {
            name: name.to_string(),
            lower,
            upper,
            kind: VariableKind::Design,
        }
    }

    pub fn auxiliary(name: &str, lower: f64, upper: f64) -> Self {
        Self {
            name: name.to_string(),
            lower,
            upper,
            kind: VariableKind::Auxiliary,
        }
    }
}

/// Affine expression `sum_i coefficients[i] * x_i + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineForm {
    pub coefficients: BTreeMap<String, f64>,
    pub constant: f64,
}

impl AffineForm {
    pub fn new<I: IntoIterator<Item = (&'static str, f64)>>(terms: I, constant: f64) -> Self {
        Self {
            coefficients: terms
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            constant,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Dense coefficient vector in the problem's variable order.
    fn dense(&self, index: &BTreeMap<String, usize>, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (name, &c) in &self.coefficients {
            out[index[name]] += c;
        }
        out
    }

    fn eval(&self, index: &BTreeMap<String, usize>, point: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .map(|(name, &c)| c * point[index[name]])
            .sum::<f64>()
            + self.constant
    }
}

/// Convex rank-one quadratic: `scale * (direction(x))^2 + linear(x) + offset`,
/// with `scale >= 0` so the Hessian is positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub scale: f64,
    pub direction: AffineForm,
    pub offset: f64,
    pub linear: AffineForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveForm {
    Affine(AffineForm),
    Quadratic(QuadraticForm),
}

#[derive(Debug, Clone)]
pub struct Objective {
    pub name: String,
    pub form: ObjectiveForm,
    /// +1 or -1: the factor this objective carries inside the scalarized
    /// utility. Objectives where larger is better keep their natural scale
    /// here and enter the utility with -1.
    pub sense_in_utility: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Ge => write!(f, ">="),
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub lhs: AffineForm,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct MultiObjectiveProblem {
    pub name: String,
    pub variables: Vec<VariableSpec>,
    pub constraints: Vec<LinearConstraint>,
    pub objectives: Vec<Objective>,
}

impl MultiObjectiveProblem {
    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    /// Indices of variables reported as the decision.
    pub fn design_indices(&self) -> Vec<usize> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VariableKind::Design)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn design_names(&self) -> Vec<String> {
        self.design_indices()
            .iter()
            .map(|&i| self.variables[i].name.clone())
            .collect()
    }

    pub fn objective_names(&self) -> Vec<String> {
        self.objectives.iter().map(|o| o.name.clone()).collect()
    }

    /// Bounds of the design variables, in design order.
    pub fn design_bounds(&self) -> Vec<(f64, f64)> {
        self.design_indices()
            .iter()
            .map(|&i| (self.variables[i].lower, self.variables[i].upper))
            .collect()
    }

    pub(crate) fn variable_index(&self) -> BTreeMap<String, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect()
    }

    /// Structural validation of every invariant the model promises.
    pub fn validate(&self) -> Result<()> {
        if self.objectives.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 objectives, got {}",
                self.objectives.len()
            )));
        }
        if !self.variables.iter().any(|v| v.kind == VariableKind::Design) {
            return Err(Error::InvalidProblem(
                "at least one design variable is required".into(),
            ));
        }
        let index = self.variable_index();
        if index.len() != self.variables.len() {
            return Err(Error::InvalidProblem("duplicate variable names".into()));
        }
        for v in &self.variables {
            if !(v.lower <= v.upper) {
                return Err(Error::InvalidProblem(format!(
                    "variable `{}` has lower {} > upper {}",
                    v.name, v.lower, v.upper
                )));
            }
        }
        let check_form = |form: &AffineForm, owner: &str| -> Result<()> {
            for name in form.coefficients.keys() {
                if !index.contains_key(name) {
                    return Err(Error::UnknownVariable(name.clone(), owner.to_string()));
                }
            }
            Ok(())
        };
        for (i, c) in self.constraints.iter().enumerate() {
            if c.lhs.is_empty() {
                return Err(Error::InvalidProblem(format!("constraint {i} has empty lhs")));
            }
            check_form(&c.lhs, &format!("constraint {i}"))?;
        }
        for o in &self.objectives {
            if o.sense_in_utility != 1 && o.sense_in_utility != -1 {
                return Err(Error::InvalidProblem(format!(
                    "objective `{}` sense_in_utility must be +1 or -1",
                    o.name
                )));
            }
            match &o.form {
                ObjectiveForm::Affine(a) => check_form(a, &o.name)?,
                ObjectiveForm::Quadratic(q) => {
                    if q.scale < 0.0 {
                        return Err(Error::InvalidProblem(format!(
                            "objective `{}` has negative quadratic scale {}",
                            o.name, q.scale
                        )));
                    }
                    check_form(&q.direction, &o.name)?;
                    check_form(&q.linear, &o.name)?;
                }
            }
        }
        Ok(())
    }

    /// Normalized objective values at `point`, in declaration order, without
    /// the utility signs applied. Out-of-bound points are evaluated anyway
    /// (with a warning); only a dimension mismatch is an error.
    pub fn evaluate_objectives(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars(),
                got: point.len(),
            });
        }
        for (v, &x) in self.variables.iter().zip(point) {
            if x < v.lower - 1e-9 || x > v.upper + 1e-9 {
                log::warn!(
                    "evaluating objectives outside bounds: {} = {x} not in [{}, {}]",
                    v.name,
                    v.lower,
                    v.upper
                );
            }
        }
        Ok(self.evaluate_objectives_unchecked(point))
    }

    /// Same as [`evaluate_objectives`](Self::evaluate_objectives) but without
    /// bound warnings; used in hot loops that evaluate deliberately infeasible
    /// points (sensitivity bootstraps).
    pub fn evaluate_objectives_unchecked(&self, point: &[f64]) -> Vec<f64> {
        let index = self.variable_index();
        self.objectives
            .iter()
            .map(|o| match &o.form {
                ObjectiveForm::Affine(a) => a.eval(&index, point),
                ObjectiveForm::Quadratic(q) => {
                    let d = q.direction.eval(&index, point);
                    q.scale * d * d + q.linear.eval(&index, point) + q.offset
                }
            })
            .collect()
    }

    /// Maximum violation of constraints and bounds at `point` (0 if feasible).
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let index = self.variable_index();
        let mut v: f64 = 0.0;
        for (var, &x) in self.variables.iter().zip(point) {
            v = v.max(var.lower - x).max(x - var.upper);
        }
        for c in &self.constraints {
            let lhs = c.lhs.eval(&index, point);
            let gap = match c.relation {
                Relation::Ge => c.rhs - lhs,
                Relation::Le => lhs - c.rhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            v = v.max(gap);
        }
        v
    }

    /// Extend a design-variable vector to a full point by setting each
    /// auxiliary variable to its epigraph-tight value: the smallest value
    /// satisfying its lower bound and every `>=` constraint in which it
    /// appears with positive coefficient. Auxiliaries are resolved in
    /// declaration order.
    pub fn epigraph_tight_point(&self, design: &[f64]) -> Result<Vec<f64>> {
        let design_idx = self.design_indices();
        if design.len() != design_idx.len() {
            return Err(Error::DimensionMismatch {
                expected: design_idx.len(),
                got: design.len(),
            });
        }
        let index = self.variable_index();
        let mut point = vec![f64::NAN; self.n_vars()];
        for (&i, &x) in design_idx.iter().zip(design) {
            point[i] = x;
        }
        for (i, var) in self.variables.iter().enumerate() {
            if var.kind != VariableKind::Auxiliary {
                continue;
            }
            let mut value = var.lower.max(f64::NEG_INFINITY);
            for c in &self.constraints {
                if c.relation != Relation::Ge {
                    continue;
                }
                let Some(&coef) = c.lhs.coefficients.get(&var.name) else {
                    continue;
                };
                if coef <= 0.0 {
                    continue;
                }
                let mut rest = c.lhs.constant;
                let mut resolved = true;
                for (name, &cj) in &c.lhs.coefficients {
                    if name == &var.name {
                        continue;
                    }
                    let xj = point[index[name]];
                    if xj.is_nan() {
                        resolved = false;
                        break;
                    }
                    rest += cj * xj;
                }
                if resolved {
                    value = value.max((c.rhs - rest) / coef);
                }
            }
            point[i] = value;
        }
        Ok(point)
    }

    /// Compile the preference-weighted utility into a single LP/QP instance.
    /// Weights must be strictly positive (importance-weight semantics).
    pub fn scalarize(&self, beta: &[f64]) -> Result<ScalarizedProblem> {
        for (i, &b) in beta.iter().enumerate() {
            if !(b > 0.0) {
                return Err(Error::NonpositiveWeight { index: i, value: b });
            }
        }
        self.scalarize_signed(beta)
    }

    /// Scalarize without the positivity gate. Preference models that admit
    /// sign changes (plain multivariate normal) still induce a well-defined
    /// linear utility; a negative weight on a quadratic objective would make
    /// the cost indefinite and is rejected.
    pub fn scalarize_signed(&self, beta: &[f64]) -> Result<ScalarizedProblem> {
        if beta.len() != self.objectives.len() {
            return Err(Error::DimensionMismatch {
                expected: self.objectives.len(),
                got: beta.len(),
            });
        }
        let index = self.variable_index();
        let n = self.n_vars();
        let mut linear_cost = vec![0.0; n];
        let mut cost_constant = 0.0;
        let mut quad_terms = Vec::new();

        let add_affine = |dst: &mut Vec<f64>, a: &AffineForm, w: f64, konst: &mut f64| {
            for (name, &c) in &a.coefficients {
                dst[index[name]] += w * c;
            }
            *konst += w * a.constant;
        };

        for (o, &b) in self.objectives.iter().zip(beta) {
            let w = b * f64::from(o.sense_in_utility);
            match &o.form {
                ObjectiveForm::Affine(a) => {
                    add_affine(&mut linear_cost, a, w, &mut cost_constant)
                }
                ObjectiveForm::Quadratic(q) => {
                    let scale = w * q.scale;
                    if scale < 0.0 {
                        return Err(Error::InvalidProblem(format!(
                            "weighted quadratic objective `{}` has negative curvature",
                            o.name
                        )));
                    }
                    add_affine(&mut linear_cost, &q.linear, w, &mut cost_constant);
                    cost_constant += w * q.offset;
                    quad_terms.push(RankOneTerm {
                        scale,
                        direction: q.direction.dense(&index, n),
                        direction_constant: q.direction.constant,
                    });
                }
            }
        }

        let rows = self
            .constraints
            .iter()
            .map(|c| Row {
                coeffs: c.lhs.dense(&index, n),
                relation: c.relation,
                rhs: c.rhs - c.lhs.constant,
            })
            .collect();

        let kind = if quad_terms.is_empty() {
            ProblemKind::Lp
        } else {
            ProblemKind::ConvexQp
        };
        Ok(ScalarizedProblem {
            kind,
            linear_cost,
            cost_constant,
            quad_terms,
            rows,
            lower: self.variables.iter().map(|v| v.lower).collect(),
            upper: self.variables.iter().map(|v| v.upper).collect(),
            var_names: self.variables.iter().map(|v| v.name.clone()).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Lp,
    ConvexQp,
}

/// One convex rank-one cost term `scale * (direction.x + direction_constant)^2`.
#[derive(Debug, Clone)]
pub struct RankOneTerm {
    pub scale: f64,
    pub direction: Vec<f64>,
    pub direction_constant: f64,
}

/// A constraint row in dense form: `coeffs . x (relation) rhs`.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A compiled single-objective instance over box-bounded variables.
#[derive(Debug, Clone)]
pub struct ScalarizedProblem {
    pub kind: ProblemKind,
    pub linear_cost: Vec<f64>,
    pub cost_constant: f64,
    pub quad_terms: Vec<RankOneTerm>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub var_names: Vec<String>,
}

impl ScalarizedProblem {
    pub fn n_vars(&self) -> usize {
        self.linear_cost.len()
    }

    /// Total cost at `point`, including the constant.
    pub fn cost(&self, point: &[f64]) -> f64 {
        let mut c = self.cost_constant;
        for (a, &x) in self.linear_cost.iter().zip(point) {
            c += a * x;
        }
        for t in &self.quad_terms {
            let d: f64 = t
                .direction
                .iter()
                .zip(point)
                .map(|(a, &x)| a * x)
                .sum::<f64>()
                + t.direction_constant;
            c += t.scale * d * d;
        }
        c
    }

    /// Gradient of the cost at `point`.
    pub fn gradient(&self, point: &[f64]) -> Vec<f64> {
        let mut g = self.linear_cost.clone();
        for t in &self.quad_terms {
            let d: f64 = t
                .direction
                .iter()
                .zip(point)
                .map(|(a, &x)| a * x)
                .sum::<f64>()
                + t.direction_constant;
            for (gi, &ai) in g.iter_mut().zip(&t.direction) {
                *gi += 2.0 * t.scale * d * ai;
            }
        }
        g
    }

    /// Maximum violation of rows and bounds at `point`.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for ((&l, &u), &x) in self.lower.iter().zip(&self.upper).zip(point) {
            v = v.max(l - x).max(x - u);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().zip(point).map(|(a, &x)| a * x).sum();
            let gap = match row.relation {
                Relation::Ge => row.rhs - lhs,
                Relation::Le => lhs - row.rhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            v = v.max(gap);
        }
        v
    }

    /// Render as a problem-spec document (one objective) for repro reports.
    pub fn dump_spec(&self) -> String {
        spec_file::dump_scalarized(self)
    }
}

/// Case-study variant selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStudy {
    /// Ackermann steering: affine turning diameter, LP scalarizations.
    Ackermann,
    /// Pivot/skid steering: convex quadratic turning diameter, QP scalarizations.
    PivotSkid,
}

/// Contact patch expression `x6 - 2 x5 - 3.414 x3 - 0.586 x4` (inches of
/// track length; area is this times the 14-inch track width).
fn contact_patch_direction() -> AffineForm {
    AffineForm::new(
        [("x6", 1.0), ("x5", -2.0), ("x3", -3.414), ("x4", -0.586)],
        0.0,
    )
}

/// Build one of the two vehicle case studies with normalized objectives.
pub fn build_case_study(variant: CaseStudy) -> MultiObjectiveProblem {
    let variables = vec![
        VariableSpec::design("x1", 4.5, 23.0),
        VariableSpec::design("x2", 6.0, 20.0),
        VariableSpec::design("x3", 1.0, 5.0),
        VariableSpec::design("x4", 1.0, 3.0),
        VariableSpec::design("x5", 0.0, 15.0),
        VariableSpec::design("x6", 34.0, 132.0),
        VariableSpec::auxiliary("theta1", 0.0, 23.0),
        VariableSpec::auxiliary("theta2", 0.0, 20.0),
    ];
    let constraints = vec![
        // drive gear radius >= road wheel radius
        LinearConstraint {
            lhs: AffineForm::new([("x4", 1.0), ("x3", -1.0)], 0.0),
            relation: Relation::Ge,
            rhs: 0.0,
        },
        // theta1 >= x1 - x5 (epigraph of back deck overhang)
        LinearConstraint {
            lhs: AffineForm::new([("theta1", 1.0), ("x1", -1.0), ("x5", 1.0)], 0.0),
            relation: Relation::Ge,
            rhs: 0.0,
        },
        // theta2 >= x2 - x5
        LinearConstraint {
            lhs: AffineForm::new([("theta2", 1.0), ("x2", -1.0), ("x5", 1.0)], 0.0),
            relation: Relation::Ge,
            rhs: 0.0,
        },
        // contact patch area >= 0
        LinearConstraint {
            lhs: contact_patch_direction(),
            relation: Relation::Ge,
            rhs: 0.0,
        },
    ];

    // f3 = contact patch expression * 14 / 1792
    let f3_coeffs = {
        let mut a = contact_patch_direction();
        for c in a.coefficients.values_mut() {
            *c *= 14.0 / 1792.0;
        }
        a
    };

    let f4 = match variant {
        CaseStudy::Ackermann => Objective {
            name: "f4".into(),
            form: ObjectiveForm::Affine(AffineForm::new(
                [("x6", 1.0 / 128.0), ("x5", -2.0 / 128.0)],
                -4.0 / 128.0,
            )),
            sense_in_utility: 1,
        },
        CaseStudy::PivotSkid => Objective {
            name: "f4".into(),
            form: ObjectiveForm::Quadratic(QuadraticForm {
                scale: 196.0 / 3211264.0,
                direction: contact_patch_direction(),
                offset: -1936.0 / 3211264.0,
                linear: AffineForm::default(),
            }),
            sense_in_utility: 1,
        },
    };

    let problem = MultiObjectiveProblem {
        name: match variant {
            CaseStudy::Ackermann => "case1_ackermann".into(),
            CaseStudy::PivotSkid => "case2_pivot_skid".into(),
        },
        variables,
        constraints,
        objectives: vec![
            Objective {
                name: "f1".into(),
                form: ObjectiveForm::Affine(AffineForm::new([("theta1", 1.0 / 23.0)], 0.0)),
                sense_in_utility: 1,
            },
            Objective {
                name: "f2".into(),
                form: ObjectiveForm::Affine(AffineForm::new(
                    [
                        ("x6", 1.0 / 141.0),
                        ("theta1", 1.0 / 141.0),
                        ("theta2", 1.0 / 141.0),
                    ],
                    0.0,
                )),
                sense_in_utility: 1,
            },
            Objective {
                name: "f3".into(),
                form: ObjectiveForm::Affine(f3_coeffs),
                sense_in_utility: -1,
            },
            f4,
        ],
    };
    debug_assert!(problem.validate().is_ok());
    problem
}

/// The same vehicle problem with raw (unnormalized) objectives, for
/// exercising min-max normalization against the built-in divisors.
pub fn build_case_study_raw(variant: CaseStudy) -> MultiObjectiveProblem {
    let mut p = build_case_study(variant);
    p.name.push_str("_raw");
    let patch_area = {
        let mut a = contact_patch_direction();
        for c in a.coefficients.values_mut() {
            *c *= 14.0;
        }
        a
    };
    p.objectives[0].form = ObjectiveForm::Affine(AffineForm::new([("theta1", 1.0)], 0.0));
    p.objectives[1].form = ObjectiveForm::Affine(AffineForm::new(
        [("x6", 1.0), ("theta1", 1.0), ("theta2", 1.0)],
        0.0,
    ));
    p.objectives[2].form = ObjectiveForm::Affine(patch_area.clone());
    p.objectives[3].form = match variant {
        CaseStudy::Ackermann => {
            ObjectiveForm::Affine(AffineForm::new([("x6", 1.0), ("x5", -2.0)], 0.0))
        }
        CaseStudy::PivotSkid => ObjectiveForm::Quadratic(QuadraticForm {
            scale: 1.0,
            direction: patch_area,
            offset: 0.0,
            linear: AffineForm::default(),
        }),
    };
    p
}

/// One-variable toy with two competing lines; the optimum jumps between the
/// interval endpoints as the weighted slope changes sign. Stated in
/// minimization form (objectives are the negated lines).
pub fn build_toy_discrete() -> MultiObjectiveProblem {
    MultiObjectiveProblem {
        name: "toy_discrete".into(),
        variables: vec![VariableSpec::design("x", 0.0, 15.0)],
        constraints: vec![],
        objectives: vec![
            Objective {
                name: "g1".into(),
                form: ObjectiveForm::Affine(AffineForm::new([("x", -1.0)], 15.0)),
                sense_in_utility: 1,
            },
            Objective {
                name: "g2".into(),
                form: ObjectiveForm::Affine(AffineForm::new([("x", -2.0)], 55.0)),
                sense_in_utility: 1,
            },
        ],
    }
}

/// One-variable toy with two competing concave parabolas (negated to convex
/// quadratics); the optimum moves continuously with the weights.
pub fn build_toy_continuous() -> MultiObjectiveProblem {
    let quad = |b: f64, a: f64| {
        ObjectiveForm::Quadratic(QuadraticForm {
            scale: 1.0,
            direction: AffineForm::new([("x", 1.0)], 0.0),
            offset: -a,
            linear: AffineForm::new([("x", b)], 0.0),
        })
    };
    MultiObjectiveProblem {
        name: "toy_continuous".into(),
        variables: vec![VariableSpec::design("x", f64::NEG_INFINITY, f64::INFINITY)],
        constraints: vec![],
        objectives: vec![
            Objective {
                name: "g1".into(),
                form: quad(1.0, 1.0),
                sense_in_utility: 1,
            },
            Objective {
                name: "g2".into(),
                form: quad(3.0, 2.0),
                sense_in_utility: 1,
            },
        ],
    }
}

/// Look up a built-in problem by its CLI name.
pub fn builtin_problem(name: &str) -> Option<MultiObjectiveProblem> {
    match name {
        "case1_ackermann" => Some(build_case_study(CaseStudy::Ackermann)),
        "case2_pivot_skid" => Some(build_case_study(CaseStudy::PivotSkid)),
        "toy_discrete" => Some(build_toy_discrete()),
        "toy_continuous" => Some(build_toy_continuous()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 4] = [
    "case1_ackermann",
    "case2_pivot_skid",
    "toy_discrete",
    "toy_continuous",
];

//! Design exploration: solving jobs against devices, running scenarios and
//! checking that definitions are inhabited.

mod cache;
mod config;
mod request;
mod workspace;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

pub use cache::{cache_key, Cache, CacheKey, QueryKind};
pub use config::Configuration;
pub use request::{
    configuration_from_json, device_schema, exploration_json, outcome_json, parse_binding,
    parse_literal, ComponentSchema, DeviceSchema, JobRequest, LeafSchema, LocationSchema,
    ObjectiveRequest, ParameterSchema, PropertySchema,
};
pub use workspace::{
    analyze_workspace, parse_sources, DefKind, Explorer, InhabitanceEntry, ParsedSources,
    SourceInput, WorkspaceReport,
};

use crate::eval::{eval_expr, lift, EvalError, Value};
use crate::lower::{
    lower_action_inhabitance, lower_device, lower_expr, lower_type_inhabitance, path_name,
    ConstraintModel, FlatExpr, LowerError,
};
use crate::semantics::{analyze_device_expr, resolve_leaf, Diagnostic, TExpr, TypedSpec};
use crate::solver::{self, Budget, DomainBox, SolveError, Stats, Status};
use crate::syntax::{Expr, Literal, Path, PrimType, Sense, Span};

#[derive(Debug, Clone, Error)]
pub enum ExploreError {
    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown definition `{0}`")]
    UnknownDefinition(String),
    #[error("{0}")]
    BadPath(String),
    #[error("invalid expression: {}", .0.iter().map(|d| d.message.as_str()).collect::<Vec<_>>().join("; "))]
    BadExpr(Vec<Diagnostic>),
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A request to find a configuration of a device: some leaves fixed, extra
/// constraints, and optionally an objective.
#[derive(Debug, Clone, Default)]
pub struct Job {
    pub device: String,
    pub fixed: Vec<(Path, Literal)>,
    pub constraints: Vec<Expr>,
    pub objective: Option<(Sense, Expr)>,
}

impl Job {
    pub fn new(device: impl Into<String>) -> Self {
        Job {
            device: device.into(),
            ..Job::default()
        }
    }

    pub fn fix(mut self, path: Path, value: Literal) -> Self {
        self.fixed.push((path, value));
        self
    }

    pub fn constrain(mut self, e: Expr) -> Self {
        self.constraints.push(e);
        self
    }

    pub fn objective(mut self, sense: Sense, e: Expr) -> Self {
        self.objective = Some((sense, e));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExplorationOutcome {
    Found {
        configuration: Configuration,
        objective: Option<i64>,
        /// True when the objective value is proven optimal.
        optimal: bool,
    },
    EmptySpace,
    Exhausted {
        incumbent: Option<Configuration>,
        objective: Option<i64>,
    },
}

impl ExplorationOutcome {
    pub fn configuration(&self) -> Option<&Configuration> {
        match self {
            ExplorationOutcome::Found { configuration, .. } => Some(configuration),
            ExplorationOutcome::Exhausted { incumbent, .. } => incumbent.as_ref(),
            ExplorationOutcome::EmptySpace => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExplorationOutcome::Found { .. } => "found",
            ExplorationOutcome::EmptySpace => "empty",
            ExplorationOutcome::Exhausted { .. } => "exhausted",
        }
    }
}

/// Result of solving a job, with sizes and timings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exploration {
    pub outcome: ExplorationOutcome,
    pub variables: usize,
    pub constraints: usize,
    pub translation: Duration,
    pub solving: Duration,
    pub stats: Stats,
}

/// Typed form of a job.
struct TypedJob<'a> {
    device: &'a str,
    fixed: Vec<(String, Literal)>,
    constraints: Vec<TExpr>,
    objective: Option<(Sense, TExpr)>,
}

fn type_job<'a>(tspec: &TypedSpec, job: &'a Job) -> Result<TypedJob<'a>, ExploreError> {
    let dev = tspec
        .spec
        .device_def(&job.device)
        .ok_or_else(|| ExploreError::UnknownDevice(job.device.clone()))?;
    let mut fixed = Vec::new();
    for (path, lit) in &job.fixed {
        let sort = resolve_leaf(&tspec.spec, dev, path).map_err(ExploreError::BadPath)?;
        if !literal_fits(sort, lit) {
            return Err(ExploreError::BadPath(format!(
                "`{path}` has type {sort} but is fixed to {lit}"
            )));
        }
        fixed.push((path_name(path), *lit));
    }
    let mut constraints = Vec::new();
    for c in &job.constraints {
        let t = analyze_device_expr(tspec, &job.device, c).map_err(ExploreError::BadExpr)?;
        if t.ty != crate::semantics::Ty::Bool {
            return Err(ExploreError::BadExpr(vec![Diagnostic::error(
                format!("constraint must be bool, found {}", t.ty),
                c.span,
            )]));
        }
        constraints.push(t);
    }
    let objective = match &job.objective {
        None => None,
        Some((sense, e)) => {
            let t = analyze_device_expr(tspec, &job.device, e).map_err(ExploreError::BadExpr)?;
            if t.ty != crate::semantics::Ty::Int {
                return Err(ExploreError::BadExpr(vec![Diagnostic::error(
                    format!("objective must be int, found {}", t.ty),
                    e.span,
                )]));
            }
            Some((*sense, t))
        }
    };
    Ok(TypedJob {
        device: &job.device,
        fixed,
        constraints,
        objective,
    })
}

fn literal_fits(sort: PrimType, lit: &Literal) -> bool {
    matches!(
        (sort, lit),
        (PrimType::Int, Literal::Int(_)) | (PrimType::Bool, Literal::Bool(_))
    )
}

fn literal_flat(lit: &Literal) -> FlatExpr {
    match lit {
        Literal::Int(v) => FlatExpr::Int(*v),
        Literal::Bool(b) => FlatExpr::Bool(*b),
    }
}

/// The device model extended with a job's bindings, constraints and objective.
fn job_model(tspec: &TypedSpec, job: &TypedJob) -> Result<ConstraintModel, ExploreError> {
    let mut model = lower_device(tspec, job.device)?;
    for (name, lit) in &job.fixed {
        model
            .constraints
            .push(FlatExpr::eq(FlatExpr::var(name.clone()), literal_flat(lit)));
    }
    for c in &job.constraints {
        model.constraints.push(lower_expr(tspec, c)?);
    }
    if let Some((sense, e)) = &job.objective {
        model.objective = Some((*sense, lower_expr(tspec, e)?));
    }
    Ok(model)
}

fn solve_typed(
    tspec: &TypedSpec,
    job: &TypedJob,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<Exploration, ExploreError> {
    let t0 = Instant::now();
    let model = job_model(tspec, job)?;
    let translation = t0.elapsed();
    let t1 = Instant::now();
    let r = solver::solve(&model, dbox, budget)?;
    let solving = t1.elapsed();
    let config = match &r.assignment {
        Some(a) => Some(Configuration::new(lift(tspec, job.device, a)?)),
        None => None,
    };
    let outcome = match (r.status, config) {
        (Status::Sat | Status::Optimal, Some(configuration)) => ExplorationOutcome::Found {
            configuration,
            objective: r.objective,
            optimal: r.status == Status::Optimal,
        },
        (Status::Unsat, _) => ExplorationOutcome::EmptySpace,
        (_, incumbent) => ExplorationOutcome::Exhausted {
            incumbent,
            objective: r.objective,
        },
    };
    Ok(Exploration {
        outcome,
        variables: model.num_vars(),
        constraints: model.num_constraints(),
        translation,
        solving,
        stats: r.stats,
    })
}

/// Finds a configuration of the job's device satisfying every constraint,
/// optimal for the objective if there is one.
pub fn find_configuration(
    tspec: &TypedSpec,
    job: &Job,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<Exploration, ExploreError> {
    let typed = type_job(tspec, job)?;
    solve_typed(tspec, &typed, dbox, budget)
}

/// The constraint model a job solves, for export.
pub fn job_constraint_model(tspec: &TypedSpec, job: &Job) -> Result<ConstraintModel, ExploreError> {
    let typed = type_job(tspec, job)?;
    job_model(tspec, &typed)
}

/// Outcome of one expectation against the scenario's witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectationResult {
    pub text: String,
    #[serde(skip)]
    pub span: Span,
    pub passed: bool,
    /// Values of the primitive leaves the expectation refers to.
    pub witness: Vec<(String, Value)>,
    /// Refers to leaves the scenario does not fix, so another witness of
    /// the same scenario could evaluate it differently.
    pub witness_dependent: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    #[serde(skip)]
    pub span: Span,
    pub device: String,
    pub exploration: Exploration,
    pub expectations: Vec<ExpectationResult>,
}

impl ScenarioReport {
    /// A scenario passes when a configuration was found and every
    /// expectation holds on it.
    pub fn passed(&self) -> bool {
        matches!(self.exploration.outcome, ExplorationOutcome::Found { .. })
            && self.expectations.iter().all(|e| e.passed)
    }

    /// One-line explanation of a failure, or `None` when it passed.
    pub fn failure(&self) -> Option<String> {
        match &self.exploration.outcome {
            ExplorationOutcome::EmptySpace => {
                Some("no configuration satisfies the scenario (empty space)".into())
            }
            ExplorationOutcome::Exhausted { .. } => {
                Some("search budget exhausted before a conclusive answer".into())
            }
            ExplorationOutcome::Found { .. } => {
                let failed: Vec<&str> = self
                    .expectations
                    .iter()
                    .filter(|e| !e.passed)
                    .map(|e| e.text.as_str())
                    .collect();
                (!failed.is_empty()).then(|| format!("failed: {}", failed.join(", ")))
            }
        }
    }
}

/// Solves a scenario once and evaluates each of its expectations on the
/// witness.
pub fn run_scenario(
    tspec: &TypedSpec,
    name: &str,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<ScenarioReport, ExploreError> {
    let sc = tspec
        .scenarios
        .get(name)
        .ok_or_else(|| ExploreError::UnknownScenario(name.to_string()))?;
    let job = TypedJob {
        device: sc.device.as_str(),
        fixed: sc
            .bindings
            .iter()
            .map(|b| (path_name(&b.path), b.value))
            .collect(),
        constraints: sc.constraints.clone(),
        objective: sc.objective.clone(),
    };
    let exploration = solve_typed(tspec, &job, dbox, budget)?;
    let fixed: HashSet<&str> = job.fixed.iter().map(|(n, _)| n.as_str()).collect();
    let source = tspec.spec.scenario_def(name);
    let mut expectations = Vec::new();
    for (i, t) in sc.tests.iter().enumerate() {
        let text = source
            .and_then(|s| s.tests.get(i))
            .map(|t| crate::syntax::print_expr(&t.expectation))
            .unwrap_or_default();
        let flat = lower_expr(tspec, &t.expectation)?;
        let refs: IndexSet<String> = flat.vars().into_iter().map(str::to_string).collect();
        let witness_dependent = refs.iter().any(|r| !fixed.contains(r.as_str()));
        let mut result = ExpectationResult {
            text,
            span: t.expectation.span,
            passed: false,
            witness: Vec::new(),
            witness_dependent,
            error: None,
        };
        if let ExplorationOutcome::Found { configuration, .. } = &exploration.outcome {
            let flat_config = configuration.flat();
            result.witness = refs
                .iter()
                .filter_map(|r| {
                    flat_config.get(r).map(|s| {
                        let v = match s {
                            solver::Scalar::Int(v) => Value::Int(*v),
                            solver::Scalar::Bool(b) => Value::Bool(*b),
                        };
                        (r.clone(), v)
                    })
                })
                .collect();
            match eval_expr(tspec, &configuration.value, &t.expectation, &[]) {
                Ok(Value::Bool(b)) => result.passed = b,
                Ok(other) => result.error = Some(format!("expectation evaluated to {other}")),
                Err(e) => result.error = Some(e.to_string()),
            }
        }
        expectations.push(result);
    }
    Ok(ScenarioReport {
        name: name.to_string(),
        span: sc.span,
        device: sc.device.to_string(),
        exploration,
        expectations,
    })
}

/// Whether a definition has at least one valid instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inhabitance {
    Inhabited,
    Uninhabited,
    /// The search budget ran out first.
    Unknown,
}

/// The model whose solutions are the instances of a definition.
pub fn inhabitance_model(
    tspec: &TypedSpec,
    kind: DefKind,
    name: &str,
) -> Result<ConstraintModel, ExploreError> {
    Ok(match kind {
        DefKind::Type => lower_type_inhabitance(tspec, name)?,
        DefKind::Action => lower_action_inhabitance(tspec, name)?,
        DefKind::Device => lower_device(tspec, name)?,
    })
}

pub fn check_inhabitance(
    tspec: &TypedSpec,
    kind: DefKind,
    name: &str,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<Inhabitance, ExploreError> {
    let model = inhabitance_model(tspec, kind, name)?;
    let r = solver::check_sat(&model, dbox, budget)?;
    Ok(match r.status {
        Status::Sat | Status::Optimal => Inhabitance::Inhabited,
        Status::Unsat => Inhabitance::Uninhabited,
        Status::Exhausted => Inhabitance::Unknown,
    })
}

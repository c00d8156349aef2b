//! Embedded finite-domain solver over [`ConstraintModel`]s.
//!
//! Integer comparisons are normalised into polynomials (`p <= 0`, `p == 0`,
//! `p != 0`) and propagated with interval bounds; boolean structure is kept
//! as a node arena. Search branches on the first unfixed variable in
//! declaration order and explores the lower half of its domain first, so the
//! first solution found is the lexicographically smallest one.

mod compile;
mod propagate;
mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lower::{ConstraintModel, FlatExpr};
use crate::syntax::{BinaryOp, UnaryOp};

pub const DEFAULT_INT_MIN: i64 = -1_000_000;
pub const DEFAULT_INT_MAX: i64 = 1_000_000;
pub const DEFAULT_MAX_NODES: u64 = 10_000_000;
pub const DEFAULT_MAX_TIME: Duration = Duration::from_secs(10);

/// Inclusive variable bounds: a default for every integer variable plus
/// per-variable overrides (booleans are overridden with 0/1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainBox {
    pub int_min: i64,
    pub int_max: i64,
    #[serde(default)]
    pub overrides: BTreeMap<String, (i64, i64)>,
}

impl Default for DomainBox {
    fn default() -> Self {
        DomainBox::uniform(DEFAULT_INT_MIN, DEFAULT_INT_MAX)
    }
}

impl DomainBox {
    pub fn uniform(int_min: i64, int_max: i64) -> Self {
        DomainBox {
            int_min,
            int_max,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_var(mut self, name: impl Into<String>, lo: i64, hi: i64) -> Self {
        self.overrides.insert(name.into(), (lo, hi));
        self
    }

    pub fn int_bounds(&self, name: &str) -> (i64, i64) {
        self.overrides
            .get(name)
            .copied()
            .unwrap_or((self.int_min, self.int_max))
    }

    pub fn bool_bounds(&self, name: &str) -> (i64, i64) {
        match self.overrides.get(name) {
            Some(&(lo, hi)) => (lo.max(0), hi.min(1)),
            None => (0, 1),
        }
    }
}

/// Search limits; whichever is hit first ends the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: DEFAULT_MAX_NODES,
            max_time: Some(DEFAULT_MAX_TIME),
        }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes,
            max_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Bool(bool),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Values of all model variables, in declaration order.
pub type Assignment = IndexMap<String, Scalar>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Optimal,
    Unsat,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub propagations: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Witness for `Sat`/`Optimal`; best incumbent (if any) for `Exhausted`.
    pub assignment: Option<Assignment>,
    /// Objective value of `assignment` when optimizing.
    pub objective: Option<i64>,
    pub stats: Stats,
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, Status::Sat | Status::Optimal)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("model has no objective")]
    NoObjective,
}

/// Finds the first solution in search order.
pub fn check_sat(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    let r = search::check_sat_impl(model, dbox, budget)?;
    debug_assert!(r
        .assignment
        .as_ref()
        .is_none_or(|a| evaluate(model, a) == Ok(true)));
    Ok(r)
}

/// Finds an optimal solution for the model's objective.
pub fn optimize(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    let r = search::optimize_impl(model, dbox, budget)?;
    debug_assert!(r
        .assignment
        .as_ref()
        .is_none_or(|a| evaluate(model, a) == Ok(true)));
    Ok(r)
}

/// Runs [`optimize`] when the model has an objective, else [`check_sat`].
pub fn solve(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    if model.objective.is_some() {
        optimize(model, dbox, budget)
    } else {
        check_sat(model, dbox, budget)
    }
}

/// All solutions, in search order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<Assignment>,
    /// False when the budget or `limit` cut the enumeration short.
    pub complete: bool,
    pub stats: Stats,
}

pub fn all_solutions(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
    limit: usize,
) -> Result<Enumeration, SolveError> {
    let (solutions, outcome, stats) = search::all_solutions_impl(model, dbox, budget, limit)?;
    Ok(Enumeration {
        solutions,
        complete: outcome == search::Outcome::Complete,
        stats,
    })
}

/// True iff every constraint holds under `a`. Constraints whose arithmetic
/// leaves the 128-bit range count as violated.
pub fn evaluate(model: &ConstraintModel, a: &Assignment) -> Result<bool, SolveError> {
    for (name, sort) in &model.vars {
        match (a.get(name), sort) {
            (Some(Scalar::Int(_)), crate::lower::Sort::Int)
            | (Some(Scalar::Bool(_)), crate::lower::Sort::Bool) => {}
            (Some(_), _) => {
                return Err(SolveError::MalformedModel(format!(
                    "`{name}` is assigned a value of the wrong sort"
                )))
            }
            (None, _) => {
                return Err(SolveError::MalformedModel(format!(
                    "`{name}` is unassigned"
                )))
            }
        }
    }
    for c in &model.constraints {
        match eval_wide(c, a) {
            Ok(Wide::Bool(true)) => {}
            Ok(Wide::Bool(false)) | Err(EvalFault::Overflow) => return Ok(false),
            Ok(Wide::Int(_)) => {
                return Err(SolveError::MalformedModel(
                    "constraint is not a boolean expression".into(),
                ))
            }
            Err(EvalFault::Malformed(m)) => return Err(SolveError::MalformedModel(m)),
        }
    }
    Ok(true)
}

/// Value of a flat expression under `a`.
pub fn eval_flat(e: &FlatExpr, a: &Assignment) -> Result<Scalar, SolveError> {
    match eval_wide(e, a) {
        Ok(Wide::Bool(b)) => Ok(Scalar::Bool(b)),
        Ok(Wide::Int(v)) => i64::try_from(v)
            .map(Scalar::Int)
            .map_err(|_| SolveError::MalformedModel("value out of 64-bit range".into())),
        Err(EvalFault::Overflow) => Err(SolveError::MalformedModel("arithmetic overflow".into())),
        Err(EvalFault::Malformed(m)) => Err(SolveError::MalformedModel(m)),
    }
}

enum Wide {
    Int(i128),
    Bool(bool),
}

enum EvalFault {
    Overflow,
    Malformed(String),
}

fn eval_wide(e: &FlatExpr, a: &Assignment) -> Result<Wide, EvalFault> {
    let int = |e: &FlatExpr| match eval_wide(e, a)? {
        Wide::Int(v) => Ok(v),
        Wide::Bool(_) => Err(EvalFault::Malformed("boolean used as an integer".into())),
    };
    let boolean = |e: &FlatExpr| match eval_wide(e, a)? {
        Wide::Bool(b) => Ok(b),
        Wide::Int(_) => Err(EvalFault::Malformed("integer used as a boolean".into())),
    };
    let ovf = || EvalFault::Overflow;
    Ok(match e {
        FlatExpr::Int(v) => Wide::Int(*v as i128),
        FlatExpr::Bool(b) => Wide::Bool(*b),
        FlatExpr::Var(v) => match a.get(v) {
            Some(Scalar::Int(x)) => Wide::Int(*x as i128),
            Some(Scalar::Bool(b)) => Wide::Bool(*b),
            None => return Err(EvalFault::Malformed(format!("`{v}` is unassigned"))),
        },
        FlatExpr::Unary(UnaryOp::Neg, x) => Wide::Int(int(x)?.checked_neg().ok_or_else(ovf)?),
        FlatExpr::Unary(UnaryOp::Not, x) => Wide::Bool(!boolean(x)?),
        FlatExpr::Binary(op, l, r) => match op {
            BinaryOp::Add => Wide::Int(int(l)?.checked_add(int(r)?).ok_or_else(ovf)?),
            BinaryOp::Sub => Wide::Int(int(l)?.checked_sub(int(r)?).ok_or_else(ovf)?),
            BinaryOp::Mul => Wide::Int(int(l)?.checked_mul(int(r)?).ok_or_else(ovf)?),
            BinaryOp::And => Wide::Bool(boolean(l)? & boolean(r)?),
            BinaryOp::Or => Wide::Bool(boolean(l)? | boolean(r)?),
            BinaryOp::Implies => Wide::Bool(!boolean(l)? | boolean(r)?),
            BinaryOp::Eq | BinaryOp::Ne => {
                let same = match (eval_wide(l, a)?, eval_wide(r, a)?) {
                    (Wide::Int(x), Wide::Int(y)) => x == y,
                    (Wide::Bool(x), Wide::Bool(y)) => x == y,
                    _ => {
                        return Err(EvalFault::Malformed(
                            "comparison of a boolean with an integer".into(),
                        ))
                    }
                };
                Wide::Bool(same == (*op == BinaryOp::Eq))
            }
            BinaryOp::Lt => Wide::Bool(int(l)? < int(r)?),
            BinaryOp::Le => Wide::Bool(int(l)? <= int(r)?),
            BinaryOp::Gt => Wide::Bool(int(l)? > int(r)?),
            BinaryOp::Ge => Wide::Bool(int(l)? >= int(r)?),
        },
    })
}

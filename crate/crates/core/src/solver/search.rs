//! Depth-first search, optimization and enumeration.

use std::time::Instant;

use super::compile::{compile_model, Compiled, Poly};
use super::propagate::{Itv, Propagator, State, HUGE};
use super::{
    evaluate, Assignment, Budget, DomainBox, Scalar, SolveError, SolveResult, Stats, Status,
};
use crate::lower::{ConstraintModel, Sort};
use crate::syntax::Sense;

/// Shared accounting across the searches of one solver call.
pub(crate) struct Meter {
    budget: Budget,
    start: Instant,
    pub nodes: u64,
    pub propagations: u64,
}

impl Meter {
    pub(crate) fn new(budget: Budget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            nodes: 0,
            propagations: 0,
        }
    }

    fn out_of_budget(&self) -> bool {
        if self.nodes >= self.budget.max_nodes {
            return true;
        }
        self.nodes.is_multiple_of(256)
            && self
                .budget
                .max_time
                .is_some_and(|limit| self.start.elapsed() >= limit)
    }

    pub(crate) fn stats(&self) -> Stats {
        Stats {
            nodes: self.nodes,
            propagations: self.propagations,
            elapsed: self.start.elapsed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// The whole space was searched.
    Complete,
    /// The callback asked to stop.
    Stopped,
    Exhausted,
}

fn initial_state(c: &Compiled, dbox: &DomainBox) -> State {
    let mut dom: Vec<Itv> = c
        .names
        .iter()
        .zip(&c.sorts)
        .map(|(name, sort)| {
            let (lo, hi) = match sort {
                Sort::Int => dbox.int_bounds(name),
                Sort::Bool => dbox.bool_bounds(name),
            };
            Itv {
                lo: lo as i128,
                hi: hi as i128,
            }
        })
        .collect();
    for v in 0..dom.len() {
        let r = c.rep[v];
        if r != v {
            dom[r].lo = dom[r].lo.max(dom[v].lo);
            dom[r].hi = dom[r].hi.min(dom[v].hi);
        }
    }
    dom.resize(
        c.slots,
        Itv {
            lo: -HUGE,
            hi: HUGE,
        },
    );
    State {
        dom,
        truth: vec![-1; c.nodes.len()],
    }
}

fn assignment_of(c: &Compiled, s: &State) -> Assignment {
    c.names
        .iter()
        .zip(&c.sorts)
        .zip(&c.rep)
        .map(|((n, sort), &r)| {
            let d = s.dom[r];
            let v = match sort {
                Sort::Int => Scalar::Int(d.lo as i64),
                Sort::Bool => Scalar::Bool(d.lo != 0),
            };
            (n.clone(), v)
        })
        .collect()
}

/// Runs a depth-first search, calling `on_solution` on each verified leaf
/// in lexicographic order of the variable declaration order.
pub(crate) fn search(
    c: &Compiled,
    model: &ConstraintModel,
    dbox: &DomainBox,
    meter: &mut Meter,
    mut on_solution: impl FnMut(Assignment) -> bool,
) -> Outcome {
    let mut root = initial_state(c, dbox);
    if root.dom.iter().any(|d| d.lo > d.hi) {
        return Outcome::Complete;
    }
    let mut prop = Propagator::new(c);
    let ok = prop.initial(&mut root).is_ok();
    meter.propagations += prop.revisions;
    if !ok {
        return Outcome::Complete;
    }
    let mut stack = vec![root];
    while let Some(state) = stack.pop() {
        meter.nodes += 1;
        if meter.out_of_budget() {
            return Outcome::Exhausted;
        }
        match c.rep.iter().copied().find(|&r| !state.is_fixed(r)) {
            None => {
                let a = assignment_of(c, &state);
                if evaluate(model, &a) == Ok(true) && !on_solution(a) {
                    return Outcome::Stopped;
                }
            }
            Some(v) => {
                let Itv { lo, hi } = state.dom[v];
                let mid = lo + (hi - lo).div_euclid(2);
                let mut upper = state.clone();
                upper.dom[v].lo = mid + 1;
                let mut lower = state;
                lower.dom[v].hi = mid;
                for mut child in [upper, lower] {
                    let mut prop = Propagator::new(c);
                    let ok = prop.after_branch(&mut child, v).is_ok();
                    meter.propagations += prop.revisions;
                    if ok {
                        stack.push(child);
                    }
                }
            }
        }
    }
    Outcome::Complete
}

fn first_solution(
    c: &Compiled,
    model: &ConstraintModel,
    dbox: &DomainBox,
    meter: &mut Meter,
) -> (Outcome, Option<Assignment>) {
    let mut found = None;
    let outcome = search(c, model, dbox, meter, |a| {
        found = Some(a);
        false
    });
    (outcome, found)
}

pub(crate) fn check_sat_impl(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    let c = compile_model(model, |_| Ok(Vec::new()))?;
    let mut meter = Meter::new(budget);
    let (outcome, found) = first_solution(&c, model, dbox, &mut meter);
    let status = match (&found, outcome) {
        (Some(_), _) => Status::Sat,
        (None, Outcome::Exhausted) => Status::Exhausted,
        (None, _) => Status::Unsat,
    };
    Ok(SolveResult {
        status,
        assignment: found,
        objective: None,
        stats: meter.stats(),
    })
}

fn objective_value(model: &ConstraintModel, a: &Assignment) -> Result<i64, SolveError> {
    let (_, e) = model.objective.as_ref().ok_or(SolveError::NoObjective)?;
    match super::eval_flat(e, a)? {
        Scalar::Int(v) => Ok(v),
        Scalar::Bool(_) => Err(SolveError::MalformedModel(
            "objective must be an integer expression".into(),
        )),
    }
}

/// Minimizes (or maximizes) the objective by restarting the search from the
/// root with a tightened bound, halving the gap between the incumbent and
/// the best bound proved so far. A final search with the objective pinned to
/// the optimum picks the first optimal assignment in search order.
pub(crate) fn optimize_impl(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    let (sense, obj_expr) = model.objective.clone().ok_or(SolveError::NoObjective)?;
    let base = compile_model(model, |_| Ok(Vec::new()))?;
    // minimize `obj`; for maximization `obj` is the negated objective
    let obj = {
        let compiler = super::compile::Compiler::new(model);
        let p = compiler.poly(&obj_expr)?;
        match sense {
            Sense::Minimize => p,
            Sense::Maximize => p.scale(-1)?,
        }
    };
    let to_internal = |v: i64| -> i128 {
        match sense {
            Sense::Minimize => v as i128,
            Sense::Maximize => -(v as i128),
        }
    };
    let mut meter = Meter::new(budget);
    let (outcome, found) = first_solution(&base, model, dbox, &mut meter);
    let Some(mut incumbent) = found else {
        let status = if outcome == Outcome::Exhausted {
            Status::Exhausted
        } else {
            Status::Unsat
        };
        return Ok(SolveResult {
            status,
            assignment: None,
            objective: None,
            stats: meter.stats(),
        });
    };
    let mut best = to_internal(objective_value(model, &incumbent)?);
    let mut lower = {
        let mut root = initial_state(&base, dbox);
        let mut prop = Propagator::new(&base);
        let _ = prop.initial(&mut root);
        meter.propagations += prop.revisions;
        root.poly_itv(&obj.compile()).lo.max(-(i64::MAX as i128))
    };
    let exhausted = |meter: &Meter, incumbent: Assignment, best: i128| SolveResult {
        status: Status::Exhausted,
        objective: Some(from_internal(sense, best)),
        assignment: Some(incumbent),
        stats: meter.stats(),
    };
    while lower < best {
        let target = lower + (best - 1 - lower).div_euclid(2);
        let bounded = compile_model(model, |c| {
            Ok(vec![c.le_zero(obj.clone().add(&Poly::constant(-target))?)])
        })?;
        match first_solution(&bounded, model, dbox, &mut meter) {
            (_, Some(a)) => {
                best = to_internal(objective_value(model, &a)?);
                incumbent = a;
            }
            (Outcome::Exhausted, None) => return Ok(exhausted(&meter, incumbent, best)),
            (_, None) => lower = target + 1,
        }
    }
    let pinned = compile_model(model, |c| {
        Ok(vec![c.eq_zero(obj.clone().add(&Poly::constant(-best))?)])
    })?;
    if let (_, Some(a)) = first_solution(&pinned, model, dbox, &mut meter) {
        incumbent = a;
    }
    Ok(SolveResult {
        status: Status::Optimal,
        objective: Some(from_internal(sense, best)),
        assignment: Some(incumbent),
        stats: meter.stats(),
    })
}

fn from_internal(sense: Sense, v: i128) -> i64 {
    match sense {
        Sense::Minimize => v as i64,
        Sense::Maximize => (-v) as i64,
    }
}

pub(crate) fn all_solutions_impl(
    model: &ConstraintModel,
    dbox: &DomainBox,
    budget: Budget,
    limit: usize,
) -> Result<(Vec<Assignment>, Outcome, Stats), SolveError> {
    let c = compile_model(model, |_| Ok(Vec::new()))?;
    let mut meter = Meter::new(budget);
    let mut out = Vec::new();
    let outcome = search(&c, model, dbox, &mut meter, |a| {
        out.push(a);
        out.len() < limit
    });
    Ok((out, outcome, meter.stats()))
}

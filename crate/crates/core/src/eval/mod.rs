//! Declarative semantics: configurations as recursive models, expression
//! evaluation over them, validity checking and naive enumeration.
//!
//! This is deliberately independent of lowering and solving so that the two
//! can be checked against each other.

use std::fmt;

use indexmap::IndexMap;
use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::lower::{qualified_name, Sort};
use crate::semantics::{ComponentRef, Owner, ProjTarget, RefTarget, TExpr, TExprKind, TypedSpec};
use crate::solver::{Assignment, DomainBox, Scalar};
use crate::syntax::{BinaryOp, Ident, Path, TypeRef, UnaryOp};

/// Largest configuration space [`enumerate`] will walk.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Model(ModelValue),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Model(m) => write!(f, "{m}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => s.serialize_i64(*v),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Model(m) => m.serialize(s),
        }
    }
}

/// A finite map from names to values; a full configuration of a device
/// binds every location and component.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelValue {
    pub fields: IndexMap<Ident, Value>,
}

impl Serialize for ModelValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k.as_str(), v)?;
        }
        map.end()
    }
}

impl fmt::Display for ModelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

impl ModelValue {
    pub fn new() -> Self {
        ModelValue::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.fields.get(name)
    }

    pub fn with(mut self, name: &str, v: Value) -> Self {
        let id = Ident::new(name).expect("valid identifier");
        self.fields.insert(id, v);
        self
    }

    /// Follows a path of nested models down to a value.
    pub fn lookup(&self, path: &[Ident]) -> Option<&Value> {
        let (first, rest) = path.split_first()?;
        let v = self.fields.get(first)?;
        if rest.is_empty() {
            return Some(v);
        }
        match v {
            Value::Model(m) => m.lookup(rest),
            _ => None,
        }
    }

    /// Inserts a value at a path, creating intermediate models as needed.
    pub fn insert(&mut self, path: &[Ident], v: Value) {
        let Some((first, rest)) = path.split_first() else {
            return;
        };
        if rest.is_empty() {
            self.fields.insert(first.clone(), v);
            return;
        }
        let entry = self
            .fields
            .entry(first.clone())
            .or_insert_with(|| Value::Model(ModelValue::new()));
        if !matches!(entry, Value::Model(_)) {
            *entry = Value::Model(ModelValue::new());
        }
        if let Value::Model(m) = entry {
            m.insert(rest, v);
        }
    }

    /// Primitive leaves with their full paths, depth first.
    pub fn leaves(&self) -> Vec<(Vec<Ident>, Scalar)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut Vec::new(), &mut out);
        out
    }

    fn collect_leaves(&self, prefix: &mut Vec<Ident>, out: &mut Vec<(Vec<Ident>, Scalar)>) {
        for (k, v) in &self.fields {
            prefix.push(k.clone());
            match v {
                Value::Int(x) => out.push((prefix.clone(), Scalar::Int(*x))),
                Value::Bool(b) => out.push((prefix.clone(), Scalar::Bool(*b))),
                Value::Model(m) => m.collect_leaves(prefix, out),
            }
            prefix.pop();
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("configuration has no value for `{0}`")]
    MissingBinding(String),
    #[error("`{0}` has a value of the wrong kind")]
    WrongKind(String),
    #[error("expression has type errors")]
    IllTyped,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("configuration space has {0} points, more than the enumeration limit")]
    SpaceTooLarge(u128),
}

/// Evaluation result; components stay symbolic so that projections onto
/// their derived properties can apply the wiring.
#[derive(Debug, Clone)]
enum EvalValue<'m> {
    Int(i128),
    Bool(bool),
    Model(&'m ModelValue),
    Component(&'m ModelValue, &'m ComponentRef),
}

#[derive(Clone)]
struct Env<'m> {
    global: &'m ModelValue,
    local: &'m ModelValue,
    renaming: &'m [(Ident, Ident)],
}

fn field<'m>(m: &'m ModelValue, name: &Ident) -> Result<&'m Value, EvalError> {
    m.fields
        .get(name)
        .ok_or_else(|| EvalError::MissingBinding(name.to_string()))
}

fn as_eval(v: &Value) -> EvalValue<'_> {
    match v {
        Value::Int(x) => EvalValue::Int(*x as i128),
        Value::Bool(b) => EvalValue::Bool(*b),
        Value::Model(m) => EvalValue::Model(m),
    }
}

struct Evaluator<'t> {
    tspec: &'t TypedSpec,
}

impl<'t> Evaluator<'t> {
    fn eval<'m>(&self, env: &Env<'m>, e: &'m TExpr) -> Result<EvalValue<'m>, EvalError>
    where
        't: 'm,
    {
        Ok(match &e.kind {
            TExprKind::Int(v) => EvalValue::Int(*v as i128),
            TExprKind::Bool(b) => EvalValue::Bool(*b),
            TExprKind::Ref(RefTarget::Field(f)) => as_eval(field(env.local, &f.name)?),
            TExprKind::Ref(RefTarget::Location { name, action }) => {
                let target = match action {
                    Some(_) => env
                        .renaming
                        .iter()
                        .find(|(p, _)| p == name)
                        .map(|(_, a)| a)
                        .unwrap_or(name),
                    None => name,
                };
                as_eval(field(env.global, target)?)
            }
            TExprKind::Ref(RefTarget::Component(c)) => match field(env.global, &c.name)? {
                Value::Model(m) => EvalValue::Component(m, c),
                _ => return Err(EvalError::WrongKind(c.name.to_string())),
            },
            TExprKind::Ref(RefTarget::Derived(id)) => {
                let body = self.tspec.derived_body(id).ok_or(EvalError::IllTyped)?;
                match id.owner {
                    Owner::Device(_) => {
                        let root = Env {
                            global: env.global,
                            local: env.global,
                            renaming: &[],
                        };
                        self.eval(&root, body)?
                    }
                    Owner::Type(_) | Owner::Action(_) => self.eval(env, body)?,
                }
            }
            TExprKind::Proj(base, target) => {
                let b = self.eval(env, base)?;
                let (m, renaming): (&ModelValue, &[(Ident, Ident)]) = match b {
                    EvalValue::Model(m) => (m, &[]),
                    EvalValue::Component(m, c) => (m, &c.wiring),
                    _ => return Err(EvalError::IllTyped),
                };
                match target {
                    ProjTarget::Field(f) => as_eval(field(m, &f.name)?),
                    ProjTarget::Derived(id) => {
                        let body = self.tspec.derived_body(id).ok_or(EvalError::IllTyped)?;
                        let sub = Env {
                            global: env.global,
                            local: m,
                            renaming,
                        };
                        self.eval(&sub, body)?
                    }
                }
            }
            TExprKind::Unary(op, x) => match (op, self.eval(env, x)?) {
                (UnaryOp::Neg, EvalValue::Int(v)) => {
                    EvalValue::Int(v.checked_neg().ok_or(EvalError::Overflow)?)
                }
                (UnaryOp::Not, EvalValue::Bool(b)) => EvalValue::Bool(!b),
                _ => return Err(EvalError::IllTyped),
            },
            TExprKind::Binary(op, l, r) => {
                let lv = self.eval(env, l)?;
                let rv = self.eval(env, r)?;
                binary(*op, lv, rv)?
            }
        })
    }

    fn holds<'m>(&self, env: &Env<'m>, e: &'m TExpr) -> Result<bool, EvalError>
    where
        't: 'm,
    {
        match self.eval(env, e) {
            Ok(EvalValue::Bool(b)) => Ok(b),
            Ok(_) => Err(EvalError::IllTyped),
            Err(EvalError::Overflow) => Ok(false),
            Err(err) => Err(err),
        }
    }

    /// Type constraints of an instance, nested instances first.
    fn instance_ok<'m>(
        &self,
        global: &'m ModelValue,
        m: &'m ModelValue,
        ty: &Ident,
        path: &str,
    ) -> Result<bool, EvalError>
    where
        't: 'm,
    {
        let td = self
            .tspec
            .type_def(ty.as_str())
            .ok_or_else(|| EvalError::UnknownType(ty.to_string()))?;
        for (p, pty) in &td.props {
            let sub_path = format!("{path}.{p}");
            let v = m
                .get(p.as_str())
                .ok_or_else(|| EvalError::MissingBinding(sub_path.clone()))?;
            match (pty, v) {
                (TypeRef::Prim(Sort::Int), Value::Int(_))
                | (TypeRef::Prim(Sort::Bool), Value::Bool(_)) => {}
                (TypeRef::Named(n), Value::Model(sub)) => {
                    if !self.instance_ok(global, sub, n, &sub_path)? {
                        return Ok(false);
                    }
                }
                _ => return Err(EvalError::WrongKind(sub_path)),
            }
        }
        let env = Env {
            global,
            local: m,
            renaming: &[],
        };
        for c in &td.constraints {
            if !self.holds(&env, c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn binary<'m>(
    op: BinaryOp,
    l: EvalValue<'m>,
    r: EvalValue<'m>,
) -> Result<EvalValue<'m>, EvalError> {
    use EvalValue::{Bool, Int};
    Ok(match (op, l, r) {
        (BinaryOp::Add, Int(a), Int(b)) => Int(a.checked_add(b).ok_or(EvalError::Overflow)?),
        (BinaryOp::Sub, Int(a), Int(b)) => Int(a.checked_sub(b).ok_or(EvalError::Overflow)?),
        (BinaryOp::Mul, Int(a), Int(b)) => Int(a.checked_mul(b).ok_or(EvalError::Overflow)?),
        (BinaryOp::Eq, Int(a), Int(b)) => Bool(a == b),
        (BinaryOp::Ne, Int(a), Int(b)) => Bool(a != b),
        (BinaryOp::Eq, Bool(a), Bool(b)) => Bool(a == b),
        (BinaryOp::Ne, Bool(a), Bool(b)) => Bool(a != b),
        (BinaryOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinaryOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinaryOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinaryOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinaryOp::And, Bool(a), Bool(b)) => Bool(a && b),
        (BinaryOp::Or, Bool(a), Bool(b)) => Bool(a || b),
        (BinaryOp::Implies, Bool(a), Bool(b)) => Bool(!a || b),
        _ => return Err(EvalError::IllTyped),
    })
}

/// Evaluates an expression typed in the scope of a device against a full
/// configuration of that device. Location parameters are mapped through
/// `renaming` (action location parameter to device location).
pub fn eval_expr(
    tspec: &TypedSpec,
    m: &ModelValue,
    e: &TExpr,
    renaming: &[(Ident, Ident)],
) -> Result<Value, EvalError> {
    let ev = Evaluator { tspec };
    let env = Env {
        global: m,
        local: m,
        renaming,
    };
    match ev.eval(&env, e)? {
        EvalValue::Int(v) => i64::try_from(v)
            .map(Value::Int)
            .map_err(|_| EvalError::Overflow),
        EvalValue::Bool(b) => Ok(Value::Bool(b)),
        EvalValue::Model(m) | EvalValue::Component(m, _) => Ok(Value::Model(m.clone())),
    }
}

/// Whether `m` is a valid configuration of `device`: every type constraint of
/// every location (recursively), every action constraint under its
/// component's wiring, every component constraint and every device
/// constraint holds.
pub fn satisfies(tspec: &TypedSpec, device: &str, m: &ModelValue) -> Result<bool, EvalError> {
    let dev = tspec
        .device(device)
        .ok_or_else(|| EvalError::UnknownDevice(device.to_string()))?;
    let ev = Evaluator { tspec };
    for (name, ty) in &dev.locations {
        let Value::Model(inst) = field(m, name)? else {
            return Err(EvalError::WrongKind(name.to_string()));
        };
        if !ev.instance_ok(m, inst, ty, name.as_str())? {
            return Ok(false);
        }
    }
    for c in &dev.components {
        let ad = tspec
            .action(c.action.as_str())
            .ok_or_else(|| EvalError::UnknownAction(c.action.to_string()))?;
        let Value::Model(cm) = field(m, &c.name)? else {
            return Err(EvalError::WrongKind(c.name.to_string()));
        };
        for (p, sort) in &ad.params {
            let path = format!("{}.{p}", c.name);
            match (sort, cm.get(p.as_str())) {
                (Sort::Int, Some(Value::Int(_))) | (Sort::Bool, Some(Value::Bool(_))) => {}
                (_, None) => return Err(EvalError::MissingBinding(path)),
                _ => return Err(EvalError::WrongKind(path)),
            }
        }
        let wiring: Vec<(Ident, Ident)> = ad
            .loc_params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(c.args.iter().cloned())
            .collect();
        let env = Env {
            global: m,
            local: cm,
            renaming: &wiring,
        };
        for e in &ad.constraints {
            if !ev.holds(&env, e)? {
                return Ok(false);
            }
        }
        let env = Env {
            global: m,
            local: cm,
            renaming: &[],
        };
        for e in &c.constraints {
            if !ev.holds(&env, e)? {
                return Ok(false);
            }
        }
    }
    let env = Env {
        global: m,
        local: m,
        renaming: &[],
    };
    for e in &dev.constraints {
        if !ev.holds(&env, e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Primitive leaves of a device configuration in canonical order: location
/// property trees depth first, then component parameters.
pub fn device_leaves(tspec: &TypedSpec, device: &str) -> Result<Vec<(Path, Sort)>, EvalError> {
    let dev = tspec
        .device(device)
        .ok_or_else(|| EvalError::UnknownDevice(device.to_string()))?;
    let mut out = Vec::new();
    for (name, ty) in &dev.locations {
        type_leaves(tspec, &mut vec![name.clone()], ty, &mut out)?;
    }
    for c in &dev.components {
        let ad = tspec
            .action(c.action.as_str())
            .ok_or_else(|| EvalError::UnknownAction(c.action.to_string()))?;
        for (p, sort) in &ad.params {
            out.push((Path(vec![c.name.clone(), p.clone()]), *sort));
        }
    }
    Ok(out)
}

fn type_leaves(
    tspec: &TypedSpec,
    prefix: &mut Vec<Ident>,
    ty: &Ident,
    out: &mut Vec<(Path, Sort)>,
) -> Result<(), EvalError> {
    let td = tspec
        .type_def(ty.as_str())
        .ok_or_else(|| EvalError::UnknownType(ty.to_string()))?;
    for (p, pty) in &td.props {
        prefix.push(p.clone());
        match pty {
            TypeRef::Prim(s) => out.push((Path(prefix.clone()), *s)),
            TypeRef::Named(n) => type_leaves(tspec, prefix, n, out)?,
        }
        prefix.pop();
    }
    Ok(())
}

/// Builds the configuration of a device from a flat assignment keyed by
/// qualified names. Locations and components without leaves become empty
/// models.
pub fn lift(tspec: &TypedSpec, device: &str, a: &Assignment) -> Result<ModelValue, EvalError> {
    let dev = tspec
        .device(device)
        .ok_or_else(|| EvalError::UnknownDevice(device.to_string()))?;
    let mut m = ModelValue::new();
    for (name, _) in &dev.locations {
        m.insert(std::slice::from_ref(name), Value::Model(ModelValue::new()));
    }
    for c in &dev.components {
        m.insert(
            std::slice::from_ref(&c.name),
            Value::Model(ModelValue::new()),
        );
    }
    for (path, sort) in device_leaves(tspec, device)? {
        let key = qualified_name(&path.0);
        let v = match (sort, a.get(&key)) {
            (Sort::Int, Some(Scalar::Int(x))) => Value::Int(*x),
            (Sort::Bool, Some(Scalar::Bool(b))) => Value::Bool(*b),
            (_, None) => return Err(EvalError::MissingBinding(path.to_string())),
            _ => return Err(EvalError::WrongKind(path.to_string())),
        };
        m.insert(&path.0, v);
    }
    Ok(m)
}

/// The flat image of a configuration: one entry per primitive leaf, named by
/// its qualified name.
pub fn flatten(m: &ModelValue) -> Assignment {
    m.leaves()
        .into_iter()
        .map(|(path, v)| (qualified_name(&path), v))
        .collect()
}

/// Every valid configuration of `device` whose leaves lie in `dbox`, in
/// lexicographic order of the leaf order of [`device_leaves`].
pub fn enumerate(
    tspec: &TypedSpec,
    device: &str,
    dbox: &DomainBox,
) -> Result<Vec<ModelValue>, EvalError> {
    let leaves = device_leaves(tspec, device)?;
    let ranges: Vec<(i64, i64)> = leaves
        .iter()
        .map(|(p, s)| {
            let name = qualified_name(&p.0);
            match s {
                Sort::Int => dbox.int_bounds(&name),
                Sort::Bool => dbox.bool_bounds(&name),
            }
        })
        .collect();
    let mut size: u128 = 1;
    for &(lo, hi) in &ranges {
        if lo > hi {
            return Ok(Vec::new());
        }
        size = size.saturating_mul((hi as i128 - lo as i128 + 1) as u128);
    }
    if size > ENUMERATION_LIMIT {
        return Err(EvalError::SpaceTooLarge(size));
    }
    let mut current: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut out = Vec::new();
    loop {
        let a: Assignment = leaves
            .iter()
            .zip(&current)
            .map(|((p, s), v)| {
                let val = match s {
                    Sort::Int => Scalar::Int(*v),
                    Sort::Bool => Scalar::Bool(*v != 0),
                };
                (qualified_name(&p.0), val)
            })
            .collect();
        let m = lift(tspec, device, &a)?;
        if satisfies(tspec, device, &m)? {
            out.push(m);
        }
        // odometer, last leaf fastest
        let mut i = current.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if current[i] < ranges[i].1 {
                current[i] += 1;
                break;
            }
            current[i] = ranges[i].0;
        }
    }
}

use indexmap::IndexMap;

use crate::syntax::{BinaryOp, Ident, Path, PrimType, Sense, UnaryOp, SYNTHETIC_NAME};

/// Sort of a solver variable.
pub type Sort = PrimType;

/// Joins the parts of a path with `_`. Identifiers never contain `_`, so the
/// mapping is injective and [`split_name`] inverts it.
pub fn qualified_name<S: AsRef<str>>(parts: &[S]) -> String {
    parts
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join("_")
}

pub fn split_name(name: &str) -> Vec<&str> {
    name.split('_').collect()
}

pub fn path_name(path: &Path) -> String {
    qualified_name(&path.0)
}

/// A quantifier-free expression over solver variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FlatExpr {
    Int(i64),
    Bool(bool),
    Var(String),
    Unary(UnaryOp, Box<FlatExpr>),
    Binary(BinaryOp, Box<FlatExpr>, Box<FlatExpr>),
}

impl FlatExpr {
    pub fn var(name: impl Into<String>) -> Self {
        FlatExpr::Var(name.into())
    }

    pub fn binary(op: BinaryOp, l: FlatExpr, r: FlatExpr) -> Self {
        FlatExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn negation(e: FlatExpr) -> Self {
        FlatExpr::Unary(UnaryOp::Not, Box::new(e))
    }

    pub fn eq(l: FlatExpr, r: FlatExpr) -> Self {
        FlatExpr::binary(BinaryOp::Eq, l, r)
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = FlatExpr>) -> Self {
        items
            .into_iter()
            .reduce(|a, b| FlatExpr::binary(BinaryOp::And, a, b))
            .unwrap_or(FlatExpr::Bool(true))
    }

    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FlatExpr::Int(_) | FlatExpr::Bool(_) => {}
            FlatExpr::Var(v) => out.push(v),
            FlatExpr::Unary(_, e) => e.collect_vars(out),
            FlatExpr::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

/// Flat first-order constraint problem: typed variables, a conjunction of
/// constraints and an optional objective.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintModel {
    pub vars: IndexMap<String, Sort>,
    pub constraints: Vec<FlatExpr>,
    pub objective: Option<(Sense, FlatExpr)>,
}

impl ConstraintModel {
    pub fn declare(&mut self, name: String, sort: Sort) {
        self.vars.entry(name).or_insert(sort);
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.vars.get(name).copied()
    }
}

/// Turns a variable name back into the dotted path it came from.
pub fn name_to_path(name: &str) -> Option<Path> {
    split_name(name)
        .into_iter()
        .map(|part| {
            if part == SYNTHETIC_NAME {
                Ok(Ident::synthetic())
            } else {
                Ident::new(part)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .ok()
        .map(Path)
}

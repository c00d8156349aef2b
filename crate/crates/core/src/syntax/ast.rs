//! Abstract syntax of CSX specifications.
//!
//! Every node carries the [`Span`] it was parsed from. Structural comparison
//! that should ignore source positions goes through [`Spec::without_spans`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::source::Span;

/// Words that can never be used as identifiers.
pub const KEYWORDS: &[&str] = &[
    "type",
    "action",
    "device",
    "component",
    "location",
    "parameter",
    "derived",
    "scenario",
    "objective",
    "minimize",
    "maximize",
    "int",
    "bool",
    "true",
    "false",
    "for",
    "expect",
    "and",
    "or",
    "not",
    "implies",
    "self",
    "inhab",
];

/// Name used for synthetic locations and components during inhabitance checks.
pub const SYNTHETIC_NAME: &str = "inhab";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentError {
    #[error("identifier is empty")]
    Empty,
    #[error("`{0}` is not a valid identifier (letters and digits only, starting with a letter)")]
    Malformed(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

/// A user-visible name: `[A-Za-z][A-Za-z0-9]*`, not a keyword.
///
/// Underscores are excluded so that joining namespace parts with `_` never
/// produces the same variable name for two different paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Ident(String);

impl Ident {
    pub fn new(text: impl Into<String>) -> Result<Self, IdentError> {
        let text = text.into();
        let mut chars = text.chars();
        match chars.next() {
            None => return Err(IdentError::Empty),
            Some(c) if !c.is_ascii_alphabetic() => return Err(IdentError::Malformed(text)),
            _ => {}
        }
        if !chars.all(|c| c.is_ascii_alphanumeric()) {
            return Err(IdentError::Malformed(text));
        }
        if KEYWORDS.contains(&text.as_str()) {
            return Err(IdentError::Reserved(text));
        }
        Ok(Ident(text))
    }

    /// Builds an identifier that bypasses the keyword check. Only used for the
    /// reserved synthetic name and `self`.
    pub(crate) fn reserved(text: &str) -> Self {
        Ident(text.to_string())
    }

    pub fn synthetic() -> Self {
        Ident::reserved(SYNTHETIC_NAME)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimType {
    Int,
    Bool,
}

impl fmt::Display for PrimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimType::Int => "int",
            PrimType::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Prim(PrimType),
    Named(Ident),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Prim(p) => p.fmt(f),
            TypeRef::Named(n) => n.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
            BinaryOp::Implies => "implies",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::And | BinaryOp::Or | BinaryOp::Implies)
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Implies => 1,
            BinaryOp::Or => 2,
            BinaryOp::And => 3,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Ref(Ident),
    Proj(Box<Expr>, Ident),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Expression with a default span, for programmatic construction.
    pub fn synth(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn int(v: i64) -> Self {
        Expr::synth(ExprKind::Int(v))
    }

    pub fn var(name: &str) -> Self {
        Expr::synth(ExprKind::Ref(Ident::new(name).expect("valid identifier")))
    }

    pub fn proj(self, field: &str) -> Self {
        Expr::synth(ExprKind::Proj(
            Box::new(self),
            Ident::new(field).expect("valid identifier"),
        ))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::synth(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    /// Identifiers referenced anywhere in the expression (projection fields excluded).
    pub fn free_refs(&self) -> Vec<&Ident> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a Ident>) {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Bool(_) => {}
            ExprKind::Ref(x) => out.push(x),
            ExprKind::Proj(e, _) | ExprKind::Unary(_, e) => e.collect_refs(out),
            ExprKind::Binary(_, l, r) => {
                l.collect_refs(out);
                r.collect_refs(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropDecl {
    pub name: Ident,
    pub ty: TypeRef,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivedDef {
    pub name: Ident,
    pub body: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeDef {
    pub name: Ident,
    pub props: Vec<PropDecl>,
    pub derived: Vec<DerivedDef>,
    pub constraints: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocParam {
    pub name: Ident,
    pub ty: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamDecl {
    pub name: Ident,
    pub ty: PrimType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionDef {
    pub name: Ident,
    pub loc_params: Vec<LocParam>,
    pub params: Vec<ParamDecl>,
    pub derived: Vec<DerivedDef>,
    pub constraints: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocationDecl {
    pub name: Ident,
    pub ty: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentDef {
    pub name: Ident,
    pub action: Ident,
    pub loc_args: Vec<Ident>,
    pub constraints: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeviceDef {
    pub name: Ident,
    pub locations: Vec<LocationDecl>,
    pub components: Vec<ComponentDef>,
    pub derived: Vec<DerivedDef>,
    pub constraints: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Bool(bool),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// A dotted chain such as `blockIn.width` or `mill.depth`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<Ident>);

impl Path {
    pub fn parse(text: &str) -> Result<Path, IdentError> {
        text.split('.')
            .map(|p| Ident::new(p.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub path: Path,
    pub value: Literal,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Objective {
    pub sense: Sense,
    pub expr: Expr,
    pub span: Span,
}

/// One expectation together with the scenario context it is evaluated in.
/// Produced by desugaring; the parser never fills these in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestCase {
    pub bindings: Vec<Binding>,
    pub constraints: Vec<Expr>,
    pub objective: Option<Objective>,
    pub expectation: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScenarioDef {
    pub name: Ident,
    pub device: Ident,
    pub bindings: Vec<Binding>,
    pub constraints: Vec<Expr>,
    pub objective: Option<Objective>,
    pub expectations: Vec<Expr>,
    pub tests: Vec<TestCase>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Spec {
    pub types: Vec<TypeDef>,
    pub actions: Vec<ActionDef>,
    pub devices: Vec<DeviceDef>,
    pub scenarios: Vec<ScenarioDef>,
}

impl Spec {
    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
            && self.actions.is_empty()
            && self.devices.is_empty()
            && self.scenarios.is_empty()
    }

    /// Appends all definitions of `other`.
    pub fn extend(&mut self, other: Spec) {
        self.types.extend(other.types);
        self.actions.extend(other.actions);
        self.devices.extend(other.devices);
        self.scenarios.extend(other.scenarios);
    }

    pub fn type_def(&self, name: &str) -> Option<&TypeDef> {
        self.types.iter().find(|t| t.name.as_str() == name)
    }

    pub fn action_def(&self, name: &str) -> Option<&ActionDef> {
        self.actions.iter().find(|a| a.name.as_str() == name)
    }

    pub fn device_def(&self, name: &str) -> Option<&DeviceDef> {
        self.devices.iter().find(|d| d.name.as_str() == name)
    }

    pub fn scenario_def(&self, name: &str) -> Option<&ScenarioDef> {
        self.scenarios.iter().find(|s| s.name.as_str() == name)
    }

    /// A copy with every span reset to the default, for structural comparison.
    pub fn without_spans(&self) -> Spec {
        let mut s = self.clone();
        s.erase_spans();
        s
    }
}

/// Resets all source positions in a syntax tree.
pub trait EraseSpans {
    fn erase_spans(&mut self);
}

impl<T: EraseSpans> EraseSpans for Vec<T> {
    fn erase_spans(&mut self) {
        self.iter_mut().for_each(EraseSpans::erase_spans);
    }
}

impl<T: EraseSpans> EraseSpans for Option<T> {
    fn erase_spans(&mut self) {
        if let Some(x) = self {
            x.erase_spans();
        }
    }
}

impl EraseSpans for Expr {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Ref(_) => {}
            ExprKind::Proj(e, _) | ExprKind::Unary(_, e) => e.erase_spans(),
            ExprKind::Binary(_, l, r) => {
                l.erase_spans();
                r.erase_spans();
            }
        }
    }
}

macro_rules! erase_spans_impl {
    ($ty:ty $(, $field:ident)*) => {
        impl EraseSpans for $ty {
            fn erase_spans(&mut self) {
                self.span = Span::default();
                $( self.$field.erase_spans(); )*
            }
        }
    };
}

erase_spans_impl!(PropDecl);
erase_spans_impl!(DerivedDef, body);
erase_spans_impl!(TypeDef, props, derived, constraints);
erase_spans_impl!(LocParam);
erase_spans_impl!(ParamDecl);
erase_spans_impl!(ActionDef, loc_params, params, derived, constraints);
erase_spans_impl!(LocationDecl);
erase_spans_impl!(ComponentDef, constraints);
erase_spans_impl!(DeviceDef, locations, components, derived, constraints);
erase_spans_impl!(Binding);
erase_spans_impl!(Objective, expr);
erase_spans_impl!(
    ScenarioDef,
    bindings,
    constraints,
    objective,
    expectations,
    tests
);

impl EraseSpans for TestCase {
    fn erase_spans(&mut self) {
        self.bindings.erase_spans();
        self.constraints.erase_spans();
        self.objective.erase_spans();
        self.expectation.erase_spans();
    }
}

impl EraseSpans for Spec {
    fn erase_spans(&mut self) {
        self.types.erase_spans();
        self.actions.erase_spans();
        self.devices.erase_spans();
        self.scenarios.erase_spans();
    }
}

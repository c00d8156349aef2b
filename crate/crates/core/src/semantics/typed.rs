//! Name-resolved, typed view of a specification.

use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use crate::syntax::{
    BinaryOp, Ident, Literal, Path, PrimType, Sense, Span, Spec, TypeRef, UnaryOp,
};

/// Static type of an expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Int,
    Bool,
    /// Instance of a user-defined type.
    User(Ident),
    /// A component of the given action; only usable as a projection base.
    Component(Ident),
    /// Placeholder after an error has been reported.
    Error,
}

impl Ty {
    pub fn from_prim(p: PrimType) -> Ty {
        match p {
            PrimType::Int => Ty::Int,
            PrimType::Bool => Ty::Bool,
        }
    }

    pub fn from_ref(t: &TypeRef) -> Ty {
        match t {
            TypeRef::Prim(p) => Ty::from_prim(*p),
            TypeRef::Named(n) => Ty::User(n.clone()),
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Ty::Int | Ty::Bool)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Int => f.write_str("int"),
            Ty::Bool => f.write_str("bool"),
            Ty::User(n) => write!(f, "{n}"),
            Ty::Component(a) => write!(f, "component of {a}"),
            Ty::Error => f.write_str("<error>"),
        }
    }
}

/// Definition that owns a property, parameter or derived property.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Type(Ident),
    Action(Ident),
    Device(Ident),
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Type(n) => write!(f, "type {n}"),
            Owner::Action(n) => write!(f, "action {n}"),
            Owner::Device(n) => write!(f, "device {n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivedId {
    pub owner: Owner,
    pub name: Ident,
}

/// A defining property of a type or a parameter of an action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldId {
    pub owner: Owner,
    pub name: Ident,
}

/// A component reference together with its location wiring, which is the
/// renaming applied to the action's constraints and derived properties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentRef {
    pub name: Ident,
    pub action: Ident,
    pub wiring: Vec<(Ident, Ident)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RefTarget {
    /// Defining property or parameter of the enclosing scope.
    Field(FieldId),
    Derived(DerivedId),
    /// A device location, or an action's location parameter when `action` is set.
    Location {
        name: Ident,
        action: Option<Ident>,
    },
    Component(ComponentRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProjTarget {
    Field(FieldId),
    Derived(DerivedId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TExprKind {
    Int(i64),
    Bool(bool),
    Ref(RefTarget),
    Proj(Box<TExpr>, ProjTarget),
    Unary(UnaryOp, Box<TExpr>),
    Binary(BinaryOp, Box<TExpr>, Box<TExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Ty,
    pub span: Span,
}

impl TExpr {
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a TExpr)) {
        f(self);
        match &self.kind {
            TExprKind::Int(_) | TExprKind::Bool(_) | TExprKind::Ref(_) => {}
            TExprKind::Proj(e, _) | TExprKind::Unary(_, e) => e.visit(f),
            TExprKind::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }
}

/// What a reference or projection node resolved to, for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub span: Span,
    pub declaration: String,
    pub ty: String,
}

#[derive(Debug, Clone)]
pub struct TypedType {
    pub name: Ident,
    pub span: Span,
    pub props: Vec<(Ident, TypeRef)>,
    pub derived: IndexMap<Ident, TExpr>,
    pub constraints: Vec<TExpr>,
}

#[derive(Debug, Clone)]
pub struct TypedAction {
    pub name: Ident,
    pub span: Span,
    pub loc_params: Vec<(Ident, Ident)>,
    pub params: Vec<(Ident, PrimType)>,
    pub derived: IndexMap<Ident, TExpr>,
    pub constraints: Vec<TExpr>,
}

#[derive(Debug, Clone)]
pub struct TypedComponent {
    pub name: Ident,
    pub action: Ident,
    pub args: Vec<Ident>,
    pub constraints: Vec<TExpr>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct TypedDevice {
    pub name: Ident,
    pub span: Span,
    pub locations: Vec<(Ident, Ident)>,
    pub components: Vec<TypedComponent>,
    pub derived: IndexMap<Ident, TExpr>,
    pub constraints: Vec<TExpr>,
}

/// A binding resolved to a primitive leaf of the device.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafBinding {
    pub path: Path,
    pub sort: PrimType,
    pub value: Literal,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct TypedTest {
    pub expectation: TExpr,
}

#[derive(Debug, Clone)]
pub struct TypedScenario {
    pub name: Ident,
    pub span: Span,
    pub device: Ident,
    pub bindings: Vec<LeafBinding>,
    pub constraints: Vec<TExpr>,
    pub objective: Option<(Sense, TExpr)>,
    pub tests: Vec<TypedTest>,
}

/// Output of static analysis: the desugared spec plus resolved and typed bodies.
#[derive(Debug, Clone, Default)]
pub struct TypedSpec {
    pub spec: Spec,
    pub types: IndexMap<Ident, TypedType>,
    pub actions: IndexMap<Ident, TypedAction>,
    pub devices: IndexMap<Ident, TypedDevice>,
    pub scenarios: IndexMap<Ident, TypedScenario>,
}

impl TypedSpec {
    pub fn type_def(&self, name: &str) -> Option<&TypedType> {
        self.types.get(name)
    }

    pub fn action(&self, name: &str) -> Option<&TypedAction> {
        self.actions.get(name)
    }

    pub fn device(&self, name: &str) -> Option<&TypedDevice> {
        self.devices.get(name)
    }

    pub fn derived_body(&self, id: &DerivedId) -> Option<&TExpr> {
        match &id.owner {
            Owner::Type(t) => self.types.get(t)?.derived.get(&id.name),
            Owner::Action(a) => self.actions.get(a)?.derived.get(&id.name),
            Owner::Device(d) => self.devices.get(d)?.derived.get(&id.name),
        }
    }

    /// Every typed expression body, in definition order.
    pub fn all_exprs(&self) -> Vec<&TExpr> {
        let mut out: Vec<&TExpr> = Vec::new();
        for t in self.types.values() {
            out.extend(t.derived.values());
            out.extend(&t.constraints);
        }
        for a in self.actions.values() {
            out.extend(a.derived.values());
            out.extend(&a.constraints);
        }
        for d in self.devices.values() {
            out.extend(d.derived.values());
            for c in &d.components {
                out.extend(&c.constraints);
            }
            out.extend(&d.constraints);
        }
        for s in self.scenarios.values() {
            out.extend(&s.constraints);
            out.extend(s.objective.as_ref().map(|(_, e)| e));
            out.extend(s.tests.iter().map(|t| &t.expectation));
        }
        out
    }

    /// The resolution table: one entry per reference or projection node.
    pub fn resolutions(&self) -> Vec<Resolution> {
        let mut out = Vec::new();
        for root in self.all_exprs() {
            root.visit(&mut |e| {
                let declaration = match &e.kind {
                    TExprKind::Ref(RefTarget::Field(f))
                    | TExprKind::Proj(_, ProjTarget::Field(f)) => {
                        format!("{}.{}", owner_name(&f.owner), f.name)
                    }
                    TExprKind::Ref(RefTarget::Derived(d))
                    | TExprKind::Proj(_, ProjTarget::Derived(d)) => {
                        format!("{}.{} (derived)", owner_name(&d.owner), d.name)
                    }
                    TExprKind::Ref(RefTarget::Location { name, action: None }) => {
                        format!("location {name}")
                    }
                    TExprKind::Ref(RefTarget::Location {
                        name,
                        action: Some(a),
                    }) => format!("{a}.{name} (location parameter)"),
                    TExprKind::Ref(RefTarget::Component(c)) => format!("component {}", c.name),
                    _ => return,
                };
                out.push(Resolution {
                    span: e.span,
                    declaration,
                    ty: e.ty.to_string(),
                });
            });
        }
        out
    }
}

fn owner_name(o: &Owner) -> &Ident {
    match o {
        Owner::Type(n) | Owner::Action(n) | Owner::Device(n) => n,
    }
}

//! Name binding and type checking.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use super::cycles::{derived_cycle_diagnostics, type_cycle_diagnostics};
use super::diagnostic::Diagnostic;
use super::typed::*;
use crate::syntax::{
    desugar, ActionDef, BinaryOp, ComponentDef, DeviceDef, Expr, ExprKind, Ident, Literal, Path,
    PrimType, Span, Spec, TypeDef, TypeRef, UnaryOp,
};

/// Top-level definition, used to attribute diagnostics and track breakage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefKey {
    Type(Ident),
    Action(Ident),
    Device(Ident),
    Scenario(Ident),
}

impl From<&Owner> for DefKey {
    fn from(o: &Owner) -> Self {
        match o {
            Owner::Type(n) => DefKey::Type(n.clone()),
            Owner::Action(n) => DefKey::Action(n.clone()),
            Owner::Device(n) => DefKey::Device(n.clone()),
        }
    }
}

/// Result of analysis that keeps going past errors.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub tspec: TypedSpec,
    pub diagnostics: Vec<Diagnostic>,
    /// Definitions with errors in themselves or in something they depend on.
    pub broken: HashSet<DefKey>,
}

impl Analysis {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn is_clean(&self, key: &DefKey) -> bool {
        !self.broken.contains(key)
    }
}

/// Checks a specification. Succeeds only if there are no errors at all,
/// including type and derived-property cycles.
pub fn analyze(spec: &Spec) -> Result<TypedSpec, Vec<Diagnostic>> {
    let analysis = analyze_lenient(spec);
    if analysis.has_errors() {
        Err(analysis.diagnostics)
    } else {
        Ok(analysis.tspec)
    }
}

/// Checks a specification, reporting every problem and still producing typed
/// bodies for all definitions.
pub fn analyze_lenient(spec: &Spec) -> Analysis {
    let spec = desugar(spec);
    let mut an = Analyzer::new(&spec);
    an.run();
    let Analyzer {
        diags,
        typed_types,
        typed_actions,
        typed_devices,
        typed_scenarios,
        ..
    } = an;
    let mut attributed = diags;
    for (key, d) in type_cycle_diagnostics(&spec) {
        attributed.push((Some(key), d));
    }
    for (key, d) in derived_cycle_diagnostics(&spec) {
        attributed.push((Some(key), d));
    }
    let broken = propagate_breakage(&spec, &attributed);
    let diagnostics = attributed.into_iter().map(|(_, d)| d).collect();
    Analysis {
        tspec: TypedSpec {
            spec,
            types: typed_types,
            actions: typed_actions,
            devices: typed_devices,
            scenarios: typed_scenarios,
        },
        diagnostics,
        broken,
    }
}

fn propagate_breakage(spec: &Spec, diags: &[(Option<DefKey>, Diagnostic)]) -> HashSet<DefKey> {
    let mut broken: HashSet<DefKey> = diags
        .iter()
        .filter(|(_, d)| d.is_error())
        .filter_map(|(k, _)| k.clone())
        .collect();
    let mut deps: Vec<(DefKey, Vec<DefKey>)> = Vec::new();
    for t in &spec.types {
        let d = t
            .props
            .iter()
            .filter_map(|p| match &p.ty {
                TypeRef::Named(n) => Some(DefKey::Type(n.clone())),
                TypeRef::Prim(_) => None,
            })
            .collect();
        deps.push((DefKey::Type(t.name.clone()), d));
    }
    for a in &spec.actions {
        let d = a
            .loc_params
            .iter()
            .map(|l| DefKey::Type(l.ty.clone()))
            .collect();
        deps.push((DefKey::Action(a.name.clone()), d));
    }
    for dev in &spec.devices {
        let mut d: Vec<DefKey> = dev
            .locations
            .iter()
            .map(|l| DefKey::Type(l.ty.clone()))
            .collect();
        d.extend(
            dev.components
                .iter()
                .map(|c| DefKey::Action(c.action.clone())),
        );
        deps.push((DefKey::Device(dev.name.clone()), d));
    }
    for s in &spec.scenarios {
        deps.push((
            DefKey::Scenario(s.name.clone()),
            vec![DefKey::Device(s.device.clone())],
        ));
    }
    loop {
        let mut changed = false;
        for (key, ds) in &deps {
            if !broken.contains(key) && ds.iter().any(|d| broken.contains(d)) {
                broken.insert(key.clone());
                changed = true;
            }
        }
        if !changed {
            return broken;
        }
    }
}

#[derive(Clone, Copy)]
enum Scope<'s> {
    Type(&'s TypeDef),
    Action(&'s ActionDef),
    Device(&'s DeviceDef),
    Component(&'s DeviceDef, &'s ComponentDef),
}

enum DerivedState {
    InProgress,
    Done(TExpr),
}

struct Analyzer<'s> {
    spec: &'s Spec,
    types: HashMap<&'s str, &'s TypeDef>,
    actions: HashMap<&'s str, &'s ActionDef>,
    devices: HashMap<&'s str, &'s DeviceDef>,
    diags: Vec<(Option<DefKey>, Diagnostic)>,
    current: Option<DefKey>,
    derived: HashMap<DerivedId, DerivedState>,
    typed_types: IndexMap<Ident, TypedType>,
    typed_actions: IndexMap<Ident, TypedAction>,
    typed_devices: IndexMap<Ident, TypedDevice>,
    typed_scenarios: IndexMap<Ident, TypedScenario>,
}

fn error_expr(span: Span) -> TExpr {
    TExpr {
        kind: TExprKind::Int(0),
        ty: Ty::Error,
        span,
    }
}

impl<'s> Analyzer<'s> {
    fn new(spec: &'s Spec) -> Self {
        Analyzer {
            spec,
            types: HashMap::new(),
            actions: HashMap::new(),
            devices: HashMap::new(),
            diags: Vec::new(),
            current: None,
            derived: HashMap::new(),
            typed_types: IndexMap::new(),
            typed_actions: IndexMap::new(),
            typed_devices: IndexMap::new(),
            typed_scenarios: IndexMap::new(),
        }
    }

    fn error(&mut self, message: impl Into<String>, span: Span) {
        self.diags
            .push((self.current.clone(), Diagnostic::error(message, span)));
    }

    fn run(&mut self) {
        let spec = self.spec;
        for t in &spec.types {
            self.current = Some(DefKey::Type(t.name.clone()));
            if self.types.insert(t.name.as_str(), t).is_some() {
                self.error(
                    format!("type `{}` is defined more than once", t.name),
                    t.span,
                );
            }
        }
        for a in &spec.actions {
            self.current = Some(DefKey::Action(a.name.clone()));
            if self.actions.insert(a.name.as_str(), a).is_some() {
                self.error(
                    format!("action `{}` is defined more than once", a.name),
                    a.span,
                );
            }
        }
        for d in &spec.devices {
            self.current = Some(DefKey::Device(d.name.clone()));
            if self.devices.insert(d.name.as_str(), d).is_some() {
                self.error(
                    format!("device `{}` is defined more than once", d.name),
                    d.span,
                );
            }
        }
        let mut scenario_names = HashSet::new();
        for s in &spec.scenarios {
            if !scenario_names.insert(s.name.as_str()) {
                self.current = Some(DefKey::Scenario(s.name.clone()));
                self.error(
                    format!("scenario `{}` is defined more than once", s.name),
                    s.span,
                );
            }
        }
        for t in &spec.types {
            self.check_type(t);
        }
        for a in &spec.actions {
            self.check_action(a);
        }
        for d in &spec.devices {
            self.check_device(d);
        }
        for s in &spec.scenarios {
            self.check_scenario(s);
        }
    }

    fn check_unique<'a>(&mut self, what: &str, names: impl IntoIterator<Item = (&'a Ident, Span)>) {
        let mut seen = HashSet::new();
        for (n, span) in names {
            if !seen.insert(n.as_str()) {
                self.error(format!("{what} `{n}` is declared more than once"), span);
            }
        }
    }

    fn check_type(&mut self, t: &'s TypeDef) {
        self.current = Some(DefKey::Type(t.name.clone()));
        self.check_unique(
            "property",
            t.props
                .iter()
                .map(|p| (&p.name, p.span))
                .chain(t.derived.iter().map(|d| (&d.name, d.span))),
        );
        for p in &t.props {
            if let TypeRef::Named(n) = &p.ty {
                if !self.types.contains_key(n.as_str()) {
                    self.error(format!("unknown type `{n}`"), p.span);
                }
            }
        }
        let scope = Scope::Type(t);
        let derived = self.derived_bodies(Owner::Type(t.name.clone()), &t.derived);
        self.current = Some(DefKey::Type(t.name.clone()));
        let constraints = t
            .constraints
            .iter()
            .map(|c| self.constraint(scope, c))
            .collect();
        if !self.typed_types.contains_key(&t.name) {
            self.typed_types.insert(
                t.name.clone(),
                TypedType {
                    name: t.name.clone(),
                    span: t.span,
                    props: t
                        .props
                        .iter()
                        .map(|p| (p.name.clone(), p.ty.clone()))
                        .collect(),
                    derived,
                    constraints,
                },
            );
        }
    }

    fn check_action(&mut self, a: &'s ActionDef) {
        self.current = Some(DefKey::Action(a.name.clone()));
        self.check_unique(
            "name",
            a.loc_params
                .iter()
                .map(|l| (&l.name, l.span))
                .chain(a.params.iter().map(|p| (&p.name, p.span)))
                .chain(a.derived.iter().map(|d| (&d.name, d.span))),
        );
        for l in &a.loc_params {
            if !self.types.contains_key(l.ty.as_str()) {
                self.error(format!("unknown type `{}`", l.ty), l.span);
            }
        }
        let scope = Scope::Action(a);
        let derived = self.derived_bodies(Owner::Action(a.name.clone()), &a.derived);
        self.current = Some(DefKey::Action(a.name.clone()));
        let constraints = a
            .constraints
            .iter()
            .map(|c| self.constraint(scope, c))
            .collect();
        if !self.typed_actions.contains_key(&a.name) {
            self.typed_actions.insert(
                a.name.clone(),
                TypedAction {
                    name: a.name.clone(),
                    span: a.span,
                    loc_params: a
                        .loc_params
                        .iter()
                        .map(|l| (l.name.clone(), l.ty.clone()))
                        .collect(),
                    params: a.params.iter().map(|p| (p.name.clone(), p.ty)).collect(),
                    derived,
                    constraints,
                },
            );
        }
    }

    fn check_device(&mut self, d: &'s DeviceDef) {
        self.current = Some(DefKey::Device(d.name.clone()));
        self.check_unique(
            "name",
            d.locations
                .iter()
                .map(|l| (&l.name, l.span))
                .chain(d.components.iter().map(|c| (&c.name, c.span)))
                .chain(d.derived.iter().map(|x| (&x.name, x.span))),
        );
        for l in &d.locations {
            if !self.types.contains_key(l.ty.as_str()) {
                self.error(format!("unknown type `{}`", l.ty), l.span);
            }
        }
        let mut components = Vec::new();
        for c in &d.components {
            self.check_wiring(d, c);
            let scope = Scope::Component(d, c);
            let constraints = c
                .constraints
                .iter()
                .map(|e| self.constraint(scope, e))
                .collect();
            components.push(TypedComponent {
                name: c.name.clone(),
                action: c.action.clone(),
                args: c.loc_args.clone(),
                constraints,
                span: c.span,
            });
        }
        let derived = self.derived_bodies(Owner::Device(d.name.clone()), &d.derived);
        self.current = Some(DefKey::Device(d.name.clone()));
        let scope = Scope::Device(d);
        let constraints = d
            .constraints
            .iter()
            .map(|e| self.constraint(scope, e))
            .collect();
        if !self.typed_devices.contains_key(&d.name) {
            self.typed_devices.insert(
                d.name.clone(),
                TypedDevice {
                    name: d.name.clone(),
                    span: d.span,
                    locations: d
                        .locations
                        .iter()
                        .map(|l| (l.name.clone(), l.ty.clone()))
                        .collect(),
                    components,
                    derived,
                    constraints,
                },
            );
        }
    }

    fn check_wiring(&mut self, d: &'s DeviceDef, c: &'s ComponentDef) {
        let Some(action) = self.actions.get(c.action.as_str()).copied() else {
            self.error(format!("unknown action `{}`", c.action), c.span);
            return;
        };
        if action.loc_params.len() != c.loc_args.len() {
            self.error(
                format!(
                    "action `{}` takes {} location argument(s) but component `{}` passes {}",
                    action.name,
                    action.loc_params.len(),
                    c.name,
                    c.loc_args.len()
                ),
                c.span,
            );
        }
        for (param, arg) in action.loc_params.iter().zip(&c.loc_args) {
            match d.locations.iter().find(|l| l.name == *arg) {
                None => self.error(
                    format!("`{arg}` is not a location of device `{}`", d.name),
                    c.span,
                ),
                Some(loc) if loc.ty != param.ty => self.error(
                    format!(
                        "type mismatch: location `{}` has type `{}` but `{}.{}` expects `{}`",
                        loc.name, loc.ty, action.name, param.name, param.ty
                    ),
                    c.span,
                ),
                Some(_) => {}
            }
        }
        for p in &action.params {
            let clash = d.locations.iter().any(|l| l.name == p.name)
                || d.components.iter().any(|k| k.name == p.name)
                || d.derived.iter().any(|x| x.name == p.name);
            if clash {
                self.error(
                    format!(
                        "parameter `{}` of component `{}` shadows a member of device `{}`",
                        p.name, c.name, d.name
                    ),
                    c.span,
                );
            }
        }
    }

    fn check_scenario(&mut self, s: &'s crate::syntax::ScenarioDef) {
        self.current = Some(DefKey::Scenario(s.name.clone()));
        let Some(device) = self.devices.get(s.device.as_str()).copied() else {
            self.error(format!("unknown device `{}`", s.device), s.span);
            return;
        };
        let scope = Scope::Device(device);
        let mut bindings = Vec::new();
        for b in &s.bindings {
            match resolve_leaf(self.spec, device, &b.path) {
                Ok(sort) => {
                    let ok = matches!(
                        (sort, b.value),
                        (PrimType::Int, Literal::Int(_)) | (PrimType::Bool, Literal::Bool(_))
                    );
                    if !ok {
                        self.error(
                            format!(
                                "type mismatch: `{}` has type {} but is bound to {}",
                                b.path, sort, b.value
                            ),
                            b.span,
                        );
                    }
                    bindings.push(LeafBinding {
                        path: b.path.clone(),
                        sort,
                        value: b.value,
                        span: b.span,
                    });
                }
                Err(msg) => self.error(msg, b.span),
            }
        }
        let constraints = s
            .constraints
            .iter()
            .map(|c| self.constraint(scope, c))
            .collect();
        let objective = s.objective.as_ref().map(|o| {
            let e = self.expr(scope, &o.expr);
            self.expect_ty(&e, &Ty::Int, "objective");
            (o.sense, e)
        });
        let tests = s
            .tests
            .iter()
            .map(|t| TypedTest {
                expectation: self.constraint(scope, &t.expectation),
            })
            .collect();
        if !self.typed_scenarios.contains_key(&s.name) {
            self.typed_scenarios.insert(
                s.name.clone(),
                TypedScenario {
                    name: s.name.clone(),
                    span: s.span,
                    device: s.device.clone(),
                    bindings,
                    constraints,
                    objective,
                    tests,
                },
            );
        }
    }

    fn derived_bodies(
        &mut self,
        owner: Owner,
        defs: &'s [crate::syntax::DerivedDef],
    ) -> IndexMap<Ident, TExpr> {
        let mut out = IndexMap::new();
        for d in defs {
            let id = DerivedId {
                owner: owner.clone(),
                name: d.name.clone(),
            };
            self.derived_ty(&id);
            let body = match self.derived.get(&id) {
                Some(DerivedState::Done(e)) => e.clone(),
                _ => error_expr(d.body.span),
            };
            out.entry(d.name.clone()).or_insert(body);
        }
        out
    }

    /// Type of a derived property, typing its body on first use.
    fn derived_ty(&mut self, id: &DerivedId) -> Ty {
        match self.derived.get(id) {
            Some(DerivedState::Done(e)) => return e.ty.clone(),
            // cycle; reported by the cycle check
            Some(DerivedState::InProgress) => return Ty::Error,
            None => {}
        }
        let (scope, def) = match &id.owner {
            Owner::Type(t) => {
                let Some(td) = self.types.get(t.as_str()).copied() else {
                    return Ty::Error;
                };
                (
                    Scope::Type(td),
                    td.derived.iter().find(|d| d.name == id.name),
                )
            }
            Owner::Action(a) => {
                let Some(ad) = self.actions.get(a.as_str()).copied() else {
                    return Ty::Error;
                };
                (
                    Scope::Action(ad),
                    ad.derived.iter().find(|d| d.name == id.name),
                )
            }
            Owner::Device(d) => {
                let Some(dd) = self.devices.get(d.as_str()).copied() else {
                    return Ty::Error;
                };
                (
                    Scope::Device(dd),
                    dd.derived.iter().find(|x| x.name == id.name),
                )
            }
        };
        let Some(def) = def else {
            return Ty::Error;
        };
        self.derived.insert(id.clone(), DerivedState::InProgress);
        let saved = self.current.replace(DefKey::from(&id.owner));
        let body = self.expr(scope, &def.body);
        if matches!(body.ty, Ty::Component(_)) {
            self.error(
                format!("derived property `{}` cannot denote a component", id.name),
                def.span,
            );
        }
        self.current = saved;
        let ty = body.ty.clone();
        self.derived.insert(id.clone(), DerivedState::Done(body));
        ty
    }

    fn expect_ty(&mut self, e: &TExpr, want: &Ty, what: &str) {
        if e.ty != *want && e.ty != Ty::Error {
            self.error(
                format!("type mismatch: {what} must be {want}, found {}", e.ty),
                e.span,
            );
        }
    }

    fn constraint(&mut self, scope: Scope<'s>, e: &Expr) -> TExpr {
        let t = self.expr(scope, e);
        self.expect_ty(&t, &Ty::Bool, "a constraint");
        t
    }

    fn lookup(&mut self, scope: Scope<'s>, x: &Ident) -> Option<(RefTarget, Ty)> {
        match scope {
            Scope::Type(t) => {
                if let Some(p) = t.props.iter().find(|p| p.name == *x) {
                    return Some((
                        RefTarget::Field(FieldId {
                            owner: Owner::Type(t.name.clone()),
                            name: x.clone(),
                        }),
                        Ty::from_ref(&p.ty),
                    ));
                }
                if t.derived.iter().any(|d| d.name == *x) {
                    let id = DerivedId {
                        owner: Owner::Type(t.name.clone()),
                        name: x.clone(),
                    };
                    let ty = self.derived_ty(&id);
                    return Some((RefTarget::Derived(id), ty));
                }
                None
            }
            Scope::Action(a) => {
                if let Some(l) = a.loc_params.iter().find(|l| l.name == *x) {
                    return Some((
                        RefTarget::Location {
                            name: x.clone(),
                            action: Some(a.name.clone()),
                        },
                        Ty::User(l.ty.clone()),
                    ));
                }
                if let Some(p) = a.params.iter().find(|p| p.name == *x) {
                    return Some((
                        RefTarget::Field(FieldId {
                            owner: Owner::Action(a.name.clone()),
                            name: x.clone(),
                        }),
                        Ty::from_prim(p.ty),
                    ));
                }
                if a.derived.iter().any(|d| d.name == *x) {
                    let id = DerivedId {
                        owner: Owner::Action(a.name.clone()),
                        name: x.clone(),
                    };
                    let ty = self.derived_ty(&id);
                    return Some((RefTarget::Derived(id), ty));
                }
                None
            }
            Scope::Device(d) => {
                if let Some(l) = d.locations.iter().find(|l| l.name == *x) {
                    return Some((
                        RefTarget::Location {
                            name: x.clone(),
                            action: None,
                        },
                        Ty::User(l.ty.clone()),
                    ));
                }
                if let Some(c) = d.components.iter().find(|c| c.name == *x) {
                    return Some(self.component_ref(c));
                }
                if d.derived.iter().any(|v| v.name == *x) {
                    let id = DerivedId {
                        owner: Owner::Device(d.name.clone()),
                        name: x.clone(),
                    };
                    let ty = self.derived_ty(&id);
                    return Some((RefTarget::Derived(id), ty));
                }
                None
            }
            Scope::Component(d, c) => {
                if x.as_str() == "self" {
                    return Some(self.component_ref(c));
                }
                if let Some(action) = self.actions.get(c.action.as_str()).copied() {
                    if let Some(p) = action.params.iter().find(|p| p.name == *x) {
                        return Some((
                            RefTarget::Field(FieldId {
                                owner: Owner::Action(action.name.clone()),
                                name: x.clone(),
                            }),
                            Ty::from_prim(p.ty),
                        ));
                    }
                }
                self.lookup(Scope::Device(d), x)
            }
        }
    }

    fn component_ref(&self, c: &ComponentDef) -> (RefTarget, Ty) {
        let wiring = self
            .actions
            .get(c.action.as_str())
            .map(|a| {
                a.loc_params
                    .iter()
                    .zip(&c.loc_args)
                    .map(|(p, arg)| (p.name.clone(), arg.clone()))
                    .collect()
            })
            .unwrap_or_default();
        (
            RefTarget::Component(ComponentRef {
                name: c.name.clone(),
                action: c.action.clone(),
                wiring,
            }),
            Ty::Component(c.action.clone()),
        )
    }

    fn expr(&mut self, scope: Scope<'s>, e: &Expr) -> TExpr {
        let span = e.span;
        match &e.kind {
            ExprKind::Int(v) => TExpr {
                kind: TExprKind::Int(*v),
                ty: Ty::Int,
                span,
            },
            ExprKind::Bool(b) => TExpr {
                kind: TExprKind::Bool(*b),
                ty: Ty::Bool,
                span,
            },
            ExprKind::Ref(x) => match self.lookup(scope, x) {
                Some((target, ty)) => TExpr {
                    kind: TExprKind::Ref(target),
                    ty,
                    span,
                },
                None => {
                    self.error(format!("cannot find `{x}` in this scope"), span);
                    error_expr(span)
                }
            },
            ExprKind::Proj(base, field) => {
                let b = self.expr(scope, base);
                match b.ty.clone() {
                    Ty::User(t) => {
                        let Some(td) = self.types.get(t.as_str()).copied() else {
                            return error_expr(span);
                        };
                        if let Some(p) = td.props.iter().find(|p| p.name == *field) {
                            let target = ProjTarget::Field(FieldId {
                                owner: Owner::Type(t.clone()),
                                name: field.clone(),
                            });
                            TExpr {
                                kind: TExprKind::Proj(Box::new(b), target),
                                ty: Ty::from_ref(&p.ty),
                                span,
                            }
                        } else if td.derived.iter().any(|d| d.name == *field) {
                            let id = DerivedId {
                                owner: Owner::Type(t.clone()),
                                name: field.clone(),
                            };
                            let ty = self.derived_ty(&id);
                            TExpr {
                                kind: TExprKind::Proj(Box::new(b), ProjTarget::Derived(id)),
                                ty,
                                span,
                            }
                        } else {
                            self.error(format!("type `{t}` has no property `{field}`"), span);
                            error_expr(span)
                        }
                    }
                    Ty::Component(a) => {
                        let Some(ad) = self.actions.get(a.as_str()).copied() else {
                            return error_expr(span);
                        };
                        if let Some(p) = ad.params.iter().find(|p| p.name == *field) {
                            let target = ProjTarget::Field(FieldId {
                                owner: Owner::Action(a.clone()),
                                name: field.clone(),
                            });
                            TExpr {
                                kind: TExprKind::Proj(Box::new(b), target),
                                ty: Ty::from_prim(p.ty),
                                span,
                            }
                        } else if ad.derived.iter().any(|d| d.name == *field) {
                            let id = DerivedId {
                                owner: Owner::Action(a.clone()),
                                name: field.clone(),
                            };
                            let ty = self.derived_ty(&id);
                            TExpr {
                                kind: TExprKind::Proj(Box::new(b), ProjTarget::Derived(id)),
                                ty,
                                span,
                            }
                        } else {
                            self.error(format!("action `{a}` has no parameter `{field}`"), span);
                            error_expr(span)
                        }
                    }
                    Ty::Int | Ty::Bool => {
                        self.error(
                            format!(
                                "cannot project `.{field}` off a value of primitive type {}",
                                b.ty
                            ),
                            span,
                        );
                        error_expr(span)
                    }
                    Ty::Error => error_expr(span),
                }
            }
            ExprKind::Unary(op, operand) => {
                let o = self.expr(scope, operand);
                let (want, what) = match op {
                    UnaryOp::Neg => (Ty::Int, "operand of `-`"),
                    UnaryOp::Not => (Ty::Bool, "operand of `not`"),
                };
                self.expect_ty(&o, &want, what);
                TExpr {
                    kind: TExprKind::Unary(*op, Box::new(o)),
                    ty: want,
                    span,
                }
            }
            ExprKind::Binary(op, l, r) => {
                let lt = self.expr(scope, l);
                let rt = self.expr(scope, r);
                let what = format!("operand of `{}`", op.symbol());
                let ty = if op.is_arithmetic() {
                    self.expect_ty(&lt, &Ty::Int, &what);
                    self.expect_ty(&rt, &Ty::Int, &what);
                    Ty::Int
                } else if op.is_logical() {
                    self.expect_ty(&lt, &Ty::Bool, &what);
                    self.expect_ty(&rt, &Ty::Bool, &what);
                    Ty::Bool
                } else if matches!(op, BinaryOp::Eq | BinaryOp::Ne) {
                    match (&lt.ty, &rt.ty) {
                        (Ty::Error, _) | (_, Ty::Error) => {}
                        (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) => {}
                        (a, b) => self.error(
                            format!(
                                "type mismatch: `{}` compares {a} with {b}; both sides must be int or both bool",
                                op.symbol()
                            ),
                            span,
                        ),
                    }
                    Ty::Bool
                } else {
                    self.expect_ty(&lt, &Ty::Int, &what);
                    self.expect_ty(&rt, &Ty::Int, &what);
                    Ty::Bool
                };
                TExpr {
                    kind: TExprKind::Binary(*op, Box::new(lt), Box::new(rt)),
                    ty,
                    span,
                }
            }
        }
    }
}

/// Resolves a dotted path against a device to a primitive leaf: either
/// `location.prop(.prop)*` ending in an int/bool property, or `component.param`.
pub fn resolve_leaf(spec: &Spec, device: &DeviceDef, path: &Path) -> Result<PrimType, String> {
    let parts = &path.0;
    let Some(first) = parts.first() else {
        return Err("empty path".into());
    };
    if let Some(loc) = device.locations.iter().find(|l| l.name == *first) {
        let mut ty = TypeRef::Named(loc.ty.clone());
        for part in &parts[1..] {
            let TypeRef::Named(tn) = &ty else {
                return Err(format!(
                    "`{path}`: cannot project `.{part}` off a primitive value"
                ));
            };
            let td = spec
                .type_def(tn.as_str())
                .ok_or_else(|| format!("`{path}`: unknown type `{tn}`"))?;
            let prop = td.props.iter().find(|p| p.name == *part).ok_or_else(|| {
                format!("`{path}`: type `{tn}` has no defining property `{part}`")
            })?;
            ty = prop.ty.clone();
        }
        return match ty {
            TypeRef::Prim(p) => Ok(p),
            TypeRef::Named(t) => Err(format!(
                "`{path}` denotes a value of type `{t}`, not a primitive leaf"
            )),
        };
    }
    if let Some(comp) = device.components.iter().find(|c| c.name == *first) {
        let action = spec
            .action_def(comp.action.as_str())
            .ok_or_else(|| format!("`{path}`: unknown action `{}`", comp.action))?;
        return match parts.get(1..) {
            Some([param]) => action
                .params
                .iter()
                .find(|p| p.name == *param)
                .map(|p| p.ty)
                .ok_or_else(|| {
                    format!(
                        "`{path}`: action `{}` has no parameter `{param}`",
                        action.name
                    )
                }),
            _ => Err(format!(
                "`{path}`: component paths have the form `component.parameter`"
            )),
        };
    }
    Err(format!(
        "`{path}`: `{first}` is neither a location nor a component of device `{}`",
        device.name
    ))
}

/// Types an expression in the scope of a device, as used by scenarios and jobs.
pub fn analyze_device_expr(
    tspec: &TypedSpec,
    device: &str,
    e: &Expr,
) -> Result<TExpr, Vec<Diagnostic>> {
    let spec = &tspec.spec;
    let Some(dev) = spec.device_def(device) else {
        return Err(vec![Diagnostic::error(
            format!("unknown device `{device}`"),
            e.span,
        )]);
    };
    let mut an = Analyzer::new(spec);
    for t in &spec.types {
        an.types.entry(t.name.as_str()).or_insert(t);
    }
    for a in &spec.actions {
        an.actions.entry(a.name.as_str()).or_insert(a);
    }
    let t = an.expr(Scope::Device(dev), e);
    if an.diags.is_empty() {
        Ok(t)
    } else {
        Err(an.diags.into_iter().map(|(_, d)| d).collect())
    }
}

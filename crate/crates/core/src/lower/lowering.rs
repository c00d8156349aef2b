use std::collections::HashMap;

use thiserror::Error;

use super::model::{qualified_name, ConstraintModel, FlatExpr};
use crate::semantics::{
    ComponentRef, Owner, ProjTarget, RefTarget, TExpr, TExprKind, Ty, TypedSpec,
};
use crate::syntax::{Ident, PrimType, TypeRef};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LowerError {
    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("expression has errors and cannot be lowered")]
    IllTyped,
    #[error("expression does not denote a primitive value")]
    NotPrimitive,
}

type Namespace = Vec<Ident>;
type Renaming = HashMap<Ident, Ident>;

/// What a typed expression lowers to.
enum Lowered {
    Value(FlatExpr),
    /// A (possibly nested) location instance, identified by its full path.
    Instance(Namespace),
    Component(ComponentRef),
}

#[derive(Clone)]
struct Ctx<'r> {
    ns: &'r [Ident],
    renaming: &'r Renaming,
}

/// Translates typed definitions into flat constraint models.
pub struct Lowerer<'t> {
    tspec: &'t TypedSpec,
    model: ConstraintModel,
}

impl<'t> Lowerer<'t> {
    fn new(tspec: &'t TypedSpec) -> Self {
        Lowerer {
            tspec,
            model: ConstraintModel::default(),
        }
    }

    fn location(&mut self, path: &[Ident], ty: &Ident) -> Result<(), LowerError> {
        let td = self
            .tspec
            .type_def(ty.as_str())
            .ok_or_else(|| LowerError::UnknownType(ty.to_string()))?;
        for (p, pty) in &td.props {
            let mut sub = path.to_vec();
            sub.push(p.clone());
            match pty {
                TypeRef::Prim(s) => self.model.declare(qualified_name(&sub), *s),
                TypeRef::Named(n) => self.location(&sub, n)?,
            }
        }
        let empty = Renaming::new();
        let ctx = Ctx {
            ns: path,
            renaming: &empty,
        };
        for c in &td.constraints {
            let f = self.value(&ctx, c)?;
            self.model.constraints.push(f);
        }
        Ok(())
    }

    fn component(
        &mut self,
        name: &Ident,
        action: &Ident,
        args: &[Ident],
        extra: &[TExpr],
    ) -> Result<(), LowerError> {
        let ad = self
            .tspec
            .action(action.as_str())
            .ok_or_else(|| LowerError::UnknownAction(action.to_string()))?;
        for (p, s) in &ad.params {
            self.model.declare(qualified_name(&[name, p]), *s);
        }
        let renaming: Renaming = ad
            .loc_params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().cloned())
            .collect();
        let ns = vec![name.clone()];
        let ctx = Ctx {
            ns: &ns,
            renaming: &renaming,
        };
        for c in &ad.constraints {
            let f = self.value(&ctx, c)?;
            self.model.constraints.push(f);
        }
        let empty = Renaming::new();
        let ctx = Ctx {
            ns: &ns,
            renaming: &empty,
        };
        for c in extra {
            let f = self.value(&ctx, c)?;
            self.model.constraints.push(f);
        }
        Ok(())
    }

    fn value(&self, ctx: &Ctx, e: &TExpr) -> Result<FlatExpr, LowerError> {
        match self.lower(ctx, e)? {
            Lowered::Value(f) => Ok(f),
            _ => Err(LowerError::NotPrimitive),
        }
    }

    fn instance_value(path: Namespace, ty: &Ty) -> Lowered {
        match ty {
            Ty::Int | Ty::Bool => Lowered::Value(FlatExpr::Var(qualified_name(&path))),
            _ => Lowered::Instance(path),
        }
    }

    fn lower(&self, ctx: &Ctx, e: &TExpr) -> Result<Lowered, LowerError> {
        if e.ty == Ty::Error {
            return Err(LowerError::IllTyped);
        }
        Ok(match &e.kind {
            TExprKind::Int(v) => Lowered::Value(FlatExpr::Int(*v)),
            TExprKind::Bool(b) => Lowered::Value(FlatExpr::Bool(*b)),
            TExprKind::Ref(RefTarget::Field(f)) => {
                let mut path = ctx.ns.to_vec();
                path.push(f.name.clone());
                Self::instance_value(path, &e.ty)
            }
            TExprKind::Ref(RefTarget::Location { name, action }) => {
                let root = match action {
                    Some(_) => ctx
                        .renaming
                        .get(name)
                        .cloned()
                        .unwrap_or_else(|| name.clone()),
                    None => name.clone(),
                };
                Self::instance_value(vec![root], &e.ty)
            }
            TExprKind::Ref(RefTarget::Component(c)) => Lowered::Component(c.clone()),
            TExprKind::Ref(RefTarget::Derived(id)) => {
                let body = self.tspec.derived_body(id).ok_or(LowerError::IllTyped)?;
                match &id.owner {
                    Owner::Device(_) => {
                        let empty = Renaming::new();
                        let root = Ctx {
                            ns: &[],
                            renaming: &empty,
                        };
                        self.lower(&root, body)?
                    }
                    Owner::Type(_) | Owner::Action(_) => self.lower(ctx, body)?,
                }
            }
            TExprKind::Proj(base, target) => {
                let b = self.lower(ctx, base)?;
                match (b, target) {
                    (Lowered::Instance(mut path), ProjTarget::Field(f)) => {
                        path.push(f.name.clone());
                        Self::instance_value(path, &e.ty)
                    }
                    (Lowered::Component(c), ProjTarget::Field(f)) => {
                        Lowered::Value(FlatExpr::Var(qualified_name(&[&c.name, &f.name])))
                    }
                    (Lowered::Instance(path), ProjTarget::Derived(id)) => {
                        let body = self.tspec.derived_body(id).ok_or(LowerError::IllTyped)?;
                        let empty = Renaming::new();
                        let sub = Ctx {
                            ns: &path,
                            renaming: &empty,
                        };
                        self.lower(&sub, body)?
                    }
                    (Lowered::Component(c), ProjTarget::Derived(id)) => {
                        let body = self.tspec.derived_body(id).ok_or(LowerError::IllTyped)?;
                        let renaming: Renaming = c.wiring.iter().cloned().collect();
                        let ns = vec![c.name.clone()];
                        let sub = Ctx {
                            ns: &ns,
                            renaming: &renaming,
                        };
                        self.lower(&sub, body)?
                    }
                    (Lowered::Value(_), _) => return Err(LowerError::IllTyped),
                }
            }
            TExprKind::Unary(op, x) => {
                Lowered::Value(FlatExpr::Unary(*op, Box::new(self.value(ctx, x)?)))
            }
            TExprKind::Binary(op, l, r) => Lowered::Value(FlatExpr::binary(
                *op,
                self.value(ctx, l)?,
                self.value(ctx, r)?,
            )),
        })
    }
}

/// Lowers a device: its locations (properties, then the constraints of their
/// types), its components (parameters, action constraints under the wiring,
/// then component constraints) and finally the device constraints.
pub fn lower_device(tspec: &TypedSpec, device: &str) -> Result<ConstraintModel, LowerError> {
    let dev = tspec
        .device(device)
        .ok_or_else(|| LowerError::UnknownDevice(device.to_string()))?;
    let mut l = Lowerer::new(tspec);
    for (name, ty) in &dev.locations {
        l.location(std::slice::from_ref(name), ty)?;
    }
    for c in &dev.components {
        l.component(&c.name, &c.action, &c.args, &c.constraints)?;
    }
    let empty = Renaming::new();
    let ctx = Ctx {
        ns: &[],
        renaming: &empty,
    };
    for c in &dev.constraints {
        let f = l.value(&ctx, c)?;
        l.model.constraints.push(f);
    }
    Ok(l.model)
}

/// Lowers an expression typed in the scope of a device.
pub fn lower_expr(tspec: &TypedSpec, e: &TExpr) -> Result<FlatExpr, LowerError> {
    lower_expr_in(tspec, e, &[], &[])
}

/// Lowers an expression in namespace `ns` with location renaming `renaming`
/// (location parameter to location argument).
pub fn lower_expr_in(
    tspec: &TypedSpec,
    e: &TExpr,
    ns: &[Ident],
    renaming: &[(Ident, Ident)],
) -> Result<FlatExpr, LowerError> {
    let l = Lowerer::new(tspec);
    let renaming: Renaming = renaming.iter().cloned().collect();
    let ctx = Ctx {
        ns,
        renaming: &renaming,
    };
    l.value(&ctx, e)
}

/// The model whose solutions are the inhabitants of a type: a single
/// synthetic location of that type.
pub fn lower_type_inhabitance(tspec: &TypedSpec, ty: &str) -> Result<ConstraintModel, LowerError> {
    let td = tspec
        .type_def(ty)
        .ok_or_else(|| LowerError::UnknownType(ty.to_string()))?;
    let mut l = Lowerer::new(tspec);
    l.location(&[Ident::synthetic()], &td.name)?;
    Ok(l.model)
}

/// The model whose solutions are the executions of an action: one location
/// per location parameter and a synthetic component applying the action.
pub fn lower_action_inhabitance(
    tspec: &TypedSpec,
    action: &str,
) -> Result<ConstraintModel, LowerError> {
    let ad = tspec
        .action(action)
        .ok_or_else(|| LowerError::UnknownAction(action.to_string()))?;
    let mut l = Lowerer::new(tspec);
    for (name, ty) in &ad.loc_params {
        l.location(std::slice::from_ref(name), ty)?;
    }
    let args: Vec<Ident> = ad.loc_params.iter().map(|(n, _)| n.clone()).collect();
    l.component(&Ident::synthetic(), &ad.name, &args, &[])?;
    Ok(l.model)
}

/// Sort of a primitive variable given its syntactic type.
pub fn sort_of_ty(ty: &Ty) -> Option<PrimType> {
    match ty {
        Ty::Int => Some(PrimType::Int),
        Ty::Bool => Some(PrimType::Bool),
        _ => None,
    }
}

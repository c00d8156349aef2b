//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use csx_core::eval::{enumerate, flatten, lift, satisfies, ModelValue};
use csx_core::lower::{lower_device, ConstraintModel, FlatExpr, Sort};
use csx_core::semantics::TypedSpec;
use csx_core::solver::{
    all_solutions, check_sat, optimize, Assignment, Budget, DomainBox, Scalar, Status,
};
use csx_core::syntax::{
    parse_expr, ActionDef, BinaryOp, Binding, ComponentDef, DerivedDef, DeviceDef, Expr, ExprKind,
    Ident, Literal, LocParam, LocationDecl, Objective, ParamDecl, Path, PrimType, PropDecl,
    ScenarioDef, Sense, Spec, TypeDef, TypeRef, UnaryOp,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ARITH: [BinaryOp; 3] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul];
const CMP: [BinaryOp; 6] = [
    BinaryOp::Eq,
    BinaryOp::Ne,
    BinaryOp::Lt,
    BinaryOp::Le,
    BinaryOp::Gt,
    BinaryOp::Ge,
];
const LOGIC: [BinaryOp; 3] = [BinaryOp::And, BinaryOp::Or, BinaryOp::Implies];

/// A random model over at most six integer and two boolean variables with
/// per-variable domains of at most eight values and at most twelve
/// constraints, plus the box those domains live in.
pub fn random_model(rng: &mut impl Rng) -> (ConstraintModel, DomainBox) {
    let mut model = ConstraintModel::default();
    let mut dbox = DomainBox::uniform(0, 0);
    let n_int = rng.random_range(1..=6);
    let n_bool = rng.random_range(0..=2);
    let mut ints = Vec::new();
    let mut bools = Vec::new();
    for i in 0..n_int {
        let name = format!("x{i}");
        let lo = rng.random_range(-4..=4);
        let width = rng.random_range(1..=8);
        dbox = dbox.with_var(name.clone(), lo, lo + width - 1);
        model.declare(name.clone(), Sort::Int);
        ints.push(name);
    }
    for i in 0..n_bool {
        let name = format!("b{i}");
        model.declare(name.clone(), Sort::Bool);
        bools.push(name);
    }
    let g = ModelGen { ints, bools };
    let m = rng.random_range(1..=12);
    for _ in 0..m {
        let c = g.constraint(rng, 2);
        model.constraints.push(c);
    }
    if rng.random_bool(0.6) {
        let sense = if rng.random_bool(0.5) {
            Sense::Minimize
        } else {
            Sense::Maximize
        };
        model.objective = Some((sense, g.term(rng, 2)));
    }
    (model, dbox)
}

struct ModelGen {
    ints: Vec<String>,
    bools: Vec<String>,
}

impl ModelGen {
    fn term(&self, rng: &mut impl Rng, depth: u32) -> FlatExpr {
        let leaf = depth == 0 || rng.random_bool(0.4);
        if leaf {
            return if rng.random_bool(0.7) {
                FlatExpr::var(self.ints.choose(rng).unwrap().clone())
            } else {
                FlatExpr::Int(rng.random_range(-6..=6))
            };
        }
        if rng.random_bool(0.1) {
            return FlatExpr::Unary(UnaryOp::Neg, Box::new(self.term(rng, depth - 1)));
        }
        let op = *ARITH.choose(rng).unwrap();
        FlatExpr::binary(op, self.term(rng, depth - 1), self.term(rng, depth - 1))
    }

    fn constraint(&self, rng: &mut impl Rng, depth: u32) -> FlatExpr {
        let r = rng.random_range(0..100);
        if depth == 0 || r < 60 {
            if !self.bools.is_empty() && r < 8 {
                let b = FlatExpr::var(self.bools.choose(rng).unwrap().clone());
                return if rng.random_bool(0.5) {
                    b
                } else {
                    FlatExpr::negation(b)
                };
            }
            let op = *CMP.choose(rng).unwrap();
            return FlatExpr::binary(op, self.term(rng, 2), self.term(rng, 1));
        }
        if r < 70 {
            return FlatExpr::negation(self.constraint(rng, depth - 1));
        }
        if r < 78 {
            let op = if rng.random_bool(0.5) {
                BinaryOp::Eq
            } else {
                BinaryOp::Ne
            };
            return FlatExpr::binary(
                op,
                self.constraint(rng, depth - 1),
                self.constraint(rng, depth - 1),
            );
        }
        let op = *LOGIC.choose(rng).unwrap();
        FlatExpr::binary(
            op,
            self.constraint(rng, depth - 1),
            self.constraint(rng, depth - 1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum V {
    I(i128),
    B(bool),
}

fn ev(e: &FlatExpr, env: &[(String, i64)]) -> V {
    let look = |n: &str| {
        env.iter()
            .find(|(k, _)| k == n)
            .map(|(_, v)| *v)
            .expect("bound")
    };
    match e {
        FlatExpr::Int(v) => V::I(*v as i128),
        FlatExpr::Bool(b) => V::B(*b),
        FlatExpr::Var(n) => V::I(look(n) as i128),
        FlatExpr::Unary(UnaryOp::Neg, x) => match ev(x, env) {
            V::I(v) => V::I(-v),
            V::B(_) => panic!("ill-sorted"),
        },
        FlatExpr::Unary(UnaryOp::Not, x) => V::B(!truth(ev(x, env))),
        FlatExpr::Binary(op, l, r) => {
            let (a, b) = (ev(l, env), ev(r, env));
            let num = |v: V| match v {
                V::I(x) => x,
                V::B(x) => x as i128,
            };
            match op {
                BinaryOp::Add => V::I(num(a) + num(b)),
                BinaryOp::Sub => V::I(num(a) - num(b)),
                BinaryOp::Mul => V::I(num(a) * num(b)),
                BinaryOp::Eq => V::B(num(a) == num(b)),
                BinaryOp::Ne => V::B(num(a) != num(b)),
                BinaryOp::Lt => V::B(num(a) < num(b)),
                BinaryOp::Le => V::B(num(a) <= num(b)),
                BinaryOp::Gt => V::B(num(a) > num(b)),
                BinaryOp::Ge => V::B(num(a) >= num(b)),
                BinaryOp::And => V::B(truth(a) && truth(b)),
                BinaryOp::Or => V::B(truth(a) || truth(b)),
                BinaryOp::Implies => V::B(!truth(a) || truth(b)),
            }
        }
    }
}

fn truth(v: V) -> bool {
    match v {
        V::B(b) => b,
        V::I(i) => i != 0,
    }
}

/// Ground truth for a model, from enumerating its whole box.
#[derive(Debug, Clone)]
pub struct Oracle {
    /// Solutions in lexicographic order of the declared variables.
    pub solutions: Vec<Vec<i64>>,
    /// Best objective value among the solutions.
    pub optimum: Option<i64>,
}

pub fn brute_force(model: &ConstraintModel, dbox: &DomainBox) -> Oracle {
    let names: Vec<String> = model.vars.keys().cloned().collect();
    let ranges: Vec<(i64, i64)> = model
        .vars
        .iter()
        .map(|(n, s)| match s {
            Sort::Int => dbox.int_bounds(n),
            Sort::Bool => dbox.bool_bounds(n),
        })
        .collect();
    let mut solutions = Vec::new();
    let mut optimum: Option<i64> = None;
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return Oracle { solutions, optimum };
    }
    loop {
        let env: Vec<(String, i64)> = names.iter().cloned().zip(cur.iter().copied()).collect();
        if model.constraints.iter().all(|c| truth(ev(c, &env))) {
            if let Some((sense, obj)) = &model.objective {
                let V::I(v) = ev(obj, &env) else {
                    panic!("boolean objective")
                };
                let v = v as i64;
                optimum = Some(match (optimum, sense) {
                    (None, _) => v,
                    (Some(o), Sense::Minimize) => o.min(v),
                    (Some(o), Sense::Maximize) => o.max(v),
                });
            }
            solutions.push(cur.clone());
        }
        let mut i = cur.len();
        loop {
            if i == 0 {
                return Oracle { solutions, optimum };
            }
            i -= 1;
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
        }
    }
}

/// Values of an assignment in declaration order, booleans as 0 and 1.
pub fn values(model: &ConstraintModel, a: &Assignment) -> Vec<i64> {
    model
        .vars
        .keys()
        .map(|n| match a[n.as_str()] {
            Scalar::Int(v) => v,
            Scalar::Bool(b) => b as i64,
        })
        .collect()
}

/// Objective value of `a` under the model's objective, from the oracle's
/// evaluator.
pub fn objective_value(model: &ConstraintModel, a: &Assignment) -> Option<i64> {
    let (_, obj) = model.objective.as_ref()?;
    let env: Vec<(String, i64)> = model.vars.keys().cloned().zip(values(model, a)).collect();
    match ev(obj, &env) {
        V::I(v) => Some(v as i64),
        V::B(_) => None,
    }
}

const NAMES: [&str; 12] = [
    "a", "b", "w", "h", "sheet", "Stack", "inBlock", "x1", "depth", "t", "Sheet", "out",
];

fn ident(rng: &mut impl Rng) -> Ident {
    Ident::new(*NAMES.choose(rng).unwrap()).unwrap()
}

fn int_literal(rng: &mut impl Rng) -> i64 {
    match rng.random_range(0..10) {
        0 => i64::MIN,
        1 => i64::MAX,
        2 => -rng.random_range(0..1000),
        _ => rng.random_range(0..5000),
    }
}

/// A random expression with every operator, negative literals and `self`.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..10) {
            0..=2 => Expr::int(int_literal(rng)),
            3 => Expr::synth(ExprKind::Bool(rng.random_bool(0.5))),
            4 => parse_expr("self").unwrap(),
            _ => Expr::synth(ExprKind::Ref(ident(rng))),
        };
    }
    match rng.random_range(0..10) {
        0 | 1 => Expr::synth(ExprKind::Proj(
            Box::new(random_expr(rng, depth - 1)),
            ident(rng),
        )),
        2 => {
            let op = if rng.random_bool(0.5) {
                UnaryOp::Neg
            } else {
                UnaryOp::Not
            };
            Expr::synth(ExprKind::Unary(op, Box::new(random_expr(rng, depth - 1))))
        }
        _ => {
            let ops: Vec<BinaryOp> = ARITH.iter().chain(&CMP).chain(&LOGIC).copied().collect();
            let op = *ops.choose(rng).unwrap();
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
    }
}

fn exprs(rng: &mut impl Rng, max: usize) -> Vec<Expr> {
    (0..rng.random_range(0..=max))
        .map(|_| random_expr(rng, 4))
        .collect()
}

fn derived(rng: &mut impl Rng) -> Vec<DerivedDef> {
    (0..rng.random_range(0..=2))
        .map(|_| DerivedDef {
            name: ident(rng),
            body: random_expr(rng, 3),
            span: Default::default(),
        })
        .collect()
}

fn prim(rng: &mut impl Rng) -> PrimType {
    if rng.random_bool(0.7) {
        PrimType::Int
    } else {
        PrimType::Bool
    }
}

/// A random, not necessarily well-typed, syntax tree.
pub fn random_spec(rng: &mut impl Rng) -> Spec {
    let mut spec = Spec::default();
    for _ in 0..rng.random_range(0..=3) {
        spec.types.push(TypeDef {
            name: ident(rng),
            props: (0..rng.random_range(0..=3))
                .map(|_| PropDecl {
                    name: ident(rng),
                    ty: if rng.random_bool(0.7) {
                        TypeRef::Prim(prim(rng))
                    } else {
                        TypeRef::Named(ident(rng))
                    },
                    span: Default::default(),
                })
                .collect(),
            derived: derived(rng),
            constraints: exprs(rng, 3),
            span: Default::default(),
        });
    }
    for _ in 0..rng.random_range(0..=2) {
        spec.actions.push(ActionDef {
            name: ident(rng),
            loc_params: (0..rng.random_range(0..=3))
                .map(|_| LocParam {
                    name: ident(rng),
                    ty: ident(rng),
                    span: Default::default(),
                })
                .collect(),
            params: (0..rng.random_range(0..=2))
                .map(|_| ParamDecl {
                    name: ident(rng),
                    ty: prim(rng),
                    span: Default::default(),
                })
                .collect(),
            derived: derived(rng),
            constraints: exprs(rng, 3),
            span: Default::default(),
        });
    }
    for _ in 0..rng.random_range(0..=2) {
        spec.devices.push(DeviceDef {
            name: ident(rng),
            locations: (0..rng.random_range(0..=3))
                .map(|_| LocationDecl {
                    name: ident(rng),
                    ty: ident(rng),
                    span: Default::default(),
                })
                .collect(),
            components: (0..rng.random_range(0..=2))
                .map(|_| ComponentDef {
                    name: ident(rng),
                    action: ident(rng),
                    loc_args: (0..rng.random_range(0..=3)).map(|_| ident(rng)).collect(),
                    constraints: exprs(rng, 2),
                    span: Default::default(),
                })
                .collect(),
            derived: derived(rng),
            constraints: exprs(rng, 2),
            span: Default::default(),
        });
    }
    for _ in 0..rng.random_range(0..=2) {
        spec.scenarios.push(ScenarioDef {
            name: ident(rng),
            device: ident(rng),
            bindings: (0..rng.random_range(0..=3))
                .map(|_| Binding {
                    path: Path((0..rng.random_range(1..=3)).map(|_| ident(rng)).collect()),
                    value: if rng.random_bool(0.8) {
                        Literal::Int(int_literal(rng))
                    } else {
                        Literal::Bool(rng.random_bool(0.5))
                    },
                    span: Default::default(),
                })
                .collect(),
            constraints: exprs(rng, 2),
            objective: rng.random_bool(0.4).then(|| Objective {
                sense: if rng.random_bool(0.5) {
                    Sense::Minimize
                } else {
                    Sense::Maximize
                },
                expr: random_expr(rng, 3),
                span: Default::default(),
            }),
            expectations: exprs(rng, 3),
            tests: Vec::new(),
            span: Default::default(),
        });
    }
    spec
}

/// Largest book volume and its width, height and thickness, by exhaustive
/// search over the reduced binder problem: block width at most 3200 less the
/// minimum 10 mill depth, block thickness between 30 and 500, height at most
/// 3200 and a cover of `2 * width + thickness` no wider than 6800.
pub fn largest_book_oracle() -> (i64, i64, i64, i64) {
    let mut best = (0, 0, 0, 0);
    for w in 1..=3190i64 {
        for th in 30..=500i64 {
            if 2 * w + th > 6800 {
                continue;
            }
            let v = w * 3200 * th;
            if v > best.0 {
                best = (v, w, 3200, th);
            }
        }
    }
    best
}

/// Least waste for a 1480 x 2100 booklet of 32 pages, with the face cut and
/// the combined head and foot cuts: enumerates both cuts, keeping the sheet
/// within the feeder and stitcher limits. Returns waste, face, head plus
/// foot and the sheet count.
pub fn minimal_waste_oracle() -> (i64, i64, i64, i64) {
    let (out_w, out_h, pages) = (1480i64, 2100i64, 32i64);
    let mut best: Option<(i64, i64, i64)> = None;
    for face in 30..=300 {
        for head_foot in 0..=300 {
            let aw = 2 * (out_w + face);
            let ah = out_h + head_foot;
            if aw < ah || ah > 3300 || !(2000..5000).contains(&ah) || aw > 4880 {
                continue;
            }
            let waste = aw * ah - 2 * out_w * out_h;
            if best.is_none_or(|b| waste < b.0) {
                best = Some((waste, face, head_foot));
            }
        }
    }
    let (waste, face, head_foot) = best.expect("feasible");
    (waste, face, head_foot, pages / 4)
}

/// Checks one seeded model against enumeration; returns a description of the
/// first disagreement.
pub fn compare(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (model, dbox) = random_model(&mut rng);
    let oracle = brute_force(&model, &dbox);
    let budget = Budget::nodes(1_000_000);

    let sat = check_sat(&model, &dbox, budget).map_err(|e| format!("seed {seed}: {e}"))?;
    match (sat.status, oracle.solutions.first()) {
        (Status::Sat, Some(first)) => {
            let got = values(&model, sat.assignment.as_ref().unwrap());
            if &got != first {
                return Err(format!(
                    "seed {seed}: witness {got:?}, expected first solution {first:?}"
                ));
            }
        }
        (Status::Unsat, None) => {}
        (status, first) => {
            return Err(format!(
                "seed {seed}: check_sat {status:?}, oracle {first:?}\n{model:?}"
            ));
        }
    }

    if model.objective.is_some() {
        let opt = optimize(&model, &dbox, budget).map_err(|e| format!("seed {seed}: {e}"))?;
        match (opt.status, oracle.optimum) {
            (Status::Optimal, Some(best)) => {
                let a = opt.assignment.as_ref().unwrap();
                if opt.objective != Some(best) || objective_value(&model, a) != Some(best) {
                    return Err(format!(
                        "seed {seed}: optimum {:?}, expected {best}",
                        opt.objective
                    ));
                }
                if !oracle.solutions.contains(&values(&model, a)) {
                    return Err(format!("seed {seed}: optimal witness is not a solution"));
                }
            }
            (Status::Unsat, None) => {}
            (status, best) => {
                return Err(format!("seed {seed}: optimize {status:?}, oracle {best:?}"))
            }
        }
    }

    if oracle.solutions.len() <= 5000 {
        let all = all_solutions(&model, &dbox, budget, 10_000)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let got: Vec<Vec<i64>> = all.solutions.iter().map(|a| values(&model, a)).collect();
        if !all.complete || got != oracle.solutions {
            return Err(format!(
                "seed {seed}: enumerated {} solutions, oracle {}",
                got.len(),
                oracle.solutions.len()
            ));
        }
    }
    Ok(())
}

fn key(a: &Assignment) -> Vec<(String, Scalar)> {
    a.iter().map(|(k, v)| (k.clone(), *v)).collect()
}

/// Compares valid configurations with lifted solver solutions exhaustively; returns the number of discrepancies.
pub fn discrepancies(t: &TypedSpec, device: &str, dbox: &DomainBox) -> usize {
    let model = lower_device(t, device).unwrap();
    let by_eval: BTreeSet<_> = enumerate(t, device, dbox)
        .unwrap()
        .iter()
        .map(|m| key(&flatten(m)))
        .collect();
    let all = all_solutions(&model, dbox, Budget::nodes(10_000_000), usize::MAX).unwrap();
    assert!(all.complete);
    let by_solver: BTreeSet<_> = all
        .solutions
        .iter()
        .map(|a| {
            let m: ModelValue = lift(t, device, a).unwrap();
            assert!(satisfies(t, device, &m).unwrap());
            key(&flatten(&m))
        })
        .collect();
    by_eval.symmetric_difference(&by_solver).count()
}

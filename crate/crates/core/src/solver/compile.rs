//! Compilation of flat expressions into polynomial comparisons over a
//! boolean node arena.

use std::collections::{BTreeMap, HashMap};

use super::SolveError;
use crate::lower::{ConstraintModel, FlatExpr, Sort};
use crate::syntax::{BinaryOp, UnaryOp};

pub(crate) type NodeId = usize;

/// Sorted variable indices; the empty monomial is the constant term.
type Mono = Vec<usize>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Poly {
    terms: BTreeMap<Mono, i128>,
}

fn overflow() -> SolveError {
    SolveError::MalformedModel("integer coefficient overflow".into())
}

impl Poly {
    pub(crate) fn constant(c: i128) -> Self {
        let mut p = Poly::default();
        if c != 0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub(crate) fn var(i: usize) -> Self {
        let mut p = Poly::default();
        p.terms.insert(vec![i], 1);
        p
    }

    fn add_term(&mut self, m: Mono, c: i128) -> Result<(), SolveError> {
        let e = self.terms.entry(m).or_insert(0);
        *e = e.checked_add(c).ok_or_else(overflow)?;
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
        Ok(())
    }

    pub(crate) fn add(mut self, other: &Poly) -> Result<Poly, SolveError> {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), *c)?;
        }
        Ok(self)
    }

    pub(crate) fn scale(mut self, k: i128) -> Result<Poly, SolveError> {
        if k == 0 {
            return Ok(Poly::default());
        }
        for c in self.terms.values_mut() {
            *c = c.checked_mul(k).ok_or_else(overflow)?;
        }
        Ok(self)
    }

    pub(crate) fn sub(self, other: &Poly) -> Result<Poly, SolveError> {
        self.add(&other.clone().scale(-1)?)
    }

    pub(crate) fn mul(&self, other: &Poly) -> Result<Poly, SolveError> {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m: Mono = ma.iter().chain(mb).copied().collect();
                m.sort_unstable();
                out.add_term(m, ca.checked_mul(*cb).ok_or_else(overflow)?)?;
            }
        }
        Ok(out)
    }

    fn as_const(&self) -> Option<i128> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub(crate) fn compile(&self) -> CPoly {
        let mut constant = 0;
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            if m.is_empty() {
                constant = *c;
            } else {
                terms.push(Term {
                    coef: *c,
                    vars: m.clone(),
                });
            }
        }
        CPoly { constant, terms }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Term {
    pub coef: i128,
    /// With repetition for powers.
    pub vars: Vec<usize>,
}

/// Polynomial in the form used during propagation.
#[derive(Debug, Clone)]
pub(crate) struct CPoly {
    pub constant: i128,
    pub terms: Vec<Term>,
}

impl CPoly {
    pub(crate) fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|t| t.vars.iter().copied())
    }
}

/// `p <= 0`, `p == 0` or `p != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CmpKind {
    Le,
    Eq,
    Ne,
}

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Const(bool),
    Var(usize),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Iff(NodeId, NodeId),
    Cmp(CmpKind, CPoly),
    /// Always holds: `aux == product of factors`.
    Prod(usize, Vec<usize>),
}

/// A model ready for search.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub names: Vec<String>,
    pub sorts: Vec<Sort>,
    /// Representative of each model variable; variables tied by a top-level
    /// `x == y` share the domain of the earliest declared one.
    pub rep: Vec<usize>,
    /// Domain slots: model variables followed by one auxiliary per distinct
    /// nonlinear monomial.
    pub slots: usize,
    pub nodes: Vec<Node>,
    pub roots: Vec<NodeId>,
    pub parents: Vec<Vec<NodeId>>,
    /// For each variable, the nodes whose truth depends on its bounds.
    pub watches: Vec<Vec<NodeId>>,
}

pub(crate) struct Compiler<'m> {
    model: &'m ConstraintModel,
    nodes: Vec<Node>,
    rep: Vec<usize>,
    monomials: HashMap<Mono, usize>,
}

fn find(rep: &mut [usize], v: usize) -> usize {
    let mut r = v;
    while rep[r] != r {
        r = rep[r];
    }
    rep[v] = r;
    r
}

/// Union-find over integer variables equated at the top level.
fn aliases(model: &ConstraintModel) -> Vec<usize> {
    let mut rep: Vec<usize> = (0..model.vars.len()).collect();
    for c in &model.constraints {
        let FlatExpr::Binary(BinaryOp::Eq, l, r) = c else {
            continue;
        };
        let (FlatExpr::Var(a), FlatExpr::Var(b)) = (&**l, &**r) else {
            continue;
        };
        let (Some((ia, _, Sort::Int)), Some((ib, _, Sort::Int))) =
            (model.vars.get_full(a), model.vars.get_full(b))
        else {
            continue;
        };
        let (ra, rb) = (find(&mut rep, ia), find(&mut rep, ib));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        rep[hi] = lo;
    }
    for v in 0..rep.len() {
        find(&mut rep, v);
    }
    rep
}

impl<'m> Compiler<'m> {
    pub(crate) fn new(model: &'m ConstraintModel) -> Self {
        Compiler {
            model,
            nodes: Vec::new(),
            rep: aliases(model),
            monomials: HashMap::new(),
        }
    }

    /// Index of the representative of `name`, and its sort.
    fn var_index(&self, name: &str) -> Result<(usize, Sort), SolveError> {
        self.model
            .vars
            .get_full(name)
            .map(|(i, _, s)| (self.rep[i], *s))
            .ok_or_else(|| SolveError::MalformedModel(format!("undeclared variable `{name}`")))
    }

    /// Propagation form of `p`, with nonlinear monomials replaced by
    /// auxiliary slots.
    fn cpoly(&mut self, p: &Poly) -> CPoly {
        let mut cp = p.compile();
        for t in &mut cp.terms {
            if t.vars.len() > 1 {
                let next = self.model.vars.len() + self.monomials.len();
                let aux = *self.monomials.entry(t.vars.clone()).or_insert(next);
                t.vars = vec![aux];
            }
        }
        cp
    }

    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn is_bool(&self, e: &FlatExpr) -> Result<bool, SolveError> {
        Ok(match e {
            FlatExpr::Int(_) => false,
            FlatExpr::Bool(_) => true,
            FlatExpr::Var(v) => self.var_index(v)?.1 == Sort::Bool,
            FlatExpr::Unary(UnaryOp::Neg, _) => false,
            FlatExpr::Unary(UnaryOp::Not, _) => true,
            FlatExpr::Binary(op, ..) => !op.is_arithmetic(),
        })
    }

    pub(crate) fn poly(&self, e: &FlatExpr) -> Result<Poly, SolveError> {
        let bad = |what: &str| SolveError::MalformedModel(format!("{what} used as an integer"));
        match e {
            FlatExpr::Int(v) => Ok(Poly::constant(*v as i128)),
            FlatExpr::Var(v) => {
                let (i, s) = self.var_index(v)?;
                if s != Sort::Int {
                    return Err(bad(&format!("boolean variable `{v}`")));
                }
                Ok(Poly::var(i))
            }
            FlatExpr::Unary(UnaryOp::Neg, x) => self.poly(x)?.scale(-1),
            FlatExpr::Binary(BinaryOp::Add, l, r) => self.poly(l)?.add(&self.poly(r)?),
            FlatExpr::Binary(BinaryOp::Sub, l, r) => self.poly(l)?.sub(&self.poly(r)?),
            FlatExpr::Binary(BinaryOp::Mul, l, r) => self.poly(l)?.mul(&self.poly(r)?),
            _ => Err(bad("boolean expression")),
        }
    }

    fn cmp(&mut self, kind: CmpKind, p: Poly) -> NodeId {
        match p.as_const() {
            Some(c) => self.push(Node::Const(match kind {
                CmpKind::Le => c <= 0,
                CmpKind::Eq => c == 0,
                CmpKind::Ne => c != 0,
            })),
            None => {
                let cp = self.cpoly(&p);
                self.push(Node::Cmp(kind, cp))
            }
        }
    }

    pub(crate) fn bool_node(&mut self, e: &FlatExpr) -> Result<NodeId, SolveError> {
        let bad = |what: &str| SolveError::MalformedModel(format!("{what} used as a boolean"));
        Ok(match e {
            FlatExpr::Bool(b) => self.push(Node::Const(*b)),
            FlatExpr::Var(v) => {
                let (i, s) = self.var_index(v)?;
                if s != Sort::Bool {
                    return Err(bad(&format!("integer variable `{v}`")));
                }
                self.push(Node::Var(i))
            }
            FlatExpr::Unary(UnaryOp::Not, x) => {
                let a = self.bool_node(x)?;
                self.push(Node::Not(a))
            }
            FlatExpr::Binary(op, l, r) => match op {
                BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => {
                    let mut a = self.bool_node(l)?;
                    if *op == BinaryOp::Implies {
                        a = self.push(Node::Not(a));
                    }
                    let b = self.bool_node(r)?;
                    if *op == BinaryOp::And {
                        self.push(Node::And(vec![a, b]))
                    } else {
                        self.push(Node::Or(vec![a, b]))
                    }
                }
                BinaryOp::Eq | BinaryOp::Ne if self.is_bool(l)? => {
                    if !self.is_bool(r)? {
                        return Err(SolveError::MalformedModel(
                            "comparison of a boolean with an integer".into(),
                        ));
                    }
                    let a = self.bool_node(l)?;
                    let b = self.bool_node(r)?;
                    let iff = self.push(Node::Iff(a, b));
                    if *op == BinaryOp::Ne {
                        self.push(Node::Not(iff))
                    } else {
                        iff
                    }
                }
                _ if op.is_comparison() => {
                    let pl = self.poly(l)?;
                    let pr = self.poly(r)?;
                    let (kind, p) = match op {
                        BinaryOp::Eq => (CmpKind::Eq, pl.sub(&pr)?),
                        BinaryOp::Ne => (CmpKind::Ne, pl.sub(&pr)?),
                        BinaryOp::Le => (CmpKind::Le, pl.sub(&pr)?),
                        BinaryOp::Lt => (CmpKind::Le, pl.sub(&pr)?.add(&Poly::constant(1))?),
                        BinaryOp::Ge => (CmpKind::Le, pr.sub(&pl)?),
                        _ => (CmpKind::Le, pr.sub(&pl)?.add(&Poly::constant(1))?),
                    };
                    self.cmp(kind, p)
                }
                _ => return Err(bad("integer expression")),
            },
            FlatExpr::Int(_) | FlatExpr::Unary(UnaryOp::Neg, _) => {
                return Err(bad("integer expression"))
            }
        })
    }

    /// Adds a root requiring `p <= 0`.
    pub(crate) fn le_zero(&mut self, p: Poly) -> NodeId {
        self.cmp(CmpKind::Le, p)
    }

    pub(crate) fn eq_zero(&mut self, p: Poly) -> NodeId {
        self.cmp(CmpKind::Eq, p)
    }

    pub(crate) fn finish(mut self, roots: Vec<NodeId>) -> Compiled {
        let n = self.model.vars.len();
        let slots = n + self.monomials.len();
        let mut monos: Vec<(usize, Mono)> = self.monomials.drain().map(|(m, a)| (a, m)).collect();
        monos.sort_unstable();
        for (aux, m) in monos {
            self.push(Node::Prod(aux, m));
        }
        let mut parents = vec![Vec::new(); self.nodes.len()];
        let mut watches = vec![Vec::new(); slots];
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Const(_) => {}
                Node::Var(i) => watches[*i].push(id),
                Node::Not(a) => parents[*a].push(id),
                Node::And(cs) | Node::Or(cs) => {
                    for c in cs {
                        parents[*c].push(id);
                    }
                }
                Node::Iff(a, b) => {
                    parents[*a].push(id);
                    parents[*b].push(id);
                }
                Node::Cmp(_, p) => {
                    let mut vs: Vec<usize> = p.vars().collect();
                    vs.sort_unstable();
                    vs.dedup();
                    for v in vs {
                        watches[v].push(id);
                    }
                }
                Node::Prod(aux, fs) => {
                    let mut vs = fs.clone();
                    vs.push(*aux);
                    vs.sort_unstable();
                    vs.dedup();
                    for v in vs {
                        watches[v].push(id);
                    }
                }
            }
        }
        Compiled {
            names: self.model.vars.keys().cloned().collect(),
            sorts: self.model.vars.values().copied().collect(),
            rep: self.rep,
            slots,
            nodes: self.nodes,
            roots,
            parents,
            watches,
        }
    }
}

/// Compiles every constraint of `model` as a root, plus any extra roots
/// built by `extra`.
pub(crate) fn compile_model(
    model: &ConstraintModel,
    extra: impl FnOnce(&mut Compiler) -> Result<Vec<NodeId>, SolveError>,
) -> Result<Compiled, SolveError> {
    let mut c = Compiler::new(model);
    let mut roots = Vec::new();
    for e in &model.constraints {
        roots.push(c.bool_node(e)?);
    }
    roots.extend(extra(&mut c)?);
    Ok(c.finish(roots))
}

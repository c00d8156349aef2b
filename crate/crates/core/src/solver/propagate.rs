//! Bounds-consistency propagation over the compiled node arena.

use std::collections::VecDeque;

use super::compile::{CPoly, CmpKind, Compiled, Node, NodeId};

/// Magnitudes at or beyond this are treated as unbounded.
pub(crate) const HUGE: i128 = 1 << 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Itv {
    pub lo: i128,
    pub hi: i128,
}

fn clamp(v: i128) -> i128 {
    v.clamp(-HUGE, HUGE)
}

impl Itv {
    pub(crate) fn point(v: i128) -> Self {
        Itv { lo: v, hi: v }
    }

    fn mul(self, o: Itv) -> Itv {
        let c = [
            self.lo.saturating_mul(o.lo),
            self.lo.saturating_mul(o.hi),
            self.hi.saturating_mul(o.lo),
            self.hi.saturating_mul(o.hi),
        ];
        Itv {
            lo: clamp(*c.iter().min().unwrap()),
            hi: clamp(*c.iter().max().unwrap()),
        }
    }

    fn add(self, o: Itv) -> Itv {
        Itv {
            lo: clamp(self.lo.saturating_add(o.lo)),
            hi: clamp(self.hi.saturating_add(o.hi)),
        }
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Search state: variable bounds and node truth values.
#[derive(Debug, Clone)]
pub(crate) struct State {
    pub dom: Vec<Itv>,
    /// -1 unknown, 0 false, 1 true.
    pub truth: Vec<i8>,
}

impl State {
    pub(crate) fn is_fixed(&self, v: usize) -> bool {
        self.dom[v].lo == self.dom[v].hi
    }

    pub(crate) fn term_itv(&self, coef: i128, vars: &[usize]) -> Itv {
        let mut acc = Itv::point(coef);
        for &v in vars {
            acc = acc.mul(self.dom[v]);
        }
        acc
    }

    pub(crate) fn poly_itv(&self, p: &CPoly) -> Itv {
        let mut acc = Itv::point(p.constant);
        for t in &p.terms {
            acc = acc.add(self.term_itv(t.coef, &t.vars));
        }
        acc
    }
}

pub(crate) struct Conflict;

pub(crate) struct Propagator<'c> {
    c: &'c Compiled,
    queue: VecDeque<NodeId>,
    queued: Vec<bool>,
    pub revisions: u64,
    cap: u64,
}

impl<'c> Propagator<'c> {
    pub(crate) fn new(c: &'c Compiled) -> Self {
        Propagator {
            c,
            queue: VecDeque::new(),
            queued: vec![false; c.nodes.len()],
            revisions: 0,
            cap: 20_000 + 50 * c.nodes.len() as u64,
        }
    }

    fn enqueue(&mut self, n: NodeId) {
        if !self.queued[n] {
            self.queued[n] = true;
            self.queue.push_back(n);
        }
    }

    fn var_changed(&mut self, v: usize) {
        for i in 0..self.c.watches[v].len() {
            self.enqueue(self.c.watches[v][i]);
        }
    }

    fn set_truth(&mut self, s: &mut State, n: NodeId, val: bool) -> Result<(), Conflict> {
        let t = val as i8;
        match s.truth[n] {
            -1 => {
                s.truth[n] = t;
                self.enqueue(n);
                for i in 0..self.c.parents[n].len() {
                    self.enqueue(self.c.parents[n][i]);
                }
                Ok(())
            }
            x if x == t => Ok(()),
            _ => Err(Conflict),
        }
    }

    fn set_lo(&mut self, s: &mut State, v: usize, lo: i128) -> Result<(), Conflict> {
        if lo > s.dom[v].lo {
            if lo > s.dom[v].hi {
                return Err(Conflict);
            }
            s.dom[v].lo = lo;
            self.var_changed(v);
        }
        Ok(())
    }

    fn set_hi(&mut self, s: &mut State, v: usize, hi: i128) -> Result<(), Conflict> {
        if hi < s.dom[v].hi {
            if hi < s.dom[v].lo {
                return Err(Conflict);
            }
            s.dom[v].hi = hi;
            self.var_changed(v);
        }
        Ok(())
    }

    /// Propagation from scratch: every node is revised and roots are asserted.
    pub(crate) fn initial(&mut self, s: &mut State) -> Result<(), Conflict> {
        for n in 0..self.c.nodes.len() {
            self.enqueue(n);
        }
        for i in 0..self.c.roots.len() {
            let r = self.c.roots[i];
            self.set_truth(s, r, true)?;
        }
        self.run(s)
    }

    /// Propagation after the bounds of `v` were tightened by branching.
    pub(crate) fn after_branch(&mut self, s: &mut State, v: usize) -> Result<(), Conflict> {
        self.var_changed(v);
        self.run(s)
    }

    fn run(&mut self, s: &mut State) -> Result<(), Conflict> {
        let start = self.revisions;
        let result = loop {
            let Some(n) = self.queue.pop_front() else {
                break Ok(());
            };
            self.queued[n] = false;
            self.revisions += 1;
            if self.revisions - start > self.cap {
                // stop early; search and leaf verification stay sound
                break Ok(());
            }
            if let Err(c) = self.revise(s, n) {
                break Err(c);
            }
        };
        while let Some(n) = self.queue.pop_front() {
            self.queued[n] = false;
        }
        result
    }

    fn revise(&mut self, s: &mut State, n: NodeId) -> Result<(), Conflict> {
        let c = self.c;
        match &c.nodes[n] {
            Node::Const(b) => self.set_truth(s, n, *b),
            Node::Var(v) => {
                let v = *v;
                if s.is_fixed(v) {
                    self.set_truth(s, n, s.dom[v].lo != 0)?;
                }
                match s.truth[n] {
                    1 => self.set_lo(s, v, 1),
                    0 => self.set_hi(s, v, 0),
                    _ => Ok(()),
                }
            }
            Node::Not(a) => {
                let a = *a;
                if s.truth[a] >= 0 {
                    self.set_truth(s, n, s.truth[a] == 0)?;
                }
                if s.truth[n] >= 0 {
                    self.set_truth(s, a, s.truth[n] == 0)?;
                }
                Ok(())
            }
            Node::And(cs) => self.revise_junction(s, n, cs, true),
            Node::Or(cs) => self.revise_junction(s, n, cs, false),
            Node::Iff(a, b) => {
                let (a, b) = (*a, *b);
                let (ta, tb) = (s.truth[a], s.truth[b]);
                if ta >= 0 && tb >= 0 {
                    self.set_truth(s, n, ta == tb)?;
                }
                let tn = s.truth[n];
                if tn >= 0 {
                    if ta >= 0 {
                        self.set_truth(s, b, (ta == 1) == (tn == 1))?;
                    } else if tb >= 0 {
                        self.set_truth(s, a, (tb == 1) == (tn == 1))?;
                    }
                }
                Ok(())
            }
            Node::Prod(aux, fs) => {
                let aux = *aux;
                let prod = s.term_itv(1, fs);
                self.set_lo(s, aux, prod.lo)?;
                self.set_hi(s, aux, prod.hi)?;
                let Itv { lo, hi } = s.dom[aux];
                if hi < HUGE {
                    self.narrow_term(s, 1, fs, hi)?;
                }
                if lo > -HUGE {
                    self.narrow_term(s, -1, fs, -lo)?;
                }
                Ok(())
            }
            Node::Cmp(kind, p) => {
                let itv = s.poly_itv(p);
                let decided = match kind {
                    CmpKind::Le if itv.hi <= 0 => Some(true),
                    CmpKind::Le if itv.lo > 0 => Some(false),
                    CmpKind::Eq | CmpKind::Ne if itv.lo == 0 && itv.hi == 0 => {
                        Some(*kind == CmpKind::Eq)
                    }
                    CmpKind::Eq | CmpKind::Ne if itv.lo > 0 || itv.hi < 0 => {
                        Some(*kind == CmpKind::Ne)
                    }
                    _ => None,
                };
                if let Some(d) = decided {
                    self.set_truth(s, n, d)?;
                }
                let holds = match s.truth[n] {
                    -1 => return Ok(()),
                    t => t == 1,
                };
                match (kind, holds) {
                    (CmpKind::Le, true) => self.narrow_le(s, p, 1, 0),
                    // not (p <= 0)  <=>  -p + 1 <= 0
                    (CmpKind::Le, false) => self.narrow_le(s, p, -1, 1),
                    (CmpKind::Eq, true) | (CmpKind::Ne, false) => {
                        self.narrow_le(s, p, 1, 0)?;
                        self.narrow_le(s, p, -1, 0)
                    }
                    (CmpKind::Eq, false) | (CmpKind::Ne, true) => self.narrow_ne(s, p),
                }
            }
        }
    }

    /// `And` when `conj`, else `Or`.
    fn revise_junction(
        &mut self,
        s: &mut State,
        n: NodeId,
        cs: &[NodeId],
        conj: bool,
    ) -> Result<(), Conflict> {
        // For Or, the roles of true and false swap.
        let absorbing = if conj { 0 } else { 1 };
        let neutral = 1 - absorbing;
        let mut unknown = None;
        let mut n_unknown = 0;
        for &c in cs {
            match s.truth[c] {
                t if t == absorbing => return self.set_truth(s, n, !conj),
                -1 => {
                    n_unknown += 1;
                    unknown = Some(c);
                }
                _ => {}
            }
        }
        if n_unknown == 0 {
            return self.set_truth(s, n, conj);
        }
        match s.truth[n] {
            t if t == neutral => {
                for &c in cs {
                    self.set_truth(s, c, neutral == 1)?;
                }
            }
            t if t == absorbing && n_unknown == 1 => {
                self.set_truth(s, unknown.unwrap(), absorbing == 1)?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Narrows bounds so that `sign * p + offset <= 0` stays satisfiable.
    fn narrow_le(
        &mut self,
        s: &mut State,
        p: &CPoly,
        sign: i128,
        offset: i128,
    ) -> Result<(), Conflict> {
        let k = p.constant * sign + offset;
        let mins: Vec<i128> = p
            .terms
            .iter()
            .map(|t| s.term_itv(t.coef * sign, &t.vars).lo)
            .collect();
        let unbounded = mins.iter().filter(|m| **m <= -HUGE).count();
        if unbounded > 1 {
            return Ok(());
        }
        let total: i128 = mins.iter().filter(|m| **m > -HUGE).sum::<i128>() + k;
        if unbounded == 0 && total > 0 {
            return Err(Conflict);
        }
        for (j, t) in p.terms.iter().enumerate() {
            if unbounded == 1 && mins[j] > -HUGE {
                continue;
            }
            // coef * mono <= r
            let r = if mins[j] <= -HUGE {
                -total
            } else {
                mins[j] - total
            };
            if r.abs() >= HUGE {
                continue;
            }
            let coef = t.coef * sign;
            self.narrow_term(s, coef, &t.vars, r)?;
        }
        Ok(())
    }

    fn narrow_term(
        &mut self,
        s: &mut State,
        coef: i128,
        vars: &[usize],
        r: i128,
    ) -> Result<(), Conflict> {
        if let [x] = vars {
            let x = *x;
            return if coef > 0 {
                self.set_hi(s, x, div_floor(r, coef))
            } else {
                self.set_lo(s, x, div_ceil(r, coef))
            };
        }
        for (i, &x) in vars.iter().enumerate() {
            let mut rest = Itv::point(coef);
            for (j, &y) in vars.iter().enumerate() {
                if i != j {
                    rest = rest.mul(s.dom[y]);
                }
            }
            if rest.lo <= 0 && rest.hi >= 0 || rest.lo.abs() >= HUGE || rest.hi.abs() >= HUGE {
                continue;
            }
            // x * q <= r for some q in rest
            if rest.lo > 0 {
                let q = if r >= 0 { rest.lo } else { rest.hi };
                self.set_hi(s, x, div_floor(r, q))?;
            } else {
                let q = if r >= 0 { rest.hi } else { rest.lo };
                self.set_lo(s, x, div_ceil(r, q))?;
            }
        }
        Ok(())
    }

    fn narrow_ne(&mut self, s: &mut State, p: &CPoly) -> Result<(), Conflict> {
        let mut free = None;
        let mut rest = p.constant;
        for t in &p.terms {
            if t.vars.iter().all(|&v| s.is_fixed(v)) {
                let itv = s.term_itv(t.coef, &t.vars);
                rest += itv.lo;
            } else if free.is_none() && t.vars.len() == 1 {
                free = Some((t.coef, t.vars[0]));
            } else {
                return Ok(());
            }
        }
        let Some((coef, x)) = free else {
            return if rest == 0 { Err(Conflict) } else { Ok(()) };
        };
        // coef * x + rest != 0
        if rest % coef != 0 {
            return Ok(());
        }
        let forbidden = -rest / coef;
        if s.dom[x].lo == forbidden {
            self.set_lo(s, x, forbidden + 1)?;
        }
        if s.dom[x].hi == forbidden {
            self.set_hi(s, x, forbidden - 1)?;
        }
        Ok(())
    }
}

//! Cycle detection for type containment and derived-property definitions.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::analyze::DefKey;
use super::diagnostic::Diagnostic;
use crate::syntax::{DerivedDef, Ident, Span, Spec, TypeRef};

/// Reports every set of types that (transitively) contain themselves.
pub(crate) fn type_cycle_diagnostics(spec: &Spec) -> Vec<(DefKey, Diagnostic)> {
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let mut index: HashMap<&str, NodeIndex> = HashMap::new();
    for (i, t) in spec.types.iter().enumerate() {
        index
            .entry(t.name.as_str())
            .or_insert_with(|| g.add_node(i));
    }
    for t in &spec.types {
        let from = index[t.name.as_str()];
        for p in &t.props {
            if let TypeRef::Named(n) = &p.ty {
                if let Some(&to) = index.get(n.as_str()) {
                    g.update_edge(from, to, ());
                }
            }
        }
    }
    let mut out = Vec::new();
    for scc in cycles_of(&g) {
        let names: Vec<&Ident> = scc.iter().map(|&n| &spec.types[g[n]].name).collect();
        for &n in &scc {
            let t = &spec.types[g[n]];
            out.push((
                DefKey::Type(t.name.clone()),
                Diagnostic::error(
                    format!("type `{}` contains itself through {}", t.name, join(&names)),
                    t.span,
                ),
            ));
        }
    }
    out
}

/// Reports derived properties whose definitions depend on themselves.
pub(crate) fn derived_cycle_diagnostics(spec: &Spec) -> Vec<(DefKey, Diagnostic)> {
    let mut out = Vec::new();
    for t in &spec.types {
        derived_group(&t.derived, DefKey::Type(t.name.clone()), &mut out);
    }
    for a in &spec.actions {
        derived_group(&a.derived, DefKey::Action(a.name.clone()), &mut out);
    }
    for d in &spec.devices {
        derived_group(&d.derived, DefKey::Device(d.name.clone()), &mut out);
    }
    out
}

// Derived properties refer to siblings by bare name, and cross-owner references
// only go down the containment order, so cycles are always within one owner.
fn derived_group(defs: &[DerivedDef], key: DefKey, out: &mut Vec<(DefKey, Diagnostic)>) {
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let mut index: HashMap<&str, NodeIndex> = HashMap::new();
    for (i, d) in defs.iter().enumerate() {
        index
            .entry(d.name.as_str())
            .or_insert_with(|| g.add_node(i));
    }
    for d in defs {
        let from = index[d.name.as_str()];
        for r in d.body.free_refs() {
            if let Some(&to) = index.get(r.as_str()) {
                g.update_edge(from, to, ());
            }
        }
    }
    for scc in cycles_of(&g) {
        let names: Vec<&Ident> = scc.iter().map(|&n| &defs[g[n]].name).collect();
        let span: Span = defs[g[scc[0]]].span;
        out.push((
            key.clone(),
            Diagnostic::error(
                format!("derived properties form a cycle: {}", join(&names)),
                span,
            ),
        ));
    }
}

fn cycles_of(g: &DiGraph<usize, ()>) -> Vec<Vec<NodeIndex>> {
    let mut sccs: Vec<Vec<NodeIndex>> = tarjan_scc(g)
        .into_iter()
        .filter(|scc| scc.len() > 1 || g.contains_edge(scc[0], scc[0]))
        .map(|mut scc| {
            scc.sort_by_key(|&n| g[n]);
            scc
        })
        .collect();
    sccs.sort_by_key(|scc| g[scc[0]]);
    sccs
}

fn join(names: &[&Ident]) -> String {
    names
        .iter()
        .map(|n| format!("`{n}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

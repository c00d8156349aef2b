use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};

use crate::solver::{Budget, DomainBox};
use crate::syntax::pretty::{print_action, print_device, print_scenario, print_type};
use crate::syntax::{Spec, TypeRef};

/// Structural hash of a definition's syntax tree, the trees it depends on,
/// the query kind and the solver settings.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey([u8; 32]);

impl fmt::Debug for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// What a cached result answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    TypeInhabitance,
    ActionInhabitance,
    DeviceInhabitance,
    Scenario,
}

impl QueryKind {
    fn tag(self) -> &'static str {
        match self {
            QueryKind::TypeInhabitance => "inhabit-type",
            QueryKind::ActionInhabitance => "inhabit-action",
            QueryKind::DeviceInhabitance => "inhabit-device",
            QueryKind::Scenario => "scenario",
        }
    }
}

#[derive(Default)]
struct Closure {
    types: BTreeSet<String>,
    actions: BTreeSet<String>,
    devices: BTreeSet<String>,
}

impl Closure {
    fn add_type(&mut self, spec: &Spec, name: &str) {
        if !self.types.insert(name.to_string()) {
            return;
        }
        if let Some(t) = spec.type_def(name) {
            for p in &t.props {
                if let TypeRef::Named(n) = &p.ty {
                    self.add_type(spec, n.as_str());
                }
            }
        }
    }

    fn add_action(&mut self, spec: &Spec, name: &str) {
        if !self.actions.insert(name.to_string()) {
            return;
        }
        if let Some(a) = spec.action_def(name) {
            for l in &a.loc_params {
                self.add_type(spec, l.ty.as_str());
            }
        }
    }

    fn add_device(&mut self, spec: &Spec, name: &str) {
        if !self.devices.insert(name.to_string()) {
            return;
        }
        if let Some(d) = spec.device_def(name) {
            for l in &d.locations {
                self.add_type(spec, l.ty.as_str());
            }
            for c in &d.components {
                self.add_action(spec, c.action.as_str());
            }
        }
    }
}

/// Key for a query about the definition `name`. Every definition the answer
/// can depend on is hashed in canonical printed form, so source positions
/// and unrelated edits do not change the key.
pub fn cache_key(
    spec: &Spec,
    kind: QueryKind,
    name: &str,
    dbox: &DomainBox,
    budget: &Budget,
) -> CacheKey {
    let mut closure = Closure::default();
    let mut h = Sha256::new();
    h.update(kind.tag().as_bytes());
    h.update([0]);
    h.update(name.as_bytes());
    h.update([0]);
    match kind {
        QueryKind::TypeInhabitance => closure.add_type(spec, name),
        QueryKind::ActionInhabitance => closure.add_action(spec, name),
        QueryKind::DeviceInhabitance => closure.add_device(spec, name),
        QueryKind::Scenario => {
            if let Some(s) = spec.scenario_def(name) {
                h.update(print_scenario(s).as_bytes());
                closure.add_device(spec, s.device.as_str());
            }
        }
    }
    // definitions that are missing or duplicated hash as all matches in order
    for t in &closure.types {
        h.update(b"type\0");
        for d in spec.types.iter().filter(|d| d.name.as_str() == t) {
            h.update(print_type(d).as_bytes());
        }
    }
    for a in &closure.actions {
        h.update(b"action\0");
        for d in spec.actions.iter().filter(|d| d.name.as_str() == a) {
            h.update(print_action(d).as_bytes());
        }
    }
    for dv in &closure.devices {
        h.update(b"device\0");
        for d in spec.devices.iter().filter(|d| d.name.as_str() == dv) {
            h.update(print_device(d).as_bytes());
        }
    }
    h.update(serde_json::to_vec(dbox).unwrap_or_default());
    h.update(serde_json::to_vec(budget).unwrap_or_default());
    CacheKey(h.finalize().into())
}

/// Get-or-compute map; concurrent requests for one key compute at most once.
pub struct Cache<V> {
    map: Mutex<HashMap<CacheKey, Arc<OnceLock<V>>>>,
}

impl<V> Default for Cache<V> {
    fn default() -> Self {
        Cache {
            map: Mutex::new(HashMap::new()),
        }
    }
}

impl<V: Clone> Cache<V> {
    pub fn get_or_compute(&self, key: CacheKey, compute: impl FnOnce() -> V) -> V {
        let cell = {
            let mut map = self.map.lock().unwrap_or_else(|e| e.into_inner());
            map.entry(key).or_default().clone()
        };
        cell.get_or_init(compute).clone()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

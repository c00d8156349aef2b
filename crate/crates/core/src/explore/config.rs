use std::fmt::Write;

use serde::Serialize;

use crate::eval::{flatten, ModelValue, Value};
use crate::solver::Assignment;

/// A full valuation of a device's locations and component parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Configuration {
    pub value: ModelValue,
}

impl Configuration {
    pub fn new(value: ModelValue) -> Self {
        Configuration { value }
    }

    pub fn flat(&self) -> Assignment {
        flatten(&self.value)
    }

    /// One `qualified_name = value` line per primitive leaf.
    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.flat() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Nested blocks mirroring the configuration structure.
    pub fn to_tree_text(&self) -> String {
        let mut out = String::new();
        write_tree(&mut out, &self.value, 0);
        out
    }

    pub fn to_flat_json(&self) -> serde_json::Value {
        serde_json::to_value(self.flat()).unwrap_or_default()
    }

    pub fn to_tree_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.value).unwrap_or_default()
    }
}

fn write_tree(out: &mut String, m: &ModelValue, depth: usize) {
    let pad = "  ".repeat(depth);
    for (k, v) in &m.fields {
        match v {
            Value::Model(sub) if sub.fields.is_empty() => {
                let _ = writeln!(out, "{pad}{k} {{}}");
            }
            Value::Model(sub) => {
                let _ = writeln!(out, "{pad}{k} {{");
                write_tree(out, sub, depth + 1);
                let _ = writeln!(out, "{pad}}}");
            }
            leaf => {
                let _ = writeln!(out, "{pad}{k} = {leaf}");
            }
        }
    }
}

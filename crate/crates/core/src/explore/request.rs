//! JSON shapes shared by the command line and the HTTP service.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use super::{Configuration, Exploration, ExplorationOutcome, Job};
use crate::eval::{ModelValue, Value};
use crate::semantics::TypedSpec;
use crate::syntax::{parse_expr, Ident, Literal, Path, PrimType, Sense, TypeRef};

/// A job as submitted by clients: leaves fixed by dotted path, extra
/// constraints and an objective as source text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    pub device: String,
    #[serde(default)]
    pub fixed: IndexMap<String, Literal>,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub objective: Option<ObjectiveRequest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveRequest {
    pub sense: Sense,
    pub expr: String,
}

impl ObjectiveRequest {
    /// Parses `minimize:<expr>` or `maximize:<expr>`.
    pub fn parse(text: &str) -> Result<ObjectiveRequest, String> {
        let (sense, expr) = text
            .split_once(':')
            .ok_or_else(|| format!("objective `{text}` is not of the form <sense>:<expr>"))?;
        let sense = match sense.trim() {
            "minimize" | "min" => Sense::Minimize,
            "maximize" | "max" => Sense::Maximize,
            other => return Err(format!("unknown objective sense `{other}`")),
        };
        Ok(ObjectiveRequest {
            sense,
            expr: expr.trim().to_string(),
        })
    }
}

/// Parses `<path>=<value>` with an integer or boolean value.
pub fn parse_binding(text: &str) -> Result<(String, Literal), String> {
    let (path, value) = text
        .split_once('=')
        .ok_or_else(|| format!("binding `{text}` is not of the form <path>=<value>"))?;
    Ok((path.trim().to_string(), parse_literal(value.trim())?))
}

pub fn parse_literal(text: &str) -> Result<Literal, String> {
    match text {
        "true" => Ok(Literal::Bool(true)),
        "false" => Ok(Literal::Bool(false)),
        _ => text
            .parse::<i64>()
            .map(Literal::Int)
            .map_err(|_| format!("`{text}` is neither an integer nor a boolean")),
    }
}

impl JobRequest {
    pub fn new(device: impl Into<String>) -> Self {
        JobRequest {
            device: device.into(),
            ..JobRequest::default()
        }
    }

    /// Parses paths and expressions. Errors describe the offending input.
    pub fn to_job(&self) -> Result<Job, String> {
        let mut job = Job::new(self.device.clone());
        for (path, value) in &self.fixed {
            let p = Path::parse(path).map_err(|e| format!("invalid path `{path}`: {e}"))?;
            job.fixed.push((p, *value));
        }
        for c in &self.constraints {
            let e = parse_expr(c).map_err(|e| format!("invalid constraint `{c}`: {e}"))?;
            job.constraints.push(e);
        }
        if let Some(o) = &self.objective {
            let e =
                parse_expr(&o.expr).map_err(|e| format!("invalid objective `{}`: {e}", o.expr))?;
            job.objective = Some((o.sense, e));
        }
        Ok(job)
    }
}

/// The outcome in the wire format: status, objective, and the configuration
/// in flat and hierarchical form.
pub fn outcome_json(outcome: &ExplorationOutcome) -> Json {
    let config = |c: Option<&Configuration>| match c {
        Some(c) => (c.to_flat_json(), c.to_tree_json()),
        None => (Json::Null, Json::Null),
    };
    match outcome {
        ExplorationOutcome::Found {
            configuration,
            objective,
            optimal,
        } => {
            let (flat, tree) = config(Some(configuration));
            json!({
                "status": "found",
                "objective": objective,
                "optimal": optimal,
                "configuration": flat,
                "tree": tree,
            })
        }
        ExplorationOutcome::EmptySpace => json!({ "status": "empty" }),
        ExplorationOutcome::Exhausted {
            incumbent,
            objective,
        } => {
            let (flat, tree) = config(incumbent.as_ref());
            json!({
                "status": "exhausted",
                "objective": objective,
                "configuration": flat,
                "tree": tree,
            })
        }
    }
}

/// [`outcome_json`] plus model size and search effort. Wall-clock times are
/// left out so that identical requests give identical bytes.
pub fn exploration_json(x: &Exploration) -> Json {
    let mut v = outcome_json(&x.outcome);
    v["model"] = json!({ "variables": x.variables, "constraints": x.constraints });
    v["search"] = json!({ "nodes": x.stats.nodes, "propagations": x.stats.propagations });
    v
}

/// Reads a configuration from JSON: nested objects mirror the configuration
/// tree, and keys may also be dotted paths.
pub fn configuration_from_json(v: &Json) -> Result<ModelValue, String> {
    let Json::Object(map) = v else {
        return Err("configuration must be a JSON object".into());
    };
    let mut m = ModelValue::new();
    for (k, v) in map {
        let path = Path::parse(k).map_err(|e| format!("invalid key `{k}`: {e}"))?;
        let value = match v {
            Json::Bool(b) => Value::Bool(*b),
            Json::Number(n) => Value::Int(
                n.as_i64()
                    .ok_or_else(|| format!("`{k}`: {n} is not a 64-bit integer"))?,
            ),
            Json::Object(_) => Value::Model(configuration_from_json(v)?),
            other => return Err(format!("`{k}`: unsupported value {other}")),
        };
        match (&value, path.0.as_slice()) {
            (Value::Model(sub), [single]) => {
                let mut merged = match m.fields.shift_remove(single) {
                    Some(Value::Model(prev)) => prev,
                    _ => ModelValue::new(),
                };
                for (sk, sv) in &sub.fields {
                    merged.fields.insert(sk.clone(), sv.clone());
                }
                m.fields.insert(single.clone(), Value::Model(merged));
            }
            _ => m.insert(&path.0, value),
        }
    }
    Ok(m)
}

/// A property of a location type: a primitive leaf or a nested type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertySchema {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sort: Option<PrimType>,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub ty: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<PropertySchema>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocationSchema {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub properties: Vec<PropertySchema>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterSchema {
    pub name: String,
    pub sort: PrimType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSchema {
    pub name: String,
    pub action: String,
    pub parameters: Vec<ParameterSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafSchema {
    pub path: String,
    pub sort: PrimType,
}

/// Everything a client needs to build a job form for a device.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviceSchema {
    pub name: String,
    pub locations: Vec<LocationSchema>,
    pub components: Vec<ComponentSchema>,
    /// Every primitive leaf, in the order of the flat configuration.
    pub leaves: Vec<LeafSchema>,
}

fn properties(tspec: &TypedSpec, ty: &Ident, depth: usize) -> Vec<PropertySchema> {
    let Some(td) = tspec.type_def(ty.as_str()) else {
        return Vec::new();
    };
    td.props
        .iter()
        .map(|(name, pty)| match pty {
            TypeRef::Prim(s) => PropertySchema {
                name: name.to_string(),
                sort: Some(*s),
                ty: None,
                properties: Vec::new(),
            },
            TypeRef::Named(n) => PropertySchema {
                name: name.to_string(),
                sort: None,
                ty: Some(n.to_string()),
                properties: if depth < 64 {
                    properties(tspec, n, depth + 1)
                } else {
                    Vec::new()
                },
            },
        })
        .collect()
}

pub fn device_schema(tspec: &TypedSpec, device: &str) -> Option<DeviceSchema> {
    let dev = tspec.device(device)?;
    let locations = dev
        .locations
        .iter()
        .map(|(name, ty)| LocationSchema {
            name: name.to_string(),
            ty: ty.to_string(),
            properties: properties(tspec, ty, 0),
        })
        .collect();
    let components = dev
        .components
        .iter()
        .map(|c| ComponentSchema {
            name: c.name.to_string(),
            action: c.action.to_string(),
            parameters: tspec
                .action(c.action.as_str())
                .map(|a| {
                    a.params
                        .iter()
                        .map(|(n, s)| ParameterSchema {
                            name: n.to_string(),
                            sort: *s,
                        })
                        .collect()
                })
                .unwrap_or_default(),
        })
        .collect();
    let leaves = crate::eval::device_leaves(tspec, device)
        .unwrap_or_default()
        .into_iter()
        .map(|(p, sort)| LeafSchema {
            path: p.to_string(),
            sort,
        })
        .collect();
    Some(DeviceSchema {
        name: dev.name.to_string(),
        locations,
        components,
        leaves,
    })
}

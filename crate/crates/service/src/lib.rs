//! HTTP API over analysis and exploration: upload a workspace, list device
//! schemas, solve jobs and evaluate expressions under a configuration.
//!
//! | Method | Path | Purpose |
//! |---|---|---|
//! | `PUT` | `/workspace` | upload sources, get diagnostics and inhabitance |
//! | `GET` | `/workspace/{id}/devices` | device schemas for job forms |
//! | `POST` | `/workspace/{id}/solve` | find a configuration for a job |
//! | `POST` | `/workspace/{id}/eval` | evaluate an expression |

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use csx_core::eval::{eval_expr, ModelValue};
use csx_core::explore::{
    configuration_from_json, device_schema, exploration_json, find_configuration,
    ExplorationOutcome, ExploreError, Explorer, JobRequest, SourceInput, WorkspaceReport,
};
use csx_core::semantics::{analyze_device_expr, DefKey};
use csx_core::solver::{Budget, DomainBox};
use csx_core::syntax::parse_expr;
use serde::Deserialize;
use serde_json::{json, Value as Json_};
use tower_http::cors::CorsLayer;

/// Default bounds and budget for analysis and solving.
#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub dbox: DomainBox,
    pub budget: Budget,
}

struct Workspace {
    revision: u64,
    report: WorkspaceReport,
    /// Kept across revisions so unchanged definitions are not re-checked.
    explorer: Arc<Explorer>,
    last: Mutex<Option<(String, ModelValue)>>,
}

/// Shared service state: workspaces by id.
pub struct AppState {
    config: ServiceConfig,
    workspaces: RwLock<HashMap<String, Arc<Workspace>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            config,
            workspaces: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    fn get(&self, id: &str) -> Result<Arc<Workspace>, ApiError> {
        self.workspaces
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| {
                ApiError::new(StatusCode::NOT_FOUND, format!("unknown workspace `{id}`"))
            })
    }
}

/// An error response: status plus `{"error": message}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Json_,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("invalid request body: {e}"),
        )
    })
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/workspace", put(upload))
        .route("/workspace/{id}/devices", get(devices))
        .route("/workspace/{id}/solve", post(solve))
        .route("/workspace/{id}/eval", post(eval))
        .layer(CorsLayer::permissive())
        .with_state(Arc::new(AppState::new(config)))
}

/// Serves the API on `addr` until the process is stopped.
pub async fn serve(addr: &str, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config)).await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBody {
    name: String,
    text: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UploadBody {
    #[serde(default)]
    workspace: Option<String>,
    files: Vec<FileBody>,
}

fn report_json(report: &WorkspaceReport) -> (Json_, Json_) {
    let diagnostics = report
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "severity": d.severity,
                "message": d.message,
                "location": report.sources.location(d.span),
                "start": d.span.start,
                "end": d.span.end,
            })
        })
        .collect();
    let inhabitance = report
        .inhabitance
        .iter()
        .map(|e| {
            let verdict = match &e.verdict {
                Ok(v) => json!(v),
                Err(msg) => json!({ "error": msg }),
            };
            json!({ "kind": e.kind, "name": e.name, "verdict": verdict })
        })
        .collect();
    (diagnostics, inhabitance)
}

/// `PUT /workspace`: JSON `{"workspace"?, "files": [{name, text}]}` or a
/// plain-text body holding one file. Re-uploading to an existing id bumps
/// its revision.
async fn upload(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: String,
) -> Result<Response, ApiError> {
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let (id, sources) = if is_json {
        let b: UploadBody = parse_body(&body)?;
        let files = b
            .files
            .into_iter()
            .map(|f| SourceInput::new(f.name, f.text))
            .collect();
        (b.workspace, files)
    } else {
        (None, vec![SourceInput::new("workspace.csx", body)])
    };
    let id = id.unwrap_or_else(|| format!("w{}", state.next_id.fetch_add(1, Ordering::Relaxed)));
    let explorer = match state.get(&id) {
        Ok(ws) => ws.explorer.clone(),
        Err(_) => Arc::new(Explorer::new(
            state.config.dbox.clone(),
            state.config.budget,
        )),
    };
    let ex = explorer.clone();
    let report = tokio::task::spawn_blocking(move || ex.analyze_workspace(&sources, false))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let (diagnostics, inhabitance) = report_json(&report);
    if report.parse_failed {
        return Ok((
            StatusCode::BAD_REQUEST,
            Json(json!({ "error": "parse failure", "diagnostics": diagnostics })),
        )
            .into_response());
    }
    let errors = report.diagnostics.iter().filter(|d| d.is_error()).count();
    let revision = {
        let mut map = state.workspaces.write().unwrap_or_else(|e| e.into_inner());
        let revision = map.get(&id).map_or(1, |w| w.revision + 1);
        map.insert(
            id.clone(),
            Arc::new(Workspace {
                revision,
                report,
                explorer,
                last: Mutex::new(None),
            }),
        );
        revision
    };
    Ok(Json(json!({
        "workspace": id,
        "revision": revision,
        "errors": errors,
        "diagnostics": diagnostics,
        "inhabitance": inhabitance,
    }))
    .into_response())
}

/// `GET /workspace/{id}/devices`: schemas of every device in source order.
async fn devices(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Json_>, ApiError> {
    let ws = state.get(&id)?;
    let tspec = ws.report.tspec();
    let list: Vec<Json_> = tspec
        .spec
        .devices
        .iter()
        .filter_map(|d| device_schema(tspec, d.name.as_str()))
        .map(|s| json!(s))
        .collect();
    Ok(Json(json!({ "revision": ws.revision, "devices": list })))
}

fn check_revision(ws: &Workspace, revision: Option<u64>) -> Result<(), ApiError> {
    match revision {
        Some(r) if r != ws.revision => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!(
                "revision {r} is stale; the workspace is at revision {}",
                ws.revision
            ),
        )),
        _ => Ok(()),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Bounds {
    int_min: i64,
    int_max: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetBody {
    #[serde(default)]
    nodes: Option<u64>,
    #[serde(default)]
    ms: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveControls {
    #[serde(default)]
    revision: Option<u64>,
    #[serde(default)]
    bounds: Option<Bounds>,
    #[serde(default)]
    budget: Option<BudgetBody>,
}

/// Splits a solve body into the job and the request controls.
fn split_solve_body(body: &str) -> Result<(JobRequest, SolveControls), ApiError> {
    let mut v: Json_ = parse_body(body)?;
    let Json_::Object(map) = &mut v else {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "request body must be a JSON object",
        ));
    };
    let mut controls = serde_json::Map::new();
    for k in ["revision", "bounds", "budget"] {
        if let Some(c) = map.shift_remove(k) {
            controls.insert(k.to_string(), c);
        }
    }
    let bad = |e: serde_json::Error| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("invalid request body: {e}"),
        )
    };
    let job = serde_json::from_value(v).map_err(bad)?;
    let controls = serde_json::from_value(Json_::Object(controls)).map_err(bad)?;
    Ok((job, controls))
}

/// `POST /workspace/{id}/solve`.
async fn solve(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<Json_>, ApiError> {
    let ws = state.get(&id)?;
    let (request, b) = split_solve_body(&body)?;
    check_revision(&ws, b.revision)?;
    let tspec = ws.report.tspec();
    let Some(dev) = tspec.device(&request.device) else {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            format!("unknown device `{}`", request.device),
        ));
    };
    if !ws
        .report
        .analysis
        .is_clean(&DefKey::Device(dev.name.clone()))
    {
        return Err(ApiError::unprocessable(format!(
            "device `{}` has errors",
            request.device
        )));
    }
    let job = request.to_job().map_err(ApiError::unprocessable)?;
    let dbox = match b.bounds {
        Some(Bounds { int_min, int_max }) if int_min <= int_max => {
            DomainBox::uniform(int_min, int_max)
        }
        Some(_) => {
            return Err(ApiError::unprocessable(
                "bounds.int_min exceeds bounds.int_max",
            ))
        }
        None => state.config.dbox.clone(),
    };
    let mut budget = state.config.budget;
    if let Some(bb) = b.budget {
        if let Some(n) = bb.nodes {
            budget.max_nodes = n.max(1);
        }
        if let Some(ms) = bb.ms {
            budget.max_time = Some(Duration::from_millis(ms.max(1)));
        }
    }
    let ws2 = ws.clone();
    let result = tokio::task::spawn_blocking(move || {
        find_configuration(ws2.report.tspec(), &job, &dbox, budget)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let x = result.map_err(|e| match e {
        ExploreError::UnknownDevice(_) => ApiError::new(StatusCode::NOT_FOUND, e.to_string()),
        ExploreError::BadPath(_) | ExploreError::BadExpr(_) => {
            ApiError::unprocessable(e.to_string())
        }
        other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other.to_string()),
    })?;
    if let ExplorationOutcome::Found { configuration, .. } = &x.outcome {
        *ws.last.lock().unwrap_or_else(|e| e.into_inner()) =
            Some((request.device.clone(), configuration.value.clone()));
    }
    let mut v = exploration_json(&x);
    v["revision"] = json!(ws.revision);
    Ok(Json(v))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalBody {
    expr: String,
    #[serde(default)]
    device: Option<String>,
    #[serde(default)]
    configuration: Option<Json_>,
    #[serde(default)]
    revision: Option<u64>,
}

/// `POST /workspace/{id}/eval`: evaluates `expr` under the supplied
/// configuration, or the last configuration found for the device.
async fn eval(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<Json_>, ApiError> {
    let ws = state.get(&id)?;
    let b: EvalBody = parse_body(&body)?;
    check_revision(&ws, b.revision)?;
    let tspec = ws.report.tspec();
    let last = ws.last.lock().unwrap_or_else(|e| e.into_inner()).clone();
    let device = match (&b.device, &last, tspec.spec.devices.len()) {
        (Some(d), _, _) => d.clone(),
        (None, Some((d, _)), _) => d.clone(),
        (None, None, 1) => tspec.spec.devices[0].name.to_string(),
        _ => return Err(ApiError::unprocessable("no device given")),
    };
    if tspec.device(&device).is_none() {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            format!("unknown device `{device}`"),
        ));
    }
    let config = match (&b.configuration, last) {
        (Some(c), _) => configuration_from_json(c).map_err(ApiError::unprocessable)?,
        (None, Some((d, m))) if d == device => m,
        _ => ModelValue::new(),
    };
    let e = parse_expr(&b.expr)
        .map_err(|e| ApiError::unprocessable(format!("invalid expression: {e}")))?;
    let t = analyze_device_expr(tspec, &device, &e).map_err(|ds| {
        ApiError::unprocessable(
            ds.iter()
                .map(|d| d.message.clone())
                .collect::<Vec<_>>()
                .join("; "),
        )
    })?;
    let value =
        eval_expr(tspec, &config, &t, &[]).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    Ok(Json(json!({ "value": value, "type": t.ty.to_string() })))
}

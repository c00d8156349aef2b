use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use csx_core::corpus;
use csx_service::{router, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, v)
}

async fn upload(app: &Router, name: &str, text: &str) -> Value {
    let (s, v) = call(
        app,
        Method::PUT,
        "/workspace",
        Some(json!({ "files": [{ "name": name, "text": text }] })),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    v
}

fn app() -> Router {
    router(ServiceConfig::default())
}

#[tokio::test]
async fn upload_reports_inhabitance_and_revisions() {
    let app = app();
    let v = upload(&app, "trim.csx", corpus::TRIM).await;
    assert_eq!(v["revision"], 1);
    assert_eq!(v["errors"], 0);
    let id = v["workspace"].as_str().unwrap().to_string();
    let verdicts: Vec<_> = v["inhabitance"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["kind"].as_str().unwrap(),
                e["name"].as_str().unwrap(),
                e["verdict"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        verdicts,
        [
            ("type", "Sheet", "inhabited"),
            ("action", "Trim", "inhabited"),
            ("device", "D", "inhabited")
        ]
    );

    let (s, v) = call(
        &app,
        Method::PUT,
        "/workspace",
        Some(json!({ "workspace": id, "files": [{ "name": "trim.csx", "text": corpus::TRIM }] })),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["revision"], 2);
    assert_eq!(v["workspace"], id.as_str());
}

#[tokio::test]
async fn plain_text_upload_and_uninhabited_diagnostic() {
    let app = app();
    let req = Request::builder()
        .method(Method::PUT)
        .uri("/workspace")
        .header(header::CONTENT_TYPE, "text/plain")
        .body(Body::from(corpus::UNINHABITED))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let v: Value =
        serde_json::from_slice(&resp.into_body().collect().await.unwrap().to_bytes()).unwrap();
    assert_eq!(v["errors"], 1);
    let d = &v["diagnostics"][0];
    assert_eq!(d["severity"], "error");
    assert_eq!(d["location"], "workspace.csx:1:1");
    assert!(d["message"].as_str().unwrap().contains("uninhabited"));
}

#[tokio::test]
async fn parse_failure_is_bad_request() {
    let app = app();
    let (s, v) = call(
        &app,
        Method::PUT,
        "/workspace",
        Some(json!({ "files": [{ "name": "bad.csx", "text": "type {" }] })),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
    let (s, _) = call(&app, Method::PUT, "/workspace", Some(json!({ "nope": 1 }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn devices_lists_schemas() {
    let app = app();
    let id = upload(&app, "trim.csx", corpus::TRIM).await["workspace"]
        .as_str()
        .unwrap()
        .to_string();
    let (s, v) = call(&app, Method::GET, &format!("/workspace/{id}/devices"), None).await;
    assert_eq!(s, StatusCode::OK);
    let d = &v["devices"][0];
    assert_eq!(d["name"], "D");
    assert_eq!(d["locations"][0]["name"], "a");
    assert_eq!(d["locations"][0]["type"], "Sheet");
    assert_eq!(d["components"][0]["action"], "Trim");
    assert_eq!(d["components"][0]["parameters"][0]["name"], "t");
    let leaves: Vec<_> = d["leaves"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["path"].as_str().unwrap())
        .collect();
    assert_eq!(leaves, ["a.w", "a.h", "b.w", "b.h", "c.t"]);

    let (s, _) = call(&app, Method::GET, "/workspace/missing/devices", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn solve_then_eval_last_configuration() {
    let app = app();
    let id = upload(&app, "trim.csx", corpus::TRIM).await["workspace"]
        .as_str()
        .unwrap()
        .to_string();
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/solve"),
        Some(json!({ "device": "D", "fixed": { "a.w": 10, "a.h": 20, "b.w": 8 }, "revision": 1 })),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["status"], "found");
    assert_eq!(v["configuration"]["c_t"], 2);
    assert_eq!(v["tree"]["b"]["h"], 20);
    assert_eq!(v["model"]["variables"], 5);

    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/eval"),
        Some(json!({ "expr": "a.w - c.t" })),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["value"], 8);
    assert_eq!(v["type"], "int");

    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/eval"),
        Some(json!({ "expr": "b.w == a.w", "configuration": { "a": { "w": 3, "h": 1 }, "b.w": 3, "b.h": 1, "c.t": 0 } })),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["value"], true);
}

#[tokio::test]
async fn solve_objective_and_empty_space() {
    let app = app();
    let id = upload(&app, "trim.csx", corpus::TRIM).await["workspace"]
        .as_str()
        .unwrap()
        .to_string();
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/solve"),
        Some(json!({
            "device": "D",
            "fixed": { "b.w": 8 },
            "constraints": ["c.t >= 3"],
            "objective": { "sense": "minimize", "expr": "a.w" },
            "bounds": { "int_min": 0, "int_max": 50 }
        })),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["objective"], 11);
    assert_eq!(v["optimal"], true);

    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/solve"),
        Some(json!({ "device": "D", "fixed": { "a.w": 5, "b.w": 9 } })),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "empty");
}

#[tokio::test]
async fn solve_error_statuses() {
    let app = app();
    let id = upload(&app, "trim.csx", corpus::TRIM).await["workspace"]
        .as_str()
        .unwrap()
        .to_string();
    let uri = format!("/workspace/{id}/solve");
    let cases = [
        (json!({ "device": "Nope" }), StatusCode::NOT_FOUND),
        (
            json!({ "device": "D", "fixed": { "a.zz": 1 } }),
            StatusCode::UNPROCESSABLE_ENTITY,
        ),
        (
            json!({ "device": "D", "constraints": ["a.w >"] }),
            StatusCode::UNPROCESSABLE_ENTITY,
        ),
        (
            json!({ "device": "D", "constraints": ["a.w"] }),
            StatusCode::UNPROCESSABLE_ENTITY,
        ),
        (
            json!({ "device": "D", "revision": 7 }),
            StatusCode::CONFLICT,
        ),
        (
            json!({ "device": "D", "extra": 1 }),
            StatusCode::BAD_REQUEST,
        ),
    ];
    for (body, want) in cases {
        let (s, v) = call(&app, Method::POST, &uri, Some(body.clone())).await;
        assert_eq!(s, want, "{body} -> {v}");
        assert!(v["error"].is_string());
    }
    let (s, _) = call(
        &app,
        Method::POST,
        "/workspace/zz/solve",
        Some(json!({ "device": "D" })),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn eval_missing_binding_is_unprocessable() {
    let app = app();
    let id = upload(&app, "trim.csx", corpus::TRIM).await["workspace"]
        .as_str()
        .unwrap()
        .to_string();
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/eval"),
        Some(json!({ "expr": "a.w + 1", "configuration": { "b.w": 1 } })),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    let (s, _) = call(
        &app,
        Method::POST,
        &format!("/workspace/{id}/eval"),
        Some(json!({ "expr": "zz" })),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn cors_preflight_is_allowed() {
    let app = app();
    let req = Request::builder()
        .method(Method::OPTIONS)
        .uri("/workspace")
        .header(header::ORIGIN, "http://localhost:5173")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "PUT")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert!(resp.status().is_success());
    assert!(resp
        .headers()
        .contains_key(header::ACCESS_CONTROL_ALLOW_ORIGIN));
}

#[tokio::test]
async fn corpus_scenario_job_over_http() {
    let app = app();
    let id = upload(&app, "perfect_binder.csx", corpus::PERFECT_BINDER).await["workspace"]
        .as_str()
        .unwrap()
        .to_string();
    let (s, v) = call(&app, Method::GET, &format!("/workspace/{id}/devices"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["devices"][0]["name"], "PerfectBinder");
}

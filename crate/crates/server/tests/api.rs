use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use mddconf::model::{brute_force_vd, parse_model, Assignment};
use mddconf_server::api::{router, ApiConfig, AppState};

const TSHIRT: &str = include_str!("../../core/models/tshirt.json");
const TSHIRT_CSV: &str = include_str!("../../core/models/tshirt.csv");

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => builder
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(v.to_string()))
            .unwrap(),
        None => builder.body(Body::empty()).unwrap(),
    };
    raw(app, req).await
}

async fn raw(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn upload(app: &Router, doc: &str, content_type: &str) -> (StatusCode, Value) {
    let req = Request::post("/models")
        .header(header::CONTENT_TYPE, content_type)
        .body(Body::from(doc.to_string()))
        .unwrap();
    raw(app, req).await
}

fn app() -> Router {
    router(AppState::new(ApiConfig::default()))
}

async fn tshirt_model(app: &Router) -> String {
    let (status, body) = upload(app, TSHIRT, "application/json").await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["id"].as_str().unwrap().to_string()
}

fn valid_labels(snapshot: &Value, var: &str) -> Vec<String> {
    let v = snapshot["variables"].as_array().unwrap().iter().find(|v| v["name"] == var).unwrap();
    v["labels"]
        .as_array()
        .unwrap()
        .iter()
        .zip(v["valid"].as_array().unwrap())
        .filter(|(_, ok)| ok.as_bool().unwrap())
        .map(|(l, _)| l.as_str().unwrap().to_string())
        .collect()
}

fn without_timing(mut snapshot: Value) -> Value {
    snapshot.as_object_mut().unwrap().remove("elapsed_ms");
    snapshot
}

#[tokio::test]
async fn healthz() {
    let (status, body) = call(&app(), Method::GET, "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["v"], 1);
}

#[tokio::test]
async fn model_upload_and_stats() {
    let app = app();
    let (status, body) = upload(&app, TSHIRT, "application/json").await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["stats"]["solutions"], "11");
    let id = body["id"].as_str().unwrap();
    let (status, stats) = call(&app, Method::GET, &format!("/models/{id}/stats"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(stats, body["stats"]);
    assert_eq!(stats["mdd_edges"], 13);

    let (status, _) = call(&app, Method::GET, "/models/nope/stats", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn catalogue_upload_matches_model() {
    let app = app();
    let (status, body) = upload(&app, TSHIRT_CSV, "text/csv").await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(body["stats"]["solutions"], "11");
}

#[tokio::test]
async fn upload_errors() {
    let app = app();
    let (status, body) = upload(&app, "{ not json", "application/json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("line 1"));

    let small = router(AppState::new(ApiConfig {
        max_body_bytes: 64,
        ..ApiConfig::default()
    }));
    let (status, _) = upload(&small, TSHIRT, "application/json").await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);

    let tiny = router(AppState::new(ApiConfig {
        compile: mddconf::artifact::CompileOptions { node_limit: 3 },
        ..ApiConfig::default()
    }));
    let (status, _) = upload(&tiny, TSHIRT, "application/json").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn plain_session_assign_unassign() {
    let app = app();
    let model = tshirt_model(&app).await;
    let (status, created) = call(&app, Method::POST, "/sessions", Some(json!({"model": model}))).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = created["id"].as_str().unwrap().to_string();
    let initial = without_timing(created["snapshot"].clone());

    let (status, snap) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/assign"),
        Some(json!({"var": "x2", "value": "small"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(valid_labels(&snap, "x1"), ["black"]);
    assert_eq!(valid_labels(&snap, "x3"), ["MIB"]);
    assert_eq!(snap["variables"][1]["assigned"], "small");

    let (status, _) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/assign"),
        Some(json!({"var": "x2", "value": "large"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, _) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/unassign"),
        Some(json!({"var": "x2"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let (_, got) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(without_timing(got), initial);

    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/bounds"), Some(json!({"bounds": [1]}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/frontier"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, Method::GET, "/sessions/unknown", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/assign"),
        Some(json!({"var": "x9", "value": "small"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn bicost_session_bounds_and_frontier() {
    let app = app();
    let model = tshirt_model(&app).await;
    let req = json!({"model": model, "mode": "bicost", "costs": ["price", "quality"], "bounds": [6, 5]});
    let (status, created) = call(&app, Method::POST, "/sessions", Some(req)).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["id"].as_str().unwrap();

    let (status, frontier) = call(&app, Method::GET, &format!("/sessions/{id}/frontier"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(frontier["frontier"], json!([[0, 5], [1, 4], [2, 3], [3, 2], [4, 1], [6, 0]]));

    let (status, resp) = call(&app, Method::POST, &format!("/sessions/{id}/bounds"), Some(json!({"bounds": [2, 3]}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(resp["relabeled"], false);
    assert_eq!(valid_labels(&resp["snapshot"], "x1"), ["black"]);
    assert_eq!(valid_labels(&resp["snapshot"], "x2"), ["medium", "large"]);
    assert_eq!(valid_labels(&resp["snapshot"], "x3"), ["MIB", "STW"]);

    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/bounds"), Some(json!({"bounds": [-1, 3]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/bounds"), Some(json!({"bounds": [2]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn session_creation_errors() {
    let app = app();
    let model = tshirt_model(&app).await;
    for body in [
        json!({"model": "missing"}),
        json!({"model": model, "mode": "single", "costs": ["nope"], "bounds": [1]}),
        json!({"model": model, "mode": "warp"}),
        json!({"model": model, "mode": "bicost_approx", "costs": ["price", "quality"], "bounds": [1, 1]}),
    ] {
        let (status, _) = call(&app, Method::POST, "/sessions", Some(body.clone())).await;
        assert!(status == StatusCode::NOT_FOUND || status == StatusCode::UNPROCESSABLE_ENTITY, "{body} {status}");
    }
}

#[tokio::test]
async fn idle_sessions_expire() {
    let state = AppState::new(ApiConfig {
        session_idle: std::time::Duration::ZERO,
        ..ApiConfig::default()
    });
    let app = router(state.clone());
    let model = tshirt_model(&app).await;
    let (_, created) = call(&app, Method::POST, "/sessions", Some(json!({"model": model}))).await;
    let id = created["id"].as_str().unwrap();
    std::thread::sleep(std::time::Duration::from_millis(5));
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(state.session_count(), 0);
}

/// Replaying the same requests on a fresh server gives the same snapshots.
#[tokio::test]
async fn replay_is_deterministic() {
    let script = [
        ("assign", json!({"var": "x1", "value": "white"})),
        ("bounds", json!({"bounds": [5]})),
        ("unassign", json!({"var": "x1"})),
        ("assign", json!({"var": "x3", "value": "STW"})),
        ("bounds", json!({"bounds": [null]})),
    ];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let app = app();
        let model = tshirt_model(&app).await;
        let req = json!({"model": model, "mode": "single", "costs": ["price"], "bounds": [3]});
        let (_, created) = call(&app, Method::POST, "/sessions", Some(req)).await;
        let id = created["id"].as_str().unwrap().to_string();
        let mut trace = vec![without_timing(created["snapshot"].clone())];
        for (op, body) in &script {
            let (status, resp) = call(&app, Method::POST, &format!("/sessions/{id}/{op}"), Some(body.clone())).await;
            assert_eq!(status, StatusCode::OK, "{op} {resp}");
            let snap = if *op == "bounds" { resp["snapshot"].clone() } else { resp };
            trace.push(without_timing(snap));
        }
        runs.push(trace);
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(valid_labels(&runs[0][1], "x2"), ["medium"]);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn parallel_sessions_do_not_interfere() {
    let app = app();
    let model_id = tshirt_model(&app).await;
    let model = parse_model(TSHIRT).unwrap();
    let price = model.cost("price").unwrap().clone();
    let mut tasks = Vec::new();
    for i in 0..32usize {
        let app = app.clone();
        let model_id = model_id.clone();
        tasks.push(tokio::spawn(async move {
            let bound = (i % 7) as f64;
            let req = json!({"model": model_id, "mode": "single", "costs": ["price"], "bounds": [bound]});
            let (status, created) = call(&app, Method::POST, "/sessions", Some(req)).await;
            assert_eq!(status, StatusCode::CREATED);
            let id = created["id"].as_str().unwrap().to_string();
            let (var, value) = [("x1", "black"), ("x2", "medium"), ("x3", "STW"), ("x2", "large")][i % 4];
            for _ in 0..5 {
                let uri = format!("/sessions/{id}/assign");
                let (status, _) = call(&app, Method::POST, &uri, Some(json!({"var": var, "value": value}))).await;
                assert_eq!(status, StatusCode::OK);
                let uri = format!("/sessions/{id}/unassign");
                let (status, _) = call(&app, Method::POST, &uri, Some(json!({"var": var}))).await;
                assert_eq!(status, StatusCode::OK);
            }
            let uri = format!("/sessions/{id}/assign");
            call(&app, Method::POST, &uri, Some(json!({"var": var, "value": value}))).await;
            let (_, snap) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
            (bound, var, value, snap)
        }));
    }
    for task in tasks {
        let (bound, var, value, snap) = task.await.unwrap();
        let v = model.var_index(var).unwrap();
        let a = model.variables()[v].value_of(value).unwrap();
        let expected = brute_force_vd(&model, &Assignment::from_pairs([(v, a)]), &[(&price, bound)]).unwrap();
        for (i, variable) in model.variables().iter().enumerate() {
            let want: Vec<String> = expected.var(i).iter().map(|&a| variable.labels[a].clone()).collect();
            assert_eq!(valid_labels(&snap, &variable.name), want, "bound {bound} {var}={value}");
        }
    }
}

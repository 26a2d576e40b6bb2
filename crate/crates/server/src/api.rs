//! HTTP service over compilation and configuration sessions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::session::{Session, SessionConfig, SessionError};

use crate::wire::{parse_mode, WireSnapshot, WireStats, WIRE_VERSION};
use crate::{compile_document, DocumentKind, LoadError};

#[derive(Debug, Clone)]
pub struct ApiConfig {
    pub max_body_bytes: usize,
    pub compile_timeout: Duration,
    pub session_idle: Duration,
    pub compile: CompileOptions,
}

impl Default for ApiConfig {
    fn default() -> Self {
        ApiConfig {
            max_body_bytes: 8 << 20,
            compile_timeout: Duration::from_secs(60),
            session_idle: Duration::from_secs(3600),
            compile: CompileOptions::default(),
        }
    }
}

struct SessionEntry {
    session: Session,
    last_used: Instant,
}

#[derive(Clone)]
pub struct AppState {
    config: ApiConfig,
    models: Arc<RwLock<HashMap<String, Arc<Artifact>>>>,
    sessions: Arc<RwLock<HashMap<String, Arc<Mutex<SessionEntry>>>>>,
}

impl AppState {
    pub fn new(config: ApiConfig) -> AppState {
        AppState {
            config,
            models: Arc::default(),
            sessions: Arc::default(),
        }
    }

    /// Drop sessions idle for longer than the configured timeout.
    pub fn sweep(&self) {
        let idle = self.config.session_idle;
        self.sessions
            .write()
            .unwrap()
            .retain(|_, entry| entry.lock().unwrap().last_used.elapsed() <= idle);
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionEntry>>, ApiError> {
        self.sweep();
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("session {id}")))
    }

    fn model(&self, id: &str) -> Result<Arc<Artifact>, ApiError> {
        self.models
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("model {id}")))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Unprocessable(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Unprocessable(_) => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(json!({"v": WIRE_VERSION, "error": self.to_string()}))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::AlreadyAssigned(_) | SessionError::NotAssigned(_) | SessionError::NoCosts => {
                ApiError::Conflict(e.to_string())
            }
            _ => ApiError::Unprocessable(e.to_string()),
        }
    }
}

pub fn router(state: AppState) -> Router {
    let limit = state.config.max_body_bytes;
    Router::new()
        .route("/healthz", get(|| async { Json(json!({"v": WIRE_VERSION, "status": "ok"})) }))
        .route("/models", post(create_model))
        .route("/models/{id}/stats", get(model_stats))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/assign", post(assign))
        .route("/sessions/{id}/unassign", post(unassign))
        .route("/sessions/{id}/bounds", post(set_bounds))
        .route("/sessions/{id}/frontier", get(frontier))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

#[derive(Serialize)]
struct ModelCreated {
    v: u32,
    id: String,
    stats: WireStats,
}

async fn create_model(State(state): State<AppState>, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    let kind = match headers.get(header::CONTENT_TYPE).and_then(|v| v.to_str().ok()) {
        Some(ct) if ct.starts_with("text/csv") => DocumentKind::Catalogue,
        _ => DocumentKind::Model,
    };
    let options = state.config.compile.clone();
    let job = tokio::task::spawn_blocking(move || compile_document(&body, kind, options));
    let artifact = match tokio::time::timeout(state.config.compile_timeout, job).await {
        Err(_) => return Err(ApiError::Unprocessable("compile timeout exceeded".into())),
        Ok(joined) => joined.map_err(|e| ApiError::Unprocessable(e.to_string()))?,
    };
    let artifact = artifact.map_err(|e| match e {
        LoadError::Parse(m) => ApiError::BadRequest(m),
        LoadError::Limit(m) => ApiError::Unprocessable(m),
    })?;
    let id = uuid::Uuid::new_v4().to_string();
    let stats = WireStats::from(artifact.stats());
    state.models.write().unwrap().insert(id.clone(), Arc::new(artifact));
    Ok((StatusCode::CREATED, Json(ModelCreated { v: WIRE_VERSION, id, stats })).into_response())
}

async fn model_stats(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<WireStats>, ApiError> {
    Ok(Json(WireStats::from(state.model(&id)?.stats())))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    model: String,
    #[serde(default = "plain")]
    mode: String,
    #[serde(default)]
    costs: Vec<String>,
    /// `null` entries are unbounded.
    #[serde(default)]
    bounds: Vec<Option<f64>>,
    epsilon: Option<f64>,
    #[serde(default)]
    tolerance: f64,
}

fn plain() -> String {
    "plain".into()
}

#[derive(Serialize)]
struct SessionCreated {
    v: u32,
    id: String,
    snapshot: WireSnapshot,
}

fn bounds_of(raw: &[Option<f64>]) -> Vec<f64> {
    raw.iter().map(|b| b.unwrap_or(f64::INFINITY)).collect()
}

async fn create_session(
    State(state): State<AppState>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let artifact = state.model(&req.model)?;
    let mode = parse_mode(&req.mode, req.epsilon)
        .ok_or_else(|| ApiError::Unprocessable(format!("unknown mode `{}` or missing epsilon", req.mode)))?;
    let config = SessionConfig {
        mode,
        costs: req.costs,
        bounds: bounds_of(&req.bounds),
        tolerance: req.tolerance,
    };
    let started = Instant::now();
    let session = tokio::task::spawn_blocking(move || Session::new(artifact, config))
        .await
        .map_err(|e| ApiError::Unprocessable(e.to_string()))??;
    let snapshot = WireSnapshot::new(session.artifact(), session.snapshot(), ms(started));
    let id = uuid::Uuid::new_v4().to_string();
    let entry = SessionEntry {
        session,
        last_used: Instant::now(),
    };
    state.sweep();
    state.sessions.write().unwrap().insert(id.clone(), Arc::new(Mutex::new(entry)));
    Ok((StatusCode::CREATED, Json(SessionCreated { v: WIRE_VERSION, id, snapshot })))
}

/// Run `op` on the session under its lock, off the async threads.
async fn with_session<T: Send + 'static>(
    state: &AppState,
    id: &str,
    op: impl FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    let entry = state.session(id)?;
    tokio::task::spawn_blocking(move || {
        let mut guard = entry.lock().unwrap_or_else(|p| p.into_inner());
        guard.last_used = Instant::now();
        op(&mut guard.session)
    })
    .await
    .map_err(|e| ApiError::Unprocessable(e.to_string()))?
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<WireSnapshot>, ApiError> {
    let snap = with_session(&state, &id, |s| Ok(WireSnapshot::new(s.artifact(), s.snapshot(), 0.0))).await?;
    Ok(Json(snap))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignRequest {
    var: String,
    value: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnassignRequest {
    var: String,
}

fn var_index(session: &Session, name: &str) -> Result<usize, ApiError> {
    session
        .artifact()
        .var_index(name)
        .ok_or_else(|| ApiError::Unprocessable(format!("unknown variable `{name}`")))
}

async fn assign(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<AssignRequest>,
) -> Result<Json<WireSnapshot>, ApiError> {
    let snap = with_session(&state, &id, move |s| {
        let var = var_index(s, &req.var)?;
        let value = s.artifact().variables()[var]
            .value_of(&req.value)
            .ok_or_else(|| ApiError::Unprocessable(format!("`{}` is not a value of `{}`", req.value, req.var)))?;
        let started = Instant::now();
        s.assign(var, value)?;
        Ok(WireSnapshot::new(s.artifact(), s.snapshot(), ms(started)))
    })
    .await?;
    Ok(Json(snap))
}

async fn unassign(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<UnassignRequest>,
) -> Result<Json<WireSnapshot>, ApiError> {
    let snap = with_session(&state, &id, move |s| {
        let var = var_index(s, &req.var)?;
        let started = Instant::now();
        s.unassign(var)?;
        Ok(WireSnapshot::new(s.artifact(), s.snapshot(), ms(started)))
    })
    .await?;
    Ok(Json(snap))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsRequest {
    bounds: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct BoundsResponse {
    v: u32,
    relabeled: bool,
    snapshot: WireSnapshot,
}

async fn set_bounds(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<BoundsRequest>,
) -> Result<Json<BoundsResponse>, ApiError> {
    let resp = with_session(&state, &id, move |s| {
        let started = Instant::now();
        let relabeled = s.set_bounds(&bounds_of(&req.bounds)).map_err(|e| match e {
            SessionError::NoCosts => ApiError::Conflict(e.to_string()),
            e => ApiError::Unprocessable(e.to_string()),
        })?;
        Ok(BoundsResponse {
            v: WIRE_VERSION,
            relabeled,
            snapshot: WireSnapshot::new(s.artifact(), s.snapshot(), ms(started)),
        })
    })
    .await?;
    Ok(Json(resp))
}

async fn frontier(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let tuples = with_session(&state, &id, |s| {
        s.snapshot()
            .frontier
            .clone()
            .ok_or_else(|| ApiError::Conflict(format!("mode {} has no exact frontier", s.mode().name())))
    })
    .await?;
    Ok(Json(json!({"v": WIRE_VERSION, "frontier": tuples})))
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Serve on `addr` until the process is stopped.
pub async fn serve(addr: &str, config: ApiConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.sweep();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

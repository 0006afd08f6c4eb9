use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use shelfplan_core::scene::SceneDocument;
use shelfplan_core::{
    default_palette, generate_scene, validate_scene, Error, PointCloud, Ranking, TaskPolicy,
};
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;
use tower_http::trace::TraceLayer;

use crate::error::{schema, ServiceError};
use crate::session::Actor;
use crate::store::SessionStore;

type AppState = State<Arc<SessionStore>>;
type ApiResult<T> = Result<T, ServiceError>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let mut body = json!({ "error": self.code(), "detail": self.to_string() });
        if let ServiceError::Core(Error::Validation(v)) = &self {
            body["violations"] = json!(v);
        }
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(body)).into_response()
    }
}

/// JSON bodies are decoded by hand so malformed input comes back in the
/// same error envelope as every other failure.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(schema)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanRequest {
    target: String,
    #[serde(default)]
    policy: TaskPolicy,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    actor: Actor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RemoveRequest {
    #[serde(rename = "box")]
    box_id: String,
    #[serde(default = "default_remover")]
    actor: Actor,
}

fn default_remover() -> Actor {
    Actor::Human
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportRequest {
    target: String,
    k: usize,
    #[serde(default)]
    ranking: Ranking,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateRequest {
    seed: u64,
    boxes: usize,
}

#[derive(Serialize)]
struct SessionList {
    sessions: Vec<String>,
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({ "status": "ok" })) }))
        .route("/scenes/generate", post(generate))
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_state))
        .route("/sessions/{id}/events", get(get_events))
        .route("/sessions/{id}/brg.dot", get(get_dot))
        .route("/sessions/{id}/plan", post(request_plan))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/remove", post(remove_box))
        .route("/sessions/{id}/support", post(request_support))
        .route("/sessions/{id}/pointing", post(resolve_pointing))
        .fallback(not_found)
        .layer(CorsLayer::permissive())
        .layer(TraceLayer::new_for_http())
        .with_state(store)
}

/// Serves the API on an already bound listener until the process exits.
pub async fn serve(listener: TcpListener, store: Arc<SessionStore>) -> std::io::Result<()> {
    axum::serve(listener, router(store)).await
}

async fn not_found() -> Response {
    (
        StatusCode::NOT_FOUND,
        Json(json!({ "error": "NotFound", "detail": "no such route" })),
    )
        .into_response()
}

async fn generate(bytes: Bytes) -> ApiResult<Json<SceneDocument>> {
    let req: GenerateRequest = body(&bytes)?;
    let scene = generate_scene(req.seed, req.boxes, &default_palette())?;
    Ok(Json(SceneDocument::from_scene(&scene)))
}

async fn create_session(
    State(store): AppState,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let doc: SceneDocument = body(&bytes)?;
    let scene = doc.into_scene();
    let report = validate_scene(&scene);
    if !report.is_valid() {
        return Err(Error::Validation(report.violations).into());
    }
    let id = store.create(scene)?;
    let summary = store.read(&id, |s| json!(s.summary()))?;
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn list_sessions(State(store): AppState) -> Json<SessionList> {
    Json(SessionList {
        sessions: store.ids(),
    })
}

async fn get_state(State(store): AppState, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(store.read(&id, |s| json!(s.state()))?))
}

async fn get_events(State(store): AppState, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(store.read(&id, |s| json!({ "events": s.events() }))?))
}

async fn get_dot(State(store): AppState, Path(id): Path<String>) -> ApiResult<Response> {
    let dot = store.read(&id, |s| s.dot())?;
    Ok((
        [(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")],
        dot,
    )
        .into_response())
}

async fn request_plan(
    State(store): AppState,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<Value>> {
    let req: PlanRequest = body(&bytes)?;
    let plan = store.update(&id, |s, now| {
        s.request_plan(&req.target, req.policy, now)
            .map(|p| json!(p))
    })?;
    Ok(Json(plan))
}

async fn step(
    State(store): AppState,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<Value>> {
    let req: StepRequest = body(&bytes)?;
    let outcome = store.update(&id, |s, now| s.step(req.actor, now))?;
    Ok(Json(json!(outcome)))
}

async fn remove_box(
    State(store): AppState,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<Value>> {
    let req: RemoveRequest = body(&bytes)?;
    let outcome = store.update(&id, |s, now| s.remove_box(&req.box_id, req.actor, now))?;
    Ok(Json(json!(outcome)))
}

async fn request_support(
    State(store): AppState,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<Value>> {
    let req: SupportRequest = body(&bytes)?;
    let result = store.update(&id, |s, now| {
        s.request_support(&req.target, req.k, req.ranking, now)
    })?;
    Ok(Json(json!(result)))
}

async fn resolve_pointing(
    State(store): AppState,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<Value>> {
    let cloud: PointCloud = body(&bytes)?;
    let config = *store.pointing_config();
    let result = store.update(&id, |s, now| s.resolve_pointing(&cloud, &config, now))?;
    Ok(Json(json!(result)))
}

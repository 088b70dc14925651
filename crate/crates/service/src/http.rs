//! JSON-over-HTTP API.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use parking_lot::Mutex;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::engine::Engine;
use crate::error::ServiceError;

pub type SharedEngine = Arc<Mutex<Engine>>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession(_) | ServiceError::UnknownSnapshot(_) => {
                StatusCode::NOT_FOUND
            }
            ServiceError::NoPendingChoice
            | ServiceError::NoActiveQuery
            | ServiceError::NoSnapshot => StatusCode::CONFLICT,
            ServiceError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let body = json!({
            "status": "error",
            "error": self.kind(),
            "message": self.to_string(),
        });
        (status, Json(body)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ServiceError>;

fn ok<T: serde::Serialize>(value: T) -> ApiResult {
    Ok(Json(serde_json::to_value(value)?))
}

#[derive(Deserialize)]
struct IngestRequest {
    path: Option<String>,
    text: Option<String>,
}

#[derive(Deserialize)]
struct SessionRequest {
    reader_id: String,
    snapshot_id: Option<String>,
}

#[derive(Deserialize)]
struct QueryRequest {
    text: String,
}

#[derive(Deserialize)]
struct RefineRequest {
    facet: String,
}

#[derive(Deserialize)]
struct CollapseRequest {
    option: String,
}

#[derive(Deserialize)]
struct EvalRequest {
    judgments: String,
}

async fn ingest(State(engine): State<SharedEngine>, Json(req): Json<IngestRequest>) -> ApiResult {
    if req.text.is_none() && req.path.is_none() {
        return Err(ServiceError::EmptyCorpus);
    }
    // build outside the lock; readers keep using the previous snapshot meanwhile
    let ontology = engine.lock().ontology().clone();
    let snapshot = tokio::task::spawn_blocking(move || {
        let text = match (req.text, req.path) {
            (Some(text), _) => text,
            (None, path) => std::fs::read_to_string(path.unwrap_or_default())?,
        };
        crate::snapshot::Snapshot::from_text(&text, ontology)
    })
    .await
    .map_err(|e| ServiceError::Io(std::io::Error::other(e)))??;
    let info = engine.lock().publish(snapshot);
    ok(info)
}

async fn create_session(
    State(engine): State<SharedEngine>,
    Json(req): Json<SessionRequest>,
) -> ApiResult {
    ok(engine
        .lock()
        .create_session(&req.reader_id, req.snapshot_id.as_deref())?)
}

async fn query(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
    Json(req): Json<QueryRequest>,
) -> ApiResult {
    ok(engine.lock().query(&id, &req.text)?)
}

async fn refine(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
    Json(req): Json<RefineRequest>,
) -> ApiResult {
    ok(engine.lock().refine(&id, &req.facet)?)
}

async fn collapse(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
    Json(req): Json<CollapseRequest>,
) -> ApiResult {
    ok(engine.lock().collapse(&id, &req.option)?)
}

async fn session(State(engine): State<SharedEngine>, Path(id): Path<String>) -> ApiResult {
    ok(engine.lock().session_view(&id)?)
}

async fn stats(State(engine): State<SharedEngine>) -> ApiResult {
    let engine = engine.lock();
    let snapshot_id = engine.current_snapshot().ok().map(|s| s.id.clone());
    let stats = engine.stats()?;
    let mut value = serde_json::to_value(stats)?;
    value["snapshot_id"] = json!(snapshot_id);
    Ok(Json(value))
}

async fn eval(State(engine): State<SharedEngine>, Json(req): Json<EvalRequest>) -> ApiResult {
    ok(engine.lock().evaluate(&req.judgments)?)
}

pub fn router(engine: SharedEngine) -> Router {
    Router::new()
        .route("/ingest", post(ingest))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session))
        .route("/sessions/{id}/query", post(query))
        .route("/sessions/{id}/refine", post(refine))
        .route("/sessions/{id}/collapse", post(collapse))
        .route("/stats", get(stats))
        .route("/eval", post(eval))
        .with_state(engine)
}

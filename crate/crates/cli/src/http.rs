use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use exekg_core::service::{catalog, handle_run, recommend, validate_turtle, RecommendRequest, RunRequest, ValidateRequest};
use exekg_core::{Executor, SchemaSet};
use serde::de::DeserializeOwned;
use serde_json::json;

pub struct AppState {
    pub schema: &'static SchemaSet,
    pub executor: Executor<'static>,
    pub artifact_dir: PathBuf,
}

impl AppState {
    pub fn new(schema: &'static SchemaSet, artifact_dir: PathBuf) -> Result<Self, String> {
        let executor = Executor::new(schema).map_err(|e| e.to_string())?;
        Ok(AppState {
            schema,
            executor,
            artifact_dir,
        })
    }
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn bad_request(message: impl std::fmt::Display) -> Response {
    json_body(StatusCode::BAD_REQUEST, json!({ "error": message.to_string() }).to_string())
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, serde_json::Error> {
    serde_json::from_slice(body)
}

async fn get_catalog(State(state): State<Arc<AppState>>) -> Response {
    let body = serde_json::to_string_pretty(&catalog(state.schema)).expect("catalog serializes");
    json_body(StatusCode::OK, body)
}

/// Always 200 for a readable graph; conformance is in the body.
async fn post_validate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: ValidateRequest = match parse(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(e),
    };
    match validate_turtle(state.schema, &state.executor, &req.turtle) {
        Ok(report) => json_body(StatusCode::OK, report.to_json()),
        Err(e) => bad_request(e),
    }
}

async fn post_run(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: RunRequest = match parse(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(e),
    };
    let worker = tokio::task::spawn_blocking(move || handle_run(&state.executor, &req, &state.artifact_dir));
    match worker.await {
        Ok((outcome, response)) => {
            let status = StatusCode::from_u16(outcome.http_status()).expect("valid status");
            json_body(status, serde_json::to_string_pretty(&response).expect("response serializes"))
        }
        Err(e) => json_body(
            StatusCode::INTERNAL_SERVER_ERROR,
            json!({ "error": e.to_string() }).to_string(),
        ),
    }
}

async fn post_recommend(body: Bytes) -> Response {
    match parse::<RecommendRequest>(&body) {
        Ok(req) => json_body(StatusCode::OK, serde_json::to_string_pretty(&recommend(&req)).expect("serializes")),
        Err(e) => bad_request(e),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/catalog", get(get_catalog))
        .route("/validate", post(post_validate))
        .route("/run", post(post_run))
        .route("/recommend", post(post_recommend))
        .with_state(state)
}

pub async fn serve(addr: &str, schema: &'static SchemaSet, artifact_dir: PathBuf) -> Result<(), String> {
    let state = Arc::new(AppState::new(schema, artifact_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("{addr}: {e}"))?;
    eprintln!("listening on http://{}", listener.local_addr().map_err(|e| e.to_string())?);
    axum::serve(listener, router(state)).await.map_err(|e| e.to_string())
}

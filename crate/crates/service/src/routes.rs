// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use explorebias_core::inference::{bias_report, model_posterior, predict_next, session_summary};
use explorebias_core::{
    DatasetDocument, EventKind, GroupBias, InteractionEvent, ModelProbability, PointId, PredictionSet, SessionSummary,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::state::{AppState, ServiceConfig, SessionHandle};

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(&e))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetCreated {
    pub dataset_id: String,
    pub d: usize,
    pub point_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetView {
    pub dataset_id: String,
    pub d: usize,
    pub point_count: usize,
    pub document: DatasetDocument,
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub dataset_id: String,
    #[serde(default)]
    pub config: ServiceConfig,
}

#[derive(Debug, Deserialize)]
pub struct PostEvent {
    pub point_id: PointId,
    #[serde(default)]
    pub kind: EventKind,
    #[serde(default)]
    pub dwell_ms: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EventAck {
    pub event_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PosteriorDoc {
    pub event_count: usize,
    pub models: Vec<ModelProbability>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BiasDoc {
    pub event_count: usize,
    pub groups: Vec<GroupBias>,
    pub map_model: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct PredictionQuery {
    pub k: Option<String>,
    pub exclude_visited: Option<String>,
}

async fn create_dataset(State(state): Shared, body: Bytes) -> ApiResult<(StatusCode, Json<DatasetCreated>)> {
    let doc: DatasetDocument = parse(&body)?;
    let (dataset_id, bundle) = state.add_dataset(doc)?;
    log::info!("dataset {dataset_id}: {} points, {} groups", bundle.len(), bundle.group_count());
    Ok((StatusCode::CREATED, Json(DatasetCreated { dataset_id, d: bundle.group_count(), point_count: bundle.len() })))
}

async fn get_dataset(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<DatasetView>> {
    let bundle = state.dataset(&id)?;
    Ok(Json(DatasetView {
        dataset_id: id,
        d: bundle.group_count(),
        point_count: bundle.len(),
        document: bundle.to_document(),
    }))
}

async fn create_session(State(state): Shared, body: Bytes) -> ApiResult<(StatusCode, Json<SessionHandle>)> {
    let req: CreateSession = parse(&body)?;
    let handle = state.add_session(&req.dataset_id, req.config)?;
    Ok((StatusCode::CREATED, Json(handle)))
}

async fn get_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<SessionHandle>> {
    let entry = state.session(&id)?;
    let n = entry.session.read().expect("lock").event_count();
    Ok(Json(entry.handle(n)))
}

async fn post_event(State(state): Shared, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<EventAck>> {
    let entry = state.session(&id)?;
    let req: PostEvent = parse(&body)?;
    let event_count = state.post_event(&entry, |timestep| InteractionEvent {
        point_id: req.point_id,
        timestep,
        kind: req.kind,
        dwell_ms: req.dwell_ms,
    })?;
    Ok(Json(EventAck { event_count }))
}

async fn posterior(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<PosteriorDoc>> {
    let entry = state.session(&id)?;
    let s = entry.session.read().expect("lock");
    Ok(Json(PosteriorDoc { event_count: s.event_count(), models: model_posterior(&s) }))
}

async fn bias(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<BiasDoc>> {
    let entry = state.session(&id)?;
    let report = bias_report(&entry.session.read().expect("lock"));
    Ok(Json(BiasDoc { event_count: report.event_count, groups: report.groups, map_model: report.map_model }))
}

fn parse_flag(raw: &str) -> ApiResult<bool> {
    match raw {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ApiError::bad_query(format!("exclude_visited must be true or false, got `{raw}`"))),
    }
}

async fn predictions(
    State(state): Shared,
    Path(id): Path<String>,
    Query(q): Query<PredictionQuery>,
) -> ApiResult<Json<PredictionSet>> {
    let entry = state.session(&id)?;
    let k = match q.k.as_deref() {
        None | Some("") => entry.config.k,
        Some(raw) => match raw.parse::<usize>() {
            Ok(k) if k > 0 => k,
            _ => return Err(ApiError::bad_query(format!("k must be a positive integer, got `{raw}`"))),
        },
    };
    let exclude = match q.exclude_visited.as_deref() {
        None | Some("") => entry.config.exclude_visited,
        Some(raw) => parse_flag(raw)?,
    };
    let s = entry.session.read().expect("lock");
    Ok(Json(predict_next(&s, k, exclude)?))
}

async fn summary(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<SessionSummary>> {
    let entry = state.session(&id)?;
    let s = entry.session.read().expect("lock");
    Ok(Json(session_summary(&s)?))
}

async fn health() -> &'static str {
    "ok"
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route", serde_json::Value::Null)
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/datasets", post(create_dataset))
        .route("/datasets/{id}", get(get_dataset))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/posterior", get(posterior))
        .route("/sessions/{id}/bias", get(bias))
        .route("/sessions/{id}/predictions", get(predictions))
        .route("/sessions/{id}/summary", get(summary))
        .fallback(not_found)
        .with_state(state)
}

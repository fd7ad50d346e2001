// SPDX-License-Identifier: Apache-2.0

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use explorebias_core::{DatasetError, ModelError};
use serde::Serialize;
use serde_json::{json, Value};

/// Wire form of every error: `{code, message, detail}`.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>, detail: Value) -> Self {
        Self { status, body: ErrorBody { code, message: message.into(), detail } }
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"), json!({ "session_id": id }))
    }

    pub fn unknown_dataset(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_dataset", format!("no dataset `{id}`"), json!({ "dataset_id": id }))
    }

    pub fn malformed(err: &serde_json::Error) -> Self {
        Self::new(
            StatusCode::BAD_REQUEST,
            "malformed_body",
            err.to_string(),
            json!({ "line": err.line(), "column": err.column() }),
        )
    }

    pub fn bad_query(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_query", message, Value::Null)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message, Value::Null)
    }
}

impl From<DatasetError> for ApiError {
    fn from(e: DatasetError) -> Self {
        let detail = match &e {
            DatasetError::DuplicateId { row, id } => json!({ "row": row, "id": id }),
            DatasetError::MissingColumn { row, column } => json!({ "row": row, "column": column }),
            DatasetError::NonNumeric { row, column, value } | DatasetError::UnknownCategory { row, column, value } => {
                json!({ "row": row, "column": column, "value": value })
            }
            DatasetError::InvalidGroup { group, reason } => json!({ "group": group, "reason": reason }),
            DatasetError::DuplicateGroup(g) => json!({ "group": g }),
            DatasetError::DuplicateColumn(c) => json!({ "column": c }),
            DatasetError::Empty | DatasetError::EmptySchema => Value::Null,
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_dataset", e.to_string(), detail)
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        let (code, detail) = match &e {
            ModelError::UnknownPoint(id) => ("unknown_point", json!({ "point_id": id })),
            ModelError::UnknownGroup(g) => ("unknown_group", json!({ "group": g })),
            ModelError::TooManyGroups(d) => {
                ("invalid_config", json!({ "groups": d, "max": explorebias_core::MAX_GROUPS }))
            }
            ModelError::NoGroups | ModelError::InvalidConfig(_) => ("invalid_config", Value::Null),
            ModelError::OutOfOrder { expected, got } => ("out_of_order", json!({ "expected": expected, "got": got })),
            ModelError::Math(_) => {
                return Self::new(StatusCode::INTERNAL_SERVER_ERROR, "numerical", e.to_string(), Value::Null)
            }
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string(), detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

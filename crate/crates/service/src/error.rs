use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use com2match_core::correspondence::CorrespondenceError;
use serde::Serialize;

/// Error payload returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: &str, detail: String) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code,
                message: message.to_string(),
                detail,
            },
        }
    }

    pub fn not_found(detail: String) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "notFound",
            "resource not found",
            detail,
        )
    }

    pub fn conflict(detail: String) -> Self {
        ApiError::new(
            StatusCode::CONFLICT,
            "conflict",
            "link already decided",
            detail,
        )
    }

    pub fn invalid_input(detail: String) -> Self {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalidInput",
            "input failed validation",
            detail,
        )
    }

    pub fn bad_request(detail: String) -> Self {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "badRequest",
            "malformed request",
            detail,
        )
    }

    pub fn internal(detail: String) -> Self {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            "internal error",
            detail,
        )
    }
}

impl From<CorrespondenceError> for ApiError {
    fn from(e: CorrespondenceError) -> Self {
        match e {
            CorrespondenceError::UnknownLink(_) => ApiError::not_found(e.to_string()),
            CorrespondenceError::AlreadyDecided { .. } => ApiError::conflict(e.to_string()),
            CorrespondenceError::PendingDecision => ApiError::bad_request(e.to_string()),
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

use atlas_core::registry::{ChangeError, Issue, MutateError};
use atlas_core::taxonomy::ParseError;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};

use crate::filter::FilterError;

/// An error response: status plus a JSON body with at least `error` and
/// `message`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": kind, "message": message.into() }),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn unauthorized() -> Self {
        Self::new(
            StatusCode::UNAUTHORIZED,
            "unauthorized",
            "missing or wrong X-Moderator-Token",
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn filter(e: &FilterError) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_filter", e.to_string())
            .with("param", json!(e.param()))
    }

    /// Descriptor `param` failed to parse.
    pub fn parse(param: &str, e: &ParseError) -> Self {
        let mut err = Self::new(StatusCode::BAD_REQUEST, "parse", e.to_string())
            .with("param", json!(param))
            .with("position", json!(e.position()));
        if let ParseError::Syntax(s) = e {
            err = err
                .with("expected", json!(s.expected))
                .with("found", json!(s.found));
        }
        err
    }

    pub fn unprocessable(issues: Vec<Issue>) -> Self {
        let message = issues
            .iter()
            .filter(|i| i.is_error())
            .map(|i| format!("{}: {}", i.field, i.message))
            .collect::<Vec<_>>()
            .join("; ");
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message)
            .with("issues", json!(issues))
    }

    fn field(field: &str, message: String) -> Self {
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "validation",
            message.clone(),
        )
        .with(
            "issues",
            json!([{ "severity": "error", "field": field, "message": message }]),
        )
    }

    /// A body that is JSON but does not have the change-request shape.
    pub fn schema(path: String, message: String) -> Self {
        Self::field(&path, message)
    }

    /// Submission refused by the workflow.
    pub fn on_submit(e: ChangeError) -> Self {
        let message = e.to_string();
        match e {
            ChangeError::Invalid(issues) => Self::unprocessable(issues),
            ChangeError::MissingTarget(_)
            | ChangeError::UnexpectedTarget
            | ChangeError::UnknownTarget(_) => Self::field("target_id", message),
            ChangeError::MissingPayload(_) | ChangeError::UnexpectedPayload => {
                Self::field("payload", message)
            }
            ChangeError::TargetMismatch { .. } => Self::field("payload.id", message),
            other => Self::on_review(other),
        }
    }

    /// Approval or rejection refused by the workflow.
    pub fn on_review(e: ChangeError) -> Self {
        let message = e.to_string();
        match e {
            ChangeError::UnknownChangeRequest(_) => Self::not_found(message),
            ChangeError::NotPending { .. } => {
                Self::new(StatusCode::CONFLICT, "not_pending", message)
            }
            ChangeError::CollisionOnApprove(_) => {
                Self::new(StatusCode::CONFLICT, "collision", message)
            }
            ChangeError::UnknownTarget(_) => {
                Self::new(StatusCode::CONFLICT, "unknown_target", message)
            }
            other => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "validation",
                other.to_string(),
            ),
        }
    }

    pub fn from_mutate(e: MutateError<ChangeError>, on_rejected: fn(ChangeError) -> Self) -> Self {
        match e {
            MutateError::Rejected(e) => on_rejected(e),
            MutateError::Persist(e) => Self::internal(format!("failed to persist registry: {e}")),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

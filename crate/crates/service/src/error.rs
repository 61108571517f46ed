use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

use taugraph::dataset::DatasetError;
use taugraph::geometry::GeometryError;
use taugraph::kendall::KendallError;
use taugraph::render::RenderError;

/// JSON error body: `{"status": 404, "code": "dataset_not_found", "message": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "dataset_not_found", format!("no dataset with id {id:?}"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", message)
    }

    pub fn status_code(&self) -> StatusCode {
        StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status_code(), Json(self)).into_response()
    }
}

impl From<DatasetError> for ApiError {
    fn from(e: DatasetError) -> Self {
        let code = match &e {
            DatasetError::TooFewRows { .. } => {
                return Self::new(StatusCode::UNPROCESSABLE_ENTITY, "too_few_rows", e.to_string())
            }
            DatasetError::NonFinite { .. } => {
                return Self::new(StatusCode::UNPROCESSABLE_ENTITY, "non_finite_value", e.to_string())
            }
            DatasetError::MalformedHeader(_) | DatasetError::MalformedCsv(_) => "malformed_csv",
            DatasetError::ColumnNotFound(_) => "column_not_found",
            DatasetError::SameColumn(_) => "same_column",
            DatasetError::YearNotFound(_) => "year_not_found",
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<KendallError> for ApiError {
    fn from(e: KendallError) -> Self {
        match e {
            KendallError::Dataset(d) => d.into(),
            KendallError::UndefinedTau { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "undefined_tau", e.to_string())
            }
            KendallError::BadTarget(_) => Self::bad_request("invalid_parameter", e.to_string()),
        }
    }
}

impl From<GeometryError> for ApiError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Kendall(k) => k.into(),
            GeometryError::UndefinedTau => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "undefined_tau", e.to_string())
            }
            GeometryError::ModeMismatch { .. } => Self::bad_request("mode_mismatch", e.to_string()),
            GeometryError::BadEpsilon(_) => Self::bad_request("invalid_parameter", e.to_string()),
        }
    }
}

impl From<RenderError> for ApiError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Geometry(g) => g.into(),
            RenderError::EmptyStyle | RenderError::UnknownStyle(_) => {
                Self::bad_request("invalid_style", e.to_string())
            }
            RenderError::MissingLayer(_) | RenderError::InvalidConfig(_) | RenderError::EmptyPoints => {
                Self::internal(e.to_string())
            }
        }
    }
}

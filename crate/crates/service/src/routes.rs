use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use taugraph::dataset::{parse_csv, ColumnSpec, Observation};
use taugraph::geometry::{
    transform_one, AnchorPolicy, ClockMode, GeometryDocument, Quadrant, TransformConfig,
    TransformMode, Vec2,
};
use taugraph::kendall::{PairClass, PairCounts};
use taugraph::render::{plot, render_pair_bars, PlotStyle};

use crate::{ApiError, AppState, DatasetRecord};

pub(crate) fn routes() -> Router<AppState> {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/datasets", post(upload))
        .route("/api/datasets/{id}", get(summary))
        .route("/api/datasets/{id}/geometry", get(geometry))
        .route("/api/datasets/{id}/plot.svg", get(plot_svg))
        .route("/api/datasets/{id}/pairs/{i}/{j}", get(pair_detail))
        .route("/api/datasets/{id}/pairs/{i}/{j}/bars.svg", get(pair_bars))
}

/// Response of an upload and of `GET /api/datasets/{id}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub id: String,
    pub m: usize,
    pub x_name: String,
    pub y_name: String,
    pub created_at: u64,
    pub tau: Option<f64>,
    pub counts: PairCounts,
    /// Rows skipped at upload for missing or non-numeric values.
    #[serde(default)]
    pub dropped_rows: usize,
}

impl DatasetSummary {
    fn of(record: &DatasetRecord, dropped_rows: usize) -> Self {
        Self {
            id: record.id.clone(),
            m: record.dataset.len(),
            x_name: record.dataset.x_name.clone(),
            y_name: record.dataset.y_name.clone(),
            created_at: record.created_at,
            tau: record.tau.tau,
            counts: record.tau.counts,
            dropped_rows,
        }
    }
}

/// Everything behind one pair's drill-down chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDetail {
    pub i: usize,
    pub j: usize,
    pub x_name: String,
    pub y_name: String,
    pub a: Observation,
    pub b: Observation,
    pub class: PairClass,
    pub anchor: usize,
    pub dx: f64,
    pub dy: f64,
    pub mode: TransformMode,
    pub endpoint: Vec2,
    pub dissimilarity: f64,
    pub quadrant: Quadrant,
}

#[derive(Debug, Deserialize)]
struct UploadQuery {
    #[serde(alias = "x_column")]
    x: Option<String>,
    #[serde(alias = "y_column")]
    y: Option<String>,
    #[serde(alias = "label_column")]
    label: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
struct TransformQuery {
    mode: Option<String>,
    anchor: Option<String>,
    epsilon: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
struct PlotQuery {
    style: Option<String>,
    clock_mode: Option<String>,
    #[serde(flatten)]
    transform: TransformQuery,
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(t)| t)
        .map_err(|e| ApiError::bad_request("invalid_query", e.body_text()))
}

fn token<T: std::str::FromStr<Err = String>>(value: Option<&str>, default: T) -> Result<T, ApiError> {
    match value {
        None | Some("") => Ok(default),
        Some(v) => v.parse().map_err(|e: String| ApiError::bad_request("invalid_parameter", e)),
    }
}

impl TransformQuery {
    fn config(&self) -> Result<TransformConfig, ApiError> {
        let tie_epsilon = match self.epsilon.as_deref() {
            None | Some("") => 0.0,
            Some(e) => e
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| {
                    ApiError::bad_request("invalid_parameter", format!("epsilon must be a non-negative number, got {e:?}"))
                })?,
        };
        Ok(TransformConfig {
            mode: token(self.mode.as_deref(), TransformMode::default())?,
            anchor_policy: token(self.anchor.as_deref(), AnchorPolicy::default())?,
            tie_epsilon,
        })
    }
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<DatasetRecord>, ApiError> {
    state.store.get(id).ok_or_else(|| ApiError::not_found(id))
}

fn svg(body: String) -> Response {
    ([(header::CONTENT_TYPE, "image/svg+xml")], body).into_response()
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn upload(
    State(state): State<AppState>,
    q: Result<Query<UploadQuery>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Result<(StatusCode, Json<DatasetSummary>), ApiError> {
    let q = query(q)?;
    let body = body.map_err(|e| {
        if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "payload_too_large", e.body_text())
        } else {
            ApiError::bad_request("invalid_body", e.body_text())
        }
    })?;
    let (Some(x), Some(y)) = (q.x.as_deref(), q.y.as_deref()) else {
        return Err(ApiError::bad_request(
            "missing_parameter",
            "query parameters x and y select the two ranked columns",
        ));
    };
    let mut spec = ColumnSpec::new(x, y);
    if let Some(label) = q.label.as_deref() {
        spec = spec.with_label(label);
    }
    let import = parse_csv(&body, &spec)?;
    let dropped = import.dropped();
    let record = state.store.insert(import.dataset)?;
    state
        .store
        .persist(&record)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((StatusCode::CREATED, Json(DatasetSummary::of(&record, dropped))))
}

async fn summary(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<DatasetSummary>, ApiError> {
    let record = lookup(&state, &id)?;
    Ok(Json(DatasetSummary::of(&record, 0)))
}

async fn geometry(
    State(state): State<AppState>,
    Path(id): Path<String>,
    q: Result<Query<TransformQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let record = lookup(&state, &id)?;
    let config = query(q)?.config()?;
    let doc = GeometryDocument::build(&record.dataset, &config)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], doc.to_json()).into_response())
}

async fn plot_svg(
    State(state): State<AppState>,
    Path(id): Path<String>,
    q: Result<Query<PlotQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let record = lookup(&state, &id)?;
    let q = query(q)?;
    let style = PlotStyle::from_tokens(q.style.as_deref().unwrap_or("segments"))?
        .with_transform(q.transform.config()?)
        .with_clock_mode(token(q.clock_mode.as_deref(), ClockMode::default())?);
    Ok(svg(plot(&record.dataset, &style, &state.render)?))
}

fn pair_indices(
    path: Result<Path<(String, String, String)>, PathRejection>,
) -> Result<(String, usize, usize), ApiError> {
    let Path((id, i, j)) = path.map_err(|e| ApiError::bad_request("invalid_path", e.body_text()))?;
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| ApiError::bad_request("invalid_pair", format!("pair index {s:?} is not a non-negative integer")))
    };
    Ok((id, parse(&i)?, parse(&j)?))
}

fn detail(state: &AppState, id: &str, i: usize, j: usize, config: &TransformConfig) -> Result<PairDetail, ApiError> {
    let record = lookup(state, id)?;
    let d = &record.dataset;
    let seg = transform_one(d, i, j, config)?.ok_or_else(|| {
        ApiError::bad_request(
            "invalid_pair",
            format!("pair ({i}, {j}) needs 0 <= i < j < {}", d.len()),
        )
    })?;
    Ok(PairDetail {
        i,
        j,
        x_name: d.x_name.clone(),
        y_name: d.y_name.clone(),
        a: d.observations[i].clone(),
        b: d.observations[j].clone(),
        class: seg.pair.class,
        anchor: seg.pair.anchor,
        dx: seg.pair.dx,
        dy: seg.pair.dy,
        mode: seg.mode,
        endpoint: seg.endpoint,
        dissimilarity: seg.pair.dissimilarity,
        quadrant: Quadrant::of_point(seg.endpoint),
    })
}

async fn pair_detail(
    State(state): State<AppState>,
    path: Result<Path<(String, String, String)>, PathRejection>,
    q: Result<Query<TransformQuery>, QueryRejection>,
) -> Result<Json<PairDetail>, ApiError> {
    let (id, i, j) = pair_indices(path)?;
    let config = query(q)?.config()?;
    Ok(Json(detail(&state, &id, i, j, &config)?))
}

async fn pair_bars(
    State(state): State<AppState>,
    path: Result<Path<(String, String, String)>, PathRejection>,
) -> Result<Response, ApiError> {
    let (id, i, j) = pair_indices(path)?;
    let p = detail(&state, &id, i, j, &TransformConfig::default())?;
    Ok(svg(render_pair_bars(&p.a, &p.b, (&p.x_name, &p.y_name), &state.render)?))
}

//! HTTP API over taugraph: upload ranked data, read τ and geometry, fetch
//! server-rendered SVG and drill into single pairs.
//!
//! | method | path | response |
//! |---|---|---|
//! | POST | `/api/datasets?x=&y=&label=` (CSV body) | dataset summary |
//! | GET | `/api/datasets/{id}` | dataset summary |
//! | GET | `/api/datasets/{id}/geometry?mode=&anchor=&epsilon=` | geometry document |
//! | GET | `/api/datasets/{id}/plot.svg?style=&mode=&anchor=&clock_mode=&epsilon=` | SVG |
//! | GET | `/api/datasets/{id}/pairs/{i}/{j}` | pair detail |
//! | GET | `/api/datasets/{id}/pairs/{i}/{j}/bars.svg` | SVG bar chart |
//! | GET | `/api/health` | `{"status":"ok"}` |

mod error;
mod routes;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::DefaultBodyLimit;
use axum::http::{HeaderValue, Method};
use axum::Router;
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use error::ApiError;
pub use routes::{DatasetSummary, PairDetail};
pub use store::{new_id, DatasetRecord, DatasetStore};

use taugraph::render::RenderConfig;

pub const DEFAULT_BODY_LIMIT: usize = 10 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("store: {0}")]
    Store(String),
    #[error("invalid CORS origin {0:?}")]
    BadOrigin(String),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Upload size limit in bytes.
    pub body_limit: usize,
    /// Write-through directory; `None` keeps datasets in memory only.
    pub store_dir: Option<PathBuf>,
    /// Allowed CORS origins. Empty allows any origin.
    pub cors_origins: Vec<String>,
    pub render: RenderConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            body_limit: DEFAULT_BODY_LIMIT,
            store_dir: None,
            cors_origins: Vec::new(),
            render: RenderConfig::default(),
        }
    }
}

/// Shared handler state.
#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<DatasetStore>,
    pub render: Arc<RenderConfig>,
}

impl AppState {
    pub fn new(store: DatasetStore, render: RenderConfig) -> Self {
        Self {
            store: Arc::new(store),
            render: Arc::new(render),
        }
    }
}

/// Builds the store described by `config` and the router over it.
pub fn app(config: &ServiceConfig) -> Result<Router, ServiceError> {
    let store = match &config.store_dir {
        Some(dir) => DatasetStore::open(dir)?,
        None => DatasetStore::in_memory(),
    };
    router(AppState::new(store, config.render.clone()), config)
}

pub fn router(state: AppState, config: &ServiceConfig) -> Result<Router, ServiceError> {
    let origin = if config.cors_origins.is_empty() {
        AllowOrigin::from(Any)
    } else {
        let list = config
            .cors_origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| ServiceError::BadOrigin(o.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        AllowOrigin::list(list)
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers(Any);
    Ok(routes::routes()
        .layer(DefaultBodyLimit::max(config.body_limit))
        .layer(cors)
        .with_state(state))
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> Result<(), ServiceError> {
    let app = app(&config)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

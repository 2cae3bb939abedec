//! Read-only JSON API over a loaded corpus, its metrics and trained models.
//!
//! Everything is loaded once at startup and shared immutably between
//! requests. The endpoint contract is described in `openapi.yaml` at the
//! crate root.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query as UrlQuery, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use crate::error::{Error, Result};
use crate::evaluation::{export_som_grid, load_trained_sets, SomGrid, TrainedSet};
use crate::geometry::{Point2, PolygonM};
use crate::ingest::Corpus;
use crate::metrics::{Indicator, MetricRecord, MetricsFile, NormParam, SetName};
use crate::retrieval::{retrieve, Query, RankedResult};

pub const DEFAULT_PAGE: usize = 100;
pub const MAX_PAGE: usize = 10_000;

pub struct AppState {
    pub corpus: Corpus,
    pub metrics: MetricsFile,
    pub sets: BTreeMap<SetName, TrainedSet>,
    grids: BTreeMap<SetName, SomGrid>,
}

impl AppState {
    pub fn new(corpus: Corpus, metrics: MetricsFile, sets: BTreeMap<SetName, TrainedSet>) -> Result<Self> {
        let mut grids = BTreeMap::new();
        for (&name, ts) in &sets {
            let assignments = ts.model.assign(&ts.features(&metrics.records)?)?;
            grids.insert(name, export_som_grid(&ts.model, &assignments));
        }
        Ok(Self {
            corpus,
            metrics,
            sets,
            grids,
        })
    }

    pub fn load(corpus: &Path, metrics: &Path, models_dir: &Path) -> Result<Self> {
        let corpus = Corpus::read(corpus)?;
        let metrics = MetricsFile::read(metrics)?;
        let sets = load_trained_sets(models_dir, &metrics.records)?;
        Self::new(corpus, metrics, sets)
    }
}

#[derive(Serialize)]
struct ApiError {
    error: &'static str,
    message: String,
}

struct Failure(StatusCode, ApiError);

impl Failure {
    fn not_found(code: &'static str, message: String) -> Self {
        Failure(StatusCode::NOT_FOUND, ApiError { error: code, message })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownBlock(_) | Error::UnknownSet(_) => StatusCode::NOT_FOUND,
            Error::OutOfRange { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Parse { .. }
            | Error::Json(_)
            | Error::MissingIndicator(_)
            | Error::UnknownIndicator(_)
            | Error::InvalidConfig(_)
            | Error::DimensionMismatch { .. } => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Failure(
            status,
            ApiError {
                error: e.code(),
                message: e.to_string(),
            },
        )
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type Shared = State<Arc<AppState>>;
type ApiResult<T> = std::result::Result<Json<T>, Failure>;

#[derive(Serialize)]
struct SetInfo {
    name: SetName,
    indicators: Vec<Indicator>,
    norm_params: Vec<NormParam>,
}

async fn sets(State(st): Shared) -> Json<Vec<SetInfo>> {
    let out = st
        .sets
        .iter()
        .map(|(&name, ts)| SetInfo {
            name,
            indicators: name.indicators(),
            norm_params: ts.model.norm_params.clone(),
        })
        .collect();
    Json(out)
}

#[derive(Deserialize)]
struct Page {
    limit: Option<usize>,
    offset: Option<usize>,
}

#[derive(Serialize)]
struct BlockSummary<'a> {
    id: &'a str,
    ba: f64,
    nob: usize,
    centroid: Point2,
}

async fn blocks(State(st): Shared, UrlQuery(page): UrlQuery<Page>) -> Response {
    let limit = page.limit.unwrap_or(DEFAULT_PAGE).min(MAX_PAGE);
    let offset = page.offset.unwrap_or(0);
    let items: Vec<BlockSummary> = st
        .corpus
        .blocks
        .iter()
        .skip(offset)
        .take(limit)
        .map(|b| BlockSummary {
            id: &b.id,
            ba: b.boundary.area(),
            nob: b.buildings.len(),
            centroid: b.boundary.centroid(),
        })
        .collect();
    let total = HeaderValue::from(st.corpus.blocks.len());
    ([("x-total-count", total)], Json(items)).into_response()
}

#[derive(Serialize)]
struct BuildingOut<'a> {
    id: &'a str,
    footprint: &'a PolygonM,
    height: f64,
    storeys: u32,
}

#[derive(Serialize)]
struct BlockDetail<'a> {
    id: &'a str,
    boundary: &'a PolygonM,
    buildings: Vec<BuildingOut<'a>>,
    /// Absent for blocks the metrics step skipped.
    metrics: Option<&'a MetricRecord>,
}

async fn block(State(st): Shared, UrlPath(id): UrlPath<String>) -> Response {
    let Some(b) = st.corpus.block(&id) else {
        return Failure::from(Error::UnknownBlock(id)).into_response();
    };
    let detail = BlockDetail {
        id: &b.id,
        boundary: &b.boundary,
        buildings: b
            .buildings
            .iter()
            .map(|x| BuildingOut {
                id: &x.id,
                footprint: &x.footprint,
                height: x.height,
                storeys: x.storeys,
            })
            .collect(),
        metrics: st.metrics.record(&b.id),
    };
    Json(detail).into_response()
}

async fn som(State(st): Shared, UrlPath(set): UrlPath<String>) -> Response {
    let grid = set.parse::<SetName>().ok().and_then(|n| st.grids.get(&n));
    match grid {
        Some(g) => Json(g).into_response(),
        None => Failure::from(Error::UnknownSet(set)).into_response(),
    }
}

async fn pearson(State(st): Shared) -> Response {
    match &st.metrics.pearson {
        Some(p) => Json(p).into_response(),
        None => Failure::not_found("no_pearson", "metrics file has no correlation matrix".into()).into_response(),
    }
}

#[derive(Serialize)]
struct RetrieveResponse {
    query_echo: Query,
    results: Vec<RankedResult>,
    encoding: Vec<f64>,
    warnings: Vec<String>,
}

fn strict_flag(params: &HashMap<String, String>) -> bool {
    params
        .get("strict")
        .is_some_and(|v| matches!(v.as_str(), "1" | "true" | "yes"))
}

async fn retrieve_handler(
    State(st): Shared,
    UrlQuery(params): UrlQuery<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult<RetrieveResponse> {
    let malformed = |e: serde_json::Error| Failure::from(Error::parse("request body", e.to_string()));
    let value: serde_json::Value = serde_json::from_slice(&body).map_err(malformed)?;
    // a well-formed but unknown set name is a missing resource, not a bad body
    if let Some(name) = value.get("set").and_then(|v| v.as_str()) {
        name.parse::<SetName>()?;
    }
    let query: Query = serde_json::from_value(value).map_err(malformed)?;
    let ts = st
        .sets
        .get(&query.set)
        .ok_or_else(|| Error::UnknownSet(query.set.to_string()))?;
    let (encoded, results) = retrieve(&query, &ts.model, &ts.encodings, strict_flag(&params))?;
    Ok(Json(RetrieveResponse {
        query_echo: query,
        results,
        encoding: encoded.values,
        warnings: encoded.warnings,
    }))
}

/// All routes, plus static files under `/` when `static_dir` is given.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    let api = Router::new()
        .route("/api/sets", get(sets))
        .route("/api/blocks", get(blocks))
        .route("/api/blocks/:id", get(block))
        .route("/api/som/:set", get(som))
        .route("/api/pearson", get(pearson))
        .route("/api/retrieve", post(retrieve_handler))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(state: AppState, addr: SocketAddr, static_dir: Option<PathBuf>) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(format!("tcp://{addr}"), e))?;
    log::info!(target: "service", "listening on http://{addr}");
    axum::serve(listener, router(Arc::new(state), static_dir))
        .await
        .map_err(|e| Error::io(format!("tcp://{addr}"), e))
}

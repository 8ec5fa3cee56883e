//! HTTP API over a [`RegistryStore`]: tool queries, analytics, pipeline
//! checks and the moderated change-request workflow.
//!
//! Reads are served from immutable registry snapshots. Mutations go through
//! the store's single writer and are persisted before the response is sent.

mod error;
mod filter;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use atlas_core::analytics::{map_matrix, render_map, stage_table, summary, SummaryReport};
use atlas_core::compose::check_sequence;
use atlas_core::registry::{
    ChangeError, ChangeRequest, ChangeStatus, Decision, DeploymentStage, NewChangeRequest,
    RegistryStore, ToolRecord,
};
use atlas_core::taxonomy::parse_classification;
use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use filter::{FilterError, ToolFilter};

pub const TOKEN_HEADER: &str = "x-moderator-token";
pub const TOKEN_ENV: &str = "ATLAS_MODERATOR_TOKEN";
pub const TOTAL_COUNT_HEADER: &str = "x-total-count";

pub struct AppState {
    pub store: RegistryStore,
    /// Moderator token; with `None` every moderation call is refused.
    pub token: Option<String>,
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

/// The API routes, plus a static file fallback when `static_dir` is given.
pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/tools", get(list_tools))
        .route("/api/tools/{id}", get(get_tool))
        .route("/api/analytics/summary", get(get_summary))
        .route("/api/analytics/stage-table", get(get_stage_table))
        .route("/api/analytics/map", get(get_map))
        .route("/api/analytics/map.svg", get(get_map_svg))
        .route("/api/pipeline/check", get(pipeline_check))
        .route(
            "/api/change-requests",
            post(submit).get(list_change_requests),
        )
        .route("/api/change-requests/{id}", get(get_change_request))
        .route("/api/change-requests/{id}/approve", post(approve))
        .route("/api/change-requests/{id}/reject", post(reject))
        .route("/api/audit", get(get_audit))
        .with_state(Arc::new(state));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves `app` on `listener` until ctrl-c.
pub async fn serve(listener: TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub async fn bind(port: u16) -> std::io::Result<(TcpListener, SocketAddr)> {
    let listener = TcpListener::bind(("127.0.0.1", port)).await?;
    let addr = listener.local_addr()?;
    Ok((listener, addr))
}

/// A tool record as returned by the API.
#[derive(Serialize)]
struct ToolView<'a> {
    #[serde(flatten)]
    record: &'a ToolRecord,
    overall_deployment: DeploymentStage,
}

impl<'a> From<&'a ToolRecord> for ToolView<'a> {
    fn from(record: &'a ToolRecord) -> Self {
        ToolView {
            record,
            overall_deployment: record.overall_deployment(),
        }
    }
}

async fn list_tools(State(state): State<Shared>, RawQuery(query): RawQuery) -> ApiResult<Response> {
    let filter =
        ToolFilter::from_query(query.as_deref().unwrap_or("")).map_err(|e| ApiError::filter(&e))?;
    let snapshot = state.store.snapshot();
    let mut tools: Vec<&ToolRecord> = snapshot.tools().filter(|t| filter.matches(t)).collect();
    tools.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.id.cmp(&b.id)));
    let views: Vec<ToolView> = tools.iter().map(|t| ToolView::from(*t)).collect();
    let mut response = Json(views).into_response();
    response
        .headers_mut()
        .insert(TOTAL_COUNT_HEADER, HeaderValue::from(tools.len()));
    Ok(response)
}

async fn get_tool(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let snapshot = state.store.snapshot();
    let tool = snapshot
        .tool(&id)
        .ok_or_else(|| ApiError::not_found(format!("no tool with id `{id}`")))?;
    Ok(Json(ToolView::from(tool)).into_response())
}

async fn get_summary(State(state): State<Shared>) -> Json<SummaryReport> {
    // An empty registry has no shares rather than an error.
    Json(summary(&state.store.snapshot()).unwrap_or_default())
}

async fn get_stage_table(State(state): State<Shared>) -> Response {
    Json(stage_table(&state.store.snapshot())).into_response()
}

/// Reads exactly the parameters in `names`, each once, and nothing else.
fn params<const N: usize>(query: Option<&str>, names: [&str; N]) -> ApiResult<[String; N]> {
    let mut found: [Option<String>; N] = std::array::from_fn(|_| None);
    for (key, value) in url::form_urlencoded::parse(query.unwrap_or("").as_bytes()) {
        let slot = names
            .iter()
            .position(|n| *n == key)
            .ok_or_else(|| ApiError::bad_request(format!("unknown query parameter `{key}`")))?;
        if found[slot].replace(value.into_owned()).is_some() {
            return Err(ApiError::bad_request(format!(
                "`{key}` given more than once"
            )));
        }
    }
    let mut out: [String; N] = std::array::from_fn(|_| String::new());
    for (i, value) in found.into_iter().enumerate() {
        out[i] = value.ok_or_else(|| ApiError::bad_request(format!("missing `{}`", names[i])))?;
    }
    Ok(out)
}

fn stage_param(query: Option<&str>) -> ApiResult<u8> {
    let [raw] = params(query, ["stage"])?;
    raw.trim()
        .parse::<u8>()
        .ok()
        .filter(|s| (1..=8).contains(s))
        .ok_or_else(|| ApiError::bad_request(format!("stage must be 1 to 8, got `{raw}`")))
}

async fn get_map(State(state): State<Shared>, RawQuery(query): RawQuery) -> ApiResult<Response> {
    let stage = stage_param(query.as_deref())?;
    let matrix = map_matrix(&state.store.snapshot(), stage)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(Json(matrix).into_response())
}

async fn get_map_svg(
    State(state): State<Shared>,
    RawQuery(query): RawQuery,
) -> ApiResult<Response> {
    let stage = stage_param(query.as_deref())?;
    let matrix = map_matrix(&state.store.snapshot(), stage)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok((
        [(header::CONTENT_TYPE, "image/svg+xml")],
        render_map(&matrix),
    )
        .into_response())
}

async fn pipeline_check(RawQuery(query): RawQuery) -> ApiResult<Response> {
    let [a, b] = params(query.as_deref(), ["a", "b"])?;
    let a = parse_classification(&a).map_err(|e| ApiError::parse("a", &e))?;
    let b = parse_classification(&b).map_err(|e| ApiError::parse("b", &e))?;
    let report = check_sequence(&a, &b).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(Json(report).into_response())
}

fn json_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let value: Value = serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))?;
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ApiError::schema(path, e.into_inner().to_string())
    })
}

async fn submit(State(state): State<Shared>, body: Bytes) -> ApiResult<Response> {
    let request: NewChangeRequest = json_body(&body)?;
    let now = chrono::Utc::now();
    let id = mutate(state, move |reg| reg.submit_change_request(request, now))
        .await
        .map_err(|e| ApiError::from_mutate(e, ApiError::on_submit))?;
    let body = json!({ "id": id, "status": ChangeStatus::Pending });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

fn require_token(state: &AppState, headers: &HeaderMap) -> ApiResult<()> {
    let given = headers.get(TOKEN_HEADER).map(HeaderValue::as_bytes);
    match (&state.token, given) {
        (Some(expected), Some(given)) if constant_time_eq(expected.as_bytes(), given) => Ok(()),
        _ => Err(ApiError::unauthorized()),
    }
}

fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

async fn list_change_requests(
    State(state): State<Shared>,
    headers: HeaderMap,
    RawQuery(query): RawQuery,
) -> ApiResult<Json<Vec<ChangeRequest>>> {
    require_token(&state, &headers)?;
    let mut status = None;
    for (key, value) in url::form_urlencoded::parse(query.as_deref().unwrap_or("").as_bytes()) {
        if key != "status" {
            return Err(ApiError::bad_request(format!(
                "unknown query parameter `{key}`"
            )));
        }
        status = Some(
            ChangeStatus::from_slug(&value)
                .ok_or_else(|| ApiError::bad_request(format!("unknown status `{value}`")))?,
        );
    }
    let snapshot = state.store.snapshot();
    let list = snapshot
        .change_requests()
        .iter()
        .filter(|cr| status.is_none_or(|s| cr.status == s))
        .cloned()
        .collect();
    Ok(Json(list))
}

async fn get_change_request(
    State(state): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Json<ChangeRequest>> {
    state
        .store
        .snapshot()
        .change_request(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::not_found(format!("no change request with id `{id}`")))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewBody {
    #[serde(default)]
    reviewer: Option<String>,
    #[serde(default)]
    note: String,
}

async fn approve(
    state: State<Shared>,
    headers: HeaderMap,
    id: Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    review(state, headers, id, body, Decision::Approve).await
}

async fn reject(
    state: State<Shared>,
    headers: HeaderMap,
    id: Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    review(state, headers, id, body, Decision::Reject).await
}

async fn review(
    State(state): State<Shared>,
    headers: HeaderMap,
    Path(id): Path<String>,
    body: Bytes,
    decision: Decision,
) -> ApiResult<Response> {
    require_token(&state, &headers)?;
    let body: ReviewBody = if body.is_empty() {
        ReviewBody::default()
    } else {
        json_body(&body)?
    };
    let reviewer = body.reviewer.unwrap_or_else(|| "moderator".to_owned());
    let now = chrono::Utc::now();
    let updated = mutate(state, move |reg| {
        reg.review_change_request(&id, decision, &reviewer, &body.note, now)
    })
    .await
    .map_err(|e| ApiError::from_mutate(e, ApiError::on_review))?;
    Ok(Json(updated).into_response())
}

async fn get_audit(State(state): State<Shared>) -> Response {
    Json(state.store.snapshot().audit().to_vec()).into_response()
}

/// Runs a store mutation off the async workers; it may block on file I/O.
async fn mutate<T: Send + 'static>(
    state: Shared,
    f: impl FnOnce(&mut atlas_core::registry::Registry) -> Result<T, ChangeError> + Send + 'static,
) -> Result<T, atlas_core::registry::MutateError<ChangeError>> {
    tokio::task::spawn_blocking(move || state.store.mutate(f))
        .await
        .unwrap_or_else(|e| std::panic::resume_unwind(e.into_panic()))
}

//! Route handlers. Thin delegations: parameter parsing here, behavior in the
//! core modules. The items array is engine output verbatim; this layer never
//! reorders.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use learnrec_core::engine::{GoalSpec, Recommendation};
use learnrec_core::evaluator::{self, EvalConfig, MetricKs, SyntheticDataset};
use learnrec_core::profiles::{AlgorithmId, RecommendationProfile, Signal};
use learnrec_core::store::ingest;
use learnrec_core::Error as CoreError;

use crate::dto::*;
use crate::eval_runs::RunState;
use crate::AppState;

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: message.into(),
        }
    }
}

impl From<CoreError> for ApiError {
    fn from(err: CoreError) -> Self {
        let status = match &err {
            CoreError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            CoreError::NotFound { .. } => StatusCode::NOT_FOUND,
            CoreError::Format(_) => StatusCode::BAD_REQUEST,
            CoreError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            message: err.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(ErrorBody {
                error: self.message,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

// -- parameter helpers -------------------------------------------------------

fn required<'a>(params: &'a HashMap<String, String>, name: &str) -> ApiResult<&'a str> {
    params
        .get(name)
        .map(String::as_str)
        .filter(|v| !v.is_empty())
        .ok_or_else(|| ApiError::unprocessable(format!("missing query parameter `{name}`")))
}

fn optional_k(params: &HashMap<String, String>) -> ApiResult<Option<u32>> {
    match params.get("k") {
        None => Ok(None),
        Some(raw) => raw
            .parse::<u32>()
            .map(Some)
            .map_err(|_| ApiError::unprocessable(format!("invalid k `{raw}`"))),
    }
}

fn optional_lambda(params: &HashMap<String, String>) -> ApiResult<Option<f64>> {
    match params.get("lambda") {
        None => Ok(None),
        Some(raw) => raw
            .parse::<f64>()
            .map(Some)
            .map_err(|_| ApiError::unprocessable(format!("invalid lambda `{raw}`"))),
    }
}

fn optional_signal(params: &HashMap<String, String>) -> ApiResult<Option<Signal>> {
    match params.get("signal") {
        None => Ok(None),
        Some(raw) => raw.parse::<Signal>().map(Some).map_err(ApiError::from),
    }
}

fn respond(rec: Recommendation, started: Instant) -> Json<RecommendationResponse> {
    let elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
    Json(RecommendationResponse::from_engine(rec, elapsed_ms))
}

// -- ingestion ---------------------------------------------------------------

pub async fn ingest_data(
    State(state): State<Arc<AppState>>,
    Path(kind): Path<String>,
    body: String,
) -> ApiResult<Response> {
    let report = match kind.as_str() {
        "interactions" => state.store.ingest_interactions_csv(&body)?,
        "resources" => state.store.ingest_resources_jsonl(&body)?,
        "tags" => state.store.ingest_tags_csv(&body)?,
        other => {
            return Err(ApiError {
                status: StatusCode::NOT_FOUND,
                message: format!("unknown ingestion kind `{other}`"),
            })
        }
    };
    Ok(Json(report).into_response())
}

// -- recommendations ---------------------------------------------------------

pub async fn rec_popular(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecommendationResponse>> {
    let started = Instant::now();
    let k = optional_k(&params)?;
    Ok(respond(state.engine.recommend_popular(k)?, started))
}

pub async fn rec_cf(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecommendationResponse>> {
    let started = Instant::now();
    let user = required(&params, "user")?;
    let k = optional_k(&params)?;
    let signal = optional_signal(&params)?;
    Ok(respond(state.engine.recommend_cf(user, k, signal)?, started))
}

pub async fn rec_cbf(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecommendationResponse>> {
    let started = Instant::now();
    let user = required(&params, "user")?;
    let k = optional_k(&params)?;
    Ok(respond(state.engine.recommend_cbf(user, k)?, started))
}

pub async fn rec_similar(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecommendationResponse>> {
    let started = Instant::now();
    let resource = required(&params, "resource")?;
    let k = optional_k(&params)?;
    Ok(respond(state.engine.similar_resources(resource, k)?, started))
}

pub async fn rec_contextual(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecommendationResponse>> {
    let started = Instant::now();
    let user = required(&params, "user")?;
    let resource = required(&params, "resource")?;
    let k = optional_k(&params)?;
    Ok(respond(
        state.engine.recommend_contextual(user, resource, k)?,
        started,
    ))
}

pub async fn rec_goal(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecommendationResponse>> {
    let started = Instant::now();
    let user = required(&params, "user")?;
    let goal: GoalSpec = required(&params, "goal")?.parse()?;
    let k = optional_k(&params)?;
    let lambda = optional_lambda(&params)?;
    Ok(respond(
        state.engine.recommend_goal(user, &goal, k, lambda)?,
        started,
    ))
}

// -- profile administration --------------------------------------------------

pub async fn get_profile(
    State(state): State<Arc<AppState>>,
    Path(profile_id): Path<String>,
) -> ApiResult<Json<RecommendationProfile>> {
    let profile = state.profiles.get_profile(&profile_id)?;
    Ok(Json(RecommendationProfile::clone(&profile)))
}

pub async fn put_profile(
    State(state): State<Arc<AppState>>,
    Path(profile_id): Path<String>,
    Json(body): Json<ProfilePut>,
) -> ApiResult<Json<RecommendationProfile>> {
    let profile = RecommendationProfile {
        profile_id: profile_id.clone(),
        algorithm_id: body.algorithm_id,
        n: body.n,
        k_default: body.k_default,
        lambda: body.lambda,
        signal: body.signal,
        headroom: body.headroom.unwrap_or(RecommendationProfile::DEFAULT_HEADROOM),
        version: 0,
    };
    state.profiles.set_profile(profile)?;
    let stored = state.profiles.get_profile(&profile_id)?;
    Ok(Json(RecommendationProfile::clone(&stored)))
}

// -- evaluation --------------------------------------------------------------

fn parse_algorithms(raw: &[String]) -> ApiResult<Vec<AlgorithmId>> {
    raw.iter()
        .map(|s| s.parse::<AlgorithmId>().map_err(ApiError::from))
        .collect()
}

fn load_eval_dataset(
    state: &AppState,
    refs: Option<&DatasetRefs>,
) -> Result<SyntheticDataset, CoreError> {
    match refs {
        None => {
            let (interactions, resources, tags) = state.store.export_dataset();
            Ok(evaluator::dataset_from_parts(interactions, resources, tags))
        }
        Some(refs) => {
            let read = |path: &str| std::fs::read_to_string(path);
            let (interactions, report) =
                ingest::parse_interactions_csv(&read(&refs.interactions)?)?;
            if report.rejected > 0 {
                return Err(CoreError::Format(format!(
                    "{} invalid interaction rows in {}",
                    report.rejected, refs.interactions
                )));
            }
            let resources = match &refs.resources {
                None => Vec::new(),
                Some(path) => ingest::parse_resources_jsonl(&read(path)?)?.0,
            };
            let tags = match &refs.tags {
                None => Vec::new(),
                Some(path) => ingest::parse_tags_csv(&read(path)?)?.0,
            };
            Ok(evaluator::dataset_from_parts(interactions, resources, tags))
        }
    }
}

pub async fn eval_run(
    State(state): State<Arc<AppState>>,
    Json(body): Json<EvalRunRequest>,
) -> ApiResult<(StatusCode, Json<EvalRunAccepted>)> {
    let algorithms = parse_algorithms(&body.algorithms)?;
    let config = EvalConfig {
        algorithms,
        test_fraction: body.test_fraction,
        ks: MetricKs::default(),
    };
    // Surface obviously-bad requests synchronously.
    if !(body.test_fraction > 0.0 && body.test_fraction < 1.0) {
        return Err(ApiError::unprocessable(format!(
            "test_fraction must be in (0, 1), got {}",
            body.test_fraction
        )));
    }

    let run_id = state.eval_runs.start();
    let runs = state.eval_runs.clone();
    let task_state = Arc::clone(&state);
    let task_run_id = run_id.clone();
    tokio::task::spawn_blocking(move || {
        let result = load_eval_dataset(&task_state, body.dataset.as_ref())
            .and_then(|dataset| evaluator::evaluate(&dataset, &config, &task_state.profiles))
            .map_err(|e| e.to_string());
        runs.finish(&task_run_id, result);
    });

    Ok((StatusCode::ACCEPTED, Json(EvalRunAccepted { run_id })))
}

pub async fn eval_status(
    State(state): State<Arc<AppState>>,
    Path(run_id): Path<String>,
) -> ApiResult<Json<EvalRunStatus>> {
    let run = state
        .eval_runs
        .get(&run_id)
        .ok_or_else(|| ApiError::from(CoreError::not_found("eval run", &run_id)))?;
    let status = match run {
        RunState::Running => EvalRunStatus {
            run_id,
            status: "running",
            report: None,
            report_csv: None,
            error: None,
        },
        RunState::Done(report) => EvalRunStatus {
            run_id,
            status: "done",
            report_csv: Some(report.to_csv()),
            report: Some(report),
            error: None,
        },
        RunState::Failed(message) => EvalRunStatus {
            run_id,
            status: "failed",
            report: None,
            report_csv: None,
            error: Some(message),
        },
    };
    Ok(Json(status))
}

// -- observability -----------------------------------------------------------

pub async fn stats(State(state): State<Arc<AppState>>) -> Json<learnrec_core::DatasetStats> {
    Json(state.store.compute_stats())
}

pub async fn health(State(state): State<Arc<AppState>>) -> Json<HealthBody> {
    Json(HealthBody {
        status: "ok",
        store_version: state.store.version(),
        refresh_bound_ms: state.store.config().refresh_bound_ms,
    })
}

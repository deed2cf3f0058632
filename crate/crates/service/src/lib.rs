//! JSON-over-HTTP facade: parse QASM, run circuits, list backends.
//!
//! | route            | body                     | success                              |
//! |------------------|--------------------------|--------------------------------------|
//! | `POST /v1/parse` | `{"qasm": "..."}`        | circuit JSON                         |
//! | `POST /v1/run`   | [`RunRequest`]           | `{histogram, statevector_probs, seed}` |
//! | `GET /v1/backends` |                        | list of backend topologies           |
//!
//! Errors carry `{"error": kind, "message": ...}` plus `diagnostics` (422,
//! QASM parse failures) or `violations` (409, coupling or basis violations).
//! Malformed bodies and bad parameters are 400.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::{AllowOrigin, CorsLayer};

use qxsim_core::engine::{self, EngineError, Execution, Histogram, NoiseModel, RunConfig};
use qxsim_core::qasm::{self, QasmError};
use qxsim_core::rng::mix64;
use qxsim_core::topology::{self, BackendTopology};
use qxsim_core::{Circuit, Violation};

pub const DEFAULT_SHOTS: u64 = 1024;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Extra `<name>.toml` topologies, as for the CLI's `QX_BACKEND_DIR`.
    pub backend_dir: Option<PathBuf>,
    /// Allowed browser origin; `None` allows any.
    pub cors_origin: Option<String>,
}

struct AppState {
    config: ServiceConfig,
    seeds: AtomicU64,
}

#[derive(Debug, Deserialize)]
struct ParseRequest {
    qasm: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseChoice {
    #[default]
    Off,
    Preset,
}

/// Exactly one of `circuit` and `qasm` must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    #[serde(default)]
    pub circuit: Option<Circuit>,
    #[serde(default)]
    pub qasm: Option<String>,
    pub backend: String,
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Assigned by the server when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub noise: NoiseChoice,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResponse {
    pub histogram: Histogram,
    /// Exact noiseless probability of each readout string with nonzero weight.
    pub statevector_probs: BTreeMap<String, f64>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct Diagnostic {
    line: usize,
    column: usize,
    message: String,
}

impl From<&QasmError> for Diagnostic {
    fn from(e: &QasmError) -> Self {
        Self {
            line: e.line,
            column: e.column,
            message: format!("{}: {}", e.kind, e.message),
        }
    }
}

enum ApiError {
    BadRequest(String),
    Parse(QasmError),
    Violations(Vec<Violation>),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::BadRequest(message) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "bad-request", "message": message}),
            ),
            ApiError::Parse(e) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "parse", "message": e.to_string(), "diagnostics": [Diagnostic::from(&e)]}),
            ),
            ApiError::Violations(violations) => (
                StatusCode::CONFLICT,
                json!({"error": "topology", "message": "circuit does not run on this backend", "violations": violations}),
            ),
            ApiError::Internal(message) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({"error": "internal", "message": message}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

fn body_json<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

async fn parse_handler(body: Bytes) -> Result<Json<Circuit>, ApiError> {
    let req: ParseRequest = body_json(&body)?;
    qasm::parse(&req.qasm).map(Json).map_err(ApiError::Parse)
}

fn fresh_seed(state: &AppState) -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    mix64(nanos ^ mix64(state.seeds.fetch_add(1, Ordering::Relaxed)))
}

fn execute(req: RunRequest, seed: u64, backend: BackendTopology) -> Result<RunResponse, ApiError> {
    let circuit = match (req.circuit, req.qasm) {
        (Some(c), None) => c,
        (None, Some(text)) => qasm::parse(&text).map_err(ApiError::Parse)?,
        _ => return Err(ApiError::BadRequest("give exactly one of `circuit` and `qasm`".into())),
    };
    let noise = match req.noise {
        NoiseChoice::Off => None,
        NoiseChoice::Preset => Some(NoiseModel::preset()),
    };
    let cfg = RunConfig::new(req.shots, seed, backend)
        .map_err(|e| ApiError::BadRequest(e.to_string()))?
        .with_noise(noise)
        .with_execution(Execution::Parallel);
    let histogram = engine::sample(&circuit, &cfg).map_err(|e| match e {
        EngineError::Validation(report) => ApiError::Violations(report.violations),
        EngineError::Circuit(_) | EngineError::ShotsOutOfRange(_) | EngineError::BadNoise(_) => {
            ApiError::BadRequest(e.to_string())
        }
        EngineError::Linalg(_) => ApiError::Internal(e.to_string()),
    })?;
    let statevector_probs = engine::exact_distribution(&circuit, circuit.readout_width())
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .into_iter()
        .filter(|&(_, p)| p > 1e-12)
        .collect();
    Ok(RunResponse {
        histogram,
        statevector_probs,
        seed,
    })
}

async fn run_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<RunResponse>, ApiError> {
    let req: RunRequest = body_json(&body)?;
    let backend = topology::resolve_name(&req.backend, state.config.backend_dir.as_deref())
        .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let seed = req.seed.unwrap_or_else(|| fresh_seed(&state));
    tokio::task::spawn_blocking(move || execute(req, seed, backend))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map(Json)
}

async fn backends_handler(State(state): State<Arc<AppState>>) -> Json<Vec<BackendTopology>> {
    Json(topology::available(state.config.backend_dir.as_deref()))
}

fn cors(origin: Option<&str>) -> CorsLayer {
    let allow = match origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(v) => AllowOrigin::exact(v),
        None => AllowOrigin::any(),
    };
    CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE])
}

pub fn router(config: ServiceConfig) -> Router {
    let layer = cors(config.cors_origin.as_deref());
    let state = Arc::new(AppState {
        config,
        seeds: AtomicU64::new(0),
    });
    Router::new()
        .route("/v1/parse", post(parse_handler))
        .route("/v1/run", post(run_handler))
        .route("/v1/backends", get(backends_handler))
        .layer(layer)
        .with_state(state)
}

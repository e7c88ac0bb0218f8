//! HTTP developer API over the registry.
//!
//! Endpoints (HTTP/1.1, JSON, UTF-8):
//!
//! | Method | Path                         | Purpose                              |
//! |--------|------------------------------|--------------------------------------|
//! | POST   | `/v1/ids`                    | generate + register; body = raw bytes|
//! | GET    | `/v1/ids/{public_key}`       | resolve a registration               |
//! | POST   | `/v1/verify`                 | recompute the public half            |
//! | POST   | `/v1/authenticate`           | check a presented private key        |
//! | GET    | `/v1/duplicates/{digest}`    | list registrations of identical bytes|
//!
//! The private key is returned exactly once, in the 201 response of
//! `POST /v1/ids`; it is never stored, logged, or revealed again.
//! Error responses carry `{"error": code, "message": text}`.

use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use w3id_core::{
    generate_now, public_verify, CanonicalObject, MonotonicIssuer, Registry, RegistryRecord,
    SystemClock, Timestamp, W3idError,
};

/// Default request-body cap: 64 MiB.
pub const DEFAULT_MAX_BODY_BYTES: usize = 64 * 1024 * 1024;

/// Service configuration; values usually come from flags or the
/// `W3ID_LISTEN` / `W3ID_STORE` / `W3ID_MAX_BODY` environment variables.
#[derive(Debug, Clone)]
pub struct ApiConfig {
    pub listen_address: String,
    pub store_path: PathBuf,
    pub max_body_bytes: usize,
}

impl ApiConfig {
    pub fn new(listen_address: impl Into<String>, store_path: impl Into<PathBuf>) -> Self {
        ApiConfig {
            listen_address: listen_address.into(),
            store_path: store_path.into(),
            max_body_bytes: DEFAULT_MAX_BODY_BYTES,
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("failed to bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },

    #[error("server error: {0}")]
    Serve(std::io::Error),

    #[error(transparent)]
    Core(#[from] W3idError),
}

/// Bind the listen address up front so callers can report the actual
/// bound port (useful with `:0`) before the server starts.
pub fn bind(addr: &str) -> Result<TcpListener, ServiceError> {
    TcpListener::bind(addr).map_err(|source| ServiceError::Bind { addr: addr.to_string(), source })
}

/// Serve until interrupted. Blocks the calling thread; all shared state
/// lives in the registry (serialized writes) and the monotonic issuer.
pub fn run_blocking(
    listener: TcpListener,
    store_path: &Path,
    max_body_bytes: usize,
) -> Result<(), ServiceError> {
    let state = AppState::open(store_path)?;
    let app = router(state, max_body_bytes);

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(ServiceError::Serve)?;
    runtime.block_on(async move {
        listener.set_nonblocking(true).map_err(ServiceError::Serve)?;
        let listener = tokio::net::TcpListener::from_std(listener).map_err(ServiceError::Serve)?;
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(ServiceError::Serve)
    })
}

/// Bind and serve in one step.
pub fn serve_blocking(config: &ApiConfig) -> Result<(), ServiceError> {
    let listener = bind(&config.listen_address)?;
    run_blocking(listener, &config.store_path, config.max_body_bytes)
}

#[derive(Clone)]
struct AppState {
    inner: Arc<StateInner>,
}

struct StateInner {
    registry: Registry,
    issuer: MonotonicIssuer,
}

impl AppState {
    fn open(store_path: &Path) -> Result<Self, ServiceError> {
        Ok(AppState {
            inner: Arc::new(StateInner {
                registry: Registry::open(store_path)?,
                issuer: MonotonicIssuer::system(),
            }),
        })
    }
}

fn router(state: AppState, max_body_bytes: usize) -> Router {
    Router::new()
        .route("/v1/ids", post(create_id))
        .route("/v1/ids/{public_key}", get(resolve_id))
        .route("/v1/verify", post(verify))
        .route("/v1/authenticate", post(authenticate))
        .route("/v1/duplicates/{content_digest}", get(duplicates))
        .layer(DefaultBodyLimit::max(max_body_bytes))
        .with_state(state)
}

// ---------------------------------------------------------------------
// Error mapping
// ---------------------------------------------------------------------

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.code, "message": self.message });
        (self.status, Json(body)).into_response()
    }
}

impl From<W3idError> for ApiError {
    fn from(err: W3idError) -> Self {
        let (status, code) = match &err {
            W3idError::MalformedKey(_) => (StatusCode::BAD_REQUEST, "malformed_key"),
            W3idError::MalformedId(_) => (StatusCode::BAD_REQUEST, "malformed_id"),
            W3idError::MalformedChain(_) => (StatusCode::BAD_REQUEST, "malformed_chain"),
            W3idError::WrongLength(_)
            | W3idError::NonDigit(_)
            | W3idError::OutOfRange { .. }
            | W3idError::InvalidDate { .. } => (StatusCode::BAD_REQUEST, "malformed_timestamp"),
            W3idError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            W3idError::DuplicateId(_) => (StatusCode::CONFLICT, "duplicate_id"),
            W3idError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage_failure"),
            W3idError::ClockUnavailable(_) | W3idError::Overflow => {
                (StatusCode::INTERNAL_SERVER_ERROR, "clock_failure")
            }
            W3idError::VerificationFailed => {
                (StatusCode::INTERNAL_SERVER_ERROR, "verification_failed")
            }
        };
        ApiError::new(status, code, err.to_string())
    }
}

fn body_or_reject(body: Result<Bytes, BytesRejection>) -> Result<Bytes, ApiError> {
    body.map_err(|rejection| {
        let status = rejection.status();
        let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
            "body_too_large"
        } else {
            "bad_request"
        };
        ApiError::new(status, code, rejection.body_text())
    })
}

fn header_text(headers: &HeaderMap, name: &str) -> String {
    headers
        .get(name)
        .and_then(|v| v.to_str().ok())
        .unwrap_or_default()
        .to_string()
}

// ---------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct CreatedId {
    w3id: String,
    public_key: String,
    private_key: String,
    timestamp: Timestamp,
}

async fn create_id(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> Result<(StatusCode, Json<CreatedId>), ApiError> {
    let body = body_or_reject(body)?;
    let platform = header_text(&headers, "x-platform");
    let location_uri = header_text(&headers, "x-location-uri");

    let obj = CanonicalObject::ingest(body.to_vec());
    let record = generate_now(&obj, &state.inner.issuer)?;
    let keys = w3id_core::split(&record.w3id)?;
    state.inner.registry.register(&record, &obj, &platform, &location_uri, &SystemClock)?;

    Ok((
        StatusCode::CREATED,
        Json(CreatedId {
            w3id: record.w3id.clone(),
            public_key: keys.public_key().to_string(),
            private_key: keys.private_key().to_string(),
            timestamp: record.timestamp,
        }),
    ))
}

/// Resolver view of a registration: everything except private material.
#[derive(Serialize)]
struct ResolvedId {
    public_key: String,
    timestamp: Timestamp,
    content_digest: String,
    platform: String,
    location_uri: String,
    created_at: Timestamp,
}

impl From<RegistryRecord> for ResolvedId {
    fn from(record: RegistryRecord) -> Self {
        ResolvedId {
            public_key: record.public_key,
            timestamp: record.timestamp,
            content_digest: record.content_digest,
            platform: record.platform,
            location_uri: record.location_uri,
            created_at: record.created_at,
        }
    }
}

async fn resolve_id(
    State(state): State<AppState>,
    UrlPath(public_key): UrlPath<String>,
) -> Result<Json<ResolvedId>, ApiError> {
    let record = state.inner.registry.resolve(&public_key)?;
    Ok(Json(record.into()))
}

#[derive(Deserialize)]
struct VerifyParams {
    public_key: String,
    timestamp: String,
}

#[derive(Serialize)]
struct VerifyOutcome {
    verified: bool,
}

async fn verify(
    State(_state): State<AppState>,
    params: Result<Query<VerifyParams>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<VerifyOutcome>, ApiError> {
    let Query(params) = params.map_err(|rejection| {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", rejection.body_text())
    })?;
    let body = body_or_reject(body)?;
    let ts = Timestamp::parse(&params.timestamp)?;
    let obj = CanonicalObject::ingest(body.to_vec());
    let verified = public_verify(&obj, &ts, &params.public_key)?;
    Ok(Json(VerifyOutcome { verified }))
}

#[derive(Deserialize)]
struct AuthRequest {
    public_key: String,
    private: String,
}

#[derive(Serialize)]
struct AuthOutcome {
    authenticated: bool,
}

async fn authenticate(
    State(state): State<AppState>,
    request: Result<Json<AuthRequest>, JsonRejection>,
) -> Result<Json<AuthOutcome>, ApiError> {
    let Json(request) = request.map_err(|rejection| {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", rejection.body_text())
    })?;
    let authenticated = state.inner.registry.authenticate(&request.public_key, &request.private)?;
    Ok(Json(AuthOutcome { authenticated }))
}

#[derive(Serialize)]
struct DuplicateSet {
    public_keys: Vec<String>,
}

async fn duplicates(
    State(state): State<AppState>,
    UrlPath(content_digest): UrlPath<String>,
) -> Result<Json<DuplicateSet>, ApiError> {
    let public_keys = state.inner.registry.find_duplicates(&content_digest)?;
    Ok(Json(DuplicateSet { public_keys }))
}

//! HTTP/JSON match service: a human plays two hidden-identity 20-round
//! matches of PD or RPS, one against HBA and one against the game's
//! baseline learner.
//!
//! Endpoints:
//! - `GET /health`
//! - `POST /sessions` with `{"game": "pd" | "rps"}`
//! - `GET /sessions/{id}`
//! - `POST /sessions/{id}/moves` with `{"action": "C", "round": 0}` (`round` optional)
//! - `GET /sessions/{id}/summary`
//!
//! Errors come back as `{"error": {"code", "message"}}`.

mod error;
mod session;
mod store;

use std::collections::HashMap;
use std::future::Future;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock, TryLockError};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use hba_core::rng::derive_seed;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::{ServeDir, ServeFile};

pub use error::ApiError;
pub use session::{
    parse_game, MatchReveal, MatchScore, MoveResult, RoundView, Session, SessionSummary, SessionView, Status,
    MATCHES_PER_SESSION, SCHEMA_VERSION,
};
pub use store::{read_events, Event, Store, StoreError};

/// Service settings, usually read from a JSON file by the CLI.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    /// Root seed; session `n` plays with `derive_seed(seed, n)`.
    pub seed: u64,
    /// Where session logs and match records go; nothing is kept when unset.
    pub data_dir: Option<PathBuf>,
    /// Directory of a built browser client to serve at `/`.
    pub static_dir: Option<PathBuf>,
    /// Allowed CORS origin; any origin when unset.
    pub cors_origin: Option<String>,
}

type Shared = Arc<Mutex<Session>>;

/// State shared by all handlers.
pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Shared>>,
    counter: AtomicU64,
    store: Store,
}

impl AppState {
    /// Builds the state, replaying any sessions logged under `data_dir`.
    pub fn new(config: ServiceConfig) -> Result<Arc<Self>, StoreError> {
        let store = match &config.data_dir {
            Some(d) => Store::new(d),
            None => Store::disabled(),
        };
        let recovered = store.recover()?;
        if !recovered.is_empty() {
            log::info!("recovered {} session(s)", recovered.len());
        }
        let counter = recovered.len() as u64;
        let sessions = recovered
            .into_iter()
            .map(|s| (s.id.clone(), Arc::new(Mutex::new(s))))
            .collect();
        Ok(Arc::new(Self {
            config,
            sessions: RwLock::new(sessions),
            counter: AtomicU64::new(counter),
            store,
        }))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(id.to_string()))
    }

    fn create(&self, game: &str) -> Result<SessionView, ApiError> {
        let game = parse_game(game)?;
        let n = self.counter.fetch_add(1, Ordering::SeqCst);
        let id = uuid::Uuid::new_v4().to_string();
        let seed = derive_seed(self.config.seed, n);
        let created_ms = now_ms();
        let session = Session::new(id.clone(), game, seed, created_ms)?;
        self.store
            .append(
                &id,
                &Event::Created {
                    id: id.clone(),
                    game,
                    seed,
                    created_ms,
                },
            )
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let view = session.view();
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    fn submit(&self, id: &str, action: &str, round: Option<usize>) -> Result<MoveResult, ApiError> {
        let shared = self.get(id)?;
        let mut s = match shared.try_lock() {
            Ok(s) => s,
            Err(TryLockError::WouldBlock) => return Err(ApiError::Conflict),
            Err(TryLockError::Poisoned(_)) => return Err(ApiError::Internal("session state poisoned".into())),
        };
        s.check(action, round)?;
        let ts = now_ms();
        // Logged before it is applied: the check above guarantees the replay
        // accepts it.
        self.store
            .append(
                id,
                &Event::Move {
                    match_index: s.match_index(),
                    round: s.round(),
                    action: action.to_string(),
                    ts,
                },
            )
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let (result, finished) = s.submit(action, round, ts)?;
        if let Some(record) = finished {
            let logged = self
                .store
                .write_record(&record)
                .and_then(|_| self.store.append(id, &Event::MatchComplete { record: Box::new(record) }));
            if let Err(e) = logged {
                log::error!("session {id}: {e}");
            }
        }
        Ok(result)
    }

    fn with_session<T>(&self, id: &str, f: impl FnOnce(&Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let shared = self.get(id)?;
        let s = shared
            .lock()
            .map_err(|_| ApiError::Internal("session state poisoned".into()))?;
        f(&s)
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    game: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveRequest {
    action: String,
    #[serde(default)]
    round: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Health {
    status: &'static str,
    schema_version: u32,
    sessions: usize,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(t)| t)
        .map_err(|e| ApiError::BadRequest(e.body_text()))
}

/// Runs session work off the async workers: planning and file writes block.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn health(State(st): State<Arc<AppState>>) -> Json<Health> {
    Json(Health {
        status: "ok",
        schema_version: SCHEMA_VERSION,
        sessions: st.session_count(),
    })
}

async fn create_session(
    State(st): State<Arc<AppState>>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req = body(payload)?;
    let view = blocking(move || st.create(&req.game)).await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    blocking(move || st.with_session(&id, |s| Ok(s.view()))).await.map(Json)
}

async fn submit_move(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<MoveResult>, ApiError> {
    let req = body(payload)?;
    blocking(move || st.submit(&id, &req.action, req.round)).await.map(Json)
}

async fn get_summary(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionSummary>, ApiError> {
    blocking(move || st.with_session(&id, Session::summary)).await.map(Json)
}

/// The API routes, plus the static client when configured.
pub fn router(state: Arc<AppState>) -> Router {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match state.config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => cors.allow_origin(AllowOrigin::exact(origin)),
        Some(Err(_)) => {
            log::warn!("ignoring invalid CORS origin; allowing any");
            cors.allow_origin(Any)
        }
        None => cors.allow_origin(Any),
    };
    let statics = state.config.static_dir.clone().filter(|d| d.is_dir());
    let mut app = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(submit_move))
        .route("/sessions/{id}/summary", get(get_summary));
    if let Some(dir) = statics {
        let index = dir.join("index.html");
        app = app.fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)));
    }
    app.layer(cors).with_state(state)
}

/// Serves until `shutdown` resolves, then finishes in-flight requests.
pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        log::info!("match service listening on {addr}");
    }
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

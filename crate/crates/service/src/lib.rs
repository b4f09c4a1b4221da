//! REST facade over the store, engine, profile registry and evaluator.
//!
//! Route table (JSON bodies and responses, UTF-8):
//!
//! ```text
//! POST /data/interactions | /data/resources | /data/tags
//! GET  /rec/popular?k=
//! GET  /rec/cf?user=&k=&signal=
//! GET  /rec/cbf?user=&k=
//! GET  /rec/similar?resource=&k=
//! GET  /rec/contextual?user=&resource=&k=
//! GET  /rec/goal?user=&goal=&lambda=&k=
//! GET/PUT /admin/profiles/{id}
//! POST /eval/run          GET /eval/runs/{id}
//! GET  /stats             GET /health
//! ```
//!
//! Empty recommendation lists are 200 responses with `cold_start` set, never
//! errors: clients fall back to `/rec/popular`. Ingestion funnels into the
//! store's single-writer path; recommendation handlers are stateless and read
//! one consistent snapshot each.

pub mod dto;
mod eval_runs;
mod handlers;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;

pub use eval_runs::EvalRuns;

use learnrec_core::engine::Engine;
use learnrec_core::profiles::ProfileRegistry;
use learnrec_core::store::{Store, StoreConfig};
use learnrec_core::{Error, Result};

/// Environment variables understood by [`ServiceConfig::from_env`].
pub mod env_vars {
    /// Bind address, e.g. `127.0.0.1:8080`.
    pub const BIND: &str = "LEARNREC_BIND";
    /// Write-visibility refresh bound in milliseconds (at most 1000).
    pub const REFRESH_MS: &str = "LEARNREC_REFRESH_MS";
    /// Path of a profiles JSON file applied at startup.
    pub const PROFILES: &str = "LEARNREC_PROFILES";
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub refresh_bound_ms: u64,
    pub profiles_path: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            refresh_bound_ms: StoreConfig::MAX_REFRESH_BOUND_MS,
            profiles_path: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_env() -> Result<Self> {
        let mut config = ServiceConfig::default();
        if let Ok(bind) = std::env::var(env_vars::BIND) {
            config.bind = bind
                .parse()
                .map_err(|_| Error::validation(format!("invalid bind address `{bind}`")))?;
        }
        if let Ok(ms) = std::env::var(env_vars::REFRESH_MS) {
            config.refresh_bound_ms = ms
                .parse()
                .map_err(|_| Error::validation(format!("invalid refresh bound `{ms}`")))?;
        }
        if let Ok(path) = std::env::var(env_vars::PROFILES) {
            config.profiles_path = Some(PathBuf::from(path));
        }
        Ok(config)
    }
}

/// Shared state behind every handler.
pub struct AppState {
    pub store: Arc<Store>,
    pub profiles: Arc<ProfileRegistry>,
    pub engine: Engine,
    pub eval_runs: EvalRuns,
}

impl AppState {
    /// Fresh state: empty store, built-in profiles plus optional overrides
    /// from the configured profiles file.
    pub fn build(config: &ServiceConfig) -> Result<Arc<AppState>> {
        let store = Arc::new(Store::new(StoreConfig::new(config.refresh_bound_ms)?));
        let profiles = Arc::new(ProfileRegistry::with_builtins());
        if let Some(path) = &config.profiles_path {
            let json = std::fs::read_to_string(path)?;
            profiles.apply_json(&json)?;
        }
        Ok(Self::from_parts(store, profiles))
    }

    /// State over pre-existing store and registry (shared with a CLI run or a
    /// test fixture).
    pub fn from_parts(store: Arc<Store>, profiles: Arc<ProfileRegistry>) -> Arc<AppState> {
        let engine = Engine::new(Arc::clone(&store), Arc::clone(&profiles));
        Arc::new(AppState {
            store,
            profiles,
            engine,
            eval_runs: EvalRuns::default(),
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/data/{kind}", post(handlers::ingest_data))
        .route("/rec/popular", get(handlers::rec_popular))
        .route("/rec/cf", get(handlers::rec_cf))
        .route("/rec/cbf", get(handlers::rec_cbf))
        .route("/rec/similar", get(handlers::rec_similar))
        .route("/rec/contextual", get(handlers::rec_contextual))
        .route("/rec/goal", get(handlers::rec_goal))
        .route(
            "/admin/profiles/{id}",
            get(handlers::get_profile).put(handlers::put_profile),
        )
        .route("/eval/run", post(handlers::eval_run))
        .route("/eval/runs/{id}", get(handlers::eval_status))
        .route("/stats", get(handlers::stats))
        .route("/health", get(handlers::health))
        .with_state(state)
}

/// Binds and serves until the process ends.
pub async fn serve(config: ServiceConfig) -> Result<()> {
    let state = AppState::build(&config)?;
    let listener = TcpListener::bind(config.bind).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .await
        .map_err(Error::Io)?;
    Ok(())
}

/// Binds an ephemeral port and serves in a background task; returns the bound
/// address. Used by tests and by the acceptance harness.
pub async fn spawn_ephemeral(state: Arc<AppState>) -> Result<SocketAddr> {
    let listener = TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0))).await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move {
        let _ = axum::serve(listener, router(state)).await;
    });
    Ok(addr)
}

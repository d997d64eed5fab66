//! JSON over HTTP for the designer front end, versioned under `/v1`.
//!
//! The garment analysis runs once in the background; until it is done every
//! endpoint that needs it answers 503. Each session (the `session` query
//! parameter, `default` when absent) owns a terminal set and runs at most one
//! solve at a time. A solve that is still waiting when a newer one arrives
//! for the same session is dropped with 409.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex as AsyncMutex, OwnedMutexGuard};

use wirelay::config::{EtaSpec, ProjectConfig};
use wirelay::io::{log_bins, LogBins};
use wirelay::layout::{compare_layouts, ComparisonReport};
use wirelay::pipeline::{solve, Analysis, Settings, SolveOutcome};
use wirelay::terminals::{Terminal, TerminalSet};
use wirelay::Error;

/// Number of colour bins in `/heatmap`.
pub const HEATMAP_BINS: usize = 16;
pub const SOLVE_ID_HEADER: &str = "x-solve-id";

enum Field {
    Computing,
    Ready(Arc<Analysis>),
    Failed(String),
}

/// Base analysis with terminals inserted, shared by every session that uses
/// the same terminal set.
struct Resolved {
    analysis: Arc<Analysis>,
    ids: Vec<usize>,
}

#[derive(Default)]
struct SessionData {
    terminals: Option<(TerminalSet, Arc<Resolved>)>,
    /// Id of the most recent solve request.
    latest: u64,
}

#[derive(Default)]
struct Session {
    data: Mutex<SessionData>,
    /// Held while a solve runs.
    runner: Arc<AsyncMutex<()>>,
}

pub struct AppState {
    cfg: ProjectConfig,
    settings: Settings,
    field: RwLock<Field>,
    resolved: Mutex<BTreeMap<String, Arc<Resolved>>>,
    sessions: Mutex<BTreeMap<String, Arc<Session>>>,
}

impl AppState {
    /// State whose analysis still has to be computed, see [`AppState::compute`].
    pub fn new(cfg: ProjectConfig) -> Arc<AppState> {
        Arc::new(AppState {
            settings: Settings::from(&cfg),
            cfg,
            field: RwLock::new(Field::Computing),
            resolved: Mutex::default(),
            sessions: Mutex::default(),
        })
    }

    pub fn with_analysis(cfg: ProjectConfig, analysis: Analysis) -> Arc<AppState> {
        let s = AppState::new(cfg);
        *s.field.write().unwrap() = Field::Ready(Arc::new(analysis));
        s
    }

    /// Computes the analysis on a blocking worker and publishes it.
    pub async fn compute(self: Arc<Self>) {
        let cfg = self.cfg.clone();
        let result = tokio::task::spawn_blocking(move || Analysis::from_config(&cfg)).await;
        let field = match result {
            Ok(Ok(a)) => {
                log::info!("analysis ready: {}", a.cache_key());
                Field::Ready(Arc::new(a))
            }
            Ok(Err(e)) => Field::Failed(e.to_string()),
            Err(e) => Field::Failed(e.to_string()),
        };
        *self.field.write().unwrap() = field;
    }

    fn analysis(&self) -> Result<Arc<Analysis>, ApiError> {
        match &*self.field.read().unwrap() {
            Field::Ready(a) => Ok(a.clone()),
            Field::Computing => Err(ApiError::NotReady),
            Field::Failed(m) => Err(ApiError::Internal(format!("analysis failed: {m}"))),
        }
    }

    fn session(&self, id: &str) -> Arc<Session> {
        self.sessions
            .lock()
            .unwrap()
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    /// Blocks solves for a session until the guard is dropped. Requests
    /// arriving meanwhile queue up exactly as behind a running solve.
    pub async fn hold_session(&self, id: &str) -> OwnedMutexGuard<()> {
        self.session(id).runner.clone().lock_owned().await
    }

    /// Id of the latest solve request seen for a session.
    pub fn latest_solve(&self, id: &str) -> u64 {
        self.session(id).data.lock().unwrap().latest
    }
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    Superseded { id: u64, latest: u64 },
    NotReady,
    Unprocessable(String),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, message) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "invalid_payload", m),
            ApiError::Superseded { id, latest } => (
                StatusCode::CONFLICT,
                "superseded",
                format!("solve {id} was superseded by solve {latest}"),
            ),
            ApiError::NotReady => (
                StatusCode::SERVICE_UNAVAILABLE,
                "field_not_ready",
                "strain field is still being computed".into(),
            ),
            ApiError::Unprocessable(m) => (StatusCode::UNPROCESSABLE_ENTITY, "solver_failure", m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", m),
        };
        json_response(status, &ErrorBody { error: kind, message })
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        if e.is_solver_failure() {
            ApiError::Unprocessable(e.to_string())
        } else {
            ApiError::BadRequest(e.to_string())
        }
    }
}

fn json_response<T: Serialize>(status: StatusCode, body: &T) -> Response {
    match serde_json::to_vec(body) {
        Ok(bytes) => (
            status,
            [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
            bytes,
        )
            .into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> wirelay::Result<T> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Deserialize)]
pub struct SessionQuery {
    #[serde(default = "default_session")]
    session: String,
}

fn default_session() -> String {
    "default".into()
}

pub fn router(state: Arc<AppState>) -> Router {
    let v1 = Router::new()
        .route("/health", get(health))
        .route("/mesh", get(mesh))
        .route("/heatmap", get(heatmap))
        .route("/terminals", post(set_terminals))
        .route("/solve", post(solve_handler))
        .route("/compare", get(compare));
    Router::new().nest("/v1", v1).with_state(state)
}

/// Binds, starts the background analysis and serves until interrupted.
pub async fn serve(cfg: ProjectConfig, host: &str, port: u16) -> anyhow::Result<()> {
    let state = AppState::new(cfg);
    tokio::spawn(state.clone().compute());
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    log::info!("listening on http://{}/v1", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    field: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_key: Option<String>,
}

async fn health(State(s): State<Arc<AppState>>) -> Response {
    let (field, cache_key) = match &*s.field.read().unwrap() {
        Field::Computing => ("computing", None),
        Field::Ready(a) => ("ready", Some(a.cache_key())),
        Field::Failed(_) => ("failed", None),
    };
    json_response(
        StatusCode::OK,
        &Health {
            status: "ok",
            field,
            cache_key,
        },
    )
}

#[derive(Serialize)]
struct PieceOutline {
    piece: usize,
    outline: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct MeshBody {
    vertices: Vec<[f64; 2]>,
    faces: Vec<[usize; 3]>,
    face_piece: Vec<usize>,
    pieces: Vec<PieceOutline>,
}

async fn mesh(State(s): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let a = s.analysis()?;
    let m = &a.mesh;
    let uv = |v: usize| [m.pattern()[v].x, m.pattern()[v].y];
    let body = MeshBody {
        vertices: (0..m.vertex_count()).map(uv).collect(),
        faces: m.faces().to_vec(),
        face_piece: (0..m.face_count()).map(|f| m.face_piece(f)).collect(),
        pieces: m
            .boundary_loops()
            .into_iter()
            .map(|(piece, cycle)| PieceOutline {
                piece,
                outline: cycle.into_iter().map(uv).collect(),
            })
            .collect(),
    };
    Ok(json_response(StatusCode::OK, &body))
}

#[derive(Serialize)]
struct HeatmapBody<'a> {
    density: &'a [f64],
    #[serde(flatten)]
    bins: LogBins,
}

async fn heatmap(State(s): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let a = s.analysis()?;
    let body = HeatmapBody {
        density: &a.field.per_face,
        bins: log_bins(&a.field.per_face, HEATMAP_BINS),
    };
    Ok(json_response(StatusCode::OK, &body))
}

/// A terminal set, a bare list of terminals, or a list of vertex ids.
#[derive(Deserialize)]
#[serde(untagged)]
enum TerminalsPayload {
    Set(TerminalSet),
    List(Vec<Terminal>),
    Vertices(Vec<usize>),
}

#[derive(Serialize)]
struct TerminalsReply<'a> {
    session: &'a str,
    terminals: &'a TerminalSet,
    vertices: &'a [usize],
}

async fn set_terminals(
    State(s): State<Arc<AppState>>,
    Query(q): Query<SessionQuery>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let a = s.analysis()?;
    let set = match parse_body::<TerminalsPayload>(&body)? {
        TerminalsPayload::Set(t) => t,
        TerminalsPayload::List(terminals) => TerminalSet { terminals },
        TerminalsPayload::Vertices(v) => TerminalSet::from_vertices(v),
    };
    let key = serde_json::to_string(&set).map_err(|e| ApiError::Internal(e.to_string()))?;
    let cached = s.resolved.lock().unwrap().get(&key).cloned();
    let resolved = match cached {
        Some(r) => r,
        None => {
            let t = set.clone();
            let r = blocking(move || {
                let (ra, ids) = a.resolve(&t)?;
                let analysis = match ra {
                    std::borrow::Cow::Borrowed(_) => a.clone(),
                    std::borrow::Cow::Owned(x) => Arc::new(x),
                };
                Ok(Resolved { analysis, ids })
            })
            .await?;
            let r = Arc::new(r);
            s.resolved.lock().unwrap().insert(key, r.clone());
            r
        }
    };
    let session = s.session(&q.session);
    session.data.lock().unwrap().terminals = Some((set.clone(), resolved.clone()));
    Ok(json_response(
        StatusCode::OK,
        &TerminalsReply {
            session: &q.session,
            terminals: &set,
            vertices: &resolved.ids,
        },
    ))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveRequest {
    #[serde(default)]
    baseline: bool,
    #[serde(default)]
    eta: Option<EtaSpec>,
}

fn session_terminals(session: &Session) -> Result<Arc<Resolved>, ApiError> {
    session
        .data
        .lock()
        .unwrap()
        .terminals
        .as_ref()
        .map(|(_, r)| r.clone())
        .ok_or_else(|| ApiError::BadRequest("no terminals set for this session".into()))
}

async fn solve_handler(
    State(s): State<Arc<AppState>>,
    Query(q): Query<SessionQuery>,
    body: Bytes,
) -> Result<Response, ApiError> {
    s.analysis()?;
    let req: SolveRequest = if body.iter().all(u8::is_ascii_whitespace) {
        SolveRequest::default()
    } else {
        parse_body(&body)?
    };
    if let Some(eta) = req.eta.and_then(|e| e.fixed(s.settings.sweep.scale)) {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(ApiError::BadRequest(format!("η must be non-negative, got {eta}")));
        }
    }
    let session = s.session(&q.session);
    session_terminals(&session)?;
    let id = {
        let mut d = session.data.lock().unwrap();
        d.latest += 1;
        d.latest
    };
    let _running = session.runner.clone().lock_owned().await;
    let latest = session.data.lock().unwrap().latest;
    if latest != id {
        return Err(ApiError::Superseded { id, latest });
    }
    // Terminals may have been replaced while queued; use the current ones.
    let resolved = session_terminals(&session)?;
    let mut settings = s.settings;
    if let Some(eta) = req.eta {
        settings.eta = eta;
    }
    let baseline = req.baseline;
    let outcome: SolveOutcome =
        blocking(move || solve(&resolved.analysis, &resolved.ids, baseline, &settings)).await?;
    let mut resp = json_response(StatusCode::OK, &outcome);
    resp.headers_mut()
        .insert(SOLVE_ID_HEADER, HeaderValue::from(id));
    Ok(resp)
}

async fn compare(
    State(s): State<Arc<AppState>>,
    Query(q): Query<SessionQuery>,
) -> Result<Response, ApiError> {
    s.analysis()?;
    let resolved = session_terminals(&s.session(&q.session))?;
    let settings = s.settings;
    let report: ComparisonReport = blocking(move || {
        let a = &resolved.analysis;
        let b = solve(a, &resolved.ids, true, &settings)?;
        let w = solve(a, &resolved.ids, false, &settings)?;
        compare_layouts(
            &[("baseline".into(), &b.layout), ("weighted".into(), &w.layout)],
            &a.mesh,
            &a.field,
            &a.motions,
            settings.eval_eta,
        )
    })
    .await?;
    Ok(json_response(StatusCode::OK, &report))
}

//! HTTP review service: comparison sessions and the validate/delete workflow.

mod error;
mod store;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use com2match_core::correspondence::{link_view, Confidence, Decision, LinkKind, LinkView};
use com2match_core::engine::{compare_models, CompareConfig, ExportDocument};
use com2match_core::model::{parse_model, ElementKind, ModelIndex};
use com2match_core::resources::{load_ontology, Lexicon, Ontology, Resources};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorBody};
pub use store::{load_session, Session, SessionStore};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
}

/// Builds the API router; `ui_dir`, when given, is served at `/`.
pub fn router(store: Arc<SessionStore>, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(session_summary))
        .route("/sessions/{id}/links", get(list_links))
        .route(
            "/sessions/{id}/links/{link_id}/decision",
            post(post_decision),
        )
        .route("/sessions/{id}/export", get(export_session))
        .with_state(AppState { store });
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Where an input comes from: a file on the server or the document itself.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Source {
    Path(PathBuf),
    Inline(serde_json::Value),
}

impl Source {
    fn text(&self, what: &str) -> Result<String, ApiError> {
        match self {
            Source::Path(p) => std::fs::read_to_string(p).map_err(|e| {
                ApiError::invalid_input(format!("{what}: cannot read {}: {e}", p.display()))
            }),
            Source::Inline(serde_json::Value::String(s)) => Ok(s.clone()),
            Source::Inline(v) => Ok(v.to_string()),
        }
    }

    fn location(&self) -> String {
        match self {
            Source::Path(p) => p.display().to_string(),
            Source::Inline(_) => "inline".to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateSession {
    pub left: Source,
    pub right: Source,
    pub ontology: Option<Source>,
    pub synonyms: Option<Source>,
    pub abbreviations: Option<Source>,
    pub acronyms: Option<Source>,
    #[serde(default)]
    pub config: CompareConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionSummary {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub left_model: String,
    pub right_model: String,
    pub links: usize,
    pub pending: usize,
    pub decisions: usize,
}

impl From<&Session> for SessionSummary {
    fn from(s: &Session) -> Self {
        SessionSummary {
            id: s.id.clone(),
            created_at: s.created_at,
            left_model: s.left.id.clone(),
            right_model: s.right.id.clone(),
            links: s.wmodel.links.len(),
            pending: s.wmodel.pending_count(),
            decisions: s.audit.len(),
        }
    }
}

fn resources(req: &CreateSession) -> Result<Resources, ApiError> {
    let ontology = match &req.ontology {
        Some(src) => load_ontology(&src.text("ontology")?)
            .map_err(|e| ApiError::invalid_input(format!("ontology: {e}")))?,
        None => Ontology::empty(),
    };
    let lex_text =
        |src: &Option<Source>, what| src.as_ref().map_or(Ok(String::new()), |s| s.text(what));
    let lexicon = Lexicon::load(
        &lex_text(&req.synonyms, "synonyms")?,
        &lex_text(&req.abbreviations, "abbreviations")?,
        &lex_text(&req.acronyms, "acronyms")?,
    )
    .map_err(|e| ApiError::invalid_input(format!("lexicon: {e}")))?;
    Ok(Resources::new(ontology, lexicon))
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionSummary>), ApiError> {
    let req: CreateSession =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let left = parse_model(&req.left.text("left model")?)
        .map_err(|e| ApiError::invalid_input(format!("left model: {e}")))?;
    let right = parse_model(&req.right.text("right model")?)
        .map_err(|e| ApiError::invalid_input(format!("right model: {e}")))?;
    let res = resources(&req)?;
    let mut wm = compare_models(&left, &right, &res, &req.config)
        .map_err(|e| ApiError::invalid_input(e.to_string()))?;
    wm.left.location = req.left.location();
    wm.right.location = req.right.location();
    let handle = state.store.create(left, right, wm).await?;
    let session = handle.read().await;
    tracing::info!(session = %session.id, links = session.wmodel.links.len(), "session created");
    Ok((StatusCode::CREATED, Json(SessionSummary::from(&*session))))
}

async fn list_sessions(State(state): State<AppState>) -> Json<Vec<String>> {
    Json(state.store.ids().await)
}

async fn session_summary(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionSummary>, ApiError> {
    let handle = state.store.get(&id).await?;
    let session = handle.read().await;
    Ok(Json(SessionSummary::from(&*session)))
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkQuery {
    pub level: Option<String>,
    pub decision: Option<String>,
    pub kind: Option<String>,
    pub element_kind: Option<String>,
    pub offset: Option<String>,
    pub limit: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkPage {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub items: Vec<LinkView>,
}

const DEFAULT_LIMIT: usize = 100;
const MAX_LIMIT: usize = 1000;

enum LevelFilter {
    Confidence(Confidence),
    Level(String),
}

fn parse_param<T>(
    name: &str,
    value: &Option<String>,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Option<T>, ApiError> {
    value
        .as_deref()
        .map(|v| parse(v).ok_or_else(|| ApiError::bad_request(format!("invalid {name} `{v}`"))))
        .transpose()
}

fn filter_views(views: Vec<LinkView>, q: &LinkQuery) -> Result<LinkPage, ApiError> {
    let level = parse_param("level", &q.level, |v| {
        v.parse::<Confidence>()
            .map(LevelFilter::Confidence)
            .ok()
            .or_else(|| {
                matches!(v, "1" | "2" | "3" | "4").then(|| LevelFilter::Level(v.to_string()))
            })
    })?;
    let decision = parse_param("decision", &q.decision, |v| v.parse::<Decision>().ok())?;
    let kind = parse_param("kind", &q.kind, |v| v.parse::<LinkKind>().ok())?;
    let element_kind = parse_param("elementKind", &q.element_kind, |v| {
        v.parse::<ElementKind>().ok()
    })?;
    let offset = parse_param("offset", &q.offset, |v| v.parse::<usize>().ok())?.unwrap_or(0);
    let limit = parse_param("limit", &q.limit, |v| {
        v.parse::<usize>().ok().filter(|n| *n <= MAX_LIMIT)
    })?
    .unwrap_or(DEFAULT_LIMIT);

    let matching: Vec<LinkView> = views
        .into_iter()
        .filter(|v| match &level {
            Some(LevelFilter::Confidence(c)) => v.confidence == *c,
            Some(LevelFilter::Level(n)) => v.level.split(':').next() == Some(n.as_str()),
            None => true,
        })
        .filter(|v| decision.is_none_or(|d| v.decision == d))
        .filter(|v| kind.is_none_or(|k| v.kind == k))
        .filter(|v| element_kind.is_none_or(|k| v.element_kind == k))
        .collect();
    Ok(LinkPage {
        total: matching.len(),
        offset,
        limit,
        items: matching.into_iter().skip(offset).take(limit).collect(),
    })
}

fn views(session: &Session) -> Vec<LinkView> {
    let (l, r) = (
        ModelIndex::new(&session.left),
        ModelIndex::new(&session.right),
    );
    session
        .wmodel
        .links
        .iter()
        .map(|link| link_view(link, &l, &r))
        .collect()
}

async fn list_links(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<LinkQuery>,
) -> Result<Json<LinkPage>, ApiError> {
    let handle = state.store.get(&id).await?;
    let session = handle.read().await;
    Ok(Json(filter_views(views(&session), &q)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionRequest {
    pub decision: String,
    pub actor: String,
}

async fn post_decision(
    State(state): State<AppState>,
    UrlPath((id, link_id)): UrlPath<(String, String)>,
    body: Bytes,
) -> Result<Json<LinkView>, ApiError> {
    let req: DecisionRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let decision = match req.decision.as_str() {
        "validated" => Decision::Validated,
        "deleted" => Decision::Deleted,
        other => {
            return Err(ApiError::bad_request(format!(
                "decision must be `validated` or `deleted`, got `{other}`"
            )))
        }
    };
    let handle = state
        .store
        .decide(&id, &link_id, decision, &req.actor)
        .await?;
    let session = handle.read().await;
    let view = views(&session)
        .into_iter()
        .find(|v| v.link_id == link_id)
        .ok_or_else(|| ApiError::not_found(format!("link `{link_id}`")))?;
    tracing::info!(session = %id, link = %link_id, decision = %decision, actor = %req.actor, "decision recorded");
    Ok(Json(view))
}

async fn export_session(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<ExportDocument>, ApiError> {
    let handle = state.store.get(&id).await?;
    let session = handle.read().await;
    Ok(Json(session.export()?))
}

/// Serves the API (and the UI bundle, if any) until the process is stopped.
pub async fn serve(addr: &str, data_dir: &Path, ui_dir: Option<&Path>) -> std::io::Result<()> {
    let store = SessionStore::open(data_dir).map_err(|e| std::io::Error::other(e.body.detail))?;
    let app = router(Arc::new(store), ui_dir);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "review service listening");
    axum::serve(listener, app).await
}

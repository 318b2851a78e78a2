//! Sessions on disk: the initial correspondence plus an append-only audit log.
//!
//! Layout per session directory:
//! `meta.json`, `left.json`, `right.json`, `initial.json`, `audit.jsonl`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use com2match_core::correspondence::{
    apply_decision, parse_audit_log, parse_correspondence, replay, serialize_correspondence,
    AuditEntry, CorrespondenceError, Decision, WModel,
};
use com2match_core::engine::{export_document, ExportDocument};
use com2match_core::model::{parse_model, serialize_model, Model};
use serde::{Deserialize, Serialize};
use tokio::io::AsyncWriteExt;
use tokio::sync::{Mutex, RwLock};

use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub left: Model,
    pub right: Model,
    pub initial: WModel,
    pub wmodel: WModel,
    pub audit: Vec<AuditEntry>,
}

impl Session {
    pub fn export(&self) -> Result<ExportDocument, ApiError> {
        export_document(&self.wmodel, &self.left, &self.right)
            .map_err(|e| ApiError::internal(e.to_string()))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Meta {
    id: String,
    created_at: DateTime<Utc>,
}

pub struct SessionStore {
    root: PathBuf,
    sessions: RwLock<BTreeMap<String, Arc<RwLock<Session>>>>,
    create_lock: Mutex<()>,
}

fn io_error(path: &Path, e: std::io::Error) -> ApiError {
    ApiError::internal(format!("{}: {e}", path.display()))
}

impl SessionStore {
    /// Opens a store rooted at `root`, replaying every persisted session.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| io_error(&root, e))?;
        let mut sessions = BTreeMap::new();
        let entries = std::fs::read_dir(&root).map_err(|e| io_error(&root, e))?;
        for entry in entries {
            let dir = entry.map_err(|e| io_error(&root, e))?.path();
            if dir.join("meta.json").is_file() {
                let session = load_session(&dir)?;
                sessions.insert(session.id.clone(), Arc::new(RwLock::new(session)));
            }
        }
        Ok(SessionStore {
            root,
            sessions: RwLock::new(sessions),
            create_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub async fn ids(&self) -> Vec<String> {
        self.sessions.read().await.keys().cloned().collect()
    }

    pub async fn get(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("session `{id}`")))
    }

    pub async fn create(
        &self,
        left: Model,
        right: Model,
        wmodel: WModel,
    ) -> Result<Arc<RwLock<Session>>, ApiError> {
        let _guard = self.create_lock.lock().await;
        let n = self.sessions.read().await.len();
        let id = (n + 1..)
            .map(|i| format!("S{i:04}"))
            .find(|id| !self.root.join(id).exists())
            .expect("unbounded range");
        let dir = self.root.join(&id);
        let session = Session {
            id: id.clone(),
            created_at: Utc::now(),
            left,
            right,
            initial: wmodel.clone(),
            wmodel,
            audit: Vec::new(),
        };
        let meta = Meta {
            id: id.clone(),
            created_at: session.created_at,
        };
        let files = [
            ("left.json", serialize_model(&session.left)),
            ("right.json", serialize_model(&session.right)),
            ("initial.json", serialize_correspondence(&session.initial)),
            ("audit.jsonl", String::new()),
            (
                "meta.json",
                serde_json::to_string_pretty(&meta).expect("meta serializes"),
            ),
        ];
        tokio::fs::create_dir_all(&dir)
            .await
            .map_err(|e| io_error(&dir, e))?;
        for (name, text) in files {
            let path = dir.join(name);
            tokio::fs::write(&path, text)
                .await
                .map_err(|e| io_error(&path, e))?;
        }
        let session = Arc::new(RwLock::new(session));
        self.sessions.write().await.insert(id, session.clone());
        Ok(session)
    }

    /// Applies a decision, persisting the audit entry before updating memory.
    pub async fn decide(
        &self,
        id: &str,
        link_id: &str,
        decision: Decision,
        actor: &str,
    ) -> Result<Arc<RwLock<Session>>, ApiError> {
        let handle = self.get(id).await?;
        let mut session = handle.write().await;
        let (next, entry) = apply_decision(&session.wmodel, link_id, decision, actor, Utc::now())?;
        let path = self.root.join(id).join("audit.jsonl");
        let mut file = tokio::fs::OpenOptions::new()
            .append(true)
            .create(true)
            .open(&path)
            .await
            .map_err(|e| io_error(&path, e))?;
        file.write_all(entry.to_line().as_bytes())
            .await
            .map_err(|e| io_error(&path, e))?;
        file.sync_data().await.map_err(|e| io_error(&path, e))?;
        session.wmodel = next;
        session.audit.push(entry);
        drop(session);
        Ok(handle)
    }
}

fn read(dir: &Path, name: &str) -> Result<String, ApiError> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|e| io_error(&path, e))
}

fn corrupt(dir: &Path, e: impl std::fmt::Display) -> ApiError {
    ApiError::internal(format!("session {}: {e}", dir.display()))
}

/// Rebuilds a session from its directory by replaying the audit log.
pub fn load_session(dir: &Path) -> Result<Session, ApiError> {
    let meta: Meta = serde_json::from_str(&read(dir, "meta.json")?).map_err(|e| corrupt(dir, e))?;
    let left = parse_model(&read(dir, "left.json")?).map_err(|e| corrupt(dir, e))?;
    let right = parse_model(&read(dir, "right.json")?).map_err(|e| corrupt(dir, e))?;
    let initial = parse_correspondence(&read(dir, "initial.json")?).map_err(|e| corrupt(dir, e))?;
    let audit = parse_audit_log(&read(dir, "audit.jsonl")?).map_err(|e| corrupt(dir, e))?;
    let wmodel = replay(&initial, &audit).map_err(|e: CorrespondenceError| corrupt(dir, e))?;
    Ok(Session {
        id: meta.id,
        created_at: meta.created_at,
        left,
        right,
        initial,
        wmodel,
        audit,
    })
}

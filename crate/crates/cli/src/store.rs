//! Content-addressed artifact store, kept in memory and optionally mirrored
//! to a directory.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::sync::RwLock;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Automaton,
    Certificate,
    Refuter,
    Session,
}

impl Kind {
    pub fn extension(self) -> &'static str {
        match self {
            Kind::Automaton => "hoa",
            Kind::Certificate => "cert.json",
            Kind::Refuter => "refuter.json",
            Kind::Session => "session.json",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            Kind::Automaton => "text/plain; charset=utf-8",
            _ => "application/json",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub kind: Kind,
    pub content: String,
}

/// Hex sha256 of `text`.
pub fn content_id(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Default)]
pub struct ArtifactStore {
    items: RwLock<HashMap<String, Artifact>>,
    dir: Option<PathBuf>,
}

impl ArtifactStore {
    pub fn new(dir: Option<PathBuf>) -> Self {
        ArtifactStore {
            items: RwLock::new(HashMap::new()),
            dir,
        }
    }

    /// Stores `content` and returns its id; storing the same text twice is a no-op.
    pub fn put(&self, kind: Kind, content: String) -> std::io::Result<String> {
        let id = content_id(&content);
        if self.items.read().unwrap().contains_key(&id) {
            return Ok(id);
        }
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{id}.{}", kind.extension())), &content)?;
        }
        self.items.write().unwrap().insert(id.clone(), Artifact { kind, content });
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Option<Artifact> {
        self.items.read().unwrap().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.items.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{normalize_text, ChatBackend, ChatRequest, LlmError};

const SUMMARY_CHARS: usize = 120;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub digest: String,
    /// Start of the last user message, for human reviewers only.
    pub request_summary: String,
    pub response: String,
}

/// Canned responses keyed by request digest. On disk this is a JSON array
/// of [`FixtureEntry`] in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureStore {
    entries: Vec<FixtureEntry>,
    index: HashMap<String, usize>,
}

impl FixtureStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<FixtureEntry>) -> Self {
        let mut store = FixtureStore::new();
        for e in entries {
            store.upsert(e);
        }
        store
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(Self::from_entries(serde_json::from_str(text)?))
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.entries).expect("fixture entries serialize");
        text.push('\n');
        text
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_json())
    }

    pub fn entries(&self) -> &[FixtureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, digest: &str) -> Option<&str> {
        self.index.get(digest).map(|&i| self.entries[i].response.as_str())
    }

    /// Inserts or replaces the entry with the same digest.
    pub fn upsert(&mut self, entry: FixtureEntry) {
        match self.index.get(&entry.digest) {
            Some(&i) => self.entries[i] = entry,
            None => {
                self.index.insert(entry.digest.clone(), self.entries.len());
                self.entries.push(entry);
            }
        }
    }

    pub fn record(&mut self, request: &ChatRequest, response: &str) {
        let summary: String = normalize_text(request.last_user_message()).chars().take(SUMMARY_CHARS).collect();
        self.upsert(FixtureEntry { digest: request.digest(), request_summary: summary, response: response.to_string() });
    }
}

/// Answers only from fixtures; an unknown request is a [`LlmError::FixtureMiss`].
#[derive(Debug, Clone)]
pub struct ReplayBackend {
    store: FixtureStore,
}

impl ReplayBackend {
    pub fn new(store: FixtureStore) -> Self {
        ReplayBackend { store }
    }

    pub fn store(&self) -> &FixtureStore {
        &self.store
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        request.validate()?;
        let digest = request.digest();
        self.store.get(&digest).map(str::to_string).ok_or(LlmError::FixtureMiss { digest })
    }
}

/// Forwards to another backend and records every answer.
pub struct RecordingBackend<B> {
    inner: B,
    store: Mutex<FixtureStore>,
}

impl<B: ChatBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        Self::with_store(inner, FixtureStore::new())
    }

    /// Records on top of existing fixtures.
    pub fn with_store(inner: B, store: FixtureStore) -> Self {
        RecordingBackend { inner, store: Mutex::new(store) }
    }

    pub fn snapshot(&self) -> FixtureStore {
        self.store.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn into_store(self) -> FixtureStore {
        self.store.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}

impl<B: ChatBackend> ChatBackend for RecordingBackend<B> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let response = self.inner.complete(request)?;
        self.store.lock().unwrap_or_else(|e| e.into_inner()).record(request, &response);
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::FnBackend;

    #[test]
    fn replay_hits_and_misses() {
        let req = ChatRequest::new("sys", "tell me a story", 0.7);
        let mut store = FixtureStore::new();
        store.record(&req, "Once upon a time.");
        let backend = ReplayBackend::new(store);
        assert_eq!(backend.complete(&req).unwrap(), "Once upon a time.");
        assert_eq!(backend.complete(&req).unwrap(), backend.complete(&req).unwrap());
        let other = ChatRequest::new("sys", "another", 0.7);
        assert_eq!(backend.complete(&other), Err(LlmError::FixtureMiss { digest: other.digest() }));
    }

    #[test]
    fn recording_then_replaying_round_trips_through_json() {
        let recorder = RecordingBackend::new(FnBackend(|r: &ChatRequest| Ok(format!("echo {}", r.last_user_message()))));
        let a = ChatRequest::new("s", "one", 0.7);
        let b = ChatRequest::new("s", "two", 0.0);
        recorder.complete(&a).unwrap();
        recorder.complete(&b).unwrap();
        let json = recorder.into_store().to_json();
        let store = FixtureStore::from_json(&json).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.entries()[0].request_summary, "one");
        let replay = ReplayBackend::new(store);
        assert_eq!(replay.complete(&b).unwrap(), "echo two");
    }
}

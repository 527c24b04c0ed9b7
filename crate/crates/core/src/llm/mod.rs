//! Chat-completion gateway: one request shape, a live OpenAI-compatible
//! HTTP backend, and replay/record fixture backends for offline runs.

mod digest;
mod fixture;
mod live;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use digest::{normalize_text, request_digest};
pub use fixture::{FixtureEntry, FixtureStore, RecordingBackend, ReplayBackend};
pub use live::{
    HttpResponse, HttpTransport, LiveClient, LiveConfig, RetryPolicy, TransportError, UreqTransport, DEFAULT_ENDPOINT,
    DEFAULT_MODEL, ENV_API_KEY, ENV_ENDPOINT, ENV_MODEL, MAX_ATTEMPTS,
};

/// Sampling temperature for creative calls (mapping, story writing).
pub const GENERATION_TEMPERATURE: f32 = 0.7;
/// Sampling temperature for extraction calls (simplify, translate).
pub const EXTRACTION_TEMPERATURE: f32 = 0.0;
pub const DEFAULT_MAX_TOKENS: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f32,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub fn new(system_prompt: impl Into<String>, user: impl Into<String>, temperature: f32) -> Self {
        ChatRequest {
            system_prompt: system_prompt.into(),
            messages: vec![ChatMessage::user(user)],
            temperature,
            max_tokens: DEFAULT_MAX_TOKENS,
        }
    }

    /// Appends an assistant turn and a follow-up user turn.
    pub fn follow_up(mut self, assistant: impl Into<String>, user: impl Into<String>) -> Self {
        self.messages.push(ChatMessage::assistant(assistant));
        self.messages.push(ChatMessage::user(user));
        self
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        let invalid = |m: &str| Err(LlmError::InvalidRequest { message: m.to_string() });
        if self.messages.is_empty() {
            return invalid("request has no messages");
        }
        for (i, m) in self.messages.iter().enumerate() {
            let expected = if i % 2 == 0 { Role::User } else { Role::Assistant };
            if m.role != expected {
                return invalid("roles must alternate starting with user");
            }
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return invalid("temperature must be within [0, 2]");
        }
        if self.max_tokens == 0 {
            return invalid("max_tokens must be positive");
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        request_digest(self)
    }

    pub fn last_user_message(&self) -> &str {
        self.messages.iter().rev().find(|m| m.role == Role::User).map_or("", |m| m.content.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Transport,
    Auth,
    RateLimit,
    Http,
    Malformed,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Transport => "transport",
            FailureKind::Auth => "auth",
            FailureKind::RateLimit => "rate-limit",
            FailureKind::Http => "http",
            FailureKind::Malformed => "malformed response",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum LlmError {
    #[error("backend failure ({kind}): {message}")]
    BackendFailure { kind: FailureKind, message: String },
    #[error("no fixture for request digest {digest}")]
    FixtureMiss { digest: String },
    #[error("invalid chat request: {message}")]
    InvalidRequest { message: String },
}

/// Anything that can answer a chat request. Implementations are safe to
/// call from several threads.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError>;
}

impl<T: ChatBackend + ?Sized> ChatBackend for &T {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

impl<T: ChatBackend + ?Sized> ChatBackend for Box<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

/// Backend driven by a closure; handy for scripted fixtures and tests.
pub struct FnBackend<F>(pub F);

impl<F> ChatBackend for FnBackend<F>
where
    F: Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync,
{
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        request.validate()?;
        (self.0)(request)
    }
}

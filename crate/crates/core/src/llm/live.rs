use std::env;
use std::fmt;
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::{ChatBackend, ChatRequest, FailureKind, LlmError};

pub const ENV_ENDPOINT: &str = "IMAGIPLAY_LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "IMAGIPLAY_LLM_API_KEY";
pub const ENV_MODEL: &str = "IMAGIPLAY_LLM_MODEL";

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";
/// Hard ceiling on attempts per request, whatever the policy says.
pub const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveConfig {
    /// Full URL of an OpenAI-compatible `chat/completions` endpoint.
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            api_key: None,
            model: DEFAULT_MODEL.to_string(),
            timeout: Duration::from_secs(60),
        }
    }
}

impl LiveConfig {
    /// Defaults overridden by whichever environment variables are set.
    pub fn from_env() -> Self {
        let mut config = LiveConfig::default();
        if let Ok(v) = env::var(ENV_ENDPOINT) {
            config.endpoint = v;
        }
        config.api_key = env::var(ENV_API_KEY).ok().filter(|k| !k.is_empty());
        if let Ok(v) = env::var(ENV_MODEL) {
            config.model = v;
        }
        config
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    pub multiplier: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: MAX_ATTEMPTS, initial_backoff: Duration::from_millis(500), multiplier: 2 }
    }
}

impl RetryPolicy {
    pub fn no_delay() -> Self {
        RetryPolicy { initial_backoff: Duration::ZERO, ..RetryPolicy::default() }
    }

    pub fn attempts(&self) -> u32 {
        self.max_attempts.clamp(1, MAX_ATTEMPTS)
    }

    /// Delay before attempt `attempt + 1`, where the first attempt is 0.
    pub fn backoff(&self, attempt: u32) -> Duration {
        self.initial_backoff * self.multiplier.saturating_pow(attempt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Connection-level failure: DNS, refused connection, timeout, broken body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportError(pub String);

impl fmt::Display for TransportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for TransportError {}

pub trait HttpTransport: Send + Sync {
    fn post_json(&self, url: &str, headers: &[(String, String)], body: &str, timeout: Duration)
        -> Result<HttpResponse, TransportError>;
}

/// Blocking transport on top of ureq.
#[derive(Debug, Default, Clone, Copy)]
pub struct UreqTransport;

impl HttpTransport for UreqTransport {
    fn post_json(&self, url: &str, headers: &[(String, String)], body: &str, timeout: Duration)
        -> Result<HttpResponse, TransportError> {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        let mut req = agent.post(url).header("Content-Type", "application/json");
        for (k, v) in headers {
            req = req.header(k.as_str(), v.as_str());
        }
        let resp = req.send(body).map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.into_body().read_to_string().map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

pub struct LiveClient<T = UreqTransport> {
    config: LiveConfig,
    transport: T,
    retry: RetryPolicy,
}

impl LiveClient<UreqTransport> {
    pub fn new(config: LiveConfig) -> Self {
        LiveClient::with_transport(config, UreqTransport)
    }
}

impl<T: HttpTransport> LiveClient<T> {
    pub fn with_transport(config: LiveConfig, transport: T) -> Self {
        LiveClient { config, transport, retry: RetryPolicy::default() }
    }

    pub fn retry_policy(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn config(&self) -> &LiveConfig {
        &self.config
    }

    pub fn request_body(&self, request: &ChatRequest) -> Value {
        let mut messages = vec![json!({"role": "system", "content": request.system_prompt})];
        messages.extend(request.messages.iter().map(|m| json!({"role": m.role.as_str(), "content": m.content})));
        json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        })
    }

    fn attempt(&self, headers: &[(String, String)], body: &str) -> Result<String, (LlmError, bool)> {
        let resp = self
            .transport
            .post_json(&self.config.endpoint, headers, body, self.config.timeout)
            .map_err(|e| (failure(FailureKind::Transport, e.0), true))?;
        match resp.status {
            200..=299 => parse_completion(&resp.body).map_err(|e| (e, false)),
            401 | 403 => Err((failure(FailureKind::Auth, status_message(&resp)), false)),
            429 => Err((failure(FailureKind::RateLimit, status_message(&resp)), true)),
            500..=599 => Err((failure(FailureKind::Http, status_message(&resp)), true)),
            _ => Err((failure(FailureKind::Http, status_message(&resp)), false)),
        }
    }
}

impl<T: HttpTransport> ChatBackend for LiveClient<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        request.validate()?;
        let body = self.request_body(request).to_string();
        let mut headers = Vec::new();
        if let Some(key) = &self.config.api_key {
            headers.push(("Authorization".to_string(), format!("Bearer {key}")));
        }
        let attempts = self.retry.attempts();
        let mut attempt = 0;
        loop {
            match self.attempt(&headers, &body) {
                Ok(text) => return Ok(text),
                Err((err, transient)) => {
                    attempt += 1;
                    if !transient || attempt >= attempts {
                        return Err(err);
                    }
                    let delay = self.retry.backoff(attempt - 1);
                    if !delay.is_zero() {
                        thread::sleep(delay);
                    }
                }
            }
        }
    }
}

fn failure(kind: FailureKind, message: impl Into<String>) -> LlmError {
    LlmError::BackendFailure { kind, message: message.into() }
}

fn status_message(resp: &HttpResponse) -> String {
    let snippet: String = resp.body.chars().take(200).collect();
    format!("HTTP {}: {}", resp.status, snippet.trim())
}

fn parse_completion(body: &str) -> Result<String, LlmError> {
    let value: Value = serde_json::from_str(body).map_err(|e| failure(FailureKind::Malformed, e.to_string()))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| failure(FailureKind::Malformed, "missing choices[0].message.content"))
}

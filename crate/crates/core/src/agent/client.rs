//! Chat-completion contract and a scripted replay client.

use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChatConfig {
    pub model: String,
    pub temperature: f64,
    pub system_prompt: Option<String>,
}

impl Default for ChatConfig {
    fn default() -> Self {
        ChatConfig { model: "mock".into(), temperature: 1.0, system_prompt: None }
    }
}

impl ChatConfig {
    pub fn request(&self, user: impl Into<String>) -> ChatRequest {
        let mut messages: Vec<ChatMessage> = self.system_prompt.iter().map(ChatMessage::system).collect();
        messages.push(ChatMessage::user(user));
        ChatRequest { model: self.model.clone(), temperature: self.temperature, messages }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportError {
    /// Worth one retry (timeouts, rate limits, 5xx).
    #[error("transient transport failure: {0}")]
    Transient(String),
    #[error("transport failure: {0}")]
    Fatal(String),
}

/// A synchronous chat-completion endpoint.
pub trait ChatClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError>;
}

/// Sends `request`, retrying once after a transient failure.
pub fn complete_with_retry(client: &dyn ChatClient, request: &ChatRequest) -> Result<String, TransportError> {
    match client.complete(request) {
        Err(TransportError::Transient(first)) => {
            log::warn!("retrying after transient failure: {first}");
            client.complete(request)
        }
        other => other,
    }
}

/// Replays a fixed list of responses, one per call, in order.
#[derive(Debug, Default)]
pub struct MockClient {
    responses: Vec<Result<String, TransportError>>,
    turn: AtomicUsize,
    requests: Mutex<Vec<ChatRequest>>,
}

impl MockClient {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        Self::with_results(responses.into_iter().map(|s| Ok(s.into())))
    }

    pub fn with_results(responses: impl IntoIterator<Item = Result<String, TransportError>>) -> Self {
        MockClient { responses: responses.into_iter().collect(), ..Default::default() }
    }

    pub fn turns_used(&self) -> usize {
        self.turn.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.requests.lock().expect("request log").clone()
    }
}

impl ChatClient for MockClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        self.requests.lock().expect("request log").push(request.clone());
        let i = self.turn.fetch_add(1, Ordering::SeqCst);
        self.responses.get(i).cloned().unwrap_or_else(|| Err(TransportError::Fatal(format!("script exhausted at turn {i}"))))
    }
}

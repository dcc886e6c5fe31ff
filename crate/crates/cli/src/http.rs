use std::time::Duration;

use itinbench::agent::{ChatClient, ChatRequest, TransportError};
use serde_json::{json, Value};

pub const BASE_URL_VAR: &str = "ITINBENCH_API_BASE";
pub const API_KEY_VAR: &str = "ITINBENCH_API_KEY";

/// Client for an OpenAI-compatible `/chat/completions` endpoint.
pub struct HttpClient {
    agent: ureq::Agent,
    url: String,
    key: String,
}

impl HttpClient {
    pub fn from_env() -> anyhow::Result<Self> {
        let base = std::env::var(BASE_URL_VAR).map_err(|_| anyhow::anyhow!("{BASE_URL_VAR} is not set"))?;
        let key = std::env::var(API_KEY_VAR).map_err(|_| anyhow::anyhow!("{API_KEY_VAR} is not set"))?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(300)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(HttpClient { agent, url: format!("{}/chat/completions", base.trim_end_matches('/')), key })
    }
}

fn content(body: &Value) -> Option<String> {
    body.pointer("/choices/0/message/content")?.as_str().map(str::to_owned)
}

impl ChatClient for HttpClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let body = json!({
            "model": request.model,
            "temperature": request.temperature,
            "messages": request.messages,
        });
        let mut resp = self
            .agent
            .post(&self.url)
            .header("Authorization", &format!("Bearer {}", self.key))
            .send_json(&body)
            .map_err(|e| TransportError::Transient(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| TransportError::Transient(e.to_string()))?;
        match status {
            200..=299 => {
                let v: Value = serde_json::from_str(&text).map_err(|e| TransportError::Fatal(format!("bad response body: {e}")))?;
                content(&v).ok_or_else(|| TransportError::Fatal("response has no message content".into()))
            }
            408 | 429 | 500..=599 => Err(TransportError::Transient(format!("HTTP {status}: {text}"))),
            _ => Err(TransportError::Fatal(format!("HTTP {status}: {text}"))),
        }
    }
}

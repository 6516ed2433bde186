use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ModelParams, Source};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Network failure, rate limiting or a server error; worth retrying.
    #[error("transient transport failure: {0}")]
    Transient(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("malformed endpoint reply: {0}")]
    Malformed(String),
}

/// Something that turns a prompt into a completion.
pub trait Transport: Send + Sync {
    fn send(&self, params: &ModelParams, prompt: &str) -> Result<String, TransportError>;

    fn source(&self) -> Source;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub contains: String,
    pub respond: String,
}

impl MockRule {
    pub fn new(contains: impl Into<String>, respond: impl Into<String>) -> Self {
        MockRule {
            contains: contains.into(),
            respond: respond.into(),
        }
    }
}

/// Keyword-rule transport. The first rule whose keyword occurs in the prompt
/// (case-insensitive) answers; otherwise the default response is returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockTransport {
    pub rules: Vec<MockRule>,
    pub default_response: String,
}

impl MockTransport {
    pub fn new(rules: Vec<MockRule>, default_response: impl Into<String>) -> Self {
        MockTransport {
            rules,
            default_response: default_response.into(),
        }
    }

    /// A small emotion-keyword rule set used by `--mock`.
    pub fn builtin() -> Self {
        let rules = [
            ("furious", "[anger]"),
            ("angry", "[anger]"),
            ("yelled", "[anger]"),
            ("hate", "[anger]"),
            ("wonderful", "[happiness]"),
            ("great", "[happiness]"),
            ("love", "[happiness]"),
            ("happy", "[happiness]"),
            ("sorry", "[sadness]"),
            ("miss", "[sadness]"),
            ("cry", "[sadness]"),
            ("sad", "[sadness]"),
        ]
        .into_iter()
        .map(|(k, v)| MockRule::new(k, v))
        .collect();
        MockTransport::new(rules, "[neutral]")
    }

    pub fn respond(&self, prompt: &str) -> &str {
        let haystack = prompt.to_lowercase();
        self.rules
            .iter()
            .find(|r| haystack.contains(&r.contains.to_lowercase()))
            .map(|r| r.respond.as_str())
            .unwrap_or(&self.default_response)
    }
}

impl Transport for MockTransport {
    fn send(&self, _params: &ModelParams, prompt: &str) -> Result<String, TransportError> {
        Ok(self.respond(prompt).to_string())
    }

    fn source(&self) -> Source {
        Source::Mock
    }
}

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com";
pub const DEFAULT_PATH: &str = "/v1/chat/completions";
pub const DEFAULT_KEY_VAR: &str = "OPENAI_API_KEY";

/// Chat-completions client (system + user message list).
pub struct HttpTransport {
    endpoint: String,
    api_key: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("endpoint", &self.endpoint).finish_non_exhaustive()
    }
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

impl HttpTransport {
    pub fn new(base_url: &str, path: &str, api_key: String, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpTransport {
            endpoint: format!("{}{}", base_url.trim_end_matches('/'), path),
            api_key,
            agent,
        }
    }

    /// Reads the credential from `key_var`.
    pub fn from_env(base_url: &str, path: &str, key_var: &str, timeout: Duration) -> Result<Self, TransportError> {
        match std::env::var(key_var) {
            Ok(key) if !key.trim().is_empty() => Ok(Self::new(base_url, path, key, timeout)),
            _ => Err(TransportError::Auth(format!("environment variable {key_var} is not set"))),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

impl Transport for HttpTransport {
    fn send(&self, params: &ModelParams, prompt: &str) -> Result<String, TransportError> {
        let body = serde_json::json!({
            "model": params.model,
            "messages": [
                {"role": "system", "content": params.system_message},
                {"role": "user", "content": prompt},
            ],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "seed": params.seed,
        });
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| TransportError::Transient(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Transient(format!("reading body: {e}")))?;
        match status {
            200..=299 => {}
            401 | 403 => return Err(TransportError::Auth(format!("HTTP {status}"))),
            408 | 409 | 429 | 500..=599 => return Err(TransportError::Transient(format!("HTTP {status}"))),
            _ => return Err(TransportError::Malformed(format!("HTTP {status}: {}", snippet(&text)))),
        }
        let reply: ChatReply =
            serde_json::from_str(&text).map_err(|e| TransportError::Malformed(format!("{e}: {}", snippet(&text))))?;
        reply
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| TransportError::Malformed("reply has no message content".into()))
    }

    fn source(&self) -> Source {
        Source::Live
    }
}

fn snippet(text: &str) -> String {
    text.chars().take(200).collect()
}

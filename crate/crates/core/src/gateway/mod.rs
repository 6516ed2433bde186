//! Chat-completion dispatch with a persistent response cache.
//!
//! Requests are identified by a SHA-256 digest of the model parameters, the
//! prompt and a variant number (used for parse retries). The cache is the
//! reproducibility boundary: a warm journal answers every request without
//! touching the transport.

mod cache;
mod limit;
mod transport;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cache::{replay, JournalEntry, ResponseCache};
pub use limit::{InFlight, InFlightGuard, TokenBucket};
pub use transport::{
    HttpTransport, MockRule, MockTransport, Transport, TransportError, DEFAULT_BASE_URL, DEFAULT_KEY_VAR, DEFAULT_PATH,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub seed: u64,
    pub system_message: String,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            model: "gpt-4o".into(),
            temperature: 1.0,
            max_tokens: 250,
            seed: 42,
            system_message: "You are a helpful assistant.".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Live,
    Cache,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportStatus {
    Ok,
    /// Succeeded after at least one transient failure.
    Recovered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub digest: String,
    pub response: String,
    pub status: TransportStatus,
    pub latency_ms: u64,
    pub timestamp_ms: u64,
    /// Transport calls made for this request; 0 for cache hits.
    pub attempts: u32,
    pub source: Source,
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("request {digest}: gave up after {attempts} attempts: {last}")]
    RetriesExhausted { digest: String, attempts: u32, last: String },
    #[error("request {digest}: {message}")]
    Auth { digest: String, message: String },
    #[error("request {digest}: {message}")]
    Malformed { digest: String, message: String },
    #[error("request {digest}: writing cache journal: {source}")]
    Journal {
        digest: String,
        #[source]
        source: std::io::Error,
    },
}

impl GatewayError {
    pub fn digest(&self) -> &str {
        match self {
            GatewayError::RetriesExhausted { digest, .. }
            | GatewayError::Auth { digest, .. }
            | GatewayError::Malformed { digest, .. }
            | GatewayError::Journal { digest, .. } => digest,
        }
    }
}

#[derive(Serialize)]
struct DigestInput<'a> {
    params: &'a ModelParams,
    prompt: &'a str,
    variant: u32,
}

/// Hex SHA-256 of the canonical JSON of `(params, prompt, variant)`.
pub fn request_digest(params: &ModelParams, prompt: &str, variant: u32) -> String {
    let json = serde_json::to_vec(&DigestInput { params, prompt, variant }).expect("digest input serializes");
    hex::encode(Sha256::digest(&json))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub multiplier: f64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            initial_backoff_ms: 1000,
            multiplier: 2.0,
            max_backoff_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    /// Delay before attempt `attempt + 1`, `attempt` starting at 1.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.initial_backoff_ms as f64 * self.multiplier.powi(attempt.saturating_sub(1) as i32);
        Duration::from_millis(ms.min(self.max_backoff_ms as f64) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GatewayConfig {
    pub retry: RetryPolicy,
    /// Applied to live transports only. `None` disables limiting.
    pub requests_per_minute: Option<f64>,
    pub burst: u32,
    pub max_in_flight: usize,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            retry: RetryPolicy::default(),
            requests_per_minute: Some(30.0),
            burst: 1,
            max_in_flight: 4,
        }
    }
}

pub struct Gateway {
    transport: Arc<dyn Transport>,
    cache: ResponseCache,
    retry: RetryPolicy,
    limiter: Option<TokenBucket>,
    in_flight: InFlight,
    transport_calls: AtomicU64,
}

impl Gateway {
    pub fn new(transport: Arc<dyn Transport>, cache: ResponseCache, config: &GatewayConfig) -> Self {
        let limiter = match (transport.source(), config.requests_per_minute) {
            (Source::Live, Some(rpm)) if rpm > 0.0 => Some(TokenBucket::new(rpm, config.burst)),
            _ => None,
        };
        Gateway {
            transport,
            cache,
            retry: config.retry.clone(),
            limiter,
            in_flight: InFlight::new(config.max_in_flight),
            transport_calls: AtomicU64::new(0),
        }
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }

    /// Total calls made to the transport, including failed attempts.
    pub fn transport_calls(&self) -> u64 {
        self.transport_calls.load(Ordering::SeqCst)
    }

    pub fn complete(&self, prompt: &str, params: &ModelParams) -> Result<CompletionRecord, GatewayError> {
        self.complete_variant(prompt, params, 0)
    }

    /// Like [`Gateway::complete`], but `variant > 0` asks for a fresh completion
    /// cached under its own digest.
    pub fn complete_variant(
        &self,
        prompt: &str,
        params: &ModelParams,
        variant: u32,
    ) -> Result<CompletionRecord, GatewayError> {
        let digest = request_digest(params, prompt, variant);
        let started = Instant::now();
        if let Some(response) = self.cache.get(&digest) {
            return Ok(CompletionRecord {
                digest,
                response,
                status: TransportStatus::Ok,
                latency_ms: 0,
                timestamp_ms: now_ms(),
                attempts: 0,
                source: Source::Cache,
            });
        }

        let max_attempts = self.retry.max_attempts.max(1);
        let mut attempts = 0;
        let outcome = loop {
            attempts += 1;
            let result = {
                let _slot = self.in_flight.enter();
                if let Some(limiter) = &self.limiter {
                    limiter.acquire();
                }
                self.transport_calls.fetch_add(1, Ordering::SeqCst);
                self.transport.send(params, prompt)
            };
            match result {
                Err(TransportError::Transient(msg)) if attempts < max_attempts => {
                    let delay = self.retry.backoff(attempts);
                    log::warn!("request {}: attempt {attempts} failed ({msg}); retrying in {delay:?}", &digest[..12]);
                    std::thread::sleep(delay);
                }
                other => break other,
            }
        };

        let source = self.transport.source();
        let entry = JournalEntry {
            digest: digest.clone(),
            model: params.model.clone(),
            variant,
            response: outcome.as_ref().ok().cloned(),
            error: outcome.as_ref().err().map(ToString::to_string),
            attempts,
            source,
            timestamp_ms: now_ms(),
        };
        let stored = self.cache.record(&entry).map_err(|source| GatewayError::Journal {
            digest: digest.clone(),
            source,
        })?;

        match outcome {
            Ok(_) => Ok(CompletionRecord {
                response: stored.expect("successful entry is cached"),
                status: if attempts > 1 { TransportStatus::Recovered } else { TransportStatus::Ok },
                latency_ms: started.elapsed().as_millis() as u64,
                timestamp_ms: entry.timestamp_ms,
                attempts,
                source,
                digest,
            }),
            Err(TransportError::Transient(last)) => Err(GatewayError::RetriesExhausted { digest, attempts, last }),
            Err(TransportError::Auth(message)) => Err(GatewayError::Auth { digest, message }),
            Err(TransportError::Malformed(message)) => Err(GatewayError::Malformed { digest, message }),
        }
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunError;
use crate::corpus::{DatasetFormat, Emotion};
use crate::evaluation::BootstrapOptions;
use crate::gateway::{
    GatewayConfig, HttpTransport, MockRule, MockTransport, ModelParams, Transport, DEFAULT_BASE_URL, DEFAULT_KEY_VAR,
    DEFAULT_PATH,
};
use crate::promptgen::ContextConfig;
use crate::selection::{HeuristicId, SelectionMethod, SelectionStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Seeds {
    pub selection: u64,
    pub fusion: u64,
    pub bootstrap: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::joint(0)
    }
}

impl Seeds {
    pub fn joint(seed: u64) -> Self {
        Seeds {
            selection: seed,
            fusion: seed,
            bootstrap: seed,
        }
    }
}

/// Label substituted when a response cannot be parsed, or none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Fallback {
    Label(Emotion),
    None,
}

impl FromStr for Fallback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(Fallback::None);
        }
        Emotion::from_gold_label(s)
            .or_else(|| Emotion::from_prompt_alias(s))
            .map(Fallback::Label)
            .ok_or_else(|| format!("unknown fallback `{s}` (expected an emotion label or `none`)"))
    }
}

impl TryFrom<String> for Fallback {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Fallback> for String {
    fn from(f: Fallback) -> String {
        f.to_string()
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fallback::Label(e) => f.write_str(e.label()),
            Fallback::None => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParsePolicy {
    /// Fresh completions requested after an unparseable response.
    pub retries: u32,
    pub fallback: Fallback,
}

impl Default for ParsePolicy {
    fn default() -> Self {
        ParsePolicy {
            retries: 1,
            fallback: Fallback::Label(Emotion::Neutral),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TransportConfig {
    Mock {
        /// Start from the built-in keyword rules; `rules` are tried first.
        #[serde(default)]
        builtin: bool,
        #[serde(default)]
        rules: Vec<MockRule>,
        #[serde(default = "default_mock_response")]
        default_response: String,
    },
    Http {
        #[serde(default = "default_base_url")]
        base_url: String,
        #[serde(default = "default_path")]
        path: String,
        /// Environment variable holding the API key.
        #[serde(default = "default_key_env")]
        key_env: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
}

fn default_mock_response() -> String {
    "[neutral]".into()
}
fn default_base_url() -> String {
    DEFAULT_BASE_URL.into()
}
fn default_path() -> String {
    DEFAULT_PATH.into()
}
fn default_key_env() -> String {
    DEFAULT_KEY_VAR.into()
}
fn default_timeout() -> u64 {
    60
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig::Mock {
            builtin: true,
            rules: Vec::new(),
            default_response: default_mock_response(),
        }
    }
}

impl TransportConfig {
    pub fn build(&self) -> Result<Arc<dyn Transport>, RunError> {
        Ok(match self {
            TransportConfig::Mock {
                builtin,
                rules,
                default_response,
            } => {
                let mut all = rules.clone();
                if *builtin {
                    all.extend(MockTransport::builtin().rules);
                }
                Arc::new(MockTransport::new(all, default_response.clone()))
            }
            TransportConfig::Http {
                base_url,
                path,
                key_env,
                timeout_secs,
            } => Arc::new(
                HttpTransport::from_env(base_url, path, key_env, Duration::from_secs(*timeout_secs))
                    .map_err(|e| RunError::Transport(e.to_string()))?,
            ),
        })
    }
}

/// One experiment: dataset, selection strategy, prompt shape, model and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    #[serde(default)]
    pub format: DatasetFormat,
    /// Descriptive split name.
    #[serde(default = "default_split")]
    pub split: String,
    /// Restrict to these session ids; empty means all.
    #[serde(default)]
    pub sessions: Vec<String>,
    pub strategy: SelectionMethod,
    #[serde(default)]
    pub cw: usize,
    #[serde(default = "one")]
    pub n_candidates: usize,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub parse: ParsePolicy,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    #[serde(default)]
    pub transport: TransportConfig,
    #[serde(default)]
    pub gateway: GatewayConfig,
    /// Response cache journal; defaults to `cache.jsonl` in the output directory.
    #[serde(default)]
    pub cache: Option<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(default = "one")]
    pub workers: usize,
}

fn default_split() -> String {
    "train".into()
}
fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub alpha: f64,
    pub resamples: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        let d = BootstrapOptions::default();
        BootstrapConfig {
            alpha: d.alpha,
            resamples: d.resamples,
        }
    }
}

/// Output-relevant fields only; paths and execution knobs are left out.
#[derive(Serialize)]
struct DigestView<'a> {
    split: &'a str,
    sessions: &'a [String],
    strategy: SelectionMethod,
    cw: usize,
    n_candidates: usize,
    model: &'a ModelParams,
    seeds: Seeds,
    parse: ParsePolicy,
    bootstrap: BootstrapConfig,
    transport: TransportView<'a>,
}

#[derive(Serialize)]
enum TransportView<'a> {
    Mock(&'a TransportConfig),
    Http { base_url: &'a str, path: &'a str },
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<PathBuf>, strategy: SelectionMethod, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            format: DatasetFormat::default(),
            split: default_split(),
            sessions: Vec::new(),
            strategy,
            cw: 0,
            n_candidates: 1,
            model: ModelParams::default(),
            seeds: Seeds::default(),
            parse: ParsePolicy::default(),
            bootstrap: BootstrapConfig::default(),
            transport: TransportConfig::default(),
            gateway: GatewayConfig::default(),
            cache: None,
            output_dir: output_dir.into(),
            workers: 1,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), RunError> {
        self.context().validate().map_err(|e| RunError::Config(e.to_string()))?;
        let b = self.bootstrap;
        if !(b.alpha > 0.0 && b.alpha < 1.0) || b.resamples < 2 {
            return Err(RunError::Config(format!(
                "bootstrap alpha must be in (0, 1) and resamples >= 2 (got {} and {})",
                b.alpha, b.resamples
            )));
        }
        if self.workers == 0 {
            return Err(RunError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn context(&self) -> ContextConfig {
        ContextConfig {
            cw: self.cw,
            n_candidates: self.n_candidates,
            fusion_seed: self.seeds.fusion,
        }
    }

    pub fn selection(&self) -> SelectionStrategy {
        SelectionStrategy::new(self.strategy, self.seeds.selection)
    }

    pub fn bootstrap_options(&self) -> BootstrapOptions {
        BootstrapOptions {
            alpha: self.bootstrap.alpha,
            resamples: self.bootstrap.resamples,
            seed: self.seeds.bootstrap,
        }
    }

    pub fn cache_path(&self) -> PathBuf {
        self.cache.clone().unwrap_or_else(|| self.output_dir.join("cache.jsonl"))
    }

    /// Short human-readable descriptor used in reports.
    pub fn descriptor(&self) -> String {
        format!(
            "{} cw={} n={} model={} split={}",
            self.strategy, self.cw, self.n_candidates, self.model.model, self.split
        )
    }

    /// Hex SHA-256 over every field that affects outputs. Paths, worker count
    /// and gateway pacing are excluded.
    pub fn digest(&self) -> String {
        let transport = match &self.transport {
            t @ TransportConfig::Mock { .. } => TransportView::Mock(t),
            TransportConfig::Http { base_url, path, .. } => TransportView::Http { base_url, path },
        };
        let view = DigestView {
            split: &self.split,
            sessions: &self.sessions,
            strategy: self.strategy,
            cw: self.cw,
            n_candidates: self.n_candidates,
            model: &self.model,
            seeds: self.seeds,
            parse: self.parse,
            bootstrap: self.bootstrap,
            transport,
        };
        hex::encode(Sha256::digest(serde_json::to_vec(&view).expect("digest view serializes")))
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::new(
            "dataset.jsonl",
            SelectionMethod::Heuristic(HeuristicId::LeastPunc),
            "runs/default",
        )
    }
}

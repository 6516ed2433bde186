//! Post-ASR emotion prediction by prompting a chat model.
//!
//! The pipeline picks one transcript per utterance from several ASR systems
//! ([`selection`]), renders a conversation-context prompt ([`promptgen`]),
//! queries a chat-completion endpoint or a deterministic mock ([`gateway`]),
//! and scores the parsed predictions ([`evaluation`]). [`orchestrator`] runs
//! single experiments and configuration sweeps end to end.

pub mod corpus;
pub mod evaluation;
pub mod gateway;
pub mod keyed_rng;
pub mod orchestrator;
pub mod promptgen;
pub mod selection;
pub mod textmetrics;

pub use corpus::{AsrSystemId, Emotion, Session, Sex, Utterance};
pub use evaluation::{EvalReport, PredictionRecord};
pub use gateway::ModelParams;
pub use orchestrator::ExperimentConfig;
pub use promptgen::{ContextConfig, PromptRecord};
pub use selection::{SelectionMethod, SelectionStrategy};
pub use textmetrics::MetricId;

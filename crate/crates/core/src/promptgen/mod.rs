//! Conversation-context prompts and response parsing.
//!
//! Two layouts exist: the single-candidate prompt (context lines followed by
//! the target line) and the fusion prompt, which lists several ASR outputs
//! for the target utterance. Rendering is plain text and byte-stable.

mod context;
mod fusion;
mod parse;
mod render;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{AsrSystemId, Session};
use crate::selection::{select, SelectionError, SelectionMethod, SelectionStrategy};

pub use context::{build_context, participants, persona_label, target_line, ContextLine, Participants};
pub use fusion::{pick_fusion_alternatives, FusionPick};
pub use parse::{extract_emotion, ParseFailure};
pub use render::{render_fusion_prompt, render_fusion_ordered, render_single_prompt, FusionRender, SINGLE_INSTRUCTION};

/// Maximum number of fused candidates: one per ASR system.
pub const MAX_CANDIDATES: usize = AsrSystemId::ALL.len();

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("n_candidates must be between 1 and {MAX_CANDIDATES}, got {0}")]
    InvalidCandidateCount(usize),
    #[error("target index {index} out of range for session `{session}` ({len} utterances)")]
    TargetOutOfRange { session: String, index: usize, len: usize },
    #[error("fusion candidates must be distinct: `{0}` appears more than once")]
    DuplicateCandidate(String),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContextConfig {
    /// Number of preceding utterances shown.
    pub cw: usize,
    /// ASR candidates listed for the target; 1 selects the single-candidate prompt.
    pub n_candidates: usize,
    #[serde(default)]
    pub fusion_seed: u64,
}

impl Default for ContextConfig {
    fn default() -> Self {
        ContextConfig {
            cw: 0,
            n_candidates: 1,
            fusion_seed: 0,
        }
    }
}

impl ContextConfig {
    pub fn new(cw: usize, n_candidates: usize, fusion_seed: u64) -> Result<Self, PromptError> {
        let cfg = ContextConfig {
            cw,
            n_candidates,
            fusion_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        if self.n_candidates == 0 || self.n_candidates > MAX_CANDIDATES {
            return Err(PromptError::InvalidCandidateCount(self.n_candidates));
        }
        Ok(())
    }

    /// `cw + n`, held constant across a fusion block.
    pub fn budget(&self) -> usize {
        self.cw + self.n_candidates
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionCandidate {
    pub system: AsrSystemId,
    pub text: String,
}

/// A rendered prompt and everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub text: String,
    pub session_id: String,
    pub utterance_id: String,
    pub strategy: SelectionMethod,
    pub context: ContextConfig,
    pub selected_system: AsrSystemId,
    /// Candidates in the order shown (fusion prompts only).
    #[serde(default)]
    pub candidates: Vec<FusionCandidate>,
    /// Fewer context lines than `cw` were available.
    #[serde(default)]
    pub truncated_context: bool,
    /// Fewer distinct alternatives than requested were available.
    #[serde(default)]
    pub shortfall: bool,
    /// SHA-256 of `text`, hex encoded.
    pub checksum: String,
}

pub fn checksum(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Selects transcripts, assembles the context and renders the prompt for one target.
pub fn build_prompt(
    session: &Session,
    target_index: usize,
    strategy: &SelectionStrategy,
    ctx: &ContextConfig,
) -> Result<PromptRecord, PromptError> {
    ctx.validate()?;
    let target_utt = session.utterances.get(target_index).ok_or_else(|| PromptError::TargetOutOfRange {
        session: session.id.clone(),
        index: target_index,
        len: session.utterances.len(),
    })?;
    let who = participants(session);
    let context = build_context(session, target_index, ctx.cw, strategy)?;
    let truncated_context = context.len() < ctx.cw;
    let selection = select(target_utt, strategy)?;

    let (text, candidates, shortfall) = if ctx.n_candidates == 1 {
        let target = target_line(session, target_index, &selection.text);
        (render_single_prompt(who, &context, &target), Vec::new(), false)
    } else {
        let pick = pick_fusion_alternatives(target_utt, selection.system, ctx.n_candidates, ctx.fusion_seed);
        let speaker = target_line(session, target_index, "");
        let rendered = render_fusion_prompt(
            who,
            &context,
            (&speaker.persona, speaker.sex),
            (selection.system, &selection.text),
            &pick.alternatives,
            ctx.fusion_seed,
            &target_utt.id,
        )?;
        (rendered.text, rendered.order, pick.shortfall > 0)
    };
    if shortfall {
        log::debug!("utterance {}: fewer distinct alternatives than requested", target_utt.id);
    }

    Ok(PromptRecord {
        checksum: checksum(&text),
        text,
        session_id: session.id.clone(),
        utterance_id: target_utt.id.clone(),
        strategy: strategy.method,
        context: *ctx,
        selected_system: selection.system,
        candidates,
        truncated_context,
        shortfall,
    })
}

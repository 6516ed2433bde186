use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::PromptError;
use crate::corpus::{Session, Sex};
use crate::selection::{select, SelectionStrategy};

/// Sex composition of a session's speakers, which picks the prompt header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Participants {
    MaleAndFemale,
    SameSex,
}

pub fn participants(session: &Session) -> Participants {
    let has = |sex| session.utterances.iter().any(|u| u.speaker_sex == sex);
    if has(Sex::Female) && has(Sex::Male) {
        Participants::MaleAndFemale
    } else {
        Participants::SameSex
    }
}

/// `Person A`, `Person B`, ... for speaker index 0, 1, ...
pub fn persona_label(index: usize) -> String {
    let letter = char::from(b'A' + (index % 26) as u8);
    if index < 26 {
        format!("Person {letter}")
    } else {
        format!("Person {letter}{}", index / 26)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextLine {
    pub utterance_id: String,
    pub persona: String,
    pub sex: Sex,
    pub text: String,
}

impl ContextLine {
    pub fn render(&self) -> String {
        format!("{} ({}): {}", self.persona, self.sex, self.text)
    }
}

/// Speaker id → persona index, in order of first appearance.
fn persona_indices(session: &Session) -> HashMap<&str, usize> {
    let mut map = HashMap::new();
    for utt in &session.utterances {
        let next = map.len();
        map.entry(utt.speaker_id.as_str()).or_insert(next);
    }
    map
}

/// The line for utterance `index`, carrying `text`.
pub fn target_line(session: &Session, index: usize, text: &str) -> ContextLine {
    let utt = &session.utterances[index];
    let personas = persona_indices(session);
    ContextLine {
        utterance_id: utt.id.clone(),
        persona: persona_label(personas[utt.speaker_id.as_str()]),
        sex: utt.speaker_sex,
        text: text.to_string(),
    }
}

/// The up to `cw` utterances preceding `target_index` in the same session,
/// oldest first, each with its strategy-selected transcript.
pub fn build_context(
    session: &Session,
    target_index: usize,
    cw: usize,
    strategy: &SelectionStrategy,
) -> Result<Vec<ContextLine>, PromptError> {
    if target_index >= session.utterances.len() {
        return Err(PromptError::TargetOutOfRange {
            session: session.id.clone(),
            index: target_index,
            len: session.utterances.len(),
        });
    }
    let start = target_index.saturating_sub(cw);
    if target_index < cw {
        log::trace!(
            "context for {} truncated to {} of {} lines",
            session.utterances[target_index].id,
            target_index,
            cw
        );
    }
    let personas = persona_indices(session);
    session.utterances[start..target_index]
        .iter()
        .map(|utt| {
            let selection = select(utt, strategy)?;
            Ok(ContextLine {
                utterance_id: utt.id.clone(),
                persona: persona_label(personas[utt.speaker_id.as_str()]),
                sex: utt.speaker_sex,
                text: selection.text,
            })
        })
        .collect()
}

use std::collections::HashSet;

use super::context::{ContextLine, Participants};
use super::{FusionCandidate, PromptError};
use crate::corpus::{AsrSystemId, Sex};
use crate::keyed_rng;

const HEADER_MIXED: &str = "Below is a transcript of a conversation between a male and a female:";
const HEADER_SAME_SEX: &str = "Below is a transcript of a conversation between two speakers:";

const EMOTION_QUESTION: &str = "Could you identify the emotion expressed in the last utterance (anger, happiness, sadness, or neutral)? \
Please provide a brief explanation for your choice. \
Select a single emotion and enclose it in square brackets, like this: [emotion]. \
The emotion can only be anger, happiness, sadness, or neutral.";

/// Closing paragraph of the single-candidate prompt.
pub const SINGLE_INSTRUCTION: &str = "I need help understanding the emotional context of the last line. \
As a non-native English speaker, this is very important to me. \
Could you identify the emotion expressed in the last utterance (anger, happiness, sadness, or neutral)? \
Please provide a brief explanation for your choice. \
Select a single emotion and enclose it in square brackets, like this: [emotion]. \
The emotion can only be anger, happiness, sadness, or neutral.";

fn header(who: Participants) -> &'static str {
    match who {
        Participants::MaleAndFemale => HEADER_MIXED,
        Participants::SameSex => HEADER_SAME_SEX,
    }
}

fn push_block(out: &mut String, who: Participants, context: &[ContextLine]) {
    out.push_str(header(who));
    out.push('\n');
    for line in context {
        out.push_str(&line.render());
        out.push('\n');
    }
}

/// Header, context lines, the target line, a blank line, then the instruction.
pub fn render_single_prompt(who: Participants, context: &[ContextLine], target: &ContextLine) -> String {
    let mut out = String::new();
    push_block(&mut out, who, context);
    out.push_str(&target.render());
    out.push_str("\n\n");
    out.push_str(SINGLE_INSTRUCTION);
    out
}

/// Fusion prompt with the candidate lines in the given order.
pub fn render_fusion_ordered(
    who: Participants,
    context: &[ContextLine],
    speaker: (&str, Sex),
    candidates: &[&str],
) -> String {
    let (persona, sex) = speaker;
    let mut out = String::new();
    push_block(&mut out, who, context);
    out.push('\n');
    out.push_str(&format!(
        "I am not a native English speaker and I did not hear the last utterance from {persona} ({sex}) very clearly. \
         It could be one of the following:\n"
    ));
    out.push_str(&candidates.join(", or\n"));
    out.push_str(".\n\n");
    out.push_str(&format!(
        "It is now very important for me to understand the emotion of {persona} ({sex}) from your choice. {EMOTION_QUESTION}"
    ));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRender {
    pub text: String,
    /// Candidates in display order; contains the selected transcript exactly once.
    pub order: Vec<FusionCandidate>,
}

/// Renders the fusion prompt. The selected transcript and the alternatives
/// are shuffled by a stream keyed on `(fusion_seed, key)`.
pub fn render_fusion_prompt(
    who: Participants,
    context: &[ContextLine],
    speaker: (&str, Sex),
    selected: (AsrSystemId, &str),
    alternatives: &[FusionCandidate],
    fusion_seed: u64,
    key: &str,
) -> Result<FusionRender, PromptError> {
    let mut seen = HashSet::new();
    seen.insert(selected.1);
    for alt in alternatives {
        if !seen.insert(alt.text.as_str()) {
            return Err(PromptError::DuplicateCandidate(alt.text.clone()));
        }
    }

    let mut order: Vec<FusionCandidate> = std::iter::once(FusionCandidate {
        system: selected.0,
        text: selected.1.to_string(),
    })
    .chain(alternatives.iter().cloned())
    .collect();
    let mut rng = keyed_rng::keyed_rng("fusion.order", fusion_seed, key);
    keyed_rng::shuffle(&mut rng, &mut order);

    let texts: Vec<&str> = order.iter().map(|c| c.text.as_str()).collect();
    Ok(FusionRender {
        text: render_fusion_ordered(who, context, speaker, &texts),
        order,
    })
}

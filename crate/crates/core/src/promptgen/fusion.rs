use std::collections::HashSet;

use super::FusionCandidate;
use crate::corpus::{AsrSystemId, Utterance};
use crate::keyed_rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionPick {
    pub alternatives: Vec<FusionCandidate>,
    /// How many of the requested `n - 1` alternatives could not be filled.
    pub shortfall: usize,
}

/// Draws `n_candidates - 1` alternative transcripts without replacement.
///
/// The pool is the utterance's distinct non-blank texts other than the
/// selected one; each distinct text is represented by its highest-priority
/// system. The draw is keyed by `(fusion_seed, utterance id)`.
pub fn pick_fusion_alternatives(
    utterance: &Utterance,
    selected_system: AsrSystemId,
    n_candidates: usize,
    fusion_seed: u64,
) -> FusionPick {
    let wanted = n_candidates.saturating_sub(1);
    let selected_text = utterance.transcripts.get(&selected_system).map(String::as_str);

    let mut seen: HashSet<&str> = selected_text.into_iter().collect();
    let mut pool: Vec<FusionCandidate> = Vec::new();
    for (sys, text) in &utterance.transcripts {
        if text.trim().is_empty() || !seen.insert(text.as_str()) {
            continue;
        }
        pool.push(FusionCandidate {
            system: *sys,
            text: text.clone(),
        });
    }

    let mut rng = keyed_rng::keyed_rng("fusion.pick", fusion_seed, &utterance.id);
    keyed_rng::shuffle(&mut rng, &mut pool);
    pool.truncate(wanted);
    FusionPick {
        shortfall: wanted - pool.len(),
        alternatives: pool,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sex;

    fn utterance(texts: impl Fn(usize) -> String) -> Utterance {
        Utterance {
            id: "u".into(),
            speaker_id: "s".into(),
            speaker_sex: Sex::Male,
            transcripts: AsrSystemId::ALL.iter().enumerate().map(|(i, s)| (*s, texts(i))).collect(),
            needs_prediction: true,
            gold_emotion: None,
        }
    }

    #[test]
    fn distinct_texts_give_full_draw() {
        let u = utterance(|i| format!("text {i}"));
        let pick = pick_fusion_alternatives(&u, AsrSystemId::WhisperTiny, 5, 9);
        assert_eq!(pick.alternatives.len(), 4);
        assert_eq!(pick.shortfall, 0);
        assert!(pick.alternatives.iter().all(|a| a.text != "text 10"));
        let texts: HashSet<_> = pick.alternatives.iter().map(|a| &a.text).collect();
        assert_eq!(texts.len(), 4);
    }

    #[test]
    fn identical_texts_give_shortfall() {
        let u = utterance(|_| "same".into());
        let pick = pick_fusion_alternatives(&u, AsrSystemId::HubertLarge, 5, 9);
        assert!(pick.alternatives.is_empty());
        assert_eq!(pick.shortfall, 4);
    }

    #[test]
    fn duplicates_and_blanks_are_collapsed() {
        let u = utterance(|i| match i % 3 {
            0 => "a".into(),
            1 => "b".into(),
            _ => " ".into(),
        });
        let pick = pick_fusion_alternatives(&u, AsrSystemId::HubertLarge, 4, 1);
        assert_eq!(pick.alternatives.len(), 1);
        assert_eq!(pick.alternatives[0].text, "b");
        assert_eq!(pick.alternatives[0].system, AsrSystemId::W2v2100);
        assert_eq!(pick.shortfall, 2);
    }

    #[test]
    fn seeded_draw_is_repeatable() {
        let u = utterance(|i| format!("t{i}"));
        let a = pick_fusion_alternatives(&u, AsrSystemId::HubertLarge, 6, 3);
        assert_eq!(a, pick_fusion_alternatives(&u, AsrSystemId::HubertLarge, 6, 3));
        let n1 = pick_fusion_alternatives(&u, AsrSystemId::HubertLarge, 1, 3);
        assert!(n1.alternatives.is_empty() && n1.shortfall == 0);
    }
}

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{AsrSystemId, Emotion, Session, Sex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub utterances: usize,
    pub needs_prediction: usize,
    /// Number of utterances carrying each system's transcript.
    pub system_coverage: BTreeMap<AsrSystemId, usize>,
    /// Gold labels over all four classes (zero counts included).
    pub label_histogram: BTreeMap<Emotion, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NoTranscripts,
    DuplicateUtterance,
    /// A prediction target lacks a gold label while others in the split have one.
    MissingGold,
    TooManySpeakers,
    InconsistentSpeakerSex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub session_id: String,
    pub utterance_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub sessions: Vec<SessionSummary>,
    pub violations: Vec<Violation>,
    /// Utterances missing some systems' outputs. Tolerated, but reported.
    pub partial_coverage: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sessions {
            out.push_str(&format!(
                "session {}: {} utterances, {} need prediction\n",
                s.session_id, s.utterances, s.needs_prediction
            ));
            let coverage: Vec<String> = s.system_coverage.iter().map(|(sys, n)| format!("{sys}={n}")).collect();
            out.push_str(&format!("  coverage: {}\n", coverage.join(" ")));
            let labels: Vec<String> = s.label_histogram.iter().map(|(e, n)| format!("{e}={n}")).collect();
            out.push_str(&format!("  labels:   {}\n", labels.join(" ")));
        }
        if !self.partial_coverage.is_empty() {
            out.push_str(&format!("{} utterances with partial system coverage\n", self.partial_coverage.len()));
        }
        if self.violations.is_empty() {
            out.push_str("no violations\n");
        } else {
            for v in &self.violations {
                out.push_str(&format!("violation: {}\n", v.message));
            }
        }
        out
    }
}

pub fn validate_dataset(sessions: &[Session]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut partial_coverage = Vec::new();
    let mut summaries = Vec::with_capacity(sessions.len());

    // Split kind: if any prediction target carries gold, all must.
    let training_split = sessions
        .iter()
        .flat_map(|s| &s.utterances)
        .any(|u| u.needs_prediction && u.gold_emotion.is_some());

    for session in sessions {
        let mut coverage: BTreeMap<AsrSystemId, usize> = AsrSystemId::ALL.iter().map(|s| (*s, 0)).collect();
        let mut histogram: BTreeMap<Emotion, usize> = Emotion::ALL.iter().map(|e| (*e, 0)).collect();
        let mut seen = HashSet::new();
        let mut speakers: HashMap<&str, Sex> = HashMap::new();
        let mut speaker_order: Vec<&str> = Vec::new();

        for utt in &session.utterances {
            let violation = |kind, message: String| Violation {
                kind,
                session_id: session.id.clone(),
                utterance_id: Some(utt.id.clone()),
                message,
            };
            if !seen.insert(utt.id.as_str()) {
                violations.push(violation(
                    ViolationKind::DuplicateUtterance,
                    format!("duplicate utterance {} in session {}", utt.id, session.id),
                ));
            }
            if utt.transcripts.is_empty() {
                violations.push(violation(
                    ViolationKind::NoTranscripts,
                    format!("utterance {} has no transcripts", utt.id),
                ));
            } else if utt.transcripts.len() < AsrSystemId::ALL.len() {
                partial_coverage.push(utt.id.clone());
            }
            if training_split && utt.needs_prediction && utt.gold_emotion.is_none() {
                violations.push(violation(
                    ViolationKind::MissingGold,
                    format!("utterance {} needs prediction but has no gold label", utt.id),
                ));
            }
            match speakers.get(utt.speaker_id.as_str()) {
                Some(&sex) if sex != utt.speaker_sex => violations.push(violation(
                    ViolationKind::InconsistentSpeakerSex,
                    format!("speaker {} changes sex at utterance {}", utt.speaker_id, utt.id),
                )),
                Some(_) => {}
                None => {
                    speakers.insert(&utt.speaker_id, utt.speaker_sex);
                    speaker_order.push(&utt.speaker_id);
                }
            }
            for sys in utt.transcripts.keys() {
                *coverage.entry(*sys).or_default() += 1;
            }
            if let Some(e) = utt.gold_emotion {
                *histogram.entry(e).or_default() += 1;
            }
        }
        if speaker_order.len() > 2 {
            violations.push(Violation {
                kind: ViolationKind::TooManySpeakers,
                session_id: session.id.clone(),
                utterance_id: None,
                message: format!("session {} has {} speakers; prompts expect two", session.id, speaker_order.len()),
            });
        }
        summaries.push(SessionSummary {
            session_id: session.id.clone(),
            utterances: session.utterances.len(),
            needs_prediction: session.utterances.iter().filter(|u| u.needs_prediction).count(),
            system_coverage: coverage,
            label_histogram: histogram,
        });
    }

    ValidationReport {
        sessions: summaries,
        violations,
        partial_coverage,
    }
}

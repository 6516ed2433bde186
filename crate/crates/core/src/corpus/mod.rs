//! Conversation datasets carrying several ASR systems' transcripts per utterance.
//!
//! Sessions are immutable once loaded. The canonical on-disk form is a
//! line-delimited JSON stream with one utterance per line; see [`load`] for the
//! readers and writer and [`validate`] for the dataset report.

mod load;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use load::{load_dataset, parse_canonical, parse_challenge_export, to_canonical_jsonl, DatasetFormat, LoadError};
pub use validate::{validate_dataset, SessionSummary, ValidationReport, Violation};

/// One of the four emotion classes predicted by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Angry,
    Happy,
    Neutral,
    Sad,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [Emotion::Angry, Emotion::Happy, Emotion::Neutral, Emotion::Sad];

    pub fn label(self) -> &'static str {
        match self {
            Emotion::Angry => "angry",
            Emotion::Happy => "happy",
            Emotion::Neutral => "neutral",
            Emotion::Sad => "sad",
        }
    }

    /// The noun used for this class in prompts ("anger", "happiness", ...).
    pub fn prompt_alias(self) -> &'static str {
        match self {
            Emotion::Angry => "anger",
            Emotion::Happy => "happiness",
            Emotion::Neutral => "neutral",
            Emotion::Sad => "sadness",
        }
    }

    pub fn from_prompt_alias(alias: &str) -> Option<Emotion> {
        Emotion::ALL.into_iter().find(|e| e.prompt_alias() == alias)
    }

    /// Parses a gold label. `excited` is folded into `happy`.
    pub fn from_gold_label(label: &str) -> Option<Emotion> {
        match label {
            "angry" => Some(Emotion::Angry),
            "happy" | "excited" => Some(Emotion::Happy),
            "neutral" => Some(Emotion::Neutral),
            "sad" => Some(Emotion::Sad),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The closed set of ASR systems whose outputs the dataset carries.
///
/// Declaration order is the tie-break priority used by every ranking and
/// selection routine, so `Ord` is derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AsrSystemId {
    #[serde(rename = "hubertlarge")]
    HubertLarge,
    #[serde(rename = "w2v2100")]
    W2v2100,
    #[serde(rename = "w2v2960")]
    W2v2960,
    #[serde(rename = "w2v2960large")]
    W2v2960Large,
    #[serde(rename = "w2v2960largeself")]
    W2v2960LargeSelf,
    #[serde(rename = "wavlmplus")]
    WavlmPlus,
    #[serde(rename = "whisperbase")]
    WhisperBase,
    #[serde(rename = "whisperlarge")]
    WhisperLarge,
    #[serde(rename = "whispermedium")]
    WhisperMedium,
    #[serde(rename = "whispersmall")]
    WhisperSmall,
    #[serde(rename = "whispertiny")]
    WhisperTiny,
}

impl AsrSystemId {
    pub const ALL: [AsrSystemId; 11] = [
        AsrSystemId::HubertLarge,
        AsrSystemId::W2v2100,
        AsrSystemId::W2v2960,
        AsrSystemId::W2v2960Large,
        AsrSystemId::W2v2960LargeSelf,
        AsrSystemId::WavlmPlus,
        AsrSystemId::WhisperBase,
        AsrSystemId::WhisperLarge,
        AsrSystemId::WhisperMedium,
        AsrSystemId::WhisperSmall,
        AsrSystemId::WhisperTiny,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AsrSystemId::HubertLarge => "hubertlarge",
            AsrSystemId::W2v2100 => "w2v2100",
            AsrSystemId::W2v2960 => "w2v2960",
            AsrSystemId::W2v2960Large => "w2v2960large",
            AsrSystemId::W2v2960LargeSelf => "w2v2960largeself",
            AsrSystemId::WavlmPlus => "wavlmplus",
            AsrSystemId::WhisperBase => "whisperbase",
            AsrSystemId::WhisperLarge => "whisperlarge",
            AsrSystemId::WhisperMedium => "whispermedium",
            AsrSystemId::WhisperSmall => "whispersmall",
            AsrSystemId::WhisperTiny => "whispertiny",
        }
    }

    /// Zero-based tie-break priority (lower wins).
    pub fn priority(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AsrSystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown ASR system `{0}`")]
pub struct UnknownSystem(pub String);

impl FromStr for AsrSystemId {
    type Err = UnknownSystem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AsrSystemId::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| UnknownSystem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    pub fn as_str(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub id: String,
    pub speaker_id: String,
    pub speaker_sex: Sex,
    /// Transcripts keyed by system; iteration order is tie-break priority.
    pub transcripts: BTreeMap<AsrSystemId, String>,
    pub needs_prediction: bool,
    pub gold_emotion: Option<Emotion>,
}

impl Utterance {
    /// `(system, text)` pairs in priority order.
    pub fn candidates(&self) -> Vec<(AsrSystemId, &str)> {
        self.transcripts.iter().map(|(sys, text)| (*sys, text.as_str())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub id: String,
    pub utterances: Vec<Utterance>,
}

impl Session {
    pub fn position(&self, utterance_id: &str) -> Option<usize> {
        self.utterances.iter().position(|u| u.id == utterance_id)
    }
}

/// Finds an utterance by id, optionally restricted to one session.
pub fn find_utterance<'a>(
    sessions: &'a [Session],
    session_id: Option<&str>,
    utterance_id: &str,
) -> Option<(&'a Session, usize)> {
    sessions
        .iter()
        .filter(|s| session_id.map_or(true, |id| s.id == id))
        .find_map(|s| s.position(utterance_id).map(|idx| (s, idx)))
}

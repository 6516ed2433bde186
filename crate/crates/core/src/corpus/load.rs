use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{AsrSystemId, Emotion, Session, Sex, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    /// One JSON utterance record per line.
    #[default]
    Canonical,
    /// Flat per-utterance objects as released by the challenge (JSON array or JSON lines).
    #[serde(alias = "challenge")]
    ChallengeExport,
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(DatasetFormat::Canonical),
            "challenge" | "challenge_export" => Ok(DatasetFormat::ChallengeExport),
            other => Err(format!("unknown dataset format `{other}` (expected canonical or challenge)")),
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetFormat::Canonical => "canonical",
            DatasetFormat::ChallengeExport => "challenge",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read dataset {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown ASR system `{system}`")]
    UnknownSystem { line: usize, system: String },
    #[error("line {line}: unknown emotion label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: utterance `{utterance}` has no transcripts")]
    NoTranscripts { line: usize, utterance: String },
    #[error("line {line}: duplicate utterance `{utterance}` in session `{session}`")]
    DuplicateUtterance { line: usize, session: String, utterance: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalIn {
    session_id: String,
    utterance_id: String,
    speaker_id: String,
    speaker_sex: Sex,
    needs_prediction: bool,
    #[serde(default)]
    gold_emotion: Option<String>,
    transcripts: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct CanonicalOut<'a> {
    session_id: &'a str,
    utterance_id: &'a str,
    speaker_id: &'a str,
    speaker_sex: Sex,
    needs_prediction: bool,
    gold_emotion: Option<Emotion>,
    transcripts: &'a BTreeMap<AsrSystemId, String>,
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Vec<Session>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let sessions = match format {
        DatasetFormat::Canonical => parse_canonical(&text)?,
        DatasetFormat::ChallengeExport => parse_challenge_export(&text)?,
    };
    log::debug!(
        "loaded {} sessions / {} utterances from {}",
        sessions.len(),
        sessions.iter().map(|s| s.utterances.len()).sum::<usize>(),
        path.display()
    );
    Ok(sessions)
}

pub fn parse_canonical(text: &str) -> Result<Vec<Session>, LoadError> {
    let mut builder = SessionBuilder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: CanonicalIn = serde_json::from_str(raw).map_err(|e| LoadError::Malformed {
            line,
            message: e.to_string(),
        })?;
        let gold_emotion = rec.gold_emotion.as_deref().map(|l| parse_label(line, l)).transpose()?;
        let transcripts = parse_transcripts(line, rec.transcripts)?;
        builder.push(
            line,
            rec.session_id,
            Utterance {
                id: rec.utterance_id,
                speaker_id: rec.speaker_id,
                speaker_sex: rec.speaker_sex,
                transcripts,
                needs_prediction: rec.needs_prediction,
                gold_emotion,
            },
        )?;
    }
    Ok(builder.finish())
}

/// Serializes sessions to the canonical record stream (trailing newline after every record).
pub fn to_canonical_jsonl(sessions: &[Session]) -> String {
    let mut out = String::new();
    for session in sessions {
        for utt in &session.utterances {
            let rec = CanonicalOut {
                session_id: &session.id,
                utterance_id: &utt.id,
                speaker_id: &utt.speaker_id,
                speaker_sex: utt.speaker_sex,
                needs_prediction: utt.needs_prediction,
                gold_emotion: utt.gold_emotion,
                transcripts: &utt.transcripts,
            };
            out.push_str(&serde_json::to_string(&rec).expect("canonical record serializes"));
            out.push('\n');
        }
    }
    out
}

const CHALLENGE_META_KEYS: &[&str] = &["id", "need_prediction", "emotion", "speaker", "sex", "gender", "groundtruth", "session"];

/// Reads the challenge's flat export: one object per utterance with `id`
/// (e.g. `Ses01F_impro01_F000`), `need_prediction`, an optional `emotion`,
/// and one key per ASR system. Ground-truth transcripts are ignored.
///
/// The session is the id minus its last `_` segment; the first letter of that
/// segment (`F`/`M`) gives the speaker unless `speaker`/`sex` fields exist.
pub fn parse_challenge_export(text: &str) -> Result<Vec<Session>, LoadError> {
    let trimmed = text.trim_start();
    let records: Vec<(usize, Value)> = if trimmed.starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(text).map_err(|e| LoadError::Malformed {
            line: e.line(),
            message: e.to_string(),
        })?;
        values.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect()
    } else {
        let mut out = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let value = serde_json::from_str(raw).map_err(|e| LoadError::Malformed {
                line: idx + 1,
                message: e.to_string(),
            })?;
            out.push((idx + 1, value));
        }
        out
    };

    let mut builder = SessionBuilder::default();
    for (line, value) in records {
        let Value::Object(obj) = value else {
            return Err(malformed(line, "expected a JSON object"));
        };
        let id = obj
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed(line, "missing string field `id`"))?
            .to_string();
        let (session_id, last) = id
            .rsplit_once('_')
            .ok_or_else(|| malformed(line, "utterance id has no `_`-separated speaker segment"))?;
        let session_id = obj
            .get("session")
            .and_then(Value::as_str)
            .unwrap_or(session_id)
            .to_string();
        let speaker_letter = last.chars().next().unwrap_or('?');
        let speaker_sex = match obj.get("sex").or_else(|| obj.get("gender")).and_then(Value::as_str) {
            Some(s) => parse_sex(line, s)?,
            None => parse_sex(line, &speaker_letter.to_string())?,
        };
        let speaker_id = obj
            .get("speaker")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| format!("{session_id}_{speaker_letter}"));
        let needs_prediction = match obj.get("need_prediction") {
            Some(Value::Bool(b)) => *b,
            Some(Value::String(s)) => matches!(s.to_ascii_lowercase().as_str(), "yes" | "true" | "1"),
            Some(Value::Number(n)) => n.as_i64() == Some(1),
            None | Some(Value::Null) => false,
            Some(other) => return Err(malformed(line, &format!("bad need_prediction value {other}"))),
        };
        let gold_emotion = match obj.get("emotion") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) if s.is_empty() => None,
            Some(Value::String(s)) => Some(parse_challenge_label(line, s)?),
            Some(other) => return Err(malformed(line, &format!("bad emotion value {other}"))),
        };
        let mut raw_transcripts = BTreeMap::new();
        for (key, v) in &obj {
            if CHALLENGE_META_KEYS.contains(&key.as_str()) {
                continue;
            }
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => return Err(malformed(line, &format!("transcript for `{key}` is not a string: {other}"))),
            };
            raw_transcripts.insert(key.clone(), text);
        }
        let transcripts = parse_transcripts(line, raw_transcripts)?;
        builder.push(
            line,
            session_id,
            Utterance {
                id,
                speaker_id,
                speaker_sex,
                transcripts,
                needs_prediction,
                gold_emotion,
            },
        )?;
    }
    Ok(builder.finish())
}

fn malformed(line: usize, message: &str) -> LoadError {
    LoadError::Malformed {
        line,
        message: message.to_string(),
    }
}

fn parse_label(line: usize, label: &str) -> Result<Emotion, LoadError> {
    Emotion::from_gold_label(label).ok_or_else(|| LoadError::UnknownLabel {
        line,
        label: label.to_string(),
    })
}

fn parse_challenge_label(line: usize, label: &str) -> Result<Emotion, LoadError> {
    let lower = label.trim().to_ascii_lowercase();
    let mapped = match lower.as_str() {
        "ang" => "angry",
        "hap" => "happy",
        "exc" => "excited",
        "neu" => "neutral",
        other => other,
    };
    parse_label(line, mapped)
}

fn parse_sex(line: usize, raw: &str) -> Result<Sex, LoadError> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "f" | "female" => Ok(Sex::Female),
        "m" | "male" => Ok(Sex::Male),
        other => Err(malformed(line, &format!("cannot determine speaker sex from `{other}`"))),
    }
}

fn parse_transcripts(line: usize, raw: BTreeMap<String, String>) -> Result<BTreeMap<AsrSystemId, String>, LoadError> {
    raw.into_iter()
        .map(|(name, text)| {
            let sys = name
                .parse::<AsrSystemId>()
                .map_err(|e| LoadError::UnknownSystem { line, system: e.0 })?;
            Ok((sys, text))
        })
        .collect()
}

#[derive(Default)]
struct SessionBuilder {
    sessions: Vec<Session>,
    index: HashMap<String, usize>,
    seen: Vec<HashSet<String>>,
}

impl SessionBuilder {
    fn push(&mut self, line: usize, session_id: String, utt: Utterance) -> Result<(), LoadError> {
        if utt.transcripts.is_empty() {
            return Err(LoadError::NoTranscripts { line, utterance: utt.id });
        }
        let idx = match self.index.get(&session_id) {
            Some(&idx) => idx,
            None => {
                self.sessions.push(Session {
                    id: session_id.clone(),
                    utterances: Vec::new(),
                });
                self.seen.push(HashSet::new());
                self.index.insert(session_id.clone(), self.sessions.len() - 1);
                self.sessions.len() - 1
            }
        };
        if !self.seen[idx].insert(utt.id.clone()) {
            return Err(LoadError::DuplicateUtterance {
                line,
                session: session_id,
                utterance: utt.id,
            });
        }
        self.sessions[idx].utterances.push(utt);
        Ok(())
    }

    fn finish(self) -> Vec<Session> {
        self.sessions
    }
}

//! Accuracy, per-class recall, confusion counts and BCa intervals.
//!
//! The headline number is overall accuracy (fraction correct). Macro recall
//! is reported next to it because "unweighted accuracy" is used for both in
//! the emotion-recognition literature.

mod bootstrap;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{AsrSystemId, Emotion};
use crate::gateway::Source;

pub use bootstrap::{bca_interval, BcaInterval, BootstrapOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("no scored records (records need a gold label)")]
    Empty,
    #[error("bootstrap needs at least 2 values, got {0}")]
    TooFewValues(usize),
    #[error("bootstrap needs at least 2 resamples, got {0}")]
    TooFewResamples(usize),
    #[error("alpha must be in (0, 1), got {0}")]
    InvalidAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseStatus {
    Parsed,
    /// Unparseable after retries; the fallback label was substituted.
    Fallback,
    /// Unparseable and no fallback configured; scored as incorrect.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub session_id: String,
    pub utterance_id: String,
    pub gold: Option<Emotion>,
    pub predicted: Option<Emotion>,
    pub parse_status: ParseStatus,
    pub selected_system: AsrSystemId,
    pub prompt_checksum: String,
    pub request_digest: String,
    pub source: Source,
}

impl PredictionRecord {
    pub fn is_correct(&self) -> Option<bool> {
        self.gold.map(|g| self.predicted == Some(g))
    }
}

/// Records with a gold label, in canonical `(utterance_id, session_id)` order.
fn scored(records: &[PredictionRecord]) -> Vec<&PredictionRecord> {
    let mut out: Vec<_> = records.iter().filter(|r| r.gold.is_some()).collect();
    out.sort_by(|a, b| (&a.utterance_id, &a.session_id).cmp(&(&b.utterance_id, &b.session_id)));
    out
}

pub fn unweighted_accuracy(records: &[PredictionRecord]) -> Result<f64, EvalError> {
    let scored = scored(records);
    if scored.is_empty() {
        return Err(EvalError::Empty);
    }
    let correct = scored.iter().filter(|r| r.is_correct() == Some(true)).count();
    Ok(correct as f64 / scored.len() as f64)
}

/// Per-class recall for classes with at least one gold instance.
pub fn per_class_recall(records: &[PredictionRecord]) -> BTreeMap<Emotion, f64> {
    let mut tally: BTreeMap<Emotion, (usize, usize)> = BTreeMap::new();
    for r in scored(records) {
        let entry = tally.entry(r.gold.unwrap()).or_default();
        entry.1 += 1;
        if r.is_correct() == Some(true) {
            entry.0 += 1;
        }
    }
    tally.into_iter().map(|(e, (hit, n))| (e, hit as f64 / n as f64)).collect()
}

/// Mean per-class recall over the classes present in gold.
pub fn macro_recall(records: &[PredictionRecord]) -> Result<f64, EvalError> {
    let recalls = per_class_recall(records);
    if recalls.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(recalls.values().sum::<f64>() / recalls.len() as f64)
}

/// Rows are gold classes; columns are predicted classes plus `unparsed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub gold: Vec<Emotion>,
    pub predicted: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

pub const UNPARSED_COLUMN: &str = "unparsed";

impl ConfusionMatrix {
    pub fn from_records(records: &[PredictionRecord]) -> Self {
        let mut counts = vec![vec![0u64; Emotion::ALL.len() + 1]; Emotion::ALL.len()];
        for r in scored(records) {
            let col = r.predicted.map_or(Emotion::ALL.len(), |p| p.index());
            counts[r.gold.unwrap().index()][col] += 1;
        }
        let mut predicted: Vec<String> = Emotion::ALL.iter().map(|e| e.label().to_string()).collect();
        predicted.push(UNPARSED_COLUMN.into());
        ConfusionMatrix {
            gold: Emotion::ALL.to_vec(),
            predicted,
            counts,
        }
    }

    pub fn row_sum(&self, gold: Emotion) -> u64 {
        self.counts[gold.index()].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseSummary {
    pub parsed: usize,
    pub fallback: usize,
    pub failed: usize,
    /// `(fallback + failed) / records`.
    pub failure_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: String,
    pub records: usize,
    pub scored: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub macro_recall: f64,
    pub per_class_recall: BTreeMap<Emotion, f64>,
    pub confusion: ConfusionMatrix,
    pub interval: BcaInterval,
    pub bootstrap_seed: u64,
    pub parse: ParseSummary,
}

/// `acc±halfwidth` to three decimals, e.g. `0.574±0.019`.
pub fn format_acc_ci(accuracy: f64, half_width: f64) -> String {
    format!("{accuracy:.3}±{half_width:.3}")
}

impl EvalReport {
    pub fn headline(&self) -> String {
        format_acc_ci(self.accuracy, self.interval.half_width())
    }

    pub fn summary_line(&self) -> String {
        format!("acc {:.3} ± {:.3}", self.accuracy, self.interval.half_width())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "config: {}", self.config);
        let _ = writeln!(
            out,
            "accuracy: {} ({} / {} scored, {} records)",
            self.headline(),
            self.correct,
            self.scored,
            self.records
        );
        let _ = writeln!(
            out,
            "BCa interval: [{:.4}, {:.4}] alpha={} resamples={} seed={}",
            self.interval.lo, self.interval.hi, self.interval.alpha, self.interval.resamples, self.bootstrap_seed
        );
        let _ = writeln!(out, "macro recall: {:.3}", self.macro_recall);
        let _ = writeln!(
            out,
            "parse: {} parsed, {} fallback, {} failed (failure rate {:.3})",
            self.parse.parsed, self.parse.fallback, self.parse.failed, self.parse.failure_rate
        );
        out.push('\n');
        let _ = write!(out, "{:<10}", "gold\\pred");
        for col in &self.confusion.predicted {
            let _ = write!(out, "{col:>10}");
        }
        let _ = writeln!(out, "{:>10}", "recall");
        for (gold, row) in self.confusion.gold.iter().zip(&self.confusion.counts) {
            let _ = write!(out, "{:<10}", gold.label());
            for c in row {
                let _ = write!(out, "{c:>10}");
            }
            match self.per_class_recall.get(gold) {
                Some(r) => {
                    let _ = writeln!(out, "{r:>10.3}");
                }
                None => {
                    let _ = writeln!(out, "{:>10}", "-");
                }
            }
        }
        out
    }
}

pub fn build_report(
    records: &[PredictionRecord],
    config: &str,
    opts: &BootstrapOptions,
) -> Result<EvalReport, EvalError> {
    let scored = scored(records);
    if scored.is_empty() {
        return Err(EvalError::Empty);
    }
    let flags: Vec<f64> = scored.iter().map(|r| f64::from(u8::from(r.is_correct() == Some(true)))).collect();
    let correct = flags.iter().filter(|&&f| f == 1.0).count();
    let interval = if flags.len() >= 2 {
        bca_interval(&flags, opts)?
    } else {
        BcaInterval {
            lo: flags[0],
            hi: flags[0],
            alpha: opts.alpha,
            resamples: opts.resamples,
        }
    };
    let count = |s| records.iter().filter(|r| r.parse_status == s).count();
    let (parsed, fallback, failed) = (count(ParseStatus::Parsed), count(ParseStatus::Fallback), count(ParseStatus::Failed));
    Ok(EvalReport {
        config: config.to_string(),
        records: records.len(),
        scored: scored.len(),
        correct,
        accuracy: correct as f64 / scored.len() as f64,
        macro_recall: macro_recall(records)?,
        per_class_recall: per_class_recall(records),
        confusion: ConfusionMatrix::from_records(records),
        interval,
        bootstrap_seed: opts.seed,
        parse: ParseSummary {
            parsed,
            fallback,
            failed,
            failure_rate: (fallback + failed) as f64 / records.len() as f64,
        },
    })
}

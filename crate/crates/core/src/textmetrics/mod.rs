//! String comparison metrics used to rank ASR transcripts against each other.
//!
//! Word metrics (WER, MER, WIL, WIP) share one minimum-edit word alignment;
//! chrF and chrF++ are character (and word) n-gram F-scores on a 0–100 scale.
//! Every function is total: empty and degenerate inputs produce a defined
//! value, and the `*_detailed` variants report which degenerate case applied.

mod align;
mod chrf;
mod word;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use align::{word_align, AlignmentCounts};
pub use chrf::{chrf, chrf_pp, chrf_with, ChrfParams};
pub use word::{mer, wer, wil, wip, word_scores, WordScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Higher is better.
    Similarity,
    /// Lower is better.
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MetricId {
    Chrf,
    ChrfPp,
    Wer,
    Mer,
    Wil,
    Wip,
}

impl MetricId {
    pub const ALL: [MetricId; 6] = [
        MetricId::Chrf,
        MetricId::ChrfPp,
        MetricId::Wer,
        MetricId::Mer,
        MetricId::Wil,
        MetricId::Wip,
    ];

    /// Stable config/CLI token.
    pub fn token(self) -> &'static str {
        match self {
            MetricId::Chrf => "chrf",
            MetricId::ChrfPp => "chrf++",
            MetricId::Wer => "wer",
            MetricId::Mer => "mer",
            MetricId::Wil => "wil",
            MetricId::Wip => "wip",
        }
    }

    /// Display name as usually printed in tables.
    pub fn display_name(self) -> &'static str {
        match self {
            MetricId::Chrf => "chrF",
            MetricId::ChrfPp => "chrF++",
            MetricId::Wer => "WER",
            MetricId::Mer => "MER",
            MetricId::Wil => "WIL",
            MetricId::Wip => "WIP",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            MetricId::Chrf | MetricId::ChrfPp | MetricId::Wip => Polarity::Similarity,
            MetricId::Wer | MetricId::Mer | MetricId::Wil => Polarity::Error,
        }
    }

    /// The score of a text against itself.
    pub fn perfect_value(self) -> f64 {
        match self {
            MetricId::Chrf | MetricId::ChrfPp => 100.0,
            MetricId::Wip => 1.0,
            MetricId::Wer | MetricId::Mer | MetricId::Wil => 0.0,
        }
    }

    pub fn score(self, hypothesis: &str, reference: &str) -> f64 {
        self.score_detailed(hypothesis, reference, &MetricOptions::default()).value
    }

    pub fn score_detailed(self, hypothesis: &str, reference: &str, opts: &MetricOptions) -> MetricValue {
        match self {
            MetricId::Chrf | MetricId::ChrfPp => {
                let params = if self == MetricId::Chrf {
                    ChrfParams::default()
                } else {
                    ChrfParams::plus_plus()
                };
                let hyp = opts.fold(hypothesis);
                let reference = opts.fold(reference);
                MetricValue {
                    value: chrf_with(&hyp, &reference, &params),
                    degenerate: Degenerate::classify(hyp.trim().is_empty(), reference.trim().is_empty()),
                }
            }
            _ => {
                let ws = word::word_scores_with(hypothesis, reference, opts);
                let value = match self {
                    MetricId::Wer => ws.wer,
                    MetricId::Mer => ws.mer,
                    MetricId::Wil => ws.wil,
                    MetricId::Wip => ws.wip,
                    _ => unreachable!(),
                };
                MetricValue {
                    value,
                    degenerate: ws.degenerate,
                }
            }
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric `{0}` (expected one of: chrf, chrf++, wer, mer, wil, wip)")]
pub struct UnknownMetric(pub String);

impl FromStr for MetricId {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "chrf" => Ok(MetricId::Chrf),
            "chrf++" | "chrf_pp" | "chrfpp" => Ok(MetricId::ChrfPp),
            "wer" => Ok(MetricId::Wer),
            "mer" => Ok(MetricId::Mer),
            "wil" => Ok(MetricId::Wil),
            "wip" => Ok(MetricId::Wip),
            _ => Err(UnknownMetric(s.to_string())),
        }
    }
}

impl TryFrom<String> for MetricId {
    type Error = UnknownMetric;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MetricId> for String {
    fn from(m: MetricId) -> String {
        m.token().to_string()
    }
}

/// Which side(s) of a pair were empty after tokenization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degenerate {
    EmptyHypothesis,
    EmptyReference,
    BothEmpty,
}

impl Degenerate {
    fn classify(hyp_empty: bool, ref_empty: bool) -> Option<Degenerate> {
        match (hyp_empty, ref_empty) {
            (false, false) => None,
            (true, false) => Some(Degenerate::EmptyHypothesis),
            (false, true) => Some(Degenerate::EmptyReference),
            (true, true) => Some(Degenerate::BothEmpty),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub degenerate: Option<Degenerate>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricOptions {
    /// Lowercase both texts before comparison. Off by default.
    pub case_fold: bool,
}

impl MetricOptions {
    fn fold<'a>(&self, text: &'a str) -> Cow<'a, str> {
        if self.case_fold {
            Cow::Owned(text.to_lowercase())
        } else {
            Cow::Borrowed(text)
        }
    }
}

/// Whitespace tokenization: trim, then split on runs of whitespace.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarity_table() {
        use Polarity::*;
        let expected = [Similarity, Similarity, Error, Error, Error, Similarity];
        for (m, p) in MetricId::ALL.iter().zip(expected) {
            assert_eq!(m.polarity(), p, "{m}");
        }
    }

    #[test]
    fn tokens_round_trip() {
        for m in MetricId::ALL {
            assert_eq!(m.token().parse::<MetricId>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(serde_json::from_str::<MetricId>(&json).unwrap(), m);
        }
        assert!("bleu".parse::<MetricId>().is_err());
    }

    #[test]
    fn case_fold_is_opt_in() {
        let folded = MetricOptions { case_fold: true };
        assert_eq!(MetricId::Wer.score("Hello World", "hello world"), 1.0);
        assert_eq!(
            MetricId::Wer.score_detailed("Hello World", "hello world", &folded).value,
            0.0
        );
        assert_eq!(
            MetricId::Chrf.score_detailed("Hello", "hello", &folded).value,
            100.0
        );
    }

    #[test]
    fn degenerate_pairs_are_flagged() {
        let opts = MetricOptions::default();
        assert_eq!(
            MetricId::Wer.score_detailed("a b", "", &opts).degenerate,
            Some(Degenerate::EmptyReference)
        );
        assert_eq!(MetricId::Chrf.score_detailed("", "", &opts).degenerate, Some(Degenerate::BothEmpty));
        assert_eq!(MetricId::Mer.score_detailed("a", "b", &opts).degenerate, None);
    }
}

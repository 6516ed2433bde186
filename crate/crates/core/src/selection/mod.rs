//! Picks one transcript per utterance, either by consensus ranking against the
//! other systems' outputs or by a surface heuristic (length, punctuation).

mod consensus;
mod heuristics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{AsrSystemId, Utterance};
use crate::textmetrics::MetricId;

pub use consensus::{consensus_rank, RankedCandidate};
pub use heuristics::{char_count_no_spaces, punc_count, select_heuristic, PUNCTUATION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectionError {
    #[error("no candidate transcripts to select from")]
    NoCandidates,
    #[error("unknown selection strategy `{0}`; valid tokens: {tokens}", tokens = strategy_tokens().join(", "))]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeuristicId {
    Longest,
    Shortest,
    MostPunc,
    LeastPunc,
    Random,
    LongestAndMostPunc,
    LongestAndLeastPunc,
    ShortestAndMostPunc,
    /// Completes the length × punctuation grid; not one of the originally trialled composites.
    ShortestAndLeastPunc,
}

impl HeuristicId {
    pub const ALL: [HeuristicId; 9] = [
        HeuristicId::Longest,
        HeuristicId::Shortest,
        HeuristicId::MostPunc,
        HeuristicId::LeastPunc,
        HeuristicId::Random,
        HeuristicId::LongestAndMostPunc,
        HeuristicId::LongestAndLeastPunc,
        HeuristicId::ShortestAndMostPunc,
        HeuristicId::ShortestAndLeastPunc,
    ];

    pub fn token(self) -> &'static str {
        match self {
            HeuristicId::Longest => "longest",
            HeuristicId::Shortest => "shortest",
            HeuristicId::MostPunc => "most_punc",
            HeuristicId::LeastPunc => "least_punc",
            HeuristicId::Random => "random",
            HeuristicId::LongestAndMostPunc => "longest_and_most_punc",
            HeuristicId::LongestAndLeastPunc => "longest_and_least_punc",
            HeuristicId::ShortestAndMostPunc => "shortest_and_most_punc",
            HeuristicId::ShortestAndLeastPunc => "shortest_and_least_punc",
        }
    }
}

impl fmt::Display for HeuristicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// How a transcript is chosen, serialized as its token (`chrf++`, `least_punc`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SelectionMethod {
    Ranking(MetricId),
    Heuristic(HeuristicId),
}

impl SelectionMethod {
    pub fn all() -> Vec<SelectionMethod> {
        MetricId::ALL
            .into_iter()
            .map(SelectionMethod::Ranking)
            .chain(HeuristicId::ALL.into_iter().map(SelectionMethod::Heuristic))
            .collect()
    }

    pub fn token(self) -> &'static str {
        match self {
            SelectionMethod::Ranking(m) => m.token(),
            SelectionMethod::Heuristic(h) => h.token(),
        }
    }

    pub fn is_ranking(self) -> bool {
        matches!(self, SelectionMethod::Ranking(_))
    }
}

/// Every accepted strategy token, ranking metrics first.
pub fn strategy_tokens() -> Vec<&'static str> {
    SelectionMethod::all().into_iter().map(SelectionMethod::token).collect()
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SelectionMethod {
    type Err = SelectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(m) = s.parse::<MetricId>() {
            return Ok(SelectionMethod::Ranking(m));
        }
        HeuristicId::ALL
            .into_iter()
            .find(|h| h.token() == s)
            .map(SelectionMethod::Heuristic)
            .ok_or_else(|| SelectionError::UnknownStrategy(s.to_string()))
    }
}

impl TryFrom<String> for SelectionMethod {
    type Error = SelectionError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SelectionMethod> for String {
    fn from(m: SelectionMethod) -> String {
        m.token().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SelectionStrategy {
    pub method: SelectionMethod,
    /// Only consulted by `random`.
    #[serde(default)]
    pub seed: u64,
}

impl SelectionStrategy {
    pub fn new(method: SelectionMethod, seed: u64) -> Self {
        SelectionStrategy { method, seed }
    }
}

/// The chosen transcript with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub utterance_id: String,
    pub system: AsrSystemId,
    pub text: String,
    pub strategy: SelectionMethod,
    /// Full ranking when the strategy is a consensus metric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<RankedCandidate>>,
}

pub fn select(utterance: &Utterance, strategy: &SelectionStrategy) -> Result<Selection, SelectionError> {
    let candidates = utterance.candidates();
    match strategy.method {
        SelectionMethod::Ranking(metric) => {
            let ranked = consensus_rank(&candidates, metric)?;
            let best = &ranked[0];
            Ok(Selection {
                utterance_id: utterance.id.clone(),
                system: best.system,
                text: best.text.clone(),
                strategy: strategy.method,
                ranking: Some(ranked),
            })
        }
        SelectionMethod::Heuristic(h) => {
            let (system, text) = select_heuristic(&candidates, h, strategy.seed, &utterance.id)?;
            Ok(Selection {
                utterance_id: utterance.id.clone(),
                system,
                text: text.to_string(),
                strategy: strategy.method,
                ranking: None,
            })
        }
    }
}

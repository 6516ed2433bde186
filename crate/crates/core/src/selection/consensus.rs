use serde::{Deserialize, Serialize};

use super::SelectionError;
use crate::corpus::AsrSystemId;
use crate::textmetrics::{MetricId, MetricOptions, Polarity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub system: AsrSystemId,
    pub text: String,
    /// Sum of the metric of this transcript (as hypothesis) against every other one.
    pub aggregated_score: f64,
    /// 1 is the consensus pick.
    pub rank: usize,
    /// Pairs that hit an empty-text policy while computing the score.
    #[serde(default)]
    pub degenerate_pairs: usize,
}

/// Ranks transcripts by their summed agreement with all the others.
///
/// `score_k = Σ_{i≠k} metric(text_k, text_i)`, with transcript `k` as the
/// hypothesis. Similarity metrics sort descending, error metrics ascending,
/// and ties go to the higher-priority system. Terms are summed in sorted
/// order so that texts with the same multiset of pairings score bit-identically.
pub fn consensus_rank(
    candidates: &[(AsrSystemId, &str)],
    metric: MetricId,
) -> Result<Vec<RankedCandidate>, SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let opts = MetricOptions::default();
    let n = candidates.len();

    let mut scored: Vec<(usize, f64, usize)> = Vec::with_capacity(n);
    for k in 0..n {
        let mut terms = Vec::with_capacity(n.saturating_sub(1));
        let mut degenerate = 0;
        for i in (0..n).filter(|&i| i != k) {
            let v = metric.score_detailed(candidates[k].1, candidates[i].1, &opts);
            degenerate += usize::from(v.degenerate.is_some());
            terms.push(v.value);
        }
        terms.sort_by(f64::total_cmp);
        scored.push((k, terms.iter().sum(), degenerate));
    }

    scored.sort_by(|a, b| {
        let by_score = match metric.polarity() {
            Polarity::Similarity => b.1.total_cmp(&a.1),
            Polarity::Error => a.1.total_cmp(&b.1),
        };
        by_score
            .then_with(|| candidates[a.0].0.cmp(&candidates[b.0].0))
            .then(a.0.cmp(&b.0))
    });

    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(pos, (k, score, degenerate_pairs))| RankedCandidate {
            system: candidates[k].0,
            text: candidates[k].1.to_string(),
            aggregated_score: score,
            rank: pos + 1,
            degenerate_pairs,
        })
        .collect())
}

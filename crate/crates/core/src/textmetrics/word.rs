use serde::{Deserialize, Serialize};

use super::align::align_tokens;
use super::{tokenize, AlignmentCounts, Degenerate, MetricOptions};

/// All four word-level measures of one (hypothesis, reference) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordScores {
    pub counts: AlignmentCounts,
    pub wer: f64,
    pub mer: f64,
    pub wil: f64,
    pub wip: f64,
    pub degenerate: Option<Degenerate>,
}

pub fn word_scores(hypothesis: &str, reference: &str) -> WordScores {
    word_scores_with(hypothesis, reference, &MetricOptions::default())
}

pub(crate) fn word_scores_with(hypothesis: &str, reference: &str, opts: &MetricOptions) -> WordScores {
    let hyp = opts.fold(hypothesis);
    let reference = opts.fold(reference);
    let counts = align_tokens(&tokenize(&hyp), &tokenize(&reference));
    from_counts(counts)
}

pub(crate) fn from_counts(c: AlignmentCounts) -> WordScores {
    let n_ref = c.reference_len();
    let n_hyp = c.hypothesis_len();
    let edits = c.edits() as f64;
    let degenerate = Degenerate::classify(n_hyp == 0, n_ref == 0);

    // Empty reference: WER is the raw insertion count (denominator 1).
    let wer = if n_ref == 0 { c.insertions as f64 } else { edits / n_ref as f64 };
    let mer_denom = c.hits + c.edits();
    let mer = if mer_denom == 0 { 0.0 } else { edits / mer_denom as f64 };
    let wip = match (n_ref, n_hyp) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => (c.hits as f64 / n_ref as f64) * (c.hits as f64 / n_hyp as f64),
    };
    WordScores {
        counts: c,
        wer,
        mer,
        wil: 1.0 - wip,
        wip,
        degenerate,
    }
}

/// Word error rate, `(S + D + I) / N_ref`. May exceed 1.
pub fn wer(hypothesis: &str, reference: &str) -> f64 {
    word_scores(hypothesis, reference).wer
}

/// Match error rate, `(S + D + I) / (H + S + D + I)`.
pub fn mer(hypothesis: &str, reference: &str) -> f64 {
    word_scores(hypothesis, reference).mer
}

/// Word information preserved, `(H / N_ref) * (H / N_hyp)`.
pub fn wip(hypothesis: &str, reference: &str) -> f64 {
    word_scores(hypothesis, reference).wip
}

/// Word information lost, `1 - WIP`.
pub fn wil(hypothesis: &str, reference: &str) -> f64 {
    word_scores(hypothesis, reference).wil
}

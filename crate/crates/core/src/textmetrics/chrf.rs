use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrfParams {
    pub char_order: usize,
    pub word_order: usize,
    pub beta: f64,
}

impl Default for ChrfParams {
    fn default() -> Self {
        ChrfParams {
            char_order: 6,
            word_order: 0,
            beta: 2.0,
        }
    }
}

impl ChrfParams {
    pub fn plus_plus() -> Self {
        ChrfParams {
            word_order: 2,
            ..ChrfParams::default()
        }
    }
}

/// chrF with default parameters (character 6-grams, beta 2).
pub fn chrf(hypothesis: &str, reference: &str) -> f64 {
    chrf_with(hypothesis, reference, &ChrfParams::default())
}

/// chrF++: chrF plus word unigrams and bigrams.
pub fn chrf_pp(hypothesis: &str, reference: &str) -> f64 {
    chrf_with(hypothesis, reference, &ChrfParams::plus_plus())
}

/// Character (and optionally word) n-gram F-score in `[0, 100]`.
///
/// Character n-grams are taken after removing all whitespace. Precision and
/// recall are averaged over the orders where both sides have n-grams
/// (effective order) and combined into a single F-beta. Two empty texts
/// score 100; one empty side scores 0.
pub fn chrf_with(hypothesis: &str, reference: &str, params: &ChrfParams) -> f64 {
    let hyp_chars: Vec<char> = hypothesis.chars().filter(|c| !c.is_whitespace()).collect();
    let ref_chars: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    match (hyp_chars.is_empty(), ref_chars.is_empty()) {
        (true, true) => return 100.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }

    let mut stats = Vec::with_capacity(params.char_order + params.word_order);
    for n in 1..=params.char_order {
        stats.push(order_stats(&hyp_chars, &ref_chars, n));
    }
    if params.word_order > 0 {
        let hyp_words = split_punctuation(hypothesis);
        let ref_words = split_punctuation(reference);
        for n in 1..=params.word_order {
            stats.push(order_stats(&hyp_words, &ref_words, n));
        }
    }
    f_score(&stats, params.beta)
}

#[derive(Debug, Clone, Copy)]
struct OrderStats {
    hyp: usize,
    reference: usize,
    matches: usize,
}

fn ngram_counts<T: Eq + Hash>(seq: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if n > 0 && seq.len() >= n {
        for gram in seq.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn order_stats<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> OrderStats {
    let hyp_counts = ngram_counts(hyp, n);
    let ref_counts = ngram_counts(reference, n);
    let matches = hyp_counts
        .iter()
        .filter_map(|(gram, &h)| ref_counts.get(gram).map(|&r| h.min(r)))
        .sum();
    OrderStats {
        hyp: hyp_counts.values().sum(),
        reference: ref_counts.values().sum(),
        matches,
    }
}

fn f_score(stats: &[OrderStats], beta: f64) -> f64 {
    let factor = beta * beta;
    let mut avg_prec = 0.0;
    let mut avg_rec = 0.0;
    let mut effective_order = 0usize;
    for s in stats {
        if s.hyp > 0 && s.reference > 0 {
            avg_prec += s.matches as f64 / s.hyp as f64;
            avg_rec += s.matches as f64 / s.reference as f64;
            effective_order += 1;
        }
    }
    if effective_order == 0 {
        return 0.0;
    }
    avg_prec /= effective_order as f64;
    avg_rec /= effective_order as f64;
    if avg_prec + avg_rec == 0.0 {
        return 0.0;
    }
    100.0 * (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
}

fn is_ascii_punct(c: char) -> bool {
    c.is_ascii_punctuation()
}

/// Word tokens for chrF++: one leading or trailing punctuation mark is split
/// off each multi-character word (trailing takes precedence).
fn split_punctuation(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for w in text.split_whitespace() {
        let mut chars = w.chars();
        let first = chars.next();
        let last = w.chars().next_back();
        if w.chars().nth(1).is_none() {
            out.push(w);
        } else if let Some(last) = last.filter(|&c| is_ascii_punct(c)) {
            let cut = w.len() - last.len_utf8();
            out.push(&w[..cut]);
            out.push(&w[cut..]);
        } else if let Some(first) = first.filter(|&c| is_ascii_punct(c)) {
            let cut = first.len_utf8();
            out.push(&w[..cut]);
            out.push(&w[cut..]);
        } else {
            out.push(w);
        }
    }
    out
}

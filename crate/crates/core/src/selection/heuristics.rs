use super::{HeuristicId, SelectionError};
use crate::corpus::AsrSystemId;
use crate::keyed_rng;

/// Characters counted by the punctuation heuristics.
pub const PUNCTUATION: &str = "!?.,;:-$%&";

/// Length used by the length heuristics: non-whitespace characters.
pub fn char_count_no_spaces(text: &str) -> usize {
    text.chars().filter(|c| !c.is_whitespace()).count()
}

pub fn punc_count(text: &str) -> usize {
    text.chars().filter(|c| PUNCTUATION.contains(*c)).count()
}

#[derive(Clone, Copy)]
enum Direction {
    Max,
    Min,
}

fn keys(h: HeuristicId) -> (Option<Direction>, Option<Direction>) {
    use Direction::*;
    match h {
        HeuristicId::Longest => (Some(Max), None),
        HeuristicId::Shortest => (Some(Min), None),
        HeuristicId::MostPunc => (None, Some(Max)),
        HeuristicId::LeastPunc => (None, Some(Min)),
        HeuristicId::LongestAndMostPunc => (Some(Max), Some(Max)),
        HeuristicId::LongestAndLeastPunc => (Some(Max), Some(Min)),
        HeuristicId::ShortestAndMostPunc => (Some(Min), Some(Max)),
        HeuristicId::ShortestAndLeastPunc => (Some(Min), Some(Min)),
        HeuristicId::Random => (None, None),
    }
}

fn directed(value: usize, dir: Option<Direction>) -> i64 {
    match dir {
        Some(Direction::Min) => value as i64,
        Some(Direction::Max) => -(value as i64),
        None => 0,
    }
}

/// Chooses a transcript by a surface heuristic.
///
/// Composites sort by length first and punctuation second; remaining ties go
/// to the higher-priority system. `random` draws uniformly from a stream keyed
/// by `(seed, utterance_id)`, over candidates in priority order.
pub fn select_heuristic<'a>(
    candidates: &[(AsrSystemId, &'a str)],
    heuristic: HeuristicId,
    seed: u64,
    utterance_id: &str,
) -> Result<(AsrSystemId, &'a str), SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let mut ordered: Vec<(usize, AsrSystemId, &'a str)> =
        candidates.iter().enumerate().map(|(i, (s, t))| (i, *s, *t)).collect();
    ordered.sort_by_key(|&(i, sys, _)| (sys, i));

    let pick = if heuristic == HeuristicId::Random {
        let mut rng = keyed_rng::keyed_rng("selection.random", seed, utterance_id);
        ordered[keyed_rng::index(&mut rng, ordered.len())]
    } else {
        let (len_dir, punc_dir) = keys(heuristic);
        *ordered
            .iter()
            .min_by_key(|(_, _, text)| {
                (
                    directed(char_count_no_spaces(text), len_dir),
                    directed(punc_count(text), punc_dir),
                )
            })
            .expect("non-empty")
    };
    Ok((pick.1, pick.2))
}

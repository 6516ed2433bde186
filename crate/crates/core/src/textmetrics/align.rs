use serde::{Deserialize, Serialize};

use super::tokenize;

/// Hit/substitution/deletion/insertion counts of a word alignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentCounts {
    pub hits: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

impl AlignmentCounts {
    pub fn edits(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    pub fn reference_len(&self) -> usize {
        self.hits + self.substitutions + self.deletions
    }

    pub fn hypothesis_len(&self) -> usize {
        self.hits + self.substitutions + self.insertions
    }
}

/// Aligns whitespace tokens of `hypothesis` against `reference`.
///
/// The alignment minimises S + D + I with unit costs. Several alignments can
/// reach the same cost with different hit counts (e.g. `b a` vs `a b`); the
/// one with the most hits is chosen, which fixes every count uniquely.
pub fn word_align(hypothesis: &str, reference: &str) -> AlignmentCounts {
    align_tokens(&tokenize(hypothesis), &tokenize(reference))
}

pub(crate) fn align_tokens<T: PartialEq>(hyp: &[T], reference: &[T]) -> AlignmentCounts {
    let (n_ref, n_hyp) = (reference.len(), hyp.len());

    // (cost, hits) per cell, ordered by lower cost then more hits. Both
    // components are additive along a path, so the lexicographic optimum
    // has optimal substructure and one row of state suffices.
    #[derive(Clone, Copy)]
    struct Cell {
        cost: usize,
        hits: usize,
    }
    fn better(a: Cell, b: Cell) -> Cell {
        if a.cost < b.cost || (a.cost == b.cost && a.hits >= b.hits) {
            a
        } else {
            b
        }
    }

    let mut prev: Vec<Cell> = (0..=n_hyp).map(|j| Cell { cost: j, hits: 0 }).collect();
    let mut cur = prev.clone();
    for i in 1..=n_ref {
        cur[0] = Cell { cost: i, hits: 0 };
        for j in 1..=n_hyp {
            let diag = prev[j - 1];
            let diag = if reference[i - 1] == hyp[j - 1] {
                Cell {
                    cost: diag.cost,
                    hits: diag.hits + 1,
                }
            } else {
                Cell {
                    cost: diag.cost + 1,
                    hits: diag.hits,
                }
            };
            let deletion = Cell {
                cost: prev[j].cost + 1,
                hits: prev[j].hits,
            };
            let insertion = Cell {
                cost: cur[j - 1].cost + 1,
                hits: cur[j - 1].hits,
            };
            cur[j] = better(better(diag, deletion), insertion);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let Cell { cost, hits } = prev[n_hyp];

    // cost = S + D + I, D = n_ref - H - S, I = n_hyp - H - S.
    let substitutions = n_ref + n_hyp - 2 * hits - cost;
    AlignmentCounts {
        hits,
        substitutions,
        deletions: n_ref - hits - substitutions,
        insertions: n_hyp - hits - substitutions,
    }
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use emoprompt_core::corpus::{AsrSystemId, Session, Sex, Utterance};
use emoprompt_core::gateway::{MockRule, MockTransport};
use emoprompt_core::orchestrator::{ExperimentConfig, TransportConfig};
use emoprompt_core::promptgen::{build_prompt, ContextConfig, PromptRecord};
use emoprompt_core::selection::{char_count_no_spaces, punc_count, HeuristicId, SelectionMethod, SelectionStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use AsrSystemId::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counts from a brute-force search over every order-preserving pairing of
/// reference and hypothesis positions. Unpaired reference tokens are
/// deletions, unpaired hypothesis tokens insertions, pairs are hits or
/// substitutions. Picks minimum edits, then maximum hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCounts {
    pub hits: usize,
    pub subs: usize,
    pub dels: usize,
    pub ins: usize,
}

type SubsetTable = Vec<Vec<Vec<Vec<usize>>>>;

/// `k`-subsets of `0..n` for every `n <= 12`, built once.
fn subsets(n: usize, k: usize) -> &'static [Vec<usize>] {
    static TABLE: std::sync::OnceLock<SubsetTable> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=12usize)
            .map(|n| {
                let mut by_k = vec![Vec::new(); n + 1];
                for mask in 0u32..(1 << n) {
                    by_k[mask.count_ones() as usize].push((0..n).filter(|i| mask & (1 << i) != 0).collect());
                }
                by_k
            })
            .collect()
    });
    &table[n][k]
}

pub fn oracle_align<T: PartialEq>(hyp: &[T], reference: &[T]) -> OracleCounts {
    let (n, m) = (reference.len(), hyp.len());
    // Edits = n + m - k - hits, so maximise (k + hits, hits).
    let mut best: Option<(usize, usize, usize)> = None;
    for k in 0..=n.min(m) {
        let rs = subsets(n, k);
        let hs = subsets(m, k);
        for r in rs {
            for h in hs {
                let hits = r.iter().zip(h).filter(|(&i, &j)| reference[i] == hyp[j]).count();
                let key = (k + hits, hits, k);
                if best.map_or(true, |b| (key.0, key.1) > (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
    }
    let (_, hits, k) = best.unwrap();
    OracleCounts {
        hits,
        subs: k - hits,
        dels: n - k,
        ins: m - k,
    }
}

/// (wer, mer, wip, wil) from oracle counts, with the library's empty-text policies.
pub fn oracle_metrics(c: OracleCounts) -> (f64, f64, f64, f64) {
    let n_ref = c.hits + c.subs + c.dels;
    let n_hyp = c.hits + c.subs + c.ins;
    let edits = (c.subs + c.dels + c.ins) as f64;
    let wer = if n_ref == 0 { c.ins as f64 } else { edits / n_ref as f64 };
    let denom = c.hits as f64 + edits;
    let mer = if denom == 0.0 { 0.0 } else { edits / denom };
    let wip = if n_ref == 0 && n_hyp == 0 {
        1.0
    } else if n_ref == 0 || n_hyp == 0 {
        0.0
    } else {
        (c.hits as f64 / n_ref as f64) * (c.hits as f64 / n_hyp as f64)
    };
    (wer, mer, wip, 1.0 - wip)
}

/// Every sequence of length `0..=max_len` over `alphabet`.
pub fn all_sequences(alphabet: &[&'static str], max_len: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for &a in alphabet {
                let mut s: Vec<&'static str> = seq.clone();
                s.push(a);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub const WORDS: [&str; 8] = ["the", "cat", "sat", "on", "a", "mat", "dog", "ran"];

pub fn random_words<R: Rng>(rng: &mut R, min: usize, max: usize) -> String {
    let len = rng.random_range(min..=max);
    (0..len).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
}

/// Random text with words, spaces and punctuation from the heuristic set.
pub fn random_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    const CHARS: &[u8] = b"abcxyz  !?.,;:-$%&'\"";
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| CHARS[rng.random_range(0..CHARS.len())] as char).collect()
}

/// Attaches systems in priority order.
pub fn with_systems(texts: &[String]) -> Vec<(AsrSystemId, &str)> {
    texts.iter().zip(AsrSystemId::ALL).map(|(t, s)| (s, t.as_str())).collect()
}

pub fn utt(i: usize, sex: Sex, transcripts: &[(AsrSystemId, &str)]) -> Utterance {
    Utterance {
        id: format!("u{i}"),
        speaker_id: format!("spk_{sex}"),
        speaker_sex: sex,
        transcripts: transcripts.iter().map(|(s, t)| (*s, t.to_string())).collect(),
        needs_prediction: true,
        gold_emotion: None,
    }
}

pub fn least_punc() -> SelectionStrategy {
    SelectionStrategy::new(SelectionMethod::Heuristic(HeuristicId::LeastPunc), 0)
}

/// Replaces each `marker` in turn with the next value.
pub fn instantiate(template: &str, marker: &str, values: &[&str]) -> String {
    let parts: Vec<&str> = template.split(marker).collect();
    assert_eq!(parts.len(), values.len() + 1, "placeholder count for {marker}");
    let mut out = parts[0].to_string();
    for (v, p) in values.iter().zip(&parts[1..]) {
        out.push_str(v);
        out.push_str(p);
    }
    out
}

pub fn fig1_session() -> Session {
    Session {
        id: "s1".into(),
        utterances: vec![
            utt(0, Sex::Female, &[(HubertLarge, "WHERE WERE YOU"), (WhisperTiny, "Where were you?")]),
            utt(1, Sex::Male, &[(HubertLarge, "I WAS AT WORK"), (WhisperTiny, "I was at work.")]),
            utt(2, Sex::Female, &[(HubertLarge, "YOU SAID THAT YESTERDAY"), (WhisperTiny, "You said that yesterday!")]),
        ],
    }
}

pub fn fig2_session() -> Session {
    let mut utterances = vec![utt(0, Sex::Female, &[(WhisperTiny, "Hi.")])];
    for (i, (sex, text)) in [
        (Sex::Male, "So you got the letter"),
        (Sex::Female, "I did and I read it twice"),
        (Sex::Male, "And what did it say"),
        (Sex::Female, "They turned me down"),
    ]
    .into_iter()
    .enumerate()
    {
        utterances.push(utt(i + 1, sex, &[(WhisperTiny, text)]));
    }
    utterances.push(utt(
        5,
        Sex::Male,
        &[
            (HubertLarge, "I AM SO SORRY"),
            (W2v2100, "I AM SO SORY"),
            (W2v2960, "I'M SO SORRY"),
            (WavlmPlus, "EYE AM SO SORRY"),
            (WhisperBase, "I am so sorry."),
            (WhisperLarge, "I am so, so sorry."),
            (WhisperTiny, "I'm so sorry."),
        ],
    ));
    Session {
        id: "s2".into(),
        utterances,
    }
}

/// Fusion seed whose ordering puts the selected transcript third of five,
/// as in the golden template.
pub const FIG2_SEED: u64 = 11;

pub fn fig2_record(seed: u64) -> PromptRecord {
    build_prompt(&fig2_session(), 5, &least_punc(), &ContextConfig::new(4, 5, seed).unwrap()).unwrap()
}

pub const PINNED_ORDER: [AsrSystemId; 5] = [WhisperTiny, W2v2960, HubertLarge, W2v2100, WhisperBase];

#[derive(Deserialize)]
pub struct Expected {
    pub targets: usize,
    pub correct: usize,
    pub fallback: usize,
    pub rules: Vec<(String, String)>,
    pub default: String,
}

pub fn expected() -> Expected {
    serde_json::from_str(&std::fs::read_to_string(fixture("mock50_expected.json")).unwrap()).unwrap()
}

pub fn mock50_config(out: &Path) -> ExperimentConfig {
    let e = expected();
    let mut cfg = ExperimentConfig::new(fixture("mock50.jsonl"), SelectionMethod::Heuristic(HeuristicId::LeastPunc), out);
    cfg.cw = 2;
    cfg.transport = TransportConfig::Mock {
        builtin: false,
        rules: e.rules.iter().map(|(k, v)| MockRule::new(k, v)).collect(),
        default_response: e.default,
    };
    cfg
}

pub fn mock_transport() -> MockTransport {
    let e = expected();
    MockTransport::new(e.rules.iter().map(|(k, v)| MockRule::new(k, v)).collect(), e.default)
}


pub const HEURISTICS: [HeuristicId; 9] = [
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

/// Brute-force key of a heuristic: bigger is better.
pub fn key(h: HeuristicId, text: &str) -> (i64, i64) {
    let len = char_count_no_spaces(text) as i64;
    let punc = punc_count(text) as i64;
    match h {
        HeuristicId::Longest => (len, 0),
        HeuristicId::Shortest => (-len, 0),
        HeuristicId::MostPunc => (punc, 0),
        HeuristicId::LeastPunc => (-punc, 0),
        HeuristicId::LongestAndMostPunc => (len, punc),
        HeuristicId::LongestAndLeastPunc => (len, -punc),
        HeuristicId::ShortestAndMostPunc => (-len, punc),
        HeuristicId::ShortestAndLeastPunc => (-len, -punc),
        HeuristicId::Random => (0, 0),
    }
}

pub fn majority_sets(seed: u64, count: usize, perturbed: bool) -> Vec<(String, Vec<String>)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(3..=11);
            let majority = random_words(&mut r, 1, 8);
            let mut texts = vec![majority.clone(); n / 2 + 1];
            while texts.len() < n {
                let t = if perturbed {
                    perturb(&mut r, &majority)
                } else {
                    random_words(&mut r, 1, 8)
                };
                if t != majority && !t.is_empty() {
                    texts.push(t);
                }
            }
            emoprompt_core::keyed_rng::shuffle(&mut r, &mut texts);
            (majority, texts)
        })
        .collect()
}

pub fn perturb<R: Rng>(r: &mut R, base: &str) -> String {
    let mut words: Vec<&str> = base.split(' ').collect();
    for _ in 0..r.random_range(1..=3) {
        let w = WORDS[r.random_range(0..WORDS.len())];
        match r.random_range(0..3) {
            0 => {
                let i = r.random_range(0..words.len());
                words[i] = w;
            }
            1 if words.len() > 1 => {
                words.remove(r.random_range(0..words.len()));
            }
            _ => words.insert(r.random_range(0..=words.len()), w),
        }
    }
    words.join(" ")
}


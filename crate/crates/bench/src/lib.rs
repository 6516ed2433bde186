//! Synthetic workloads shared by the benchmarks.

use std::collections::BTreeMap;

use emoprompt_core::corpus::{AsrSystemId, Emotion, Session, Sex, Utterance};
use emoprompt_core::keyed_rng::{index, keyed_rng};

const VOCAB: [&str; 16] = [
    "i", "you", "the", "was", "not", "really", "going", "to", "say", "that", "well", "okay", "so", "what", "now", "again",
];

/// `len` words drawn from a small vocabulary.
pub fn sentence(seed: u64, key: &str, len: usize) -> String {
    let mut rng = keyed_rng("bench", seed, key);
    (0..len).map(|_| VOCAB[index(&mut rng, VOCAB.len())]).collect::<Vec<_>>().join(" ")
}

/// A noisy copy of `base`: each word is kept with probability 3/4.
pub fn noisy(base: &str, seed: u64, key: &str) -> String {
    let mut rng = keyed_rng("bench.noise", seed, key);
    base.split(' ')
        .map(|w| if index(&mut rng, 4) == 0 { VOCAB[index(&mut rng, VOCAB.len())] } else { w })
        .collect::<Vec<_>>()
        .join(" ")
}

/// All eleven systems transcribing one `len`-word utterance.
pub fn utterance(id: &str, len: usize, seed: u64) -> Utterance {
    let base = sentence(seed, id, len);
    let transcripts: BTreeMap<AsrSystemId, String> = AsrSystemId::ALL
        .iter()
        .map(|&s| (s, noisy(&base, seed, &format!("{id}/{s}"))))
        .collect();
    Utterance {
        id: id.to_string(),
        speaker_id: format!("spk{}", id.len() % 2),
        speaker_sex: [Sex::Female, Sex::Male][id.len() % 2],
        transcripts,
        needs_prediction: true,
        gold_emotion: Some(Emotion::ALL[id.len() % 4]),
    }
}

/// One session of `n` alternating-speaker utterances.
pub fn session(n: usize, len: usize, seed: u64) -> Session {
    let utterances = (0..n)
        .map(|i| {
            let mut u = utterance(&format!("u{i:04}"), len, seed);
            u.speaker_sex = if i % 2 == 0 { Sex::Female } else { Sex::Male };
            u.speaker_id = format!("spk{}", i % 2);
            u.gold_emotion = Some(Emotion::ALL[i % 4]);
            u
        })
        .collect();
    Session {
        id: format!("bench{seed}"),
        utterances,
    }
}

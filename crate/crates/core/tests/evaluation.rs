mod common;

use common::rng;
use emoprompt_core::corpus::{AsrSystemId, Emotion};
use emoprompt_core::evaluation::{
    bca_interval, build_report, format_acc_ci, BootstrapOptions, ConfusionMatrix, EvalError, ParseStatus,
    PredictionRecord,
};
use emoprompt_core::gateway::Source;
use emoprompt_core::keyed_rng::shuffle;
use proptest::prelude::*;
use rand::Rng;

const LABELS: [Emotion; 4] = [Emotion::Angry, Emotion::Happy, Emotion::Sad, Emotion::Neutral];

fn record(i: usize, gold: Emotion, predicted: Option<Emotion>) -> PredictionRecord {
    PredictionRecord {
        session_id: format!("Ses0{}", i % 5),
        utterance_id: format!("u{i:04}"),
        gold: Some(gold),
        predicted,
        parse_status: if predicted.is_some() { ParseStatus::Parsed } else { ParseStatus::Failed },
        selected_system: AsrSystemId::WhisperTiny,
        prompt_checksum: String::new(),
        request_digest: String::new(),
        source: Source::Mock,
    }
}

fn random_records(seed: u64, n: usize) -> Vec<PredictionRecord> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let gold = LABELS[r.random_range(0..4)];
            let pred = match r.random_range(0..10) {
                0 => None,
                1..=5 => Some(gold),
                _ => Some(LABELS[r.random_range(0..4)]),
            };
            record(i, gold, pred)
        })
        .collect()
}

#[test]
fn all_neutral_predictor_scores_the_prior() {
    let mut r = rng(1);
    let recs: Vec<_> = (0..400).map(|i| record(i, LABELS[r.random_range(0..4)], Some(Emotion::Neutral))).collect();
    let prior = recs.iter().filter(|x| x.gold == Some(Emotion::Neutral)).count() as f64 / 400.0;
    let report = build_report(&recs, "neutral", &BootstrapOptions::default()).unwrap();
    assert!((report.accuracy - prior).abs() < 1e-12);
    assert!((report.macro_recall - 0.25).abs() < 1e-12);
    assert_eq!(report.per_class_recall[&Emotion::Neutral], 1.0);
    assert_eq!(report.per_class_recall[&Emotion::Angry], 0.0);
}

#[test]
fn confusion_marginals() {
    let recs = random_records(2, 300);
    let m = ConfusionMatrix::from_records(&recs);
    assert_eq!(m.total(), 300);
    for g in LABELS {
        let gold = recs.iter().filter(|r| r.gold == Some(g)).count() as u64;
        assert_eq!(m.row_sum(g), gold);
    }
    let report = build_report(&recs, "x", &BootstrapOptions::default()).unwrap();
    let diag: u64 = (0..4).map(|i| m.counts[i][i]).sum();
    assert_eq!(diag as usize, report.correct);
    let unparsed: u64 = m.counts.iter().map(|row| row[4]).sum();
    assert_eq!(unparsed as usize, report.parse.failed);
}

#[test]
fn report_ignores_record_order() {
    let recs = random_records(3, 120);
    let opts = BootstrapOptions {
        seed: 9,
        ..BootstrapOptions::default()
    };
    let base = build_report(&recs, "x", &opts).unwrap();
    let mut r = rng(4);
    for _ in 0..5 {
        let mut shuffled = recs.clone();
        shuffle(&mut r, &mut shuffled);
        assert_eq!(build_report(&shuffled, "x", &opts).unwrap().to_json(), base.to_json());
    }
}

#[test]
fn interval_widens_as_alpha_shrinks() {
    let flags: Vec<f64> = random_records(5, 200).iter().map(|r| f64::from(u8::from(r.is_correct() == Some(true)))).collect();
    let mut prev: Option<(f64, f64)> = None;
    for alpha in [0.5, 0.3, 0.2, 0.1, 0.05, 0.01] {
        let opts = BootstrapOptions {
            alpha,
            resamples: 2000,
            seed: 1,
        };
        let ci = bca_interval(&flags, &opts).unwrap();
        if let Some((lo, hi)) = prev {
            assert!(ci.lo <= lo && ci.hi >= hi, "alpha {alpha}: [{}, {}] inside [{lo}, {hi}]", ci.lo, ci.hi);
        }
        prev = Some((ci.lo, ci.hi));
    }
}

#[test]
fn interval_is_reproducible() {
    let flags: Vec<f64> = (0..50).map(|i| f64::from(u8::from(i % 3 == 0))).collect();
    let opts = BootstrapOptions::default();
    assert_eq!(bca_interval(&flags, &opts).unwrap(), bca_interval(&flags, &opts).unwrap());
    let other = BootstrapOptions {
        seed: 1,
        ..opts
    };
    assert_ne!(bca_interval(&flags, &opts).unwrap(), bca_interval(&flags, &other).unwrap());
}

#[test]
fn degenerate_inputs() {
    let ones = vec![1.0; 30];
    let ci = bca_interval(&ones, &BootstrapOptions::default()).unwrap();
    assert_eq!((ci.lo, ci.hi), (1.0, 1.0));
    assert_eq!(bca_interval(&[1.0], &BootstrapOptions::default()), Err(EvalError::TooFewValues(1)));
    let bad = BootstrapOptions {
        alpha: 1.5,
        ..BootstrapOptions::default()
    };
    assert!(matches!(bca_interval(&[0.0, 1.0], &bad), Err(EvalError::InvalidAlpha(_))));
    assert_eq!(build_report(&[], "x", &BootstrapOptions::default()).unwrap_err(), EvalError::Empty);
}

#[test]
fn headline_format() {
    assert_eq!(format_acc_ci(0.5743, 0.0188), "0.574±0.019");
    let report = build_report(&random_records(6, 80), "cfg", &BootstrapOptions::default()).unwrap();
    assert_eq!(report.headline(), format_acc_ci(report.accuracy, report.interval.half_width()));
}

#[test]
fn coverage_is_near_nominal() {
    // Bernoulli(0.6) samples of 200; the 95% interval should cover the truth
    // in roughly 95% of trials.
    let p = 0.6;
    let trials = 300;
    let mut r = rng(8);
    let mut covered = 0;
    for t in 0..trials {
        let flags: Vec<f64> = (0..200).map(|_| f64::from(u8::from(r.random_bool(p)))).collect();
        let ci = bca_interval(&flags, &BootstrapOptions {
            seed: t,
            ..BootstrapOptions::default()
        })
        .unwrap();
        if ci.lo <= p && p <= ci.hi {
            covered += 1;
        }
    }
    let rate = covered as f64 / trials as f64;
    assert!((0.90..=0.985).contains(&rate), "coverage {rate}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_contains_mean(bits in prop::collection::vec(any::<bool>(), 2..120), seed in 0u64..1000) {
        let flags: Vec<f64> = bits.iter().map(|&b| f64::from(u8::from(b))).collect();
        let mean = flags.iter().sum::<f64>() / flags.len() as f64;
        let ci = bca_interval(&flags, &BootstrapOptions { seed, resamples: 300, ..BootstrapOptions::default() }).unwrap();
        prop_assert!(ci.lo <= mean && mean <= ci.hi);
        prop_assert!((0.0..=1.0).contains(&ci.lo) && (0.0..=1.0).contains(&ci.hi));
    }

    #[test]
    fn accuracy_bounds(seed in 0u64..500, n in 1usize..80) {
        let report = build_report(&random_records(seed, n), "p", &BootstrapOptions { resamples: 200, ..BootstrapOptions::default() }).unwrap();
        prop_assert!((0.0..=1.0).contains(&report.accuracy));
        prop_assert!((0.0..=1.0).contains(&report.macro_recall));
        prop_assert_eq!(report.scored, n);
    }
}

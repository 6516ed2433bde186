use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use emoprompt_core::corpus::parse_canonical;
use emoprompt_core::corpus::ValidationReport;
use emoprompt_core::evaluation::EvalReport;
use emoprompt_core::orchestrator::REPORT_JSON;
use emoprompt_core::promptgen::PromptRecord;
use emoprompt_core::selection::{strategy_tokens, RankedCandidate, Selection};
use serde_json::json;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_emoprompt"));
    c.env_remove("OPENAI_API_KEY").env_remove("RUST_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn core_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn mock50() -> String {
    core_fixture("mock50.jsonl").to_string_lossy().into_owned()
}

fn utt(session: &str, id: &str, sex: &str, transcripts: serde_json::Value) -> String {
    json!({
        "session_id": session,
        "utterance_id": id,
        "speaker_id": format!("{session}_{sex}"),
        "speaker_sex": sex,
        "needs_prediction": true,
        "gold_emotion": "neutral",
        "transcripts": transcripts,
    })
    .to_string()
}

/// A small canonical dataset: a prompt-shaped session, a majority set and
/// identical transcripts.
fn write_dataset(dir: &Path) -> String {
    let lines = [
        utt("p", "u0", "female", json!({"hubertlarge": "WHERE WERE YOU", "whispertiny": "Where were you?"})),
        utt("p", "u1", "male", json!({"hubertlarge": "I WAS AT WORK", "whispertiny": "I was at work."})),
        utt("p", "u2", "female", json!({"hubertlarge": "YOU SAID THAT YESTERDAY", "whispertiny": "You said that yesterday!"})),
        utt(
            "m",
            "maj",
            "female",
            json!({"hubertlarge": "a dog ran", "w2v2100": "the cat sat", "wavlmplus": "the cat sat", "whispertiny": "the cat sat"}),
        ),
        utt("m", "same", "male", json!({"hubertlarge": "ok then", "whisperbase": "ok then", "whispertiny": "ok then"})),
    ];
    let path = dir.join("data.jsonl");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn help_lists_every_strategy_token() {
    let top = stdout(&run(&["--help"]));
    for sub in ["run", "select", "prompt"] {
        let help = stdout(&run(&[sub, "--help"]));
        for t in strategy_tokens() {
            assert!(help.contains(t), "{sub} --help lacks {t}");
            assert!(top.contains(t), "--help lacks {t}");
        }
    }
    for sub in ["ingest", "validate", "rank", "select", "prompt", "run", "sweep", "eval", "report"] {
        assert!(top.contains(sub), "{sub}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let bleu = run(&["rank", &data, "--utterance", "maj", "--metric", "bleu"]);
    assert_eq!(code(&bleu), 2);
    let stderr = String::from_utf8_lossy(&bleu.stderr);
    assert!(stderr.contains("chrf++") && stderr.contains("wip"), "{stderr}");
    assert_eq!(code(&run(&["prompt", &data, "--utterance", "u2", "--n", "12"])), 2);
    assert_eq!(code(&run(&["rank", &data, "--utterance", "nope", "--metric", "wer"])), 3);
    assert_eq!(code(&run(&["validate", "/nonexistent/data.jsonl"])), 3);
    let live = run(&["run", "--dataset", &data, "--out", &dir.path().join("r").to_string_lossy()]);
    assert_eq!(code(&live), 4, "{}", String::from_utf8_lossy(&live.stderr));
    // Credentials are never accepted as flags.
    assert_eq!(code(&run(&["run", "--dataset", &data, "--api-key", "sk-x"])), 2);
    assert_eq!(code(&run(&["validate", &data])), 0);
}

#[test]
fn rank_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let o = run(&["--format", "machine", "rank", &data, "--utterance", "maj", "--metric", "chrf"]);
    let ranked: Vec<RankedCandidate> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(ranked[0].text, "the cat sat");
    assert_eq!(ranked[0].rank, 1);

    let o = run(&["--format", "machine", "rank", &data, "--utterance", "same", "--metric", "wer"]);
    let ranked: Vec<RankedCandidate> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(ranked.len(), 3);
    assert!(ranked.iter().all(|r| r.aggregated_score == ranked[0].aggregated_score));

    let text = stdout(&run(&["rank", &data, "--utterance", "maj", "--metric", "wer"]));
    assert!(text.lines().nth(2).unwrap().contains("the cat sat"), "{text}");
}

#[test]
fn prompt_dry_run_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let o = run(&["prompt", &data, "--utterance", "u2", "--cw", "2", "--n", "1", "--dry-run"]);
    assert_eq!(code(&o), 0);
    let template = std::fs::read_to_string(core_fixture("prompt_cw2_n1.txt")).unwrap();
    let mut expected = template;
    for v in ["WHERE WERE YOU", "I WAS AT WORK", "YOU SAID THAT YESTERDAY"] {
        expected = expected.replacen("{selected_candidate}", v, 1);
    }
    assert_eq!(stdout(&o), expected);
}

#[test]
fn machine_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let m = |args: &[&str]| {
        let mut all = vec!["--format", "machine"];
        all.extend_from_slice(args);
        let o = run(&all);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };

    let canonical = m(&["ingest", &data]);
    let sessions = parse_canonical(&canonical).unwrap();
    assert_eq!(sessions.len(), 2);
    assert_eq!(parse_canonical(&m(&["ingest", &data])).unwrap(), sessions);

    let _: ValidationReport = serde_json::from_str(m(&["validate", &data]).trim()).unwrap();
    for line in m(&["select", &data, "--strategy", "wer"]).lines() {
        let _: Selection = serde_json::from_str(line).unwrap();
    }
    let record: PromptRecord = serde_json::from_str(m(&["prompt", &data, "--utterance", "u2", "--cw", "1"]).trim()).unwrap();
    assert_eq!(record.utterance_id, "u2");

    let out = dir.path().join("run");
    let report: EvalReport =
        serde_json::from_str(m(&["run", "--dataset", &mock50(), "--mock", "--cw", "2", "--out", &out.to_string_lossy()]).trim())
            .unwrap();
    let persisted: EvalReport = serde_json::from_str(&std::fs::read_to_string(out.join(REPORT_JSON)).unwrap()).unwrap();
    assert_eq!(report, persisted);
}

#[test]
fn run_summary_matches_report_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["run", "--dataset", &mock50(), "--mock", "--seed", "3", "--out", &out.to_string_lossy()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    let persisted: EvalReport = serde_json::from_str(&std::fs::read_to_string(out.join(REPORT_JSON)).unwrap()).unwrap();
    assert_eq!(line.trim(), persisted.summary_line());
    assert!(line.starts_with("acc 0."), "{line}");
    assert_eq!(persisted.bootstrap_seed, 3);

    let again = run(&["eval", &out.to_string_lossy()]);
    assert_eq!(stdout(&again), line);
    let full = stdout(&run(&["report", &out.to_string_lossy()]));
    assert!(full.contains(&persisted.headline()));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        format!(
            "dataset = {:?}\nstrategy = \"least_punc\"\ncw = 2\noutput_dir = {:?}\n\n[transport]\nkind = \"mock\"\nbuiltin = true\n",
            mock50(),
            out.to_string_lossy()
        ),
    )
    .unwrap();
    let o = run(&["--format", "machine", "run", "--config", &cfg.to_string_lossy(), "--cw", "4", "--strategy", "wer"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: EvalReport = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(report.config.starts_with("wer cw=4 "), "{}", report.config);

    let o = run(&["--format", "machine", "run", "--config", &cfg.to_string_lossy()]);
    let report: EvalReport = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(report.config.starts_with("least_punc cw=2 "), "{}", report.config);
}

#[test]
fn sweep_budget_block_and_report_rebuild() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let cfg = dir.path().join("grid.toml");
    std::fs::write(
        &cfg,
        format!(
            "dataset = {:?}\nstrategy = \"least_punc\"\noutput_dir = {:?}\n\n[sweep]\nstrategies = [\"least_punc\", \"wer\"]\n\n[[sweep.fusion]]\nbudget = 9\nn = [1, 3, 5]\n",
            mock50(),
            out.to_string_lossy()
        ),
    )
    .unwrap();
    let o = run(&["sweep", "--config", &cfg.to_string_lossy(), "--mock"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    let rows: Vec<&str> = table.lines().filter(|l| l.contains('±')).collect();
    assert_eq!(rows.len(), 3, "{table}");

    let rebuilt = run(&["report", &out.to_string_lossy()]);
    assert_eq!(stdout(&rebuilt), table);

    let machine = run(&["--format", "machine", "report", &out.to_string_lossy()]);
    let lines: Vec<serde_json::Value> = stdout(&machine).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
}

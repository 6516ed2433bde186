use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, Fallback, RunError};
use crate::corpus::{load_dataset, Session};
use crate::evaluation::{build_report, EvalReport, ParseStatus, PredictionRecord};
use crate::gateway::{Gateway, ResponseCache, Transport};
use crate::promptgen::{build_prompt, extract_emotion};

pub const CONFIG_FILE: &str = "config.toml";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TEXT: &str = "report.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.jsonl";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointLine {
    config_digest: String,
    dataset_digest: String,
    record: PredictionRecord,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub records: Vec<PredictionRecord>,
    pub report: EvalReport,
    /// Utterances taken from the checkpoint rather than processed in this call.
    pub resumed: usize,
    pub transport_calls: u64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents).map_err(io_err(path))
}

pub fn dataset_digest(path: &Path) -> Result<String, RunError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn load_sessions(config: &ExperimentConfig) -> Result<Vec<Session>, RunError> {
    let mut sessions = load_dataset(&config.dataset, config.format)?;
    if !config.sessions.is_empty() {
        sessions.retain(|s| config.sessions.contains(&s.id));
    }
    Ok(sessions)
}

fn read_checkpoint(
    path: &Path,
    config_digest: &str,
    dataset_digest: &str,
) -> Result<HashMap<(String, String), PredictionRecord>, RunError> {
    let mut done = HashMap::new();
    if !path.exists() {
        return Ok(done);
    }
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    for line in reader.lines() {
        let line = line.map_err(io_err(path))?;
        // A torn line from an interrupted write is dropped and redone.
        let Ok(entry) = serde_json::from_str::<CheckpointLine>(&line) else {
            continue;
        };
        if entry.config_digest == config_digest && entry.dataset_digest == dataset_digest {
            let key = (entry.record.session_id.clone(), entry.record.utterance_id.clone());
            done.entry(key).or_insert(entry.record);
        }
    }
    Ok(done)
}

fn predict(
    gateway: &Gateway,
    config: &ExperimentConfig,
    session: &Session,
    index: usize,
) -> Result<PredictionRecord, RunError> {
    let prompt = build_prompt(session, index, &config.selection(), &config.context())?;
    let mut completion = gateway.complete_variant(&prompt.text, &config.model, 0)?;
    let mut parsed = extract_emotion(&completion.response).ok();
    let mut variant = 0;
    while parsed.is_none() && variant < config.parse.retries {
        variant += 1;
        completion = gateway.complete_variant(&prompt.text, &config.model, variant)?;
        parsed = extract_emotion(&completion.response).ok();
    }
    let (predicted, parse_status) = match (parsed, config.parse.fallback) {
        (Some(e), _) => (Some(e), ParseStatus::Parsed),
        (None, Fallback::Label(e)) => (Some(e), ParseStatus::Fallback),
        (None, Fallback::None) => (None, ParseStatus::Failed),
    };
    let utt = &session.utterances[index];
    Ok(PredictionRecord {
        session_id: session.id.clone(),
        utterance_id: utt.id.clone(),
        gold: utt.gold_emotion,
        predicted,
        parse_status,
        selected_system: prompt.selected_system,
        prompt_checksum: prompt.checksum,
        request_digest: completion.digest,
        source: completion.source,
    })
}

/// Runs one experiment with the transport named in the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let transport = config.transport.build()?;
    run_experiment_with(config, transport)
}

/// Runs one experiment against `transport`.
///
/// Completed utterances are appended to the checkpoint as they finish; a
/// later call with the same config and dataset skips them. Outputs are
/// written in dataset order, so they do not depend on `workers`.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    transport: Arc<dyn Transport>,
) -> Result<ExperimentOutcome, RunError> {
    config.validate()?;
    let sessions = load_sessions(config)?;
    let config_digest = config.digest();
    let data_digest = dataset_digest(&config.dataset)?;

    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    write_file(&out.join(CONFIG_FILE), &config.to_toml())?;

    let checkpoint_path = out.join(CHECKPOINT_FILE);
    let mut done = read_checkpoint(&checkpoint_path, &config_digest, &data_digest)?;
    let resumed = done.len();

    let targets: Vec<(usize, usize)> = sessions
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            s.utterances
                .iter()
                .enumerate()
                .filter(|(_, u)| u.needs_prediction)
                .map(move |(ui, _)| (si, ui))
        })
        .collect();
    let key = |(si, ui): (usize, usize)| (sessions[si].id.clone(), sessions[si].utterances[ui].id.clone());
    let pending: Vec<(usize, usize)> = targets.iter().copied().filter(|&t| !done.contains_key(&key(t))).collect();
    log::info!(
        "{}: {} targets, {} from checkpoint, {} to do",
        config.descriptor(),
        targets.len(),
        resumed,
        pending.len()
    );

    let cache_path = config.cache_path();
    let cache = ResponseCache::open(&cache_path).map_err(io_err(&cache_path))?;
    let gateway = Gateway::new(transport, cache, &config.gateway);
    let checkpoint = Mutex::new(
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&checkpoint_path)
            .map_err(io_err(&checkpoint_path))?,
    );

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let finished: Mutex<Vec<PredictionRecord>> = Mutex::new(Vec::new());
    let first_error: Mutex<Option<RunError>> = Mutex::new(None);
    let workers = config.workers.min(pending.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(si, ui)) = pending.get(i) else { break };
                let result = predict(&gateway, config, &sessions[si], ui).and_then(|record| {
                    let line = CheckpointLine {
                        config_digest: config_digest.clone(),
                        dataset_digest: data_digest.clone(),
                        record,
                    };
                    let mut text = serde_json::to_string(&line).expect("checkpoint line serializes");
                    text.push('\n');
                    let mut file = checkpoint.lock().unwrap();
                    file.write_all(text.as_bytes())
                        .and_then(|_| file.flush())
                        .map_err(io_err(&checkpoint_path))?;
                    Ok(line.record)
                });
                match result {
                    Ok(record) => finished.lock().unwrap().push(record),
                    Err(e) => {
                        stop.store(true, Ordering::SeqCst);
                        first_error.lock().unwrap().get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = first_error.into_inner().unwrap() {
        let completed = resumed + finished.lock().unwrap().len();
        log::error!(
            "run stopped after {completed} of {} utterances; checkpoint at {}",
            targets.len(),
            checkpoint_path.display()
        );
        return Err(RunError::Aborted {
            completed,
            total: targets.len(),
            checkpoint: checkpoint_path,
            cause: Box::new(e),
        });
    }

    for record in finished.into_inner().unwrap() {
        done.insert((record.session_id.clone(), record.utterance_id.clone()), record);
    }
    let records: Vec<PredictionRecord> = targets
        .iter()
        .map(|&t| done.remove(&key(t)).expect("every target has a record"))
        .collect();

    let report = build_report(&records, &config.descriptor(), &config.bootstrap_options())?;
    write_outputs(out, &records, &report)?;
    Ok(ExperimentOutcome {
        records,
        report,
        resumed,
        transport_calls: gateway.transport_calls(),
    })
}

pub fn predictions_jsonl(records: &[PredictionRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("record serializes"));
        s.push('\n');
    }
    s
}

fn write_outputs(out: &Path, records: &[PredictionRecord], report: &EvalReport) -> Result<(), RunError> {
    write_file(&out.join(PREDICTIONS_FILE), &predictions_jsonl(records))?;
    write_file(&out.join(REPORT_JSON), &report.to_json())?;
    write_file(&out.join(REPORT_TEXT), &report.render_text())
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, RunError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| RunError::Data(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

/// Recomputes the report of a finished run directory from its persisted
/// config and predictions.
pub fn evaluate_run_dir(dir: &Path) -> Result<(ExperimentConfig, EvalReport), RunError> {
    let config = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
    let records = read_predictions(&dir.join(PREDICTIONS_FILE))?;
    let report = build_report(&records, &config.descriptor(), &config.bootstrap_options())?;
    Ok((config, report))
}

pub fn run_dir_for(base: &Path, id: &str) -> PathBuf {
    base.join("runs").join(id)
}

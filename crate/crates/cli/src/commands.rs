use std::io::Write;
use std::path::Path;

use emoprompt_core::corpus::{find_utterance, load_dataset, to_canonical_jsonl, validate_dataset, Session};
use emoprompt_core::evaluation::{build_report, EvalReport};
use emoprompt_core::orchestrator::{
    evaluate_run_dir, read_predictions, rebuild_sweep, run_experiment, run_sweep, write_tables, ExperimentConfig,
    Seeds, SweepGrid, SweepOutcome, TransportConfig, CONFIG_FILE, PREDICTIONS_FILE, SWEEP_FILE,
};
use emoprompt_core::promptgen::{build_prompt, ContextConfig};
use emoprompt_core::selection::{consensus_rank, select, SelectionStrategy};
use serde::Serialize;

use crate::cli::*;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Writes `records` one JSON object per line.
fn emit_lines<T: Serialize>(records: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    for r in records {
        serde_json::to_writer(&mut out, &r).map_err(|e| CliError::other(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn load(args: &DatasetArgs) -> Result<Vec<Session>> {
    Ok(load_dataset(&args.dataset, args.schema)?)
}

fn locate<'a>(sessions: &'a [Session], target: &UtteranceArgs) -> Result<(&'a Session, usize)> {
    find_utterance(sessions, target.session.as_deref(), &target.utterance)
        .ok_or_else(|| CliError::data(format!("utterance `{}` not found", target.utterance)))
}

pub fn ingest(args: &IngestArgs, format: OutputFormat) -> Result<()> {
    let sessions = load(&args.input)?;
    let text = to_canonical_jsonl(&sessions);
    let utterances: usize = sessions.iter().map(|s| s.utterances.len()).sum();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::other(format!("{}: {e}", path.display())))?;
            match format {
                OutputFormat::Text => {
                    println!("{} sessions, {utterances} utterances -> {}", sessions.len(), path.display())
                }
                OutputFormat::Machine => print!("{text}"),
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn validate(args: &DatasetArgs, format: OutputFormat) -> Result<()> {
    let report = validate_dataset(&load(args)?);
    match format {
        OutputFormat::Text => print!("{}", report.render_text()),
        OutputFormat::Machine => emit_lines([&report])?,
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::data(format!("{} violation(s)", report.violations.len())))
    }
}

pub fn rank(args: &RankArgs, format: OutputFormat) -> Result<()> {
    let sessions = load(&args.input)?;
    let (session, idx) = locate(&sessions, &args.target)?;
    let utt = &session.utterances[idx];
    let ranked = consensus_rank(&utt.candidates(), args.metric).map_err(|e| CliError::data(e.to_string()))?;
    match format {
        OutputFormat::Text => {
            println!("{}/{} by {}", session.id, utt.id, args.metric);
            println!("{:>4}  {:<14} {:>12}  text", "rank", "system", "score");
            for r in &ranked {
                println!("{:>4}  {:<14} {:>12.6}  {}", r.rank, r.system, r.aggregated_score, r.text);
            }
        }
        OutputFormat::Machine => emit_lines(&ranked)?,
    }
    Ok(())
}

pub fn select_cmd(args: &SelectArgs, format: OutputFormat) -> Result<()> {
    let sessions = load(&args.input)?;
    let strategy = SelectionStrategy::new(args.strategy, args.seed);
    let targets: Vec<(&Session, usize)> = match &args.utterance {
        Some(id) => vec![locate(
            &sessions,
            &UtteranceArgs {
                utterance: id.clone(),
                session: args.session.clone(),
            },
        )?],
        None => sessions
            .iter()
            .filter(|s| args.session.as_ref().map_or(true, |id| &s.id == id))
            .flat_map(|s| (0..s.utterances.len()).filter(|&i| s.utterances[i].needs_prediction).map(move |i| (s, i)))
            .collect(),
    };
    let mut picks = Vec::with_capacity(targets.len());
    for (s, i) in targets {
        picks.push(select(&s.utterances[i], &strategy).map_err(|e| CliError::data(e.to_string()))?);
    }
    match format {
        OutputFormat::Text => {
            for p in &picks {
                println!("{}\t{}\t{}", p.utterance_id, p.system, p.text);
            }
        }
        OutputFormat::Machine => emit_lines(&picks)?,
    }
    Ok(())
}

pub fn prompt(args: &PromptArgs, format: OutputFormat) -> Result<()> {
    let ctx = ContextConfig::new(args.cw, args.n, args.seed)?;
    let sessions = load(&args.input)?;
    let (session, idx) = locate(&sessions, &args.target)?;
    let record = build_prompt(session, idx, &SelectionStrategy::new(args.strategy, args.seed), &ctx)?;
    if record.truncated_context {
        log::warn!("only {idx} utterances precede the target; context is shorter than cw={}", args.cw);
    }
    if record.shortfall {
        log::warn!("fewer than {} distinct transcripts; showing {}", args.n, record.candidates.len());
    }
    match format {
        OutputFormat::Text => {
            let mut out = std::io::stdout().lock();
            out.write_all(record.text.as_bytes())?;
            out.flush()?;
        }
        OutputFormat::Machine => emit_lines([&record])?,
    }
    Ok(())
}

fn base_config(flags: &ExperimentFlags) -> Result<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig {
            transport: TransportConfig::Http {
                base_url: emoprompt_core::gateway::DEFAULT_BASE_URL.into(),
                path: emoprompt_core::gateway::DEFAULT_PATH.into(),
                key_env: emoprompt_core::gateway::DEFAULT_KEY_VAR.into(),
                timeout_secs: 60,
            },
            ..ExperimentConfig::default()
        },
    };
    if flags.config.is_none() && flags.dataset.is_none() {
        return Err(CliError::usage("either --config or --dataset is required"));
    }
    apply_flags(&mut cfg, flags);
    Ok(cfg)
}

fn apply_flags(cfg: &mut ExperimentConfig, f: &ExperimentFlags) {
    if let Some(d) = &f.dataset {
        cfg.dataset = d.clone();
    }
    if let Some(s) = f.schema {
        cfg.format = s;
    }
    if let Some(o) = &f.out {
        cfg.output_dir = o.clone();
    }
    if let Some(m) = &f.model {
        cfg.model.model = m.clone();
    }
    if let Some(seed) = f.seed {
        cfg.seeds = Seeds::joint(seed);
    }
    if let Some(s) = f.selection_seed {
        cfg.seeds.selection = s;
    }
    if let Some(s) = f.fusion_seed {
        cfg.seeds.fusion = s;
    }
    if let Some(s) = f.bootstrap_seed {
        cfg.seeds.bootstrap = s;
    }
    if let Some(r) = f.resamples {
        cfg.bootstrap.resamples = r;
    }
    if let Some(a) = f.alpha {
        cfg.bootstrap.alpha = a;
    }
    if let Some(w) = f.workers {
        cfg.workers = w;
    }
    if let Some(c) = &f.cache {
        cfg.cache = Some(c.clone());
    }
    if f.mock {
        cfg.transport = TransportConfig::default();
    }
}

fn print_report(report: &EvalReport, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Text => {
            println!("{}", report.summary_line());
            Ok(())
        }
        OutputFormat::Machine => emit_lines([report]),
    }
}

pub fn run(args: &RunArgs, format: OutputFormat) -> Result<()> {
    let mut cfg = base_config(&args.common)?;
    if let Some(s) = args.strategy {
        cfg.strategy = s;
    }
    if let Some(cw) = args.cw {
        cfg.cw = cw;
    }
    if let Some(n) = args.n {
        cfg.n_candidates = n;
    }
    cfg.validate()?;
    let outcome = run_experiment(&cfg)?;
    log::info!(
        "{} records ({} resumed, {} transport calls) in {}",
        outcome.records.len(),
        outcome.resumed,
        outcome.transport_calls,
        cfg.output_dir.display()
    );
    print_report(&outcome.report, format)
}

#[derive(Serialize)]
struct SweepLine<'a> {
    id: &'a str,
    strategy: String,
    cw: usize,
    n: usize,
    model: &'a str,
    accuracy: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    error: Option<&'a str>,
}

fn print_sweep(outcome: &SweepOutcome, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Text => {
            print!("{}", outcome.tables.cw_table);
            print!("{}", outcome.tables.fusion_table);
            for run in outcome.runs.iter().filter(|r| r.result.is_err()) {
                println!("{}: failed: {}", run.id, run.result.as_ref().unwrap_err());
            }
        }
        OutputFormat::Machine => emit_lines(outcome.runs.iter().map(|r| {
            let ok = r.result.as_ref().ok();
            SweepLine {
                id: &r.id,
                strategy: r.config.strategy.to_string(),
                cw: r.config.cw,
                n: r.config.n_candidates,
                model: &r.config.model.model,
                accuracy: ok.map(|x| x.accuracy),
                lo: ok.map(|x| x.interval.lo),
                hi: ok.map(|x| x.interval.hi),
                error: r.result.as_ref().err().map(String::as_str),
            }
        }))?,
    }
    match outcome.failures() {
        0 => Ok(()),
        n => Err(CliError::other(format!("{n} of {} sweep runs failed", outcome.runs.len()))),
    }
}

pub fn sweep(args: &SweepArgs, format: OutputFormat) -> Result<()> {
    let Some(path) = &args.common.config else {
        return Err(CliError::usage("sweep needs --config with a [sweep] table"));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut grid = SweepGrid::from_toml(&text)?;
    apply_flags(&mut grid.base, &args.common);
    let outcome = run_sweep(&grid, None)?;
    print_sweep(&outcome, format)
}

pub fn eval(args: &EvalArgs, format: OutputFormat) -> Result<()> {
    let dir = &args.run_dir;
    if !dir.join(CONFIG_FILE).exists() {
        return Err(CliError::data(format!("{} is not a run directory (no {CONFIG_FILE})", dir.display())));
    }
    let config = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
    let records = read_predictions(&dir.join(PREDICTIONS_FILE))?;
    let mut opts = config.bootstrap_options();
    if let Some(r) = args.resamples {
        opts.resamples = r;
    }
    if let Some(a) = args.alpha {
        opts.alpha = a;
    }
    if let Some(s) = args.bootstrap_seed {
        opts.seed = s;
    }
    let report = build_report(&records, &config.descriptor(), &opts)?;
    print_report(&report, format)
}

fn is_sweep_dir(dir: &Path) -> bool {
    dir.join(SWEEP_FILE).exists()
}

pub fn report(args: &ReportArgs, format: OutputFormat) -> Result<()> {
    let dir = &args.dir;
    if is_sweep_dir(dir) {
        let path = dir.join(SWEEP_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let mut grid = SweepGrid::from_toml(&text)?;
        // The sweep may have been moved since it ran.
        grid.base.output_dir = dir.clone();
        grid.base.cache = None;
        let outcome = rebuild_sweep(&grid)?;
        write_tables(dir, &outcome.tables)?;
        return print_sweep(&outcome, format);
    }
    let (_, report) = evaluate_run_dir(dir)?;
    match format {
        OutputFormat::Text => print!("{}", report.render_text()),
        OutputFormat::Machine => emit_lines([&report])?,
    }
    Ok(())
}

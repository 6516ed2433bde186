use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::run::{evaluate_run_dir, run_dir_for, run_experiment, run_experiment_with};
use super::{ExperimentConfig, RunError};
use crate::evaluation::EvalReport;
use crate::gateway::Transport;
use crate::promptgen::MAX_CANDIDATES;
use crate::selection::SelectionMethod;

/// Context windows of the CW sweep.
pub const DEFAULT_CWS: [usize; 7] = [0, 2, 4, 8, 16, 32, 64];

/// `(cw, n)` pairs with `cw + n = budget`, one per `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionBlock {
    pub budget: usize,
    pub n: Vec<usize>,
}

impl FusionBlock {
    pub fn pairs(&self) -> Result<Vec<(usize, usize)>, RunError> {
        self.n
            .iter()
            .map(|&n| {
                if n == 0 || n > MAX_CANDIDATES || n > self.budget {
                    Err(RunError::Config(format!(
                        "fusion block budget {}: n={n} must be between 1 and min({MAX_CANDIDATES}, budget)",
                        self.budget
                    )))
                } else {
                    Ok((self.budget - n, n))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default)]
    pub cws: Vec<usize>,
    pub strategies: Vec<SelectionMethod>,
    /// Model names; empty means the base config's model only.
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default)]
    pub fusion: Vec<FusionBlock>,
}

/// A base experiment and the axes varied around it. Every run writes under
/// `<base.output_dir>/runs/<id>` and all runs share one cache journal.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub base: ExperimentConfig,
    pub axes: SweepAxes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub id: String,
    pub config: ExperimentConfig,
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-.+_".contains(c) { c } else { '_' })
        .collect()
}

pub fn run_id(model: &str, strategy: SelectionMethod, cw: usize, n: usize) -> String {
    format!("{}__{}__cw{cw}_n{n}", sanitize(model), strategy)
}

impl SweepGrid {
    /// Reads an experiment config with an extra `[sweep]` table.
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        let axes = table
            .remove("sweep")
            .ok_or_else(|| RunError::Config("missing [sweep] table".into()))?;
        let axes: SweepAxes = axes.try_into().map_err(|e: toml::de::Error| RunError::Config(e.to_string()))?;
        let base = ExperimentConfig::from_toml(&toml::to_string(&table).expect("table serializes"))?;
        Ok(SweepGrid { base, axes })
    }

    pub fn to_toml(&self) -> String {
        let mut table = toml::Table::try_from(&self.base).expect("config serializes");
        table.insert("sweep".into(), toml::Value::try_from(&self.axes).expect("axes serialize"));
        toml::to_string(&table).expect("table serializes")
    }

    fn models(&self) -> Vec<String> {
        if self.axes.models.is_empty() {
            vec![self.base.model.model.clone()]
        } else {
            self.axes.models.clone()
        }
    }

    fn point(&self, model: &str, strategy: SelectionMethod, cw: usize, n: usize) -> GridPoint {
        let id = run_id(model, strategy, cw, n);
        let mut config = self.base.clone();
        config.model.model = model.to_string();
        config.strategy = strategy;
        config.cw = cw;
        config.n_candidates = n;
        config.cache = Some(self.base.cache_path());
        config.output_dir = run_dir_for(&self.base.output_dir, &id);
        GridPoint { id, config }
    }

    /// Distinct runs in a stable order: the CW axis first, then fusion blocks.
    pub fn expand(&self) -> Result<Vec<GridPoint>, RunError> {
        let mut points: Vec<GridPoint> = Vec::new();
        let mut push = |p: GridPoint| {
            if !points.iter().any(|q| q.id == p.id) {
                points.push(p);
            }
        };
        for model in self.models() {
            for &strategy in &self.axes.strategies {
                for &cw in &self.axes.cws {
                    push(self.point(&model, strategy, cw, 1));
                }
                for block in &self.axes.fusion {
                    for (cw, n) in block.pairs()? {
                        push(self.point(&model, strategy, cw, n));
                    }
                }
            }
        }
        if points.is_empty() {
            return Err(RunError::EmptyGrid);
        }
        for p in &points {
            p.config.validate()?;
        }
        Ok(points)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub id: String,
    pub config: ExperimentConfig,
    pub result: Result<EvalReport, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepTables {
    pub cw_table: String,
    pub fusion_table: String,
    pub ranking_csv: String,
    pub heuristic_csv: String,
    pub fusion_csv: String,
    pub runs_csv: String,
}

pub const CW_TABLE: &str = "cw_table.txt";
pub const FUSION_TABLE: &str = "fusion_table.txt";
pub const RANKING_CSV: &str = "figure_ranking_cw.csv";
pub const HEURISTIC_CSV: &str = "figure_heuristic_cw.csv";
pub const FUSION_CSV: &str = "fusion.csv";
pub const RUNS_CSV: &str = "runs.csv";
pub const SWEEP_FILE: &str = "sweep.toml";

#[derive(Debug)]
pub struct SweepOutcome {
    pub runs: Vec<SweepRun>,
    pub tables: SweepTables,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.result.is_err()).count()
    }
}

/// Runs every grid point; a failing point is recorded and the sweep goes on.
pub fn run_sweep(grid: &SweepGrid, transport: Option<Arc<dyn Transport>>) -> Result<SweepOutcome, RunError> {
    let points = grid.expand()?;
    let root = &grid.base.output_dir;
    std::fs::create_dir_all(root).map_err(|source| RunError::Io {
        path: root.clone(),
        source,
    })?;
    write(root, SWEEP_FILE, &grid.to_toml())?;
    let mut runs = Vec::with_capacity(points.len());
    for (i, point) in points.into_iter().enumerate() {
        log::info!("sweep {}/{}: {}", i + 1, runs.capacity(), point.id);
        let result = match &transport {
            Some(t) => run_experiment_with(&point.config, Arc::clone(t)),
            None => run_experiment(&point.config),
        };
        let result = result.map(|o| o.report).map_err(|e| {
            log::error!("sweep point {} failed: {e}", point.id);
            e.to_string()
        });
        runs.push(SweepRun {
            id: point.id,
            config: point.config,
            result,
        });
    }
    let tables = build_tables(grid, &runs)?;
    write_tables(root, &tables)?;
    Ok(SweepOutcome { runs, tables })
}

/// Rebuilds the sweep tables from the per-run directories on disk.
pub fn rebuild_sweep(grid: &SweepGrid) -> Result<SweepOutcome, RunError> {
    let runs: Vec<SweepRun> = grid
        .expand()?
        .into_iter()
        .map(|p| SweepRun {
            result: evaluate_run_dir(&p.config.output_dir)
                .map(|(_, r)| r)
                .map_err(|e| e.to_string()),
            id: p.id,
            config: p.config,
        })
        .collect();
    let tables = build_tables(grid, &runs)?;
    Ok(SweepOutcome { runs, tables })
}

fn write(root: &Path, name: &str, contents: &str) -> Result<(), RunError> {
    let path = root.join(name);
    std::fs::write(&path, contents).map_err(|source| RunError::Io { path, source })
}

pub fn write_tables(root: &Path, t: &SweepTables) -> Result<(), RunError> {
    write(root, CW_TABLE, &t.cw_table)?;
    write(root, FUSION_TABLE, &t.fusion_table)?;
    write(root, RANKING_CSV, &t.ranking_csv)?;
    write(root, HEURISTIC_CSV, &t.heuristic_csv)?;
    write(root, FUSION_CSV, &t.fusion_csv)?;
    write(root, RUNS_CSV, &t.runs_csv)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    model: &'a str,
    strategy: String,
    cw: usize,
    n: usize,
    budget: Option<usize>,
    accuracy: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    half_width: Option<f64>,
    macro_recall: Option<f64>,
    status: &'a str,
}

fn csv_row<'a>(run: &'a SweepRun, budget: Option<usize>) -> CsvRow<'a> {
    let r = run.result.as_ref().ok();
    CsvRow {
        model: &run.config.model.model,
        strategy: run.config.strategy.to_string(),
        cw: run.config.cw,
        n: run.config.n_candidates,
        budget,
        accuracy: r.map(|r| r.accuracy),
        lo: r.map(|r| r.interval.lo),
        hi: r.map(|r| r.interval.hi),
        half_width: r.map(|r| r.interval.half_width()),
        macro_recall: r.map(|r| r.macro_recall),
        status: if r.is_some() { "ok" } else { "failed" },
    }
}

fn to_csv<'a>(rows: impl IntoIterator<Item = CsvRow<'a>>) -> Result<String, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| RunError::Data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn cell(run: Option<&SweepRun>) -> String {
    match run.map(|r| &r.result) {
        Some(Ok(report)) => report.headline(),
        Some(Err(_)) => "failed".into(),
        None => "-".into(),
    }
}

fn build_tables(grid: &SweepGrid, runs: &[SweepRun]) -> Result<SweepTables, RunError> {
    let by_id: BTreeMap<&str, &SweepRun> = runs.iter().map(|r| (r.id.as_str(), r)).collect();
    let lookup = |model: &str, s: SelectionMethod, cw: usize, n: usize| by_id.get(run_id(model, s, cw, n).as_str()).copied();
    let models = grid.models();
    let strategies = &grid.axes.strategies;
    let width = strategies.iter().map(|s| s.token().len()).max().unwrap_or(8).max(14);

    let mut cw_table = String::new();
    if !grid.axes.cws.is_empty() {
        for model in &models {
            let _ = writeln!(cw_table, "model: {model}");
            let _ = write!(cw_table, "{:<width$}", "strategy");
            for cw in &grid.axes.cws {
                let _ = write!(cw_table, " {:>13}", format!("CW={cw}"));
            }
            cw_table.push('\n');
            for &s in strategies {
                let _ = write!(cw_table, "{:<width$}", s.token());
                for &cw in &grid.axes.cws {
                    let _ = write!(cw_table, " {:>13}", cell(lookup(model, s, cw, 1)));
                }
                cw_table.push('\n');
            }
            cw_table.push('\n');
        }
    }

    let mut fusion_table = String::new();
    let mut fusion_rows = Vec::new();
    if !grid.axes.fusion.is_empty() {
        for model in &models {
            let _ = writeln!(fusion_table, "model: {model}");
            let _ = write!(fusion_table, "{:>4} {:>3}", "CW", "N");
            for s in strategies {
                let _ = write!(fusion_table, " {:>width$}", s.token());
            }
            fusion_table.push('\n');
            for (bi, block) in grid.axes.fusion.iter().enumerate() {
                if bi > 0 {
                    let _ = writeln!(fusion_table, "{}", "-".repeat(8 + (width + 1) * strategies.len()));
                }
                for (cw, n) in block.pairs()? {
                    let _ = write!(fusion_table, "{cw:>4} {n:>3}");
                    for &s in strategies {
                        let run = lookup(model, s, cw, n);
                        let _ = write!(fusion_table, " {:>width$}", cell(run));
                        if let Some(run) = run {
                            fusion_rows.push(csv_row(run, Some(block.budget)));
                        }
                    }
                    fusion_table.push('\n');
                }
            }
            fusion_table.push('\n');
        }
    }

    let cw_rows = |ranking: bool| {
        let mut rows = Vec::new();
        for model in &models {
            for &s in strategies.iter().filter(|s| s.is_ranking() == ranking) {
                for &cw in &grid.axes.cws {
                    if let Some(run) = lookup(model, s, cw, 1) {
                        rows.push(csv_row(run, None));
                    }
                }
            }
        }
        rows
    };

    Ok(SweepTables {
        cw_table,
        fusion_table,
        ranking_csv: to_csv(cw_rows(true))?,
        heuristic_csv: to_csv(cw_rows(false))?,
        fusion_csv: to_csv(fusion_rows)?,
        runs_csv: to_csv(runs.iter().map(|r| csv_row(r, None)))?,
    })
}

//! Seeded parameter sweeps with repeated trials and min/max/mean/std
//! aggregation.
//!
//! Run `r` of every grid cell uses seed `base_seed + r`, so adding cells never
//! changes existing ones. Fits are scheduled over (cell, repetition) pairs
//! and merged in index order; the aggregate CSV is independent of the
//! thread count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::csvio;
use super::fit::{run_algorithm, score, Algorithm};
use super::knowledge::load_knowledge;
use crate::baselines::{induce_with_restarts, DEFAULT_RESTARTS};
use crate::config::{AlgoConfig, PARAM_NAMES};
use crate::data::DataMatrix;
use crate::datagen::{gen_d1, gen_d2, gen_d3, Domain};
use crate::error::{Error, Result};
use crate::prototypes::SourceKnowledge;

pub const DEFAULT_REPETITIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    D1,
    D2,
    D3,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d1" => Ok(Family::D1),
            "d2" => Ok(Family::D2),
            "d3" => Ok(Family::D3),
            other => Err(Error::InvalidConfig(format!("unknown generator {other:?} (expected d1, d2 or d3)"))),
        }
    }
}

impl Family {
    pub fn generate(self, domain: Domain, seed: u64) -> DataMatrix {
        match self {
            Family::D1 => gen_d1(domain, seed),
            Family::D2 => gen_d2(domain, seed),
            Family::D3 => gen_d3(domain, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Generated { family: Family, domain: Domain, seed: u64 },
    Csv { path: PathBuf, zscore: bool },
}

impl DatasetSpec {
    /// Relative CSV paths resolve against `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<DataMatrix> {
        match self {
            DatasetSpec::Generated { family, domain, seed } => Ok(family.generate(*domain, *seed)),
            DatasetSpec::Csv { path, zscore } => csvio::read_dataset(&base_dir.join(path), *zscore),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KnowledgeSpec {
    File(PathBuf),
    /// Induced from `dataset` with the sweep's base configuration.
    Induce { dataset: DatasetSpec, restarts: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub dataset: DatasetSpec,
    pub knowledge: Option<KnowledgeSpec>,
    /// Parameter axes in canonical order; the last varies fastest.
    pub grid: Vec<(String, Vec<f64>)>,
    pub repetitions: usize,
    pub base: AlgoConfig,
    pub base_seed: u64,
    pub output: PathBuf,
    pub log: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub parallelism: Option<usize>,
}

const TOP_KEYS: [&str; 10] = [
    "algorithm",
    "dataset",
    "knowledge",
    "grid",
    "repetitions",
    "base",
    "base_seed",
    "output",
    "log",
    "parallelism",
];

fn as_u64(v: &Value, field: &str, problems: &mut Vec<String>) -> Option<u64> {
    let out = v.as_u64();
    if out.is_none() {
        problems.push(format!("`{field}` must be a non-negative integer"));
    }
    out
}

fn as_str<'v>(v: &'v Value, field: &str, problems: &mut Vec<String>) -> Option<&'v str> {
    let out = v.as_str();
    if out.is_none() {
        problems.push(format!("`{field}` must be a string"));
    }
    out
}

fn parse_dataset(v: &Value, field: &str, problems: &mut Vec<String>) -> Option<DatasetSpec> {
    let Some(obj) = v.as_object() else {
        problems.push(format!("`{field}` must be an object"));
        return None;
    };
    for key in obj.keys() {
        if !["generator", "domain", "seed", "csv", "zscore"].contains(&key.as_str()) {
            problems.push(format!("`{field}.{key}` is not a recognized field"));
        }
    }
    match (obj.get("generator"), obj.get("csv")) {
        (Some(g), None) => {
            let family = as_str(g, &format!("{field}.generator"), problems)
                .and_then(|s| s.parse().map_err(|e: Error| problems.push(format!("`{field}.generator`: {e}"))).ok());
            let domain = match obj.get("domain") {
                Some(d) => as_str(d, &format!("{field}.domain"), problems)
                    .and_then(|s| s.parse().map_err(|e: Error| problems.push(format!("`{field}.domain`: {e}"))).ok()),
                None => {
                    problems.push(format!("`{field}.domain` is required with a generator"));
                    None
                }
            };
            let seed = match obj.get("seed") {
                Some(s) => as_u64(s, &format!("{field}.seed"), problems),
                None => Some(0),
            };
            if obj.contains_key("zscore") {
                problems.push(format!("`{field}.zscore` only applies to csv datasets"));
            }
            Some(DatasetSpec::Generated {
                family: family?,
                domain: domain?,
                seed: seed?,
            })
        }
        (None, Some(p)) => {
            let path = as_str(p, &format!("{field}.csv"), problems).map(PathBuf::from);
            let zscore = match obj.get("zscore") {
                Some(z) => z.as_bool().or_else(|| {
                    problems.push(format!("`{field}.zscore` must be a boolean"));
                    None
                }),
                None => Some(false),
            };
            for key in ["domain", "seed"] {
                if obj.contains_key(key) {
                    problems.push(format!("`{field}.{key}` only applies to generated datasets"));
                }
            }
            Some(DatasetSpec::Csv { path: path?, zscore: zscore? })
        }
        _ => {
            problems.push(format!("`{field}` needs exactly one of `generator` or `csv`"));
            None
        }
    }
}

fn parse_knowledge(v: &Value, problems: &mut Vec<String>) -> Option<KnowledgeSpec> {
    let Some(obj) = v.as_object() else {
        problems.push("`knowledge` must be an object".into());
        return None;
    };
    for key in obj.keys() {
        if !["path", "induce", "restarts", "seed"].contains(&key.as_str()) {
            problems.push(format!("`knowledge.{key}` is not a recognized field"));
        }
    }
    match (obj.get("path"), obj.get("induce")) {
        (Some(p), None) => {
            for key in ["restarts", "seed"] {
                if obj.contains_key(key) {
                    problems.push(format!("`knowledge.{key}` only applies to induced knowledge"));
                }
            }
            as_str(p, "knowledge.path", problems).map(|s| KnowledgeSpec::File(PathBuf::from(s)))
        }
        (None, Some(d)) => {
            let dataset = parse_dataset(d, "knowledge.induce", problems);
            let restarts = match obj.get("restarts") {
                Some(r) => as_u64(r, "knowledge.restarts", problems).and_then(|r| {
                    if r == 0 {
                        problems.push("`knowledge.restarts` must be at least 1".into());
                        None
                    } else {
                        Some(r as usize)
                    }
                }),
                None => Some(DEFAULT_RESTARTS),
            };
            let seed = match obj.get("seed") {
                Some(s) => as_u64(s, "knowledge.seed", problems),
                None => Some(0),
            };
            Some(KnowledgeSpec::Induce {
                dataset: dataset?,
                restarts: restarts?,
                seed: seed?,
            })
        }
        _ => {
            problems.push("`knowledge` needs exactly one of `path` or `induce`".into());
            None
        }
    }
}

fn parse_grid(v: &Value, problems: &mut Vec<String>) -> Option<Vec<(String, Vec<f64>)>> {
    let Some(obj) = v.as_object() else {
        problems.push("`grid` must be an object mapping parameter names to value lists".into());
        return None;
    };
    if obj.is_empty() {
        problems.push("`grid` must name at least one parameter".into());
    }
    let mut ok = true;
    for (key, values) in obj {
        if !PARAM_NAMES.contains(&key.as_str()) || key == "clusters" {
            problems.push(format!("`grid.{key}` is not a sweepable parameter"));
            ok = false;
            continue;
        }
        match values.as_array() {
            Some(list) if !list.is_empty() && list.iter().all(|x| x.as_f64().is_some_and(f64::is_finite)) => {}
            _ => {
                problems.push(format!("`grid.{key}` must be a non-empty list of finite numbers"));
                ok = false;
            }
        }
    }
    if !ok || obj.is_empty() {
        return None;
    }
    Some(
        PARAM_NAMES
            .iter()
            .filter_map(|&name| {
                obj.get(name).map(|vals| {
                    (
                        name.to_string(),
                        vals.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect(),
                    )
                })
            })
            .collect(),
    )
}

fn parse_base(v: Option<&Value>, problems: &mut Vec<String>) -> Option<AlgoConfig> {
    let Some(obj) = v.and_then(Value::as_object) else {
        problems.push("`base` must be an object with at least `clusters`".into());
        return None;
    };
    if !obj.contains_key("clusters") {
        problems.push("`base.clusters` is required".into());
    }
    let mut cfg = AlgoConfig::default();
    for (key, val) in obj {
        match val.as_f64() {
            Some(x) => {
                if let Err(e) = cfg.set_param(key, x) {
                    problems.push(format!("`base.{key}`: {e}"));
                }
            }
            None => problems.push(format!("`base.{key}` must be a number")),
        }
    }
    Some(cfg)
}

impl ExperimentConfig {
    /// Parses and validates a JSON config, reporting every offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::Schema(vec![format!("not valid JSON: {e}")]))?;
        let Some(obj) = root.as_object() else {
            return Err(Error::Schema(vec!["config must be a JSON object".into()]));
        };
        let mut problems = Vec::new();
        for key in obj.keys() {
            if !TOP_KEYS.contains(&key.as_str()) {
                problems.push(format!("`{key}` is not a recognized field"));
            }
        }
        let algorithm = match obj.get("algorithm") {
            Some(a) => as_str(a, "algorithm", &mut problems)
                .and_then(|s| s.parse::<Algorithm>().map_err(|e: Error| problems.push(format!("`algorithm`: {e}"))).ok()),
            None => {
                problems.push("`algorithm` is required".into());
                None
            }
        };
        let dataset = match obj.get("dataset") {
            Some(d) => parse_dataset(d, "dataset", &mut problems),
            None => {
                problems.push("`dataset` is required".into());
                None
            }
        };
        let knowledge = obj.get("knowledge").map(|k| parse_knowledge(k, &mut problems));
        let grid = match obj.get("grid") {
            Some(g) => parse_grid(g, &mut problems),
            None => {
                problems.push("`grid` is required".into());
                None
            }
        };
        let repetitions = match obj.get("repetitions") {
            Some(r) => as_u64(r, "repetitions", &mut problems).and_then(|r| {
                if r == 0 {
                    problems.push("`repetitions` must be at least 1".into());
                    None
                } else {
                    Some(r as usize)
                }
            }),
            None => Some(DEFAULT_REPETITIONS),
        };
        let base = parse_base(obj.get("base"), &mut problems);
        let base_seed = match obj.get("base_seed") {
            Some(s) => as_u64(s, "base_seed", &mut problems),
            None => Some(0),
        };
        let output = match obj.get("output") {
            Some(o) => as_str(o, "output", &mut problems).map(PathBuf::from),
            None => {
                problems.push("`output` is required".into());
                None
            }
        };
        let log = obj.get("log").map(|l| as_str(l, "log", &mut problems).map(PathBuf::from));
        let parallelism = obj.get("parallelism").map(|p| {
            as_u64(p, "parallelism", &mut problems).and_then(|p| {
                if p == 0 {
                    problems.push("`parallelism` must be at least 1".into());
                    None
                } else {
                    Some(p as usize)
                }
            })
        });

        if let Some(a) = algorithm {
            match (&knowledge, a.is_transfer()) {
                (None, true) => problems.push(format!("`knowledge` is required for {a}")),
                (Some(_), false) => problems.push(format!("`knowledge` does not apply to {a}")),
                _ => {}
            }
        }

        if !problems.is_empty() {
            return Err(Error::Schema(problems));
        }
        let unwrap_all = || -> Option<Self> {
            Some(Self {
                algorithm: algorithm?,
                dataset: dataset?,
                knowledge: match knowledge {
                    Some(k) => Some(k?),
                    None => None,
                },
                grid: grid?,
                repetitions: repetitions?,
                base: base?,
                base_seed: base_seed?,
                output: output?,
                log: match log {
                    Some(l) => Some(l?),
                    None => None,
                },
                parallelism: match parallelism {
                    Some(p) => Some(p?),
                    None => None,
                },
            })
        };
        unwrap_all().ok_or_else(|| Error::Schema(vec!["incomplete config".into()]))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Every grid cell in order, last axis fastest.
    pub fn cells(&self) -> Vec<Vec<f64>> {
        let mut cells = vec![Vec::new()];
        for (_, values) in &self.grid {
            cells = cells
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut c = prefix.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        cells
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.grid.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Configuration of run `rep` in `cell`.
    pub fn run_config(&self, cell: &[f64], rep: usize) -> Result<AlgoConfig> {
        let mut cfg = self.base.clone().with_seed(self.base_seed.wrapping_add(rep as u64));
        for ((name, _), &v) in self.grid.iter().zip(cell) {
            cfg.set_param(name, v)?;
        }
        Ok(cfg)
    }
}

/// Summary of one fit inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cell: usize,
    pub rep: usize,
    pub seed: u64,
    pub rand_index: Option<f64>,
    pub nmi: Option<f64>,
    pub xb: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_objective: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricStats {
    pub metric: String,
    /// Repetitions that produced a value.
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl MetricStats {
    pub fn from_values(metric: &str, values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                metric: metric.to_string(),
                count: 0,
                min: f64::NAN,
                max: f64::NAN,
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            metric: metric.to_string(),
            count: n,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub params: Vec<f64>,
    pub metrics: Vec<MetricStats>,
    pub mean_runtime_s: f64,
    pub mean_iterations: f64,
    pub convergence_rate: f64,
}

impl AggregateRow {
    pub fn metric(&self, name: &str) -> Option<&MetricStats> {
        self.metrics.iter().find(|m| m.metric == name)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub algorithm: Algorithm,
    pub param_names: Vec<String>,
    pub rows: Vec<AggregateRow>,
    pub runs: Vec<RunRecord>,
    /// Cell with the highest mean RI, first in grid order on ties.
    pub best: Option<usize>,
}

fn load_sweep_knowledge(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Option<SourceKnowledge>> {
    Ok(match &cfg.knowledge {
        None => None,
        Some(KnowledgeSpec::File(p)) => Some(load_knowledge(&base_dir.join(p))?),
        Some(KnowledgeSpec::Induce { dataset, restarts, seed }) => {
            let source = dataset.load(base_dir)?;
            let ind_cfg = cfg.base.clone().with_seed(*seed);
            Some(induce_with_restarts(&source, cfg.algorithm.kind(), &ind_cfg, *restarts)?.knowledge)
        }
    })
}

fn aggregate(algorithm: Algorithm, params: Vec<f64>, runs: &[RunRecord], labeled: bool) -> AggregateRow {
    let pick = |f: fn(&RunRecord) -> Option<f64>| runs.iter().filter_map(f).collect::<Vec<f64>>();
    let mut metrics = Vec::new();
    if labeled {
        metrics.push(MetricStats::from_values("nmi", &pick(|r| r.nmi)));
        metrics.push(MetricStats::from_values("ri", &pick(|r| r.rand_index)));
    }
    metrics.push(MetricStats::from_values(algorithm.xb_name(), &pick(|r| r.xb)));
    let iterations = pick(|r| Some(r.iterations as f64));
    let converged = pick(|r| Some(f64::from(u8::from(r.converged))));
    metrics.push(MetricStats::from_values("iterations", &iterations));
    metrics.push(MetricStats::from_values("converged", &converged));
    let n = runs.len() as f64;
    AggregateRow {
        params,
        mean_runtime_s: runs.iter().map(|r| r.runtime_s).sum::<f64>() / n,
        mean_iterations: iterations.iter().sum::<f64>() / n,
        convergence_rate: converged.iter().sum::<f64>() / n,
        metrics,
    }
}

/// Runs the sweep in memory. Relative paths in the config resolve against `base_dir`.
pub fn run_sweep(cfg: &ExperimentConfig, base_dir: &Path) -> Result<SweepOutcome> {
    let x = cfg.dataset.load(base_dir)?;
    let knowledge = load_sweep_knowledge(cfg, base_dir)?;
    let cells = cfg.cells();
    let mut tasks = Vec::with_capacity(cells.len() * cfg.repetitions);
    for (c, cell) in cells.iter().enumerate() {
        for rep in 0..cfg.repetitions {
            let run_cfg = cfg.run_config(cell, rep)?;
            run_cfg.validate(x.sample_count())?;
            tasks.push((c, rep, run_cfg));
        }
    }

    let execute = |&(cell, rep, ref run_cfg): &(usize, usize, AlgoConfig)| -> Result<RunRecord> {
        let start = Instant::now();
        let r = run_algorithm(cfg.algorithm, &x, knowledge.as_ref(), run_cfg)?;
        let runtime_s = start.elapsed().as_secs_f64();
        let s = score(&x, &r, run_cfg)?;
        Ok(RunRecord {
            cell,
            rep,
            seed: run_cfg.seed,
            rand_index: s.rand_index,
            nmi: s.nmi,
            xb: s.xb,
            iterations: r.iterations,
            converged: r.converged,
            final_objective: r.final_objective(),
            runtime_s,
        })
    };
    let runs: Vec<RunRecord> = match cfg.parallelism {
        Some(p) => rayon::ThreadPoolBuilder::new()
            .num_threads(p)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| tasks.par_iter().map(execute).collect::<Result<_>>())?,
        None => tasks.par_iter().map(execute).collect::<Result<_>>()?,
    };

    let labeled = x.labels().is_some();
    let rows: Vec<AggregateRow> = cells
        .into_iter()
        .enumerate()
        .map(|(c, cell)| {
            let slice = &runs[c * cfg.repetitions..(c + 1) * cfg.repetitions];
            aggregate(cfg.algorithm, cell, slice, labeled)
        })
        .collect();
    let best = if labeled {
        let mut best = 0;
        for (c, row) in rows.iter().enumerate() {
            if row.metric("ri").unwrap().mean > rows[best].metric("ri").unwrap().mean {
                best = c;
            }
        }
        Some(best)
    } else {
        None
    };
    Ok(SweepOutcome {
        algorithm: cfg.algorithm,
        param_names: cfg.param_names().into_iter().map(String::from).collect(),
        rows,
        runs,
        best,
    })
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

impl SweepOutcome {
    /// `param…,metric,min,max,mean,std`, grid order then metric. Runtime is
    /// left out so the bytes depend only on the config.
    pub fn aggregate_csv(&self) -> String {
        let mut out = String::new();
        for name in &self.param_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("metric,min,max,mean,std\n");
        for row in &self.rows {
            let params: String = row.params.iter().map(|p| format!("{p},")).collect();
            for m in &row.metrics {
                let _ = writeln!(
                    out,
                    "{params}{},{},{},{},{}",
                    m.metric,
                    fmt_num(m.min),
                    fmt_num(m.max),
                    fmt_num(m.mean),
                    fmt_num(m.std)
                );
            }
        }
        out
    }

    /// One JSON object per fit, in grid-then-repetition order.
    pub fn run_log(&self) -> String {
        let mut out = String::new();
        for r in &self.runs {
            let params: Map<String, Value> = self
                .param_names
                .iter()
                .zip(&self.rows[r.cell].params)
                .map(|(n, &v)| (n.clone(), json!(v)))
                .collect();
            let line = json!({
                "algorithm": self.algorithm.as_str(),
                "cell": r.cell,
                "params": params,
                "rep": r.rep,
                "seed": r.seed,
                "rand_index": r.rand_index,
                "nmi": r.nmi,
                self.algorithm.xb_name(): r.xb,
                "iterations": r.iterations,
                "converged": r.converged,
                "final_objective": r.final_objective,
                "runtime_s": r.runtime_s,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }

    /// Human-readable summary: best cell and runtime per cell.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let describe = |row: &AggregateRow| -> String {
            self.param_names
                .iter()
                .zip(&row.params)
                .map(|(n, v)| format!("{n}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if let Some(b) = self.best {
            let row = &self.rows[b];
            let ri = row.metric("ri").unwrap();
            let _ = writeln!(out, "best mean RI: {} ({:.4} ± {:.4})", describe(row), ri.mean, ri.std);
        }
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{}: mean runtime {:.6} s, mean iterations {:.1}, converged {:.0}%",
                describe(row),
                row.mean_runtime_s,
                row.mean_iterations,
                100.0 * row.convergence_rate
            );
        }
        out
    }
}

/// Runs the sweep described by `config_path` and writes the aggregate CSV
/// and the per-run log (default: the output path with a `.jsonl` extension).
pub fn run_sweep_file(config_path: &Path) -> Result<SweepOutcome> {
    let cfg = ExperimentConfig::from_path(config_path)?;
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let outcome = run_sweep(&cfg, base_dir)?;
    let output = base_dir.join(&cfg.output);
    let log = match &cfg.log {
        Some(l) => base_dir.join(l),
        None => output.with_extension("jsonl"),
    };
    std::fs::write(&output, outcome.aggregate_csv()).map_err(|e| Error::io(&output, e))?;
    std::fs::write(&log, outcome.run_log()).map_err(|e| Error::io(&log, e))?;
    Ok(outcome)
}

//! The evaluation harness: space combinations, method sweeps, metric
//! aggregation and CSV reports.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::RunConfig;
use crate::corpus::{Corpus, CorpusError};
use crate::floorplan::Floorplan;
use crate::pipeline::{run_method, MatchCache, Method, RunOutcome};

mod report;

pub use report::{aggregate, format_table, read_csv, report_csv, AggregateRow, Stats};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("unknown plan `{0}` in combination")]
    UnknownPlan(String),
    #[error("i/o on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed output `{path}`: {message}")]
    Output { path: String, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
    move |source| EvalError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Client-count condition: one host plus equal numbers of homes and offices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "H1-C2")]
    C2,
    #[serde(rename = "H1-C4")]
    C4,
    #[serde(rename = "H1-C6")]
    C6,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::C2, Condition::C4, Condition::C6];

    pub fn name(self) -> &'static str {
        match self {
            Condition::C2 => "H1-C2",
            Condition::C4 => "H1-C4",
            Condition::C6 => "H1-C6",
        }
    }

    /// Homes (and, equally, offices) per combination.
    pub fn per_kind(self) -> usize {
        match self {
            Condition::C2 => 1,
            Condition::C4 => 2,
            Condition::C6 => 3,
        }
    }

    pub fn n_clients(self) -> usize {
        2 * self.per_kind()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown condition `{s}` (expected H1-C2, H1-C4 or H1-C6)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Combination {
    pub id: String,
    pub host: String,
    /// Homes first, then offices, each in id order.
    pub clients: Vec<String>,
    pub condition: Condition,
}

/// All combinations of one condition, in lexicographic order.
pub fn enumerate_condition(corpus: &Corpus, condition: Condition) -> Vec<Combination> {
    let k = condition.per_kind();
    let ids = |v: &[Floorplan]| v.iter().map(|p| p.id.clone()).collect::<Vec<_>>();
    let (homes, offices) = (ids(&corpus.homes), ids(&corpus.offices));
    let mut out = Vec::new();
    for host in &corpus.hosts {
        for hs in homes.iter().combinations(k) {
            for os in offices.iter().combinations(k) {
                let clients: Vec<String> = hs.iter().chain(&os).map(|s| s.to_string()).collect();
                out.push(Combination {
                    id: std::iter::once(host.id.as_str())
                        .chain(clients.iter().map(String::as_str))
                        .join("+"),
                    host: host.id.clone(),
                    clients,
                    condition,
                });
            }
        }
    }
    out
}

/// Every combination of every condition (900 on the bundled corpus).
pub fn enumerate_combinations(corpus: &Corpus) -> Result<Vec<Combination>, EvalError> {
    corpus.check_shape()?;
    Ok(Condition::ALL
        .into_iter()
        .flat_map(|c| enumerate_condition(corpus, c))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub method: Method,
    pub condition: Condition,
    pub combination: String,
    pub n_hosts: usize,
    pub success: bool,
    pub total_interactable: f64,
    pub total_obstacle: f64,
    pub per_client_interactable: Vec<f64>,
    pub per_client_obstacle: Vec<f64>,
}

impl MetricsRecord {
    pub fn from_outcome(outcome: &RunOutcome, combo: &Combination) -> Self {
        Self {
            method: outcome.method,
            condition: combo.condition,
            combination: combo.id.clone(),
            n_hosts: outcome.n_hosts,
            success: outcome.success,
            total_interactable: outcome.metrics.total_interactable,
            total_obstacle: outcome.metrics.total_obstacle,
            per_client_interactable: outcome.metrics.per_client_interactable.clone(),
            per_client_obstacle: outcome.metrics.per_client_obstacle.clone(),
        }
    }
}

/// Runs one method on one combination.
pub fn run_combination(
    method: Method,
    combo: &Combination,
    n_hosts: usize,
    corpus: &Corpus,
    cfg: &RunConfig,
    cache: &MatchCache,
) -> Result<RunOutcome, EvalError> {
    let find = |id: &str| corpus.find(id).ok_or_else(|| EvalError::UnknownPlan(id.to_string()));
    let host = find(&combo.host)?;
    let clients = combo
        .clients
        .iter()
        .map(|c| find(c).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(run_method(method, host, &clients, n_hosts, cfg, cache))
}

/// What to sweep and where to put per-combination outputs.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub methods: Vec<Method>,
    pub conditions: Vec<Condition>,
    pub host_counts: Vec<usize>,
    /// Root of the `<method>/<condition>/<combination>/h<n>.json` tree.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            conditions: Condition::ALL.to_vec(),
            host_counts: vec![1, 2, 3],
            out_dir: None,
            jobs: None,
        }
    }
}

pub fn outcome_path(root: &Path, method: Method, combo: &Combination, n_hosts: usize) -> PathBuf {
    root.join(method.name())
        .join(combo.condition.name())
        .join(&combo.id)
        .join(format!("h{n_hosts}.json"))
}

/// Runs the sweep and returns records in (method, condition, combination,
/// host count) order. Existing outputs are reused, so interrupted sweeps
/// resume where they stopped.
pub fn run_sweep(
    corpus: &Corpus,
    sweep: &Sweep,
    cfg: &RunConfig,
    cache: &MatchCache,
) -> Result<Vec<MetricsRecord>, EvalError> {
    corpus.check_shape()?;
    let mut tasks = Vec::new();
    for &m in &sweep.methods {
        for &c in &sweep.conditions {
            for combo in enumerate_condition(corpus, c) {
                for &h in &sweep.host_counts {
                    tasks.push((m, combo.clone(), h));
                }
            }
        }
    }
    let work = || {
        tasks
            .par_iter()
            .map(|(m, combo, h)| run_task(*m, combo, *h, corpus, sweep, cfg, cache))
            .collect::<Result<Vec<_>, _>>()
    };
    match sweep.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| EvalError::Pool(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn run_task(
    method: Method,
    combo: &Combination,
    n_hosts: usize,
    corpus: &Corpus,
    sweep: &Sweep,
    cfg: &RunConfig,
    cache: &MatchCache,
) -> Result<MetricsRecord, EvalError> {
    let path = sweep
        .out_dir
        .as_ref()
        .map(|root| outcome_path(root, method, combo, n_hosts));
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        let text = std::fs::read_to_string(p).map_err(io_err(p))?;
        let outcome: RunOutcome = serde_json::from_str(&text).map_err(|e| EvalError::Output {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
        return Ok(MetricsRecord::from_outcome(&outcome, combo));
    }
    let outcome = run_combination(method, combo, n_hosts, corpus, cfg, cache)?;
    if let Some(p) = &path {
        let dir = p.parent().expect("outcome path has a parent");
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        // Write then rename so an interrupted sweep never leaves a partial file.
        let tmp = p.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(&outcome).expect("outcome serializes") + "\n";
        std::fs::write(&tmp, text).map_err(io_err(&tmp))?;
        std::fs::rename(&tmp, p).map_err(io_err(p))?;
    }
    Ok(MetricsRecord::from_outcome(&outcome, combo))
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{io_err, Condition, EvalError, MetricsRecord};
use crate::pipeline::Method;

/// Mean, sample standard deviation and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub sem: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Stats {
            n,
            mean,
            sd,
            sem: sd / (n as f64).sqrt(),
        })
    }
}

/// One (method, condition, host count) cell. Area statistics cover the
/// successful single-host records only.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub method: Method,
    pub condition: Condition,
    pub n_hosts: usize,
    pub combinations: usize,
    pub successes: usize,
    pub total_interactable: Option<Stats>,
    pub total_obstacle: Option<Stats>,
    /// Pooled over every client of every successful record.
    pub client_interactable: Option<Stats>,
    pub client_obstacle: Option<Stats>,
}

impl AggregateRow {
    pub fn success_rate(&self) -> f64 {
        if self.combinations == 0 {
            0.0
        } else {
            self.successes as f64 / self.combinations as f64
        }
    }
}

pub fn aggregate(records: &[MetricsRecord]) -> Vec<AggregateRow> {
    let mut cells: BTreeMap<(Method, Condition, usize), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.method, r.condition, r.n_hosts)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((method, condition, n_hosts), rs)| {
            let ok: Vec<&MetricsRecord> = rs.iter().copied().filter(|r| r.success && n_hosts == 1).collect();
            let field = |f: fn(&MetricsRecord) -> f64| Stats::of(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            let pooled = |f: fn(&MetricsRecord) -> &Vec<f64>| {
                Stats::of(&ok.iter().flat_map(|r| f(r).iter().copied()).collect::<Vec<_>>())
            };
            AggregateRow {
                method,
                condition,
                n_hosts,
                combinations: rs.len(),
                successes: rs.iter().filter(|r| r.success).count(),
                total_interactable: field(|r| r.total_interactable),
                total_obstacle: field(|r| r.total_obstacle),
                client_interactable: pooled(|r| &r.per_client_interactable),
                client_obstacle: pooled(|r| &r.per_client_obstacle),
            }
        })
        .collect()
}

const METRICS: [&str; 4] = [
    "total_interactable",
    "total_obstacle",
    "client_interactable",
    "client_obstacle",
];

fn header() -> Vec<String> {
    let mut h: Vec<String> = [
        "method",
        "condition",
        "n_hosts",
        "combinations",
        "successes",
        "success_rate",
    ]
    .map(String::from)
    .to_vec();
    for m in METRICS {
        for s in ["n", "mean", "sd", "sem"] {
            h.push(format!("{m}_{s}"));
        }
    }
    h
}

/// Writes one row per cell; absent statistics are empty fields.
pub fn report_csv(rows: &[AggregateRow], path: &Path) -> Result<(), EvalError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header())?;
    for r in rows {
        let mut rec = vec![
            r.method.name().to_string(),
            r.condition.name().to_string(),
            r.n_hosts.to_string(),
            r.combinations.to_string(),
            r.successes.to_string(),
            r.success_rate().to_string(),
        ];
        for s in [
            r.total_interactable,
            r.total_obstacle,
            r.client_interactable,
            r.client_obstacle,
        ] {
            match s {
                Some(s) => rec.extend([s.n.to_string(), s.mean.to_string(), s.sd.to_string(), s.sem.to_string()]),
                None => rec.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        w.write_record(rec)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Parses a file written by [`report_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<AggregateRow>, EvalError> {
    let bad = |message: String| EvalError::Output {
        path: path.display().to_string(),
        message,
    };
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).ok_or_else(|| bad(format!("missing column {i}")));
        let num = |i: usize| -> Result<f64, EvalError> {
            get(i)?.parse::<f64>().map_err(|e| bad(format!("column {i}: {e}")))
        };
        let int = |i: usize| -> Result<usize, EvalError> {
            get(i)?.parse::<usize>().map_err(|e| bad(format!("column {i}: {e}")))
        };
        let stats = |i: usize| -> Result<Option<Stats>, EvalError> {
            if get(i)?.is_empty() {
                return Ok(None);
            }
            Ok(Some(Stats {
                n: int(i)?,
                mean: num(i + 1)?,
                sd: num(i + 2)?,
                sem: num(i + 3)?,
            }))
        };
        rows.push(AggregateRow {
            method: get(0)?.parse().map_err(bad)?,
            condition: get(1)?.parse().map_err(bad)?,
            n_hosts: int(2)?,
            combinations: int(3)?,
            successes: int(4)?,
            total_interactable: stats(6)?,
            total_obstacle: stats(10)?,
            client_interactable: stats(14)?,
            client_obstacle: stats(18)?,
        });
    }
    Ok(rows)
}

/// Fixed-width text summary for the terminal.
pub fn format_table(rows: &[AggregateRow]) -> String {
    let mut s = format!(
        "{:<9} {:<6} {:>2} {:>9} {:>18} {:>18} {:>18}\n",
        "method", "cond", "H", "success", "total inter. m²", "total obst. m²", "per-client m²"
    );
    let cell = |st: Option<Stats>| match st {
        Some(st) => format!("{:.2} ± {:.2}", st.mean, st.sem),
        None => "-".to_string(),
    };
    for r in rows {
        let _ = writeln!(
            s,
            "{:<9} {:<6} {:>2} {:>8.1}% {:>18} {:>18} {:>18}",
            r.method.name(),
            r.condition.name(),
            r.n_hosts,
            100.0 * r.success_rate(),
            cell(r.total_interactable),
            cell(r.total_obstacle),
            cell(r.client_interactable),
        );
    }
    s
}

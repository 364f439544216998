//! Experiment batteries: one instance per configuration, every algorithm on
//! each, rows emitted in configuration order whatever the worker count.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use toepstab::{run_experiment, Algorithm, Instance, RhsMode, StabilityReport};

use crate::error::{CliError, CliResult};
use crate::io;

/// Overrides the number of worker threads; unset or 0 uses rayon's default.
pub const WORKERS_ENV: &str = "TOEPSTAB_WORKERS";

/// Column order of the CSV output; JSON rows carry the same keys.
pub const COLUMNS: [&str; 9] = [
    "instance",
    "algorithm",
    "n",
    "cond",
    "decomp_error",
    "soln_error",
    "scaled_residual",
    "warnings",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub cond: Option<f64>,
    pub decomp_error: Option<f64>,
    pub soln_error: Option<f64>,
    pub scaled_residual: Option<f64>,
    /// Near-breakdown step indices joined by `;`.
    pub warnings: String,
    pub error: Option<String>,
}

impl From<StabilityReport> for Row {
    fn from(r: StabilityReport) -> Self {
        Row {
            instance: r.instance,
            algorithm: r.algorithm.name().to_string(),
            n: r.n,
            cond: Some(r.cond_estimate),
            decomp_error: r.decomp_error,
            soln_error: r.soln_error,
            scaled_residual: r.scaled_residual,
            warnings: r
                .warnings
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            error: r.error.map(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instances: Vec<Instance>,
    pub algorithms: Vec<Algorithm>,
    pub rhs: RhsMode,
}

impl ExperimentConfig {
    pub fn new(
        instances: Vec<Instance>,
        algorithms: Vec<Algorithm>,
        rhs: RhsMode,
    ) -> CliResult<Self> {
        if algorithms.is_empty() {
            return Err(CliError::Usage("algorithm list is empty".into()));
        }
        if instances.is_empty() {
            return Err(CliError::Usage("no instances to run".into()));
        }
        Ok(Self {
            instances,
            algorithms,
            rhs,
        })
    }
}

/// Comma-separated algorithm names; `all` expands to every algorithm.
pub fn parse_algorithms(list: &str) -> CliResult<Vec<Algorithm>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name == "all" {
            out.extend(Algorithm::ALL);
        } else {
            out.push(
                name.parse()
                    .map_err(|e: toepstab::Error| CliError::Usage(e.to_string()))?,
            );
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("algorithm list is empty".into()));
    }
    Ok(out)
}

/// `start:end:step` inclusive, or a single order.
pub fn parse_sweep(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("bad sweep '{s}', expected start:end:step"));
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (start, end, step) = match parts[..] {
        [n] => (n, n, 1),
        [a, b, c] => (a, b, c),
        _ => return Err(bad()),
    };
    if start == 0 || step == 0 || start > end {
        return Err(bad());
    }
    Ok((start..=end).step_by(step).collect())
}

fn nominal_n(instance: &Instance) -> usize {
    match instance {
        Instance::Prolate { n, .. } | Instance::Random { n, .. } => *n,
        Instance::Reflection(spec) => spec.n(),
        Instance::Explicit { matrix, .. } => matrix.n(),
    }
}

fn run_instance(instance: &Instance, config: &ExperimentConfig) -> Vec<Row> {
    match run_experiment(instance, &config.algorithms, config.rhs) {
        Ok(reports) => reports.into_iter().map(Row::from).collect(),
        Err(e) => config
            .algorithms
            .iter()
            .map(|a| Row {
                instance: instance.descriptor(),
                algorithm: a.name().to_string(),
                n: nominal_n(instance),
                cond: None,
                decomp_error: None,
                soln_error: None,
                scaled_residual: None,
                warnings: String::new(),
                error: Some(e.to_string()),
            })
            .collect(),
    }
}

fn worker_count() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(k) => Ok(Some(k)),
            Err(_) => Err(CliError::Usage(format!(
                "{WORKERS_ENV}='{v}' is not a count"
            ))),
        },
    }
}

/// Runs every configuration; failures become rows with the error column set.
pub fn run(config: &ExperimentConfig) -> CliResult<Vec<Row>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = worker_count()? {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let per_instance: Vec<Vec<Row>> = pool.install(|| {
        config
            .instances
            .par_iter()
            .map(|inst| run_instance(inst, config))
            .collect()
    });
    Ok(per_instance.into_iter().flatten().collect())
}

pub fn rhs_label(rhs: RhsMode) -> String {
    match rhs {
        RhsMode::UnitSolution => "unit".to_string(),
        RhsMode::Random { seed } => format!("random(seed={seed})"),
        RhsMode::Scaled { seed } => format!("scaled(seed={seed})"),
    }
}

pub fn render(rows: &[Row], format: Format, seed: Option<u64>, rhs: RhsMode) -> CliResult<String> {
    let mut header = io::provenance(seed);
    header.push(format!("rhs: {}", rhs_label(rhs)));
    match format {
        Format::Csv => {
            let mut out = String::new();
            for line in &header {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Output(e.to_string()))?;
            if rows.is_empty() {
                out.push_str(&COLUMNS.join(","));
                out.push('\n');
            }
            out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))?);
            Ok(out)
        }
        Format::Json => {
            let doc = serde_json::json!({
                "header": header,
                "columns": COLUMNS,
                "rows": rows,
            });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn write(
    rows: &[Row],
    format: Format,
    seed: Option<u64>,
    rhs: RhsMode,
    path: Option<&Path>,
) -> CliResult<()> {
    io::emit(path, &render(rows, format, seed, rhs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_inclusive() {
        assert_eq!(parse_sweep("10:100:10").unwrap().len(), 10);
        assert_eq!(parse_sweep("5:6:3").unwrap(), vec![5]);
        assert_eq!(parse_sweep("7").unwrap(), vec![7]);
        for bad in ["0:10:1", "10:5:1", "1:2:0", "1:2", "a:b:c", ""] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn algorithm_lists() {
        assert_eq!(parse_algorithms("all").unwrap().len(), Algorithm::ALL.len());
        assert_eq!(
            parse_algorithms("levinson, cholesky").unwrap(),
            vec![Algorithm::Levinson, Algorithm::Cholesky]
        );
        assert!(matches!(parse_algorithms(""), Err(CliError::Usage(_))));
        assert!(matches!(parse_algorithms(" , "), Err(CliError::Usage(_))));
        assert!(matches!(parse_algorithms("qr"), Err(CliError::Usage(_))));
    }

    #[test]
    fn csv_header_matches_columns() {
        let inst = Instance::Prolate { n: 6, omega: 0.25 };
        let cfg =
            ExperimentConfig::new(vec![inst], Algorithm::TABLE.to_vec(), RhsMode::UnitSolution)
                .unwrap();
        let rows = run(&cfg).unwrap();
        let text = render(&rows, Format::Csv, None, cfg.rhs).unwrap();
        let first = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(first, COLUMNS.join(","));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }

    #[test]
    fn failed_instance_yields_error_rows() {
        let inst = Instance::Prolate { n: 4, omega: 0.75 };
        let cfg = ExperimentConfig::new(
            vec![inst],
            vec![Algorithm::Levinson, Algorithm::Cholesky],
            RhsMode::UnitSolution,
        )
        .unwrap();
        let rows = run(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.error.is_some() && r.cond.is_none()));
    }

    #[test]
    fn empty_algorithm_list_is_rejected() {
        let inst = Instance::Prolate { n: 4, omega: 0.25 };
        assert!(matches!(
            ExperimentConfig::new(vec![inst], Vec::new(), RhsMode::UnitSolution),
            Err(CliError::Usage(_))
        ));
    }
}

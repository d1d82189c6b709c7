//! Run matrices over benchmarks, solvers, oracle models and seeds.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ParseError;
use crate::oracle::{cegis_loop, random_loop, OracleConfig, OracleModel, SynthesisReport};
use crate::solver::PbeSolver;
use crate::text::{parse_benchmark, Benchmark};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

pub fn load_benchmark(path: &Path) -> Result<Benchmark, BenchError> {
    let src = fs::read_to_string(path).map_err(io_err(path))?;
    parse_benchmark(&src).map_err(|source| BenchError::Parse { path: path.to_path_buf(), source })
}

/// Every `*.bench` file in `dir`, sorted by file name.
pub fn load_benchmarks(dir: &Path) -> Result<Vec<Benchmark>, BenchError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "bench"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_benchmark(p)).collect()
}

/// Geometric means of per-run ratios against the reference solver, over
/// runs where both succeeded on the same benchmark, model and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub solver: String,
    pub reference: String,
    pub model: OracleModel,
    pub pairs: usize,
    pub successes: usize,
    pub runs: usize,
    pub examples_ratio: Option<f64>,
    pub time_ratio: Option<f64>,
    pub size_ratio: Option<f64>,
}

/// One line of a JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReportRow {
    Run(SynthesisReport),
    Aggregate(Aggregate),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatrixReport {
    pub runs: Vec<SynthesisReport>,
    pub aggregates: Vec<Aggregate>,
}

impl MatrixReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        let runs = self.runs.iter().cloned().map(ReportRow::Run);
        runs.chain(self.aggregates.iter().cloned().map(ReportRow::Aggregate)).collect()
    }

    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        let mut m = MatrixReport::default();
        for r in rows {
            match r {
                ReportRow::Run(r) => m.runs.push(r),
                ReportRow::Aggregate(a) => m.aggregates.push(a),
            }
        }
        m
    }

    pub fn to_json(&self) -> Result<String, BenchError> {
        Ok(serde_json::to_string_pretty(&self.rows())?)
    }

    pub fn from_json(src: &str) -> Result<Self, BenchError> {
        Ok(MatrixReport::from_rows(serde_json::from_str(src)?))
    }

    pub fn write_json(&self, path: &Path) -> Result<(), BenchError> {
        let mut f = fs::File::create(path).map_err(io_err(path))?;
        f.write_all(self.to_json()?.as_bytes()).map_err(io_err(path))
    }

    /// Run rows only, one per line.
    pub fn write_csv(&self, path: &Path) -> Result<(), BenchError> {
        #[derive(Serialize)]
        struct Row<'a> {
            benchmark: &'a str,
            solver: &'a str,
            model: OracleModel,
            seed: u64,
            examples_used: usize,
            wall_time: f64,
            program_size: u64,
            success: bool,
            error: &'a str,
        }
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.runs {
            w.serialize(Row {
                benchmark: &r.benchmark,
                solver: &r.solver,
                model: r.model,
                seed: r.seed,
                examples_used: r.examples_used,
                wall_time: r.wall_time,
                program_size: r.program_size,
                success: r.success,
                error: r.error.as_deref().unwrap_or(""),
            })?;
        }
        w.flush().map_err(io_err(path))
    }
}

fn geo_mean(ratios: &[f64]) -> Option<f64> {
    if ratios.is_empty() {
        return None;
    }
    Some((ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp())
}

pub fn aggregate(runs: &[SynthesisReport], reference: &str) -> Vec<Aggregate> {
    type Key<'a> = (&'a str, OracleModel, u64);
    let mut by_ref: BTreeMap<Key, &SynthesisReport> = BTreeMap::new();
    for r in runs.iter().filter(|r| r.solver == reference) {
        by_ref.insert((&r.benchmark, r.model, r.seed), r);
    }
    let mut groups: BTreeMap<(&str, OracleModel), Vec<&SynthesisReport>> = BTreeMap::new();
    for r in runs {
        groups.entry((&r.solver, r.model)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((solver, model), rs)| {
            let (mut ex, mut time, mut size) = (Vec::new(), Vec::new(), Vec::new());
            for r in rs.iter().filter(|r| r.success) {
                let Some(base) = by_ref.get(&(r.benchmark.as_str(), model, r.seed)) else { continue };
                if !base.success {
                    continue;
                }
                ex.push(r.examples_used.max(1) as f64 / base.examples_used.max(1) as f64);
                time.push(r.wall_time.max(1e-6) / base.wall_time.max(1e-6));
                size.push(r.program_size.max(1) as f64 / base.program_size.max(1) as f64);
            }
            Aggregate {
                solver: solver.to_string(),
                reference: reference.to_string(),
                model,
                pairs: ex.len(),
                successes: rs.iter().filter(|r| r.success).count(),
                runs: rs.len(),
                examples_ratio: geo_mean(&ex),
                time_ratio: geo_mean(&time),
                size_ratio: geo_mean(&size),
            }
        })
        .collect()
}

/// One oracle loop per (benchmark, solver, model, seed), spread over
/// `threads` workers. Runs appear in that nesting order whatever the
/// scheduling; aggregates compare against `solvers[0]`.
pub fn run_matrix(
    benchmarks: &[Benchmark],
    solvers: &[&dyn PbeSolver],
    models: &[OracleModel],
    seeds: &[u64],
    cfg: &OracleConfig,
    threads: usize,
) -> MatrixReport {
    let mut jobs = Vec::new();
    for b in benchmarks {
        for &s in solvers {
            for &m in models {
                for &seed in seeds {
                    jobs.push((b, s, m, seed));
                }
            }
        }
    }
    let work = || {
        jobs.par_iter()
            .map(|&(b, s, m, seed)| {
                let cfg = OracleConfig { rng_seed: seed, ..*cfg };
                let run = match m {
                    OracleModel::Cegis => cegis_loop,
                    OracleModel::Random => random_loop,
                };
                let mut report = run(s, &b.truth, &b.grammar, &cfg).report;
                report.benchmark = b.name.clone();
                report
            })
            .collect::<Vec<_>>()
    };
    let runs = match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    let aggregates = solvers.first().map(|r| aggregate(&runs, r.name())).unwrap_or_default();
    MatrixReport { runs, aggregates }
}

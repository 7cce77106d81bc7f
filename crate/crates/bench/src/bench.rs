//! Runs every requested algorithm over a grid of datasets and sparsity levels.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use spca::baselines::run_baseline;
use spca::certificates::ssr_report;
use spca::rounding::multi_round;
use spca::sdp::{solve_spca_sdp, CgalConfig};
use spca::statmodel::{gen_model, ModelSpec};
use spca::SymmetricMatrix;

use crate::error::{BenchError, Result};
use crate::io::{load_matrix, MatrixFormat};
use crate::report::{Algorithm, BenchRecord, RaExtras, ReportFormat};

pub const DEFAULT_TRIALS: usize = 3000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    File {
        path: PathBuf,
        format: MatrixFormat,
        #[serde(default)]
        center: bool,
    },
    /// Sample covariance of a generated model instance.
    Model { spec: ModelSpec, seed: u64 },
    Matrix {
        name: String,
        matrix: SymmetricMatrix,
    },
}

impl DatasetSource {
    /// Row label in the report. Centered gram inputs are tagged so the
    /// preprocessing is visible.
    pub fn name(&self) -> String {
        match self {
            DatasetSource::File {
                path,
                format,
                center,
            } => {
                let stem = path.file_stem().map_or_else(
                    || path.display().to_string(),
                    |s| s.to_string_lossy().into_owned(),
                );
                if *center && *format == MatrixFormat::GramOfRows {
                    format!("{stem} (centered)")
                } else {
                    stem
                }
            }
            DatasetSource::Model { spec, seed } => {
                format!("model-d{}-k{}-n{}-seed{}", spec.d, spec.k, spec.n, seed)
            }
            DatasetSource::Matrix { name, .. } => name.clone(),
        }
    }

    pub fn load(&self) -> Result<SymmetricMatrix> {
        match self {
            DatasetSource::File {
                path,
                format,
                center,
            } => load_matrix(path, *format, *center),
            DatasetSource::Model { spec, seed } => Ok(gen_model(spec, *seed)?.a),
            DatasetSource::Matrix { matrix, .. } => Ok(matrix.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetSource>,
    pub ks: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub cgal: CgalConfig,
    /// Rounding trials for RA.
    pub trials: usize,
    pub seed: u64,
    /// Each timed call runs this many times; the median time is reported.
    pub repeat: usize,
    pub format: ReportFormat,
    /// Wall-clock budget in seconds. Checked once the run finishes; an
    /// overrun marks the row as failed but keeps its objective.
    pub time_limits: BTreeMap<Algorithm, f64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            ks: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            cgal: CgalConfig::default(),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            repeat: 1,
            format: ReportFormat::Csv,
            time_limits: BTreeMap::new(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::Config(m.to_owned()));
        if self.datasets.is_empty() {
            return bad("no datasets");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return bad("k list must be nonempty and positive");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms");
        }
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if self.repeat == 0 {
            return bad("repeat must be positive");
        }
        if self.time_limits.values().any(|t| !(*t > 0.0)) {
            return bad("time limits must be positive");
        }
        Ok(())
    }
}

fn median(mut xs: Vec<Duration>) -> f64 {
    xs.sort();
    let n = xs.len();
    let mid = if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    };
    mid.as_secs_f64()
}

/// Runs `f` `repeat` times, keeping the first result and the median time.
fn timed<T>(repeat: usize, mut f: impl FnMut() -> spca::Result<T>) -> (spca::Result<T>, f64) {
    let mut times = Vec::with_capacity(repeat);
    let mut first = None;
    for _ in 0..repeat {
        let t0 = Instant::now();
        let out = f();
        times.push(t0.elapsed());
        let failed = out.is_err();
        if first.is_none() {
            first = Some(out);
        }
        if failed {
            break;
        }
    }
    (first.expect("repeat >= 1"), median(times))
}

fn unique_in_order<T: PartialEq + Copy>(xs: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    for &x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn failed_row(
    name: &str,
    d: usize,
    k: usize,
    algorithms: &[Algorithm],
    reason: &str,
) -> Vec<BenchRecord> {
    algorithms
        .iter()
        .map(|&algorithm| BenchRecord {
            dataset: name.to_owned(),
            d,
            k,
            algorithm,
            objective: None,
            elapsed_seconds: 0.0,
            extras: None,
            error: Some(reason.to_owned()),
        })
        .collect()
}

fn ra_record(cfg: &BenchConfig, a: &SymmetricMatrix, name: &str, k: usize) -> BenchRecord {
    let mut rec = BenchRecord {
        dataset: name.to_owned(),
        d: a.dim(),
        k,
        algorithm: Algorithm::Ra,
        objective: None,
        elapsed_seconds: 0.0,
        extras: None,
        error: None,
    };
    let (sdp, cgal_seconds) = timed(cfg.repeat, || solve_spca_sdp(a, k, &cfg.cgal));
    let sdp = match sdp {
        Ok(s) => s,
        Err(e) => {
            rec.error = Some(format!("cgal: {e}"));
            return rec;
        }
    };
    let c0 = match ssr_report(&sdp.w, k) {
        Ok(r) => r.c0,
        Err(e) => {
            rec.error = Some(format!("ssr: {e}"));
            return rec;
        }
    };
    let (outcome, sampling_seconds) = timed(cfg.repeat, || {
        multi_round(a, &sdp.w, k, cfg.trials, cfg.seed)
    });
    rec.elapsed_seconds = sampling_seconds;
    rec.extras = Some(RaExtras {
        sdp_objective: sdp.objective,
        c0,
        cgal_seconds,
        total_seconds: cgal_seconds + sampling_seconds,
    });
    match outcome {
        Ok(o) => rec.objective = Some(o.best.objective),
        Err(e) => rec.error = Some(format!("rounding: {e}")),
    }
    rec
}

fn baseline_record(
    cfg: &BenchConfig,
    a: &SymmetricMatrix,
    name: &str,
    k: usize,
    algorithm: Algorithm,
) -> BenchRecord {
    let b = algorithm.baseline().expect("baseline algorithm");
    let (res, elapsed_seconds) = timed(cfg.repeat, || run_baseline(b, a, k));
    let (objective, error) = match res {
        Ok(r) => (Some(r.solution.objective), None),
        Err(e) => (None, Some(e.to_string())),
    };
    BenchRecord {
        dataset: name.to_owned(),
        d: a.dim(),
        k,
        algorithm,
        objective,
        elapsed_seconds,
        extras: None,
        error,
    }
}

fn apply_time_limit(cfg: &BenchConfig, rec: &mut BenchRecord) {
    let Some(&limit) = cfg.time_limits.get(&rec.algorithm) else {
        return;
    };
    let used = rec.extras.map_or(rec.elapsed_seconds, |e| e.total_seconds);
    if rec.error.is_none() && used > limit {
        rec.error = Some(format!("time limit {limit}s exceeded ({used:.3}s)"));
    }
}

/// Runs the grid row by row. Invalid configurations are rejected up front;
/// anything that goes wrong inside a row is recorded on that row.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let algorithms: Vec<Algorithm> = Algorithm::ALL
        .into_iter()
        .filter(|a| cfg.algorithms.contains(a))
        .collect();
    let ks = unique_in_order(&cfg.ks);
    let mut records = Vec::new();
    for source in &cfg.datasets {
        let name = source.name();
        let a = match source.load() {
            Ok(a) => a,
            Err(e) => {
                for &k in &ks {
                    records.extend(failed_row(&name, 0, k, &algorithms, &format!("load: {e}")));
                }
                continue;
            }
        };
        for &k in &ks {
            if k > a.dim() {
                let reason = format!("k = {k} exceeds d = {}", a.dim());
                records.extend(failed_row(&name, a.dim(), k, &algorithms, &reason));
                continue;
            }
            for &algorithm in &algorithms {
                let mut rec = match algorithm {
                    Algorithm::Ra => ra_record(cfg, &a, &name, k),
                    _ => baseline_record(cfg, &a, &name, k, algorithm),
                };
                apply_time_limit(cfg, &mut rec);
                records.push(rec);
            }
        }
    }
    Ok(records)
}

pub fn any_failed(records: &[BenchRecord]) -> bool {
    records.iter().any(|r| r.error.is_some())
}

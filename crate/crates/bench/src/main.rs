use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use spca::baselines::{run_baseline, Baseline};
use spca::certificates::{
    build_rank_one_instance, check_sparse_top_eigvec, ssr_report, verify_kkt, DEFAULT_KKT_TOL,
};
use spca::rounding::multi_round;
use spca::sdp::{solve_spca_sdp, CgalConfig};
use spca::statmodel::{gen_model, ModelSpec, NoiseKind, PerturbationKind};
use spca::SymmetricMatrix;
use spca_bench::bench::{
    any_failed, run_bench, BenchConfig, DatasetSource, DEFAULT_SEED, DEFAULT_TRIALS,
};
use spca_bench::io::{load_matrix, write_matrix_market, MatrixFormat};
use spca_bench::report::{gap_table, render, render_gap_csv, Algorithm, ReportFormat};
use spca_bench::{BenchError, Result};

#[derive(Parser)]
#[command(
    name = "spca",
    version,
    about = "Sparse PCA via SDP relaxation and randomized rounding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the SDP relaxation with CGAL.
    SolveSdp {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cgal: CgalArgs,
        #[arg(long)]
        k: usize,
        /// Write the solution matrix here (Matrix Market).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Round an SDP solution, solving the relaxation first if none is given.
    Round {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cgal: CgalArgs,
        #[arg(long)]
        k: usize,
        /// SDP solution in Matrix Market format.
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Run one or more baselines.
    Baseline {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        /// Defaults to every baseline.
        #[arg(long = "algo", value_delimiter = ',')]
        algos: Vec<String>,
    },
    /// Run the benchmark grid and write a report.
    Bench(BenchArgs),
    /// Draw a spiked covariance instance and write its sample covariance.
    GenModel(GenModelArgs),
    /// Certificates and diagnostics.
    Certify {
        #[command(flatten)]
        input: OptionalInputArgs,
        #[arg(long)]
        k: usize,
        /// Report SSR diagnostics for this SDP solution.
        #[arg(long)]
        w: Option<PathBuf>,
        /// Build and verify a rank-one instance from this direction.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rank_one: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct OptionalInputArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args, Clone)]
struct FormatArgs {
    /// matrix_market, csv or gram_of_rows. Guessed from the extension if absent.
    #[arg(long)]
    input_format: Option<MatrixFormat>,
    /// Subtract column means before forming the Gram matrix.
    #[arg(long)]
    center: bool,
}

impl FormatArgs {
    fn resolve(&self, path: &Path) -> Result<MatrixFormat> {
        self.input_format
            .or_else(|| MatrixFormat::from_path(path))
            .ok_or_else(|| {
                BenchError::Config(format!(
                    "cannot infer format of {}; pass --input-format",
                    path.display()
                ))
            })
    }

    fn load(&self, path: &Path) -> Result<SymmetricMatrix> {
        load_matrix(path, self.resolve(path)?, self.center)
    }
}

#[derive(Args)]
struct CgalArgs {
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long, env = "SPCA_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl CgalArgs {
    fn config(&self) -> CgalConfig {
        let mut c = CgalConfig::default();
        if let Some(n) = self.iters {
            c.iterations = n;
        }
        if let Some(l) = self.lambda0 {
            c.lambda0 = l;
        }
        c.seed = self.seed;
        c
    }
}

#[derive(Args)]
struct BenchArgs {
    /// JSON benchmark configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Vec<PathBuf>,
    #[command(flatten)]
    format_args: FormatArgs,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long = "algo", value_delimiter = ',')]
    algos: Vec<Algorithm>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "SPCA_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    repeat: Option<usize>,
    /// Per-algorithm time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    format: Option<ReportFormat>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write Chan-normalized gaps as CSV.
    #[arg(long)]
    gaps: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Rademacher,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbationArg {
    Zero,
    Constant,
    Random,
}

#[derive(Args)]
struct GenModelArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Eigengap of the spike.
    #[arg(long, default_value_t = 1.0)]
    gap: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda2: f64,
    /// Column-norm bound of the perturbation.
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    noise: NoiseArg,
    #[arg(long, value_enum, default_value = "zero")]
    perturbation: PerturbationArg,
    #[arg(long, env = "SPCA_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Sample covariance in Matrix Market format.
    #[arg(long)]
    output: PathBuf,
    /// Full instance (spike, covariance, data) as JSON.
    #[arg(long)]
    instance: Option<PathBuf>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn bench_config(args: &BenchArgs) -> Result<BenchConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| BenchError::Io {
                path: p.display().to_string(),
                source,
            })?;
            serde_json::from_str(&text)?
        }
        None => BenchConfig::default(),
    };
    for path in &args.input {
        cfg.datasets.push(DatasetSource::File {
            path: path.clone(),
            format: args.format_args.resolve(path)?,
            center: args.format_args.center,
        });
    }
    if !args.k.is_empty() {
        cfg.ks = args.k.clone();
    }
    if !args.algos.is_empty() {
        cfg.algorithms = args.algos.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
        cfg.cgal.seed = s;
    }
    if let Some(n) = args.iters {
        cfg.cgal.iterations = n;
    }
    if let Some(l) = args.lambda0 {
        cfg.cgal.lambda0 = l;
    }
    if let Some(r) = args.repeat {
        cfg.repeat = r;
    }
    if let Some(limit) = args.time_limit {
        for &a in &cfg.algorithms {
            cfg.time_limits.insert(a, limit);
        }
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    Ok(cfg)
}

/// Returns whether every row succeeded.
fn bench(args: &BenchArgs) -> Result<bool> {
    let cfg = bench_config(args)?;
    let records = run_bench(&cfg)?;
    let text = render(&records, cfg.format)?;
    match &args.output {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &args.gaps {
        write_file(p, &render_gap_csv(&gap_table(&records)?)?)?;
    }
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "{} k={} {}: {}",
            r.dataset,
            r.k,
            r.algorithm,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(!any_failed(&records))
}

fn gen(args: &GenModelArgs) -> Result<()> {
    let mut spec = ModelSpec::new(args.d, args.k, args.n, args.gap);
    spec.lambda2 = args.lambda2;
    spec.perturbation_column_bound = args.b;
    spec.noise_kind = match args.noise {
        NoiseArg::Gaussian => NoiseKind::Gaussian,
        NoiseArg::Rademacher => NoiseKind::RademacherScaled,
        NoiseArg::Uniform => NoiseKind::UniformScaled,
    };
    spec.perturbation_kind = match args.perturbation {
        PerturbationArg::Zero => PerturbationKind::Zero,
        PerturbationArg::Constant => PerturbationKind::ConstantColumn,
        PerturbationArg::Random => PerturbationKind::RandomBounded,
    };
    let inst = gen_model(&spec, args.seed)?;
    write_matrix_market(&args.output, &inst.a)?;
    if let Some(p) = &args.instance {
        write_file(p, &serde_json::to_string_pretty(&inst)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::SolveSdp {
            input,
            cgal,
            k,
            output,
        } => {
            let a = input.format.load(&input.input)?;
            let sol = solve_spca_sdp(&a, k, &cgal.config())?;
            if let Some(p) = output {
                write_matrix_market(&p, &sol.w)?;
            }
            print_json(&json!({
                "objective": sol.objective,
                "trace_residual": sol.trace_residual,
                "l1_residual": sol.l1_residual,
                "iterations": sol.iterations_run,
                "rank_bound": sol.rank_bound,
            }))?;
        }
        Command::Round {
            input,
            cgal,
            k,
            w,
            trials,
        } => {
            let a = input.format.load(&input.input)?;
            let w = match w {
                Some(p) => load_matrix(&p, MatrixFormat::MatrixMarket, false)?,
                None => solve_spca_sdp(&a, k, &cgal.config())?.w,
            };
            let out = multi_round(&a, &w, k, trials, cgal.seed)?;
            print_json(&json!({
                "best": out.best,
                "greedy_objective": out.greedy_objective,
                "feasible_trials": out.feasible_trials(),
                "trials": trials,
            }))?;
        }
        Command::Baseline { input, k, algos } => {
            let a = input.format.load(&input.input)?;
            let list: Vec<Baseline> = if algos.is_empty() {
                Baseline::ALL.to_vec()
            } else {
                algos
                    .iter()
                    .map(|s| s.parse())
                    .collect::<spca::Result<_>>()?
            };
            let results = list
                .into_iter()
                .map(|b| run_baseline(b, &a, k))
                .collect::<spca::Result<Vec<_>>>()?;
            print_json(&results)?;
        }
        Command::Bench(args) => return bench(&args),
        Command::GenModel(args) => gen(&args)?,
        Command::Certify {
            input,
            k,
            w,
            rank_one,
        } => {
            let mut out = serde_json::Map::new();
            if let Some(path) = &input.input {
                let a = input.format.load(path)?;
                out.insert(
                    "sparse_top_eigvec".into(),
                    serde_json::to_value(check_sparse_top_eigvec(&a, k)?)?,
                );
            }
            if let Some(p) = &w {
                let w = load_matrix(p, MatrixFormat::MatrixMarket, false)?;
                out.insert("ssr".into(), serde_json::to_value(ssr_report(&w, k)?)?);
            }
            if let Some(u) = &rank_one {
                let (a, cert) = build_rank_one_instance(u, k, 0.0)?;
                let report = verify_kkt(&a, k, &cert, DEFAULT_KKT_TOL)?;
                out.insert("rank_one_certificate".into(), serde_json::to_value(&cert)?);
                out.insert("kkt".into(), serde_json::to_value(&report)?);
            }
            if out.is_empty() {
                return Err(BenchError::Config(
                    "nothing to certify; pass --input, --w or --rank-one".into(),
                ));
            }
            print_json(&out)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

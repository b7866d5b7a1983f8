use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fsval_core::harness::config::parse_list;
use fsval_core::harness::report::{
    emit_csv, emit_json, emit_markdown, emit_plotdata, ExperimentReport, RunMetadata,
};
use fsval_core::harness::{run_cell, run_experiment, ExperimentConfig};
use fsval_core::theory::{chebyshev_tail, chebyshev_threshold, hoeffding_tail, hybrid_variance};

#[derive(Parser, Debug)]
#[command(name = "fsval", version, about = "SRS, k-fold and fusion sampling validation study runner")]
struct Cli {
    #[command(flatten)]
    study: StudyArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct StudyArgs {
    /// Key-value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Number of folds.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// k-fold repetitions per trial.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Comma-separated dataset sizes.
    #[arg(long, global = true)]
    sizes: Option<String>,
    /// Comma-separated trial counts.
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Comma-separated per-fold weights summing to k.
    #[arg(long, global = true)]
    lambdas: Option<String>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// SRS and FSV consume identical random draws.
    #[arg(long, global = true)]
    shared_streams: bool,
    /// Output directory for csv, json and plot formats.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Md,
    Csv,
    Json,
    Plot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full (N, T) grid.
    Run,
    /// Run a single (N, T) cell.
    Cell {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
    },
    /// Variance budget and concentration bounds of the compounded measure.
    Theory(TheoryArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    /// Population variance sigma^2.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Working-sample size n.
    #[arg(long, default_value_t = 7_500)]
    n: usize,
    /// Dataset size N.
    #[arg(long, default_value_t = 10_000)]
    population: usize,
    /// Comma-separated per-fold loss variances.
    #[arg(long, default_value = "0.0013,0.0013,0.0013,0.0013,0.0013")]
    fold_var: String,
    /// Number of iterations T.
    #[arg(long, default_value_t = 10)]
    t: usize,
    /// Comma-separated Chebyshev deviation multiples.
    #[arg(long, default_value = "1.5,2,3")]
    k_dev: String,
    /// Comma-separated Hoeffding deviations.
    #[arg(long, default_value = "0.01,0.02,0.05")]
    eps: String,
    /// Lower bound of the per-iteration measure.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    /// Upper bound of the per-iteration measure.
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    b: f64,
}

fn build_config(args: &StudyArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_text(&text)
            .with_context(|| format!("in {}", path.display()))?;
    }
    if let Some(v) = args.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.reps {
        cfg.repetitions = v;
    }
    if let Some(v) = &args.sizes {
        cfg.sizes = parse_list(v).context("--sizes")?;
    }
    if let Some(v) = &args.trials {
        cfg.trials = parse_list(v).context("--trials")?;
    }
    if let Some(v) = &args.lambdas {
        cfg.lambdas = Some(parse_list(v).context("--lambdas")?);
    }
    if args.jobs.is_some() {
        cfg.jobs = args.jobs;
    }
    if args.shared_streams {
        cfg.shared_streams = true;
    }
    Ok(cfg)
}

fn emit(report: &ExperimentReport, format: Format, out: Option<&Path>) -> Result<()> {
    let dir = out.unwrap_or(Path::new("results"));
    match format {
        Format::Md => {
            let md = emit_markdown(report)?;
            print!("{md}");
            if let Some(dir) = out {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join("tables.md");
                fs::write(&path, &md).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
        Format::Csv => {
            for p in emit_csv(report, dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
        Format::Json => {
            let path = dir.join("report.json");
            emit_json(report, &path)?;
            eprintln!("wrote {}", path.display());
        }
        Format::Plot => {
            for p in emit_plotdata(report, dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn theory(args: &TheoryArgs, format: Format) -> Result<()> {
    let fold_var: Vec<f64> = parse_list(&args.fold_var).context("--fold-var")?;
    let k_devs: Vec<f64> = parse_list(&args.k_dev).context("--k-dev")?;
    let epsilons: Vec<f64> = parse_list(&args.eps).context("--eps")?;
    let budget = hybrid_variance(args.sigma2, args.n, args.population, &fold_var, args.t)?;
    let sigma_hyb2 = budget.per_iteration();
    let cheb: Vec<_> = k_devs
        .iter()
        .map(|&k| (k, chebyshev_tail(k), chebyshev_threshold(sigma_hyb2, args.t, k)))
        .collect();
    let hoeff = epsilons
        .iter()
        .map(|&e| hoeffding_tail(e, args.t, args.a, args.b).map(|h| (e, h)))
        .collect::<Result<Vec<_>, _>>()?;

    if format == Format::Json {
        let value = json!({
            "budget": budget,
            "sigma_hyb2": sigma_hyb2,
            "chebyshev": cheb.iter().map(|(k, p, d)| json!({"k_dev": k, "tail": p, "threshold": d})).collect::<Vec<_>>(),
            "hoeffding": hoeff.iter().map(|(e, h)| json!({"epsilon": e, "raw": h.raw, "capped": h.capped})).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
        return Ok(());
    }
    println!("variance budget (sigma2 = {}, n = {}, N = {}, T = {})", args.sigma2, args.n, args.population, args.t);
    println!("  SRS component    {:.6e}", budget.srs_component);
    println!("  k-fold component {:.6e}", budget.kfcv_component);
    println!("  sigma_hyb^2      {:.6e}", sigma_hyb2);
    println!("  Var(L) = /T      {:.6e}", budget.total_per_t);
    println!("Chebyshev: P(|L - E L| >= k_dev * sd) <= 1/k_dev^2");
    for (k, p, d) in &cheb {
        println!("  k_dev = {k:<6} tail <= {p:.6}  deviation = {d:.6e}");
    }
    println!("Hoeffding on [{}, {}]: P(|L - E L| > eps) <= 2 exp(-2 T eps^2 / (b - a)^2)", args.a, args.b);
    for (e, h) in &hoeff {
        println!("  eps = {e:<6} bound = {:.6} (raw {:.6})", h.capped, h.raw);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Run => {
            let cfg = build_config(&cli.study)?;
            let report = run_experiment(&cfg)?;
            eprintln!(
                "{} cells in {:.2} s (config {})",
                report.cells.len(),
                report.metadata.wall_time_secs,
                &report.metadata.config_hash[..12]
            );
            emit(&report, cli.study.format, cli.study.out.as_deref())?;
        }
        Command::Cell { n, t } => {
            let mut cfg = build_config(&cli.study)?;
            cfg.sizes = vec![*n];
            cfg.trials = vec![*t];
            let start = std::time::Instant::now();
            let cell = run_cell(&cfg, *n, *t)?;
            let report = ExperimentReport {
                metadata: RunMetadata::new(&cfg, start.elapsed().as_secs_f64()),
                config: cfg,
                cells: vec![cell],
            };
            emit(&report, cli.study.format, cli.study.out.as_deref())?;
        }
        Command::Theory(args) => theory(args, cli.study.format)?,
        Command::Selftest => {
            let checks = fsval_core::selftest::run_all()?;
            let mut ok = true;
            for c in &checks {
                println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(a) = cli.study.alpha {
        if !(0.8..=1.0).contains(&a) {
            eprintln!("warning: alpha {a} is outside the typical range [0.8, 1.0]");
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

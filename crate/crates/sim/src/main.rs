use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kdclass::selector::{SelectorConfig, WindowScale};
use kdclass::{Execution, PairId};
use kdclass_sim::config::FileConfig;
use kdclass_sim::cv::run_cv_comparison;
use kdclass_sim::output::{write_cv, write_study, write_surface, write_tail};
use kdclass_sim::surface::risk_surface;
use kdclass_sim::{default_n_list, light_tail_contrast, run_study, run_tail_study, ExperimentConfig, SimError, SimResult};

#[derive(Parser)]
#[command(name = "kdclass", version, about = "Bandwidth-selection simulations for kernel classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replicated bootstrap selection across sample sizes with slope fits
    Study(Common),
    /// Heavy-tail misclassification study and light-tail contrast
    Tail {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.5)]
        beta: f64,
        /// Sample size for the light-tail contrast
        #[arg(long, default_value_t = 500)]
        light_n: usize,
    },
    /// Spread of bootstrap versus cross-validation selections
    Cvcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Bootstrap and cross-validation surfaces for one training sample
    RiskSurface {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// class1a, class1b, class2a or class2b
    #[arg(long)]
    pair: Option<String>,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    boot_iters: Option<usize>,
    /// Bandwidths per grid dimension
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Selection window units: scaled (default) or unit
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially
    #[arg(long)]
    threads: Option<usize>,
    /// key = value settings file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Resolved {
    exp: ExperimentConfig,
    exec: Execution,
}

fn resolve(c: &Common, default_reps: usize) -> SimResult<Resolved> {
    let file = match &c.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let pair: PairId = c.pair.clone().or(file.pair).as_deref().unwrap_or("class1a").parse()?;
    let defaults = SelectorConfig::default();
    let selector = SelectorConfig {
        boot_iters: c.boot_iters.or(file.boot_iters).unwrap_or(defaults.boot_iters),
        grid_per_dim: c.grid.or(file.grid).unwrap_or(defaults.grid_per_dim),
        c1: c.c1.or(file.c1).unwrap_or(defaults.c1),
        c2: c.c2.or(file.c2).unwrap_or(defaults.c2),
        window: match c.window.clone().or(file.window).as_deref() {
            None | Some("scaled") => WindowScale::DataScaled,
            Some("unit") => WindowScale::Unit,
            Some(other) => return Err(SimError::Config(format!("unknown window '{other}'"))),
        },
        ..defaults
    };
    let exp = ExperimentConfig {
        pair,
        n_list: c.n_list.clone().or(file.n_list).unwrap_or_else(default_n_list),
        reps: c.reps.or(file.reps).unwrap_or(default_reps),
        selector,
        seed: c.seed.or(file.seed).unwrap_or(ExperimentConfig::default().seed),
        out_dir: c.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
    };
    exp.validate()?;
    let threads = c.threads.or(file.threads);
    let exec = match threads {
        Some(0) => return Err(SimError::Config("threads must be at least 1".into())),
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    };
    #[cfg(feature = "parallel")]
    if let Some(t) = threads.filter(|&t| t > 1) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| SimError::Config(format!("thread pool: {e}")))?;
    }
    Ok(Resolved { exp, exec })
}

fn run(cli: Cli) -> SimResult<()> {
    match cli.command {
        Command::Study(common) => {
            let Resolved { exp, exec } = resolve(&common, 100)?;
            let res = run_study(&exp, exec)?;
            for fit in [&res.fit_h1, &res.fit_h2] {
                println!("{} {}: slope {:.4}, intercept {:.4}", res.pair, fit.which, fit.slope, fit.intercept);
            }
            for p in write_study(&res, &exp.out_dir)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Tail { common, alpha, beta, light_n } => {
            let common = Common { n_list: common.n_list.clone().or(Some(vec![100, 400, 1600])), ..common };
            let Resolved { exp, exec } = resolve(&common, 200)?;
            let res = run_tail_study(alpha, beta, &exp.n_list, exp.reps, exp.seed, exec)?;
            println!("x0 = {}", res.x0);
            for r in &res.rows {
                println!("n = {:5}  h = {:.4}  tail mass = {:.4e} (se {:.1e})  n*h*mass = {:.4}", r.n, r.h, r.tail_mass, r.se, r.scaled);
            }
            let frac = light_tail_contrast(light_n, exp.reps, exp.seed, exec)?;
            println!("light-tail contrast, n = {light_n}: F mass beyond 3 labelled F = {frac:.4}");
            println!("wrote {}", write_tail(&res, &exp.out_dir)?.display());
        }
        Command::Cvcheck { common, n } => {
            let Resolved { exp, exec } = resolve(&common, 50)?;
            let res = run_cv_comparison(exp.pair, n, exp.reps, exp.seed, &exp.selector, exec)?;
            println!(
                "{} n = {}: IQR log h1 bootstrap {:.4}, cross-validation {:.4}, ratio {:.3}",
                res.pair, n, res.iqr_log_boot_h1, res.iqr_log_cv_h1, res.ratio
            );
            println!("wrote {}", write_cv(&res, &exp.out_dir)?.display());
        }
        Command::RiskSurface { common, n } => {
            let Resolved { exp, .. } = resolve(&common, 1)?;
            let rep = risk_surface(exp.pair, n, exp.seed, &exp.selector)?;
            let s = &rep.selection;
            println!("{} n = {}: h1 = {:.4}, h2 = {:.4}, min bootstrap err = {:.4}", rep.pair, n, s.h1, s.h2, s.err_min);
            println!("wrote {}", write_surface(&rep, &exp.out_dir)?.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

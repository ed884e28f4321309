use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prefprop_cli::{demo, run, verify, EXIT_ANALYSIS, EXIT_CONFIG, EXIT_OK};

/// Propagate preference uncertainty through scalarized multi-objective
/// optimization and summarize the induced decision distribution.
#[derive(Parser)]
#[command(name = "prefprop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample preferences, solve each scalarized instance, write analysis CSVs.
    Run(RunArgs),
    /// Run the built-in closed-form and oracle cross-checks.
    Verify {
        /// Run a single named check instead of the full table.
        #[arg(long)]
        only: Option<String>,
    },
    /// Emit the one-dimensional example datasets for plotting.
    Demo(DemoArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in problem name (case1_ackermann, case2_pivot_skid,
    /// toy_discrete, toy_continuous) or path to a problem-spec JSON file.
    #[arg(long)]
    problem: String,

    /// Preference distribution: inline JSON or a path to a JSON file.
    /// Defaults to the baseline TMVN(1, 0.5 I) adapted to the problem.
    #[arg(long)]
    dist: Option<String>,

    /// Truncation floor of the default TMVN model.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,

    /// Number of preference draws.
    #[arg(long, default_value_t = 1000)]
    n: usize,

    /// Master seed; with the worker count it fully determines every output.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores when built with the `parallel`
    /// feature; results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,

    /// Output directory.
    #[arg(long, env = "PREFPROP_OUT", default_value = "prefprop_out")]
    out: PathBuf,

    /// Comma-separated analyses: discrete,correlations,histograms,
    /// sensitivity,frechet,pareto,overlay.
    #[arg(long, default_value = "discrete,correlations,histograms")]
    analyses: String,

    /// JSON file of (label, distribution) scenarios for the frechet analysis.
    #[arg(long)]
    scenario_file: Option<PathBuf>,

    /// Max-norm clustering tolerance for discrete-support detection.
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,

    /// Latin-hypercube budget for the pareto/overlay baselines.
    #[arg(long, default_value_t = run::DEFAULT_PARETO_BUDGET)]
    lhs_budget: usize,
}

#[derive(Args)]
struct DemoArgs {
    /// Which example: `discrete` (two lines) or `continuous` (two parabolas).
    which: String,

    #[arg(long, default_value_t = 100_000)]
    n: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, env = "PREFPROP_OUT", default_value = "prefprop_out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify { only } => match verify::run_verify(only.as_deref()) {
            Ok(true) => EXIT_OK,
            Ok(false) => EXIT_ANALYSIS,
            Err(err) => {
                eprintln!("error: {err}");
                EXIT_CONFIG
            }
        },
        Command::Demo(args) => cmd_demo(args),
    };
    ExitCode::from(code as u8)
}

fn cmd_run(args: RunArgs) -> i32 {
    let cfg = match run::build_config(
        args.problem,
        args.dist.as_deref(),
        args.eps,
        args.n,
        args.seed,
        args.workers,
        args.out,
        &args.analyses,
        args.cluster_tol,
        args.scenario_file,
        args.lhs_budget,
    ) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("configuration error: {err:#}");
            return EXIT_CONFIG;
        }
    };
    match run::cmd_run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            EXIT_OK
        }
        Err(err) => {
            eprintln!("run failed: {err:#}");
            EXIT_ANALYSIS
        }
    }
}

fn cmd_demo(args: DemoArgs) -> i32 {
    let result = match args.which.as_str() {
        "discrete" => demo::demo_discrete(&args.out, args.n, args.seed),
        "continuous" => demo::demo_continuous(&args.out, args.n, args.seed),
        other => {
            eprintln!("configuration error: unknown demo `{other}` (discrete|continuous)");
            return EXIT_CONFIG;
        }
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            EXIT_OK
        }
        Err(err) => {
            eprintln!("demo failed: {err:#}");
            EXIT_ANALYSIS
        }
    }
}

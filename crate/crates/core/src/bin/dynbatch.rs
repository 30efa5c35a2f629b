use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dynbatch::bench::{
    emit_plot, emit_traces, generate_instance, parse_config, run_suite, ExperimentConfig,
    MethodKind, INSTANCE_STREAM,
};
use dynbatch::numerics::RngStream;
use dynbatch::problems::ProblemKind;
use dynbatch::sampling::BatchRule;
use dynbatch::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dynbatch",
    version,
    about = "Dynamic mini-batch SGD benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem instance and write it as TOML.
    Generate {
        #[command(flatten)]
        common: Overrides,
    },
    /// Run every configured batch rule and write traces and a chart.
    Run {
        #[command(flatten)]
        common: Overrides,
    },
    /// Render a wide trace table as an SVG chart.
    Plot {
        /// Wide data file written by `run`.
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for `run`, output file for `generate`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_problem)]
    problem: Option<ProblemKind>,
    #[arg(long, value_parser = parse_method)]
    method: Option<MethodKind>,
    /// Comma-separated rule labels, e.g. `PD,1D,32,256,512`.
    #[arg(long, value_delimiter = ',')]
    rules: Option<Vec<BatchRule>>,
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    eta0: Option<f64>,
    #[arg(long)]
    budget_seconds: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    eval_sample_size: Option<usize>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    parallel: bool,
}

fn parse_problem(s: &str) -> std::result::Result<ProblemKind, String> {
    match s {
        "newsvendor" => Ok(ProblemKind::Newsvendor),
        "options" => Ok(ProblemKind::Options),
        _ => Err(format!("unknown problem `{s}` (newsvendor | options)")),
    }
}

fn parse_method(s: &str) -> std::result::Result<MethodKind, String> {
    match s {
        "sgd" => Ok(MethodKind::Sgd),
        "adam" => Ok(MethodKind::Adam),
        _ => Err(format!("unknown method `{s}` (sgd | adam)")),
    }
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        set!(
            seed,
            problem,
            method,
            rules,
            dimension,
            alpha,
            n0,
            n_min,
            n_max,
            eta0,
            eval_sample_size
        );
        if self.budget_seconds.is_some() {
            cfg.budget_seconds = self.budget_seconds;
        }
        if self.max_iterations.is_some() {
            cfg.max_iterations = self.max_iterations;
        }
        if self.instance.is_some() {
            cfg.instance = self.instance.clone();
        }
        cfg.parallel |= self.parallel;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn title(cfg: &ExperimentConfig) -> String {
    let problem = match cfg.problem {
        ProblemKind::Newsvendor => "Newsvendor problem",
        ProblemKind::Options => "Options portfolio",
    };
    let method = match cfg.method {
        MethodKind::Sgd => "basic SGD",
        MethodKind::Adam => "Adam",
    };
    format!("{problem} using {method}")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common } => {
            let cfg = common.resolve()?;
            let instance = generate_instance(
                cfg.problem,
                &cfg,
                &mut RngStream::new(cfg.seed, INSTANCE_STREAM),
            )?;
            let text = toml::to_string(&instance)
                .map_err(|e| Error::Domain(format!("cannot serialize instance: {e}")))?;
            match &common.out {
                Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e))?,
                None => print!("{text}"),
            }
        }
        Command::Run { common } => {
            let mut cfg = common.resolve()?;
            if let Some(out) = &common.out {
                cfg.output_dir = out.clone();
            }
            let suite = run_suite(&cfg)?;
            let files = emit_traces(
                &suite.labeled_traces(),
                &cfg.stem(),
                cfg.budget().max_seconds,
                &cfg.output_dir,
            )?;
            let chart = files.wide_time.with_extension("svg");
            emit_plot(&files.wide_time, &chart, &title(&cfg))?;
            for r in &suite.runs {
                let last = r.trace.last().expect("trace has the initial record");
                println!(
                    "{:>4}  iterations {:>8}  samples {:>10}  objective {:.6} ± {:.6}",
                    r.label(),
                    last.iteration,
                    last.cum_samples,
                    r.final_objective,
                    r.final_se
                );
            }
            println!(
                "wrote {} and {}",
                files.wide_time.display(),
                chart.display()
            );
        }
        Command::Plot { data, out, title } => emit_plot(&data, &out, &title)?,
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

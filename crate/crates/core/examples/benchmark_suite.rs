//! The full comparison grid for one problem and method: every rule on a
//! shared instance and evaluator, traces written as wide and long tables,
//! and an SVG convergence chart.
//!
//! Usage: `cargo run --release --example benchmark_suite [output_dir]`

use std::path::PathBuf;

use dynbatch::bench::{emit_plot, emit_traces, run_suite, ExperimentConfig, MethodKind};
use dynbatch::problems::ProblemKind;

fn main() -> dynbatch::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("dynbatch-suite"));
    let cfg = ExperimentConfig {
        problem: ProblemKind::Options,
        method: MethodKind::Adam,
        dimension: 20,
        budget_seconds: Some(2.0),
        output_dir: out.clone(),
        ..ExperimentConfig::default()
    };
    let suite = run_suite(&cfg)?;
    for r in &suite.runs {
        let last = r.trace.last().unwrap();
        println!(
            "{:>4}: {:>8} iterations  {:>10} samples  objective {:.5} ± {:.5}",
            r.label(),
            last.iteration,
            last.cum_samples,
            r.final_objective,
            r.final_se
        );
    }
    let files = emit_traces(
        &suite.labeled_traces(),
        &cfg.stem(),
        cfg.budget().max_seconds,
        &out,
    )?;
    let chart = out.join(format!("{}.svg", cfg.stem()));
    emit_plot(&files.wide_time, &chart, "Options portfolio using Adam")?;
    println!(
        "wrote {} and {}",
        files.wide_time.display(),
        chart.display()
    );
    Ok(())
}

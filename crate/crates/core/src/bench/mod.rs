//! Benchmark harness: experiment configuration, the rule-comparison suite,
//! trace files and convergence charts.

mod config;
mod emit;
mod plot;
mod suite;

pub use config::{parse_config, ExperimentConfig, MethodKind, DEFAULT_RULES};
pub use emit::{
    emit_traces, format_g6, long_format, wide_format, Axis, EmittedFiles, GRID_POINTS, LONG_HEADER,
};
pub use plot::{emit_plot, render_svg, WideTable};
pub use suite::{
    build_instance, generate_instance, rule_stream, run_rules, run_suite, RuleRun, SuiteOutput,
    EVAL_STREAM, INSTANCE_STREAM,
};

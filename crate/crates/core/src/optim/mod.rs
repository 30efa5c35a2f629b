//! Projected mini-batch SGD and projected Adam, and the loop that couples a
//! gradient oracle to a [`SamplingController`](crate::sampling::SamplingController).

mod driver;
mod projection;
mod step;

pub use driver::{
    run_optimization, Budget, GradientOracle, ObjectiveEvaluator, OptimizationRun, RunSettings,
    TraceCadence, TraceRecord,
};
pub use projection::{project, FeasibleRegion};
pub use step::{adam_step, sgd_step, AdamConfig, AdamState, Method, OptimizerState, SgdConfig};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::projection::FeasibleRegion;
use super::step::{Method, OptimizerState};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::sampling::{accumulate_stats, SamplingController};

/// Source of i.i.d. per-sample gradients of the objective being minimized.
pub trait GradientOracle {
    fn dim(&self) -> usize;

    fn region(&self) -> FeasibleRegion;

    /// Draws `count` fresh scenarios and returns one gradient per scenario.
    fn sample_gradients(
        &self,
        x: &[f64],
        count: usize,
        rng: &mut RngStream,
    ) -> Result<Vec<Vec<f64>>>;
}

/// Objective estimate reported in trace records, in the problem's own
/// (maximize) orientation.
pub trait ObjectiveEvaluator {
    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

impl<F> ObjectiveEvaluator for F
where
    F: Fn(&[f64]) -> Result<f64>,
{
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self(x)
    }
}

/// Stop when either limit is reached. At least one must be set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_seconds: Option<f64>,
    pub max_iterations: Option<usize>,
}

impl Budget {
    pub fn seconds(s: f64) -> Self {
        Self {
            max_seconds: Some(s),
            max_iterations: None,
        }
    }

    pub fn iterations(n: usize) -> Self {
        Self {
            max_seconds: None,
            max_iterations: Some(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.max_seconds, self.max_iterations) {
            (None, None) => Err(Error::config(
                "budget",
                "either budget_seconds or max_iterations must be set",
            )),
            (Some(s), _) if !(s > 0.0 && s.is_finite()) => Err(Error::config(
                "budget_seconds",
                format!("{s} must be a positive number of seconds"),
            )),
            _ => Ok(()),
        }
    }

    fn exhausted(&self, iterations_done: usize, elapsed: Duration) -> bool {
        self.max_iterations.is_some_and(|n| iterations_done >= n)
            || self.max_seconds.is_some_and(|s| elapsed.as_secs_f64() >= s)
    }
}

/// Which iterations get an objective evaluation in the trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TraceCadence {
    EveryIteration,
    /// Every iteration up to `dense`, then iterations spaced by a factor of
    /// `ratio`. The final iteration is always recorded.
    Geometric {
        dense: usize,
        ratio: f64,
    },
}

impl Default for TraceCadence {
    fn default() -> Self {
        TraceCadence::Geometric {
            dense: 100,
            ratio: 1.01,
        }
    }
}

impl TraceCadence {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TraceCadence::Geometric { ratio, .. } if !(ratio >= 1.0 && ratio.is_finite()) => Err(
                Error::config("cadence.ratio", format!("{ratio} must be at least 1")),
            ),
            _ => Ok(()),
        }
    }
}

struct CadenceTracker {
    cadence: TraceCadence,
    next: usize,
}

impl CadenceTracker {
    fn new(cadence: TraceCadence) -> Self {
        Self { cadence, next: 1 }
    }

    fn should_record(&mut self, iteration: usize) -> bool {
        match self.cadence {
            TraceCadence::EveryIteration => true,
            TraceCadence::Geometric { dense, ratio } => {
                if iteration <= dense {
                    return true;
                }
                if iteration >= self.next {
                    self.next = ((iteration as f64 * ratio).ceil() as usize).max(iteration + 1);
                    return true;
                }
                false
            }
        }
    }
}

/// One row of an optimization trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Completed iterations; 0 is the starting point.
    pub iteration: usize,
    /// Gradient samples consumed so far.
    pub cum_samples: u64,
    /// Optimizer wall-clock time, excluding objective evaluation.
    pub wall_seconds: f64,
    /// Batch size used by this iteration (for record 0, the first batch size).
    pub batch_size: usize,
    pub objective: f64,
}

/// Trace of one run and the last iterate it reached.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationRun {
    pub trace: Vec<TraceRecord>,
    pub final_iterate: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub method: Method,
    pub budget: Budget,
    pub cadence: TraceCadence,
}

/// Pausable wall clock.
struct Stopwatch {
    elapsed: Duration,
    started: Option<Instant>,
}

impl Stopwatch {
    fn new() -> Self {
        Self {
            elapsed: Duration::ZERO,
            started: None,
        }
    }

    fn start(&mut self) {
        self.started = Some(Instant::now());
    }

    fn stop(&mut self) {
        if let Some(t) = self.started.take() {
            self.elapsed += t.elapsed();
        }
    }
}

/// Runs projected mini-batch optimization from `start` until the budget is
/// spent.
///
/// Each iteration draws `controller.current()` scenarios, forms the batch
/// statistics, steps with the batch mean and lets the controller size the
/// next batch. Objective evaluation happens with the clock paused.
pub fn run_optimization<O, E>(
    oracle: &O,
    evaluator: &E,
    start: Vec<f64>,
    controller: &mut SamplingController,
    settings: &RunSettings,
    rng: &mut RngStream,
) -> Result<OptimizationRun>
where
    O: GradientOracle + ?Sized,
    E: ObjectiveEvaluator + ?Sized,
{
    settings.budget.validate()?;
    settings.cadence.validate()?;
    if start.len() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            found: start.len(),
        });
    }
    let region = oracle.region();
    if !region.contains(&start) {
        return Err(Error::Domain("starting point is not feasible".into()));
    }

    let mut state = OptimizerState::for_method(start, &settings.method);
    let mut clock = Stopwatch::new();
    let mut cadence = CadenceTracker::new(settings.cadence);
    let mut cum_samples = 0u64;
    let mut trace = vec![TraceRecord {
        iteration: 0,
        cum_samples: 0,
        wall_seconds: 0.0,
        batch_size: controller.current(),
        objective: evaluator.evaluate(&state.iterate)?,
    }];

    let mut done = 0usize;
    let mut last_batch = controller.current();
    while !settings.budget.exhausted(done, clock.elapsed) {
        clock.start();
        let n = controller.current();
        let iteration = done + 1;
        let with_context = |e: Error| Error::Iteration {
            iteration,
            source: Box::new(e),
        };
        let grads = oracle
            .sample_gradients(&state.iterate, n, rng)
            .map_err(with_context)?;
        let stats = accumulate_stats(&grads).map_err(with_context)?;
        state
            .step(&stats.mean, &settings.method, &region)
            .map_err(with_context)?;
        controller.next_size(&stats);
        cum_samples += n as u64;
        done = iteration;
        last_batch = n;
        clock.stop();

        if cadence.should_record(done) {
            trace.push(TraceRecord {
                iteration: done,
                cum_samples,
                wall_seconds: clock.elapsed.as_secs_f64(),
                batch_size: n,
                objective: evaluator.evaluate(&state.iterate).map_err(with_context)?,
            });
        }
    }

    if trace.last().is_some_and(|r| r.iteration != done) {
        trace.push(TraceRecord {
            iteration: done,
            cum_samples,
            wall_seconds: clock.elapsed.as_secs_f64(),
            batch_size: last_batch,
            objective: evaluator.evaluate(&state.iterate)?,
        });
    }
    Ok(OptimizationRun {
        trace,
        final_iterate: state.iterate,
    })
}

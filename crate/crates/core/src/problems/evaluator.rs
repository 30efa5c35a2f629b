use super::{ProblemInstance, ScenarioBatch};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::optim::ObjectiveEvaluator;

/// Monte Carlo objective estimator over one frozen scenario batch.
///
/// Every evaluation, of any iterate from any method, reuses the same batch
/// (common random numbers), so traces from different runs are comparable.
#[derive(Clone, Debug)]
pub struct McObjectiveEvaluator<'a> {
    problem: &'a ProblemInstance,
    batch: ScenarioBatch,
}

impl<'a> McObjectiveEvaluator<'a> {
    pub fn new(
        problem: &'a ProblemInstance,
        sample_size: usize,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if sample_size < 2 {
            return Err(Error::config(
                "eval_sample_size",
                format!("{sample_size} must be at least 2"),
            ));
        }
        Ok(Self {
            problem,
            batch: problem.sample(sample_size, rng)?,
        })
    }

    pub fn sample_size(&self) -> usize {
        self.batch.len()
    }

    pub fn batch(&self) -> &ScenarioBatch {
        &self.batch
    }

    /// Sample mean and its standard error.
    pub fn evaluate_with_se(&self, x: &[f64]) -> Result<(f64, f64)> {
        let values = self.problem.objective_values(x, &self.batch)?;
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok((mean, (var / n).sqrt()))
    }
}

impl ObjectiveEvaluator for McObjectiveEvaluator<'_> {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.problem.objective(x, &self.batch)
    }
}

//! The two stochastic applications behind a common oracle contract.
//!
//! Sign convention: gradient oracles return gradients of the *negated*
//! objective, so every optimizer minimizes. Objectives (and therefore trace
//! records) are reported in the problems' natural maximize orientation.

mod evaluator;
mod newsvendor;
mod options;

use serde::{Deserialize, Serialize};

pub use evaluator::McObjectiveEvaluator;
pub use newsvendor::{
    generate_newsvendor_instance, newsvendor_gradient, newsvendor_objective, newsvendor_sample,
    newsvendor_sample_gradient, newsvendor_utilities, NewsvendorFields, NewsvendorParams,
    NewsvendorSpec,
};
pub use options::{
    bs_atm_prices, generate_options_instance, options_gradient, options_log_wealth,
    options_objective, options_sample, OptionsBatch, OptionsFields, OptionsParams,
    OptionsPortfolioSpec,
};

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, RngStream};
use crate::optim::{FeasibleRegion, GradientOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Newsvendor,
    Options,
}

impl ProblemKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemKind::Newsvendor => "newsvendor",
            ProblemKind::Options => "options",
        }
    }
}

/// Sampled exogenous outcomes, one row per scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioBatch {
    Demands(DenseMatrix),
    Options(OptionsBatch),
}

impl ScenarioBatch {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ScenarioBatch::Demands(_) => ProblemKind::Newsvendor,
            ScenarioBatch::Options(_) => ProblemKind::Options,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ScenarioBatch::Demands(d) => d.rows(),
            ScenarioBatch::Options(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A fully generated problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemInstance {
    Newsvendor(NewsvendorSpec),
    Options(OptionsPortfolioSpec),
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::Newsvendor(_) => ProblemKind::Newsvendor,
            ProblemInstance::Options(_) => ProblemKind::Options,
        }
    }

    /// Number of decision variables.
    pub fn dim(&self) -> usize {
        match self {
            ProblemInstance::Newsvendor(s) => s.n_products(),
            ProblemInstance::Options(s) => 2 * s.n_stocks(),
        }
    }

    pub fn region(&self) -> FeasibleRegion {
        match self {
            ProblemInstance::Newsvendor(_) => FeasibleRegion::NonnegativeOrthant,
            ProblemInstance::Options(s) => FeasibleRegion::CappedSimplex {
                cap: s.investable_fraction(),
            },
        }
    }

    /// All-ones orders for the newsvendor; no position for the portfolio.
    pub fn default_start(&self) -> Vec<f64> {
        match self {
            ProblemInstance::Newsvendor(_) => vec![1.0; self.dim()],
            ProblemInstance::Options(_) => vec![0.0; self.dim()],
        }
    }

    pub fn sample(&self, count: usize, rng: &mut RngStream) -> Result<ScenarioBatch> {
        if count == 0 {
            return Err(Error::Domain("scenario count must be positive".into()));
        }
        Ok(match self {
            ProblemInstance::Newsvendor(s) => {
                ScenarioBatch::Demands(newsvendor_sample(s, count, rng)?)
            }
            ProblemInstance::Options(s) => ScenarioBatch::Options(options_sample(s, count, rng)?),
        })
    }

    /// Minimize-form per-scenario gradients.
    pub fn gradients(&self, x: &[f64], batch: &ScenarioBatch) -> Result<Vec<Vec<f64>>> {
        match (self, batch) {
            (ProblemInstance::Newsvendor(s), ScenarioBatch::Demands(d)) => {
                newsvendor_gradient(s, x, d)
            }
            (ProblemInstance::Options(s), ScenarioBatch::Options(b)) => options_gradient(s, x, b),
            _ => Err(mismatch(self.kind(), batch.kind())),
        }
    }

    /// Per-scenario objective values (maximize orientation).
    pub fn objective_values(&self, x: &[f64], batch: &ScenarioBatch) -> Result<Vec<f64>> {
        match (self, batch) {
            (ProblemInstance::Newsvendor(s), ScenarioBatch::Demands(d)) => {
                newsvendor_utilities(s, x, d)
            }
            (ProblemInstance::Options(s), ScenarioBatch::Options(b)) => options_log_wealth(s, x, b),
            _ => Err(mismatch(self.kind(), batch.kind())),
        }
    }

    pub fn objective(&self, x: &[f64], batch: &ScenarioBatch) -> Result<f64> {
        Ok(sample_mean(&self.objective_values(x, batch)?))
    }
}

/// Running mean; exact when all values are equal.
pub(crate) fn sample_mean(values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .fold(0.0, |m, (k, v)| m + (v - m) / (k + 1) as f64)
}

fn mismatch(problem: ProblemKind, batch: ProblemKind) -> Error {
    Error::Domain(format!(
        "{} scenarios passed to a {} problem",
        batch.label(),
        problem.label()
    ))
}

impl GradientOracle for ProblemInstance {
    fn dim(&self) -> usize {
        ProblemInstance::dim(self)
    }

    fn region(&self) -> FeasibleRegion {
        ProblemInstance::region(self)
    }

    fn sample_gradients(
        &self,
        x: &[f64],
        count: usize,
        rng: &mut RngStream,
    ) -> Result<Vec<Vec<f64>>> {
        let batch = self.sample(count, rng)?;
        self.gradients(x, &batch)
    }
}

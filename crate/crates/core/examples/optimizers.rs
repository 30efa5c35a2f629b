//! Projected SGD and projected Adam on a user-supplied stochastic problem,
//! each paired with a dynamic batch rule.
//!
//! Any type implementing `GradientOracle` can be optimized; here it is a
//! noisy quadratic with its minimizer on the boundary of the orthant.

use dynbatch::numerics::RngStream;
use dynbatch::optim::{
    run_optimization, AdamConfig, Budget, FeasibleRegion, GradientOracle, Method, RunSettings,
    SgdConfig, TraceCadence,
};
use dynbatch::sampling::{BatchRule, SamplingConfig, SamplingController};
use dynbatch::Result;

struct NoisyQuadratic {
    target: Vec<f64>,
    noise: f64,
}

impl GradientOracle for NoisyQuadratic {
    fn dim(&self) -> usize {
        self.target.len()
    }

    fn region(&self) -> FeasibleRegion {
        FeasibleRegion::NonnegativeOrthant
    }

    fn sample_gradients(
        &self,
        x: &[f64],
        count: usize,
        rng: &mut RngStream,
    ) -> Result<Vec<Vec<f64>>> {
        Ok((0..count)
            .map(|_| {
                x.iter()
                    .zip(&self.target)
                    .map(|(xi, ti)| xi - ti + self.noise * rng.standard_normal())
                    .collect()
            })
            .collect())
    }
}

fn main() -> Result<()> {
    let problem = NoisyQuadratic {
        target: vec![1.0, -0.5, 2.0, 0.0],
        noise: 3.0,
    };
    // Maximize-form objective for the trace: −½‖x − x*‖².
    let objective = |x: &[f64]| -> Result<f64> {
        Ok(-0.5
            * x.iter()
                .zip(&problem.target)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>())
    };

    for method in [
        Method::BasicSgd(SgdConfig::default()),
        Method::Adam(AdamConfig {
            eta: 0.05,
            ..AdamConfig::default()
        }),
    ] {
        for rule in [
            BatchRule::PerDimensionMedian,
            BatchRule::SingleUpdate,
            BatchRule::Fixed(32),
        ] {
            let mut controller = SamplingController::new(rule, &SamplingConfig::default())?;
            let settings = RunSettings {
                method,
                budget: Budget::iterations(500),
                cadence: TraceCadence::default(),
            };
            let mut rng = RngStream::new(42, 0);
            let run = run_optimization(
                &problem,
                &objective,
                vec![0.0; 4],
                &mut controller,
                &settings,
                &mut rng,
            )?;
            let last = run.trace.last().unwrap();
            println!(
                "{:>4} {:>3}: objective {:>10.6}  samples {:>7}  last batch {:>5}  x = {:.3?}",
                method.label(),
                rule.label(),
                last.objective,
                last.cum_samples,
                last.batch_size,
                run.final_iterate
            );
        }
    }
    Ok(())
}

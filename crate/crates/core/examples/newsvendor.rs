//! Risk-averse multi-product newsvendor: generate an instance, then compare
//! the per-dimension rule with a fixed batch of 32 under basic SGD.

use dynbatch::numerics::RngStream;
use dynbatch::optim::{run_optimization, Budget, Method, RunSettings, SgdConfig, TraceCadence};
use dynbatch::problems::{
    generate_newsvendor_instance, McObjectiveEvaluator, NewsvendorParams, ProblemInstance,
};
use dynbatch::sampling::{BatchRule, SamplingConfig, SamplingController};

fn main() -> dynbatch::Result<()> {
    let spec =
        generate_newsvendor_instance(10, &NewsvendorParams::default(), &mut RngStream::new(3, 0))?;
    println!("prices: {:.2?}", spec.prices());
    let problem = ProblemInstance::Newsvendor(spec);
    let evaluator = McObjectiveEvaluator::new(&problem, 20_000, &mut RngStream::new(3, 1))?;

    for rule in [BatchRule::PerDimensionMedian, BatchRule::Fixed(32)] {
        let mut controller = SamplingController::new(rule, &SamplingConfig::default())?;
        let settings = RunSettings {
            method: Method::BasicSgd(SgdConfig::default()),
            budget: Budget::seconds(1.0),
            cadence: TraceCadence::default(),
        };
        let mut rng = RngStream::new(3, 2);
        let run = run_optimization(
            &problem,
            &evaluator,
            problem.default_start(),
            &mut controller,
            &settings,
            &mut rng,
        )?;
        let (value, se) = evaluator.evaluate_with_se(&run.final_iterate)?;
        let last = run.trace.last().unwrap();
        println!(
            "{:>3}: E[u] = {value:.6} ± {se:.6} after {} iterations, {} samples",
            rule.label(),
            last.iteration,
            last.cum_samples
        );
        println!("     orders: {:.1?}", run.final_iterate);
    }
    Ok(())
}

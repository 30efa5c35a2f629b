//! Log-optimal portfolio of at-the-money calls and puts, priced with
//! Black-Scholes under the market's volatilities and optimized with Adam.

use dynbatch::numerics::RngStream;
use dynbatch::optim::{run_optimization, AdamConfig, Budget, Method, RunSettings, TraceCadence};
use dynbatch::problems::{
    bs_atm_prices, generate_options_instance, McObjectiveEvaluator, OptionsParams, ProblemInstance,
};
use dynbatch::sampling::{BatchRule, SamplingConfig, SamplingController};

fn main() -> dynbatch::Result<()> {
    let (call, put) = bs_atm_prices(0.2, 0.05)?;
    println!("ATM call {call:.6}, put {put:.6} (sigma 0.2, r 0.05)");

    let m = 10;
    let spec = generate_options_instance(m, &OptionsParams::default(), &mut RngStream::new(5, 0))?;
    println!("expected returns: {:.3?}", spec.mu());
    let problem = ProblemInstance::Options(spec);
    let evaluator = McObjectiveEvaluator::new(&problem, 20_000, &mut RngStream::new(5, 1))?;

    let mut controller =
        SamplingController::new(BatchRule::SingleUpdate, &SamplingConfig::default())?;
    let settings = RunSettings {
        method: Method::Adam(AdamConfig::default()),
        budget: Budget::seconds(2.0),
        cadence: TraceCadence::default(),
    };
    let mut rng = RngStream::new(5, 3);
    let run = run_optimization(
        &problem,
        &evaluator,
        problem.default_start(),
        &mut controller,
        &settings,
        &mut rng,
    )?;
    let (value, se) = evaluator.evaluate_with_se(&run.final_iterate)?;
    println!(
        "E[log W] = {value:.5} ± {se:.5} (cash only: {:.5})",
        (1.01f64).ln()
    );
    let (calls, puts) = run.final_iterate.split_at(m);
    println!("calls: {calls:.3?}");
    println!("puts:  {puts:.3?}");
    println!(
        "invested fraction {:.4}",
        run.final_iterate.iter().sum::<f64>()
    );
    Ok(())
}

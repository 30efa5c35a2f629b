//! Batch-size rules: the per-dimension median rule, the single update rule
//! and a fixed size, driven by the statistics of one mini-batch at a time.

use dynbatch::numerics::RngStream;
use dynbatch::sampling::{
    accumulate_stats, descent_probability_per_dim, BatchRule, GradientBatchStats, SamplingConfig,
    SamplingController,
};

fn main() -> dynbatch::Result<()> {
    let cfg = SamplingConfig::default();

    // Worked examples.
    let mut pd = SamplingController::new(BatchRule::PerDimensionMedian, &cfg)?;
    let one_dim = GradientBatchStats {
        mean: vec![2.0],
        var_of_mean: vec![4.0],
        batch_size: 100,
    };
    println!("PD:  mean 2, var 4, N 100 -> {}", pd.next_size(&one_dim));
    let mut single = SamplingController::new(BatchRule::SingleUpdate, &cfg)?;
    let two_dim = GradientBatchStats {
        mean: vec![3.0, 4.0],
        var_of_mean: vec![1.0, 1.0],
        batch_size: 100,
    };
    println!(
        "1D:  mean (3, 4), var (1, 1), N 100 -> {}",
        single.next_size(&two_dim)
    );

    // Gradients with true mean g and unit noise: as |g| shrinks the rules
    // ask for more samples.
    let mut rng = RngStream::new(1, 0);
    let mut controllers: Vec<SamplingController> = [
        BatchRule::PerDimensionMedian,
        BatchRule::SingleUpdate,
        BatchRule::Fixed(64),
    ]
    .into_iter()
    .map(|r| SamplingController::new(r, &cfg))
    .collect::<Result<_, _>>()?;
    println!(
        "\n{:>6} {:>6} {:>6} {:>6}   P(descent) per coordinate under PD",
        "|g|", "PD", "1D", "64"
    );
    for g in [1.0, 0.5, 0.2, 0.1, 0.05] {
        let mut sizes = Vec::new();
        let mut last = None;
        for ctl in controllers.iter_mut() {
            let n = ctl.current();
            let samples: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..3).map(|_| g + rng.standard_normal()).collect())
                .collect();
            let stats = accumulate_stats(&samples)?;
            if last.is_none() {
                last = Some(descent_probability_per_dim(&stats));
            }
            sizes.push(ctl.next_size(&stats));
        }
        let probs: Vec<String> = last.unwrap().iter().map(|p| format!("{p:.3}")).collect();
        println!(
            "{g:>6} {:>6} {:>6} {:>6}   {}",
            sizes[0],
            sizes[1],
            sizes[2],
            probs.join(" ")
        );
    }
    Ok(())
}

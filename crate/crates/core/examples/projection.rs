//! Euclidean projections onto the nonnegative orthant and a capped simplex.

use dynbatch::optim::{project, FeasibleRegion};

fn main() -> dynbatch::Result<()> {
    let orthant = FeasibleRegion::NonnegativeOrthant;
    println!(
        "orthant: {:?} -> {:?}",
        [-1.0, 0.5],
        project(&orthant, &[-1.0, 0.5])
    );

    let simplex = FeasibleRegion::capped_simplex(1.0)?;
    for v in [
        vec![0.2, 0.3],
        vec![0.8, 0.6],
        vec![2.0, -1.0, 0.5],
        vec![0.4, 0.4, 0.4, 0.4],
    ] {
        let p = project(&simplex, &v);
        println!(
            "simplex(1): {v:?} -> {p:?} (sum {:.3})",
            p.iter().sum::<f64>()
        );
    }
    Ok(())
}

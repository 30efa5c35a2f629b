//! Standard normal CDF and quantile, and the z-values the sampling rules use.

use dynbatch::numerics::{normal_cdf, normal_quantile};

fn main() -> dynbatch::Result<()> {
    println!(
        "{:>8} {:>20} {:>22}",
        "alpha", "z = Φ⁻¹(1 - alpha)", "Φ(z) roundtrip error"
    );
    for alpha in [0.25, 0.1, 0.05, 0.025, 0.01, 1e-3, 1e-6] {
        let z = normal_quantile(1.0 - alpha)?;
        let back = normal_cdf(z)?;
        println!(
            "{alpha:>8} {z:>20.16} {:>22.3e}",
            (back - (1.0 - alpha)).abs()
        );
    }

    // Deep lower tail stays accurate because the quantile works on the
    // smaller tail probability directly.
    let p = 1e-12;
    let z = normal_quantile(p)?;
    println!("Φ⁻¹({p:e}) = {z:.12}, Φ(z) = {:.6e}", normal_cdf(z)?);
    Ok(())
}

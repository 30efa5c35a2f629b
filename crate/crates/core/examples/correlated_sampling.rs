//! Cholesky factorization and correlated Gaussian draws.

use dynbatch::numerics::{
    cholesky_factor, random_correlation_matrix, sample_correlated_normals, DenseMatrix, RngStream,
};

fn empirical_correlation(z: &DenseMatrix, i: usize, j: usize) -> f64 {
    let n = z.rows() as f64;
    let mean = |k: usize| z.row_iter().map(|r| r[k]).sum::<f64>() / n;
    let (mi, mj) = (mean(i), mean(j));
    let cov: f64 = z.row_iter().map(|r| (r[i] - mi) * (r[j] - mj)).sum();
    let vi: f64 = z.row_iter().map(|r| (r[i] - mi).powi(2)).sum();
    let vj: f64 = z.row_iter().map(|r| (r[j] - mj).powi(2)).sum();
    cov / (vi * vj).sqrt()
}

fn main() -> dynbatch::Result<()> {
    let mut rng = RngStream::new(7, 0);

    let target = DenseMatrix::constant_correlation(4, 0.25);
    let l = cholesky_factor(&target)?;
    let z = sample_correlated_normals(&l, 100_000, &mut rng)?;
    println!("constant correlation 0.25, empirical:");
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| format!("{:7.4}", empirical_correlation(&z, i, j)))
            .collect();
        println!("  {}", row.join(" "));
    }

    // Factor-model correlation: B·Bᵀ with 2 factors plus a diagonal, scaled
    // to unit diagonal.
    let corr = random_correlation_matrix(5, 2, &mut rng)?;
    let l = cholesky_factor(&corr)?;
    let residual = l
        .gram()
        .as_slice()
        .iter()
        .zip(corr.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("random 5x5 correlation, max |L·Lᵀ - C| = {residual:.2e}");

    let indefinite = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]])?;
    match cholesky_factor(&indefinite) {
        Ok(_) => println!("unexpected factorization"),
        Err(e) => println!("indefinite input rejected: {e}"),
    }
    Ok(())
}

//! Self-contained numerical primitives: the standard normal distribution,
//! a small dense matrix type with Cholesky factorization, correlated
//! Gaussian sampling and seedable random streams.

mod linalg;
mod normal;
mod rng;

pub use linalg::{
    cholesky_factor, random_correlation_matrix, sample_correlated_normals, DenseMatrix,
};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};
pub use rng::RngStream;

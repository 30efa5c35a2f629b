//! Single-period multi-product newsvendor with exponential utility
//! `u(z) = -exp(-λz)` and correlated lognormal demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cholesky_factor, sample_correlated_normals, DenseMatrix, RngStream};

/// Instance-generation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewsvendorParams {
    pub price_range: (f64, f64),
    pub cost: f64,
    pub risk_aversion: f64,
    pub demand_mu: f64,
    /// Range of the underlying normal's standard deviation; [0.4724, 1.2684]
    /// gives demand coefficients of variation between 0.5 and 2.
    pub sigma_range: (f64, f64),
    pub correlation: f64,
}

impl Default for NewsvendorParams {
    fn default() -> Self {
        Self {
            price_range: (15.0, 30.0),
            cost: 10.0,
            risk_aversion: 0.02,
            demand_mu: 3.0,
            sigma_range: (0.4724, 1.2684),
            correlation: 0.25,
        }
    }
}

/// Frozen newsvendor instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NewsvendorFields", into = "NewsvendorFields")]
pub struct NewsvendorSpec {
    fields: NewsvendorFields,
    demand_chol: DenseMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewsvendorFields {
    pub prices: Vec<f64>,
    pub costs: Vec<f64>,
    pub risk_aversion: f64,
    pub demand_mu: Vec<f64>,
    pub demand_sigma: Vec<f64>,
    pub demand_corr: DenseMatrix,
}

impl TryFrom<NewsvendorFields> for NewsvendorSpec {
    type Error = Error;

    fn try_from(f: NewsvendorFields) -> Result<Self> {
        let n = f.prices.len();
        if n == 0 {
            return Err(Error::Domain(
                "newsvendor needs at least one product".into(),
            ));
        }
        for len in [f.costs.len(), f.demand_mu.len(), f.demand_sigma.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if f.demand_corr.rows() != n || !f.demand_corr.is_square() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.demand_corr.rows(),
            });
        }
        if let Some(j) = (0..n).find(|&j| !(f.costs[j] > 0.0 && f.prices[j] > f.costs[j])) {
            return Err(Error::Domain(format!(
                "product {j}: need 0 < cost < price, got cost {} and price {}",
                f.costs[j], f.prices[j]
            )));
        }
        if !(f.risk_aversion > 0.0) {
            return Err(Error::Domain(format!(
                "risk aversion {} must be positive",
                f.risk_aversion
            )));
        }
        if f.demand_sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Domain("demand sigmas must be nonnegative".into()));
        }
        let demand_chol = cholesky_factor(&f.demand_corr)?;
        Ok(Self {
            fields: f,
            demand_chol,
        })
    }
}

impl From<NewsvendorSpec> for NewsvendorFields {
    fn from(s: NewsvendorSpec) -> Self {
        s.fields
    }
}

impl NewsvendorSpec {
    pub fn new(fields: NewsvendorFields) -> Result<Self> {
        fields.try_into()
    }

    pub fn n_products(&self) -> usize {
        self.fields.prices.len()
    }

    pub fn fields(&self) -> &NewsvendorFields {
        &self.fields
    }

    pub fn prices(&self) -> &[f64] {
        &self.fields.prices
    }

    pub fn costs(&self) -> &[f64] {
        &self.fields.costs
    }

    pub fn risk_aversion(&self) -> f64 {
        self.fields.risk_aversion
    }

    pub fn demand_mu(&self) -> &[f64] {
        &self.fields.demand_mu
    }

    pub fn demand_sigma(&self) -> &[f64] {
        &self.fields.demand_sigma
    }

    pub fn demand_corr(&self) -> &DenseMatrix {
        &self.fields.demand_corr
    }

    pub fn demand_chol(&self) -> &DenseMatrix {
        &self.demand_chol
    }

    /// Random profit `Σ p_j min(x_j, D_j) - c_j x_j` for one demand vector.
    pub fn profit(&self, x: &[f64], demand: &[f64]) -> f64 {
        let f = &self.fields;
        x.iter()
            .zip(demand)
            .zip(f.prices.iter().zip(&f.costs))
            .map(|((&xj, &dj), (&p, &c))| p * xj.min(dj) - c * xj)
            .sum()
    }

    /// Per-scenario utility `-exp(-λ·profit)`.
    pub fn utility(&self, x: &[f64], demand: &[f64]) -> f64 {
        -(-self.fields.risk_aversion * self.profit(x, demand)).exp()
    }
}

/// Draws prices, demand volatilities and the correlation structure.
pub fn generate_newsvendor_instance(
    n: usize,
    params: &NewsvendorParams,
    rng: &mut RngStream,
) -> Result<NewsvendorSpec> {
    if n == 0 {
        return Err(Error::Domain(
            "newsvendor needs at least one product".into(),
        ));
    }
    let (plo, phi) = params.price_range;
    let (slo, shi) = params.sigma_range;
    let prices = (0..n).map(|_| rng.uniform(plo, phi)).collect();
    let demand_sigma = (0..n).map(|_| rng.uniform(slo, shi)).collect();
    NewsvendorSpec::new(NewsvendorFields {
        prices,
        costs: vec![params.cost; n],
        risk_aversion: params.risk_aversion,
        demand_mu: vec![params.demand_mu; n],
        demand_sigma,
        demand_corr: DenseMatrix::constant_correlation(n, params.correlation),
    })
}

/// `count` demand vectors `D = exp(μ + σ ⊙ (L·u))`, one per row.
pub fn newsvendor_sample(
    spec: &NewsvendorSpec,
    count: usize,
    rng: &mut RngStream,
) -> Result<DenseMatrix> {
    let mut d = sample_correlated_normals(&spec.demand_chol, count, rng)?;
    let (mu, sigma) = (spec.demand_mu(), spec.demand_sigma());
    for r in 0..count {
        for (j, v) in d.row_mut(r).iter_mut().enumerate() {
            *v = (mu[j] + sigma[j] * *v).exp();
        }
    }
    Ok(d)
}

/// Gradient of the negated utility for one scenario:
/// `-λ(p_i 1{x_i < D_i} - c_i) exp(-λ·profit)`.
pub fn newsvendor_sample_gradient(
    spec: &NewsvendorSpec,
    x: &[f64],
    demand: &[f64],
    out: &mut [f64],
) {
    let f = &spec.fields;
    let lambda = f.risk_aversion;
    let weight = lambda * (-lambda * spec.profit(x, demand)).exp();
    for (i, g) in out.iter_mut().enumerate() {
        let marginal = if x[i] < demand[i] { f.prices[i] } else { 0.0 };
        *g = -weight * (marginal - f.costs[i]);
    }
}

/// One minimize-form gradient per demand row.
pub fn newsvendor_gradient(
    spec: &NewsvendorSpec,
    x: &[f64],
    demands: &DenseMatrix,
) -> Result<Vec<Vec<f64>>> {
    check_dims(spec, x, demands)?;
    Ok(demands
        .row_iter()
        .map(|d| {
            let mut g = vec![0.0; x.len()];
            newsvendor_sample_gradient(spec, x, d, &mut g);
            g
        })
        .collect())
}

/// Sample mean of the utility (maximize orientation).
pub fn newsvendor_objective(
    spec: &NewsvendorSpec,
    x: &[f64],
    demands: &DenseMatrix,
) -> Result<f64> {
    let values = newsvendor_utilities(spec, x, demands)?;
    Ok(super::sample_mean(&values))
}

pub fn newsvendor_utilities(
    spec: &NewsvendorSpec,
    x: &[f64],
    demands: &DenseMatrix,
) -> Result<Vec<f64>> {
    check_dims(spec, x, demands)?;
    if demands.rows() == 0 {
        return Err(Error::Domain("empty scenario batch".into()));
    }
    Ok(demands.row_iter().map(|d| spec.utility(x, d)).collect())
}

fn check_dims(spec: &NewsvendorSpec, x: &[f64], demands: &DenseMatrix) -> Result<()> {
    let n = spec.n_products();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if demands.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: demands.cols(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_product() -> NewsvendorSpec {
        NewsvendorSpec::new(NewsvendorFields {
            prices: vec![20.0],
            costs: vec![10.0],
            risk_aversion: 0.02,
            demand_mu: vec![3.0],
            demand_sigma: vec![0.5],
            demand_corr: DenseMatrix::identity(1),
        })
        .unwrap()
    }

    #[test]
    fn single_product_gradient_value() {
        let spec = one_product();
        let d = DenseMatrix::from_rows(&[vec![2.0]]).unwrap();
        let g = newsvendor_gradient(&spec, &[1.0], &d).unwrap();
        let maximize_form = -g[0][0];
        assert!((maximize_form - 0.02 * 10.0 * (-0.2f64).exp()).abs() < 1e-15);
        assert!((maximize_form - 0.163_746).abs() < 1e-6);
    }

    #[test]
    fn overstock_gradient_sign() {
        let spec = generate_newsvendor_instance(
            5,
            &NewsvendorParams::default(),
            &mut RngStream::new(1, 0),
        )
        .unwrap();
        let d = DenseMatrix::from_rows(&[vec![1.0; 5]]).unwrap();
        let g = newsvendor_gradient(&spec, &[2.0; 5], &d).unwrap();
        // Maximize-form gradient λ(-c)e^{-λz} < 0, so the minimize form is positive.
        assert!(g[0].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn zero_order_utility_is_minus_one() {
        let spec = one_product();
        let d = DenseMatrix::from_rows(&[vec![5.0], vec![50.0]]).unwrap();
        assert_eq!(newsvendor_objective(&spec, &[0.0], &d).unwrap(), -1.0);
    }

    #[test]
    fn generated_instance_ranges() {
        let spec = generate_newsvendor_instance(
            50,
            &NewsvendorParams::default(),
            &mut RngStream::new(2, 0),
        )
        .unwrap();
        assert!(spec.prices().iter().all(|p| (15.0..=30.0).contains(p)));
        assert!(spec.costs().iter().all(|&c| c == 10.0));
        assert!(spec
            .demand_sigma()
            .iter()
            .all(|s| (0.4724..=1.2684).contains(s)));
        let spec1 = generate_newsvendor_instance(
            1,
            &NewsvendorParams::default(),
            &mut RngStream::new(2, 0),
        )
        .unwrap();
        assert_eq!(spec1.demand_corr(), &DenseMatrix::identity(1));
    }

    #[test]
    fn invalid_fields_rejected() {
        let mut f = one_product().fields().clone();
        f.prices[0] = 5.0;
        assert!(NewsvendorSpec::new(f).is_err());
        let mut f = one_product().fields().clone();
        f.costs.push(1.0);
        assert!(NewsvendorSpec::new(f).is_err());
    }
}

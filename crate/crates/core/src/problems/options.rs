//! Growth-optimal (maximum expected log-wealth) portfolio of at-the-money
//! European calls and puts on correlated geometric-Brownian-motion stocks.
//!
//! Decision vector layout is `x = (x^C ‖ x^P)`, `2m` entries. With
//! returns `R^C_i = C₁ⁱ/C₀ⁱ - (1+r)` (same for puts) the wealth ratio is
//! `W = 1 + r + Σ x^C_i R^C_i + x^P_i R^P_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cholesky_factor, normal_cdf, random_correlation_matrix, sample_correlated_normals, DenseMatrix,
    RngStream,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionsParams {
    pub rate: f64,
    pub num_factors: usize,
    /// Range of annual volatilities, drawn independently for the investor's
    /// and the market's covariance.
    pub vol_range: (f64, f64),
    /// `|μ_i|` is uniform on `[0, mu_scale]·σ_i`.
    pub mu_scale: f64,
    pub positive_mu_prob: f64,
    pub s0: f64,
    /// Fraction of wealth that must stay in the riskless asset.
    pub cash_reserve: f64,
}

impl Default for OptionsParams {
    fn default() -> Self {
        Self {
            rate: 0.01,
            num_factors: 5,
            vol_range: (0.1, 0.6),
            mu_scale: 2.0,
            positive_mu_prob: 0.75,
            s0: 1.0,
            cash_reserve: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsFields {
    pub mu: Vec<f64>,
    pub own_cov: DenseMatrix,
    pub market_cov: DenseMatrix,
    pub rate: f64,
    pub s0: Vec<f64>,
    #[serde(default = "default_cash_reserve")]
    pub cash_reserve: f64,
}

fn default_cash_reserve() -> f64 {
    OptionsParams::default().cash_reserve
}

/// Frozen options-portfolio instance; option premiums are Black-Scholes
/// prices under the market covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OptionsFields", into = "OptionsFields")]
pub struct OptionsPortfolioSpec {
    fields: OptionsFields,
    own_vol: Vec<f64>,
    own_chol: DenseMatrix,
    call_prices: Vec<f64>,
    put_prices: Vec<f64>,
}

impl TryFrom<OptionsFields> for OptionsPortfolioSpec {
    type Error = Error;

    fn try_from(f: OptionsFields) -> Result<Self> {
        let m = f.mu.len();
        if m == 0 {
            return Err(Error::Domain(
                "options portfolio needs at least one stock".into(),
            ));
        }
        for (rows, cols) in [
            (f.own_cov.rows(), f.own_cov.cols()),
            (f.market_cov.rows(), f.market_cov.cols()),
            (f.s0.len(), m),
        ] {
            if rows != m || cols != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: if rows != m { rows } else { cols },
                });
            }
        }
        if !(f.rate >= 0.0 && f.rate.is_finite()) {
            return Err(Error::Domain(format!(
                "interest rate {} must be nonnegative",
                f.rate
            )));
        }
        if f.s0.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Domain(
                "initial stock prices must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&f.cash_reserve) {
            return Err(Error::Domain(format!(
                "cash reserve {} must lie in [0, 1)",
                f.cash_reserve
            )));
        }
        let own_vol: Vec<f64> = f.own_cov.diagonal().iter().map(|v| v.sqrt()).collect();
        let inv: Vec<f64> = own_vol.iter().map(|s| 1.0 / s).collect();
        let own_chol = cholesky_factor(&f.own_cov.scale_symmetric(&inv))?;
        cholesky_factor(&f.market_cov)?;
        let mut call_prices = Vec::with_capacity(m);
        let mut put_prices = Vec::with_capacity(m);
        for (j, var) in f.market_cov.diagonal().into_iter().enumerate() {
            let (c, p) = bs_atm_prices(var.sqrt(), f.rate)?;
            call_prices.push(f.s0[j] * c);
            put_prices.push(f.s0[j] * p);
        }
        Ok(Self {
            fields: f,
            own_vol,
            own_chol,
            call_prices,
            put_prices,
        })
    }
}

impl From<OptionsPortfolioSpec> for OptionsFields {
    fn from(s: OptionsPortfolioSpec) -> Self {
        s.fields
    }
}

impl OptionsPortfolioSpec {
    pub fn new(fields: OptionsFields) -> Result<Self> {
        fields.try_into()
    }

    pub fn n_stocks(&self) -> usize {
        self.fields.mu.len()
    }

    pub fn fields(&self) -> &OptionsFields {
        &self.fields
    }

    pub fn mu(&self) -> &[f64] {
        &self.fields.mu
    }

    pub fn own_cov(&self) -> &DenseMatrix {
        &self.fields.own_cov
    }

    pub fn market_cov(&self) -> &DenseMatrix {
        &self.fields.market_cov
    }

    pub fn own_vol(&self) -> &[f64] {
        &self.own_vol
    }

    pub fn rate(&self) -> f64 {
        self.fields.rate
    }

    pub fn s0(&self) -> &[f64] {
        &self.fields.s0
    }

    pub fn cash_reserve(&self) -> f64 {
        self.fields.cash_reserve
    }

    /// Budget `Σ x <= 1 - cash_reserve`.
    pub fn investable_fraction(&self) -> f64 {
        1.0 - self.fields.cash_reserve
    }

    pub fn call_prices(&self) -> &[f64] {
        &self.call_prices
    }

    pub fn put_prices(&self) -> &[f64] {
        &self.put_prices
    }
}

/// At-the-money Black-Scholes prices for unit spot and strike, maturity 1.
pub fn bs_atm_prices(sigma: f64, r: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "volatility {sigma} must be positive"
        )));
    }
    if !r.is_finite() {
        return Err(Error::Domain(format!("rate {r} is not finite")));
    }
    let d1 = (r + 0.5 * sigma * sigma) / sigma;
    let d2 = d1 - sigma;
    let discount = (-r).exp();
    let call = normal_cdf(d1)? - discount * normal_cdf(d2)?;
    let put = call - (1.0 - discount);
    Ok((call, put))
}

pub fn generate_options_instance(
    m: usize,
    params: &OptionsParams,
    rng: &mut RngStream,
) -> Result<OptionsPortfolioSpec> {
    if m == 0 {
        return Err(Error::Domain(
            "options portfolio needs at least one stock".into(),
        ));
    }
    let factors = params.num_factors.clamp(1, m);
    let (vlo, vhi) = params.vol_range;
    let covariance = |rng: &mut RngStream| -> Result<(DenseMatrix, Vec<f64>)> {
        let corr = random_correlation_matrix(m, factors, rng)?;
        let vol: Vec<f64> = (0..m).map(|_| rng.uniform(vlo, vhi)).collect();
        Ok((corr.scale_symmetric(&vol), vol))
    };
    let (own_cov, own_vol) = covariance(rng)?;
    let (market_cov, _) = covariance(rng)?;
    let mu = own_vol
        .iter()
        .map(|s| {
            let magnitude = rng.uniform(0.0, params.mu_scale) * s;
            if rng.bernoulli(params.positive_mu_prob) {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    OptionsPortfolioSpec::new(OptionsFields {
        mu,
        own_cov,
        market_cov,
        rate: params.rate,
        s0: vec![params.s0; m],
        cash_reserve: params.cash_reserve,
    })
}

/// Terminal prices and option payoffs, one row per scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct OptionsBatch {
    pub terminal: DenseMatrix,
    pub calls: DenseMatrix,
    pub puts: DenseMatrix,
}

impl OptionsBatch {
    pub fn len(&self) -> usize {
        self.terminal.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Terminal prices `S₁ = S₀ exp(μ - σ²/2 + σW)` under the investor's
/// dynamics, with payoffs derived eagerly.
pub fn options_sample(
    spec: &OptionsPortfolioSpec,
    count: usize,
    rng: &mut RngStream,
) -> Result<OptionsBatch> {
    let m = spec.n_stocks();
    let mut terminal = sample_correlated_normals(&spec.own_chol, count, rng)?;
    let mut calls = DenseMatrix::zeros(count, m);
    let mut puts = DenseMatrix::zeros(count, m);
    let (mu, vol, s0) = (spec.mu(), spec.own_vol(), spec.s0());
    for r in 0..count {
        for j in 0..m {
            let w = terminal[(r, j)];
            let s1 = s0[j] * (mu[j] - 0.5 * vol[j] * vol[j] + vol[j] * w).exp();
            terminal[(r, j)] = s1;
            let gain = s1 - s0[j];
            calls[(r, j)] = gain.max(0.0);
            puts[(r, j)] = (-gain).max(0.0);
        }
    }
    Ok(OptionsBatch {
        terminal,
        calls,
        puts,
    })
}

fn check_dims(spec: &OptionsPortfolioSpec, x: &[f64], batch: &OptionsBatch) -> Result<()> {
    let m = spec.n_stocks();
    if x.len() != 2 * m {
        return Err(Error::DimensionMismatch {
            expected: 2 * m,
            found: x.len(),
        });
    }
    if batch.calls.cols() != m || batch.puts.cols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: batch.calls.cols(),
        });
    }
    Ok(())
}

/// Per-scenario excess returns `(R^C ‖ R^P)` written into `out`.
fn excess_returns(spec: &OptionsPortfolioSpec, batch: &OptionsBatch, row: usize, out: &mut [f64]) {
    let m = spec.n_stocks();
    let gross = 1.0 + spec.rate();
    let (calls, puts) = (batch.calls.row(row), batch.puts.row(row));
    for j in 0..m {
        out[j] = calls[j] / spec.call_prices[j] - gross;
        out[m + j] = puts[j] / spec.put_prices[j] - gross;
    }
}

fn wealth(spec: &OptionsPortfolioSpec, x: &[f64], returns: &[f64], sample: usize) -> Result<f64> {
    let w = 1.0 + spec.rate() + x.iter().zip(returns).map(|(a, b)| a * b).sum::<f64>();
    if !(w > 0.0) {
        return Err(Error::NonPositiveWealth { sample, value: w });
    }
    Ok(w)
}

/// Minimize-form gradients `-R / W`, one per scenario.
pub fn options_gradient(
    spec: &OptionsPortfolioSpec,
    x: &[f64],
    batch: &OptionsBatch,
) -> Result<Vec<Vec<f64>>> {
    check_dims(spec, x, batch)?;
    let mut returns = vec![0.0; x.len()];
    (0..batch.len())
        .map(|r| {
            excess_returns(spec, batch, r, &mut returns);
            let w = wealth(spec, x, &returns, r)?;
            Ok(returns.iter().map(|v| -v / w).collect())
        })
        .collect()
}

/// Per-scenario log-wealth.
pub fn options_log_wealth(
    spec: &OptionsPortfolioSpec,
    x: &[f64],
    batch: &OptionsBatch,
) -> Result<Vec<f64>> {
    check_dims(spec, x, batch)?;
    if batch.is_empty() {
        return Err(Error::Domain("empty scenario batch".into()));
    }
    let mut returns = vec![0.0; x.len()];
    (0..batch.len())
        .map(|r| {
            excess_returns(spec, batch, r, &mut returns);
            Ok(wealth(spec, x, &returns, r)?.ln())
        })
        .collect()
}

/// Sample mean of log-wealth (maximize orientation).
pub fn options_objective(
    spec: &OptionsPortfolioSpec,
    x: &[f64],
    batch: &OptionsBatch,
) -> Result<f64> {
    let values = options_log_wealth(spec, x, batch)?;
    Ok(super::sample_mean(&values))
}

//! Mini-batch gradient statistics and the rules that pick the next batch
//! size.
//!
//! Both dynamic rules model the true gradient as `N(mean, diag(var_of_mean))`
//! and choose the smallest batch for which `-mean` is a descent direction
//! with probability `1 - alpha`, assuming the per-sample gradient variance
//! changes little between consecutive iterations:
//!
//! * [`BatchRule::PerDimensionMedian`] sizes every coordinate separately,
//!   `N_k = ceil(N · var_k · z² / mean_k²)`, and takes the median over `k`.
//! * [`BatchRule::SingleUpdate`] asks for `meanᵀg > 0` in aggregate,
//!   `N' = ceil(N · Σ mean_k² var_k · z² / (Σ mean_k²)²)`.
//!
//! Both rules shrink the batch as well as grow it. Results are clamped to
//! `[n_min, n_max]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_quantile};

/// Mean of a mini-batch of gradients and the per-coordinate variance of
/// that mean, `(1/(N(N-1))) Σ_j (g_jk - mean_k)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientBatchStats {
    pub mean: Vec<f64>,
    pub var_of_mean: Vec<f64>,
    pub batch_size: usize,
}

impl GradientBatchStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Streaming (Welford) accumulator for [`GradientBatchStats`].
#[derive(Clone, Debug)]
pub struct StatsAccumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl StatsAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn push(&mut self, sample: &[f64]) -> Result<()> {
        if sample.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: sample.len(),
            });
        }
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &g) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(sample) {
            let delta = g - *m;
            *m += delta / n;
            *s += delta * (g - *m);
        }
        Ok(())
    }

    pub fn finish(self) -> Result<GradientBatchStats> {
        if self.count < 2 {
            return Err(Error::TooFewSamples(self.count));
        }
        let n = self.count as f64;
        let denom = n * (n - 1.0);
        Ok(GradientBatchStats {
            var_of_mean: self.m2.iter().map(|s| (s / denom).max(0.0)).collect(),
            mean: self.mean,
            batch_size: self.count,
        })
    }
}

/// Mean and variance-of-the-mean of `N >= 2` gradient samples.
pub fn accumulate_stats<S: AsRef<[f64]>>(samples: &[S]) -> Result<GradientBatchStats> {
    let first = samples.first().ok_or(Error::TooFewSamples(0))?;
    let mut acc = StatsAccumulator::new(first.as_ref().len());
    for s in samples {
        acc.push(s.as_ref())?;
    }
    acc.finish()
}

/// `Φ(|mean_k| / sqrt(var_of_mean_k))` per coordinate: the estimated
/// probability that moving along `-mean_k` decreases the objective.
pub fn descent_probability_per_dim(stats: &GradientBatchStats) -> Vec<f64> {
    stats
        .mean
        .iter()
        .zip(&stats.var_of_mean)
        .map(|(&m, &v)| {
            if v <= 0.0 {
                if m != 0.0 {
                    1.0
                } else {
                    0.5
                }
            } else {
                let z = m.abs() / v.sqrt();
                if z.is_finite() {
                    normal_cdf(z).unwrap_or(1.0)
                } else {
                    1.0
                }
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BatchRule {
    PerDimensionMedian,
    SingleUpdate,
    Fixed(usize),
}

impl BatchRule {
    /// Short label used in trace files and plot legends.
    pub fn label(&self) -> String {
        match self {
            BatchRule::PerDimensionMedian => "PD".to_string(),
            BatchRule::SingleUpdate => "1D".to_string(),
            BatchRule::Fixed(n) => n.to_string(),
        }
    }

    pub fn is_dynamic(&self) -> bool {
        !matches!(self, BatchRule::Fixed(_))
    }
}

impl fmt::Display for BatchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for BatchRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "PD" | "pd" | "per-dimension" => Ok(BatchRule::PerDimensionMedian),
            "1D" | "1d" | "single" => Ok(BatchRule::SingleUpdate),
            other => other.parse::<usize>().map(BatchRule::Fixed).map_err(|_| {
                Error::config(
                    "rules",
                    format!("`{other}` is not PD, 1D or a fixed batch size"),
                )
            }),
        }
    }
}

impl Serialize for BatchRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for BatchRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Size(usize),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Size(n) => Ok(BatchRule::Fixed(n)),
        }
    }
}

/// Tunables shared by every controller of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub alpha: f64,
    pub n0: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub epsilon_grad: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            n0: 32,
            n_min: 4,
            n_max: 8192,
            epsilon_grad: 1e-12,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::config(
                "alpha",
                format!("{} must lie in the open interval (0, 0.5)", self.alpha),
            ));
        }
        if self.n_min < 2 {
            return Err(Error::config(
                "n_min",
                format!("{} must be at least 2", self.n_min),
            ));
        }
        if self.n_max < self.n_min {
            return Err(Error::config(
                "n_max",
                format!("{} must be at least n_min = {}", self.n_max, self.n_min),
            ));
        }
        if self.n0 < self.n_min || self.n0 > self.n_max {
            return Err(Error::config(
                "n0",
                format!(
                    "{} must lie in [n_min, n_max] = [{}, {}]",
                    self.n0, self.n_min, self.n_max
                ),
            ));
        }
        if !(self.epsilon_grad > 0.0 && self.epsilon_grad.is_finite()) {
            return Err(Error::config(
                "epsilon_grad",
                "must be a positive finite number",
            ));
        }
        Ok(())
    }
}

/// Owns the batch size of one optimization run.
#[derive(Clone, Debug)]
pub struct SamplingController {
    rule: BatchRule,
    alpha: f64,
    z_alpha: f64,
    n_current: usize,
    n_min: usize,
    n_max: usize,
    epsilon_grad: f64,
}

impl SamplingController {
    /// A fixed rule pins both bounds to its own size.
    pub fn new(rule: BatchRule, cfg: &SamplingConfig) -> Result<Self> {
        cfg.validate()?;
        let (n_current, n_min, n_max) = match rule {
            BatchRule::Fixed(n) if n < 2 => {
                return Err(Error::config(
                    "rules",
                    format!("fixed batch size {n} is below 2"),
                ))
            }
            BatchRule::Fixed(n) => (n, n, n),
            _ => (cfg.n0, cfg.n_min, cfg.n_max),
        };
        Ok(Self {
            rule,
            alpha: cfg.alpha,
            z_alpha: normal_quantile(1.0 - cfg.alpha)?,
            n_current,
            n_min,
            n_max,
            epsilon_grad: cfg.epsilon_grad,
        })
    }

    pub fn rule(&self) -> BatchRule {
        self.rule
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Cached `Φ⁻¹(1 - alpha)`.
    pub fn z_alpha(&self) -> f64 {
        self.z_alpha
    }

    pub fn current(&self) -> usize {
        self.n_current
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.n_min, self.n_max)
    }

    fn clamp(&self, candidate: f64) -> usize {
        if candidate.is_nan() {
            return self.n_max;
        }
        candidate.clamp(self.n_min as f64, self.n_max as f64) as usize
    }

    /// Applies the controller's rule to the statistics of the batch just
    /// consumed and stores the result as the next batch size.
    pub fn next_size(&mut self, stats: &GradientBatchStats) -> usize {
        let next = match self.rule {
            BatchRule::PerDimensionMedian => per_dimension_next_size(stats, self),
            BatchRule::SingleUpdate => single_update_next_size(stats, self),
            BatchRule::Fixed(_) => self.n_current,
        };
        self.n_current = next;
        next
    }
}

/// Ceiling that ignores relative rounding noise below 1e-12, so a ratio
/// that is mathematically an integer maps to that integer.
fn ceil_tolerant(x: f64) -> f64 {
    (x - x.abs() * 1e-12).ceil()
}

/// Unclamped per-coordinate sizes `ceil(N · var_k · z² / mean_k²)`;
/// coordinates with `|mean_k| <= epsilon_grad` saturate at `n_max`.
pub fn per_dimension_candidates(stats: &GradientBatchStats, ctl: &SamplingController) -> Vec<f64> {
    let n = stats.batch_size as f64;
    let z2 = ctl.z_alpha * ctl.z_alpha;
    stats
        .mean
        .iter()
        .zip(&stats.var_of_mean)
        .map(|(&m, &v)| {
            if m.abs() <= ctl.epsilon_grad {
                ctl.n_max as f64
            } else {
                ceil_tolerant(n * v * z2 / (m * m))
            }
        })
        .collect()
}

/// Per-dimension rule aggregated by the (lower) median.
pub fn per_dimension_next_size(stats: &GradientBatchStats, ctl: &SamplingController) -> usize {
    let mut candidates = per_dimension_candidates(stats, ctl);
    if candidates.is_empty() {
        return ctl.n_current;
    }
    candidates.sort_by(f64::total_cmp);
    ctl.clamp(candidates[(candidates.len() - 1) / 2])
}

/// Aggregate rule with a diagonal covariance estimate.
pub fn single_update_next_size(stats: &GradientBatchStats, ctl: &SamplingController) -> usize {
    let (quad, norm2) = stats
        .mean
        .iter()
        .zip(&stats.var_of_mean)
        .fold((0.0, 0.0), |(q, s), (&m, &v)| (q + m * m * v, s + m * m));
    let denom = norm2 * norm2;
    if denom <= ctl.epsilon_grad.powi(4) {
        return ctl.n_max;
    }
    let n = stats.batch_size as f64;
    ctl.clamp(ceil_tolerant(n * quad * ctl.z_alpha * ctl.z_alpha / denom))
}

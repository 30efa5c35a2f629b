//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use dynbatch::numerics::RngStream;

/// Upper tail `1 - Φ(a)` for `a >= 0` by composite Simpson quadrature of
/// the density on `[a, a + 12]`, accumulated with Kahan compensation.
/// Relative error is small even deep in the tail.
pub fn upper_tail_by_quadrature(a: f64) -> f64 {
    let n = 16384usize;
    let h = 12.0 / n as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let y = w * pdf(a + k as f64 * h) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum * h / 3.0
}

/// Φ(z) from the quadrature tail.
pub fn cdf_by_quadrature(z: f64) -> f64 {
    if z < 0.0 {
        upper_tail_by_quadrature(-z)
    } else {
        1.0 - upper_tail_by_quadrature(z)
    }
}

/// Φ⁻¹(p): bisection on the quadrature CDF down to a 1e-4 bracket, then
/// Newton steps with the exact density.
pub fn quantile_by_bisection(p: f64) -> f64 {
    let (mut lo, mut hi) = (-9.0f64, 9.0f64);
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if cdf_by_quadrature(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..4 {
        let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        z -= (cdf_by_quadrature(z) - p) / pdf;
    }
    z
}

/// Two-pass mean and variance of the mean.
pub fn two_pass_stats(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len() as f64;
    let dim = samples[0].len();
    let mean: Vec<f64> = (0..dim)
        .map(|k| samples.iter().map(|s| s[k]).sum::<f64>() / n)
        .collect();
    let var: Vec<f64> = (0..dim)
        .map(|k| {
            samples
                .iter()
                .map(|s| (s[k] - mean[k]).powi(2))
                .sum::<f64>()
                / (n * (n - 1.0))
        })
        .collect();
    (mean, var)
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = xp[i];
            xp[i] = orig + h;
            let fp = f(&xp);
            xp[i] = orig - h;
            let fm = f(&xp);
            xp[i] = orig;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Largest relative error, with an absolute floor so that tiny components
/// are not judged on pure rounding noise.
pub fn max_rel_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Scalar Adam recurrence written independently of the library.
pub struct ScalarAdam {
    pub x: f64,
    m: f64,
    v: f64,
    t: i32,
}

impl ScalarAdam {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            m: 0.0,
            v: 0.0,
            t: 0,
        }
    }

    pub fn step(&mut self, g: f64, eta: f64, b1: f64, b2: f64, eps: f64) {
        self.t += 1;
        self.m = b1 * self.m + (1.0 - b1) * g;
        self.v = b2 * self.v + (1.0 - b2) * g * g;
        let mh = self.m / (1.0 - b1.powi(self.t));
        let vh = self.v / (1.0 - b2.powi(self.t));
        self.x -= eta * mh / (vh.sqrt() + eps);
    }
}

/// Monte Carlo price of an at-the-money call (S0 = K = 1, T = 1) under
/// risk-neutral GBM; returns (price, standard error).
pub fn mc_atm_call(sigma: f64, r: f64, samples: usize, rng: &mut RngStream) -> (f64, f64) {
    let disc = (-r).exp();
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let s1 = (r - 0.5 * sigma * sigma + sigma * rng.standard_normal()).exp();
        let pay = disc * (s1 - 1.0).max(0.0);
        sum += pay;
        sum2 += pay * pay;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Random point of the capped simplex {x >= 0, Σx <= cap} (uniform
/// Dirichlet direction scaled by a random fraction of the cap).
pub fn random_simplex_point(dim: usize, cap: f64, rng: &mut RngStream) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -rng.uniform(1e-12, 1.0).ln()).collect();
    let total: f64 = e.iter().sum();
    let scale = cap * rng.uniform(0.0, 1.0);
    e.iter().map(|v| v / total * scale).collect()
}

/// `f(x) = ½‖x − x*‖²` observed through additive Gaussian noise with a
/// known diagonal covariance.
pub struct NoisyQuadratic {
    pub target: Vec<f64>,
    pub noise_sd: Vec<f64>,
}

impl NoisyQuadratic {
    pub fn true_gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.target).map(|(a, b)| a - b).collect()
    }
}

impl dynbatch::optim::GradientOracle for NoisyQuadratic {
    fn dim(&self) -> usize {
        self.target.len()
    }

    fn region(&self) -> dynbatch::optim::FeasibleRegion {
        dynbatch::optim::FeasibleRegion::NonnegativeOrthant
    }

    fn sample_gradients(
        &self,
        x: &[f64],
        count: usize,
        rng: &mut RngStream,
    ) -> dynbatch::Result<Vec<Vec<f64>>> {
        let g = self.true_gradient(x);
        Ok((0..count)
            .map(|_| {
                g.iter()
                    .zip(&self.noise_sd)
                    .map(|(gk, sd)| gk + sd * rng.standard_normal())
                    .collect()
            })
            .collect())
    }
}

/// Empirical descent statistics of one rule on the noisy quadratic.
pub struct DescentOutcome {
    /// Fraction of measured iterations with `ĝᵀg > 0`.
    pub inner_positive: f64,
    /// Per-coordinate fraction of iterations with `sign(ĝ_k) = sign(g_k)`.
    pub sign_agreement: Vec<f64>,
    /// Coordinate whose noise-to-signal ratio at the start is the lower
    /// median, i.e. the coordinate the median aggregation targets.
    pub median_coordinate: usize,
    pub mean_batch: f64,
    /// Average over measured iterations of the exact probability
    /// `Φ(‖g‖²√N / √(Σ g_k² σ_k²))` given the batch size actually used.
    pub predicted_inner_positive: f64,
    /// Same for each coordinate: `Φ(|g_k|√N / σ_k)`.
    pub predicted_agreement: Vec<f64>,
}

/// Dimension-10 noisy quadratic used for the descent-probability checks.
/// The iterate starts far from `x* = 0` and moves slowly (`eta0 = 0.01`),
/// so the true gradient stays well away from zero while noise levels vary
/// across coordinates.
pub fn descent_problem() -> (NoisyQuadratic, Vec<f64>) {
    let dim = 10;
    let start: Vec<f64> = (0..dim).map(|k| 5.0 + k as f64).collect();
    let noise_sd: Vec<f64> = (0..dim)
        .map(|k| 10.0 * (1.0 + ((k * 7) % dim) as f64))
        .collect();
    (
        NoisyQuadratic {
            target: vec![0.0; dim],
            noise_sd,
        },
        start,
    )
}

/// Runs `burn_in + measured` projected SGD iterations with batch sizes from
/// `rule`, measuring the quality of each batch mean against the true
/// gradient at the iterate where it was drawn.
pub fn descent_experiment(
    rule: dynbatch::sampling::BatchRule,
    alpha: f64,
    burn_in: usize,
    measured: usize,
    seed: u64,
) -> DescentOutcome {
    use dynbatch::optim::{sgd_step, GradientOracle, OptimizerState, SgdConfig};
    use dynbatch::sampling::{accumulate_stats, SamplingConfig, SamplingController};

    let (problem, start) = descent_problem();
    let cfg = SamplingConfig {
        alpha,
        n_max: 1 << 20,
        ..SamplingConfig::default()
    };
    let mut ctl = SamplingController::new(rule, &cfg).unwrap();
    let mut state = OptimizerState::new(start.clone());
    let sgd = SgdConfig { eta0: 0.01 };
    let region = problem.region();
    let mut rng = RngStream::new(seed, 0);

    let dim = start.len();
    let mut positive = 0usize;
    let mut agree = vec![0usize; dim];
    let mut batch_total = 0usize;
    let mut predicted_inner = 0.0;
    let mut predicted_coord = vec![0.0; dim];
    let phi = |z: f64| cdf_by_quadrature(z);
    for i in 0..burn_in + measured {
        let n = ctl.current();
        let grads = problem
            .sample_gradients(&state.iterate, n, &mut rng)
            .unwrap();
        let stats = accumulate_stats(&grads).unwrap();
        if i >= burn_in {
            let g = problem.true_gradient(&state.iterate);
            let inner: f64 = g.iter().zip(&stats.mean).map(|(a, b)| a * b).sum();
            positive += usize::from(inner > 0.0);
            for k in 0..dim {
                agree[k] += usize::from(g[k].signum() == stats.mean[k].signum());
            }
            batch_total += n;
            let root_n = (n as f64).sqrt();
            let spread: f64 = g
                .iter()
                .zip(&problem.noise_sd)
                .map(|(a, s)| a * a * s * s)
                .sum::<f64>()
                .sqrt();
            let norm2: f64 = g.iter().map(|a| a * a).sum();
            predicted_inner += phi(norm2 * root_n / spread);
            for k in 0..dim {
                predicted_coord[k] += phi(g[k].abs() * root_n / problem.noise_sd[k]);
            }
        }
        sgd_step(&mut state, &stats.mean, &sgd, &region).unwrap();
        ctl.next_size(&stats);
    }

    let g0 = problem.true_gradient(&start);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        let ra = problem.noise_sd[a] / g0[a].abs();
        let rb = problem.noise_sd[b] / g0[b].abs();
        ra.total_cmp(&rb)
    });
    DescentOutcome {
        inner_positive: positive as f64 / measured as f64,
        sign_agreement: agree.iter().map(|&c| c as f64 / measured as f64).collect(),
        median_coordinate: order[(dim - 1) / 2],
        mean_batch: batch_total as f64 / measured as f64,
        predicted_inner_positive: predicted_inner / measured as f64,
        predicted_agreement: predicted_coord
            .iter()
            .map(|p| p / measured as f64)
            .collect(),
    }
}

use serde::{Deserialize, Serialize};

use super::projection::{project_in_place, FeasibleRegion};
use crate::error::{Error, Result};

/// Basic SGD with step `eta0 / i` at iteration `i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgdConfig {
    pub eta0: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self { eta0: 1.0 }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::config(
                "eta0",
                format!("{} must be positive", self.eta0),
            ));
        }
        Ok(())
    }

    pub fn step_size(&self, iteration: usize) -> f64 {
        self.eta0 / iteration as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            eta: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::config(
                "adam.eta",
                format!("{} must be positive", self.eta),
            ));
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return Err(Error::config(
                "adam.beta1",
                format!("{} must lie in [0, 1)", self.beta1),
            ));
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::config(
                "adam.beta2",
                format!("{} must lie in [0, 1)", self.beta2),
            ));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config(
                "adam.epsilon",
                format!("{} must be positive", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// First/second moment accumulators.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self {
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            step_count: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    BasicSgd(SgdConfig),
    Adam(AdamConfig),
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::BasicSgd(_) => "sgd",
            Method::Adam(_) => "adam",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub iterate: Vec<f64>,
    /// 1-based iteration counter `i`.
    pub iteration: usize,
    pub adam: Option<AdamState>,
}

impl OptimizerState {
    pub fn new(start: Vec<f64>) -> Self {
        Self {
            iterate: start,
            iteration: 1,
            adam: None,
        }
    }

    pub fn with_adam(start: Vec<f64>) -> Self {
        let dim = start.len();
        Self {
            iterate: start,
            iteration: 1,
            adam: Some(AdamState::new(dim)),
        }
    }

    pub fn for_method(start: Vec<f64>, method: &Method) -> Self {
        match method {
            Method::BasicSgd(_) => Self::new(start),
            Method::Adam(_) => Self::with_adam(start),
        }
    }

    pub fn dim(&self) -> usize {
        self.iterate.len()
    }

    pub fn step(&mut self, ghat: &[f64], method: &Method, region: &FeasibleRegion) -> Result<()> {
        match method {
            Method::BasicSgd(cfg) => sgd_step(self, ghat, cfg, region),
            Method::Adam(cfg) => adam_step(self, ghat, cfg, region),
        }
    }
}

fn check_gradient(state: &OptimizerState, ghat: &[f64]) -> Result<()> {
    if ghat.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: ghat.len(),
        });
    }
    if let Some(k) = ghat.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient(k));
    }
    Ok(())
}

/// `x ← π(x − (eta0 / i)·ĝ)`, where `ĝ` is the batch-mean gradient of the
/// objective being minimized.
pub fn sgd_step(
    state: &mut OptimizerState,
    ghat: &[f64],
    cfg: &SgdConfig,
    region: &FeasibleRegion,
) -> Result<()> {
    check_gradient(state, ghat)?;
    let eta = cfg.step_size(state.iteration);
    for (x, g) in state.iterate.iter_mut().zip(ghat) {
        *x -= eta * g;
    }
    project_in_place(region, &mut state.iterate);
    state.iteration += 1;
    Ok(())
}

/// Bias-corrected Adam update followed by projection onto `region`.
pub fn adam_step(
    state: &mut OptimizerState,
    ghat: &[f64],
    cfg: &AdamConfig,
    region: &FeasibleRegion,
) -> Result<()> {
    check_gradient(state, ghat)?;
    let dim = state.dim();
    let adam = state.adam.get_or_insert_with(|| AdamState::new(dim));
    adam.step_count += 1;
    let t = adam.step_count as i32;
    let bias1 = 1.0 - cfg.beta1.powi(t);
    let bias2 = 1.0 - cfg.beta2.powi(t);
    for (((x, m), v), &g) in state
        .iterate
        .iter_mut()
        .zip(adam.first_moment.iter_mut())
        .zip(adam.second_moment.iter_mut())
        .zip(ghat)
    {
        *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
        *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        *x -= cfg.eta * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
    project_in_place(region, &mut state.iterate);
    state.iteration += 1;
    Ok(())
}

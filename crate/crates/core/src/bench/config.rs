use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{AdamConfig, Budget, Method, SgdConfig, TraceCadence};
use crate::problems::{NewsvendorParams, OptionsParams, ProblemKind};
use crate::sampling::{BatchRule, SamplingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Sgd,
    Adam,
}

impl MethodKind {
    pub fn label(&self) -> &'static str {
        match self {
            MethodKind::Sgd => "sgd",
            MethodKind::Adam => "adam",
        }
    }
}

/// One experiment: a problem, an optimizer and the batch rules to compare.
///
/// Read from TOML; every key is optional and unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub method: MethodKind,
    pub rules: Vec<BatchRule>,
    pub seed: u64,
    /// Products (newsvendor) or stocks (options).
    pub dimension: usize,
    pub alpha: f64,
    pub n0: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub epsilon_grad: f64,
    pub eta0: f64,
    pub adam: AdamConfig,
    /// Optimizer seconds per rule. Defaults to 20 (newsvendor) or 30
    /// (options) unless only `max_iterations` is given.
    pub budget_seconds: Option<f64>,
    pub max_iterations: Option<usize>,
    pub eval_sample_size: usize,
    pub output_dir: PathBuf,
    /// Run rules on parallel workers, at most one per available core.
    pub parallel: bool,
    pub cadence: TraceCadence,
    /// Load the instance from a file written by `generate` instead of
    /// generating it from `seed`.
    pub instance: Option<PathBuf>,
    pub newsvendor: NewsvendorParams,
    pub options: OptionsParams,
}

pub const DEFAULT_RULES: [BatchRule; 5] = [
    BatchRule::PerDimensionMedian,
    BatchRule::SingleUpdate,
    BatchRule::Fixed(32),
    BatchRule::Fixed(256),
    BatchRule::Fixed(512),
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sampling = SamplingConfig::default();
        Self {
            problem: ProblemKind::Newsvendor,
            method: MethodKind::Sgd,
            rules: DEFAULT_RULES.to_vec(),
            seed: 0,
            dimension: 50,
            alpha: sampling.alpha,
            n0: sampling.n0,
            n_min: sampling.n_min,
            n_max: sampling.n_max,
            epsilon_grad: sampling.epsilon_grad,
            eta0: SgdConfig::default().eta0,
            adam: AdamConfig::default(),
            budget_seconds: None,
            max_iterations: None,
            eval_sample_size: 10_000,
            output_dir: PathBuf::from("results"),
            parallel: false,
            cadence: TraceCadence::default(),
            instance: None,
            newsvendor: NewsvendorParams::default(),
            options: OptionsParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            alpha: self.alpha,
            n0: self.n0,
            n_min: self.n_min,
            n_max: self.n_max,
            epsilon_grad: self.epsilon_grad,
        }
    }

    pub fn optimizer(&self) -> Method {
        match self.method {
            MethodKind::Sgd => Method::BasicSgd(SgdConfig { eta0: self.eta0 }),
            MethodKind::Adam => Method::Adam(self.adam),
        }
    }

    pub fn default_budget_seconds(problem: ProblemKind) -> f64 {
        match problem {
            ProblemKind::Newsvendor => 20.0,
            ProblemKind::Options => 30.0,
        }
    }

    pub fn budget(&self) -> Budget {
        let max_seconds = match (self.budget_seconds, self.max_iterations) {
            (Some(s), _) => Some(s),
            (None, Some(_)) => None,
            (None, None) => Some(Self::default_budget_seconds(self.problem)),
        };
        Budget {
            max_seconds,
            max_iterations: self.max_iterations,
        }
    }

    /// File-name stem shared by all outputs of this experiment.
    pub fn stem(&self) -> String {
        format!("{}_{}", self.problem.label(), self.method.label())
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() {
            return Err(Error::config("rules", "at least one rule is required"));
        }
        for (i, r) in self.rules.iter().enumerate() {
            if self.rules[..i].contains(r) {
                return Err(Error::config("rules", format!("rule {r} is listed twice")));
            }
            if let BatchRule::Fixed(n) = r {
                if *n < 2 {
                    return Err(Error::config(
                        "rules",
                        format!("fixed batch size {n} is below 2"),
                    ));
                }
            }
        }
        if self.dimension == 0 {
            return Err(Error::config("dimension", "must be at least 1"));
        }
        self.sampling().validate()?;
        SgdConfig { eta0: self.eta0 }.validate()?;
        self.adam.validate()?;
        self.budget().validate()?;
        self.cadence.validate()?;
        if self.eval_sample_size < 2 {
            return Err(Error::config(
                "eval_sample_size",
                format!("{} must be at least 2", self.eval_sample_size),
            ));
        }
        let rate = self.options.rate;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::config(
                "options.rate",
                format!("{rate} must be positive"),
            ));
        }
        if !(0.0..1.0).contains(&self.options.cash_reserve) {
            return Err(Error::config(
                "options.cash_reserve",
                format!("{} must lie in [0, 1)", self.options.cash_reserve),
            ));
        }
        if !(0.0..=1.0).contains(&self.options.positive_mu_prob) {
            return Err(Error::config(
                "options.positive_mu_prob",
                "must be a probability",
            ));
        }
        if self.options.num_factors == 0 {
            return Err(Error::config("options.num_factors", "must be at least 1"));
        }
        let nv = &self.newsvendor;
        if !(nv.risk_aversion > 0.0) {
            return Err(Error::config(
                "newsvendor.risk_aversion",
                "must be positive",
            ));
        }
        if !(nv.cost > 0.0 && nv.price_range.0 > nv.cost && nv.price_range.1 >= nv.price_range.0) {
            return Err(Error::config(
                "newsvendor.price_range",
                "prices must exceed the unit cost and form an interval",
            ));
        }
        if !(nv.correlation > -1.0 && nv.correlation < 1.0) {
            return Err(Error::config(
                "newsvendor.correlation",
                "must lie in (-1, 1)",
            ));
        }
        Ok(())
    }

    /// Parses and validates TOML text; `origin` is used in error messages.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }
}

/// 1-based line number of a byte offset.
pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

/// Reads an experiment configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::from_toml_str(&text, path)
}

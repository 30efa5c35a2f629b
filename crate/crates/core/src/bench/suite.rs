use std::fs;
use std::num::NonZeroUsize;
use std::thread;

use super::config::{line_of, ExperimentConfig};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::optim::{run_optimization, RunSettings, TraceRecord};
use crate::problems::{
    generate_newsvendor_instance, generate_options_instance, McObjectiveEvaluator, ProblemInstance,
    ProblemKind,
};
use crate::sampling::{BatchRule, SamplingController};

/// Substream used to generate the problem instance.
pub const INSTANCE_STREAM: u64 = 0;
/// Substream of the shared evaluation batch.
pub const EVAL_STREAM: u64 = 1;

/// Scenario substream of one rule, independent of its position in the
/// rule list.
pub fn rule_stream(rule: BatchRule) -> u64 {
    match rule {
        BatchRule::PerDimensionMedian => 2,
        BatchRule::SingleUpdate => 3,
        BatchRule::Fixed(n) => (1 << 32) | n as u64,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleRun {
    pub rule: BatchRule,
    pub trace: Vec<TraceRecord>,
    pub final_iterate: Vec<f64>,
    /// Objective and standard error of the final iterate on the shared
    /// evaluation batch.
    pub final_objective: f64,
    pub final_se: f64,
}

impl RuleRun {
    pub fn label(&self) -> String {
        self.rule.label()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    pub instance: ProblemInstance,
    pub runs: Vec<RuleRun>,
}

impl SuiteOutput {
    pub fn run(&self, rule: BatchRule) -> Option<&RuleRun> {
        self.runs.iter().find(|r| r.rule == rule)
    }

    /// `(label, trace)` pairs in rule order.
    pub fn labeled_traces(&self) -> Vec<(String, Vec<TraceRecord>)> {
        self.runs
            .iter()
            .map(|r| (r.label(), r.trace.clone()))
            .collect()
    }
}

/// Loads the configured instance file or generates one from the seed.
pub fn build_instance(cfg: &ExperimentConfig) -> Result<ProblemInstance> {
    if let Some(path) = &cfg.instance {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let instance: ProblemInstance = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            line: e.span().map_or(0, |s| line_of(&text, s.start)),
            message: e.message().to_string(),
        })?;
        if instance.kind() != cfg.problem {
            return Err(Error::config(
                "instance",
                format!(
                    "file holds a {} instance but problem = {}",
                    instance.kind().label(),
                    cfg.problem.label()
                ),
            ));
        }
        return Ok(instance);
    }
    generate_instance(
        cfg.problem,
        cfg,
        &mut RngStream::new(cfg.seed, INSTANCE_STREAM),
    )
}

pub fn generate_instance(
    kind: ProblemKind,
    cfg: &ExperimentConfig,
    rng: &mut RngStream,
) -> Result<ProblemInstance> {
    Ok(match kind {
        ProblemKind::Newsvendor => ProblemInstance::Newsvendor(generate_newsvendor_instance(
            cfg.dimension,
            &cfg.newsvendor,
            rng,
        )?),
        ProblemKind::Options => {
            ProblemInstance::Options(generate_options_instance(cfg.dimension, &cfg.options, rng)?)
        }
    })
}

/// Runs every configured rule on one shared instance and one shared
/// evaluator, each under the same budget and with its own scenario stream.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    cfg.validate()?;
    let instance = build_instance(cfg)?;
    let runs = run_rules(cfg, &instance)?;
    Ok(SuiteOutput { instance, runs })
}

/// Runs the configured rules against an existing instance.
pub fn run_rules(cfg: &ExperimentConfig, instance: &ProblemInstance) -> Result<Vec<RuleRun>> {
    let evaluator = McObjectiveEvaluator::new(
        instance,
        cfg.eval_sample_size,
        &mut RngStream::new(cfg.seed, EVAL_STREAM),
    )?;
    let settings = RunSettings {
        method: cfg.optimizer(),
        budget: cfg.budget(),
        cadence: cfg.cadence,
    };
    let one = |rule: BatchRule| {
        run_rule(cfg, instance, &evaluator, &settings, rule).map_err(|e| Error::Rule {
            label: rule.label(),
            source: Box::new(e),
        })
    };

    if !cfg.parallel {
        return cfg.rules.iter().map(|&r| one(r)).collect();
    }
    let workers = thread::available_parallelism().map_or(1, NonZeroUsize::get);
    let mut runs = Vec::with_capacity(cfg.rules.len());
    for chunk in cfg.rules.chunks(workers) {
        let results: Vec<Result<RuleRun>> = thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|&r| s.spawn(move || one(r))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("rule worker panicked"))
                .collect()
        });
        for r in results {
            runs.push(r?);
        }
    }
    Ok(runs)
}

fn run_rule(
    cfg: &ExperimentConfig,
    instance: &ProblemInstance,
    evaluator: &McObjectiveEvaluator<'_>,
    settings: &RunSettings,
    rule: BatchRule,
) -> Result<RuleRun> {
    let mut controller = SamplingController::new(rule, &cfg.sampling())?;
    let mut rng = RngStream::new(cfg.seed, rule_stream(rule));
    let run = run_optimization(
        instance,
        evaluator,
        instance.default_start(),
        &mut controller,
        settings,
        &mut rng,
    )?;
    let (final_objective, final_se) = evaluator.evaluate_with_se(&run.final_iterate)?;
    Ok(RuleRun {
        rule,
        trace: run.trace,
        final_iterate: run.final_iterate,
        final_objective,
        final_se,
    })
}

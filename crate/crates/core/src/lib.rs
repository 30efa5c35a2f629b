//! Projected mini-batch stochastic gradient descent with dynamic sample
//! sizes.
//!
//! The batch size of every iteration is chosen so that the negated batch
//! gradient is a descent direction with probability `1 - alpha` under a
//! normal approximation of the gradient estimate ([`sampling`]). The
//! optimizers ([`optim`]) are projected SGD with step `1/i` and projected
//! Adam. Two stochastic applications ship with the crate ([`problems`]): a
//! risk-averse multi-product newsvendor and a growth-optimal portfolio of
//! calls and puts. [`bench`] runs the fixed-versus-dynamic comparison and
//! writes trace files and SVG charts.
//!
//! ```
//! use dynbatch::numerics::RngStream;
//! use dynbatch::optim::{run_optimization, Budget, Method, RunSettings, SgdConfig, TraceCadence};
//! use dynbatch::problems::{generate_newsvendor_instance, McObjectiveEvaluator, NewsvendorParams, ProblemInstance};
//! use dynbatch::sampling::{BatchRule, SamplingConfig, SamplingController};
//!
//! let mut rng = RngStream::new(42, 0);
//! let spec = generate_newsvendor_instance(10, &NewsvendorParams::default(), &mut rng).unwrap();
//! let problem = ProblemInstance::Newsvendor(spec);
//! let evaluator = McObjectiveEvaluator::new(&problem, 10_000, &mut rng.substream(1)).unwrap();
//! let mut controller = SamplingController::new(BatchRule::PerDimensionMedian, &SamplingConfig::default()).unwrap();
//! let settings = RunSettings {
//!     method: Method::BasicSgd(SgdConfig::default()),
//!     budget: Budget::iterations(200),
//!     cadence: TraceCadence::EveryIteration,
//! };
//! let run = run_optimization(&problem, &evaluator, problem.default_start(), &mut controller, &settings, &mut rng.substream(2)).unwrap();
//! assert_eq!(run.trace.len(), 201);
//! assert!(run.trace.last().unwrap().objective > run.trace[0].objective);
//! ```

// Negated float comparisons are used on purpose: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod numerics;
pub mod optim;
pub mod problems;
pub mod sampling;

pub use error::{Error, Result};

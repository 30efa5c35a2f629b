use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack on the simplex budget below which a clipped point is
/// accepted as feasible. Keeps projection idempotent under rounding.
const CAP_SLACK: f64 = 1e-13;

/// Convex feasible set `X`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleRegion {
    /// `{x : x >= 0}`
    NonnegativeOrthant,
    /// `{x : x >= 0, Σx <= cap}`
    CappedSimplex { cap: f64 },
}

impl FeasibleRegion {
    pub fn capped_simplex(cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::Domain(format!("simplex cap {cap} must be positive")));
        }
        Ok(FeasibleRegion::CappedSimplex { cap })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let nonneg = x.iter().all(|&v| v >= 0.0 && v.is_finite());
        match *self {
            FeasibleRegion::NonnegativeOrthant => nonneg,
            FeasibleRegion::CappedSimplex { cap } => {
                nonneg && x.iter().sum::<f64>() <= cap * (1.0 + CAP_SLACK) + 1e-15
            }
        }
    }
}

/// Euclidean projection onto `region`.
pub fn project(region: &FeasibleRegion, v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    project_in_place(region, &mut out);
    out
}

pub(crate) fn project_in_place(region: &FeasibleRegion, v: &mut [f64]) {
    match *region {
        FeasibleRegion::NonnegativeOrthant => clip_negative(v),
        FeasibleRegion::CappedSimplex { cap } => {
            let clipped_sum: f64 = v.iter().map(|x| x.max(0.0)).sum();
            if clipped_sum <= cap * (1.0 + CAP_SLACK) {
                clip_negative(v);
                return;
            }
            let theta = simplex_threshold(v, cap);
            for x in v.iter_mut() {
                let shifted = *x - theta;
                *x = if shifted > 0.0 { shifted } else { 0.0 };
            }
        }
    }
}

fn clip_negative(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 || x.is_nan() {
            *x = 0.0;
        }
    }
}

/// Threshold `θ` with `Σ max(v - θ, 0) = cap`, found by sorting in
/// descending order. Assumes the positive part of `v` sums to more than
/// `cap`, so `θ > 0`.
fn simplex_threshold(v: &[f64], cap: f64) -> f64 {
    let mut sorted: Vec<f64> = v.iter().copied().filter(|x| *x > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - cap) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}

//! Trace files: one long CSV per run and wide whitespace-separated tables
//! with one column per rule, resampled onto a uniform grid.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::optim::TraceRecord;

/// Number of rows in a wide table.
pub const GRID_POINTS: usize = 200;

pub const LONG_HEADER: &str = "iteration,cum_samples,wall_seconds,batch_size,objective";

/// Formats like C's `%.6g`.
pub fn format_g6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Long-format CSV of one trace. Floats use shortest round-trip formatting.
pub fn long_format(trace: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(LONG_HEADER);
    out.push('\n');
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration, r.cum_samples, r.wall_seconds, r.batch_size, r.objective
        );
    }
    out
}

/// Horizontal axis used to align traces in a wide table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Optimizer wall-clock seconds, column header `T`.
    Time,
    /// Cumulative gradient samples, column header `S`.
    Samples,
}

impl Axis {
    fn header(&self) -> &'static str {
        match self {
            Axis::Time => "T",
            Axis::Samples => "S",
        }
    }

    fn value(&self, r: &TraceRecord) -> f64 {
        match self {
            Axis::Time => r.wall_seconds,
            Axis::Samples => r.cum_samples as f64,
        }
    }
}

/// Wide table: a uniform grid of [`GRID_POINTS`] values over `[0, horizon]`
/// and, per label, the most recent objective at or before each grid value.
/// With no `horizon` the largest final axis value among the traces is used.
pub fn wide_format(
    traces: &[(String, Vec<TraceRecord>)],
    axis: Axis,
    horizon: Option<f64>,
) -> Result<String> {
    if traces.is_empty() || traces.iter().any(|(_, t)| t.is_empty()) {
        return Err(Error::Domain("cannot tabulate an empty trace list".into()));
    }
    let horizon = horizon.unwrap_or_else(|| {
        traces
            .iter()
            .filter_map(|(_, t)| t.last().map(|r| axis.value(r)))
            .fold(0.0, f64::max)
    });
    let mut out = String::new();
    out.push_str(axis.header());
    for (label, _) in traces {
        out.push(' ');
        out.push_str(label);
    }
    out.push('\n');

    let mut cursors = vec![0usize; traces.len()];
    for k in 0..GRID_POINTS {
        let t = horizon * k as f64 / (GRID_POINTS - 1) as f64;
        out.push_str(&format_g6(t));
        for ((_, trace), cursor) in traces.iter().zip(cursors.iter_mut()) {
            while *cursor + 1 < trace.len() && axis.value(&trace[*cursor + 1]) <= t {
                *cursor += 1;
            }
            out.push(' ');
            out.push_str(&format_g6(trace[*cursor].objective));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Paths written by [`emit_traces`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmittedFiles {
    pub wide_time: PathBuf,
    pub wide_samples: PathBuf,
    pub long: Vec<PathBuf>,
}

/// Writes `<stem>.dat` (time axis), `<stem>_samples.dat` (sample axis) and
/// one `<stem>_<label>.csv` per trace into `output_dir`.
pub fn emit_traces(
    traces: &[(String, Vec<TraceRecord>)],
    stem: &str,
    time_horizon: Option<f64>,
    output_dir: &Path,
) -> Result<EmittedFiles> {
    let wide_time_text = wide_format(traces, Axis::Time, time_horizon)?;
    let wide_samples_text = wide_format(traces, Axis::Samples, None)?;
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;

    let write = |name: String, text: &str| -> Result<PathBuf> {
        let path = output_dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    };
    let wide_time = write(format!("{stem}.dat"), &wide_time_text)?;
    let wide_samples = write(format!("{stem}_samples.dat"), &wide_samples_text)?;
    let long = traces
        .iter()
        .map(|(label, trace)| write(format!("{stem}_{label}.csv"), &long_format(trace)))
        .collect::<Result<_>>()?;
    Ok(EmittedFiles {
        wide_time,
        wide_samples,
        long,
    })
}

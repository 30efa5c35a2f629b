//! Wide trace tables and SVG charts from hand-made traces.
//!
//! Usage: `cargo run --example plot_traces [output.svg]`

use std::path::{Path, PathBuf};

use dynbatch::bench::{render_svg, wide_format, Axis, WideTable};
use dynbatch::optim::TraceRecord;

fn trace(rate: f64, batch: usize) -> Vec<TraceRecord> {
    (0..=50)
        .map(|i| TraceRecord {
            iteration: i,
            cum_samples: (i * batch) as u64,
            wall_seconds: i as f64 * 0.02,
            batch_size: batch,
            objective: -(-(rate * i as f64)).exp(),
        })
        .collect()
}

fn main() -> dynbatch::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("traces.svg"));
    let traces = vec![
        ("fast".to_string(), trace(0.15, 32)),
        ("slow".to_string(), trace(0.05, 256)),
    ];
    let text = wide_format(&traces, Axis::Time, Some(1.0))?;
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    let table = WideTable::parse(&text, Path::new("memory"))?;
    let svg = render_svg(&table, "Two synthetic traces");
    std::fs::write(&out, svg).map_err(|e| dynbatch::Error::io(&out, e))?;
    println!("wrote {}", out.display());
    Ok(())
}

//! Static SVG convergence charts from wide trace tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A parsed wide table: the first column is the x axis, every other column
/// is one series.
#[derive(Clone, Debug, PartialEq)]
pub struct WideTable {
    pub x_label: String,
    pub labels: Vec<String>,
    pub x: Vec<f64>,
    /// `series[k][row]`
    pub series: Vec<Vec<f64>>,
}

impl WideTable {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header row".into()))?;
        let mut names = header.split_whitespace().map(str::to_string);
        let x_label = names.next().expect("non-empty header");
        let labels: Vec<String> = names.collect();
        let mut x = Vec::new();
        let mut series = vec![Vec::new(); labels.len()];
        for (line_no, line) in lines {
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| err(line_no, format!("`{tok}` is not a number")))
                })
                .collect::<Result<_>>()?;
            if values.len() != labels.len() + 1 {
                return Err(err(
                    line_no,
                    format!(
                        "expected {} columns, found {}",
                        labels.len() + 1,
                        values.len()
                    ),
                ));
            }
            x.push(values[0]);
            for (s, v) in series.iter_mut().zip(&values[1..]) {
                s.push(*v);
            }
        }
        if x.is_empty() {
            return Err(err(1, "table has no data rows".into()));
        }
        Ok(Self {
            x_label,
            labels,
            x,
            series,
        })
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn series_color(label: &str, index: usize) -> &'static str {
    const CYCLE: [&str; 6] = [
        "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
    ];
    match label {
        "PD" => "blue",
        "1D" => "cyan",
        "32" => "black",
        "256" => "gray",
        "512" => "lightgray",
        _ => CYCLE[index % CYCLE.len()],
    }
}

/// About five round tick values covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn axis_label(x_label: &str) -> &str {
    match x_label {
        "T" => "Time (s)",
        "S" => "Gradient samples",
        other => other,
    }
}

/// Renders the table as an SVG document. Output depends only on the input.
pub fn render_svg(table: &WideTable, title: &str) -> String {
    let (x_lo, x_hi) = bounds(&table.x);
    let all: Vec<f64> = table.series.iter().flatten().copied().collect();
    let (mut y_lo, mut y_hi) = bounds(&all);
    let pad = 0.05 * (y_hi - y_lo).max(1e-12);
    y_lo -= pad;
    y_hi += pad;
    let x_span = (x_hi - x_lo).max(1e-12);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / x_span * plot_w;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(x_lo, x_hi) {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            super::emit::format_g6(t)
        );
    }
    for t in nice_ticks(y_lo, y_hi) {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            super::emit::format_g6(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(axis_label(&table.x_label))
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">Expected Utility</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (k, (label, ys)) in table.labels.iter().zip(&table.series).enumerate() {
        let color = series_color(label, k);
        let points: Vec<String> = table
            .x
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v
        .iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Reads a wide table and writes its chart to `output`.
pub fn emit_plot(data: &Path, output: &Path, title: &str) -> Result<()> {
    let text = fs::read_to_string(data).map_err(|e| Error::io(data, e))?;
    let table = WideTable::parse(&text, data)?;
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(output, render_svg(&table, title)).map_err(|e| Error::io(output, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "T PD 1D\n0 -1 -1\n1 -0.5 -0.75\n2 -0.25 -0.5\n";

    #[test]
    fn parses_wide_table() {
        let t = WideTable::parse(SAMPLE, Path::new("x.dat")).unwrap();
        assert_eq!(t.x_label, "T");
        assert_eq!(t.labels, vec!["PD", "1D"]);
        assert_eq!(t.x, vec![0.0, 1.0, 2.0]);
        assert_eq!(t.series[1], vec![-1.0, -0.75, -0.5]);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let bad = "T PD\n0 1\n1 x\n";
        match WideTable::parse(bad, Path::new("x.dat")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match WideTable::parse("T PD\n0 1 2\n", Path::new("x.dat")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(WideTable::parse("", Path::new("x.dat")).is_err());
        assert!(WideTable::parse("T PD\n", Path::new("x.dat")).is_err());
    }

    #[test]
    fn one_polyline_per_series() {
        let t = WideTable::parse(SAMPLE, Path::new("x.dat")).unwrap();
        let svg = render_svg(&t, "Newsvendor problem using basic SGD");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Time (s)") && svg.contains("Expected Utility"));
        assert!(svg.contains(">PD<") && svg.contains(">1D<"));
        assert_eq!(svg, render_svg(&t, "Newsvendor problem using basic SGD"));
    }

    #[test]
    fn single_series_chart() {
        let t = WideTable::parse("T 32\n0 -1\n1 -0.9\n", Path::new("x.dat")).unwrap();
        assert_eq!(render_svg(&t, "x").matches("<polyline").count(), 1);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(nice_ticks(0.0, 20.0), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(nice_ticks(1.0, 1.0), vec![1.0]);
    }
}

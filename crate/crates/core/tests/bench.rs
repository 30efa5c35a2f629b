use std::fs;
use std::path::Path;
use std::process::Command;

use dynbatch::bench::{
    emit_plot, emit_traces, format_g6, long_format, parse_config, render_svg, run_suite,
    wide_format, Axis, ExperimentConfig, MethodKind, WideTable, GRID_POINTS, LONG_HEADER,
};
use dynbatch::optim::{TraceCadence, TraceRecord};
use dynbatch::problems::ProblemKind;
use dynbatch::sampling::BatchRule;
use dynbatch::Error;

fn small(problem: ProblemKind, method: MethodKind) -> ExperimentConfig {
    ExperimentConfig {
        problem,
        method,
        dimension: 6,
        max_iterations: Some(150),
        eval_sample_size: 2000,
        seed: 21,
        cadence: TraceCadence::Geometric {
            dense: 20,
            ratio: 1.2,
        },
        ..ExperimentConfig::default()
    }
}

fn strip_clock(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(2);
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn config_defaults_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("minimal.toml");
    fs::write(&path, "problem = \"options\"\n").unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!(cfg.alpha, 0.05);
    assert_eq!(cfg.n0, 32);
    assert_eq!(cfg.options.rate, 0.01);
    assert_eq!(cfg.rules.len(), 5);
    assert_eq!(cfg.budget().max_seconds, Some(30.0));

    fs::write(&path, "alpha = 0.7\n").unwrap();
    let msg = parse_config(&path).unwrap_err().to_string();
    assert!(msg.contains("alpha") && msg.contains("(0, 0.5)"), "{msg}");

    fs::write(&path, "seed = 1\n\nbogus_key = 3\n").unwrap();
    match parse_config(&path).unwrap_err() {
        Error::Parse { line, message, .. } => {
            assert_eq!(line, 3);
            assert!(message.contains("bogus_key"), "{message}");
        }
        other => panic!("unexpected {other}"),
    }

    fs::write(&path, "rules = [32, 256, 512, \"PD\", \"1D\"]\n").unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!(
        cfg.rules,
        vec![
            BatchRule::Fixed(32),
            BatchRule::Fixed(256),
            BatchRule::Fixed(512),
            BatchRule::PerDimensionMedian,
            BatchRule::SingleUpdate
        ]
    );
    assert!(parse_config(dir.path().join("missing.toml")).is_err());
}

#[test]
fn config_roundtrips_through_toml() {
    let cfg = small(ProblemKind::Options, MethodKind::Adam);
    let text = cfg.to_toml_string().unwrap();
    let back = ExperimentConfig::from_toml_str(&text, Path::new("x.toml")).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn suite_runs_every_rule_on_a_shared_instance() {
    for (problem, method) in [
        (ProblemKind::Newsvendor, MethodKind::Sgd),
        (ProblemKind::Options, MethodKind::Adam),
    ] {
        let cfg = small(problem, method);
        let suite = run_suite(&cfg).unwrap();
        let labels: Vec<String> = suite.runs.iter().map(|r| r.label()).collect();
        assert_eq!(labels, ["PD", "1D", "32", "256", "512"]);
        let start = suite.runs[0].trace[0].objective;
        for r in &suite.runs {
            assert_eq!(r.trace[0].objective, start, "shared evaluator at the start");
            assert_eq!(r.trace.last().unwrap().iteration, 150);
            if let BatchRule::Fixed(n) = r.rule {
                assert!(r.trace.iter().all(|t| t.batch_size == n));
            } else {
                assert!(r.trace.iter().all(|t| (4..=8192).contains(&t.batch_size)));
            }
            for w in r.trace.windows(2) {
                assert!(w[1].cum_samples >= w[0].cum_samples);
                assert!(w[1].wall_seconds >= w[0].wall_seconds);
            }
            assert!(r.final_se > 0.0);
        }
        if problem == ProblemKind::Newsvendor {
            assert!(suite
                .runs
                .iter()
                .flat_map(|r| &r.trace)
                .all(|t| t.objective < 0.0));
        }
    }
}

#[test]
fn suites_are_deterministic_except_for_the_clock() {
    let cfg = small(ProblemKind::Options, MethodKind::Sgd);
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&ExperimentConfig {
        parallel: true,
        ..cfg
    })
    .unwrap();
    for (ra, rb) in a.runs.iter().zip(&b.runs) {
        assert_eq!(
            strip_clock(&long_format(&ra.trace)),
            strip_clock(&long_format(&rb.trace))
        );
        assert_eq!(ra.final_iterate, rb.final_iterate);
    }
}

fn record(iteration: usize, t: f64, objective: f64) -> TraceRecord {
    TraceRecord {
        iteration,
        cum_samples: 10 * iteration as u64,
        wall_seconds: t,
        batch_size: 10,
        objective,
    }
}

#[test]
fn wide_table_carries_last_observation_forward() {
    let traces = vec![
        (
            "A".to_string(),
            vec![
                record(0, 0.0, 1.0),
                record(1, 0.5, 2.0),
                record(2, 1.5, 3.0),
            ],
        ),
        ("B".to_string(), vec![record(0, 0.0, -1.0)]),
    ];
    let text = wide_format(&traces, Axis::Time, Some(2.0)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "T A B");
    assert_eq!(lines.len(), GRID_POINTS + 1);
    let mut prev = -1.0;
    for line in &lines[1..] {
        let cells: Vec<f64> = line.split(' ').map(|c| c.parse().unwrap()).collect();
        assert!(cells[0] > prev);
        prev = cells[0];
        let expected = if cells[0] >= 1.5 {
            3.0
        } else if cells[0] >= 0.5 {
            2.0
        } else {
            1.0
        };
        assert_eq!(cells[1], expected, "at T = {}", cells[0]);
        assert_eq!(cells[2], -1.0);
    }
    assert!(wide_format(&[], Axis::Time, None).is_err());

    let samples = wide_format(&traces, Axis::Samples, None).unwrap();
    assert!(samples.starts_with("S A B\n"));
}

#[test]
fn six_significant_digits() {
    assert_eq!(format_g6(0.0), "0");
    assert_eq!(format_g6(-0.7165316), "-0.716532");
    assert_eq!(format_g6(1234567.0), "1.23457e+06");
    assert_eq!(format_g6(2.5), "2.5");
    assert_eq!(format_g6(1e-5), "1e-05");
}

#[test]
fn emitted_files_are_stable() {
    let cfg = small(ProblemKind::Newsvendor, MethodKind::Sgd);
    let suite = run_suite(&cfg).unwrap();
    let traces = suite.labeled_traces();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_traces(&traces, &cfg.stem(), None, dir.path()).unwrap();
    let wide = fs::read_to_string(&files.wide_time).unwrap();
    assert!(wide.starts_with("T PD 1D 32 256 512\n"));
    assert_eq!(files.long.len(), 5);
    let long = fs::read_to_string(&files.long[0]).unwrap();
    assert!(long.starts_with(LONG_HEADER));
    assert_eq!(long.lines().count(), traces[0].1.len() + 1);

    let before: Vec<Vec<u8>> = [&files.wide_time, &files.wide_samples]
        .into_iter()
        .chain(&files.long)
        .map(|p| fs::read(p).unwrap())
        .collect();
    let again = emit_traces(&traces, &cfg.stem(), None, dir.path()).unwrap();
    let after: Vec<Vec<u8>> = [&again.wide_time, &again.wide_samples]
        .into_iter()
        .chain(&again.long)
        .map(|p| fs::read(p).unwrap())
        .collect();
    assert_eq!(before, after);

    let svg = dir.path().join("chart.svg");
    emit_plot(&files.wide_time, &svg, "Newsvendor problem using basic SGD").unwrap();
    let first = fs::read(&svg).unwrap();
    emit_plot(&files.wide_time, &svg, "Newsvendor problem using basic SGD").unwrap();
    assert_eq!(first, fs::read(&svg).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("Time (s)") && text.contains("Expected Utility"));
    assert_eq!(text.matches("<polyline").count(), 5);

    let unwritable = dir.path().join("file-not-dir");
    fs::write(&unwritable, "").unwrap();
    assert!(emit_traces(&traces, "x", None, &unwritable).is_err());
}

#[test]
fn plot_accepts_single_column_and_reports_bad_lines() {
    let table = WideTable::parse("T PD\n0 1\n1 2\n", Path::new("a.dat")).unwrap();
    let svg = render_svg(&table, "one");
    assert_eq!(svg.matches("<polyline").count(), 1);

    match WideTable::parse("T PD 1D\n0 1 2\n1 x 3\n", Path::new("b.dat")).unwrap_err() {
        Error::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("unexpected {other}"),
    }
    assert!(WideTable::parse("T PD\n0 1 2\n", Path::new("c.dat")).is_err());
    assert!(WideTable::parse("", Path::new("d.dat")).is_err());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynbatch"))
}

#[test]
fn cli_generate_run_plot() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.toml");
    let status = cli()
        .args([
            "generate",
            "--problem",
            "newsvendor",
            "--dimension",
            "5",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&instance)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(fs::read_to_string(&instance)
        .unwrap()
        .contains("kind = \"newsvendor\""));

    let config = dir.path().join("exp.toml");
    fs::write(
        &config,
        "problem = \"newsvendor\"\nmax_iterations = 50\neval_sample_size = 1000\nrules = [\"PD\", 32]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("results");
    let run = |dir: &Path| {
        cli()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--instance")
            .arg(&instance)
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap()
    };
    let out = run(&out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "newsvendor_sgd.dat",
        "newsvendor_sgd_samples.dat",
        "newsvendor_sgd_PD.csv",
        "newsvendor_sgd_32.csv",
        "newsvendor_sgd.svg",
    ] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let header = fs::read_to_string(out_dir.join("newsvendor_sgd.dat")).unwrap();
    assert!(header.starts_with("T PD 32\n"));

    let second = dir.path().join("again");
    assert!(run(&second).status.success());
    for name in ["newsvendor_sgd_PD.csv", "newsvendor_sgd_32.csv"] {
        let a = fs::read_to_string(out_dir.join(name)).unwrap();
        let b = fs::read_to_string(second.join(name)).unwrap();
        assert_eq!(strip_clock(&a), strip_clock(&b));
    }

    let svg = dir.path().join("replot.svg");
    let status = cli()
        .arg("plot")
        .arg(out_dir.join("newsvendor_sgd.dat"))
        .arg("--out")
        .arg(&svg)
        .args(["--title", "Replot"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(fs::read_to_string(&svg).unwrap().contains("Replot"));

    let bad = cli()
        .args(["run", "--alpha", "0.7", "--max-iterations", "5"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("(0, 0.5)"));
}

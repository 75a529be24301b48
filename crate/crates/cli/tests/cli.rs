use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use lgl_cli::commands::load_tilings;
use lgl_cli::StatReport;
use lgl_core::gue::GueCornersSample;
use lgl_core::sampler::enumerate_tilings;
use lgl_core::trapezoid::{extract_boundary_array, InterlacingArray, TrapezoidFrame};
use lgl_core::{BoundaryHeightFunction, Domain};

fn lgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgl")).args(args).env_remove("LGL_THREADS").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = lgl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn run_in(dir: &Path, threads: &str, args: &[&str]) {
    let mut full = args.to_vec();
    full.extend(["--threads", threads, "--out", dir.to_str().unwrap()]);
    let out = lgl(&full);
    // exit code 2 means checks failed, which small runs may do
    assert!(matches!(out.status.code(), Some(0 | 2)), "{full:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn same_files(a: &Path, b: &Path) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?} differs");
    }
}

/// Weights `C(n+j-1, j) C(2n-j-1, n-j)` of the beta-binomial `(n, n, n)` law.
fn beta_binomial_weights(n: u64) -> Vec<u64> {
    let c = |a: u64, b: u64| (0..b).fold(1u64, |acc, i| acc * (a - i) / (i + 1));
    (0..=n).map(|j| c(n + j - 1, j) * c(2 * n - j - 1, n - j)).collect()
}

#[test]
fn first_line_of_small_hexagons_is_beta_binomial() {
    for n in 1..=3u32 {
        let d = Arc::new(Domain::hexagon(n, n, n).unwrap());
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0).unwrap();
        let frame = TrapezoidFrame::hexagon_left(n, n, n);
        let tilings = enumerate_tilings(&d, &b).unwrap();
        let mut counts = vec![0u64; n as usize + 1];
        for t in &tilings {
            counts[extract_boundary_array(t, &frame).unwrap().get(1, 1) as usize] += 1;
        }
        let w = beta_binomial_weights(u64::from(n));
        let (total, wsum) = (tilings.len() as u64, w.iter().sum::<u64>());
        for j in 0..=n as usize {
            assert_eq!(counts[j] * wsum, w[j] * total, "n = {n}: {counts:?} vs {w:?}");
        }
    }
}

/// Variance of `y_1^1 / sqrt(n)` computed from the beta-binomial weights.
fn first_line_variance(n: u32) -> f64 {
    let mut w = vec![1.0f64];
    // ratio of consecutive weights C(n+j-1, j) C(2n-j-1, n-j)
    for j in 1..=n {
        let (j, n) = (f64::from(j), f64::from(n));
        w.push(w[w.len() - 1] * (n + j - 1.0) / j * (n - j + 1.0) / (2.0 * n - j));
    }
    let total: f64 = w.iter().sum();
    let mean: f64 = w.iter().enumerate().map(|(j, p)| j as f64 * p).sum::<f64>() / total;
    let m2: f64 = w.iter().enumerate().map(|(j, p)| (j as f64).powi(2) * p).sum::<f64>() / total;
    assert!((mean - f64::from(n) / 2.0).abs() < 1e-9 * f64::from(n));
    (m2 - mean * mean) / f64::from(n)
}

#[test]
fn exact_first_line_variance_approaches_three_eighths() {
    let mut gap = f64::INFINITY;
    for n in 1..=60u32 {
        let v = first_line_variance(n);
        let closed = 3.0 * f64::from(n) / (4.0 * (2.0 * f64::from(n) + 1.0));
        assert!((v - closed).abs() < 1e-9, "n = {n}: {v} vs {closed}");
        let g = (v - 0.375).abs();
        assert!(g < gap, "n = {n}");
        gap = g;
    }
    assert!(gap < 0.0031);
}

/// Sampled version of the previous test on N = 10, 20, 40. The gaps to 3/8
/// (0.018, 0.009, 0.005) sit below the standard error of a sample variance
/// at a few thousand samples, so the ordering is not reliably observable.
#[test]
#[ignore = "takes tens of minutes and cannot resolve the trend at this sample size"]
fn sampled_first_line_variance_approaches_three_eighths() {
    use lgl_cli::config::Center;
    use lgl_cli::experiments::{hexagon_gue, GueComparison};
    let threads = std::thread::available_parallelism().map_or(1, usize::from);
    let cmp = GueComparison { seed: 11, samples: 2000, levels: 1, center: Center::Theoretical, gue_samples: 2000, threads };
    let gaps: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| {
            let run = hexagon_gue(n, &cmp, serde_json::Value::Null).unwrap();
            (run.report.quantity("y_1^1 [theoretical]").unwrap().variance - 0.375).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["sample", "--size", "4", "--samples", "6", "--svg", "--seed", "3"],
        &["gue", "--size", "3", "--samples", "300", "--seed", "3"],
        &["hexagon-gue", "--size", "4", "--samples", "40", "--gue-samples", "500", "--seed", "3"],
        &["trapezoid-gue", "--lambda", "0,2,5,6", "--samples", "40", "--gue-samples", "500", "--seed", "3"],
        &["concentration", "--sizes", "3,4", "--samples", "40", "--seed", "3"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let (a, b) = (tmp.path().join(format!("{i}a")), tmp.path().join(format!("{i}b")));
        run_in(&a, "1", args);
        run_in(&b, "3", args);
        same_files(&a, &b);
    }
}

#[test]
fn written_artifacts_reload_and_validate() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |s: &str| tmp.path().join(s);
    run_in(&p("hex"), "2", &["hexagon-gue", "--size", "5", "--samples", "30", "--gue-samples", "300"]);
    let arrays = fs::read_to_string(p("hex/arrays.jsonl")).unwrap();
    assert_eq!(arrays.lines().count(), 30);
    for line in arrays.lines() {
        let a = InterlacingArray::from_json_line(line).unwrap();
        assert_eq!(a.depth(), 3);
        assert_eq!(a.to_json_line(), line);
    }
    let report: StatReport = serde_json::from_str(&fs::read_to_string(p("hex/report.json")).unwrap()).unwrap();
    report.validate().unwrap();
    assert_eq!((report.samples, report.reference_samples), (30, 300));
    assert_eq!(report.config["samples"], 30);
    assert!(report.quantity("y_1^1 [theoretical]").is_some() && report.quantity("y_1^1 [empirical]").is_some());

    run_in(&p("gue"), "1", &["gue", "--size", "4", "--samples", "50"]);
    let lines = fs::read_to_string(p("gue/samples.jsonl")).unwrap();
    for line in lines.lines() {
        let s: GueCornersSample = serde_json::from_str(line).unwrap();
        assert_eq!(s.depth(), 4);
    }
    assert!(serde_json::from_str::<GueCornersSample>(r#"{"rows":[[1.0],[1.0,2.0]]}"#).is_err());

    run_in(&p("tiles"), "1", &["sample", "--size", "3", "--samples", "4", "--svg"]);
    let text = fs::read_to_string(p("tiles/domain.txt")).unwrap();
    let d = Arc::new(Domain::from_text(&text).unwrap());
    assert_eq!(*d, Domain::hexagon(3, 3, 3).unwrap());
    assert_eq!(load_tilings(&d, &p("tiles/tilings.jsonl")).unwrap().len(), 4);
    assert!(fs::read_to_string(p("tiles/tiling.svg")).unwrap().starts_with("<?xml"));
    // a tiling of one region does not load on another
    assert!(load_tilings(&Arc::new(Domain::hexagon(3, 3, 2).unwrap()), &p("tiles/tilings.jsonl")).is_err());
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# small run\nsize = 3\nseed = 5\n").unwrap();
    let out = ok(&["enumerate", "--config", cfg.to_str().unwrap(), "--size", "2"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["count"], 20);
    assert_eq!(report["config"]["seed"], 5);
    assert_eq!(report["config"]["size"], 2);
    let out = ok(&["enumerate", "--config", cfg.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["count"], 980);

    fs::write(&cfg, "sise = 3\n").unwrap();
    assert_eq!(lgl(&["enumerate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn thread_count_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_lgl")).args(["enumerate", "--size", "1"]).env("LGL_THREADS", v).output().unwrap()
    };
    assert!(run("2").status.success());
    assert!(!run("many").status.success());
}

#[test]
fn sample_render_and_stdout() {
    let out = ok(&["sample", "--size", "2", "--samples", "3", "--seed", "9"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("t.jsonl");
    fs::write(&input, &text).unwrap();
    let svg = ok(&["render", "--size", "2", "--input", input.to_str().unwrap()]).stdout;
    let svg = String::from_utf8(svg).unwrap();
    assert_eq!(svg.matches("<polygon class=").count(), 12);
    assert!(!lgl(&["sample", "--svg"]).status.success());
}

#[test]
fn oracle_passes() {
    let out = ok(&["oracle", "--threads", "1"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 8);
    assert!(checks.iter().all(|c| c["failures"] == 0));
}

#[test]
fn frozen_trapezoid_cannot_be_standardised() {
    let out = lgl(&["trapezoid-gue", "--lambda", "0,1,2", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not positive"));
    assert!(!lgl(&["trapezoid-gue"]).status.success());
}

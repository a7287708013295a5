use std::path::Path;
use std::process::{Command, Output};

use sgqpt::harness::{read_stats_csv, read_summary, ExperimentConfig, Preset};

fn sgqpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgqpt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sgqpt(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn simulate_fit_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let stdout = ok(&[
        "simulate",
        "--preset",
        "noiseless-scaling",
        "--trials",
        "6",
        "--iterations",
        "2000",
        "--log-per-decade",
        "20",
        "--seed",
        "3",
        "--out",
        p(&run),
    ]);
    assert!(stdout.contains("beta ="), "{stdout}");
    for f in ["summary.json", "stats.csv", "traces.csv", "plot.svg"] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let summary = read_summary(&run.join("summary.json")).unwrap();
    assert_eq!(summary.master_seed, 3);
    assert_eq!(summary.trial_seeds.len(), 6);
    assert_eq!(summary.total_shots, 6 * 2 * 1000 * 2000);
    assert!(summary.fit.is_some());

    let fit = ok(&["fit", "--stats", p(&run.join("stats.csv"))]);
    let fit: serde_json::Value = serde_json::from_str(&fit).unwrap();
    assert!(fit["beta"].as_f64().unwrap() < 0.0);
    assert_eq!(fit["window"]["k_min"], 100);

    let base = dir.path().join("base");
    ok(&[
        "baseline",
        "--preset",
        "short-run",
        "--trials",
        "5",
        "--no-plot",
        "--out",
        p(&base),
    ]);
    let stats = read_stats_csv(&base.join("stats.csv")).unwrap();
    assert_eq!(stats.len(), 1);
    assert_eq!(stats.rows[0].iteration, 50);
    assert!(!base.join("plot.svg").exists());
    let s = read_summary(&base.join("summary.json")).unwrap();
    assert_eq!(s.total_shots, 5 * 2 * 100 * 50);

    let svg = dir.path().join("both.svg");
    let learn = format!("learner={}", p(&run.join("stats.csv")));
    let qpt = format!("qpt={}", p(&base.join("stats.csv")));
    ok(&["plot", "--input", &learn, "--input", &qpt, "--fit", "--out", p(&svg)]);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("learner") && text.contains("qpt"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        trials: 4,
        iterations: 20,
        ..ExperimentConfig::preset(Preset::ShortRun)
    };
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    let out = dir.path().join("o");
    ok(&[
        "simulate",
        "--config",
        p(&path),
        "--epsilon-deg",
        "3",
        "--no-plot",
        "--out",
        p(&out),
    ]);
    let s = read_summary(&out.join("summary.json")).unwrap();
    assert_eq!(s.config.trials, 4);
    assert_eq!(s.config.noise.epsilon_deg(), Some(3.0));
    assert_eq!(read_stats_csv(&out.join("stats.csv")).unwrap().len(), 20);
}

#[test]
fn rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let missing = dir.path().join("missing.csv");
    let svg = dir.path().join("x.svg");
    let bad: [&[&str]; 6] = [
        &["simulate", "--trials", "0", "--out", p(&out)],
        &["simulate", "--shots", "0", "--out", p(&out)],
        &["simulate", "--noise", "ideal", "--epsilon-deg", "2", "--out", p(&out)],
        &["baseline", "--preset", "short-run", "--photons", "10", "--out", p(&out)],
        &["fit", "--stats", p(&missing)],
        &["plot", "--input", "nolabel", "--out", p(&svg)],
    ];
    for args in bad {
        let o = sgqpt(args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }
    assert!(!out.exists());
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pareto-mcts"))
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn small_config(dir: &Path, samples: usize) -> PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        format!(
            "seed = 4\nenv = \"synth\"\n\n[synth]\nresolution = 20\n\n[planner]\nmethod = \"pareto\"\nbudget = 30\nrollout_depth = 2\n\n[mission]\nsamples = {samples}\n"
        ),
    )
    .unwrap();
    path
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn run_writes_mission_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 40);
    let out = dir.path().join("run");
    let stdout = ok(bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(&out).output().unwrap());
    assert!(stdout.starts_with("40 samples in "), "{stdout}");
    for f in ["mission.csv", "samples.csv", "prediction_final.csv", "timing.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let mission = std::fs::read_to_string(out.join("mission.csv")).unwrap();
    assert!(mission.starts_with("#pareto-mcts-log v1\n"));
}

#[test]
fn run_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 30);
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        ok(bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(&out).args(extra).output().unwrap());
        std::fs::read(out.join("samples.csv")).unwrap()
    };
    let base = run("base", &[]);
    assert_eq!(base, run("same", &["--seed", "4", "--env", "synth:4"]));
    assert_ne!(base, run("other", &["--seed", "5"]));
}

#[test]
fn run_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 30);
    let out = dir.path().join("x");
    let missing = bin().args(["run", "--config", "no/such.toml", "--out"]).arg(&out).output().unwrap();
    assert!(!missing.status.success());
    let tiny = bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(&out).args(["--budget", "3"]).output().unwrap();
    assert!(!tiny.status.success());
    let env = bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(&out).args(["--env", "bogus"]).output().unwrap();
    assert!(!env.status.success());
}

#[test]
fn sweep_writes_one_directory_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 25);
    let out = dir.path().join("sweep");
    ok(bin()
        .arg("sweep")
        .arg("--config")
        .arg(&cfg)
        .args(["--seeds", "1..=3", "--jobs", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap());
    for s in 1..=3 {
        assert!(out.join(format!("seed_{s}")).join("mission.csv").is_file());
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 2 + 3);
    assert!(lines[2].starts_with("1,25,"));
    assert!(lines[4].starts_with("3,25,"));
}

#[test]
fn bandit_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let arms = dir.path().join("arms.csv");
    std::fs::write(&arms, "0.8,0.5\n0.5,0.8\n0.3,0.3\n").unwrap();
    let out = dir.path().join("trace.csv");
    let stdout = ok(bin()
        .arg("bandit")
        .arg("--arms")
        .arg(&arms)
        .args(["--horizon", "2000", "--trials", "3", "--seed", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap());
    assert!(stdout.contains("Pareto-optimal arms: [0, 1]"), "{stdout}");
    let share: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("arm 2: pull share "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(share < 0.2, "{share}");
    assert!(std::fs::metadata(&out).unwrap().len() > 0);

    let again = dir.path().join("again.csv");
    bin().arg("bandit").arg("--arms").arg(&arms).args(["--horizon", "2000", "--trials", "3", "--seed", "1", "--out"]).arg(&again).output().unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn shipped_config_parses_through_the_cli() {
    let out = bin().arg("run").arg("--config").arg(root().join("configs/synthetic_pareto.toml")).args(["--budget", "0", "--out", "/nonexistent"]).output().unwrap();
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!out.status.success());
    assert!(err.contains("budget"), "{err}");
}

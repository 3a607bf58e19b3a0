use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MAIN: &str = r#"{
  "coefficient": {"convention": "reciprocal", "spec": {"type": "trig", "mean": 2.0, "sin": [1.0]}},
  "rhs": {"type": "trig", "sin": [1.0], "period": 2.0},
  "monte_carlo": {"paths": 200, "dt": 1e-5, "t": 0.01}
}"#;

const UNIT: &str = r#"{
  "coefficient": {"spec": {"type": "constant", "value": 1.0}},
  "rhs": {"type": "constant", "value": 1.0},
  "eps": [0.125],
  "monte_carlo": {"paths": 4000, "dt": 1e-5, "t": 0.25, "x": 0.5, "seed": 3}
}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn homog1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homog1d")).args(args).output().unwrap()
}

fn run(verb: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![verb, config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    homog1d(&args)
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_with_unit_coefficient_matches_homogenized() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "unit.json", UNIT);
    let out = run("solve", &config, &dir.path().join("out"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/solve.csv")).unwrap();
    assert!(csv.starts_with("x,u_eps,u_hom\n"));
    let worst = rows(&dir.path().join("out/solve.csv"))
        .iter()
        .map(|r| (r[1].parse::<f64>().unwrap() - r[2].parse::<f64>().unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst}");
    let long = rows(&dir.path().join("out/solution.csv"));
    assert!(long.iter().any(|r| r[2] == "exact-formula") && long.iter().any(|r| r[2] == "homogenized"));
}

#[test]
fn fk_verify_with_unit_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "unit.json", UNIT);
    let out = run("fk-verify", &config, &dir.path().join("out"), &[]);
    assert!(out.status.success());
    let row = &rows(&dir.path().join("out/fk_verify.csv"))[0];
    let z: f64 = row[9].parse().unwrap();
    assert!(z.abs() <= 4.0, "{row:?}");
}

#[test]
fn converge_reports_rates_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "main.json", MAIN);
    let out_dir = dir.path().join("out");
    let out = run("converge", &config, &out_dir, &["--svg"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("corrector sign -"), "{stdout}");
    let summary = rows(&out_dir.join("convergence_summary.csv"));
    let rate = |v: &str| -> f64 { summary.iter().find(|r| r[0] == v).unwrap()[1].parse().unwrap() };
    assert!((rate("raw") - 1.0).abs() < 0.15);
    assert!(rate("corrected") >= 1.85);
    assert_eq!(rows(&out_dir.join("convergence.csv")).len(), 18);
    let svg = std::fs::read_to_string(out_dir.join("convergence.svg")).unwrap();
    assert_eq!(svg.matches("stroke-dasharray").count(), 3);
}

#[test]
fn empty_plot_is_an_error_without_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "exact.json",
        &UNIT.replace("\"eps\": [0.125]", "\"eps\": [0.125, 0.0625, 0.03125], \"variants\": [\"raw\"]"),
    );
    let out_dir = dir.path().join("out");
    let out = run("converge", &config, &out_dir, &["--svg"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out_dir.join("convergence.svg").exists());
    assert_eq!(rows(&out_dir.join("convergence_summary.csv"))[0][1], "exact");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let typo = write_config(dir.path(), "typo.json", &MAIN.replace("\"rhs\"", "\"rsh\""));
    let out = run("solve", &typo, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("typo.json:3:"));

    let main = write_config(dir.path(), "main.json", MAIN);
    let out = run("solve", &main, &out_dir, &["--eps", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps[0]"));

    assert_eq!(homog1d(&["explode", "main.json"]).status.code(), Some(2));

    let threads = Command::new(env!("CARGO_BIN_EXE_homog1d"))
        .args(["corrector", main.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
        .env("HOMOG1D_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
    assert!(!out_dir.exists());
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("solve", &dir.path().join("absent.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn numerical_preconditions_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let step = write_config(
        dir.path(),
        "step.json",
        r#"{
  "coefficient": {"spec": {"type": "piecewise_constant", "breakpoints": [0.0, 0.5, 1.0], "values": [1.0, 2.0]}},
  "rhs": {"type": "constant", "value": 1.0},
  "eps": [0.125]
}"#,
    );
    let out = run("fk-verify", &step, &dir.path().join("out"), &["--paths", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("derivative"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "main.json", MAIN);
    for out in ["a", "b"] {
        for verb in ["average", "corrector", "fk-verify", "cell-mass"] {
            let o = run(verb, &config, &dir.path().join(out), &["--seed", "9"]);
            assert!(o.status.success(), "{verb}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    for name in ["average.csv", "corrector.csv", "fk_verify.csv", "cell_mass.csv"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let seeded = rows(&dir.path().join("a/fk_verify.csv"))[0][5].clone();
    assert_eq!(seeded, "9");
}

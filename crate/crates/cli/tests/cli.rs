use std::path::Path;
use std::process::{Command, Output};

const SMALL: [&str; 10] = [
    "basis.modes_per_dim=4",
    "basis.quadrature_cells=32",
    "controller.horizon=5",
    "controller.ilqr.max_iters=2",
    "erasing.budget=6",
    "search.ground_budget=5",
    "search.aerial_budget=5",
    "q1.steps=5",
    "camera.n_u=6",
    "camera.n_v=4",
];

fn vergo(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vergo"))
        .args(args)
        .env("VERGO_OUTPUT_ROOT", root)
        .output()
        .expect("binary runs")
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(SMALL);
    v
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_under_suite_seed_method() {
    let dir = tempfile::tempdir().unwrap();
    let out = vergo(dir.path(), &with_small(&["run", "--suite", "erasing", "--seed", "7", "--method", "vec"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let trial = dir.path().join("erasing/seed7/vec");
    for f in ["config.toml", "trial.json", "steps.csv", "trajectory.csv"] {
        assert!(trial.join(f).is_file(), "missing {f}");
    }
    let rec: serde_json::Value = serde_json::from_slice(&std::fs::read(trial.join("trial.json")).unwrap()).unwrap();
    assert_eq!(rec["seed"], 7);
    assert_eq!(rec["method"], "vec");
}

#[test]
fn zero_horizon_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = vergo(dir.path(), &["run", "--suite", "erasing", "--controller.horizon=0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("controller.horizon"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_bad_files_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = vergo(dir.path(), &["run", "controller.horizn=3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("horizn"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\n[controller]\nhorizon = \"many\"\n").unwrap();
    let out = vergo(dir.path(), &["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("horizon"), "{}", stderr(&out));

    let out = vergo(dir.path(), &["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn baseline_differs_from_vec_only_in_method() {
    let dir = tempfile::tempdir().unwrap();
    for m in ["vec", "baseline"] {
        let out = vergo(dir.path(), &with_small(&["run", "--suite", "ground", "--seed", "3", "--method", m]));
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let read = |m: &str| std::fs::read_to_string(dir.path().join(format!("ground/seed3/{m}/config.toml"))).unwrap();
    let (v, b) = (read("vec"), read("baseline"));
    let diff: Vec<(&str, &str)> = v.lines().zip(b.lines()).filter(|(x, y)| x != y).collect();
    assert_eq!(v.lines().count(), b.lines().count());
    assert_eq!(diff, vec![("method = \"vec\"", "method = \"baseline\"")]);
}

#[test]
fn config_echo_reproduces_the_trial() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let out = vergo(&first, &with_small(&["run", "--suite", "aerial", "--seed", "2"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let echo = first.join("aerial/seed2/vec/config.toml");
    let second = dir.path().join("b");
    let out = vergo(&second, &["run", "--config", echo.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    for f in ["trial.json", "steps.csv", "trajectory.csv", "config.toml"] {
        assert_eq!(
            std::fs::read(first.join("aerial/seed2/vec").join(f)).unwrap(),
            std::fs::read(second.join("aerial/seed2/vec").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn bench_routes_each_suite() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["q1", "erasing", "aerial"] {
        let out = vergo(dir.path(), &with_small(&["bench", "--suite", suite, "--trials", "2"]));
        assert!(out.status.success(), "{suite}: {}", stderr(&out));
        let stdout = String::from_utf8_lossy(&out.stdout);
        let root = dir.path().join(suite);
        assert!(root.join("report.json").is_file());
        let summary = std::fs::read_to_string(root.join("summary.csv")).unwrap();
        if suite == "q1" {
            assert!(summary.starts_with("platform,method,trials,decreased"));
            assert_eq!(summary.lines().count(), 4);
            for p in ["double-integrator", "diff-drive", "quadcopter"] {
                assert!(root.join(format!("seed1/vec/{p}/steps.csv")).is_file());
            }
        } else {
            assert!(summary.contains("median_steps"));
            assert_eq!(summary.lines().count(), 3);
            assert!(stdout.contains("median steps vec/baseline"));
            for m in ["vec", "baseline"] {
                assert!(root.join(format!("seed0/{m}/trial.json")).is_file());
            }
        }
    }
}

#[test]
fn uniform_target_has_a_single_nonzero_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = vergo(
        dir.path(),
        &["coeffs", "--suite", "erasing", "--seed", "0", "erasing.target_shapes=[\"square\"]", "erasing.mask_fill=1.0", "erasing.mask_resolution=8"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1 nonzero"), "{}", String::from_utf8_lossy(&out.stdout));
    let table = std::fs::read_to_string(dir.path().join("erasing/seed0/coeffs/coefficients.csv")).unwrap();
    assert!(table.lines().count() > 2);
    assert!(dir.path().join("erasing/seed0/coeffs/reconstruction.csv").is_file());
}

#[test]
fn point_footprint_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = vergo(dir.path(), &["footprint", "--suite", "ground", "--method", "baseline", "--state", "0.4,0.5,0.1,0,0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().collect::<Vec<_>>(), vec!["x,y", "0.4,0.5"]);

    let out = vergo(dir.path(), &["footprint", "--suite", "ground", "--state", "0.4,0.5,0.1,0,0"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1001);

    let out = vergo(dir.path(), &["footprint", "--suite", "ground", "--state", "0.4,0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn camera_footprint_extent_doubles_with_altitude() {
    let dir = tempfile::tempdir().unwrap();
    let extent = |z: f64| {
        let state = format!("1,1,{z},0,0,0,0,0,0,0,0,0");
        let out = vergo(
            dir.path(),
            &["footprint", "--suite", "aerial", "--state", &state, "camera.tilt_deg=0.0", "search.aerial_space=[20.0,20.0]"],
        );
        assert!(out.status.success(), "{}", stderr(&out));
        let xs: Vec<f64> = String::from_utf8_lossy(&out.stdout)
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min)
    };
    assert!((extent(2.0) / extent(1.0) - 2.0).abs() < 1e-9);
}

#[test]
fn config_reference_lists_documented_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = vergo(dir.path(), &["config-reference"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("horizon = 20"));
    assert!(text.lines().any(|l| l.starts_with('#')));

    let file = dir.path().join("ref.toml");
    let out = vergo(dir.path(), &["config-reference", "-o", file.to_str().unwrap()]);
    assert!(out.status.success());
    let out = vergo(dir.path(), &with_small(&["run", "--suite", "erasing", "--config", file.to_str().unwrap()]));
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(vergo(dir.path(), &["run", "--suite", "underwater"]).status.code(), Some(1));
    assert_eq!(vergo(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(vergo(dir.path(), &["run", "--suite", "ground", "--platform", "quadcopter"]).status.code(), Some(1));
}

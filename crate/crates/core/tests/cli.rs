use std::path::Path;
use std::process::{Command, Output};

use fracwave::scenario_io::{preset, run_cli, ScenarioConfig, OUTPUT_FILES, PRESET_NAMES};

fn fracwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .args(args)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn unknown_preset_is_usage_error() {
    let out = fracwave(&["run", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("paper-fig1"), "{err}");
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(run_cli(["fracwave"]), 2);
    assert_eq!(run_cli(["fracwave", "run"]), 2);
    assert_eq!(
        run_cli([
            "fracwave",
            "run",
            "--preset",
            "free-sine",
            "--config",
            "x.toml"
        ]),
        2
    );
    assert_eq!(run_cli(["fracwave", "bogus"]), 2);
    assert_eq!(run_cli(["fracwave", "--help"]), 0);
}

#[test]
fn verify_free_sine_passes() {
    let out = fracwave(&["verify", "--preset", "free-sine"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("energy-monotone"));
    assert!(text.contains("weak-form"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_fig1_passes() {
    assert_eq!(
        fracwave(&["verify", "--preset", "paper-fig1"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(&[
        "run",
        "--preset",
        "paper-fig1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in OUTPUT_FILES {
        assert!(dir.path().join(name).is_file(), "{name}");
    }

    let energy = read(dir.path(), "energy.csv");
    let mut lines = energy.lines();
    assert_eq!(lines.next(), Some("t,E,kinetic,seminorm_sq"));
    assert_eq!(lines.count(), 1001);

    let snaps = read(dir.path(), "snapshots.csv");
    assert!(snaps.starts_with("t,x,u,v\n"));
    // Stride 10 over 1000 steps, 201 nodes each.
    assert_eq!(snaps.lines().count() - 1, 101 * 201);
    let first: Vec<f64> = snaps
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first, vec![0.0, 0.0, 1.2, 0.0]);

    let contacts = read(dir.path(), "contacts.csv");
    assert!(contacts.starts_with("t,j_min,j_max\n"));
    assert!(contacts.lines().count() > 2);

    let impacts: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "impacts.json")).unwrap();
    assert_eq!(impacts["impacts"].as_array().unwrap().len(), 1);
    assert!(impacts["t_bar"].as_f64().unwrap() <= 10.0);

    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "run_meta.json")).unwrap();
    assert_eq!(meta["experimental"], serde_json::Value::Bool(false));
    assert!((meta["tau"].as_f64().unwrap() - 0.01).abs() < 1e-15);
    assert!((meta["h"].as_f64().unwrap() - std::f64::consts::TAU / 200.0).abs() < 1e-15);
}

#[test]
fn run_is_deterministic() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let code = run_cli([
            "fracwave",
            "run",
            "--preset",
            "fractional-free",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    for name in OUTPUT_FILES {
        assert_eq!(
            std::fs::read(dirs[0].path().join(name)).unwrap(),
            std::fs::read(dirs[1].path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in PRESET_NAMES {
        let cfg = preset(name).unwrap();
        let text = cfg.to_toml_string();
        assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg, "{name}");
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, &text).unwrap();
        assert_eq!(ScenarioConfig::from_path(&path).unwrap(), cfg);
    }
}

#[test]
fn run_from_config_file_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("free.toml");
    let shown = fracwave(&["presets", "--show", "free-sine"]);
    assert_eq!(shown.status.code(), Some(0));
    std::fs::write(&cfg_path, &shown.stdout).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(
        run_cli([
            "fracwave",
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            a.to_str().unwrap()
        ]),
        0
    );
    assert_eq!(
        run_cli([
            "fracwave",
            "run",
            "--preset",
            "free-sine",
            "--out",
            b.to_str().unwrap()
        ]),
        0
    );
    for name in OUTPUT_FILES {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
}

#[test]
fn invalid_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("fractional-free").unwrap();
    cfg.bc.left = 0.5;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    let out = fracwave(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero exterior"));

    std::fs::write(&path, "n_cells = 10\nbogus = 1\n").unwrap();
    assert_eq!(
        fracwave(&["verify", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        fracwave(&["verify", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn convergence_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("free-sine").unwrap();
    cfg.n_cells = 20;
    cfg.n_steps = 40;
    let path = dir.path().join("c.toml");
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    let out = fracwave(&[
        "convergence",
        "--config",
        path.to_str().unwrap(),
        "--levels",
        "3",
        "--reference",
        "standing-wave",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("n_cells,n_steps,error_max"));
    assert_eq!(text.lines().count(), 4);
    let out = fracwave(&[
        "convergence",
        "--config",
        path.to_str().unwrap(),
        "--levels",
        "3",
    ]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}

#[test]
fn presets_listed() {
    let out = fracwave(&["presets"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in PRESET_NAMES {
        assert!(text.lines().any(|l| l == name));
    }
    assert_eq!(
        fracwave(&["presets", "--show", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn double_obstacle_demo_is_flagged_experimental() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(&[
        "run",
        "--preset",
        "double-obstacle-demo",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experimental"));
    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "run_meta.json")).unwrap();
    assert_eq!(meta["experimental"], serde_json::Value::Bool(true));
}

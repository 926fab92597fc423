use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL_GRID: &str = r#"
[grid]
rho = { lo = -1.0, hi = 1.0, steps = 3 }
gamma = { lo = 0.0, hi = 1.0, steps = 5 }
alpha1 = { lo = 0.0, hi = 1.2, steps = 5 }
alpha2 = { lo = 0.0, hi = 1.2, steps = 5 }
rho_u1s = { lo = -1.0, hi = 1.0, steps = 3 }
"#;

const BASELINE: &str = r#"
mode = "tradeoff"
theta = [0.0, 0.3, 0.6]
targets = 11

[power]
p1 = { db = 10.0 }
p2 = { db = 15.0 }
n2 = { db = 0.0 }
n3 = { db = 10.0 }
q = { db = 10.0 }
"#;

fn sdrcpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdrcpm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, format!("{body}{SMALL_GRID}")).unwrap();
    path.to_string_lossy().into_owned()
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    names
}

fn run_ok(args: &[&str]) {
    let out = sdrcpm(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn baseline_config_writes_three_curves_and_a_plot_script() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), BASELINE);
    let out = tmp.path().join("out");
    run_ok(&["--config", &config, "--out", out.to_str().unwrap()]);

    assert_eq!(
        csv_files(&out),
        [
            "errors.csv",
            "tradeoff_theta_0.3.csv",
            "tradeoff_theta_0.6.csv",
            "tradeoff_theta_0.csv"
        ]
    );
    let script = fs::read_to_string(out.join("tradeoff.gp")).unwrap();
    for theta in ["0", "0.3", "0.6"] {
        assert!(script.contains(&format!("'tradeoff_theta_{theta}.csv'")));
    }
    assert!(out.join("manifest.toml").exists());

    let (header, rows) = read_rows(&out.join("tradeoff_theta_0.csv"));
    assert_eq!(&header[..3], ["r12", "r13", "rho"]);
    assert_eq!(header.last().unwrap(), "feasible");
    assert!(!rows.is_empty());
    // Nine significant digits in scientific notation.
    for field in &rows[0][..header.len() - 1] {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 10, "{field}");
    }
}

#[test]
fn power_set_one_gives_one_curve() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "mode = \"tradeoff\"\ntheta = [0.0]\ntargets = 6\n",
    );
    let out = tmp.path().join("out");
    run_ok(&[
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--n2-db",
        "10",
        "--n3-db",
        "10",
        "--p1-db",
        "20",
        "--q-db",
        "10",
        "--p2-db",
        "25",
    ]);
    assert_eq!(csv_files(&out), ["errors.csv", "tradeoff_theta_0.csv"]);
    let (_, rows) = read_rows(&out.join("tradeoff_theta_0.csv"));
    assert_eq!(rows.len(), 6);
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("[power.p2]\ndb = 25.0"));
}

#[test]
fn empty_theta_is_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &BASELINE.replace("[0.0, 0.3, 0.6]", "[]"));
    let out = tmp.path().join("out");
    let result = sdrcpm(&["--config", &config, "--out", out.to_str().unwrap()]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("theta"));
    assert!(!out.exists());
}

#[test]
fn missing_power_is_reported_by_field() {
    let tmp = TempDir::new().unwrap();
    let result = sdrcpm(&[
        "--mode",
        "sdrc",
        "--p1-db",
        "10",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("power.p2"));
}

#[test]
fn flags_override_file_values() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), BASELINE);
    let out = tmp.path().join("out");
    run_ok(&[
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--theta",
        "0.5",
        "--p2-linear",
        "40",
    ]);
    assert_eq!(csv_files(&out), ["errors.csv", "tradeoff_theta_0.5.csv"]);
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("[power.p2]\nlinear = 40.0"));
}

#[test]
fn manifest_reproduces_identical_csvs() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), BASELINE);
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    run_ok(&[
        "--config",
        &config,
        "--out",
        first.to_str().unwrap(),
        "--workers",
        "1",
    ]);
    let manifest = first.join("manifest.toml");
    run_ok(&[
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
        "--workers",
        "4",
    ]);
    let names = csv_files(&first);
    assert_eq!(names, csv_files(&second));
    for name in names {
        assert_eq!(
            fs::read(first.join(&name)).unwrap(),
            fs::read(second.join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn dm_modes_write_their_tables() {
    let tmp = TempDir::new().unwrap();
    for (mode, file, rows) in [
        ("dm-theorem1", "dm_theorem1.csv", 3),
        ("dm-theorem2", "dm_theorem2.csv", 3),
        ("reductions", "reductions.csv", 21),
    ] {
        let out = tmp.path().join(mode);
        let config = tmp.path().join(format!("{mode}.toml"));
        fs::write(
            &config,
            format!("mode = \"{mode}\"\nseed = 4\n[dm]\ninstances = 3\n"),
        )
        .unwrap();
        run_ok(&[
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        let (header, body) = read_rows(&out.join(file));
        assert_eq!(body.len(), rows, "{mode}");
        if mode == "dm-theorem2" {
            let col = header.iter().position(|h| h == "contained").unwrap();
            assert!(body.iter().all(|r| r[col] == "true"));
        }
        if mode == "reductions" {
            let col = header.iter().position(|h| h == "max_abs_diff").unwrap();
            assert!(body.iter().all(|r| r[col].parse::<f64>().unwrap() < 1e-9));
        }
    }
}

#[test]
fn malformed_dm_tables_land_in_the_errors_csv() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let config = tmp.path().join("bad.toml");
    let body = "mode = \"dm-theorem1\"\n[dm]\nsymbols = 1\n[dm.tables]\n\
                state = [1.0]\nk2 = [1.0]\nq2 = [1.0]\nx2 = [1.0]\nt = [1.0]\n\
                x1 = [1.0]\nchannel = [0.5]\nyhat2 = [1.0]\n";
    fs::write(&config, body).unwrap();
    run_ok(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let (_, rows) = read_rows(&out.join("dm_theorem1.csv"));
    assert!(rows.is_empty());
    let (_, errors) = read_rows(&out.join("errors.csv"));
    assert_eq!(errors.len(), 1);
    assert!(errors[0][3].contains("channel"), "{:?}", errors[0]);
}

#[test]
fn region_sweep_splits_results_and_failures() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &BASELINE.replace("\"tradeoff\"", "\"gaussian-region\""),
    );
    let out = tmp.path().join("out");
    run_ok(&[
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--theta",
        "0.3",
    ]);
    let (header, rows) = read_rows(&out.join("region.csv"));
    let expected = [
        "rho", "gamma", "alpha1", "alpha2", "rho_u1s", "theta", "beta", "f", "nhat", "r13_max",
        "r12_max", "sum_max", "r23_max", "feasible",
    ];
    assert_eq!(header, expected);
    let (_, errors) = read_rows(&out.join("errors.csv"));
    assert_eq!(rows.len() + errors.len(), 3 * 5 * 5 * 5 * 3 * 3 * 3);
}

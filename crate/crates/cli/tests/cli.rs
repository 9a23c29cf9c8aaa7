use std::fs;
use std::path::Path;
use std::process::Command;

use tripartite_cli::config::{ConfigError, RawConfig};
use tripartite_cli::output::read_series;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tripartite"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("sweep.toml");
    fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"
alpha_sq = 4.0
chi_over_lambda = 5.0
kappa_values = [0.0, 0.01]
total_steps = 3500
burn_in_steps = 500
"#;

#[test]
fn missing_kappa_values_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "alpha_sq = 25.0\n");
    let out = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa_values"));
}

#[test]
fn out_of_range_kappa_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kappa_values = [0.1, 1.5]\n");
    let out = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let raw = RawConfig::from_toml("kappa_values = [1.5]").unwrap();
    assert!(matches!(raw.validate(), Err(ConfigError::Invalid { field: "kappa_values", .. })));
}

#[test]
fn malformed_config_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kappa_values = [0.1,\n");
    let out = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let unknown = write_config(dir.path(), "kappa_values = [0.1]\ncolour = 3\n");
    assert_eq!(bin().args(["sweep", "--config"]).arg(&unknown).output().unwrap().status.code(), Some(2));
}

#[test]
fn other_invariants_name_their_field() {
    for (body, field) in [
        ("kappa_values = [0.1]\ntotal_steps = 100\nburn_in_steps = 200", "total_steps"),
        ("kappa_values = [0.2, 0.1]", "kappa_values"),
        ("kappa_values = [0.1]\ntarget_ld = 0.2", "target_ld"),
        ("kappa_values = [0.1]\nalpha_sq = -1.0", "alpha_sq"),
        ("kappa_values = [0.1]\nn_cells = 0", "n_cells"),
    ] {
        match RawConfig::from_toml(body).unwrap().validate() {
            Err(ConfigError::Invalid { field: f, .. }) => assert_eq!(f, field),
            other => panic!("{body}: {other:?}"),
        }
    }
}

#[test]
fn flags_override_the_config_file() {
    let file = RawConfig::from_toml("kappa_values = [0.1]\nalpha_sq = 9.0").unwrap();
    let flags = RawConfig { alpha_sq: Some(16.0), ..RawConfig::default() };
    let c = file.overlay(&flags).validate().unwrap();
    assert_eq!(c.alpha_sq, 16.0);
    assert_eq!(c.kappa_values, vec![0.1]);
}

fn run_small_sweep(dir: &Path) {
    let cfg = write_config(dir, &format!("{SMALL}output_dir = {:?}\n", dir.join("out")));
    let out = bin().args(["sweep", "--jobs", "1", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn csv_files(root: &Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for entry in fs::read_dir(root).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            files.extend(csv_files(&p));
        } else if p.extension().is_some_and(|e| e == "csv") {
            files.push(p);
        }
    }
    files.sort();
    files
}

#[test]
fn sweep_outputs_are_complete_and_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_small_sweep(a.path());
    run_small_sweep(b.path());
    let root = a.path().join("out");

    for kappa in ["0", "0.01"] {
        let dir = root.join(format!("kappa_{kappa}"));
        for f in [
            "series.csv",
            "transient.csv",
            "return_map.csv",
            "recurrence_pairs.csv",
            "return_times.csv",
            "return_times_pooled.csv",
            "spectrum.csv",
            "divergence.csv",
            "degree_histogram.csv",
            "metrics.json",
        ] {
            assert!(dir.join(f).exists(), "{kappa}/{f}");
        }
    }

    let fa = csv_files(&root);
    let fb = csv_files(&b.path().join("out"));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(root.join("manifest.json")).unwrap()).unwrap();
    let config = &manifest["config"];
    for key in ["alpha_sq", "chi_over_lambda", "kappa_values", "total_steps", "burn_in_steps", "output_dir"] {
        assert!(!config[key].is_null(), "{key}");
    }
    for key in ["target_ld", "n_cells", "fit_range", "plot_stride", "return_map_stride", "epsilon_rule", "analyses"] {
        assert!(!config["analysis"][key].is_null(), "{key}");
    }
    assert_eq!(config["analysis"]["target_ld"], 0.02);
    assert_eq!(config["analysis"]["n_cells"], 50);
    assert!(manifest["kappa_status"].as_array().unwrap().iter().all(|s| s["ok"] == true));
    assert!(manifest["results"][0]["theiler_window"].as_u64().unwrap() > 0);
}

#[test]
fn summary_is_derived_from_the_per_kappa_files() {
    let dir = tempfile::tempdir().unwrap();
    run_small_sweep(dir.path());
    let root = dir.path().join("out");
    let mut summary = csv::Reader::from_path(root.join("summary.csv")).unwrap();
    let header = summary.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for row in summary.records() {
        let row = row.unwrap();
        let kappa: f64 = row[col("kappa")].parse().unwrap();
        let kdir = root.join(format!("kappa_{kappa}"));

        let transient = read_series(&kdir.join("transient.csv")).unwrap();
        let collapse = tripartite_core::model::collapse_statistic(&transient, 0..3001, 3000..9001).unwrap();
        assert_eq!(row[col("collapse_ratio")].parse::<f64>().unwrap(), collapse);

        let series = tripartite_core::ScalarTimeSeries::from_values(read_series(&kdir.join("series.csv")).unwrap()).unwrap();
        let delay: usize = row[col("delay")].parse().unwrap();
        let dim: usize = row[col("dimension")].parse().unwrap();
        let cloud = tripartite_core::embedding::delay_embed(&series, delay, dim).unwrap();
        let eps: f64 = row[col("epsilon_connectivity")].parse().unwrap();
        let density = tripartite_core::recurrence::recurrence_density(&cloud, eps);
        assert_eq!(row[col("recurrence_density")].parse::<f64>().unwrap(), density);

        let mut div = csv::Reader::from_path(kdir.join("divergence.csv")).unwrap();
        let curve: Vec<f64> = div.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
        let xs: Vec<f64> = (1..=30).map(|k| k as f64).collect();
        let (slope, _, _) = tripartite_core::embedding::linear_fit(&xs, &curve[1..=30]);
        assert_eq!(row[col("lyapunov")].parse::<f64>().unwrap(), slope);
    }
}

#[test]
fn simulate_and_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s.csv");
    let out = bin()
        .args(["simulate", "--alpha-sq", "4", "--kappa", "0.01", "--total-steps", "3000", "--burn-in-steps", "500", "--output"])
        .arg(&series)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_series(&series).unwrap().len(), 2500);

    let out = bin()
        .args(["analyze", "--no-network", "--series"])
        .arg(&series)
        .arg("--output-dir")
        .arg(dir.path().join("analysis"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("analysis/spectrum.csv").exists());
    assert!(!dir.path().join("analysis/degree_histogram.csv").exists());

    let bad = bin().args(["analyze", "--target-ld", "0.5", "--series"]).arg(&series).output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

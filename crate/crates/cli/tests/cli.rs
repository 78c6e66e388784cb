use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tfzak_core::experiments::check_quasiperiodicity;
use tfzak_core::io::read_zak;

fn tfzak(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfzak")).args(args).env("TFZAK_OUT", out).output().expect("tfzak runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn norm_rows(out: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(out.join("norm/norms.csv")).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn usage_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(code(&tfzak(t.path(), &["frobnicate"])), 2);
    assert_eq!(code(&tfzak(t.path(), &["verify"])), 2);
    assert_eq!(code(&tfzak(t.path(), &["transform"])), 2);
    assert_eq!(code(&tfzak(t.path(), &["verify", "young", "--threads", "0"])), 2);
    assert_eq!(code(&tfzak(t.path(), &["transform", "--kind", "zak", "--signal", "chirp"])), 2);
}

#[test]
fn malformed_config_leaves_no_files() {
    let t = tempfile::tempdir().unwrap();
    let cfg = t.path().join("run.json");
    let out = t.path().join("out");
    fs::write(&cfg, "{\n  \"transform\": {\"kind\": \"zak\"},\n  \"sede\": 3\n}").unwrap();
    let o = tfzak(&out, &["--config", cfg.to_str().unwrap(), "transform"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3") && stderr(&o).contains("sede"), "{}", stderr(&o));
    assert!(!out.exists());

    // Well-formed but unusable: M does not divide L.
    let o = tfzak(&out, &["transform", "--kind", "finite-zak", "--L", "6", "--M", "4"]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn finite_zak_of_delta() {
    let t = tempfile::tempdir().unwrap();
    let o = tfzak(t.path(), &["transform", "--kind", "finite-zak", "--L", "4", "--M", "2", "--signal", "delta"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(t.path().join("transform-finite-zak/finite-zak-delta.csv")).unwrap();
    // Zf(n, k) = sum_m f((n - mM) mod L) e^{2πimk/N} is 1 on row n = 0 and 0 elsewhere.
    assert_eq!(csv, "i0,i1,x0,x1,re,im\n0,0,0.0,0.0,1.0,0.0\n0,1,0.0,1.0,1.0,0.0\n1,0,1.0,0.0,0.0,0.0\n1,1,1.0,1.0,0.0,0.0\n");
    assert!(t.path().join("transform-finite-zak/manifest.json").is_file());
}

#[test]
fn zak_container_is_quasi_periodic() {
    let t = tempfile::tempdir().unwrap();
    let o = tfzak(t.path(), &["transform", "--kind", "zak", "--signal", "gaussian"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let f = fs::File::open(t.path().join("transform-zak/zak-gaussian-w1-c0-m0.tfz")).unwrap();
    let z = read_zak(f).unwrap();
    assert!(check_quasiperiodicity(&z) <= 1e-9);
}

#[test]
fn stft_and_coefficients_transforms() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(code(&tfzak(t.path(), &["transform", "--kind", "stft"])), 0);
    let o = tfzak(t.path(), &["transform", "--kind", "coefficients", "--signal", "trig", "--cutoff", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(t.path().join("transform-coefficients/coefficients-trig-1.csv")).unwrap();
    // e^{3ix} has the single coefficient 1 at m = 3.
    assert!(csv.lines().any(|l| l == "7,3.0,1.0,0.0"), "{csv}");
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn zak_parseval_constant() {
    let t = tempfile::tempdir().unwrap();
    let o = tfzak(t.path(), &["verify", "zak-parseval"]);
    assert_eq!(code(&o), 0);
    let s: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(t.path().join("verify-zak-parseval/zak-parseval/summary.json")).unwrap())
            .unwrap();
    let c = s["summary"]["metrics"]["constant"].as_f64().unwrap();
    assert!((c / 2.5066 - 1.0).abs() <= 0.01, "{c}");
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(t.path().join("verify-zak-parseval/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["verdicts"]["zak-parseval"], true);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn planted_defects_fail() {
    let t = tempfile::tempdir().unwrap();
    let o = tfzak(t.path(), &["verify", "quasi-periodicity", "--plant-defect", "0.01"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("quasi-periodicity"));
    assert_eq!(code(&tfzak(t.path(), &["verify", "quasi-periodicity"])), 0);
    assert_eq!(code(&tfzak(t.path(), &["verify", "young", "--plant-defect", "0.01"])), 2);
}

#[test]
fn report_needs_manifests() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(code(&tfzak(t.path(), &["report"])), 2);
    assert_eq!(code(&tfzak(t.path(), &["report", "--manifest", "missing.json"])), 2);
}

#[test]
fn report_emits_curves_deterministically() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(code(&tfzak(t.path(), &["verify", "zak-lebesgue", "--quick"])), 0);
    assert_eq!(code(&tfzak(t.path(), &["verify", "decay-fit"])), 0);
    assert_eq!(code(&tfzak(t.path(), &["report"])), 0);
    let dir = t.path().join("report");
    let ratios = fs::read(dir.join("ratios.csv")).unwrap();
    let decay = fs::read_to_string(dir.join("decay-envelope.csv")).unwrap();
    assert!(decay.lines().count() > 10);
    let curves: Vec<_> = fs::read_dir(dir.join("curves")).unwrap().collect();
    assert_eq!(curves.len(), 1);
    // The report's own manifest is skipped on the rerun.
    assert_eq!(code(&tfzak(t.path(), &["report"])), 0);
    assert_eq!(fs::read(dir.join("ratios.csv")).unwrap(), ratios);
}

#[test]
fn norm_of_indicator_and_gaussian() {
    let t = tempfile::tempdir().unwrap();
    let o = tfzak(
        t.path(),
        &["norm", "--signal", "indicator", "--spec", r#"{"family": "mixed-lebesgue", "exponents": [3]}"#],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = norm_rows(t.path());
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r[4].parse::<f64>().unwrap(), 1.0);
        assert_eq!(r[7], "none");
    }

    let o = tfzak(
        t.path(),
        &["norm", "--signal", "gaussian", "--spec", r#"{"family": "modulation-M", "p": [2], "q": [2]}"#],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for r in norm_rows(t.path()) {
        let v: f64 = r[4].parse().unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() <= 1e-4, "{v}");
    }

    let o = tfzak(t.path(), &["norm", "--signal", "gaussian", "--spec", r#"{"family": "mixed-lebesgue", "exponents": ["inf"]}"#]);
    assert_eq!(code(&o), 0);
    assert!(norm_rows(t.path()).iter().all(|r| r[7] == "max" && r[4] == "1.0"));
}

#[test]
fn exponent_arity_mismatch_exits_2() {
    let t = tempfile::tempdir().unwrap();
    let o = tfzak(
        t.path(),
        &["norm", "--signal", "gaussian", "--spec", r#"{"family": "mixed-lebesgue", "exponents": [1, 2, 3]}"#],
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("exponent arity"), "{}", stderr(&o));
}

#[test]
fn flags_override_config() {
    let t = tempfile::tempdir().unwrap();
    let cfg = t.path().join("run.json");
    let from_config = t.path().join("configured");
    fs::write(
        &cfg,
        serde_json::json!({"experiment": "finite-parseval", "seed": 5, "quick": true, "out_dir": from_config}).to_string(),
    )
    .unwrap();
    // TFZAK_OUT wins over `out_dir`; --seed wins over `seed`.
    let o = tfzak(t.path(), &["--config", cfg.to_str().unwrap(), "--seed", "9", "--threads", "1", "verify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(!from_config.exists());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(t.path().join("verify-finite-parseval/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["quick"], true);

    let o = Command::new(env!("CARGO_BIN_EXE_tfzak"))
        .args(["--config", cfg.to_str().unwrap(), "verify"])
        .env_remove("TFZAK_OUT")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(from_config.join("verify-finite-parseval/manifest.json").is_file());
}

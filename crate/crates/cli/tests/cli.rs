use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXP_EXP: &str = r#"{"p": 0.6666666666666666, "lambda": 0.7, "normalize": true,
    "type1": {"kind": "exp", "mean": 1.0}, "type2": {"kind": "exp", "mean": 4.0}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nudgem")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Header and rows of a numeric CSV; empty fields read as NaN.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| if f.is_empty() { f64::NAN } else { f.parse().unwrap() }).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

#[test]
fn invalid_mix_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"p": 1.5, "lambda": 0.7, "type1": {"kind": "exp", "mean": 1}, "type2": {"kind": "exp", "mean": 4}}"#);
    let out = dir.path().join("x.csv");
    assert_eq!(run(&["atir", "--mix", s(&bad), "--out", s(&out)]).status.code(), Some(2));
    let unstable = write(&dir, "hot.json", &EXP_EXP.replace("0.7", "1.2"));
    assert_eq!(run(&["atir", "--mix", s(&unstable), "--out", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["atir", "--mix", "/no/such/file.json", "--out", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["atir", "--bogus"]).status.code(), Some(2));
}

#[test]
fn window_beyond_the_fluid_cap_is_a_cap_error() {
    let dir = TempDir::new().unwrap();
    let mix = write(&dir, "mix.json", EXP_EXP);
    let out = dir.path().join("d.csv");
    let o = run(&["dist", "--mix", s(&mix), "--m", "11", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn window_recipe_peaks_at_five_and_has_a_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig5a.csv");
    assert!(run(&["atir", "--recipe", "fig5a", "--out", s(&out)]).status.success());
    let (header, rows) = read_csv(&out);
    let atir = column(&header, &rows, "atir");
    let best = (0..atir.len()).max_by(|&a, &b| atir[a].total_cmp(&atir[b])).unwrap();
    assert_eq!(column(&header, &rows, "m")[best], 5.0);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig5a.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "atir");
    assert_eq!(manifest["config"]["recipe"], "fig5a");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn recipe_of_another_command_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(run(&["dist", "--recipe", "fig5a", "--out", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["atir", "--recipe", "fig99", "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn simulation_is_reproducible_by_seed() {
    let dir = TempDir::new().unwrap();
    let mix = write(&dir, "mix.json", EXP_EXP);
    let sim = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = run(&["simulate", "--mix", s(&mix), "--policy", "nudge-m", "--m", "3", "--n", "20000", "--seed", seed, "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let (a, b, c) = (sim("a.csv", "42"), sim("b.csv", "42"), sim("c.csv", "43"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let manifest = std::fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(manifest["seeds"][0], 42);
}

#[test]
fn policy_table_file_matches_the_named_policy() {
    let dir = TempDir::new().unwrap();
    let mix = write(&dir, "mix.json", EXP_EXP);
    let table = write(&dir, "nudge1.txt", "# Nudge-1\n1 0\n2 1\n");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(run(&["atir", "--mix", s(&mix), "--policy", s(&table), "--out", s(&a)]).status.success());
    assert!(run(&["atir", "--mix", s(&mix), "--policy", "nudge-m", "--m", "1", "--out", s(&b)]).status.success());
    let (ha, ra) = read_csv(&a);
    let (hb, rb) = read_csv(&b);
    let (x, y) = (column(&ha, &ra, "atir")[0], column(&hb, &rb, "atir")[0]);
    assert!((x - y).abs() < 1e-12, "{x} vs {y}");
}

#[test]
fn mtir_ordering_holds_on_the_mean_recipe() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig8a.csv");
    assert!(run(&["mean", "--recipe", "fig8a", "--out", s(&out)]).status.success());
    let (h, rows) = read_csv(&out);
    let (opt, prio) = (column(&h, &rows, "mtir_m_opt"), column(&h, &rows, "mtir_priority"));
    for (o, p) in opt.iter().zip(&prio) {
        assert!(*o >= -1e-12 && p + 1e-12 >= *o, "{o} vs {p}");
    }
}

#[test]
fn fcfs_mean_matches_mm1_with_equal_sizes() {
    let dir = TempDir::new().unwrap();
    let mix = write(&dir, "mm1.json", &EXP_EXP.replace("4.0", "1.0"));
    let out = dir.path().join("m.csv");
    assert!(run(&["mean", "--mix", s(&mix), "--lambda", "0.3,0.6,0.9", "--out", s(&out)]).status.success());
    let (h, rows) = read_csv(&out);
    for (l, f) in column(&h, &rows, "lambda").iter().zip(column(&h, &rows, "mean_fcfs")) {
        assert!((f - 1.0 / (1.0 - l)).abs() < 1e-10, "lambda {l}: {f}");
    }
}

#[test]
fn verify_reports_failures_by_name() {
    let ok = run(&["verify"]);
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("tail-closure"));
    let bad = run(&["verify", "--fault-theta-scale", "1.01"]);
    assert_eq!(bad.status.code(), Some(4));
    let stdout = String::from_utf8_lossy(&bad.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("tail-closure"));
}

#[test]
fn distribution_starts_at_zero_tir() {
    let dir = TempDir::new().unwrap();
    let mix = write(&dir, "mix.json", EXP_EXP);
    let out = dir.path().join("d.csv");
    assert!(run(&["dist", "--mix", s(&mix), "--m", "2", "--t", "0:4:1", "--out", s(&out)]).status.success());
    let (h, rows) = read_csv(&out);
    assert_eq!(rows.len(), 5);
    assert!(column(&h, &rows, "tir")[0].abs() < 1e-12);
    assert!(run(&["dist", "--mix", s(&mix), "--policy", "nudge-k", "--k", "2", "--out", s(&out)]).status.code() == Some(2));
}

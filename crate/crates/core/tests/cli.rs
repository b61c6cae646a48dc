//! End-to-end runs of the `noma-sat` binary.

use std::path::Path;
use std::process::{Command, Output};

use noma_sat::output::{Manifest, MANIFEST};
use sha2::{Digest, Sha256};

fn noma_sat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noma-sat"))
        .args(args)
        .env_remove("NOMA_SAT_OUT_DIR")
        .output()
        .unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out-dir", dir.to_str().unwrap()]);
    noma_sat(&all)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

/// Every manifest entry matches the file on disk.
fn check_manifest(dir: &Path) -> Manifest {
    let m: Manifest = serde_json::from_slice(&std::fs::read(dir.join(MANIFEST)).unwrap()).unwrap();
    for e in &m.files {
        let data = std::fs::read(dir.join(&e.file)).unwrap();
        assert_eq!(data.len() as u64, e.bytes, "{}", e.file);
        let digest: String = Sha256::digest(&data).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(digest, e.sha256, "{}", e.file);
    }
    m
}

#[test]
fn region_writes_one_boundary_per_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "region",
            "--set",
            "snr1_db=10",
            "--set",
            "inr1_db=5",
            "--set",
            r#"strategies=["ian","snd","orthogonal"]"#,
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = check_manifest(dir.path());
    let names: Vec<&str> = m.files.iter().map(|e| e.file.as_str()).collect();
    assert_eq!(
        names,
        ["region_ian.csv", "region_snd.csv", "region_orthogonal.csv", "plot.gp"]
    );
    let (header, ian) = read_csv(&dir.path().join("region_ian.csv"));
    assert_eq!(header, ["r1_bps_hz", "r2_bps_hz"]);
    // 10 dB over 5 dB interference, 10 dB over 10 dB interference.
    let want = [
        (1.0 + 10.0 / (1.0 + 10f64.powf(0.5))).log2(),
        (1.0 + 10.0 / 11.0f64).log2(),
    ];
    let got: Vec<f64> = ian[0].iter().map(|x| x.parse().unwrap()).collect();
    assert!(
        (got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12,
        "{got:?}"
    );
    let (_, snd) = read_csv(&dir.path().join("region_snd.csv"));
    assert!(snd.len() > 10);
}

#[test]
fn region_from_json_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("two_user.json");
    std::fs::write(
        &cfg,
        r#"{"snr1_db": 3.0, "snr2_db": 3.0, "strategies": ["hk"], "grid_step": 0.25}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run_in(&out_dir, &["region", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("region_hk.csv").exists());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_noma-sat"))
        .args(["region", "--set", r#"strategies=["ian"]"#])
        .env("NOMA_SAT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("region_ian.csv").exists());
}

#[test]
fn feeder_prints_three_plans() {
    let out = noma_sat(&["feeder", "--k", "245", "--b", "5e8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let totals: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(totals, [1.225e11, 2.45e11, 2.46e11]);
}

#[test]
fn precode_reports_every_beam() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["precode", "--set", "k=7", "--set", "n=7", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_manifest(dir.path());
    let (header, w) = read_csv(&dir.path().join("precoder.csv"));
    assert_eq!(header, ["stream", "feed", "real", "imag", "stream_power"]);
    assert_eq!(w.len(), 49);
    let (_, sinr) = read_csv(&dir.path().join("sinr.csv"));
    assert_eq!(sinr.len(), 7);
    for row in &sinr {
        let s: f64 = row[2].parse().unwrap();
        let r: f64 = row[3].parse().unwrap();
        assert!(s > 0.0 && (r - (1.0 + s).log2()).abs() < 1e-12);
    }
}

#[test]
fn pairing_includes_oracle_on_small_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "pairing",
            "--set",
            "k=3",
            "--set",
            "n=3",
            "--set",
            "users_per_beam=4",
            "--seed",
            "5",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, sched) = read_csv(&dir.path().join("schedule.csv"));
    assert_eq!(header, ["beam", "slot", "strong_user", "weak_user", "strategy"]);
    // Two default schedulers plus the oracle, 3 beams x 2 pairs each.
    assert_eq!(sched.len(), 18);
    let (_, oracle) = read_csv(&dir.path().join("oracle.csv"));
    assert_eq!(oracle.last().unwrap()[0], "oracle");
    for row in &oracle {
        assert!(row[2].parse::<f64>().unwrap() >= 0.0, "{row:?}");
    }
}

#[test]
fn pairing_without_oracle_on_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["pairing", "--set", "k=7", "--set", "n=7"]);
    assert!(out.status.success());
    assert!(dir.path().join("schedule.csv").exists());
    assert!(!dir.path().join("oracle.csv").exists());
}

#[test]
fn simulate_summary_has_one_row_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["simulate", "--set", "k=7", "--set", "n=7", "--drops", "4"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, std::fs::read_to_string(dir.path().join("summary.txt")).unwrap());
    let (header, rows) = read_csv(&dir.path().join("summary.csv"));
    assert_eq!(header.len(), 8);
    let combos: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(
        combos,
        [
            ("four_color", "none"),
            ("single_layer_precoding", "none"),
            ("multilayer_noma", "min_gain_diff"),
            ("multilayer_noma", "max_gain_diff"),
            ("broadcast_multicast", "none"),
        ]
    );
    assert_eq!(rows[0][7], "0.0");
    let (_, drops) = read_csv(&dir.path().join("drops.csv"));
    assert_eq!(drops.len(), 4 * 5);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["simulate", "--set", "no_such_key=1"],
        vec!["simulate", "--set", "drops"],
        vec!["simulate", "--set", "users_per_beam=3"],
        vec!["region", "--config", "/nonexistent/two_user.toml"],
        vec!["region", "--set", r#"strategies=["bogus"]"#],
        vec!["feeder", "--k", "0", "--b", "1"],
    ] {
        let out = run_in(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn computation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "pairing",
            "--set",
            r#"schemes=["four_color"]"#,
            "--set",
            "users_per_beam=1",
            "--set",
            "k=3",
            "--set",
            "n=3",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

//! End-to-end runs of the `qnoise` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn qnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ligo() -> String {
    configs_dir().join("ligo_like.json").display().to_string()
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("run.json");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn budget_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = qnoise(&["budget", "--config", &ligo(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(!ta.contains(&b'\r'));
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("f_hz,qmn,qbn,total_quantum,sql,classical,total\n"));
    assert_eq!(text.lines().count(), 201);

    let meta: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["command"], "budget");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["squeezer"]["generated_db"], 13.8);
    assert!((meta["derived"]["f_sql_hz"].as_f64().unwrap() - 30.0).abs() < 1e-9);
}

#[test]
fn stdout_matches_file_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sql.csv");
    let o1 = qnoise(&["sql", "--config", &ligo()]);
    let o2 = qnoise(&["sql", "--config", &ligo(), "--out", out.to_str().unwrap()]);
    assert!(o1.status.success() && o2.status.success());
    assert_eq!(o1.stdout, std::fs::read(&out).unwrap());
    assert!(String::from_utf8_lossy(&o1.stderr).contains("f_SQL = 30.000000 Hz"));
}

#[test]
fn exit_codes() {
    let missing = qnoise(&["budget", "--config", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(3));

    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, r#"{"interferometer": {"mirror_mass_kg": 40, "arm_length_m": -1,
        "arm_power_w": 1e5, "laser_frequency_hz": 2.8e14, "bandwidth_hz": 450},
        "grid": {"f_min": 10, "f_max": 100, "n": 10}}"#);
    let o = qnoise(&["budget", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("interferometer.arm_length_m"), "{err}");

    let typo = write_config(&dir, r#"{"grid": {"f_min": 10, "f_max": 100, "points": 10}}"#);
    let o = qnoise(&["sql", "--config", &typo]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));

    // coupling overflows: K is infinite everywhere and f_SQL cannot be bracketed
    let blown = write_config(&dir, r#"{"interferometer": {"mirror_mass_kg": 1e-300, "arm_length_m": 1e-10,
        "arm_power_w": 1e300, "laser_frequency_hz": 2.8e14, "bandwidth_hz": 450},
        "grid": {"f_min": 10, "f_max": 100, "n": 10}}"#);
    assert_eq!(qnoise(&["sql", "--config", &blown]).status.code(), Some(4));

    let o = qnoise(&["optimize-angle", "--config", &ligo(), "--band", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classical_noise_is_added_and_round_trips() {
    let dir = TempDir::new().unwrap();
    // classical PSD exactly on the run grid, written at 9 significant digits
    let grid_out = qnoise(&["sql", "--config", &ligo()]);
    let freqs: Vec<String> = rows(&String::from_utf8(grid_out.stdout).unwrap())
        .into_iter()
        .map(|r| r[0].clone())
        .collect();
    let mut csv = String::from("f_hz,psd_m2_per_hz\n");
    for f in &freqs {
        let fv: f64 = f.parse().unwrap();
        csv.push_str(&format!("{f},{:.8e}\n", 1e-38 * (30.0 / fv).powi(4)));
    }
    std::fs::write(dir.path().join("classical.csv"), &csv).unwrap();
    let text = std::fs::read_to_string(ligo()).unwrap().replace(
        "\"band\"",
        "\"classical_noise_csv\": \"classical.csv\",\n  \"band\"",
    );
    let cfg = write_config(&dir, &text);
    let o = qnoise(&["budget", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    let input = rows(&csv);
    for (row, given) in table.iter().zip(&input) {
        // lossless re-ingestion: the classical column reproduces the input cells
        assert_eq!(row[5], given[1]);
        let (q, c, t): (f64, f64, f64) = (row[3].parse().unwrap(), row[5].parse().unwrap(), row[6].parse().unwrap());
        assert!((t / (q + c) - 1.0).abs() < 1e-8);
    }

    // a classical spectrum that does not cover the grid is rejected
    std::fs::write(dir.path().join("classical.csv"), "f_hz,psd_m2_per_hz\n20,1e-40\n2000,1e-44\n").unwrap();
    let o = qnoise(&["budget", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("classical_noise_csv"));
}

#[test]
fn no_squeezer_gives_unsqueezed_budget() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"interferometer": {"mirror_mass_kg": 40, "arm_length_m": 4000, "sql_frequency_hz": 30,
        "laser_wavelength_m": 1.064e-6, "bandwidth_hz": 450},
        "grid": {"f_min": 10, "f_max": 1000, "n": 50}}"#;
    let o = qnoise(&["budget", "--config", &write_config(&dir, text)]);
    assert!(o.status.success());
    for r in rows(&String::from_utf8(o.stdout).unwrap()) {
        let v: Vec<f64> = r[1..5].iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[0] + v[1]) / v[2] - 1.0 < 1e-8);
        assert!(v[2] >= v[3] * (1.0 - 1e-8));
        assert_eq!((r[5].as_str(), r[6].as_str()), ("", ""));
    }
}

#[test]
fn optimize_angle_band_override_and_table() {
    let o = qnoise(&["optimize-angle", "--config", &ligo(), "--band", "35:45"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(table.len(), 91);
    let best = table
        .iter()
        .min_by(|a, b| a[1].parse::<f64>().unwrap().total_cmp(&b[1].parse::<f64>().unwrap()))
        .unwrap();
    let best_deg: f64 = best[0].parse().unwrap();
    assert!(best_deg > 15.0 && best_deg < 45.0, "{best_deg}");
}

#[test]
fn loss_chain_table() {
    let o = qnoise(&["loss-chain", "--config", &ligo()]);
    assert!(o.status.success());
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(table.len(), 3);
    assert_eq!(table[2][1], "readout");
    let sq: f64 = table[2][4].parse().unwrap();
    let anti: f64 = table[2][5].parse().unwrap();
    assert!((anti - 11.3).abs() < 0.05 && (sq + 3.17).abs() < 0.05);
}

#[test]
fn state_tomography() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(ligo())
        .unwrap()
        .replace("\"band\"", "\"state\": {\"ponderomotive_at_hz\": 30},\n  \"band\"");
    let out = dir.path().join("state.csv");
    let o = qnoise(&["state", "--config", &write_config(&dir, &text), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(table.len(), 180);
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("state.csv.meta.json")).unwrap()).unwrap();
    let d = &meta["derived"];
    assert!((d["kimble_factor"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((d["evasion_angle_deg"].as_f64().unwrap() - 45.0).abs() < 1e-9);
    // ponderomotive coupling is symplectic: purity unchanged by it
    assert!((d["uncertainty_product"].as_f64().unwrap() - 2.5441).abs() < 1e-3);
}

#[test]
fn decoherence_bound_flow() {
    let dir = TempDir::new().unwrap();
    let budget = qnoise(&["budget", "--config", &ligo()]);
    let table = rows(&String::from_utf8(budget.stdout).unwrap());
    let offset = 2e-41;
    let mut csv = String::from("f_hz,psd_m2_per_hz\n");
    for r in &table {
        let q: f64 = r[3].parse().unwrap();
        csv.push_str(&format!("{},{:.15e}\n", r[0], q + offset));
    }
    std::fs::write(dir.path().join("observed.csv"), csv).unwrap();
    let text = std::fs::read_to_string(ligo())
        .unwrap()
        .replace("\"band\"", "\"observed_noise_csv\": \"observed.csv\",\n  \"band\"");
    let cfg = write_config(&dir, &text);
    let out = dir.path().join("bound.csv");
    let o = qnoise(&[
        "decoherence-bound", "--config", &cfg, "--tol", "0", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bound.csv.meta.json")).unwrap()).unwrap();
    let b = meta["derived"]["bound_m2_per_hz"].as_f64().unwrap();
    // the model column is re-derived, not read back, so allow the 9-digit rounding of the budget
    assert!((b / offset - 1.0).abs() < 1e-3, "{b}");
    let o = qnoise(&["decoherence-bound", "--config", &cfg, "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn marshall_flags_discrepancy() {
    let o = qnoise(&["marshall", "--config", &configs_dir().join("marshall.json").display().to_string()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        text,
        "mass_kg,resonance_hz,formula_width_m,quoted_width_m,quoted_over_formula,discrepancy\n\
         5.00000000e-12,5.00000000e2,5.79379526e-14,6.00000000e-13,1.03559062e1,true\n"
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qfchub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfchub"))
        .args(args)
        .env_remove("QFCHUB_CONFIG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Summary line printed on stdout when data goes to a file.
fn summary_to_file(args: &[&str], out: &Path) -> Value {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--output", out.to_str().unwrap()]);
    let o = qfchub(&all);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    serde_json::from_str(stdout(&o).trim()).expect("one-line JSON summary")
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn index_prints_one_row_per_wavelength() {
    let o = qfchub(&["index", "780", "1540", "1580"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("# schema=1\nwavelength_nm,n,dn_dlambda_per_um,group_index\n"));
    assert_eq!(data_rows(&text).len(), 3);
    let summary: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(summary["command"], "index");
}

#[test]
fn index_outside_validity_names_bound() {
    let o = qfchub(&["index", "300"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("[0.4, 5]"), "{}", stderr(&o));
}

#[test]
fn index_without_wavelengths_is_usage_error() {
    let o = qfchub(&["index"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Usage"));
}

fn spectrum(args: &[&str]) -> Vec<(f64, f64)> {
    let mut all = vec!["pm-scan"];
    all.extend_from_slice(args);
    let o = qfchub(&all);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    data_rows(&stdout(&o))
        .into_iter()
        .map(|r| (r[1].parse().unwrap(), r[3].parse().unwrap()))
        .collect()
}

#[test]
fn pm_scan_peaks_at_target() {
    let s = spectrum(&["--signal", "780", "--target", "1540", "--length", "40"]);
    let best = s.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(best.0, 1540.0);
}

#[test]
fn pm_scan_narrow_peak_for_493() {
    let s = spectrum(&["--signal", "493", "--target", "1540", "--window", "0.5", "--step", "1"]);
    let above: Vec<usize> = (0..s.len()).filter(|&i| s[i].1 >= 0.5).collect();
    assert!(!above.is_empty());
    assert_eq!(above.last().unwrap() - above[0] + 1, above.len(), "one contiguous peak");
    let span = s[above[0]].0 - s[*above.last().unwrap()].0;
    assert!(span.abs() < 0.5);
}

#[test]
fn pm_scan_shorter_crystal_is_wider() {
    let count = |l: &str| {
        spectrum(&["--signal", "780", "--target", "1540", "--length", l])
            .iter()
            .filter(|p| p.1 >= 0.9)
            .count()
    };
    assert!(count("20") > count("40"));
}

#[test]
fn tuning_range_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let s = summary_to_file(
        &["tuning-range", "--signal", "780", "--target", "1540", "--length", "40", "--cutoff", "1550"],
        &out,
    );
    assert_eq!(s["command"], "tuning-range");
    assert!((s["width_nm"].as_f64().unwrap() - 19.5).abs() < 1.5);
    assert_eq!(s["limiting_constraint"], "cutoff");
    assert!(s["elapsed_s"].as_f64().is_some());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("signal_nm,lo_nm,hi_nm,width_nm,width_THz,channels,limiting_constraint"));
}

#[test]
fn empty_tuning_range_exits_zero() {
    let o = qfchub(&["tuning-range", "--signal", "493", "--target", "1540", "--cutoff", "1550"]);
    assert_eq!(code(&o), 0);
    let s: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(s["width_nm"], 0.0);
    assert_eq!(s["empty"], true);
}

#[test]
fn tuning_range_rejects_conflicting_constraints() {
    let o = qfchub(&["tuning-range", "--signal", "780", "--target", "1540", "--cutoff", "1550", "--separation", "20"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn hub_sweep_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("s{w}.csv"));
        summary_to_file(&["hub-sweep", "--start", "700", "--end", "800", "--step", "2", "--workers", w], &out);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(data_rows(&String::from_utf8(outputs[0].clone()).unwrap()).len(), 51);
}

#[test]
fn hub_sweep_bad_range_is_validation_error() {
    let o = qfchub(&["hub-sweep", "--start", "900", "--end", "800"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn plan_default_grid() {
    let o = qfchub(&["plan", "--grid-default", "--signal-freq", "384.200"]);
    assert_eq!(code(&o), 0);
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[6][0], "7");
    assert_eq!(rows[6][3], "189.500");
    assert_eq!(rows[6][4], "1582.02");
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn plan_signal_below_grid_fails() {
    let o = qfchub(&["plan", "--signal-freq", "190"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn efficiency_curve_band() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary_to_file(&["efficiency-curve"], &dir.path().join("e.csv"));
    let w = s["band_width_THz"].as_f64().unwrap();
    assert!((w - 2.0).abs() <= 0.5, "{w}");
}

#[test]
fn simulate_reports_each_input() {
    let o = qfchub(&["simulate", "--eta-cw", "0.4", "--eta-ccw", "0.44", "--input", "H,D"]);
    assert_eq!(code(&o), 0);
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "H");
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), -1.0);
}

#[test]
fn simulate_degenerate_is_numeric_failure() {
    let o = qfchub(&["simulate", "--eta-cw", "0", "--eta-ccw", "0.5", "--input", "V"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn simulate_rejects_bad_efficiency() {
    let o = qfchub(&["simulate", "--eta-cw", "1.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tomography_json() {
    let o = qfchub(&["tomography", "--eta-cw", "0.5", "--eta-ccw", "0.5", "--phase", "1.5707963267948966", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["basis"], serde_json::json!(["I", "X", "Y", "Z"]));
    assert!((v["fidelity"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["tomography"].as_array().unwrap().len(), 4);
}

fn write_curve(path: &Path, eta_max: f64, eta_nor: f64) {
    let mut text = String::from("# synthetic\nP_mW,eta\n");
    for i in 0..=15 {
        let p = 20.0 * i as f64;
        text.push_str(&format!("{p},{}\n", eta_max * (eta_nor * p).sqrt().sin().powi(2)));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn fit_recovers_synthetic_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("synthetic.csv");
    write_curve(&input, 0.44, 0.013);
    let s = summary_to_file(&["fit", "--input", input.to_str().unwrap()], &dir.path().join("fit.csv"));
    assert!((s["eta_max"].as_f64().unwrap() / 0.44 - 1.0).abs() < 1e-3);
    assert!((s["eta_nor_per_mW"].as_f64().unwrap() / 0.013 - 1.0).abs() < 1e-3);
}

#[test]
fn fit_all_zero_is_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zero.csv");
    std::fs::write(&input, "0,0\n10,0\n20,0\n").unwrap();
    assert_eq!(code(&qfchub(&["fit", "--input", input.to_str().unwrap()])), 3);
    assert_eq!(code(&qfchub(&["fit", "--input", "/nonexistent.csv"])), 2);
}

#[test]
fn balance_equalizes_arms() {
    let o = qfchub(&["balance", "--ccw", "0.44,0.013", "--cw", "0.40,0.018", "--total", "250"]);
    assert_eq!(code(&o), 0);
    let s: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(s["balanced"], true);
    assert!((s["p_ccw_mW"].as_f64().unwrap() - 122.1237).abs() < 1e-3);
}

#[test]
fn reproduce_figures_writes_dated_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = qfchub(&["reproduce-figures", "--output-dir", dir.path().to_str().unwrap(), "--date", "2026-01-02"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let day = dir.path().join("2026-01-02");
    for f in ["pm_scan_780nm_L40mm.csv", "hub_sweep_cband.csv", "hub_sweep_oband.csv", "pump_plan.csv"] {
        assert!(day.join(f).exists(), "{f}");
    }
    let s: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(s["files"].as_array().unwrap().len(), 10);
    assert_eq!(code(&qfchub(&["reproduce-figures", "--date", "yesterday"])), 2);
}

#[test]
fn config_file_from_environment_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "length_mm = 20.0\nformat = \"json\"\n[constraint]\ncutoff_nm = 1550.0\n").unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["tuning-range", "--signal", "780", "--target", "1540"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_qfchub"))
            .args(&args)
            .env("QFCHUB_CONFIG", &cfg)
            .output()
            .unwrap()
    };
    let from_file = run(&[]);
    assert_eq!(code(&from_file), 0);
    let v: Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    assert_eq!(v["constraints"]["mode"]["kind"], "max_converted_wavelength");
    let w20 = v["result"]["width_nm"].as_f64().unwrap();
    let flagged = run(&["--length", "40", "--format", "csv"]);
    assert!(stdout(&flagged).starts_with("# schema=1"));
    let s: Value = serde_json::from_str(stderr(&flagged).trim()).unwrap();
    assert!(s["width_nm"].as_f64().unwrap() < w20);

    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn every_command_honors_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("c.csv");
    write_curve(&curve, 0.40, 0.018);
    let cases: Vec<Vec<&str>> = vec![
        vec!["index", "1540"],
        vec!["pm-scan", "--signal", "780", "--target", "1540", "--window", "1"],
        vec!["tuning-range", "--signal", "780", "--target", "1540"],
        vec!["hub-sweep", "--start", "770", "--end", "790", "--step", "10"],
        vec!["plan"],
        vec!["efficiency-curve", "--step", "50"],
        vec!["simulate"],
        vec!["tomography"],
        vec!["fit", "--input", curve.to_str().unwrap()],
        vec!["balance", "--ccw", "0.44,0.013", "--cw", "0.40,0.018", "--total", "250"],
    ];
    for mut args in cases {
        args.extend(["--format", "json"]);
        let o = qfchub(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        let v: Result<Value, _> = serde_json::from_str(&stdout(&o));
        assert!(v.is_ok(), "{args:?} produced non-JSON output");
        assert_eq!(v.unwrap()["schema"], 1, "{args:?}");
    }
}

//! Text formats shared by the command-line tool.
//!
//! CSV files open with a `# schema=N` line. Wavelengths are written in nm with
//! two decimals and frequencies in THz with three.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

use crate::dwdm::{EfficiencyPoint, PumpPlan};
use crate::error::{Error, Result};
use crate::polarization::{process_fidelity, ProcessMatrix, TomographyRecord, PAULI_LABELS};
use crate::tunability::{HubSweepPoint, SpectrumPoint, TuningResult};

pub const SCHEMA_VERSION: u32 = 1;

pub fn fmt_nm(v: f64) -> String {
    format!("{v:.2}")
}

pub fn fmt_thz(v: f64) -> String {
    format!("{v:.3}")
}

fn fmt_eff(v: Option<f64>) -> String {
    v.map(|e| format!("{e:.6}")).unwrap_or_default()
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn csv_writer<W: Write>(mut out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    writeln!(out, "# schema={SCHEMA_VERSION}").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(io_err)?;
    Ok(w)
}

pub const SWEEP_COLUMNS: [&str; 7] = [
    "signal_nm",
    "lo_nm",
    "hi_nm",
    "width_nm",
    "width_THz",
    "channels",
    "limiting_constraint",
];

fn tuning_row(signal_nm: f64, t: &TuningResult) -> [String; 7] {
    [
        fmt_nm(signal_nm),
        fmt_nm(t.converted_interval_nm[0]),
        fmt_nm(t.converted_interval_nm[1]),
        fmt_nm(t.width_nm),
        fmt_thz(t.width_thz),
        t.channel_count.to_string(),
        t.limiting_constraint.as_str().to_string(),
    ]
}

pub fn write_sweep_csv<W: Write>(out: W, points: &[HubSweepPoint]) -> Result<()> {
    let mut w = csv_writer(out, &SWEEP_COLUMNS)?;
    for p in points {
        w.write_record(tuning_row(p.signal_nm, &p.tuning)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_tuning_csv<W: Write>(out: W, result: &TuningResult) -> Result<()> {
    let mut w = csv_writer(out, &SWEEP_COLUMNS)?;
    w.write_record(tuning_row(result.signal_nm, result)).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub const PLAN_COLUMNS: [&str; 7] = [
    "port",
    "nu_c_THz",
    "lambda_c_nm",
    "nu_p_THz",
    "lambda_p_nm",
    "in_laser_range",
    "rel_eff",
];

pub fn write_plan_csv<W: Write>(out: W, plan: &PumpPlan) -> Result<()> {
    let mut w = csv_writer(out, &PLAN_COLUMNS)?;
    for r in &plan.records {
        w.write_record([
            r.port.to_string(),
            fmt_thz(r.converted_thz),
            fmt_nm(r.converted_nm),
            fmt_thz(r.pump_thz),
            fmt_nm(r.pump_nm),
            r.in_laser_range.to_string(),
            fmt_eff(r.relative_efficiency),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_spectrum_csv<W: Write>(out: W, points: &[SpectrumPoint]) -> Result<()> {
    let mut w = csv_writer(out, &["nu_c_THz", "lambda_c_nm", "lambda_p_nm", "efficiency", "in_validity"])?;
    for p in points {
        w.write_record([
            fmt_thz(p.converted_thz),
            fmt_nm(p.converted_nm),
            fmt_nm(p.pump_nm),
            fmt_eff(p.efficiency),
            p.efficiency.is_some().to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_efficiency_curve_csv<W: Write>(out: W, points: &[EfficiencyPoint]) -> Result<()> {
    let mut w = csv_writer(out, &["nu_p_THz", "lambda_p_nm", "rel_eff"])?;
    for p in points {
        w.write_record([fmt_thz(p.pump_thz), fmt_nm(p.pump_nm), fmt_eff(p.relative_efficiency)])
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// `{schema, basis, layout, chi, trace, fidelity}` with `chi` as rows of `[re, im]`.
pub fn chi_to_json(chi: &ProcessMatrix) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "basis": PAULI_LABELS,
        "layout": "row-major, entries [re, im]",
        "chi": chi.to_rows(),
        "trace": chi.trace(),
        "fidelity": process_fidelity(chi).ok(),
    })
}

pub fn chi_from_json(value: &Value) -> Result<ProcessMatrix> {
    let basis: Vec<String> = serde_json::from_value(value["basis"].clone()).map_err(io_err)?;
    if basis != PAULI_LABELS {
        return Err(Error::Parse(format!("unsupported basis order {basis:?}")));
    }
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(value["chi"].clone()).map_err(io_err)?;
    ProcessMatrix::from_rows(&rows)
}

pub fn tomography_to_json(records: &[TomographyRecord]) -> Value {
    let cells = |m: &nalgebra::Matrix2<crate::polarization::C64>| -> Vec<Vec<[f64; 2]>> {
        (0..2).map(|r| (0..2).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
    };
    Value::Array(
        records
            .iter()
            .map(|r| {
                json!({
                    "input": r.label.as_str(),
                    "success_probability": r.success_probability,
                    "bloch": r.output.bloch_vector(),
                    "rho": cells(r.output.density_matrix()),
                })
            })
            .collect(),
    )
}

/// Two numeric columns `(P_mW, eta)`. Lines starting with `#` and a leading
/// non-numeric header row are skipped.
pub fn read_efficiency_csv<R: BufRead>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() < 2 {
            return Err(Error::Parse(format!("row {}: expected 2 columns, got {}", i + 1, rec.len())));
        }
        let parse = |s: &str| s.parse::<f64>();
        match (parse(&rec[0]), parse(&rec[1])) {
            (Ok(p), Ok(e)) => out.push((p, e)),
            _ if i == 0 && out.is_empty() => continue,
            _ => return Err(Error::Parse(format!("row {}: non-numeric value in {:?}", i + 1, rec))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwdm::{plan_device, plan_pumps, DwdmGrid, LaserSpec, DEFAULT_SIGNAL_THZ};
    use crate::polarization::{kraus_to_chi, simulate_tomography, QfcChannelModel};
    use crate::SellmeierModel;
    use std::sync::Arc;

    #[test]
    fn formatting_precision() {
        assert_eq!(fmt_nm(1582.0183), "1582.02");
        assert_eq!(fmt_thz(189.5), "189.500");
    }

    #[test]
    fn plan_csv_layout() {
        let g = DwdmGrid::default();
        let d = plan_device(&g, DEFAULT_SIGNAL_THZ, None, 40.0, 48.0, Arc::new(SellmeierModel::default())).unwrap();
        let plan = plan_pumps(&g, DEFAULT_SIGNAL_THZ, &LaserSpec::default(), &d).unwrap();
        let mut buf = Vec::new();
        write_plan_csv(&mut buf, &plan).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema=1");
        assert_eq!(lines[1], "port,nu_c_THz,lambda_c_nm,nu_p_THz,lambda_p_nm,in_laser_range,rel_eff");
        assert_eq!(lines.len(), 18);
        assert!(lines[8].starts_with("7,194.700,"), "{}", lines[8]);
        assert!(lines[8].contains(",189.500,1582.02,true,"));
    }

    #[test]
    fn chi_json_round_trip() {
        let chi = kraus_to_chi(&QfcChannelModel::new(0.4, 0.44, 0.2).unwrap()).unwrap();
        let v = chi_to_json(&chi);
        assert_eq!(v["basis"], json!(["I", "X", "Y", "Z"]));
        let back = chi_from_json(&serde_json::from_str(&v.to_string()).unwrap()).unwrap();
        assert_eq!(back, chi);
        let mut bad = v.clone();
        bad["basis"] = json!(["I", "Z", "Y", "X"]);
        assert!(chi_from_json(&bad).is_err());
    }

    #[test]
    fn tomography_json_has_four_entries() {
        let recs = simulate_tomography(&QfcChannelModel::default()).unwrap();
        let v = tomography_to_json(&recs);
        assert_eq!(v.as_array().unwrap().len(), 4);
        assert_eq!(v[3]["input"], "R");
    }

    #[test]
    fn reads_efficiency_csv() {
        let text = "# pump sweep\nP_mW,eta\n0,0\n 50 , 0.2\n\n100,0.35\n";
        let data = read_efficiency_csv(text.as_bytes()).unwrap();
        assert_eq!(data, vec![(0.0, 0.0), (50.0, 0.2), (100.0, 0.35)]);
        assert!(read_efficiency_csv("1,2\nx,3\n".as_bytes()).is_err());
        assert!(read_efficiency_csv("1\n".as_bytes()).is_err());
    }
}

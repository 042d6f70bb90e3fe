use std::path::Path;

use qfchub_core::dwdm::{self, DwdmGrid, LaserSpec};
use qfchub_core::io::{self as qio, fmt_nm, fmt_thz};
use qfchub_core::polarization::{
    apply_channel, fit_efficiency, kraus_to_chi, process_fidelity, pump_balance, reconstruct_chi,
    simulate_tomography, EfficiencyCurveParams, PolarizationState, QfcChannelModel,
};
use qfchub_core::spectral::SpectralPoint;
use qfchub_core::tunability::{
    self, hub_sweep, sweep_peaks, ConstraintMode, HubSweepSpec, PeakOptions, TuningConstraints,
};
use qfchub_core::DeviceConfig;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::{ChannelArgs, Command, ConstraintArgs, PlanArgs};

/// Data to write (if any) and the fields of the summary line.
pub struct Outcome {
    pub data: Option<Vec<u8>>,
    pub summary: Map<String, Value>,
}

fn summary(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn render(
    cfg: &RunConfig,
    csv: impl FnOnce(&mut Vec<u8>) -> qfchub_core::Result<()>,
    json: impl FnOnce() -> Value,
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match cfg.format {
        Format::Csv => csv(&mut buf)?,
        Format::Json => {
            buf = serde_json::to_vec_pretty(&json()).map_err(|e| CliError::Io(e.to_string()))?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

pub fn dispatch(cfg: &RunConfig, command: Command) -> Result<(&'static str, Outcome), CliError> {
    Ok(match command {
        Command::Index { wavelengths } => ("index", index(cfg, &wavelengths)?),
        Command::PmScan {
            signal,
            target,
            window,
            step,
        } => ("pm-scan", pm_scan(cfg, signal, target, window, step)?),
        Command::TuningRange {
            signal,
            target,
            constraint,
        } => ("tuning-range", tuning_range(cfg, signal, target, &constraint)?),
        Command::HubSweep {
            target,
            start,
            end,
            step,
            constraint,
        } => ("hub-sweep", sweep(cfg, target, [start, end, step], &constraint)?),
        Command::Plan(args) => ("plan", plan(cfg, &args)?),
        Command::EfficiencyCurve {
            plan,
            pump_min,
            pump_max,
            step,
        } => ("efficiency-curve", efficiency_curve(cfg, &plan, pump_min, pump_max, step)?),
        Command::Simulate { channel, inputs } => ("simulate", simulate(cfg, &channel, &inputs)?),
        Command::Tomography { channel } => ("tomography", tomography(cfg, &channel)?),
        Command::Fit { input } => ("fit", fit(cfg, &input)?),
        Command::Balance { ccw, cw, total } => ("balance", balance(cfg, &ccw, &cw, total)?),
        Command::ReproduceFigures { output_dir, date } => {
            ("reproduce-figures", reproduce(cfg, &output_dir, date.as_deref())?)
        }
    })
}

fn index(cfg: &RunConfig, wavelengths: &[f64]) -> Result<Outcome, CliError> {
    let m = &cfg.material;
    let t = cfg.temperature_c;
    let mut rows = Vec::with_capacity(wavelengths.len());
    for &nm in wavelengths {
        let um = nm * 1e-3;
        let (n, dn) = m.index_and_derivative(um, t)?;
        rows.push((nm, n, dn, n - um * dn));
    }
    let data = render(
        cfg,
        |buf| {
            use std::io::Write;
            let mut text = format!("# schema={}\nwavelength_nm,n,dn_dlambda_per_um,group_index\n", qio::SCHEMA_VERSION);
            for (nm, n, dn, ng) in &rows {
                text.push_str(&format!("{},{n:.8},{dn:.8e},{ng:.8}\n", fmt_nm(*nm)));
            }
            buf.write_all(text.as_bytes()).map_err(|e| qfchub_core::Error::Parse(e.to_string()))
        },
        || {
            json!({
                "schema": qio::SCHEMA_VERSION,
                "material": m.name(),
                "temperature_c": t,
                "rows": rows.iter().map(|(nm, n, dn, ng)| json!({
                    "wavelength_nm": nm, "n": n, "dn_dlambda_per_um": dn, "group_index": ng
                })).collect::<Vec<_>>(),
            })
        },
    )?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({ "material": m.name(), "rows": rows.len() })),
    })
}

fn device(cfg: &RunConfig, signal_nm: f64, target_nm: f64) -> Result<DeviceConfig, CliError> {
    Ok(DeviceConfig::designed_for(
        SpectralPoint::from_wavelength_nm(signal_nm)?,
        SpectralPoint::from_wavelength_nm(target_nm)?,
        cfg.length_mm,
        cfg.temperature_c,
        cfg.material.clone(),
    )?)
}

pub fn pm_scan(cfg: &RunConfig, signal: f64, target: f64, window: f64, step: f64) -> Result<Outcome, CliError> {
    let d = device(cfg, signal, target)?;
    let pts = tunability::pm_spectrum(signal, target, &d, window, step)?;
    let peak = pts
        .iter()
        .filter_map(|p| p.efficiency.map(|e| (e, p.converted_nm)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let data = render(cfg, |b| qio::write_spectrum_csv(b, &pts), || {
        json!({ "schema": qio::SCHEMA_VERSION, "poling_period_um": d.poling_period_um(), "points": pts })
    })?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "points": pts.len(),
            "poling_period_um": d.poling_period_um(),
            "peak_nm": peak.map(|p| p.1),
            "flagged_points": pts.iter().filter(|p| p.efficiency.is_none()).count(),
        })),
    })
}

fn constraints(cfg: &RunConfig, args: &ConstraintArgs) -> Result<TuningConstraints, CliError> {
    let mut c = cfg.constraints;
    if let Some(v) = args.cutoff {
        c.mode = ConstraintMode::MaxConvertedWavelength(v);
    }
    if let Some(v) = args.separation {
        c.mode = ConstraintMode::MinPumpConvertedSeparation(v);
    }
    if let Some(t) = args.threshold {
        c.efficiency_threshold = t;
    }
    c.validate()?;
    Ok(c)
}

fn tuning_range(cfg: &RunConfig, signal: f64, target: f64, args: &ConstraintArgs) -> Result<Outcome, CliError> {
    let c = constraints(cfg, args)?;
    let r = tunability::tuning_range(signal, target, cfg.length_mm, cfg.temperature_c, &cfg.material, &c)?;
    let data = render(cfg, |b| qio::write_tuning_csv(b, &r), || {
        json!({ "schema": qio::SCHEMA_VERSION, "constraints": c, "result": r })
    })?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "width_nm": r.width_nm,
            "width_THz": r.width_thz,
            "channels": r.channel_count,
            "interval_nm": r.converted_interval_nm,
            "limiting_constraint": r.limiting_constraint.as_str(),
            "poling_period_um": r.poling_period_um,
            "empty": r.empty,
        })),
    })
}

pub fn sweep(cfg: &RunConfig, target: f64, range: [f64; 3], args: &ConstraintArgs) -> Result<Outcome, CliError> {
    let spec = HubSweepSpec {
        signal_start_nm: range[0],
        signal_end_nm: range[1],
        signal_step_nm: range[2],
        target_nm: target,
        length_mm: cfg.length_mm,
        temperature_c: cfg.temperature_c,
        material: cfg.material.clone(),
        constraints: constraints(cfg, args)?,
    };
    let pts = hub_sweep(&spec, cfg.workers)?;
    let peaks: Vec<Value> = sweep_peaks(&pts, &PeakOptions::default())
        .into_iter()
        .map(|(p, pump)| json!({ "center_nm": p.center, "max_at_nm": p.x_at_max, "width_nm": p.height, "pump_nm": pump }))
        .collect();
    let data = render(cfg, |b| qio::write_sweep_csv(b, &pts), || {
        json!({ "schema": qio::SCHEMA_VERSION, "target_nm": target, "points": pts })
    })?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({ "points": pts.len(), "target_nm": target, "peaks": peaks })),
    })
}

fn plan_setup(cfg: &RunConfig, args: &PlanArgs) -> Result<(DwdmGrid, LaserSpec, f64, DeviceConfig), CliError> {
    let mut grid = if args.grid_default { DwdmGrid::default() } else { cfg.grid };
    if let Some(v) = args.anchor {
        grid.anchor_thz = v;
    }
    if let Some(v) = args.spacing {
        grid.spacing_ghz = v;
    }
    if let Some(v) = args.ports {
        grid.port_count = v;
    }
    grid.validate()?;
    let laser = LaserSpec::new(
        args.laser_min.unwrap_or(cfg.laser.min_wavelength_nm),
        args.laser_max.unwrap_or(cfg.laser.max_wavelength_nm),
    )?;
    let signal = args.signal_freq.unwrap_or(cfg.signal_thz);
    let d = dwdm::plan_device(&grid, signal, args.design_freq, cfg.length_mm, cfg.temperature_c, cfg.material.clone())?;
    Ok((grid, laser, signal, d))
}

pub fn plan(cfg: &RunConfig, args: &PlanArgs) -> Result<Outcome, CliError> {
    let (grid, laser, signal, d) = plan_setup(cfg, args)?;
    let p = dwdm::plan_pumps(&grid, signal, &laser, &d)?;
    let data = render(cfg, |b| qio::write_plan_csv(b, &p), || {
        json!({ "schema": qio::SCHEMA_VERSION, "grid": grid, "laser": laser, "plan": p })
    })?;
    let first = p.records.first();
    let last = p.records.last();
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "ports": p.records.len(),
            "signal_THz": signal,
            "poling_period_um": p.poling_period_um,
            "converted_span_nm": [first.map(|r| fmt_nm(r.converted_nm)), last.map(|r| fmt_nm(r.converted_nm))],
            "pump_span_THz": [first.map(|r| fmt_thz(r.pump_thz)), last.map(|r| fmt_thz(r.pump_thz))],
            "all_in_laser_range": p.records.iter().all(|r| r.in_laser_range),
        })),
    })
}

pub fn efficiency_curve(
    cfg: &RunConfig,
    args: &PlanArgs,
    pump_min: Option<f64>,
    pump_max: Option<f64>,
    step: f64,
) -> Result<Outcome, CliError> {
    let (_, laser, signal, d) = plan_setup(cfg, args)?;
    let [lo, hi] = laser.frequency_range_thz();
    let curve = dwdm::relative_efficiency_curve(&d, signal, [pump_min.unwrap_or(lo), pump_max.unwrap_or(hi)], step)?;
    let band = dwdm::band_above(&curve, 0.9);
    let data = render(cfg, |b| qio::write_efficiency_curve_csv(b, &curve), || {
        json!({ "schema": qio::SCHEMA_VERSION, "points": curve })
    })?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "points": curve.len(),
            "band_0.9_THz": band,
            "band_width_THz": band.map(|[a, b]| b - a),
        })),
    })
}

fn channel_model(args: &ChannelArgs) -> Result<QfcChannelModel, CliError> {
    Ok(QfcChannelModel::new(args.eta_cw, args.eta_ccw, args.phase)?.with_depolarizing(args.depolarizing)?)
}

fn named_state(label: &str) -> Result<PolarizationState, CliError> {
    Ok(match label.trim().to_ascii_uppercase().as_str() {
        "H" => PolarizationState::h(),
        "V" => PolarizationState::v(),
        "D" => PolarizationState::d(),
        "A" => PolarizationState::a(),
        "R" => PolarizationState::r(),
        "L" => PolarizationState::l(),
        other => return Err(CliError::Usage(format!("unknown input state '{other}' (use H, V, D, A, R, L)"))),
    })
}

fn simulate(cfg: &RunConfig, args: &ChannelArgs, inputs: &[String]) -> Result<Outcome, CliError> {
    let model = channel_model(args)?;
    let mut rows = Vec::new();
    for label in inputs {
        let (out, p) = apply_channel(&named_state(label)?, &model)?;
        rows.push((label.trim().to_ascii_uppercase(), p, out.bloch_vector(), out.purity()));
    }
    let data = render(
        cfg,
        |buf| {
            use std::io::Write;
            let mut text = format!(
                "# schema={}\ninput,success_probability,bloch_x,bloch_y,bloch_z,purity\n",
                qio::SCHEMA_VERSION
            );
            for (l, p, b, pur) in &rows {
                text.push_str(&format!("{l},{p:.9},{:.9},{:.9},{:.9},{pur:.9}\n", b[0], b[1], b[2]));
            }
            buf.write_all(text.as_bytes()).map_err(|e| qfchub_core::Error::Parse(e.to_string()))
        },
        || {
            json!({
                "schema": qio::SCHEMA_VERSION,
                "model": model,
                "outputs": rows.iter().map(|(l, p, b, pur)| json!({
                    "input": l, "success_probability": p, "bloch": b, "purity": pur
                })).collect::<Vec<_>>(),
            })
        },
    )?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({ "inputs": rows.len(), "closed_form_fidelity": model.closed_form_fidelity() })),
    })
}

fn tomography(cfg: &RunConfig, args: &ChannelArgs) -> Result<Outcome, CliError> {
    let model = channel_model(args)?;
    let records = simulate_tomography(&model)?;
    let chi = reconstruct_chi(&records)?;
    let direct = kraus_to_chi(&model)?;
    let fidelity = process_fidelity(&chi)?;
    let max_dev = chi
        .matrix()
        .iter()
        .zip(direct.matrix().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let data = render(
        cfg,
        |buf| {
            use std::io::Write;
            let mut text = format!("# schema={}\n# basis=I,X,Y,Z\nrow,col,re,im\n", qio::SCHEMA_VERSION);
            for (r, row) in chi.to_rows().iter().enumerate() {
                for (c, z) in row.iter().enumerate() {
                    text.push_str(&format!(
                        "{},{},{:.12e},{:.12e}\n",
                        qfchub_core::polarization::PAULI_LABELS[r],
                        qfchub_core::polarization::PAULI_LABELS[c],
                        z[0],
                        z[1]
                    ));
                }
            }
            buf.write_all(text.as_bytes()).map_err(|e| qfchub_core::Error::Parse(e.to_string()))
        },
        || {
            let mut v = qio::chi_to_json(&chi);
            v["model"] = json!(model);
            v["tomography"] = qio::tomography_to_json(&records);
            v
        },
    )?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "fidelity": fidelity,
            "closed_form_fidelity": model.closed_form_fidelity(),
            "trace": chi.trace(),
            "max_deviation_from_model": max_dev,
        })),
    })
}

fn fit(cfg: &RunConfig, input: &Path) -> Result<Outcome, CliError> {
    let file = std::fs::File::open(input).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let samples = qio::read_efficiency_csv(std::io::BufReader::new(file))?;
    let f = fit_efficiency(&samples)?;
    let data = render(
        cfg,
        |buf| {
            use std::io::Write;
            let text = format!(
                "# schema={}\neta_max,eta_nor_per_mW,residual_norm,samples\n{:.9},{:.9e},{:.6e},{}\n",
                qio::SCHEMA_VERSION,
                f.params.eta_max,
                f.params.eta_nor,
                f.residual_norm,
                samples.len()
            );
            buf.write_all(text.as_bytes()).map_err(|e| qfchub_core::Error::Parse(e.to_string()))
        },
        || json!({ "schema": qio::SCHEMA_VERSION, "fit": f, "samples": samples.len() }),
    )?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "eta_max": f.params.eta_max,
            "eta_nor_per_mW": f.params.eta_nor,
            "peak_power_mW": f.params.peak_power_mw(),
            "residual_norm": f.residual_norm,
            "iterations": f.iterations,
        })),
    })
}

fn balance(cfg: &RunConfig, ccw: &[f64], cw: &[f64], total: f64) -> Result<Outcome, CliError> {
    let a = EfficiencyCurveParams::new(ccw[0], ccw[1])?;
    let b = EfficiencyCurveParams::new(cw[0], cw[1])?;
    let s = pump_balance(&a, &b, total)?;
    let data = render(
        cfg,
        |buf| {
            use std::io::Write;
            let text = format!(
                "# schema={}\np_ccw_mW,p_cw_mW,eta_ccw,eta_cw,balanced\n{:.6},{:.6},{:.9},{:.9},{}\n",
                qio::SCHEMA_VERSION,
                s.p_ccw_mw,
                s.p_cw_mw,
                s.efficiency_ccw,
                s.efficiency_cw,
                s.balanced
            );
            buf.write_all(text.as_bytes()).map_err(|e| qfchub_core::Error::Parse(e.to_string()))
        },
        || json!({ "schema": qio::SCHEMA_VERSION, "split": s }),
    )?;
    Ok(Outcome {
        data: Some(data),
        summary: summary(json!({
            "p_ccw_mW": s.p_ccw_mw,
            "p_cw_mW": s.p_cw_mw,
            "efficiency": 0.5 * (s.efficiency_ccw + s.efficiency_cw),
            "balanced": s.balanced,
        })),
    })
}

fn reproduce(cfg: &RunConfig, base: &Path, date: Option<&str>) -> Result<Outcome, CliError> {
    let date = match date {
        Some(d) => chrono::NaiveDate::parse_from_str(d, "%Y-%m-%d")
            .map_err(|e| CliError::Usage(format!("bad --date '{d}': {e}")))?
            .format("%Y-%m-%d")
            .to_string(),
        None => chrono::Local::now().format("%Y-%m-%d").to_string(),
    };
    let dir = base.join(date);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let with_length = |l: f64| RunConfig {
        length_mm: l,
        ..cfg.clone()
    };
    let cutoff = ConstraintArgs {
        cutoff: Some(1550.0),
        ..ConstraintArgs::default()
    };
    let separation = ConstraintArgs {
        separation: Some(20.0),
        ..ConstraintArgs::default()
    };
    let (l40, l20) = (with_length(40.0), with_length(20.0));

    let jobs: Vec<(&str, Outcome)> = vec![
        ("pm_scan_780nm_L40mm", pm_scan(&l40, 780.0, 1540.0, 10.0, 5.0)?),
        ("pm_scan_780nm_L20mm", pm_scan(&l20, 780.0, 1540.0, 10.0, 5.0)?),
        ("pm_scan_493nm_L40mm", pm_scan(&l40, 493.0, 1540.0, 0.5, 1.0)?),
        ("tuning_780nm_L40mm", tuning_range(&l40, 780.0, 1540.0, &cutoff)?),
        ("tuning_780nm_L20mm", tuning_range(&l20, 780.0, 1540.0, &cutoff)?),
        ("tuning_493nm_L40mm", tuning_range(&l40, 493.0, 1540.0, &separation)?),
        ("hub_sweep_cband", sweep(&l40, 1540.0, [400.0, 1000.0, 1.0], &separation)?),
        ("hub_sweep_oband", sweep(&l40, 1310.0, [400.0, 1000.0, 1.0], &separation)?),
        ("pump_plan", plan(&l40, &PlanArgs::default())?),
        ("efficiency_curve", efficiency_curve(&l40, &PlanArgs::default(), None, None, 1.0)?),
    ];
    let mut files = Vec::new();
    let mut results = Map::new();
    for (stem, outcome) in jobs {
        let name = format!("{stem}.{ext}");
        let path = dir.join(&name);
        if let Some(data) = &outcome.data {
            std::fs::write(&path, data).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        results.insert(stem.to_string(), Value::Object(outcome.summary));
        files.push(name);
    }
    Ok(Outcome {
        data: None,
        summary: summary(json!({ "directory": dir.display().to_string(), "files": files, "results": results })),
    })
}

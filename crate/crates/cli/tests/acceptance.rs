//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qfchub_core::dwdm::{self, DwdmGrid, LaserSpec, DEFAULT_SIGNAL_THZ};
use qfchub_core::polarization::{
    efficiency_model, fit_efficiency, kraus_to_chi, process_fidelity, reconstruct_chi, simulate_tomography,
    EfficiencyCurveParams, QfcChannelModel,
};
use qfchub_core::qpm::{first_order_coefficient, pump_for};
use qfchub_core::tunability::{hub_sweep, sweep_peaks, tuning_range, HubSweepSpec, PeakOptions, TuningConstraints};
use qfchub_core::{SellmeierModel, SpectralPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const T: f64 = 48.0;

struct Check {
    ok: bool,
    detail: String,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            detail: String::new(),
        }
    }

    fn expect(&mut self, what: &str, ok: bool, value: impl std::fmt::Display) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail
            .push_str(&format!("{what} {value}{}", if ok { "" } else { " [out of tolerance]" }));
        self.ok &= ok;
    }

    fn within(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        self.expect(what, (value - target).abs() <= tol, format!("= {value:.4} (want {target} ± {tol})"));
    }

    fn runtime(&mut self, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.expect("runtime", t < limit, format!("{:.2}s (limit {}s)", t.as_secs_f64(), limit.as_secs()));
    }
}

fn material() -> Arc<SellmeierModel> {
    Arc::new(SellmeierModel::default())
}

fn c1_energy_conservation() -> Check {
    let mut c = Check::new();
    let p = pump_for(
        SpectralPoint::from_wavelength_nm(780.0).unwrap(),
        SpectralPoint::from_wavelength_nm(1540.0).unwrap(),
    )
    .unwrap();
    c.within("pump nm", p.wavelength_nm(), 1580.53, 0.01);
    c
}

fn c2_tuning_ranges() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    let m = material();
    let cons = TuningConstraints::with_cutoff(1550.0);
    for (length, width, tol, ch) in [(40.0, 19.5, 1.5, [90, 110]), (20.0, 32.2, 2.5, [150, 175])] {
        let r = tuning_range(780.0, 1540.0, length, T, &m, &cons).unwrap();
        c.within(&format!("L={length} width nm"), r.width_nm, width, tol);
        c.expect(
            &format!("L={length} channels"),
            (ch[0]..=ch[1]).contains(&r.channel_count),
            format!("= {} (want {}..={})", r.channel_count, ch[0], ch[1]),
        );
    }
    c.runtime(start, Duration::from_secs(5));
    c
}

fn c3_narrowband() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    let r = tuning_range(493.0, 1540.0, 40.0, T, &material(), &TuningConstraints::with_separation(20.0)).unwrap();
    c.within("width nm", r.width_nm, 0.2, 0.1);
    c.runtime(start, Duration::from_secs(5));
    c
}

fn band_sweep(c: &mut Check, target: f64, peaks: [(f64, f64); 2], pump: (f64, f64)) {
    let start = Instant::now();
    let spec = HubSweepSpec {
        signal_start_nm: 400.0,
        signal_end_nm: 1000.0,
        signal_step_nm: 1.0,
        target_nm: target,
        length_mm: 40.0,
        temperature_c: T,
        material: material(),
        constraints: TuningConstraints::with_separation(20.0),
    };
    let pts = hub_sweep(&spec, 0).unwrap();
    let found = sweep_peaks(&pts, &PeakOptions::default());
    c.expect("peak count", found.len() == 2, format!("= {} (want 2)", found.len()));
    for (i, (want, tol)) in peaks.iter().enumerate() {
        match found.get(i) {
            Some((p, _)) => c.within(&format!("peak {} nm", i + 1), p.center, *want, *tol),
            None => c.expect(&format!("peak {}", i + 1), false, "missing"),
        }
    }
    match found.get(1) {
        Some((_, p)) => c.within("pump at peak 2 nm", *p, pump.0, pump.1),
        None => c.expect("pump at peak 2", false, "missing"),
    }
    c.runtime(start, Duration::from_secs(60));
}

fn c4_c_band() -> Check {
    let mut c = Check::new();
    band_sweep(&mut c, 1540.0, [(780.0, 15.0), (934.0, 15.0)], (2350.0, 50.0));
    c
}

fn c5_o_band() -> Check {
    let mut c = Check::new();
    band_sweep(&mut c, 1310.0, [(655.0, 15.0), (900.0, 25.0)], (2875.0, 75.0));
    c
}

fn c6_sweet_spot() -> Check {
    let mut c = Check::new();
    let m = SellmeierModel::default();
    let reference = first_order_coefficient(1.540, 1.580, T, &m).unwrap().abs();
    let mut worst = 0.0f64;
    for signal_nm in [700.0, 770.0, 780.0, 850.0, 936.0] {
        let mid = 2.0 * signal_nm * 1e-3;
        let v = first_order_coefficient(mid, mid, T, &m).unwrap();
        c.expect(&format!("exact zero at {}", 2.0 * signal_nm), v == 0.0, format!("{v:e}"));
        worst = worst.max(v.abs());
    }
    c.expect("ratio to working point", worst < 1e-3 * reference, format!("{:e}", worst / reference));
    c
}

fn c7_efficiency_band() -> Check {
    let mut c = Check::new();
    let grid = DwdmGrid::default();
    let d = dwdm::plan_device(&grid, DEFAULT_SIGNAL_THZ, None, 40.0, T, material()).unwrap();
    let curve =
        dwdm::relative_efficiency_curve(&d, DEFAULT_SIGNAL_THZ, LaserSpec::default().frequency_range_thz(), 1.0)
            .unwrap();
    match dwdm::band_above(&curve, 0.9) {
        Some([lo, hi]) => {
            c.within("band width THz", hi - lo, 2.0, 0.5);
            c.expect(
                "contains [188.9, 190.5]",
                lo <= 188.9 && hi >= 190.5,
                format!("band [{lo:.3}, {hi:.3}]"),
            );
        }
        None => c.expect("band", false, "none above 0.9"),
    }
    c
}

fn c8_dwdm_plan() -> Check {
    let mut c = Check::new();
    let grid = DwdmGrid::default();
    c.within("port 1 THz", grid.port_frequency(1).unwrap(), 194.850, 1e-9);
    c.within("port 16 THz", grid.port_frequency(16).unwrap(), 194.475, 1e-9);
    let d = dwdm::plan_device(&grid, DEFAULT_SIGNAL_THZ, None, 40.0, T, material()).unwrap();
    let plan = dwdm::plan_pumps(&grid, DEFAULT_SIGNAL_THZ, &LaserSpec::default(), &d).unwrap();
    c.within("span start nm", plan.records[0].converted_nm, 1538.66, 0.01);
    c.within("span end nm", plan.records[15].converted_nm, 1541.63, 0.01);
    c.within("port 7 pump nm", plan.records[6].pump_nm, 1582.02, 0.01);
    c.expect(
        "all pumps in laser range",
        plan.records.iter().all(|r| r.in_laser_range),
        plan.records.iter().filter(|r| r.in_laser_range).count(),
    );
    c
}

fn c9_polarization() -> Check {
    let mut c = Check::new();
    let fid = |m: QfcChannelModel| process_fidelity(&kraus_to_chi(&m).unwrap()).unwrap();
    c.within("balanced fidelity", fid(QfcChannelModel::balanced(0.5)), 1.0, 1e-9);
    c.within("phase pi/2 fidelity", fid(QfcChannelModel::new(0.5, 0.5, PI / 2.0).unwrap()), 0.5, 1e-9);
    c.within("(0.40, 0.44) fidelity", fid(QfcChannelModel::new(0.40, 0.44, 0.0).unwrap()), 0.9994, 0.0005);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = QfcChannelModel::new(
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let want = kraus_to_chi(&m).unwrap();
        let got = reconstruct_chi(&simulate_tomography(&m).unwrap()).unwrap();
        let err = got
            .matrix()
            .iter()
            .zip(want.matrix().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(err);
    }
    c.expect("round-trip max error", worst < 1e-9, format!("{worst:e}"));
    c
}

fn c10_fit() -> Check {
    let mut c = Check::new();
    let powers: Vec<f64> = (0..=15).map(|i| 20.0 * i as f64).collect();
    for (a, b) in [(0.44, 0.013), (0.40, 0.018)] {
        let truth = EfficiencyCurveParams::new(a, b).unwrap();
        let data: Vec<(f64, f64)> = powers.iter().map(|&p| (p, efficiency_model(p, &truth))).collect();
        let f = fit_efficiency(&data).unwrap().params;
        let err = (f.eta_max / a - 1.0).abs().max((f.eta_nor / b - 1.0).abs());
        c.expect(&format!("noiseless ({a}, {b}) rel err"), err < 0.01, format!("{err:e}"));
    }
    let noise = Normal::new(0.0, 0.02).unwrap();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (a, b) in [(0.44, 0.013), (0.40, 0.018)] {
            let truth = EfficiencyCurveParams::new(a, b).unwrap();
            let data: Vec<(f64, f64)> = powers
                .iter()
                .map(|&p| (p, efficiency_model(p, &truth) * (1.0 + noise.sample(&mut rng))))
                .collect();
            match fit_efficiency(&data) {
                Ok(f) => {
                    let err = (f.params.eta_max / a - 1.0).abs().max((f.params.eta_nor / b - 1.0).abs());
                    worst = worst.max(err);
                }
                Err(_) => failures += 1,
            }
        }
    }
    c.expect("noisy worst rel err", worst < 0.10 && failures == 0, format!("{worst:.4} ({failures} fit failures)"));
    c
}

fn c11_determinism() -> Check {
    let mut c = Check::new();
    let dir = std::env::temp_dir().join(format!("qfchub-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for w in ["1", "4", "8"] {
        let path = dir.join(format!("sweep_w{w}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_qfchub"))
            .args(["hub-sweep", "--separation", "20", "--workers", w, "--output"])
            .arg(&path)
            .env_remove("QFCHUB_CONFIG")
            .output()
            .expect("binary runs");
        c.expect(&format!("workers={w} exit"), status.status.success(), status.status);
        outputs.push(std::fs::read(&path).unwrap_or_default());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
    c.expect("byte-identical", same, format!("{} bytes", outputs[0].len()));
    let _ = std::fs::remove_dir_all(&dir);
    c
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("energy conservation", c1_energy_conservation),
        ("tuning ranges at 780 nm", c2_tuning_ranges),
        ("narrowband 493 nm", c3_narrowband),
        ("C-band hub sweep", c4_c_band),
        ("O-band hub sweep", c5_o_band),
        ("sweet-spot coefficient", c6_sweet_spot),
        ("relative-efficiency band", c7_efficiency_band),
        ("DWDM pump plan", c8_dwdm_plan),
        ("polarization channel", c9_polarization),
        ("efficiency fit", c10_fit),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        if !c.ok {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if c.ok { "PASS" } else { "FAIL" }, i + 1, c.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

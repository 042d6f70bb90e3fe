//! Pump-tuning ranges of a fixed-period device.
//!
//! A device is designed for `signal → target`; the pump is then scanned and the
//! converted frequency follows by energy conservation. The tuning range is the
//! contiguous band of converted wavelengths around the target where the
//! phase-matching efficiency stays above a fraction of its peak (the design
//! point, where it equals 1) and the Raman-noise constraint holds.
//!
//! Edges are located by a coarse outward scan followed by bisection.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};
use crate::qpm::{first_order_coefficient, pump_for, DeviceConfig, InteractionTriple};
use crate::spectral::{SpectralPoint, SPEED_OF_LIGHT_NM_THZ};

/// Raman-noise rule applied on top of the efficiency threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "nm", rename_all = "snake_case")]
pub enum ConstraintMode {
    /// λ_c ≤ cutoff, together with λ_c < λ_p.
    MaxConvertedWavelength(f64),
    /// Pump and converted wavelengths stay at least this far apart, on the
    /// same side of each other as at the design point.
    MinPumpConvertedSeparation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningConstraints {
    /// Fraction of the peak efficiency that bounds the range.
    pub efficiency_threshold: f64,
    pub mode: ConstraintMode,
    /// Largest converted-frequency excursion scanned on each side (THz).
    pub scan_halfwidth_thz: f64,
    pub coarse_step_ghz: f64,
    /// Edge resolution after bisection (GHz).
    pub refine_step_ghz: f64,
    /// Channel spacing used for the channel count (GHz).
    pub channel_spacing_ghz: f64,
}

impl Default for TuningConstraints {
    fn default() -> Self {
        Self {
            efficiency_threshold: 0.9,
            mode: ConstraintMode::MinPumpConvertedSeparation(20.0),
            scan_halfwidth_thz: 50.0,
            coarse_step_ghz: 5.0,
            refine_step_ghz: 0.1,
            channel_spacing_ghz: 25.0,
        }
    }
}

impl TuningConstraints {
    pub fn with_cutoff(cutoff_nm: f64) -> Self {
        Self {
            mode: ConstraintMode::MaxConvertedWavelength(cutoff_nm),
            ..Self::default()
        }
    }

    pub fn with_separation(separation_nm: f64) -> Self {
        Self {
            mode: ConstraintMode::MinPumpConvertedSeparation(separation_nm),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.efficiency_threshold;
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::domain(format!("efficiency threshold must lie in (0, 1), got {t}")));
        }
        let positive = [
            ("scan half-width", self.scan_halfwidth_thz),
            ("coarse step", self.coarse_step_ghz),
            ("refine step", self.refine_step_ghz),
            ("channel spacing", self.channel_spacing_ghz),
        ];
        for (what, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{what} must be positive, got {v}")));
            }
        }
        match self.mode {
            ConstraintMode::MaxConvertedWavelength(v) if !(v > 0.0) => {
                Err(Error::domain(format!("cutoff wavelength must be positive, got {v} nm")))
            }
            ConstraintMode::MinPumpConvertedSeparation(v) if !(v >= 0.0) => {
                Err(Error::domain(format!("separation must be non-negative, got {v} nm")))
            }
            _ => Ok(()),
        }
    }
}

/// What stopped the tuning range from growing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitingConstraint {
    Threshold,
    Cutoff,
    Separation,
    ScanEdge,
}

impl LimitingConstraint {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitingConstraint::Threshold => "threshold",
            LimitingConstraint::Cutoff => "cutoff",
            LimitingConstraint::Separation => "separation",
            LimitingConstraint::ScanEdge => "scan_edge",
        }
    }

    // Raman rules outrank the scan window, which outranks the efficiency threshold.
    fn rank(self) -> u8 {
        match self {
            LimitingConstraint::Cutoff => 3,
            LimitingConstraint::Separation => 2,
            LimitingConstraint::ScanEdge => 1,
            LimitingConstraint::Threshold => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub signal_nm: f64,
    pub target_nm: f64,
    pub pump_center_nm: f64,
    pub poling_period_um: f64,
    /// Converted-wavelength interval `[lo, hi]` in nm.
    pub converted_interval_nm: [f64; 2],
    pub width_nm: f64,
    pub width_thz: f64,
    pub channel_count: u64,
    pub limiting_constraint: LimitingConstraint,
    /// What bounds the short-wavelength edge.
    pub lower_limit: LimitingConstraint,
    /// What bounds the long-wavelength edge.
    pub upper_limit: LimitingConstraint,
    /// True when the design point itself violates a constraint.
    pub empty: bool,
}

impl TuningResult {
    /// Geometric-mean wavelength, for which c·Δλ/λ² equals the frequency width exactly.
    pub fn center_nm(&self) -> f64 {
        (self.converted_interval_nm[0] * self.converted_interval_nm[1]).sqrt()
    }
}

/// Number of whole channels of `spacing_ghz` that fit in `width_thz`.
pub fn channel_count(width_thz: f64, spacing_ghz: f64) -> u64 {
    if !(width_thz > 0.0) || !(spacing_ghz > 0.0) {
        return 0;
    }
    // Guard against 2.0/0.025 landing a hair below 80.
    (width_thz * 1e3 / spacing_ghz * (1.0 + 1e-12)).floor() as u64
}

struct Scanner<'a> {
    device: &'a DeviceConfig,
    signal: SpectralPoint,
    center_thz: f64,
    design_sign: f64,
    constraints: &'a TuningConstraints,
}

impl Scanner<'_> {
    fn classify(&self, converted_thz: f64) -> std::result::Result<(), LimitingConstraint> {
        let nu_s = self.signal.frequency_thz();
        if !(converted_thz > 0.0 && converted_thz < nu_s) {
            return Err(LimitingConstraint::ScanEdge);
        }
        let lc = SPEED_OF_LIGHT_NM_THZ / converted_thz;
        let lp = SPEED_OF_LIGHT_NM_THZ / (nu_s - converted_thz);
        match self.constraints.mode {
            ConstraintMode::MaxConvertedWavelength(cutoff) => {
                if lc > cutoff {
                    return Err(LimitingConstraint::Cutoff);
                }
                if lc >= lp {
                    return Err(LimitingConstraint::Separation);
                }
            }
            ConstraintMode::MinPumpConvertedSeparation(sep) => {
                if self.design_sign * (lp - lc) < sep {
                    return Err(LimitingConstraint::Separation);
                }
            }
        }
        let converted = SpectralPoint::from_frequency_thz(converted_thz).map_err(|_| LimitingConstraint::ScanEdge)?;
        let triple = InteractionTriple::from_signal_converted(self.signal, converted)
            .map_err(|_| LimitingConstraint::ScanEdge)?;
        match self.device.efficiency(&triple) {
            Ok(eff) if eff >= self.constraints.efficiency_threshold => Ok(()),
            Ok(_) => Err(LimitingConstraint::Threshold),
            Err(_) => Err(LimitingConstraint::ScanEdge),
        }
    }

    /// Outermost passing frequency in direction `dir` (±1) and what stopped it.
    fn edge(&self, dir: f64) -> (f64, LimitingConstraint) {
        let step = self.constraints.coarse_step_ghz * 1e-3;
        let half = self.constraints.scan_halfwidth_thz;
        let refine = self.constraints.refine_step_ghz * 1e-3;
        let mut good = self.center_thz;
        let mut k: u64 = 1;
        let (mut bad, mut reason) = loop {
            let offset = (k as f64 * step).min(half);
            let nu = self.center_thz + dir * offset;
            match self.classify(nu) {
                Ok(()) if offset >= half => return (nu, LimitingConstraint::ScanEdge),
                Ok(()) => {
                    good = nu;
                    k += 1;
                }
                Err(r) => break (nu, r),
            }
        };
        while (bad - good).abs() > refine {
            let mid = 0.5 * (good + bad);
            match self.classify(mid) {
                Ok(()) => good = mid,
                Err(r) => {
                    bad = mid;
                    reason = r;
                }
            }
        }
        (good, reason)
    }
}

/// Tuning range of a device designed for `signal_nm → target_nm`.
pub fn tuning_range(
    signal_nm: f64,
    target_nm: f64,
    length_mm: f64,
    temperature_c: f64,
    material: &Arc<SellmeierModel>,
    constraints: &TuningConstraints,
) -> Result<TuningResult> {
    constraints.validate()?;
    let signal = SpectralPoint::from_wavelength_nm(signal_nm)?;
    let target = SpectralPoint::from_wavelength_nm(target_nm)?;
    let device = DeviceConfig::designed_for(signal, target, length_mm, temperature_c, material.clone())?;
    tuning_range_for_device(signal, target, &device, constraints)
}

/// Tuning range of an existing device around `target`.
pub fn tuning_range_for_device(
    signal: SpectralPoint,
    target: SpectralPoint,
    device: &DeviceConfig,
    constraints: &TuningConstraints,
) -> Result<TuningResult> {
    constraints.validate()?;
    let pump = pump_for(signal, target)?;
    let design_sign = if pump.wavelength_nm() >= target.wavelength_nm() { 1.0 } else { -1.0 };
    let scanner = Scanner {
        device,
        signal,
        center_thz: target.frequency_thz(),
        design_sign,
        constraints,
    };
    let base = TuningResult {
        signal_nm: signal.wavelength_nm(),
        target_nm: target.wavelength_nm(),
        pump_center_nm: pump.wavelength_nm(),
        poling_period_um: device.poling_period_um(),
        converted_interval_nm: [target.wavelength_nm(); 2],
        width_nm: 0.0,
        width_thz: 0.0,
        channel_count: 0,
        limiting_constraint: LimitingConstraint::Threshold,
        lower_limit: LimitingConstraint::Threshold,
        upper_limit: LimitingConstraint::Threshold,
        empty: true,
    };
    if let Err(reason) = scanner.classify(scanner.center_thz) {
        return Ok(TuningResult {
            limiting_constraint: reason,
            lower_limit: reason,
            upper_limit: reason,
            ..base
        });
    }
    // Higher frequency is the short-wavelength edge.
    let (nu_hi, lower_limit) = scanner.edge(1.0);
    let (nu_lo, upper_limit) = scanner.edge(-1.0);
    let lo_nm = SPEED_OF_LIGHT_NM_THZ / nu_hi;
    let hi_nm = SPEED_OF_LIGHT_NM_THZ / nu_lo;
    let width_thz = nu_hi - nu_lo;
    let limiting = if lower_limit.rank() >= upper_limit.rank() { lower_limit } else { upper_limit };
    Ok(TuningResult {
        converted_interval_nm: [lo_nm, hi_nm],
        width_nm: hi_nm - lo_nm,
        width_thz,
        channel_count: channel_count(width_thz, constraints.channel_spacing_ghz),
        limiting_constraint: limiting,
        lower_limit,
        upper_limit,
        empty: false,
        ..base
    })
}

/// One sample of a phase-matching spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub converted_thz: f64,
    pub converted_nm: f64,
    pub pump_nm: f64,
    /// `None` where a wavelength leaves the material model's fitted range.
    pub efficiency: Option<f64>,
}

/// Phase-matching efficiency versus converted frequency, ascending in frequency,
/// over `target ± window_thz` in steps of `step_ghz`.
pub fn pm_spectrum(
    signal_nm: f64,
    target_nm: f64,
    device: &DeviceConfig,
    window_thz: f64,
    step_ghz: f64,
) -> Result<Vec<SpectrumPoint>> {
    if !(window_thz > 0.0 && step_ghz > 0.0) {
        return Err(Error::domain("spectrum window and step must be positive"));
    }
    let signal = SpectralPoint::from_wavelength_nm(signal_nm)?;
    let center = SpectralPoint::from_wavelength_nm(target_nm)?.frequency_thz();
    let step = step_ghz * 1e-3;
    let n = (window_thz / step + 1e-9).floor() as i64;
    let mut out = Vec::with_capacity((2 * n + 1) as usize);
    for k in -n..=n {
        let nu_c = center + k as f64 * step;
        if !(nu_c > 0.0 && nu_c < signal.frequency_thz()) {
            continue;
        }
        let converted = SpectralPoint::from_frequency_thz(nu_c)?;
        let triple = InteractionTriple::from_signal_converted(signal, converted)?;
        let efficiency = match device.efficiency(&triple) {
            Ok(e) => Some(e),
            Err(e) if e.is_validity() => None,
            Err(e) => return Err(e),
        };
        out.push(SpectrumPoint {
            converted_thz: nu_c,
            converted_nm: converted.wavelength_nm(),
            pump_nm: triple.pump.wavelength_nm(),
            efficiency,
        });
    }
    Ok(out)
}

/// Inputs of a hub-wavelength sweep.
#[derive(Debug, Clone)]
pub struct HubSweepSpec {
    pub signal_start_nm: f64,
    pub signal_end_nm: f64,
    pub signal_step_nm: f64,
    pub target_nm: f64,
    pub length_mm: f64,
    pub temperature_c: f64,
    pub material: Arc<SellmeierModel>,
    pub constraints: TuningConstraints,
}

impl HubSweepSpec {
    /// Signal wavelengths `start + i·step`, inclusive of the end point.
    pub fn signals(&self) -> Result<Vec<f64>> {
        let (a, b, s) = (self.signal_start_nm, self.signal_end_nm, self.signal_step_nm);
        if !(s > 0.0 && a > 0.0 && b >= a) {
            return Err(Error::domain(format!("invalid signal range [{a}, {b}] nm with step {s} nm")));
        }
        let n = ((b - a) / s + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| a + i as f64 * s).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HubSweepPoint {
    pub signal_nm: f64,
    pub tuning: TuningResult,
}

/// Tuning range for every signal wavelength of `spec`, in ascending signal order.
///
/// `workers` sets the thread count (0 uses the rayon default). The output does
/// not depend on it.
pub fn hub_sweep(spec: &HubSweepSpec, workers: usize) -> Result<Vec<HubSweepPoint>> {
    spec.constraints.validate()?;
    let signals = spec.signals()?;
    let run = || {
        signals
            .par_iter()
            .map(|&signal_nm| {
                tuning_range(
                    signal_nm,
                    spec.target_nm,
                    spec.length_mm,
                    spec.temperature_c,
                    &spec.material,
                    &spec.constraints,
                )
                .map(|tuning| HubSweepPoint { signal_nm, tuning })
            })
            .collect::<Result<Vec<_>>>()
    };
    if workers == 0 {
        return run();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start {workers} workers: {e}")))?;
    pool.install(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweetSpotReport {
    pub signal_nm: f64,
    pub target_nm: f64,
    pub pump_nm: f64,
    /// Group-index difference N_g(λ_c0) − N_g(λ_p0).
    pub first_order_coefficient: f64,
    /// 2·λ_signal, where pump and converted wavelengths coincide.
    pub midpoint_nm: f64,
    /// Both λ_c0 and λ_p0 lie within `tolerance_nm` of the midpoint.
    pub is_second_harmonic_midpoint: bool,
    pub tolerance_nm: f64,
}

/// Default distance from the degenerate point within which a design counts as
/// a second-harmonic sweet spot.
pub const SWEET_SPOT_TOLERANCE_NM: f64 = 30.0;

pub fn sweet_spot_report(
    signal_nm: f64,
    target_nm: f64,
    temperature_c: f64,
    material: &SellmeierModel,
    tolerance_nm: f64,
) -> Result<SweetSpotReport> {
    let triple = InteractionTriple::from_wavelengths_nm(signal_nm, target_nm)?;
    let pump_nm = triple.pump.wavelength_nm();
    let coef = first_order_coefficient(target_nm * 1e-3, pump_nm * 1e-3, temperature_c, material)?;
    let midpoint_nm = 2.0 * signal_nm;
    let near = (target_nm - midpoint_nm).abs() <= tolerance_nm && (pump_nm - midpoint_nm).abs() <= tolerance_nm;
    Ok(SweetSpotReport {
        signal_nm,
        target_nm,
        pump_nm,
        first_order_coefficient: coef,
        midpoint_nm,
        is_second_harmonic_midpoint: near,
        tolerance_nm,
    })
}

/// Peak-picking knobs for sweep curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakOptions {
    /// Peaks closer than this (in x units) are merged, keeping the taller one.
    pub min_distance: f64,
    /// Minimum prominence as a fraction of the peak height.
    pub min_relative_prominence: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            min_distance: 30.0,
            min_relative_prominence: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Sample index of the maximum.
    pub index: usize,
    pub x_at_max: f64,
    pub height: f64,
    pub prominence: f64,
    /// Interpolated half-height crossings around the maximum.
    pub half_height_bounds: [f64; 2],
    /// Midpoint of the half-height bounds.
    pub center: f64,
}

/// Local maxima of `y(x)` after distance merging and a prominence cut.
///
/// `x` must be strictly increasing. Flat tops report their middle sample.
pub fn find_peaks(x: &[f64], y: &[f64], opts: &PeakOptions) -> Vec<Peak> {
    assert_eq!(x.len(), y.len(), "x and y must have equal length");
    let n = y.len();
    let mut candidates = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                candidates.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    // Tallest first; ties resolve to the lower index so the result is order-stable.
    let mut order = candidates.clone();
    order.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for idx in order {
        if kept.iter().all(|&k| (x[k] - x[idx]).abs() >= opts.min_distance) {
            kept.push(idx);
        }
    }
    kept.sort_unstable();

    kept.into_iter()
        .filter_map(|idx| {
            let h = y[idx];
            let prominence = h - base_level(y, idx);
            if prominence < opts.min_relative_prominence * h {
                return None;
            }
            let bounds = half_height_bounds(x, y, idx);
            Some(Peak {
                index: idx,
                x_at_max: x[idx],
                height: h,
                prominence,
                half_height_bounds: bounds,
                center: 0.5 * (bounds[0] + bounds[1]),
            })
        })
        .collect()
}

/// Higher of the two minima reached before the curve climbs above the peak on each side.
fn base_level(y: &[f64], idx: usize) -> f64 {
    let h = y[idx];
    let mut left = h;
    for &v in y[..idx].iter().rev() {
        if v > h {
            break;
        }
        left = left.min(v);
    }
    let mut right = h;
    for &v in &y[idx + 1..] {
        if v > h {
            break;
        }
        right = right.min(v);
    }
    left.max(right)
}

fn half_height_bounds(x: &[f64], y: &[f64], idx: usize) -> [f64; 2] {
    let half = 0.5 * y[idx];
    let cross = |a: usize, b: usize| {
        // a above half, b below
        let t = (y[a] - half) / (y[a] - y[b]);
        x[a] + t * (x[b] - x[a])
    };
    let mut lo = idx;
    while lo > 0 && y[lo - 1] >= half {
        lo -= 1;
    }
    let left = if lo == 0 { x[0] } else { cross(lo, lo - 1) };
    let mut hi = idx;
    while hi + 1 < y.len() && y[hi + 1] >= half {
        hi += 1;
    }
    let right = if hi + 1 == y.len() { x[hi] } else { cross(hi, hi + 1) };
    [left, right]
}

/// Peaks of a hub sweep's width curve (nm), with the pump wavelength at each peak center.
pub fn sweep_peaks(points: &[HubSweepPoint], opts: &PeakOptions) -> Vec<(Peak, f64)> {
    let x: Vec<f64> = points.iter().map(|p| p.signal_nm).collect();
    let y: Vec<f64> = points.iter().map(|p| p.tuning.width_nm).collect();
    let target = points.first().map(|p| p.tuning.target_nm).unwrap_or(f64::NAN);
    find_peaks(&x, &y, opts)
        .into_iter()
        .map(|pk| {
            let pump = 1.0 / (1.0 / pk.center - 1.0 / target);
            (pk, pump)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DEFAULT_TEMPERATURE_C;
    use proptest::prelude::*;

    const T: f64 = DEFAULT_TEMPERATURE_C;

    fn jundt() -> Arc<SellmeierModel> {
        Arc::new(SellmeierModel::default())
    }

    #[test]
    fn channel_count_examples() {
        assert_eq!(channel_count(2.465, 25.0), 98);
        assert_eq!(channel_count(4.071, 25.0), 162);
        assert_eq!(channel_count(0.0, 25.0), 0);
        assert_eq!(channel_count(2.0, 25.0), 80);
    }

    #[test]
    fn nm_widths_convert_to_expected_channel_counts() {
        // 19.5 nm and 32.2 nm centred on 1540 nm.
        let thz = |w: f64| SPEED_OF_LIGHT_NM_THZ * w / (1540.0 * 1540.0);
        assert!((thz(19.5) - 2.465).abs() < 1e-3);
        assert!((thz(32.2) - 4.071).abs() < 1e-3);
        assert_eq!(channel_count(thz(19.5), 25.0), 98);
        assert_eq!(channel_count(thz(32.2), 25.0), 162);
    }

    #[test]
    fn rubidium_to_c_band_with_cutoff() {
        let r = tuning_range(780.0, 1540.0, 40.0, T, &jundt(), &TuningConstraints::with_cutoff(1550.0)).unwrap();
        assert!((r.width_nm - 19.5).abs() < 1.5, "{r:?}");
        assert_eq!(r.upper_limit, LimitingConstraint::Cutoff);
        assert_eq!(r.lower_limit, LimitingConstraint::Threshold);
        assert_eq!(r.limiting_constraint, LimitingConstraint::Cutoff);
        assert!((r.converted_interval_nm[1] - 1550.0).abs() < 1e-3);
        assert!(!r.empty);
    }

    #[test]
    fn barium_line_is_narrowband() {
        let r = tuning_range(493.0, 1540.0, 40.0, T, &jundt(), &TuningConstraints::with_separation(20.0)).unwrap();
        assert!((r.width_nm - 0.2).abs() < 0.1, "{r:?}");
        assert_eq!(r.limiting_constraint, LimitingConstraint::Threshold);
    }

    #[test]
    fn width_invariants_hold() {
        let r = tuning_range(780.0, 1540.0, 20.0, T, &jundt(), &TuningConstraints::with_cutoff(1550.0)).unwrap();
        let c = r.center_nm();
        let from_nm = SPEED_OF_LIGHT_NM_THZ * r.width_nm / (c * c);
        assert!((from_nm / r.width_thz - 1.0).abs() < 1e-6);
        assert_eq!(r.channel_count, channel_count(r.width_thz, 25.0));
    }

    #[test]
    fn center_violating_constraint_gives_empty_range() {
        // 493 nm puts the pump at ~725 nm, below the converted wavelength.
        let r = tuning_range(493.0, 1540.0, 40.0, T, &jundt(), &TuningConstraints::with_cutoff(1550.0)).unwrap();
        assert!(r.empty);
        assert_eq!(r.width_nm, 0.0);
        assert_eq!(r.channel_count, 0);
        assert_eq!(r.limiting_constraint, LimitingConstraint::Separation);
        // Target beyond the cutoff.
        let r = tuning_range(780.0, 1555.0, 40.0, T, &jundt(), &TuningConstraints::with_cutoff(1550.0)).unwrap();
        assert!(r.empty);
        assert_eq!(r.limiting_constraint, LimitingConstraint::Cutoff);
        // Near-degenerate design with 20 nm separation.
        let r = tuning_range(770.0, 1540.0, 40.0, T, &jundt(), &TuningConstraints::with_separation(20.0)).unwrap();
        assert!(r.empty);
    }

    #[test]
    fn narrow_scan_window_reports_scan_edge() {
        let c = TuningConstraints {
            scan_halfwidth_thz: 0.2,
            ..TuningConstraints::with_cutoff(1550.0)
        };
        let r = tuning_range(780.0, 1540.0, 40.0, T, &jundt(), &c).unwrap();
        assert_eq!(r.lower_limit, LimitingConstraint::ScanEdge);
        assert!((r.width_thz - 0.4).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_constraints() {
        let mut c = TuningConstraints::default();
        c.efficiency_threshold = 1.0;
        assert!(tuning_range(780.0, 1540.0, 40.0, T, &jundt(), &c).is_err());
        let c = TuningConstraints {
            coarse_step_ghz: 0.0,
            ..TuningConstraints::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn spectrum_shows_twin_peaks_for_rubidium() {
        let d = DeviceConfig::designed_for(
            SpectralPoint::from_wavelength_nm(780.0).unwrap(),
            SpectralPoint::from_wavelength_nm(1540.0).unwrap(),
            40.0,
            T,
            jundt(),
        )
        .unwrap();
        let s = pm_spectrum(780.0, 1540.0, &d, 8.0, 5.0).unwrap();
        assert!(s.windows(2).all(|w| w[0].converted_thz < w[1].converted_thz));
        let at = |nm: f64| {
            s.iter()
                .min_by(|a, b| (a.converted_nm - nm).abs().total_cmp(&(b.converted_nm - nm).abs()))
                .unwrap()
        };
        assert_eq!(at(1540.0).efficiency, Some(1.0));
        assert!(at(1580.5).efficiency.unwrap() > 0.99);
        assert!(at(1560.0).efficiency.unwrap() > 0.9);
        assert!(at(1500.0).efficiency.unwrap() < 0.1);
        for p in &s {
            let e = p.efficiency.unwrap();
            assert!((0.0..=1.0).contains(&e));
            let sum = SPEED_OF_LIGHT_NM_THZ / p.converted_nm + SPEED_OF_LIGHT_NM_THZ / p.pump_nm;
            assert!((sum / (SPEED_OF_LIGHT_NM_THZ / 780.0) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn spectrum_flags_points_outside_validity() {
        let d = DeviceConfig::designed_for(
            SpectralPoint::from_wavelength_nm(1000.0).unwrap(),
            SpectralPoint::from_wavelength_nm(1540.0).unwrap(),
            40.0,
            T,
            jundt(),
        )
        .unwrap();
        // Pump is 2852 nm at the center; 200 THz downwards pushes it past 5 µm.
        let s = pm_spectrum(1000.0, 1540.0, &d, 200.0, 1000.0).unwrap();
        assert!(s.iter().any(|p| p.efficiency.is_none()));
        assert!(s.iter().any(|p| p.efficiency.is_some()));
    }

    #[test]
    fn sweet_spot_reports() {
        let m = SellmeierModel::default();
        let r = sweet_spot_report(780.0, 1540.0, T, &m, SWEET_SPOT_TOLERANCE_NM).unwrap();
        assert_eq!(r.midpoint_nm, 1560.0);
        assert!(r.is_second_harmonic_midpoint);
        let r = sweet_spot_report(700.0, 1540.0, T, &m, SWEET_SPOT_TOLERANCE_NM).unwrap();
        assert!(!r.is_second_harmonic_midpoint);
        let a = first_order_coefficient(1.540, 1.580, T, &m).unwrap();
        let b = first_order_coefficient(1.540, 1.700, T, &m).unwrap();
        assert!(a.abs() < b.abs());
    }

    #[test]
    fn peaks_on_synthetic_curve() {
        let x: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| 1.0 + 10.0 * (-((v - 50.0) / 5.0).powi(2)).exp() + 4.0 * (-((v - 150.0) / 3.0).powi(2)).exp())
            .collect();
        let p = find_peaks(&x, &y, &PeakOptions::default());
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].x_at_max, 50.0);
        assert!((p[0].center - 50.0).abs() < 1e-9);
        assert_eq!(p[1].x_at_max, 150.0);
        // A shoulder closer than the merge distance is dropped.
        let mut y2 = y.clone();
        y2[65] = 6.0;
        let p = find_peaks(&x, &y2, &PeakOptions::default());
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn flat_top_reports_middle() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [0.0, 1.0, 3.0, 3.0, 3.0, 1.0, 0.0];
        let p = find_peaks(&x, &y, &PeakOptions::default());
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].index, 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn raising_threshold_never_widens(signal in 700.0f64..1000.0, t1 in 0.5f64..0.95, dt in 0.0f64..0.04) {
            prop_assume!((signal - 770.0).abs() > 8.0);
            let m = jundt();
            let lo = TuningConstraints { efficiency_threshold: t1, ..TuningConstraints::default() };
            let hi = TuningConstraints { efficiency_threshold: t1 + dt, ..TuningConstraints::default() };
            let a = tuning_range(signal, 1540.0, 40.0, T, &m, &lo).unwrap();
            let b = tuning_range(signal, 1540.0, 40.0, T, &m, &hi).unwrap();
            prop_assert!(b.width_thz <= a.width_thz + 2e-4);
        }

        #[test]
        fn shorter_crystal_never_narrower(signal in 700.0f64..1000.0) {
            prop_assume!((signal - 770.0).abs() > 8.0);
            let m = jundt();
            let c = TuningConstraints::default();
            let long = tuning_range(signal, 1540.0, 40.0, T, &m, &c).unwrap();
            let short = tuning_range(signal, 1540.0, 20.0, T, &m, &c).unwrap();
            prop_assert!(short.width_thz >= long.width_thz - 2e-4);
        }
    }
}

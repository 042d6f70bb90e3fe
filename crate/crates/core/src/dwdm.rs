//! ITU-T grid ports and the pump plan that routes a fixed signal to each port.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};
use crate::qpm::{DeviceConfig, InteractionTriple};
use crate::spectral::{SpectralPoint, SPEED_OF_LIGHT_NM_THZ};

/// Signal frequency that reproduces the quoted 189.5 THz pump for port 7
/// (≈ 780.30 nm rather than exactly 780 nm).
pub const DEFAULT_SIGNAL_THZ: f64 = 384.200;

/// Ports numbered from 1 at the anchor, stepping down in frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwdmGrid {
    pub anchor_thz: f64,
    pub spacing_ghz: f64,
    pub port_count: u32,
}

impl Default for DwdmGrid {
    fn default() -> Self {
        Self {
            anchor_thz: 194.850,
            spacing_ghz: 25.0,
            port_count: 16,
        }
    }
}

impl DwdmGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.anchor_thz > 0.0 && self.spacing_ghz > 0.0 && self.port_count > 0) {
            return Err(Error::domain(format!("invalid grid {self:?}")));
        }
        if self.port_frequency_unchecked(self.port_count) <= 0.0 {
            return Err(Error::domain("grid extends to non-positive frequency"));
        }
        Ok(())
    }

    fn port_frequency_unchecked(&self, port: u32) -> f64 {
        self.anchor_thz - f64::from(port - 1) * self.spacing_ghz * 1e-3
    }

    pub fn port_frequency(&self, port: u32) -> Result<f64> {
        if port == 0 || port > self.port_count {
            return Err(Error::Range {
                port: port as usize,
                count: self.port_count as usize,
            });
        }
        Ok(self.port_frequency_unchecked(port))
    }

    pub fn ports(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        (1..=self.port_count).map(|p| (p, self.port_frequency_unchecked(p)))
    }

    /// Midpoint of the two middle ports (a single port for odd counts).
    pub fn center_thz(&self) -> f64 {
        0.5 * (self.anchor_thz + self.port_frequency_unchecked(self.port_count))
    }
}

/// Wavelength window of the tunable pump laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserSpec {
    pub min_wavelength_nm: f64,
    pub max_wavelength_nm: f64,
}

impl Default for LaserSpec {
    fn default() -> Self {
        Self {
            min_wavelength_nm: 1572.063,
            max_wavelength_nm: 1607.760,
        }
    }
}

impl LaserSpec {
    pub fn new(min_wavelength_nm: f64, max_wavelength_nm: f64) -> Result<Self> {
        let s = Self {
            min_wavelength_nm,
            max_wavelength_nm,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_wavelength_nm > 0.0 && self.min_wavelength_nm < self.max_wavelength_nm) {
            return Err(Error::domain(format!(
                "laser range needs 0 < min < max, got [{}, {}] nm",
                self.min_wavelength_nm, self.max_wavelength_nm
            )));
        }
        Ok(())
    }

    pub fn contains_nm(&self, wavelength_nm: f64) -> bool {
        wavelength_nm >= self.min_wavelength_nm && wavelength_nm <= self.max_wavelength_nm
    }

    /// `[low, high]` pump frequency in THz.
    pub fn frequency_range_thz(&self) -> [f64; 2] {
        [
            SPEED_OF_LIGHT_NM_THZ / self.max_wavelength_nm,
            SPEED_OF_LIGHT_NM_THZ / self.min_wavelength_nm,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpRecord {
    pub port: u32,
    pub converted_thz: f64,
    pub converted_nm: f64,
    pub pump_thz: f64,
    pub pump_nm: f64,
    pub in_laser_range: bool,
    /// Phase-matching efficiency relative to the design channel; `None` when
    /// the pump leaves the material model's fitted range.
    pub relative_efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpPlan {
    pub signal_thz: f64,
    pub poling_period_um: f64,
    pub records: Vec<PumpRecord>,
}

/// Device phase-matched for `signal → design_converted_thz`; the grid center
/// when `design_converted_thz` is `None`.
pub fn plan_device(
    grid: &DwdmGrid,
    signal_thz: f64,
    design_converted_thz: Option<f64>,
    length_mm: f64,
    temperature_c: f64,
    material: Arc<SellmeierModel>,
) -> Result<DeviceConfig> {
    grid.validate()?;
    let converted = SpectralPoint::from_frequency_thz(design_converted_thz.unwrap_or_else(|| grid.center_thz()))?;
    let signal = SpectralPoint::from_frequency_thz(signal_thz)?;
    DeviceConfig::designed_for(signal, converted, length_mm, temperature_c, material)
}

/// Pump frequency per port for a fixed signal and device.
pub fn plan_pumps(grid: &DwdmGrid, signal_thz: f64, laser: &LaserSpec, device: &DeviceConfig) -> Result<PumpPlan> {
    grid.validate()?;
    laser.validate()?;
    if !(signal_thz > grid.anchor_thz) {
        return Err(Error::domain(format!(
            "signal {signal_thz} THz must lie above every port (highest {} THz)",
            grid.anchor_thz
        )));
    }
    let signal = SpectralPoint::from_frequency_thz(signal_thz)?;
    let mut records = Vec::with_capacity(grid.port_count as usize);
    for (port, nu_c) in grid.ports() {
        let converted = SpectralPoint::from_frequency_thz(nu_c)?;
        let triple = InteractionTriple::from_signal_converted(signal, converted)?;
        let relative_efficiency = match device.efficiency(&triple) {
            Ok(e) => Some(e),
            Err(e) if e.is_validity() => None,
            Err(e) => return Err(e),
        };
        let pump_nm = triple.pump.wavelength_nm();
        records.push(PumpRecord {
            port,
            converted_thz: nu_c,
            converted_nm: converted.wavelength_nm(),
            pump_thz: triple.pump.frequency_thz(),
            pump_nm,
            in_laser_range: laser.contains_nm(pump_nm),
            relative_efficiency,
        });
    }
    Ok(PumpPlan {
        signal_thz,
        poling_period_um: device.poling_period_um(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyPoint {
    pub pump_thz: f64,
    pub pump_nm: f64,
    /// Normalized to the series maximum; `None` outside the material model's range.
    pub relative_efficiency: Option<f64>,
}

/// Phase-matching efficiency versus pump frequency over `pump_range_thz`
/// (inclusive, ascending), normalized to its maximum.
pub fn relative_efficiency_curve(
    device: &DeviceConfig,
    signal_thz: f64,
    pump_range_thz: [f64; 2],
    step_ghz: f64,
) -> Result<Vec<EfficiencyPoint>> {
    let [a, b] = pump_range_thz;
    if !(a > 0.0 && b > a && b < signal_thz && step_ghz > 0.0) {
        return Err(Error::domain(format!(
            "pump range [{a}, {b}] THz with step {step_ghz} GHz is invalid for signal {signal_thz} THz"
        )));
    }
    let signal = SpectralPoint::from_frequency_thz(signal_thz)?;
    let step = step_ghz * 1e-3;
    let n = ((b - a) / step + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let nu_p = a + i as f64 * step;
        let pump = SpectralPoint::from_frequency_thz(nu_p)?;
        let converted = SpectralPoint::from_frequency_thz(signal_thz - nu_p)?;
        let triple = InteractionTriple::new(signal, pump, converted)?;
        let eff = match device.efficiency(&triple) {
            Ok(e) => Some(e),
            Err(e) if e.is_validity() => None,
            Err(e) => return Err(e),
        };
        out.push(EfficiencyPoint {
            pump_thz: nu_p,
            pump_nm: pump.wavelength_nm(),
            relative_efficiency: eff,
        });
    }
    let peak = out.iter().filter_map(|p| p.relative_efficiency).fold(0.0, f64::max);
    if peak > 0.0 {
        for p in &mut out {
            p.relative_efficiency = p.relative_efficiency.map(|e| e / peak);
        }
    }
    Ok(out)
}

/// Contiguous pump-frequency band around the curve maximum with relative
/// efficiency ≥ `threshold`, as `[low, high]` THz on the sample grid.
pub fn band_above(curve: &[EfficiencyPoint], threshold: f64) -> Option<[f64; 2]> {
    let value = |i: usize| curve[i].relative_efficiency.unwrap_or(f64::NEG_INFINITY);
    let peak = (0..curve.len()).max_by(|&a, &b| value(a).total_cmp(&value(b)))?;
    if value(peak) < threshold {
        return None;
    }
    let mut lo = peak;
    while lo > 0 && value(lo - 1) >= threshold {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < curve.len() && value(hi + 1) >= threshold {
        hi += 1;
    }
    Some([curve[lo].pump_thz, curve[hi].pump_thz])
}

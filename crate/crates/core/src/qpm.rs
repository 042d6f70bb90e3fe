//! First-order quasi-phase matching for difference-frequency generation.
//!
//! The signal at ω_s mixes with a pump at ω_p to produce ω_c = ω_s − ω_p.
//! The residual mismatch is Δk = k(ω_s) − k(ω_p) − k(ω_c) − 2π/Λ and the
//! phase-matching efficiency is sinc²(Δk·L/2).

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};
use crate::spectral::{SpectralPoint, SPEED_OF_LIGHT_UM_THZ};

/// Converts wavenumbers from rad/µm to rad/m.
pub const UM_PER_M: f64 = 1e6;

/// Signal, pump and converted frequencies tied by ν_s = ν_p + ν_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionTriple {
    pub signal: SpectralPoint,
    pub pump: SpectralPoint,
    pub converted: SpectralPoint,
}

impl InteractionTriple {
    /// Checks energy conservation to relative 1e-9.
    pub fn new(signal: SpectralPoint, pump: SpectralPoint, converted: SpectralPoint) -> Result<Self> {
        let lhs = signal.frequency_thz();
        let rhs = pump.frequency_thz() + converted.frequency_thz();
        if ((lhs - rhs) / lhs).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "energy not conserved: signal {lhs} THz vs pump + converted {rhs} THz"
            )));
        }
        Ok(Self { signal, pump, converted })
    }

    pub fn from_signal_converted(signal: SpectralPoint, converted: SpectralPoint) -> Result<Self> {
        let pump = pump_for(signal, converted)?;
        Ok(Self { signal, pump, converted })
    }

    pub fn from_wavelengths_nm(signal_nm: f64, converted_nm: f64) -> Result<Self> {
        Self::from_signal_converted(
            SpectralPoint::from_wavelength_nm(signal_nm)?,
            SpectralPoint::from_wavelength_nm(converted_nm)?,
        )
    }

    /// Shifts the converted frequency by `delta_thz` and the pump by −`delta_thz`.
    pub fn detuned(&self, delta_thz: f64) -> Result<Self> {
        let converted = SpectralPoint::from_frequency_thz(self.converted.frequency_thz() + delta_thz)?;
        Self::from_signal_converted(self.signal, converted)
    }

    /// Exchanges the pump and converted roles.
    pub fn swapped(&self) -> Self {
        Self {
            signal: self.signal,
            pump: self.converted,
            converted: self.pump,
        }
    }
}

/// Pump frequency that converts `signal` into `converted`.
pub fn pump_for(signal: SpectralPoint, converted: SpectralPoint) -> Result<SpectralPoint> {
    let nu = signal.frequency_thz() - converted.frequency_thz();
    if nu <= 0.0 {
        return Err(Error::domain(format!(
            "signal frequency {} THz must exceed converted frequency {} THz",
            signal.frequency_thz(),
            converted.frequency_thz()
        )));
    }
    SpectralPoint::from_frequency_thz(nu)
}

/// A poled crystal operated at a fixed temperature.
#[derive(Debug, Clone)]
pub struct DeviceConfig {
    poling_period_um: f64,
    length_mm: f64,
    temperature_c: f64,
    material: Arc<SellmeierModel>,
}

impl DeviceConfig {
    pub fn new(
        poling_period_um: f64,
        length_mm: f64,
        temperature_c: f64,
        material: Arc<SellmeierModel>,
    ) -> Result<Self> {
        if !(poling_period_um.is_finite() && poling_period_um > 0.0) {
            return Err(Error::domain(format!("poling period must be positive, got {poling_period_um} µm")));
        }
        if !(length_mm.is_finite() && length_mm > 0.0) {
            return Err(Error::domain(format!("crystal length must be positive, got {length_mm} mm")));
        }
        if !temperature_c.is_finite() {
            return Err(Error::domain("temperature must be finite"));
        }
        Ok(Self {
            poling_period_um,
            length_mm,
            temperature_c,
            material,
        })
    }

    /// A device whose period phase-matches `signal → converted` exactly.
    pub fn designed_for(
        signal: SpectralPoint,
        converted: SpectralPoint,
        length_mm: f64,
        temperature_c: f64,
        material: Arc<SellmeierModel>,
    ) -> Result<Self> {
        let period = solve_poling_period(signal, converted, temperature_c, &material)?;
        Self::new(period, length_mm, temperature_c, material)
    }

    pub fn poling_period_um(&self) -> f64 {
        self.poling_period_um
    }

    pub fn length_mm(&self) -> f64 {
        self.length_mm
    }

    pub fn temperature_c(&self) -> f64 {
        self.temperature_c
    }

    pub fn material(&self) -> &SellmeierModel {
        &self.material
    }

    pub fn material_arc(&self) -> &Arc<SellmeierModel> {
        &self.material
    }

    pub fn with_length(&self, length_mm: f64) -> Result<Self> {
        Self::new(self.poling_period_um, length_mm, self.temperature_c, self.material.clone())
    }

    /// Phase-matching efficiency of `triple` in this device.
    pub fn efficiency(&self, triple: &InteractionTriple) -> Result<f64> {
        Ok(pm_efficiency(phase_mismatch(triple, self)?, self.length_mm))
    }
}

/// n/λ in µm⁻¹, i.e. k/2π.
fn inverse_wavelength_in_medium(model: &SellmeierModel, point: SpectralPoint, temperature_c: f64) -> Result<f64> {
    let l = point.wavelength_um();
    Ok(model.refractive_index(l, temperature_c)? / l)
}

/// k(ω_s) − k(ω_p) − k(ω_c) divided by 2π, in µm⁻¹.
fn material_mismatch(triple: &InteractionTriple, temperature_c: f64, model: &SellmeierModel) -> Result<f64> {
    let s = inverse_wavelength_in_medium(model, triple.signal, temperature_c)?;
    let p = inverse_wavelength_in_medium(model, triple.pump, temperature_c)?;
    let c = inverse_wavelength_in_medium(model, triple.converted, temperature_c)?;
    Ok(s - p - c)
}

/// Wavenumber 2πn/λ in rad/m.
pub fn wavenumber(model: &SellmeierModel, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
    Ok(2.0 * PI * model.refractive_index(wavelength_um, temperature_c)? / wavelength_um * UM_PER_M)
}

/// Δk in rad/m; zero at perfect quasi-phase matching.
pub fn phase_mismatch(triple: &InteractionTriple, device: &DeviceConfig) -> Result<f64> {
    let m = material_mismatch(triple, device.temperature_c, &device.material)?;
    Ok(2.0 * PI * (m - 1.0 / device.poling_period_um) * UM_PER_M)
}

/// First-order poling period (µm) that zeroes Δk for `signal → converted`.
pub fn solve_poling_period(
    signal: SpectralPoint,
    converted: SpectralPoint,
    temperature_c: f64,
    material: &SellmeierModel,
) -> Result<f64> {
    let triple = InteractionTriple::from_signal_converted(signal, converted)?;
    let m = material_mismatch(&triple, temperature_c, material)?;
    if !(m > 0.0) {
        return Err(Error::domain(format!(
            "k_s - k_p - k_c = {:.6e} rad/m is not positive; no first-order QPM period exists",
            2.0 * PI * m * UM_PER_M
        )));
    }
    Ok(1.0 / m)
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// sinc²(Δk·L/2) with Δk in rad/m and L in mm.
pub fn pm_efficiency(delta_k_rad_per_m: f64, length_mm: f64) -> f64 {
    let x = delta_k_rad_per_m * length_mm * 1e-3 / 2.0;
    let s = sinc(x);
    s * s
}

/// First-order dispersion coefficient
/// n(λ_c0) − n(λ_p0) − λ_c0·n′(λ_c0) + λ_p0·n′(λ_p0), the group-index
/// difference N_g(λ_c0) − N_g(λ_p0). Wavelengths in µm.
///
/// Moving the converted frequency by +Δω and the pump by −Δω changes the
/// mismatch by Δk ≈ −(Δω/c)·coefficient; the magnitude sets the linear
/// tuning penalty and vanishes at λ_c0 = λ_p0.
pub fn first_order_coefficient(
    converted_um: f64,
    pump_um: f64,
    temperature_c: f64,
    material: &SellmeierModel,
) -> Result<f64> {
    let (nc, dnc) = material.index_and_derivative(converted_um, temperature_c)?;
    let (np, dnp) = material.index_and_derivative(pump_um, temperature_c)?;
    Ok(nc - np - converted_um * dnc + pump_um * dnp)
}

/// Converts a frequency detuning in THz into Δω/c in rad/m.
pub fn detuning_wavenumber(delta_thz: f64) -> f64 {
    2.0 * PI * delta_thz / SPEED_OF_LIGHT_UM_THZ * UM_PER_M
}

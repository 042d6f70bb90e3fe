//! Vacuum wavelength / optical frequency bookkeeping.
//!
//! Wavelengths are carried in micrometres and frequencies in terahertz, so the
//! speed of light is 299.792458 µm·THz (equivalently 299792.458 nm·THz).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in µm·THz.
pub const SPEED_OF_LIGHT_UM_THZ: f64 = 299.792_458;

/// Speed of light in nm·THz.
pub const SPEED_OF_LIGHT_NM_THZ: f64 = 299_792.458;

/// One optical frequency with its vacuum wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    wavelength_um: f64,
    frequency_thz: f64,
}

/// A spectral coordinate with exactly one field given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralInput {
    WavelengthUm(f64),
    WavelengthNm(f64),
    FrequencyThz(f64),
}

impl SpectralPoint {
    pub fn from_wavelength_um(wavelength_um: f64) -> Result<Self> {
        if !(wavelength_um.is_finite() && wavelength_um > 0.0) {
            return Err(Error::domain(format!(
                "wavelength must be positive and finite, got {wavelength_um} µm"
            )));
        }
        Ok(Self {
            wavelength_um,
            frequency_thz: SPEED_OF_LIGHT_UM_THZ / wavelength_um,
        })
    }

    pub fn from_wavelength_nm(wavelength_nm: f64) -> Result<Self> {
        Self::from_wavelength_um(wavelength_nm * 1e-3)
    }

    pub fn from_frequency_thz(frequency_thz: f64) -> Result<Self> {
        if !(frequency_thz.is_finite() && frequency_thz > 0.0) {
            return Err(Error::domain(format!(
                "frequency must be positive and finite, got {frequency_thz} THz"
            )));
        }
        Ok(Self {
            wavelength_um: SPEED_OF_LIGHT_UM_THZ / frequency_thz,
            frequency_thz,
        })
    }

    pub fn wavelength_um(&self) -> f64 {
        self.wavelength_um
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_um * 1e3
    }

    pub fn frequency_thz(&self) -> f64 {
        self.frequency_thz
    }
}

/// Fills in the missing half of a spectral coordinate.
pub fn convert(input: SpectralInput) -> Result<SpectralPoint> {
    match input {
        SpectralInput::WavelengthUm(v) => SpectralPoint::from_wavelength_um(v),
        SpectralInput::WavelengthNm(v) => SpectralPoint::from_wavelength_nm(v),
        SpectralInput::FrequencyThz(v) => SpectralPoint::from_frequency_thz(v),
    }
}

/// Vacuum wavelength in nm for a frequency in THz.
pub fn thz_to_nm(frequency_thz: f64) -> f64 {
    SPEED_OF_LIGHT_NM_THZ / frequency_thz
}

/// Frequency in THz for a vacuum wavelength in nm.
pub fn nm_to_thz(wavelength_nm: f64) -> f64 {
    SPEED_OF_LIGHT_NM_THZ / wavelength_nm
}

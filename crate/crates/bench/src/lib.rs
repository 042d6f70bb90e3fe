//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use qfchub_core::polarization::{efficiency_model, EfficiencyCurveParams, QfcChannelModel};
use qfchub_core::tunability::{HubSweepSpec, TuningConstraints};
use qfchub_core::{DeviceConfig, InteractionTriple, SellmeierModel, SpectralPoint};

pub const TEMPERATURE_C: f64 = 48.0;

pub fn material() -> Arc<SellmeierModel> {
    Arc::new(SellmeierModel::default())
}

/// 40 mm device designed for 780 nm → 1540 nm.
pub fn rubidium_device() -> DeviceConfig {
    DeviceConfig::designed_for(
        SpectralPoint::from_wavelength_nm(780.0).unwrap(),
        SpectralPoint::from_wavelength_nm(1540.0).unwrap(),
        40.0,
        TEMPERATURE_C,
        material(),
    )
    .unwrap()
}

pub fn detuned_triple() -> InteractionTriple {
    InteractionTriple::from_wavelengths_nm(780.0, 1545.0).unwrap()
}

/// C-band sweep over `[start, end]` nm at 1 nm steps.
pub fn c_band_sweep(start: f64, end: f64) -> HubSweepSpec {
    HubSweepSpec {
        signal_start_nm: start,
        signal_end_nm: end,
        signal_step_nm: 1.0,
        target_nm: 1540.0,
        length_mm: 40.0,
        temperature_c: TEMPERATURE_C,
        material: material(),
        constraints: TuningConstraints::with_separation(20.0),
    }
}

pub fn unbalanced_channel() -> QfcChannelModel {
    QfcChannelModel::new(0.40, 0.44, 0.1).unwrap()
}

/// Noiseless pump-power curve sampled every 20 mW up to 300 mW.
pub fn efficiency_samples() -> Vec<(f64, f64)> {
    let p = EfficiencyCurveParams::new(0.44, 0.013).unwrap();
    (0..=15).map(|i| (20.0 * i as f64, efficiency_model(20.0 * i as f64, &p))).collect()
}

//! Extraordinary refractive index of the nonlinear medium.
//!
//! Models are plain coefficient sets loaded from TOML. Three published fits for
//! congruent lithium niobate ship embedded; [`SellmeierModel::default`] is the
//! temperature-dependent Jundt (1997) fit.
//!
//! Units: wavelength in µm, temperature in °C, `dn/dλ` in µm⁻¹.

mod model;

pub use model::{SellmeierForm, SellmeierModel, Validity};

/// Default crystal temperature (°C).
pub const DEFAULT_TEMPERATURE_C: f64 = 48.0;

pub(crate) const JUNDT_1997: &str = include_str!("../../data/jundt1997_congruent_e.toml");
pub(crate) const ZELMON_1997: &str = include_str!("../../data/zelmon1997_congruent_e.toml");
pub(crate) const DENG_2006: &str = include_str!("../../data/deng2006_ppln_e.toml");

/// Names of the embedded material models, default first.
pub const BUNDLED_MODELS: [&str; 3] = ["jundt1997", "zelmon1997", "deng2006"];

/// Every embedded model, default first.
pub fn bundled_models() -> Vec<SellmeierModel> {
    BUNDLED_MODELS
        .iter()
        .map(|name| SellmeierModel::builtin(name).expect("embedded model parses"))
        .collect()
}

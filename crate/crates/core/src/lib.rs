//! Design and simulation toolkit for PPLN quantum-frequency-conversion hubs.
//!
//! * [`dispersion`] – temperature-dependent extraordinary index of LiNbO₃.
//! * [`qpm`] – phase mismatch, poling period and sinc² phase-matching efficiency.
//! * [`tunability`] – tuning ranges under Raman constraints and hub-wavelength sweeps.
//! * [`dwdm`] – ITU-T grid ports, per-channel pump plans and relative-efficiency curves.
//! * [`polarization`] – polarization-insensitive conversion channel, process
//!   tomography and pump-power efficiency fits.
//! * [`io`] – CSV/JSON writers and readers shared by the command-line tool.

pub mod dispersion;
pub mod dwdm;
pub mod error;
pub mod io;
pub mod polarization;
pub mod qpm;
pub mod spectral;
pub mod tunability;

pub use dispersion::{SellmeierForm, SellmeierModel, Validity};
pub use error::{Error, Result};
pub use qpm::{DeviceConfig, InteractionTriple};
pub use spectral::{SpectralInput, SpectralPoint};
pub use tunability::{ConstraintMode, LimitingConstraint, TuningConstraints, TuningResult};
pub use dwdm::{DwdmGrid, LaserSpec, PumpPlan, PumpRecord};
pub use polarization::{EfficiencyCurveParams, PolarizationState, ProcessMatrix, QfcChannelModel};

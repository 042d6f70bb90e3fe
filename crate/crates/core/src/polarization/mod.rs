//! Polarization-insensitive conversion in a Sagnac loop.
//!
//! The two propagation directions of the loop convert orthogonal input
//! polarizations; with balanced efficiencies the device acts as a bit flip on
//! the polarization qubit. This module models the channel, its process matrix
//! and tomography, and the pump-power dependence of each arm.

mod channel;
mod efficiency;
mod process;
mod state;

pub use channel::{apply_channel, QfcChannelModel, MIN_SUCCESS_PROBABILITY};
pub use efficiency::{
    efficiency_model, fit_efficiency, pump_balance, EfficiencyCurveParams, EfficiencyFit, PumpSplit,
};
pub use process::{
    ideal_process, kraus_to_chi, process_fidelity, reconstruct_chi, simulate_tomography, ProcessMatrix,
    TomographyRecord, PAULI_LABELS,
};
pub use state::{pauli, InputLabel, PolarizationState, C64};

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::state::{PolarizationState, C64};
use crate::error::{Error, Result};

/// Probabilities below this are treated as no photon converted.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-15;

/// Sagnac-loop converter: the clockwise arm turns V into H, the
/// counter-clockwise arm turns H into V with a relative phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfcChannelModel {
    pub eta_cw: f64,
    pub eta_ccw: f64,
    /// Relative phase of the two arms (rad), including the pump phase.
    pub phase: f64,
    /// Weight of a maximally mixed admixture after conversion.
    #[serde(default)]
    pub depolarizing_mix: f64,
}

impl Default for QfcChannelModel {
    fn default() -> Self {
        Self::balanced(1.0)
    }
}

impl QfcChannelModel {
    pub fn new(eta_cw: f64, eta_ccw: f64, phase: f64) -> Result<Self> {
        let m = Self {
            eta_cw,
            eta_ccw,
            phase,
            depolarizing_mix: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn balanced(eta: f64) -> Self {
        Self {
            eta_cw: eta,
            eta_ccw: eta,
            phase: 0.0,
            depolarizing_mix: 0.0,
        }
    }

    pub fn with_depolarizing(self, mix: f64) -> Result<Self> {
        let m = Self {
            depolarizing_mix: mix,
            ..self
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("eta_cw", self.eta_cw),
            ("eta_ccw", self.eta_ccw),
            ("depolarizing_mix", self.depolarizing_mix),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{what} must lie in [0, 1], got {v}")));
            }
        }
        if !self.phase.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        Ok(())
    }

    /// √η_cw |H⟩⟨V| + √η_ccw e^{iφ} |V⟩⟨H|
    pub fn kraus(&self) -> Matrix2<C64> {
        let zero = C64::new(0.0, 0.0);
        Matrix2::new(
            zero,
            C64::from(self.eta_cw.sqrt()),
            C64::from_polar(self.eta_ccw.sqrt(), self.phase),
            zero,
        )
    }

    /// Coefficients `(a, b)` of the Kraus operator written as a·X + i·b·Y.
    pub fn pauli_amplitudes(&self) -> (C64, C64) {
        let cw = C64::from(self.eta_cw.sqrt());
        let ccw = C64::from_polar(self.eta_ccw.sqrt(), self.phase);
        ((cw + ccw) * 0.5, (cw - ccw) * 0.5)
    }

    /// Process fidelity with the bit flip, before any depolarizing admixture.
    pub fn closed_form_fidelity(&self) -> f64 {
        let s = self.eta_cw + self.eta_ccw;
        if s == 0.0 {
            return 0.0;
        }
        let amp = C64::from(self.eta_cw.sqrt()) + C64::from_polar(self.eta_ccw.sqrt(), self.phase);
        amp.norm_sqr() / (2.0 * s)
    }
}

/// Converted state (renormalized) and the probability that conversion happened.
pub fn apply_channel(state: &PolarizationState, model: &QfcChannelModel) -> Result<(PolarizationState, f64)> {
    model.validate()?;
    let k = model.kraus();
    let out = k * state.density_matrix() * k.adjoint();
    let p = out.trace().re;
    if p < MIN_SUCCESS_PROBABILITY {
        return Err(Error::Degenerate(format!("conversion probability {p:e} is effectively zero")));
    }
    let eps = model.depolarizing_mix;
    let mixed = out * C64::from((1.0 - eps) / p) + Matrix2::identity() * C64::from(0.5 * eps);
    // Restore exact Hermiticity lost to rounding.
    let rho = (mixed + mixed.adjoint()) * C64::from(0.5);
    Ok((PolarizationState::from_raw(rho), p))
}

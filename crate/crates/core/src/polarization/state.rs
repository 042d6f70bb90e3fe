use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrices in the order I, X, Y, Z.
pub fn pauli(index: usize) -> Matrix2<C64> {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// Preparation labels used for process tomography.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InputLabel {
    H,
    V,
    D,
    R,
}

impl InputLabel {
    pub const ALL: [InputLabel; 4] = [InputLabel::H, InputLabel::V, InputLabel::D, InputLabel::R];

    pub fn state(self) -> PolarizationState {
        match self {
            InputLabel::H => PolarizationState::h(),
            InputLabel::V => PolarizationState::v(),
            InputLabel::D => PolarizationState::d(),
            InputLabel::R => PolarizationState::r(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputLabel::H => "H",
            InputLabel::V => "V",
            InputLabel::D => "D",
            InputLabel::R => "R",
        }
    }
}

/// Single-photon polarization as a density matrix over {H, V}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    rho: Matrix2<C64>,
}

impl PolarizationState {
    /// α|H⟩ + β|V⟩, normalized.
    pub fn from_amplitudes(alpha: C64, beta: C64) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::Degenerate("zero or non-finite amplitude vector".into()));
        }
        let s = norm2.sqrt();
        let (a, b) = (alpha / s, beta / s);
        Ok(Self {
            rho: Matrix2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj()),
        })
    }

    /// Checks Hermiticity, unit trace and positivity to `1e-9`.
    pub fn from_density_matrix(rho: Matrix2<C64>) -> Result<Self> {
        let tol = 1e-9;
        if (rho - rho.adjoint()).norm() > tol {
            return Err(Error::domain("density matrix is not Hermitian"));
        }
        if (rho.trace() - ONE).norm() > tol {
            return Err(Error::domain(format!("density matrix trace {} is not 1", rho.trace())));
        }
        let s = Self { rho };
        let min_eig = s.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::domain(format!("density matrix has eigenvalue {min_eig}")));
        }
        Ok(s)
    }

    /// Wraps an already valid matrix.
    pub(crate) fn from_raw(rho: Matrix2<C64>) -> Self {
        Self { rho }
    }

    /// Unit-trace state from a Bloch vector with |r| ≤ 1.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let rho = (pauli(0) + pauli(1) * C64::from(r[0]) + pauli(2) * C64::from(r[1]) + pauli(3) * C64::from(r[2]))
            * C64::from(0.5);
        Self::from_density_matrix(rho)
    }

    pub fn h() -> Self {
        Self::from_amplitudes(ONE, ZERO).unwrap()
    }

    pub fn v() -> Self {
        Self::from_amplitudes(ZERO, ONE).unwrap()
    }

    /// (|H⟩ + |V⟩)/√2
    pub fn d() -> Self {
        Self::from_amplitudes(ONE, ONE).unwrap()
    }

    /// (|H⟩ − |V⟩)/√2
    pub fn a() -> Self {
        Self::from_amplitudes(ONE, -ONE).unwrap()
    }

    /// (|H⟩ + i|V⟩)/√2
    pub fn r() -> Self {
        Self::from_amplitudes(ONE, I).unwrap()
    }

    /// (|H⟩ − i|V⟩)/√2
    pub fn l() -> Self {
        Self::from_amplitudes(ONE, -I).unwrap()
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: pauli(0) * C64::from(0.5),
        }
    }

    pub fn density_matrix(&self) -> &Matrix2<C64> {
        &self.rho
    }

    /// (⟨X⟩, ⟨Y⟩, ⟨Z⟩) with |H⟩ at +Z and |D⟩ at +X.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let r01 = self.rho[(0, 1)];
        [2.0 * r01.re, -2.0 * r01.im, (self.rho[(0, 0)] - self.rho[(1, 1)]).re]
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// ⟨ψ|ρ|ψ⟩ for a pure `other`, tr(ρσ) in general.
    pub fn overlap(&self, other: &PolarizationState) -> f64 {
        (self.rho * other.rho).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.rho[(0, 0)].re;
        let d = self.rho[(1, 1)].re;
        let b = self.rho[(0, 1)].norm();
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt()
    }
}

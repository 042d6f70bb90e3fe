//! Process matrices in the Pauli basis (I, X, Y, Z) and linear-inversion tomography.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen, Vector4};

use super::channel::{apply_channel, QfcChannelModel, MIN_SUCCESS_PROBABILITY};
use super::state::{pauli, InputLabel, PolarizationState, C64};
use crate::error::{Error, Result};

/// Basis order of every serialized process matrix.
pub const PAULI_LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

/// χ with E(ρ) = Σ χ_mn P_m ρ P_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessMatrix {
    chi: Matrix4<C64>,
}

impl ProcessMatrix {
    pub fn new(chi: Matrix4<C64>) -> Result<Self> {
        let m = Self { chi };
        m.validate()?;
        Ok(m)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.chi
    }

    pub fn trace(&self) -> f64 {
        self.chi.trace().re
    }

    pub fn validate(&self) -> Result<()> {
        let tol = 1e-9;
        if (self.chi - self.chi.adjoint()).norm() > tol {
            return Err(Error::domain("process matrix is not Hermitian"));
        }
        let t = self.trace();
        if !(t > 0.0 && t <= 1.0 + tol) {
            return Err(Error::domain(format!("process matrix trace {t} outside (0, 1]")));
        }
        let min = SymmetricEigen::new(self.chi).eigenvalues.min();
        if min < -tol {
            return Err(Error::domain(format!("process matrix has eigenvalue {min}")));
        }
        Ok(())
    }

    /// Trace-one copy.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(Error::Degenerate("process matrix has zero trace".into()));
        }
        Ok(Self {
            chi: self.chi / C64::from(t),
        })
    }

    /// Unnormalized output Σ χ_mn P_m ρ P_n.
    pub fn map(&self, rho: &Matrix2<C64>) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for m in 0..4 {
            let left = pauli(m) * rho;
            for n in 0..4 {
                let c = self.chi[(m, n)];
                if c != C64::new(0.0, 0.0) {
                    out += left * pauli(n) * c;
                }
            }
        }
        out
    }

    /// Normalized output state and success probability.
    pub fn apply(&self, state: &PolarizationState) -> Result<(PolarizationState, f64)> {
        let out = self.map(state.density_matrix());
        let p = out.trace().re;
        if p < MIN_SUCCESS_PROBABILITY {
            return Err(Error::Degenerate(format!("process output probability {p:e} is effectively zero")));
        }
        let rho = out / C64::from(p);
        Ok((PolarizationState::from_raw((rho + rho.adjoint()) * C64::from(0.5)), p))
    }

    /// Rows of `[re, im]` pairs, row-major.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..4)
            .map(|r| (0..4).map(|c| [self.chi[(r, c)].re, self.chi[(r, c)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(Error::Parse("process matrix must be 4×4".into()));
        }
        let chi = Matrix4::from_fn(|r, c| C64::new(rows[r][c][0], rows[r][c][1]));
        Self::new(chi)
    }
}

/// The bit flip: only χ_XX = 1.
pub fn ideal_process() -> ProcessMatrix {
    let mut chi = Matrix4::zeros();
    chi[(1, 1)] = C64::new(1.0, 0.0);
    ProcessMatrix { chi }
}

/// Coefficients c_m with M = Σ c_m P_m.
fn pauli_coefficients(m: &Matrix2<C64>) -> Vector4<C64> {
    Vector4::from_fn(|k, _| (pauli(k) * m).trace() * 0.5)
}

/// Process matrix of the converter, including the depolarizing admixture.
///
/// The admixture keeps the success probability and replaces a fraction of the
/// output with I/2, which equals the extra Kraus operators √(ε/4)·P·K.
pub fn kraus_to_chi(model: &QfcChannelModel) -> Result<ProcessMatrix> {
    model.validate()?;
    let k = model.kraus();
    let e = pauli_coefficients(&k);
    let eps = model.depolarizing_mix;
    let mut chi = e * e.adjoint() * C64::from(1.0 - eps);
    if eps > 0.0 {
        for p in 0..4 {
            let f = pauli_coefficients(&(pauli(p) * k));
            chi += f * f.adjoint() * C64::from(0.25 * eps);
        }
    }
    Ok(ProcessMatrix { chi })
}

/// One preparation of a tomography run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyRecord {
    pub label: InputLabel,
    pub input: PolarizationState,
    pub output: PolarizationState,
    pub success_probability: f64,
}

/// Outputs of the converter for the H, V, D and R preparations.
pub fn simulate_tomography(model: &QfcChannelModel) -> Result<Vec<TomographyRecord>> {
    InputLabel::ALL
        .iter()
        .map(|&label| {
            let input = label.state();
            let (output, p) = apply_channel(&input, model)?;
            Ok(TomographyRecord {
                label,
                input,
                output,
                success_probability: p,
            })
        })
        .collect()
}

fn vec2(m: &Matrix2<C64>) -> Vector4<C64> {
    Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Linear-inversion estimate of χ from four preparations.
///
/// The estimate is made Hermitian and negative eigenvalues are set to zero.
pub fn reconstruct_chi(records: &[TomographyRecord]) -> Result<ProcessMatrix> {
    if records.len() != 4 {
        return Err(Error::domain(format!("need 4 preparations, got {}", records.len())));
    }
    let inputs = Matrix4::from_columns(&[
        vec2(records[0].input.density_matrix()),
        vec2(records[1].input.density_matrix()),
        vec2(records[2].input.density_matrix()),
        vec2(records[3].input.density_matrix()),
    ]);
    let sv = inputs.singular_values();
    if sv.min() < 1e-10 * sv.max() {
        return Err(Error::Singularity(
            "input states do not span the operator space".into(),
        ));
    }
    let inv = inputs
        .try_inverse()
        .ok_or_else(|| Error::Singularity("input states do not span the operator space".into()))?;
    let outputs: Vec<Matrix2<C64>> = records
        .iter()
        .map(|r| r.output.density_matrix() * C64::from(r.success_probability))
        .collect();

    // Images of |a⟩⟨b|, stacked as (ab, cd).
    let mut rhs = DVector::<C64>::zeros(16);
    for ab in 0..4 {
        let coeffs = inv.column(ab);
        let mut img = Matrix2::<C64>::zeros();
        for (j, out) in outputs.iter().enumerate() {
            img += out * coeffs[j];
        }
        for cd in 0..4 {
            rhs[4 * ab + cd] = img[(cd / 2, cd % 2)];
        }
    }
    let mut system = DMatrix::<C64>::zeros(16, 16);
    for ab in 0..4 {
        let (a, b) = (ab / 2, ab % 2);
        for cd in 0..4 {
            let (c, d) = (cd / 2, cd % 2);
            for m in 0..4 {
                for n in 0..4 {
                    system[(4 * ab + cd, 4 * m + n)] = pauli(m)[(c, a)] * pauli(n)[(d, b)].conj();
                }
            }
        }
    }
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singularity("Pauli system is singular".into()))?;
    let raw = Matrix4::from_fn(|m, n| x[4 * m + n]);
    let herm = (raw + raw.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(herm);
    let clipped = eig.eigenvalues.map(|v| C64::from(v.max(0.0)));
    let chi = eig.eigenvectors * Matrix4::from_diagonal(&clipped) * eig.eigenvectors.adjoint();
    Ok(ProcessMatrix {
        chi: (chi + chi.adjoint()) * C64::from(0.5),
    })
}

/// Overlap with the bit flip, tr(χ·χ_X)/tr(χ).
pub fn process_fidelity(chi: &ProcessMatrix) -> Result<f64> {
    let t = chi.trace();
    if !(t > 0.0) {
        return Err(Error::Degenerate("process matrix has zero trace".into()));
    }
    Ok(chi.chi[(1, 1)].re / t)
}

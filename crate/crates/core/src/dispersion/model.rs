use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Functional form of a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SellmeierForm {
    /// Temperature-dependent two-pole form with a quadratic IR term.
    ///
    /// Coefficients `[a1, a2, a3, a4, a5, a6, b1, b2, b3, b4, b5, t_ref, t_offset]`:
    ///
    /// n² = a1 + b1·f + (a2 + b2·f)/(λ² − (a3 + b3·f)²) + (a4 + b4·f)/(λ² − a5²) − (a6 + b5·f)·λ²
    ///
    /// with f = (T − t_ref)(T + t_offset).
    TemperatureSellmeier,
    /// Temperature-independent three-term Sellmeier.
    ///
    /// Coefficients `[A1, B1, A2, B2, A3, B3]`: n² = 1 + Σ Aᵢ λ²/(λ² − Bᵢ).
    Sellmeier3,
}

impl SellmeierForm {
    fn coefficient_count(self) -> usize {
        match self {
            SellmeierForm::TemperatureSellmeier => 13,
            SellmeierForm::Sellmeier3 => 6,
        }
    }
}

/// Fitted domain of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    /// Inclusive wavelength window in µm.
    pub wavelength_um: [f64; 2],
    /// Inclusive temperature window in °C.
    pub temperature_c: [f64; 2],
}

impl Validity {
    pub fn contains_wavelength(&self, wavelength_um: f64) -> bool {
        wavelength_um >= self.wavelength_um[0] && wavelength_um <= self.wavelength_um[1]
    }

    pub fn contains_temperature(&self, temperature_c: f64) -> bool {
        temperature_c >= self.temperature_c[0] && temperature_c <= self.temperature_c[1]
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    #[serde(default = "default_schema")]
    schema: u32,
    name: String,
    form: SellmeierForm,
    temperature_form: String,
    #[serde(default)]
    source: String,
    coefficients: Vec<f64>,
    validity: Validity,
}

fn default_schema() -> u32 {
    1
}

/// A named coefficient set for the extraordinary index of the medium.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierModel {
    name: String,
    form: SellmeierForm,
    coefficients: Vec<f64>,
    temperature_form: String,
    source: String,
    validity: Validity,
}

impl Default for SellmeierModel {
    fn default() -> Self {
        Self::builtin("jundt1997").expect("embedded default model parses")
    }
}

impl SellmeierModel {
    pub fn new(
        name: impl Into<String>,
        form: SellmeierForm,
        coefficients: Vec<f64>,
        temperature_form: impl Into<String>,
        validity: Validity,
    ) -> Result<Self> {
        let model = Self {
            name: name.into(),
            form,
            coefficients,
            temperature_form: temperature_form.into(),
            source: String::new(),
            validity,
        };
        model.check()?;
        Ok(model)
    }

    /// One of the embedded models by name (see [`super::BUNDLED_MODELS`]).
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "jundt1997" => super::JUNDT_1997,
            "zelmon1997" => super::ZELMON_1997,
            "deng2006" => super::DENG_2006,
            other => {
                return Err(Error::Material(format!(
                    "unknown built-in model '{other}' (available: {})",
                    super::BUNDLED_MODELS.join(", ")
                )))
            }
        };
        Self::from_toml_str(text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ModelFile =
            toml::from_str(text).map_err(|e| Error::Material(e.message().to_string()))?;
        if file.schema != 1 {
            return Err(Error::Material(format!("unsupported schema {}", file.schema)));
        }
        let model = Self {
            name: file.name,
            form: file.form,
            coefficients: file.coefficients,
            temperature_form: file.temperature_form,
            source: file.source,
            validity: file.validity,
        };
        model.check()?;
        Ok(model)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Material(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        let file = ModelFile {
            schema: 1,
            name: self.name.clone(),
            form: self.form,
            temperature_form: self.temperature_form.clone(),
            source: self.source.clone(),
            coefficients: self.coefficients.clone(),
            validity: self.validity,
        };
        toml::to_string(&file).map_err(|e| Error::Material(e.to_string()))
    }

    fn check(&self) -> Result<()> {
        let expected = self.form.coefficient_count();
        if self.coefficients.len() != expected {
            return Err(Error::Material(format!(
                "model '{}': form {:?} needs {expected} coefficients, got {}",
                self.name,
                self.form,
                self.coefficients.len()
            )));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Material(format!("model '{}': non-finite coefficient", self.name)));
        }
        let [wl, wh] = self.validity.wavelength_um;
        let [tl, th] = self.validity.temperature_c;
        if !(wl > 0.0 && wl < wh && tl <= th) {
            return Err(Error::Material(format!("model '{}': empty validity window", self.name)));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn form(&self) -> SellmeierForm {
        self.form
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn temperature_form(&self) -> &str {
        &self.temperature_form
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    /// Errors with [`Error::Validity`] when `(λ, T)` is outside the fitted window.
    pub fn check_domain(&self, wavelength_um: f64, temperature_c: f64) -> Result<()> {
        if !self.validity.contains_wavelength(wavelength_um) {
            let [lo, hi] = self.validity.wavelength_um;
            return Err(Error::Validity {
                model: self.name.clone(),
                quantity: "wavelength",
                value: wavelength_um,
                lo,
                hi,
                unit: "um",
            });
        }
        if !self.validity.contains_temperature(temperature_c) {
            let [lo, hi] = self.validity.temperature_c;
            return Err(Error::Validity {
                model: self.name.clone(),
                quantity: "temperature",
                value: temperature_c,
                lo,
                hi,
                unit: "degC",
            });
        }
        Ok(())
    }

    /// n² and d(n²)/dλ, unchecked.
    fn index_squared(&self, l: f64, t: f64) -> (f64, f64) {
        let c = &self.coefficients;
        let l2 = l * l;
        match self.form {
            SellmeierForm::TemperatureSellmeier => {
                let f = (t - c[11]) * (t + c[12]);
                let offset = c[0] + c[6] * f;
                let uv_strength = c[1] + c[7] * f;
                let uv_pole = c[2] + c[8] * f;
                let ir_strength = c[3] + c[9] * f;
                let ir_pole = c[4];
                let quad = c[5] + c[10] * f;
                let du = l2 - uv_pole * uv_pole;
                let di = l2 - ir_pole * ir_pole;
                let n2 = offset + uv_strength / du + ir_strength / di - quad * l2;
                let dn2 = -2.0 * l * (uv_strength / (du * du) + ir_strength / (di * di) + quad);
                (n2, dn2)
            }
            SellmeierForm::Sellmeier3 => {
                let mut n2 = 1.0;
                let mut dn2 = 0.0;
                for term in c.chunks_exact(2) {
                    let (a, b) = (term[0], term[1]);
                    let d = l2 - b;
                    n2 += a * l2 / d;
                    dn2 += -2.0 * a * b * l / (d * d);
                }
                (n2, dn2)
            }
        }
    }

    /// Extraordinary index n(λ, T); λ in µm, T in °C.
    pub fn refractive_index(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        self.check_domain(wavelength_um, temperature_c)?;
        let (n2, _) = self.index_squared(wavelength_um, temperature_c);
        Ok(n2.sqrt())
    }

    /// Analytic dn/dλ in µm⁻¹.
    pub fn index_derivative(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        self.check_domain(wavelength_um, temperature_c)?;
        let (n2, dn2) = self.index_squared(wavelength_um, temperature_c);
        Ok(dn2 / (2.0 * n2.sqrt()))
    }

    /// Group index n − λ·dn/dλ.
    pub fn group_index(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        let (n, dn) = self.index_and_derivative(wavelength_um, temperature_c)?;
        Ok(n - wavelength_um * dn)
    }

    /// `(n, dn/dλ)` in one evaluation.
    pub fn index_and_derivative(&self, wavelength_um: f64, temperature_c: f64) -> Result<(f64, f64)> {
        self.check_domain(wavelength_um, temperature_c)?;
        let (n2, dn2) = self.index_squared(wavelength_um, temperature_c);
        let n = n2.sqrt();
        Ok((n, dn2 / (2.0 * n)))
    }
}

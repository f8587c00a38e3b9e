use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Model parameters: boson frequency, magnetic amplitude and phase, coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub b_field: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl Default for ModelParams {
    /// Omega = 1, B = 0.1, phi = 7 pi / 6, lambda = 0.5.
    fn default() -> Self {
        Self {
            omega: 1.0,
            b_field: 0.1,
            phi: 7.0 * PI / 6.0,
            lambda: 0.5,
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, b_field: f64, phi: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            omega,
            b_field,
            phi,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("b_field", self.b_field),
            ("phi", self.phi),
            ("lambda", self.lambda),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.b_field < 0.0 {
            return Err(Error::InvalidParams(format!(
                "b_field must be non-negative, got {}",
                self.b_field
            )));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_b_field(self, b_field: f64) -> Self {
        Self { b_field, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    /// Coherent displacement `lambda / omega` of the shifted oscillators.
    pub fn alpha(&self) -> f64 {
        self.lambda / self.omega
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Coupling λ, viscosity ν and the torus (L, d) they act on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub nu: f64,
    pub size: f64,
    pub dim: usize,
}

impl ModelParams {
    pub fn new(lambda: f64, nu: f64, size: f64, dim: usize) -> Result<ModelParams> {
        if !lambda.is_finite() {
            return Err(Error::param("lambda", "must be finite"));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::param("nu", format!("must be nonnegative, got {nu}")));
        }
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::param("L", format!("must be positive, got {size}")));
        }
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        Ok(ModelParams { lambda, nu, size, dim })
    }

    /// Parameters with λ chosen so that the nonlinearity strength is `alpha`.
    pub fn from_alpha(alpha: f64, nu: f64, size: f64, dim: usize) -> Result<ModelParams> {
        ModelParams::new(alpha * size.powf(dim as f64 / 2.0), nu, size, dim)
    }

    pub fn for_spec(lambda: f64, nu: f64, spec: &LatticeSpec) -> Result<ModelParams> {
        ModelParams::new(lambda, nu, spec.size, spec.dim)
    }

    /// α = λ·L^{−d/2}.
    pub fn alpha(&self) -> f64 {
        self.lambda * self.size.powf(-(self.dim as f64) / 2.0)
    }

    /// T_kin = 1/(8πα²).
    pub fn t_kin(&self) -> f64 {
        1.0 / (8.0 * PI * self.alpha() * self.alpha())
    }

    /// ρ = α·√T.
    pub fn rho(&self, t_max: f64) -> f64 {
        self.alpha() * t_max.sqrt()
    }

    /// λ/L^d, the weight of each lattice convolution.
    pub fn coupling(&self) -> f64 {
        self.lambda / self.size.powi(self.dim as i32)
    }

    pub fn check_spec(&self, spec: &LatticeSpec) -> Result<()> {
        crate::lattice::check_dim(spec.dim, self.dim)?;
        if spec.size != self.size {
            return Err(Error::param("L", format!("parameters use L = {}, lattice has L = {}", self.size, spec.size)));
        }
        Ok(())
    }
}

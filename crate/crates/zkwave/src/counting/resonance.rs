//! Counting lattice points near the resonance manifold of a single triad.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lattice_ball_points, Anisotropy, IVec, LatticeSpec};

/// Lattice points k1 with |k1| ≤ radius and |Λ(k1)+Λ(k−k1)−Λ(k)−σ| ≤ δ/T.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceQuery {
    pub k: IVec,
    pub sigma: f64,
    /// T; the window half-width is δ/T.
    pub window: f64,
    pub spec: LatticeSpec,
    pub beta: Anisotropy,
    pub delta: f64,
}

impl ResonanceQuery {
    pub fn new(k: IVec, sigma: f64, window: f64, spec: LatticeSpec, beta: Anisotropy) -> Result<ResonanceQuery> {
        let q = ResonanceQuery { k, sigma, window, spec, beta, delta: 1.0 };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.is_zero() {
            return Err(Error::param("k", "must be nonzero"));
        }
        if !(self.window > 0.0) {
            return Err(Error::param("T", "window must be positive"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::param("delta", "must be positive"));
        }
        crate::lattice::check_dim(self.spec.dim, self.beta.dim())
    }

    pub fn kx(&self) -> f64 {
        self.spec.kx(self.k)
    }
}

/// Exact count by enumeration of the lattice ball. The isotropic phase is
/// formed in integer arithmetic.
pub fn count_resonances(q: &ResonanceQuery) -> Result<u64> {
    q.validate()?;
    let spec = &q.spec;
    let l3 = spec.size.powi(3);
    let half = q.delta / q.window;
    let iso = q.beta.is_isotropic();
    let lk = spec.lambda_beta(q.k, &q.beta);
    let mut count = 0;
    for k1 in lattice_ball_points(spec) {
        let k2 = q.k - k1;
        let om = if iso {
            crate::lattice::omega_int(k1, k2, q.k) as f64 / l3
        } else {
            spec.lambda_beta(k1, &q.beta) + spec.lambda_beta(k2, &q.beta) - lk
        };
        if (om - q.sigma).abs() <= half {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneNodeReport {
    pub size: f64,
    pub window: f64,
    pub k: Vec<f64>,
    pub sigma: f64,
    pub delta: f64,
    pub theta: f64,
    pub count: u64,
    /// L^θ·(L^d/T)·|k_x|⁻¹.
    pub bound: f64,
    pub ratio: f64,
    /// ratio > 1.
    pub flagged: bool,
}

/// Compare the count with L^θ·(L^d/T)·|k_x|⁻¹; requires T ≤ L and k_x ≠ 0.
pub fn verify_onenode_bound(q: &ResonanceQuery, theta: f64) -> Result<OneNodeReport> {
    q.validate()?;
    if q.window > q.spec.size {
        return Err(Error::param("T", format!("the bound assumes T ≤ L (T = {}, L = {})", q.window, q.spec.size)));
    }
    if q.k.x() == 0 {
        return Err(Error::param("k", "k_x must be nonzero"));
    }
    let count = count_resonances(q)?;
    let l = q.spec.size;
    let bound = l.powf(theta) * l.powi(q.spec.dim as i32) / q.window / q.kx().abs();
    let ratio = count as f64 / bound;
    Ok(OneNodeReport {
        size: l,
        window: q.window,
        k: q.spec.wave_vector(q.k).0,
        sigma: q.sigma,
        delta: q.delta,
        theta,
        count,
        bound,
        ratio,
        flagged: ratio > 1.0,
    })
}

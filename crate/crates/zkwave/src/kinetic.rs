//! The wave-kinetic collision operator K(n), the finite-L, finite-t first
//! correction n⁽¹⁾ with sin² kernels, and their comparison with ensembles.
//!
//! K(n)(k) = |k_x|²∫ n(k1)n(k−k1)δ(Ω) dk1 − 2n(k)∫ k_x(k_x−k1x)n(k1)δ(Ω) dk1
//! with Ω = Λ(k1)+Λ(k−k1)−Λ(k); the loss term is written in k1 only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::ModelParams;
use crate::initial_data::{LatticeProfile, SpectrumProfile};
use crate::lattice::{omega_int, IVec, WaveVector};
use crate::quadrature::{coarea_delta_integral, mollified_delta_integral, CoareaResolution};
use crate::solver::EnsembleStats;

/// How the resonance delta is resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mollifier {
    /// Co-area slices of the resonance manifold.
    Exact,
    /// δ replaced by a normalized Gaussian of width η.
    Gaussian { eta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionQuadrature {
    pub slice_count: usize,
    pub sphere_order: usize,
    pub mollifier: Mollifier,
}

impl Default for CollisionQuadrature {
    fn default() -> Self {
        CollisionQuadrature { slice_count: 64, sphere_order: 16, mollifier: Mollifier::Exact }
    }
}

impl CollisionQuadrature {
    pub fn validate(&self) -> Result<()> {
        if self.slice_count < 8 {
            return Err(Error::param("slice_count", "must be at least 8"));
        }
        if self.sphere_order < 2 {
            return Err(Error::param("sphere_order", "must be at least 2"));
        }
        if let Mollifier::Gaussian { eta } = self.mollifier {
            if !(eta > 0.0) {
                return Err(Error::param("eta", "mollifier width must be positive"));
            }
        }
        Ok(())
    }

    pub fn refined(&self) -> CollisionQuadrature {
        CollisionQuadrature { slice_count: 2 * self.slice_count, sphere_order: 2 * self.sphere_order, ..*self }
    }

    fn resolution(&self) -> CoareaResolution {
        CoareaResolution { slice_count: self.slice_count, sphere_order: self.sphere_order }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CollisionValue {
    pub gain: f64,
    pub loss: f64,
}

impl CollisionValue {
    pub fn total(&self) -> f64 {
        self.gain - self.loss
    }
}

/// ∫F δ(Ω_k) dk1 for F supported in the ball |k1| ≤ half.
fn delta_integral(k: &[f64], half: f64, quad: &CollisionQuadrature, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    match quad.mollifier {
        Mollifier::Exact => coarea_delta_integral(k, 0.0, -half, half, quad.resolution(), f),
        Mollifier::Gaussian { eta } => mollified_delta_integral(k, eta, half, (quad.slice_count / 4).max(2), f),
    }
}

/// Gain and loss terms of K(n)(k). At k_x = 0 both prefactors vanish and the
/// result is zero on either path.
pub fn collision_operator(n: &SpectrumProfile, k: &WaveVector, quad: &CollisionQuadrature) -> Result<CollisionValue> {
    quad.validate()?;
    crate::lattice::check_dim(n.dim, k.dim())?;
    let kx = k.kx();
    if kx == 0.0 || n.is_zero() {
        return Ok(CollisionValue::default());
    }
    let half = n.diameter / 2.0;
    let kv = &k.0;
    let eval = |p: &[f64]| n.evaluate(&WaveVector::new(p));
    let gain = kx * kx
        * delta_integral(kv, half, quad, |k1| {
            let a = eval(k1);
            if a == 0.0 {
                return 0.0;
            }
            let k2: Vec<f64> = kv.iter().zip(k1).map(|(x, y)| x - y).collect();
            a * eval(&k2)
        })?;
    let nk = n.evaluate(k);
    let loss = if nk == 0.0 {
        0.0
    } else {
        2.0 * nk * delta_integral(kv, half, quad, |k1| kx * (kx - k1[0]) * eval(k1))?
    };
    Ok(CollisionValue { gain, loss })
}

/// (t/T_kin)·K(n)(k).
pub fn kinetic_prediction(n: &SpectrumProfile, k: &WaveVector, t: f64, params: &ModelParams, quad: &CollisionQuadrature) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::param("t", "must be nonnegative"));
    }
    if t == 0.0 || params.lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(t / params.t_kin() * collision_operator(n, k, quad)?.total())
}

/// t²·(sin x / x)² with x = tΩ/2, i.e. 4sin²(tΩ/2)/Ω² including its Ω = 0 value.
fn fejer4(t: f64, omega: f64) -> f64 {
    let x = 0.5 * t * omega;
    let s = if x == 0.0 { 1.0 } else { x.sin() / x };
    t * t * s * s
}

/// The lattice form of n⁽¹⁾(k):
/// (2λ²/L^{2d})|k_x|²Σ n(k1)n(k2)·4sin²(tΩ/2)/Ω² − (8λ²/L^{2d})Σ k_x(k_x−k1x)n(k1)n(k)·2sin²(tΩ/2)/Ω².
/// The profile's lattice ball must contain the support of n.
pub fn n1_discrete(profile: &LatticeProfile, k: IVec, t: f64, params: &ModelParams) -> Result<f64> {
    let spec = profile.spec();
    params.check_spec(spec)?;
    if k.x() == 0 || t == 0.0 {
        return Ok(0.0);
    }
    let l3 = spec.size.powi(3);
    let kx = spec.kx(k);
    let nk = profile.get(k);
    let mut gain = 0.0;
    let mut loss = 0.0;
    for k1 in profile.support() {
        let a = profile.get(k1);
        let k2 = k - k1;
        let om = omega_int(k1, k2, k) as f64 / l3;
        let kern = fejer4(t, om);
        gain += a * profile.get(k2) * kern;
        if nk != 0.0 {
            loss += kx * (kx - spec.kx(k1)) * a * nk * 0.5 * kern;
        }
    }
    let c = params.lambda * params.lambda / spec.size.powi(2 * spec.dim as i32);
    Ok(2.0 * c * kx * kx * gain - 8.0 * c * loss)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub k: Vec<f64>,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub n_in: f64,
    pub n1_discrete: f64,
    pub kinetic: f64,
    /// (mc_mean − n_in − n1_discrete)/mc_se; zero when both are zero.
    pub z: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZSummary {
    pub modes: usize,
    pub median_abs_z: f64,
    pub p95_abs_z: f64,
    pub max_abs_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraReport {
    pub time: f64,
    pub members: u64,
    pub rows: Vec<ModeComparison>,
    pub summary: ZSummary,
}

/// Per-mode comparison of an ensemble with n_in + n⁽¹⁾ and the kinetic
/// prediction. `profile` must be built on the ensemble's lattice.
pub fn compare_spectra(
    stats: &EnsembleStats,
    n: &SpectrumProfile,
    profile: &LatticeProfile,
    params: &ModelParams,
    quad: &CollisionQuadrature,
) -> Result<SpectraReport> {
    if stats.modes.spec() != profile.spec() {
        return Err(Error::param("profile", "profile and ensemble live on different lattices"));
    }
    let spec = profile.spec().clone();
    let t = stats.time;
    let rows = stats
        .modes
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, &k)| {
            let w = stats.acc[i];
            let n_in = profile.values[i];
            let n1 = n1_discrete(profile, k, t, params)?;
            let kinetic = if k.x() == 0 { 0.0 } else { kinetic_prediction(n, &spec.wave_vector(k), t, params, quad)? };
            let se = w.std_error();
            let diff = w.mean - n_in - n1;
            let z = if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            };
            Ok(ModeComparison { k: spec.wave_vector(k).0, mc_mean: w.mean, mc_se: se, n_in, n1_discrete: n1, kinetic, z })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = z_summary(rows.iter().map(|r| r.z));
    Ok(SpectraReport { time: t, members: stats.members, rows, summary })
}

/// Quantiles of |z| (nearest-rank).
pub fn z_summary(z: impl Iterator<Item = f64>) -> ZSummary {
    let mut a: Vec<f64> = z.map(f64::abs).collect();
    if a.is_empty() {
        return ZSummary::default();
    }
    a.sort_by(|x, y| x.total_cmp(y));
    let q = |p: f64| a[((p * a.len() as f64).ceil() as usize).clamp(1, a.len()) - 1];
    ZSummary { modes: a.len(), median_abs_z: q(0.5), p95_abs_z: q(0.95), max_abs_z: a[a.len() - 1] }
}

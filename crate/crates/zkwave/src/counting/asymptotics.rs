//! Lattice sums Σ_{k1∈Z_L^d} g(tΩ_k(k1))F(k1) against their continuum
//! limit c·L^d·t⁻¹·∫F δ(Ω_k), c = ∫g.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{coarea_delta_integral, CoareaResolution};

/// Axis-aligned box containing the support of F.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SupportBox {
    pub fn cube(dim: usize, half: f64) -> SupportBox {
        SupportBox { lo: vec![-half; dim], hi: vec![half; dim] }
    }

    pub fn around(center: &[f64], half: f64) -> SupportBox {
        SupportBox { lo: center.iter().map(|c| c - half).collect(), hi: center.iter().map(|c| c + half).collect() }
    }
}

/// The kernel g with its integral c = ∫_R g.
pub struct Kernel<G> {
    pub g: G,
    pub integral: f64,
}

/// sin²(s)/s², ∫ = π.
pub fn fejer_kernel() -> Kernel<fn(f64) -> f64> {
    fn g(s: f64) -> f64 {
        if s == 0.0 {
            1.0
        } else {
            let r = s.sin() / s;
            r * r
        }
    }
    Kernel { g, integral: std::f64::consts::PI }
}

/// 1/(1+s²), ∫ = π.
pub fn lorentz_kernel() -> Kernel<fn(f64) -> f64> {
    fn g(s: f64) -> f64 {
        1.0 / (1.0 + s * s)
    }
    Kernel { g, integral: std::f64::consts::PI }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub size: f64,
    pub time: f64,
    pub lattice_sum: f64,
    /// L^d·t⁻¹·∫Fδ(Ω_k), without the factor c.
    pub raw_prediction: f64,
    /// c·L^d·t⁻¹·∫Fδ(Ω_k).
    pub prediction: f64,
    /// |lattice_sum − prediction| / L^{d−1}.
    pub remainder_ratio: f64,
    pub points: u64,
}

/// Lattice sum and continuum prediction at lattice size `size`. `k` is a real
/// wave vector with k_x ≠ 0; F is evaluated on the lattice points inside `support`.
pub fn resonance_sum_asymptotics<G: Fn(f64) -> f64>(
    kernel: &Kernel<G>,
    f: impl Fn(&[f64]) -> f64,
    support: &SupportBox,
    k: &[f64],
    t: f64,
    size: f64,
    res: CoareaResolution,
) -> Result<AsymptoticsReport> {
    let d = k.len();
    crate::lattice::check_dim(d, support.lo.len())?;
    crate::lattice::check_dim(d, support.hi.len())?;
    if k[0] == 0.0 {
        return Err(Error::Degenerate("k_x = 0: the continuum limit degenerates".into()));
    }
    if !(t > 0.0) {
        return Err(Error::param("t", "must be positive"));
    }
    if !(size > 0.0) {
        return Err(Error::param("L", "must be positive"));
    }
    let lam = |v: &[f64]| v[0] * v.iter().map(|c| c * c).sum::<f64>();
    let lk = lam(k);
    let lo: Vec<i64> = support.lo.iter().map(|x| (x * size).ceil() as i64).collect();
    let hi: Vec<i64> = support.hi.iter().map(|x| (x * size).floor() as i64).collect();
    let mut lattice_sum = 0.0;
    let mut points = 0;
    if lo.iter().zip(&hi).all(|(a, b)| a <= b) {
        let mut idx = lo.clone();
        let mut k1 = vec![0.0; d];
        let mut k2 = vec![0.0; d];
        'outer: loop {
            for i in 0..d {
                k1[i] = idx[i] as f64 / size;
                k2[i] = k[i] - k1[i];
            }
            let fv = f(&k1);
            if fv != 0.0 {
                let om = lam(&k1) + lam(&k2) - lk;
                lattice_sum += (kernel.g)(t * om) * fv;
            }
            points += 1;
            let mut ax = 0;
            loop {
                if ax == d {
                    break 'outer;
                }
                idx[ax] += 1;
                if idx[ax] <= hi[ax] {
                    break;
                }
                idx[ax] = lo[ax];
                ax += 1;
            }
        }
    }
    let delta = coarea_delta_integral(k, 0.0, support.lo[0], support.hi[0], res, &f)?;
    let raw_prediction = size.powi(d as i32) / t * delta;
    let prediction = kernel.integral * raw_prediction;
    Ok(AsymptoticsReport {
        size,
        time: t,
        lattice_sum,
        raw_prediction,
        prediction,
        remainder_ratio: (lattice_sum - prediction).abs() / size.powi(d as i32 - 1),
        points,
    })
}

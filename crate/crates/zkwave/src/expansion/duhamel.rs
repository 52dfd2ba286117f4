//! The bilinear Duhamel operator
//! T(φ1,φ2)_k(t) = (iλ/L^d) Σ_{k1+k2=k} ∫₀ᵗ k_x φ1_{k1}(s)φ2_{k2}(s) e^{isΩ(k1,k2,k) − ν|k|²(t−s)} ds,
//! with the convolution summed directly over lattice pairs and the time
//! integral by 2-point Gauss–Legendre on each grid interval (4th order).

use num_complex::Complex64;

use super::history::{History, Truncation};
use super::params::ModelParams;
use crate::error::{Error, Result};

/// T(φ1, φ2) as a history on the grid of its inputs. Outputs outside the
/// lattice ball are dropped and recorded in [`History::truncation`].
pub fn duhamel(phi1: &History, phi2: &History, params: &ModelParams) -> Result<History> {
    phi1.same_shape(phi2)?;
    let modes = phi1.modes.clone();
    let spec = modes.spec().clone();
    params.check_spec(&spec)?;
    let grid = phi1.grid;
    let s = grid.steps;
    let h = grid.h();
    let points = modes.points();
    let mut acc = vec![Complex64::default(); modes.len() * 2 * s];
    let mut touched = vec![false; modes.len()];
    let mut trunc = Truncation::default();
    let (sup1, sup2) = (phi1.sup_norm(), phi2.sup_norm());
    let coupling = params.coupling().abs();
    for &i1 in phi1.support() {
        let k1 = points[i1];
        let g1 = phi1.gauss_row(i1);
        for &i2 in phi2.support() {
            let k2 = points[i2];
            let k = k1 + k2;
            if k.x() == 0 {
                continue;
            }
            let Some(i) = modes.index_of(k) else {
                trunc.dropped_pairs += 1;
                trunc.dropped_bound += coupling * spec.kx(k).abs() * sup1 * sup2 * grid.t_final;
                continue;
            };
            touched[i] = true;
            let g2 = phi2.gauss_row(i2);
            let om = spec.omega(k1, k2, k);
            let step = Complex64::from_polar(1.0, h * om);
            let mut w = [
                Complex64::from_polar(1.0, grid.gauss_point(0, 0) * om),
                Complex64::from_polar(1.0, grid.gauss_point(0, 1) * om),
            ];
            let out = &mut acc[i * 2 * s..(i + 1) * 2 * s];
            for j in 0..s {
                for a in 0..2 {
                    out[2 * j + a] += g1[2 * j + a] * g2[2 * j + a] * w[a];
                    w[a] *= step;
                }
            }
        }
    }
    let c = Complex64::new(0.0, params.coupling());
    let mut nodes = vec![Complex64::default(); modes.len() * (s + 1)];
    for i in (0..modes.len()).filter(|&i| touched[i]) {
        let k = points[i];
        let mu = params.nu * spec.norm2(k);
        let decay = (-mu * h).exp();
        let tail = [(-mu * h * (1.0 - super::history::GAUSS_OFFSETS[0])).exp(), (-mu * h * (1.0 - super::history::GAUSS_OFFSETS[1])).exp()];
        let pref = c * spec.kx(k);
        let row = &acc[i * 2 * s..(i + 1) * 2 * s];
        let mut integral = Complex64::default();
        for j in 0..s {
            integral = integral * decay + (row[2 * j] * tail[0] + row[2 * j + 1] * tail[1]) * (0.5 * h);
            nodes[i * (s + 1) + j + 1] = pref * integral;
        }
    }
    let mut out = History::from_nodes(modes, grid, nodes)?;
    out.truncation = trunc;
    if phi1.is_hermitian() && phi2.is_hermitian() && !out.is_hermitian() {
        let d = out.hermitian_defect();
        if d > 1e-10 * out.sup_norm() {
            return Err(Error::Numerical(format!("Duhamel output lost Hermitian symmetry (defect {d:e})")));
        }
    }
    Ok(out)
}

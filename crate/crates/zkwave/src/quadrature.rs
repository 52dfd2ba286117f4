//! Gauss–Legendre rules and surface integrals over the resonance manifold
//! {k1 : Λ(k1)+Λ(k−k1)−Λ(k) = ω} (isotropic dispersion).
//!
//! For a fixed slice k1x = c the phase is a quadratic in k1⊥ with leading term
//! k_x|k1⊥|², so every slice of a level set is a sphere
//! |k1⊥ − m(c)|² = R²(c) + ω/k_x with m(c) = (k_x − c)k⊥/k_x and
//! R²(c) = (|k⊥|²/k_x² − 3)c² + (3k_x − |k⊥|²/k_x)c + |k⊥|².
//! On that sphere |∇Ω| = 2|k_x|·radius, which gives the co-area weight.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes and weights on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn legendre(n: usize) -> GaussRule {
        let n = NonZeroUsize::new(n.max(1)).expect("positive");
        let rule = GaussLegendre::new(n);
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + h * x)).sum::<f64>() * h
    }

    /// Composite rule on `panels` equal subintervals of [a, b].
    pub fn composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let w = (b - a) / panels as f64;
        (0..panels).map(|p| self.integrate(a + p as f64 * w, a + (p + 1) as f64 * w, &mut f)).sum()
    }
}

/// Resolution of the co-area quadrature.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CoareaResolution {
    /// Gauss nodes across each k1x interval (4-point panels).
    pub slice_count: usize,
    /// Angular order on each slice sphere.
    pub sphere_order: usize,
}

impl Default for CoareaResolution {
    fn default() -> Self {
        CoareaResolution { slice_count: 64, sphere_order: 16 }
    }
}

impl CoareaResolution {
    pub fn refined(&self) -> CoareaResolution {
        CoareaResolution { slice_count: 2 * self.slice_count, sphere_order: 2 * self.sphere_order }
    }
}

/// Center and squared radius of the slice sphere of the level set Ω = ω at k1x = c.
pub fn slice_sphere(k: &[f64], c: f64, omega: f64) -> (Vec<f64>, f64) {
    let kx = k[0];
    let perp = &k[1..];
    let kp2: f64 = perp.iter().map(|v| v * v).sum();
    let r2 = (kp2 / (kx * kx) - 3.0) * c * c + (3.0 * kx - kp2 / kx) * c + kp2 + omega / kx;
    let center = perp.iter().map(|v| (kx - c) * v / kx).collect();
    (center, r2)
}

/// Subintervals of [lo, hi] on which `a c² + b c + q > 0`.
fn positive_intervals(a: f64, b: f64, q: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo, hi];
    let scale = a.abs().max(b.abs()).max(q.abs()).max(f64::MIN_POSITIVE);
    if a.abs() > 1e-14 * scale {
        let disc = b * b - 4.0 * a * q;
        if disc > 0.0 {
            let s = disc.sqrt();
            // Numerically stable pair of roots.
            let t = -0.5 * (b + b.signum() * s);
            for r in [t / a, if t != 0.0 { q / t } else { -b / a }] {
                if r > lo && r < hi {
                    cuts.push(r);
                }
            }
        }
    } else if b.abs() > 1e-14 * scale {
        let r = -q / b;
        if r > lo && r < hi {
            cuts.push(r);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .filter(|w| {
            let m = 0.5 * (w[0] + w[1]);
            a * m * m + b * m + q > 0.0
        })
        .map(|w| (w[0], w[1]))
        .collect()
}

/// ∫_{R^d} F(k1) δ(Ω_k(k1) − ω) dk1 for `F` supported in the slab k1x ∈ [c_lo, c_hi].
///
/// Requires `k_x ≠ 0`: at `k_x = 0` the phase no longer has a quadratic
/// leading term in k1⊥ and the slices degenerate.
pub fn coarea_delta_integral(
    k: &[f64],
    omega: f64,
    c_lo: f64,
    c_hi: f64,
    res: CoareaResolution,
    f: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    let d = k.len();
    let kx = k[0];
    if kx == 0.0 {
        return Err(Error::Degenerate("k_x = 0: resonance slices degenerate; use the Gaussian mollifier path".into()));
    }
    if res.slice_count < 8 {
        return Err(Error::param("slice_count", "must be at least 8"));
    }
    if d == 1 {
        // Ω(c) = 3k_x c² − 3k_x² c; isolated roots with weight 1/|Ω'(c)|.
        let (a, b, q) = (3.0 * kx, -3.0 * kx * kx, -omega);
        let disc = b * b - 4.0 * a * q;
        if disc < 0.0 {
            return Ok(0.0);
        }
        let s = disc.sqrt();
        let mut total = 0.0;
        for c in [(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)] {
            let slope = (2.0 * a * c + b).abs();
            if slope > 0.0 && c >= c_lo && c <= c_hi {
                total += f(&[c]) / slope;
            }
            if disc == 0.0 {
                break;
            }
        }
        return Ok(total);
    }
    let kp2: f64 = k[1..].iter().map(|v| v * v).sum();
    let (a, b, q) = (kp2 / (kx * kx) - 3.0, 3.0 * kx - kp2 / kx, kp2 + omega / kx);
    let rule = GaussRule::legendre(4);
    let panels = (res.slice_count / 4).max(2);
    let n_perp = d - 1;
    let sphere = SphereRule::new(n_perp, res.sphere_order);
    let mut point = vec![0.0; d];
    let mut total = 0.0;
    for (lo, hi) in positive_intervals(a, b, q, c_lo, c_hi) {
        // c = lo + (hi − lo)(1 − cos θ)/2: the Jacobian vanishes like √ at the
        // ends, absorbing the 1/R endpoint singularity of planar slices.
        let half = 0.5 * (hi - lo);
        total += rule.composite(0.0, PI, panels, |th| {
            let c = lo + half * (1.0 - th.cos());
            let jac = half * th.sin();
            let (center, r2) = slice_sphere(k, c, omega);
            if r2 <= 0.0 {
                return 0.0;
            }
            let r = r2.sqrt();
            point[0] = c;
            let avg = sphere.integrate(|dir| {
                for i in 0..n_perp {
                    point[1 + i] = center[i] + r * dir[i];
                }
                f(&point)
            });
            // ∮ F dS / (2|k_x| R) with dS = R^{n-1} dσ.
            jac * avg * r.powi(n_perp as i32 - 2) / (2.0 * kx.abs())
        });
    }
    Ok(total)
}

/// Quadrature on the unit sphere S^{n−1} ⊂ R^n (n = 1, 2, 3), total mass |S^{n−1}|.
struct SphereRule {
    dirs: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereRule {
    fn new(n: usize, order: usize) -> SphereRule {
        let order = order.max(2);
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        match n {
            1 => {
                dirs = vec![vec![1.0], vec![-1.0]];
                weights = vec![1.0, 1.0];
            }
            2 => {
                let m = 4 * order;
                for j in 0..m {
                    let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    dirs.push(vec![th.cos(), th.sin()]);
                    weights.push(2.0 * PI / m as f64);
                }
            }
            _ => {
                let g = GaussRule::legendre(order);
                let m = 2 * order;
                for (z, wz) in g.nodes.iter().zip(&g.weights) {
                    let s = (1.0 - z * z).sqrt();
                    for j in 0..m {
                        let ph = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                        let mut v = vec![s * ph.cos(), s * ph.sin(), *z];
                        v.resize(n, 0.0);
                        dirs.push(v);
                        weights.push(wz * 2.0 * PI / m as f64);
                    }
                }
            }
        }
        SphereRule { dirs, weights }
    }

    fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.dirs.iter().zip(&self.weights).map(|(d, w)| w * f(d)).sum()
    }
}

/// ∫_{[−b,b]^d} F(k1) g_η(Ω_k(k1)) dk1 with the normalized Gaussian g_η of width η,
/// by a composite product Gauss rule (`panels` 4-point panels per axis).
pub fn mollified_delta_integral(k: &[f64], eta: f64, half_box: f64, panels: usize, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::param("eta", "mollifier width must be positive"));
    }
    let d = k.len();
    let rule = GaussRule::legendre(4);
    let w = 2.0 * half_box / panels as f64;
    let mut nodes = Vec::new();
    for p in 0..panels {
        let (a, b) = (-half_box + p as f64 * w, -half_box + (p + 1) as f64 * w);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push((0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * wt));
        }
    }
    let lam = |v: &[f64]| v[0] * v.iter().map(|c| c * c).sum::<f64>();
    let norm = 1.0 / ((2.0 * PI).sqrt() * eta);
    let lk = lam(k);
    let mut idx = vec![0usize; d];
    let mut p = vec![0.0; d];
    let mut q = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut wt = 1.0;
        for i in 0..d {
            p[i] = nodes[idx[i]].0;
            q[i] = k[i] - p[i];
            wt *= nodes[idx[i]].1;
        }
        let om = lam(&p) + lam(&q) - lk;
        let g = norm * (-0.5 * (om / eta) * (om / eta)).exp();
        if g > 0.0 {
            total += wt * g * f(&p);
        }
        let mut ax = 0;
        loop {
            if ax == d {
                return Ok(total);
            }
            idx[ax] += 1;
            if idx[ax] < nodes.len() {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

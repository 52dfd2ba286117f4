//! The lattice-sum identity
//! Σ_{K∈Z^d} f(K) = ∫f + Σ_{J∈{0,1}^d, J≠0} ∫ {x}^J ∂^J f(x) dx,
//! with {x} = x − ⌊x⌋, checked numerically on product test functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// One-dimensional smooth factor with a closed-form derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// exp(−a(x − c)²).
    Gaussian { center: f64, a: f64 },
    /// exp(−1/(1 − r²)) with r = (x − c)/radius, zero for |r| ≥ 1.
    Bump { center: f64, radius: f64 },
}

impl Factor {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Factor::Gaussian { center, a } => (-a * (x - center) * (x - center)).exp(),
            Factor::Bump { center, radius } => {
                let r = (x - center) / radius;
                if r.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Factor::Gaussian { center, a } => -2.0 * a * (x - center) * self.value(x),
            Factor::Bump { center, radius } => {
                let r = (x - center) / radius;
                if r.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - r * r;
                    self.value(x) * (-2.0 * r / (q * q)) / radius
                }
            }
        }
    }

    /// Half-width beyond which |value| < 1e−17 (relative to its peak 1).
    pub fn reach(&self) -> f64 {
        match *self {
            Factor::Gaussian { center, a } => center.abs() + (40.0 / a).sqrt(),
            Factor::Bump { center, radius } => center.abs() + radius,
        }
    }
}

/// f(x) = Π_i g_i(x_i).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFunction {
    pub factors: Vec<Factor>,
}

impl ProductFunction {
    pub fn gaussian(dim: usize, a: f64) -> ProductFunction {
        ProductFunction { factors: vec![Factor::Gaussian { center: 0.0, a }; dim] }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(g, &xi)| g.value(xi)).product()
    }

    /// ∂^J f for the axis set encoded in the bits of `mask`.
    pub fn mixed_partial(&self, mask: u32, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .zip(x)
            .enumerate()
            .map(|(i, (g, &xi))| if mask >> i & 1 == 1 { g.derivative(xi) } else { g.value(xi) })
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerMaclaurinReport {
    pub lattice_sum: f64,
    pub integral: f64,
    pub correction: f64,
    pub residual: f64,
    pub cells: usize,
}

/// Both sides of the identity: the sum over every lattice point in the
/// box where the function is nonnegligible, and the integrals cell by cell
/// with adaptive Gauss–Legendre refinement (the {x} weights are smooth
/// inside each unit cell).
pub fn euler_maclaurin_check(f: &ProductFunction) -> Result<EulerMaclaurinReport> {
    let d = f.dim();
    if d == 0 || d > 3 {
        return Err(Error::param("dim", "the check supports d = 1, 2, 3"));
    }
    for g in &f.factors {
        let ok = match *g {
            Factor::Gaussian { a, center } => a > 0.0 && center.is_finite(),
            Factor::Bump { radius, center } => radius > 0.0 && center.is_finite(),
        };
        if !ok {
            return Err(Error::Numerical(format!("factor {g:?} does not decay; the lattice sum diverges")));
        }
    }
    let lo: Vec<i64> = f.factors.iter().map(|g| (-g.reach()).floor() as i64 - 1).collect();
    let hi: Vec<i64> = f.factors.iter().map(|g| g.reach().ceil() as i64 + 1).collect();

    let mut lattice_sum = 0.0;
    let mut integral = 0.0;
    let mut correction = 0.0;
    let mut cells = 0;
    let coarse = GaussRule::legendre(10);
    let fine = GaussRule::legendre(16);
    let mut cell = lo.clone();
    loop {
        let x: Vec<f64> = cell.iter().map(|&c| c as f64).collect();
        lattice_sum += f.value(&x);
        if cell.iter().zip(&hi).all(|(c, h)| c < h) {
            let (i0, c0) = adaptive_cell(f, &x, 1.0, &coarse, &fine, 0);
            integral += i0;
            correction += c0;
            cells += 1;
        }
        let mut ax = 0;
        loop {
            if ax == d {
                let residual = (lattice_sum - integral - correction).abs();
                return Ok(EulerMaclaurinReport { lattice_sum, integral, correction, residual, cells });
            }
            cell[ax] += 1;
            if cell[ax] <= hi[ax] {
                break;
            }
            cell[ax] = lo[ax];
            ax += 1;
        }
    }
}

/// (∫ f, ∫ Σ_{J≠0} {x}^J ∂^J f) over the cube [corner, corner + width]^d lying in
/// the unit cell with integer corner ⌊corner⌋.
fn adaptive_cell(f: &ProductFunction, corner: &[f64], width: f64, coarse: &GaussRule, fine: &GaussRule, depth: usize) -> (f64, f64) {
    let a = product_rule(f, corner, width, coarse);
    let b = product_rule(f, corner, width, fine);
    let scale = b.0.abs() + b.1.abs();
    if depth >= 3 || ((a.0 - b.0).abs() + (a.1 - b.1).abs()) <= 1e-15 * scale.max(1e-300) + 1e-18 {
        return b;
    }
    let d = f.dim();
    let half = width / 2.0;
    let mut total = (0.0, 0.0);
    for sub in 0..(1u32 << d) {
        let c: Vec<f64> = (0..d).map(|i| corner[i] + if sub >> i & 1 == 1 { half } else { 0.0 }).collect();
        let r = adaptive_cell(f, &c, half, coarse, fine, depth + 1);
        total.0 += r.0;
        total.1 += r.1;
    }
    total
}

fn product_rule(f: &ProductFunction, corner: &[f64], width: f64, rule: &GaussRule) -> (f64, f64) {
    let d = f.dim();
    let n = rule.len();
    let base: Vec<f64> = corner.iter().map(|c| c.floor()).collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let (mut i0, mut i1) = (0.0, 0.0);
    loop {
        let mut w = 1.0;
        for ax in 0..d {
            x[ax] = corner[ax] + 0.5 * width * (rule.nodes[idx[ax]] + 1.0);
            w *= 0.5 * width * rule.weights[idx[ax]];
        }
        i0 += w * f.value(&x);
        let mut corr = 0.0;
        for mask in 1..(1u32 << d) {
            let frac: f64 = (0..d).filter(|i| mask >> i & 1 == 1).map(|i| x[i] - base[i]).product();
            corr += frac * f.mixed_partial(mask, &x);
        }
        i1 += w * corr;
        let mut ax = 0;
        loop {
            if ax == d {
                return (i0, i1);
            }
            idx[ax] += 1;
            if idx[ax] < n {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

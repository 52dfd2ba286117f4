//! Mode histories on a uniform time grid.
//!
//! Values are kept at the grid nodes t_j = j·h and, for quadrature, at the two
//! Gauss–Legendre points of every interval, obtained by cubic Lagrange
//! interpolation from the four nearest nodes.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ModeSet, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_final: f64,
    pub steps: usize,
}

/// Offsets of the 2-point Gauss rule within a unit interval.
pub(crate) const GAUSS_OFFSETS: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<TimeGrid> {
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::param("t_final", format!("must be nonnegative, got {t_final}")));
        }
        if steps == 0 {
            return Err(Error::param("steps", "must be positive"));
        }
        Ok(TimeGrid { t_final, steps })
    }

    pub fn h(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.t_final * j as f64 / self.steps as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| self.node(j)).collect()
    }

    /// Gauss point `a` ∈ {0, 1} of interval `j`.
    pub fn gauss_point(&self, j: usize, a: usize) -> f64 {
        (j as f64 + GAUSS_OFFSETS[a]) * self.h()
    }

    /// For interval `j`: first stencil node and Lagrange weights at both Gauss points.
    fn stencil(&self, j: usize) -> (usize, usize, [[f64; 4]; 2]) {
        let width = (self.steps + 1).min(4);
        let start = (j as isize - 1).clamp(0, (self.steps + 1 - width) as isize) as usize;
        let mut w = [[0.0; 4]; 2];
        for (a, wa) in w.iter_mut().enumerate() {
            let x = j as f64 + GAUSS_OFFSETS[a];
            for m in 0..width {
                let xm = (start + m) as f64;
                wa[m] = (0..width)
                    .filter(|&q| q != m)
                    .map(|q| {
                        let xq = (start + q) as f64;
                        (x - xq) / (xm - xq)
                    })
                    .product();
            }
        }
        (start, width, w)
    }
}

/// One complex amplitude per (mode, time) on a [`TimeGrid`].
#[derive(Clone, Debug)]
pub struct History {
    pub modes: Arc<ModeSet>,
    pub grid: TimeGrid,
    /// `[mode][node]`, `steps + 1` per mode.
    nodes: Vec<Complex64>,
    /// `[mode][2·interval + a]`, `2·steps` per mode.
    gauss: Vec<Complex64>,
    /// Modes with a nonzero value somewhere.
    support: Vec<usize>,
    hermitian: bool,
    pub truncation: Truncation,
}

/// Contributions dropped because k1+k2 left the lattice ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub dropped_pairs: usize,
    /// Upper bound on the sup-norm of the dropped part.
    pub dropped_bound: f64,
}

impl History {
    /// The same field at every time.
    pub fn constant(field: &SpectralField, grid: TimeGrid) -> History {
        let s = grid.steps;
        let n = field.modes.len();
        let mut nodes = Vec::with_capacity(n * (s + 1));
        let mut gauss = Vec::with_capacity(n * 2 * s);
        for v in &field.values {
            nodes.extend(std::iter::repeat(*v).take(s + 1));
            gauss.extend(std::iter::repeat(*v).take(2 * s));
        }
        History::assemble(field.modes.clone(), grid, nodes, gauss)
    }

    /// From node values laid out `[mode][node]`.
    pub fn from_nodes(modes: Arc<ModeSet>, grid: TimeGrid, nodes: Vec<Complex64>) -> Result<History> {
        let s = grid.steps;
        if nodes.len() != modes.len() * (s + 1) {
            return Err(Error::param("history", "node array has the wrong length"));
        }
        let stencils: Vec<_> = (0..s).map(|j| grid.stencil(j)).collect();
        let mut gauss = vec![Complex64::default(); modes.len() * 2 * s];
        for i in 0..modes.len() {
            let row = &nodes[i * (s + 1)..(i + 1) * (s + 1)];
            if row.iter().all(|v| *v == Complex64::default()) {
                continue;
            }
            for (j, (start, width, w)) in stencils.iter().enumerate() {
                for a in 0..2 {
                    let mut acc = Complex64::default();
                    for m in 0..*width {
                        acc += row[start + m] * w[a][m];
                    }
                    gauss[i * 2 * s + 2 * j + a] = acc;
                }
            }
        }
        Ok(History::assemble(modes, grid, nodes, gauss))
    }

    fn assemble(modes: Arc<ModeSet>, grid: TimeGrid, nodes: Vec<Complex64>, gauss: Vec<Complex64>) -> History {
        let s = grid.steps;
        let support =
            (0..modes.len()).filter(|&i| nodes[i * (s + 1)..(i + 1) * (s + 1)].iter().any(|v| v.norm_sqr() > 0.0)).collect();
        let mut h = History { modes, grid, nodes, gauss, support, hermitian: false, truncation: Truncation::default() };
        h.hermitian = h.hermitian_defect() <= 1e-12 * h.sup_norm().max(f64::MIN_POSITIVE);
        h
    }

    pub fn zeros(modes: Arc<ModeSet>, grid: TimeGrid) -> History {
        History::constant(&SpectralField::zeros(modes, 0.0), grid)
    }

    #[inline]
    pub(crate) fn gauss_row(&self, i: usize) -> &[Complex64] {
        let s2 = 2 * self.grid.steps;
        &self.gauss[i * s2..(i + 1) * s2]
    }

    #[inline]
    pub fn node_row(&self, i: usize) -> &[Complex64] {
        let s1 = self.grid.steps + 1;
        &self.nodes[i * s1..(i + 1) * s1]
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Whether every time slice satisfies ψ_{−k} = conj ψ_k.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for &i in &self.support {
            let (a, b) = (self.node_row(i), self.node_row(self.modes.neg_index(i)));
            for (x, y) in a.iter().zip(b) {
                d = d.max((x.conj() - y).norm());
            }
        }
        d
    }

    pub fn sup_norm(&self) -> f64 {
        self.nodes.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The field at grid node `j`.
    pub fn at(&self, j: usize) -> SpectralField {
        let s1 = self.grid.steps + 1;
        SpectralField {
            modes: self.modes.clone(),
            values: (0..self.modes.len()).map(|i| self.nodes[i * s1 + j]).collect(),
            time: self.grid.node(j),
        }
    }

    pub fn final_field(&self) -> SpectralField {
        self.at(self.grid.steps)
    }

    pub fn same_shape(&self, other: &History) -> Result<()> {
        if !(Arc::ptr_eq(&self.modes, &other.modes) || self.modes.spec() == other.modes.spec()) {
            return Err(Error::param("history", "histories live on different lattices"));
        }
        if self.grid != other.grid {
            return Err(Error::param("history", "histories use different time grids"));
        }
        Ok(())
    }

    /// Σ c_i·h_i over histories of one shape.
    pub fn linear_combination(terms: &[(f64, &History)]) -> Result<History> {
        let (_, first) = terms.first().ok_or_else(|| Error::param("history", "empty combination"))?;
        let mut nodes = vec![Complex64::default(); first.nodes.len()];
        let mut gauss = vec![Complex64::default(); first.gauss.len()];
        let mut truncation = Truncation::default();
        for (c, h) in terms {
            first.same_shape(h)?;
            for (o, v) in nodes.iter_mut().zip(&h.nodes) {
                *o += v * c;
            }
            for (o, v) in gauss.iter_mut().zip(&h.gauss) {
                *o += v * c;
            }
            truncation.dropped_pairs += h.truncation.dropped_pairs;
            truncation.dropped_bound += c.abs() * h.truncation.dropped_bound;
        }
        let mut out = History::assemble(first.modes.clone(), first.grid, nodes, gauss);
        out.truncation = truncation;
        Ok(out)
    }

    /// Same history scaled by a complex factor.
    pub fn scaled(&self, c: Complex64) -> History {
        let mut h = History::assemble(
            self.modes.clone(),
            self.grid,
            self.nodes.iter().map(|v| v * c).collect(),
            self.gauss.iter().map(|v| v * c).collect(),
        );
        h.truncation = self.truncation;
        h
    }
}

//! Tree terms J_T, the truncated expansion φ_app and its residual.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::duhamel::duhamel;
use super::history::{History, TimeGrid};
use super::params::ModelParams;
use crate::diagrams::{enumerate_trees, BinaryTree, Decoration};
use crate::error::{Error, Result};
use crate::lattice::SpectralField;

/// Evaluates tree terms for one initial datum, sharing subtree histories.
pub struct TreeEvaluator {
    xi: Arc<History>,
    params: ModelParams,
    memo: HashMap<String, Arc<History>>,
}

impl TreeEvaluator {
    pub fn new(xi: &SpectralField, grid: TimeGrid, params: ModelParams) -> Result<TreeEvaluator> {
        params.check_spec(xi.spec())?;
        Ok(TreeEvaluator { xi: Arc::new(History::constant(xi, grid)), params, memo: HashMap::new() })
    }

    pub fn grid(&self) -> TimeGrid {
        self.xi.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn xi(&self) -> &Arc<History> {
        &self.xi
    }

    /// J_T as a history: ξ for a leaf, T(J_{T1}, J_{T2}) otherwise.
    pub fn term(&mut self, t: &BinaryTree) -> Result<Arc<History>> {
        if t.box_count() > 0 {
            return Err(Error::param("tree", "box nodes need the linearized operator"));
        }
        let key = t.to_string();
        if let Some(h) = self.memo.get(&key) {
            return Ok(h.clone());
        }
        let out = match t.split() {
            None => {
                debug_assert_eq!(t.decoration(BinaryTree::ROOT), Decoration::Leaf);
                self.xi.clone()
            }
            Some((a, b)) => {
                let ha = self.term(&a)?;
                let hb = self.term(&b)?;
                Arc::new(duhamel(&ha, &hb, &self.params)?)
            }
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// φ_app = Σ_{l(T) ≤ N} J_T.
    pub fn approximate_solution(&mut self, n: usize) -> Result<History> {
        let terms: Vec<Arc<History>> = enumerate_trees(n).iter().map(|t| self.term(t)).collect::<Result<_>>()?;
        History::linear_combination(&terms.iter().map(|h| (1.0, h.as_ref())).collect::<Vec<_>>())
    }

    /// Err = ξ + T(φ_app, φ_app) − φ_app.
    pub fn residual(&mut self, n: usize) -> Result<History> {
        let app = self.approximate_solution(n)?;
        let t = duhamel(&app, &app, &self.params)?;
        History::linear_combination(&[(1.0, self.xi.as_ref()), (1.0, &t), (-1.0, &app)])
    }

    /// Σ J_T over trees with l(T) > N whose two root subtrees have at most N
    /// branches — the same quantity as [`residual`](Self::residual), term by term.
    pub fn residual_tree_sum(&mut self, n: usize) -> Result<History> {
        let small = enumerate_trees(n);
        let mut parts = Vec::new();
        for a in &small {
            for b in &small {
                if a.l() + b.l() + 1 > n {
                    parts.push(self.term(&BinaryTree::join(a, b))?);
                }
            }
        }
        History::linear_combination(&parts.iter().map(|h| (1.0, h.as_ref())).collect::<Vec<_>>())
    }
}

/// J_T(t) at the end of the grid.
pub fn tree_term(t: &BinaryTree, xi: &SpectralField, grid: TimeGrid, params: &ModelParams) -> Result<SpectralField> {
    Ok(TreeEvaluator::new(xi, grid, *params)?.term(t)?.final_field())
}

pub fn approximate_solution(n: usize, xi: &SpectralField, grid: TimeGrid, params: &ModelParams) -> Result<SpectralField> {
    Ok(TreeEvaluator::new(xi, grid, *params)?.approximate_solution(n)?.final_field())
}

pub fn residual(n: usize, xi: &SpectralField, grid: TimeGrid, params: &ModelParams) -> Result<SpectralField> {
    Ok(TreeEvaluator::new(xi, grid, *params)?.residual(n)?.final_field())
}

/// Sup over the grid and the modes of |Err|.
pub fn residual_sup(n: usize, xi: &SpectralField, grid: TimeGrid, params: &ModelParams) -> Result<f64> {
    Ok(TreeEvaluator::new(xi, grid, *params)?.residual(n)?.sup_norm())
}

/// (iλ/L^d)^l, the prefactor multiplying the coefficient of a tree with l branches.
pub fn tree_prefactor(params: &ModelParams, l: usize) -> Complex64 {
    Complex64::new(0.0, params.coupling()).powu(l as u32)
}

//! The time coefficient of a tree term,
//! H^T = ∫_{t_children ≤ t_parent} Π_n e^{i t_n Ω_n − ν(t_parent(n) − t_n)|k_n|²} k_{n,x} dt,
//! evaluated by nested composite Gauss–Legendre quadrature.

use num_complex::Complex64;

use super::params::ModelParams;
use crate::diagrams::BinaryTree;
use crate::error::{Error, Result};
use crate::lattice::{IVec, LatticeSpec};
use crate::quadrature::GaussRule;

/// Largest tree the nested quadrature accepts.
pub const MAX_COEFFICIENT_BRANCHES: usize = 3;

const PANEL_ORDER: usize = 16;

/// Momenta on every edge of `t` (indexed by tree node) from its leaf momenta.
pub fn assignment_from_leaves(t: &BinaryTree, leaves: &[IVec]) -> Result<Vec<IVec>> {
    if leaves.len() != t.leaf_count() {
        return Err(Error::param("assignment", format!("{} leaf values for {} leaves", leaves.len(), t.leaf_count())));
    }
    let mut k = vec![IVec::ZERO; t.node_count()];
    for (label, &n) in t.leaves().iter().enumerate() {
        k[n] = leaves[label];
    }
    for n in (0..t.node_count()).rev() {
        if let Some([a, b]) = t.children(n) {
            k[n] = k[a] + k[b];
        }
    }
    Ok(k)
}

/// H^T(t) for the edge momenta `assignment` (one per tree node, the root
/// entry being the output mode k). Fails if some node has k_n ≠ k_{c1} + k_{c2}.
pub fn coefficient_h(t: &BinaryTree, assignment: &[IVec], time: f64, params: &ModelParams, spec: &LatticeSpec) -> Result<Complex64> {
    params.check_spec(spec)?;
    if assignment.len() != t.node_count() {
        return Err(Error::param("assignment", format!("{} values for {} edges", assignment.len(), t.node_count())));
    }
    if t.l() > MAX_COEFFICIENT_BRANCHES {
        return Err(Error::param("tree", format!("at most {MAX_COEFFICIENT_BRANCHES} branches")));
    }
    for n in t.branches() {
        let [a, b] = t.children(n).expect("branch");
        if assignment[a] + assignment[b] != assignment[n] {
            return Err(Error::MomentumViolation { node: n });
        }
    }
    let rule = GaussRule::legendre(PANEL_ORDER);
    let ev = Nested { t, k: assignment, params, spec, rule: &rule };
    Ok(ev.eval(BinaryTree::ROOT, time))
}

struct Nested<'a> {
    t: &'a BinaryTree,
    k: &'a [IVec],
    params: &'a ModelParams,
    spec: &'a LatticeSpec,
    rule: &'a GaussRule,
}

impl Nested<'_> {
    fn omega(&self, n: usize) -> f64 {
        let [a, b] = self.t.children(n).expect("branch");
        self.spec.omega(self.k[a], self.k[b], self.k[n])
    }

    /// Σ over the subtree of the rates |Ω_n| + ν|k_n|², which sets the panel count.
    fn rate(&self, n: usize) -> f64 {
        match self.t.children(n) {
            None => 0.0,
            Some([a, b]) => self.omega(n).abs() + self.params.nu * self.spec.norm2(self.k[n]) + self.rate(a) + self.rate(b),
        }
    }

    /// G_n(τ) = k_{n,x} ∫₀^τ e^{isΩ_n − ν|k_n|²(τ−s)} G_{c1}(s) G_{c2}(s) ds; 1 at leaves.
    fn eval(&self, n: usize, tau: f64) -> Complex64 {
        let Some([a, b]) = self.t.children(n) else {
            return Complex64::new(1.0, 0.0);
        };
        if tau == 0.0 {
            return Complex64::default();
        }
        let om = self.omega(n);
        let mu = self.params.nu * self.spec.norm2(self.k[n]);
        let panels = 1 + (self.rate(n) * tau / 3.0).ceil() as usize;
        let w = tau / panels as f64;
        let mut total = Complex64::default();
        for p in 0..panels {
            let (lo, hi) = (p as f64 * w, (p + 1) as f64 * w);
            for (x, wt) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let s = 0.5 * (lo + hi) + 0.5 * w * x;
                let f = Complex64::from_polar((-mu * (tau - s)).exp(), s * om) * self.eval(a, s) * self.eval(b, s);
                total += f * (0.5 * w * wt);
            }
        }
        total * self.spec.kx(self.k[n])
    }
}

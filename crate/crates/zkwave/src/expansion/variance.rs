//! Exact Gaussian moments of tree terms by Wick's theorem.
//!
//! E[J_{T,k} conj J_{T′,k}] = (iλ/L^d)^l conj((iλ/L^d)^{l′}) Σ_p Σ H^T conj H^{T′} Π n_in,
//! summed over every pairing p of the leaves of (T, T′) and every lattice
//! assignment compatible with p. Pair covariances are those of the sampler:
//! E[ξ_a ξ_b] = n(a)·1{a+b=0} within one tree and E[ξ_a conj ξ_b] = n(a)·1{a=b}
//! across. Intermediate momenta must stay in the lattice ball, matching the
//! truncation of the tree-term recursion.

use std::collections::HashMap;

use num_complex::Complex64;

use super::coefficient::{assignment_from_leaves, coefficient_h};
use super::params::ModelParams;
use super::trees::tree_prefactor;
use crate::diagrams::{enumerate_pairings, BinaryTree, Side};
use crate::error::{Error, Result};
use crate::initial_data::LatticeProfile;
use crate::lattice::IVec;

/// Default cap on the number of (pairing, assignment) combinations.
pub const DEFAULT_WICK_BUDGET: f64 = 5e7;

/// Largest tree accepted by the exact variance.
pub const MAX_VARIANCE_BRANCHES: usize = 2;

/// E|J_{T,k}(t)|².
pub fn variance_via_couples(t: &BinaryTree, k: IVec, time: f64, params: &ModelParams, profile: &LatticeProfile) -> Result<f64> {
    Ok(cross_moment(t, t, k, time, params, profile, DEFAULT_WICK_BUDGET)?.re)
}

/// E[J_{T,k}(t) · conj J_{T′,k}(t)].
pub fn cross_moment(
    t: &BinaryTree,
    t2: &BinaryTree,
    k: IVec,
    time: f64,
    params: &ModelParams,
    profile: &LatticeProfile,
    budget: f64,
) -> Result<Complex64> {
    let spec = profile.spec().clone();
    params.check_spec(&spec)?;
    if t.l().max(t2.l()) > MAX_VARIANCE_BRANCHES {
        return Err(Error::param("tree", format!("exact variance supports at most {MAX_VARIANCE_BRANCHES} branches")));
    }
    if !spec.contains(k) {
        return Ok(Complex64::default());
    }
    let support = profile.support();
    let s = support.len() as f64;
    let pairings = enumerate_pairings(t, t2)?;
    let mut estimate = 0.0;
    for p in &pairings {
        let cross = p.cross_count();
        let free = p.pairs.len() - cross.min(1);
        estimate += s.powi(free as i32);
    }
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let mut cache_l: HashMap<Vec<IVec>, Complex64> = HashMap::new();
    let mut cache_r: HashMap<Vec<IVec>, Complex64> = HashMap::new();
    let coef = |tree: &BinaryTree, leaves: Vec<IVec>, cache: &mut HashMap<Vec<IVec>, Complex64>| -> Result<Complex64> {
        if let Some(v) = cache.get(&leaves) {
            return Ok(*v);
        }
        let edges = assignment_from_leaves(tree, &leaves)?;
        let v = if edges.iter().all(|e| spec.contains(*e)) {
            coefficient_h(tree, &edges, time, params, &spec)?
        } else {
            Complex64::default()
        };
        cache.insert(leaves, v);
        Ok(v)
    };
    let (m1, m2) = (t.leaf_count(), t2.leaf_count());
    let mut total = Complex64::default();
    for p in &pairings {
        let cross: Vec<usize> = (0..p.pairs.len()).filter(|&i| p.pairs[i].0.side != p.pairs[i].1.side).collect();
        if cross.is_empty() && !k.is_zero() {
            continue;
        }
        // The last cross pair is fixed by the leaf sum; every other pair is free.
        let fixed_pair = cross.last().copied();
        let free: Vec<usize> = (0..p.pairs.len()).filter(|&i| Some(i) != fixed_pair).collect();
        let mut idx = vec![0usize; free.len()];
        if support.is_empty() {
            break;
        }
        loop {
            let mut val = vec![IVec::ZERO; p.pairs.len()];
            for (slot, &pi) in free.iter().enumerate() {
                val[pi] = support[idx[slot]];
            }
            let mut ok = true;
            if let Some(fp) = fixed_pair {
                let others: IVec = cross.iter().filter(|&&c| c != fp).fold(IVec::ZERO, |a, &c| a + val[c]);
                val[fp] = k - others;
                ok = profile.get(val[fp]) > 0.0;
            }
            if ok {
                let mut weight = 1.0;
                let mut left = vec![IVec::ZERO; m1];
                let mut right = vec![IVec::ZERO; m2];
                for (pi, &(a, b)) in p.pairs.iter().enumerate() {
                    let x = val[pi];
                    weight *= profile.get(x);
                    // First leaf carries x; a same-tree partner carries −x, a cross partner x.
                    let y = if a.side == b.side { -x } else { x };
                    for (r, v) in [(a, x), (b, y)] {
                        match r.side {
                            Side::Left => left[r.label - 1] = v,
                            Side::Right => right[r.label - 1] = v,
                        }
                    }
                }
                if weight > 0.0 {
                    let hl = coef(t, left, &mut cache_l)?;
                    let hr = if t == t2 {
                        coef(t, right, &mut cache_l)?
                    } else {
                        coef(t2, right, &mut cache_r)?
                    };
                    total += hl * hr.conj() * weight;
                }
            }
            // Odometer over the free pairs.
            let mut ax = 0;
            loop {
                if ax == idx.len() {
                    break;
                }
                idx[ax] += 1;
                if idx[ax] < support.len() {
                    break;
                }
                idx[ax] = 0;
                ax += 1;
            }
            if ax == idx.len() {
                break;
            }
        }
    }
    Ok(tree_prefactor(params, t.l()) * tree_prefactor(params, t2.l()).conj() * total)
}

//! The linearized operator P_T: w ↦ T(J_T, w) and an empirical estimate of
//! its norm on the weighted sup space ‖w‖ = sup_{t,k} ⟨k⟩^p |w_k(t)|.

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::duhamel::duhamel;
use super::history::History;
use super::trees::TreeEvaluator;
use crate::diagrams::BinaryTree;
use crate::error::{Error, Result};

/// T(J_T, w).
pub fn apply_linearized(eval: &mut TreeEvaluator, t: &BinaryTree, w: &History) -> Result<History> {
    let jt = eval.term(t)?;
    jt.same_shape(w)?;
    duhamel(&jt, w, eval.params())
}

/// sup_{t,k} (1+|k|²)^{p/2} |w_k(t)|.
pub fn weighted_sup(w: &History, p: f64) -> f64 {
    let spec = w.modes.spec();
    let mut best: f64 = 0.0;
    for &i in w.support() {
        let weight = (1.0 + spec.norm2(w.modes.points()[i])).powf(p / 2.0);
        for v in w.node_row(i) {
            best = best.max(weight * v.norm());
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormProbe {
    /// Largest observed ‖P_T w‖/‖w‖.
    pub estimate: f64,
    /// Ratio after each iteration, per probe.
    pub ratios: Vec<Vec<f64>>,
}

/// Power-iteration style probing: start from seeded random Hermitian
/// histories, apply P_T, renormalize and repeat.
pub fn probe_operator_norm(
    eval: &mut TreeEvaluator,
    t: &BinaryTree,
    probes: usize,
    iterations: usize,
    p: f64,
    seed: u64,
) -> Result<NormProbe> {
    if probes == 0 || iterations == 0 {
        return Err(Error::param("probes", "need at least one probe and one iteration"));
    }
    let grid = eval.grid();
    let modes = eval.xi().modes.clone();
    let mut ratios = Vec::new();
    let mut estimate: f64 = 0.0;
    for probe in 0..probes {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(probe as u64);
        let n = modes.len();
        let s1 = grid.steps + 1;
        let mut nodes = vec![Complex64::default(); n * s1];
        for i in 0..n {
            let j = modes.neg_index(i);
            if j < i {
                continue;
            }
            for step in 0..s1 {
                let re = unit(&mut rng) - 0.5;
                let im = if j == i { 0.0 } else { unit(&mut rng) - 0.5 };
                let v = Complex64::new(re, im);
                nodes[i * s1 + step] = v;
                nodes[j * s1 + step] = v.conj();
            }
        }
        let mut w = History::from_nodes(modes.clone(), grid, nodes)?;
        let mut row = Vec::new();
        for _ in 0..iterations {
            let norm = weighted_sup(&w, p);
            if norm == 0.0 {
                break;
            }
            let pw = apply_linearized(eval, t, &w)?;
            let ratio = weighted_sup(&pw, p) / norm;
            row.push(ratio);
            estimate = estimate.max(ratio);
            let next = weighted_sup(&pw, p);
            if next == 0.0 {
                break;
            }
            w = pw.scaled(Complex64::new(1.0 / next, 0.0));
        }
        ratios.push(row);
    }
    Ok(NormProbe { estimate, ratios })
}

fn unit(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

//! Exact solution counts of the equation system attached to a couple:
//! momentum conservation Σι_e k_e = 0 and the energy window
//! |Ω_n − σ_n| ≤ δ/T_max at every node, dyadic size classes on normal edges,
//! |k_e| ≤ radius on every edge, and prescribed values on fixed legs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagrams::{Couple, LegState};
use crate::error::{Error, Result};
use crate::lattice::{lattice_ball_points, IVec, LatticeSpec};

/// Size class of |k_x| on a normal edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kappa {
    /// κ/2 ≤ |k_x| ≤ 2κ.
    Dyadic(f64),
    /// 0 < |k_x| ≤ cap (the class κ = 0, cap of order α²).
    Small { cap: f64 },
    /// No constraint.
    Any,
}

impl Kappa {
    pub fn admits(&self, kx: f64) -> bool {
        let a = kx.abs();
        match *self {
            Kappa::Dyadic(k) => a >= 0.5 * k * (1.0 - 1e-12) && a <= 2.0 * k * (1.0 + 1e-12),
            Kappa::Small { cap } => a > 0.0 && a <= cap * (1.0 + 1e-12),
            Kappa::Any => true,
        }
    }
}

/// Default cap on the number of enumerated partial assignments.
pub const DEFAULT_COUNT_BUDGET: f64 = 1e9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupleEquationSystem {
    pub couple: Couple,
    /// σ_n per node id (missing → 0).
    pub sigma: BTreeMap<usize, f64>,
    /// Class per normal edge id.
    pub kappa: BTreeMap<usize, Kappa>,
    /// Value per fixed leg id.
    pub fixed: BTreeMap<usize, IVec>,
    pub spec: LatticeSpec,
    pub t_max: f64,
    pub delta: f64,
    pub budget: f64,
}

impl CoupleEquationSystem {
    /// σ = 0, no size classes, fixed legs still to be set.
    pub fn new(couple: Couple, spec: LatticeSpec, t_max: f64) -> CoupleEquationSystem {
        let kappa = couple.edges.iter().filter(|e| e.normal).map(|e| (e.id, Kappa::Any)).collect();
        CoupleEquationSystem {
            couple,
            sigma: BTreeMap::new(),
            kappa,
            fixed: BTreeMap::new(),
            spec,
            t_max,
            delta: 1.0,
            budget: DEFAULT_COUNT_BUDGET,
        }
    }

    pub fn with_fixed(mut self, leg: usize, value: IVec) -> CoupleEquationSystem {
        self.fixed.insert(leg, value);
        self
    }

    pub fn fixed_legs(&self) -> Vec<usize> {
        self.couple.legs().filter(|e| e.leg == Some(LegState::Fixed)).map(|e| e.id).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.couple.validate()?;
        if !(self.t_max > 0.0 && self.delta > 0.0) {
            return Err(Error::param("T_max", "window parameters must be positive"));
        }
        let fixed: BTreeSet<usize> = self.fixed_legs().into_iter().collect();
        let given: BTreeSet<usize> = self.fixed.keys().copied().collect();
        if fixed != given {
            return Err(Error::param("fixed", format!("fixed legs {fixed:?} but values for {given:?}")));
        }
        let normal: BTreeSet<usize> = self.couple.edges.iter().filter(|e| e.normal).map(|e| e.id).collect();
        let classes: BTreeSet<usize> = self.kappa.keys().copied().collect();
        if normal != classes {
            return Err(Error::param("kappa", format!("normal edges {normal:?} but classes for {classes:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Branch(usize),
    Solve { edge: usize, node: usize },
}

struct Plan {
    ops: Vec<Op>,
    /// Nodes whose edges are all known after op i.
    checks: Vec<Vec<usize>>,
    /// Nodes fully determined before any op (all edges fixed legs).
    initial_checks: Vec<usize>,
}

/// Edge positions incident to each node, with ι.
fn incidence(c: &Couple) -> Vec<Vec<(usize, i64)>> {
    c.nodes
        .iter()
        .map(|n| {
            c.edges.iter().enumerate().filter(|(_, e)| e.touches(n.id)).map(|(i, e)| (i, e.iota(n.id))).collect()
        })
        .collect()
}

fn plan(c: &Couple, known0: &[bool], inc: &[Vec<(usize, i64)>]) -> Plan {
    let mut known = known0.to_vec();
    let complete = |known: &[bool], n: usize| inc[n].iter().all(|&(e, _)| known[e]);
    let mut done: Vec<bool> = (0..c.nodes.len()).map(|n| complete(&known, n)).collect();
    let initial_checks = (0..c.nodes.len()).filter(|&n| done[n]).collect();
    let mut ops = Vec::new();
    let mut checks = Vec::new();
    while known.iter().any(|k| !k) {
        let solvable = (0..c.nodes.len()).find_map(|n| {
            let unknown: Vec<&(usize, i64)> = inc[n].iter().filter(|(e, _)| !known[*e]).collect();
            match unknown.as_slice() {
                [(e, iota)] if *iota != 0 => Some(Op::Solve { edge: *e, node: n }),
                _ => None,
            }
        });
        let op = solvable.unwrap_or_else(|| {
            let e = (0..known.len()).filter(|&e| !known[e]).min_by_key(|&e| c.edges[e].id).expect("unknown edge");
            Op::Branch(e)
        });
        let e = match op {
            Op::Branch(e) | Op::Solve { edge: e, .. } => e,
        };
        known[e] = true;
        let mut now = Vec::new();
        for n in 0..c.nodes.len() {
            if !done[n] && complete(&known, n) {
                done[n] = true;
                now.push(n);
            }
        }
        ops.push(op);
        checks.push(now);
    }
    Plan { ops, checks, initial_checks }
}

struct Search<'a> {
    sys: &'a CoupleEquationSystem,
    inc: Vec<Vec<(usize, i64)>>,
    plan: Plan,
    candidates: Vec<Vec<IVec>>,
    values: Vec<IVec>,
    l3: f64,
    half: f64,
    count: u64,
}

impl Search<'_> {
    fn edge_ok(&self, e: usize, k: IVec) -> bool {
        let edge = &self.sys.couple.edges[e];
        self.sys.spec.contains(k)
            && self.sys.kappa.get(&edge.id).map_or(true, |kp| kp.admits(self.sys.spec.kx(k)))
    }

    fn node_ok(&self, n: usize) -> bool {
        let mut s = IVec::ZERO;
        let mut om: i64 = 0;
        for &(e, iota) in &self.inc[n] {
            s = s + self.values[e] * iota;
            om -= iota * self.values[e].lambda_int();
        }
        if !s.is_zero() {
            return false;
        }
        let sigma = self.sys.sigma.get(&self.sys.couple.nodes[n].id).copied().unwrap_or(0.0);
        (om as f64 / self.l3 - sigma).abs() <= self.half
    }

    fn run(&mut self, i: usize) {
        if i == self.plan.ops.len() {
            self.count += 1;
            return;
        }
        match self.plan.ops[i] {
            Op::Branch(e) => {
                for c in 0..self.candidates[e].len() {
                    self.values[e] = self.candidates[e][c];
                    if self.plan.checks[i].iter().all(|&n| self.node_ok(n)) {
                        self.run(i + 1);
                    }
                }
            }
            Op::Solve { edge, node } => {
                let mut s = IVec::ZERO;
                let mut iota_e = 0;
                for &(e, iota) in &self.inc[node] {
                    if e == edge {
                        iota_e += iota;
                    } else {
                        s = s + self.values[e] * iota;
                    }
                }
                // ι_e k_e + s = 0 with ι_e = ±1.
                let k = -s * iota_e;
                if !self.edge_ok(edge, k) {
                    return;
                }
                self.values[edge] = k;
                if self.plan.checks[i].iter().all(|&n| self.node_ok(n)) {
                    self.run(i + 1);
                }
            }
        }
    }
}

/// Number of lattice assignments satisfying the system.
pub fn brute_force_eq(sys: &CoupleEquationSystem) -> Result<u64> {
    sys.validate()?;
    let c = &sys.couple;
    let inc = incidence(c);
    let mut known = vec![false; c.edges.len()];
    let mut values = vec![IVec::ZERO; c.edges.len()];
    for (i, e) in c.edges.iter().enumerate() {
        if let Some(v) = sys.fixed.get(&e.id) {
            known[i] = true;
            values[i] = *v;
        }
    }
    let plan = plan(c, &known, &inc);
    let ball = lattice_ball_points(&sys.spec);
    let mut candidates = vec![Vec::new(); c.edges.len()];
    let mut estimate = 1.0;
    for op in &plan.ops {
        if let Op::Branch(e) = *op {
            let kp = sys.kappa.get(&c.edges[e].id).copied().unwrap_or(Kappa::Any);
            candidates[e] = ball.iter().copied().filter(|k| kp.admits(sys.spec.kx(*k))).collect();
            estimate *= candidates[e].len().max(1) as f64;
        }
    }
    if estimate > sys.budget {
        return Err(Error::BudgetExceeded { estimate, budget: sys.budget });
    }
    let mut search = Search {
        sys,
        inc,
        plan,
        candidates,
        values,
        l3: sys.spec.size.powi(3),
        half: sys.delta / sys.t_max,
        count: 0,
    };
    if (0..c.edges.len()).any(|i| known[i] && !search.edge_ok(i, search.values[i])) {
        return Ok(0);
    }
    if !search.plan.initial_checks.iter().all(|&n| search.node_ok(n)) {
        return Ok(0);
    }
    search.run(0);
    Ok(search.count)
}

/// max over fixed-leg values drawn from `candidates` of [`brute_force_eq`],
/// with the maximizing values.
pub fn sup_over_fixed_legs(sys: &CoupleEquationSystem, candidates: &[IVec]) -> Result<(u64, BTreeMap<usize, IVec>)> {
    let legs = sys.fixed_legs();
    let mut work = sys.clone();
    let combos = (candidates.len() as f64).powi(legs.len() as i32);
    if combos > sys.budget {
        return Err(Error::BudgetExceeded { estimate: combos, budget: sys.budget });
    }
    let mut best = (0, BTreeMap::new());
    let mut idx = vec![0usize; legs.len()];
    if candidates.is_empty() && !legs.is_empty() {
        return Ok(best);
    }
    loop {
        work.fixed = legs.iter().zip(&idx).map(|(&l, &i)| (l, candidates[i])).collect();
        let n = brute_force_eq(&work)?;
        if n > best.0 || best.1.is_empty() {
            best = (n, work.fixed.clone());
        }
        let mut ax = 0;
        while ax < idx.len() {
            idx[ax] += 1;
            if idx[ax] < candidates.len() {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
        if ax == idx.len() {
            break;
        }
    }
    Ok(best)
}

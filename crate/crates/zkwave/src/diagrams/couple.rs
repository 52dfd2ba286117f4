//! Couples: degree-{1,3} multigraphs obtained by gluing two trees along a
//! pairing of their leaves, and the cuts that split them.
//!
//! Conventions. Every edge has a tail and a head; a node's sign for an edge
//! is ι = +1 if the edge points into the node and −1 if it leaves. The
//! momentum equation of a node is Σ ι_e k_e = 0 and its phase is
//! Ω_n = −Σ ι_e Λ(k_e). In T edges point away from the root (the root leg
//! into the root); T′ is flipped. A merged leaf pair (u, v) becomes one edge
//! from the parent of `u` to the parent of `v`, so a T–T′ pair forces
//! k_u = k_v and a same-tree pair forces k_u = −k_v.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::pairing::{LeafRef, Pairing, Side};
use super::tree::{BinaryTree, Decoration};
use crate::error::{Error, Result};
use crate::lattice::IVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Node(usize),
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegState {
    Free,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoupleNode {
    pub id: usize,
    /// Tree node this node came from, when built by gluing.
    pub origin: Option<(Side, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoupleEdge {
    pub id: usize,
    pub tail: End,
    pub head: End,
    /// Inherited from an edge above a branch node (as opposed to a leaf edge).
    pub normal: bool,
    /// Set exactly on legs (one terminal end).
    pub leg: Option<LegState>,
}

impl CoupleEdge {
    pub fn is_internal(&self) -> bool {
        matches!((self.tail, self.head), (End::Node(_), End::Node(_)))
    }

    pub fn is_leg(&self) -> bool {
        matches!((self.tail, self.head), (End::Node(_), End::Terminal) | (End::Terminal, End::Node(_)))
    }

    /// Both ends terminal: the glued leaf of two single-leaf trees.
    pub fn is_fused(&self) -> bool {
        self.tail == End::Terminal && self.head == End::Terminal
    }

    /// The node a leg is attached to.
    pub fn leg_node(&self) -> Option<usize> {
        match (self.tail, self.head) {
            (End::Node(a), End::Terminal) | (End::Terminal, End::Node(a)) => Some(a),
            _ => None,
        }
    }

    /// ι of this edge at node `n` (+1 into, −1 out of); self-loops contribute 0.
    pub fn iota(&self, n: usize) -> i64 {
        (self.head == End::Node(n)) as i64 - (self.tail == End::Node(n)) as i64
    }

    pub fn touches(&self, n: usize) -> bool {
        self.head == End::Node(n) || self.tail == End::Node(n)
    }

    pub fn other_end(&self, n: usize) -> End {
        if self.tail == End::Node(n) {
            self.head
        } else {
            self.tail
        }
    }
}

/// Trees and pairing a couple was glued from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub left: String,
    pub right: String,
    pub pairing: Pairing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Couple {
    pub nodes: Vec<CoupleNode>,
    pub edges: Vec<CoupleEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl Couple {
    /// Validating constructor for hand-built couples.
    pub fn new(nodes: Vec<CoupleNode>, edges: Vec<CoupleEdge>) -> Result<Couple> {
        let c = Couple { nodes, edges, provenance: None };
        c.validate()?;
        Ok(c)
    }

    /// Degree 3 at every node, legs tagged exactly, unique ids, ends refer to nodes.
    pub fn validate(&self) -> Result<()> {
        let ids: BTreeSet<usize> = self.nodes.iter().map(|n| n.id).collect();
        if ids.len() != self.nodes.len() {
            return Err(Error::MalformedCouple("duplicate node id".into()));
        }
        let eids: BTreeSet<usize> = self.edges.iter().map(|e| e.id).collect();
        if eids.len() != self.edges.len() {
            return Err(Error::MalformedCouple("duplicate edge id".into()));
        }
        let mut degree: BTreeMap<usize, usize> = ids.iter().map(|&i| (i, 0)).collect();
        for e in &self.edges {
            for end in [e.tail, e.head] {
                if let End::Node(n) = end {
                    *degree
                        .get_mut(&n)
                        .ok_or_else(|| Error::MalformedCouple(format!("edge {} refers to unknown node {n}", e.id)))? += 1;
                }
            }
            if e.is_leg() != e.leg.is_some() {
                return Err(Error::MalformedCouple(format!("edge {}: leg state must be set exactly on legs", e.id)));
            }
            if e.is_fused() && !self.nodes.is_empty() {
                return Err(Error::MalformedCouple(format!("edge {} has two terminal ends", e.id)));
            }
        }
        if let Some((n, d)) = degree.iter().find(|(_, d)| **d != 3) {
            return Err(Error::MalformedCouple(format!("node {n} has degree {d}")));
        }
        Ok(())
    }

    /// n(C).
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// n_e(C): edges joining two nodes.
    pub fn n_internal(&self) -> usize {
        self.edges.iter().filter(|e| e.is_internal()).count()
    }

    pub fn n_fixed(&self) -> usize {
        self.edges.iter().filter(|e| e.leg == Some(LegState::Fixed)).count()
    }

    pub fn n_free(&self) -> usize {
        self.edges.iter().filter(|e| e.leg == Some(LegState::Free)).count()
    }

    pub fn legs(&self) -> impl Iterator<Item = &CoupleEdge> {
        self.edges.iter().filter(|e| e.is_leg())
    }

    pub fn edge(&self, id: usize) -> Option<&CoupleEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    fn edge_mut(&mut self, id: usize) -> Option<&mut CoupleEdge> {
        self.edges.iter_mut().find(|e| e.id == id)
    }

    pub fn node_ids(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.id).collect()
    }

    /// Edges incident to node `n`, with ι at that node.
    pub fn incident(&self, n: usize) -> Vec<(&CoupleEdge, i64)> {
        self.edges.iter().filter(|e| e.touches(n)).map(|e| (e, e.iota(n))).collect()
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.iter().any(|e| e.is_internal() && e.tail == e.head)
    }

    /// χ(C) = n_e + n_fr − n.
    pub fn chi(&self) -> i64 {
        self.n_internal() as i64 + self.n_free() as i64 - self.n() as i64
    }

    /// 2n_e + n_fx + n_fr = 3n.
    pub fn degree_identity_holds(&self) -> bool {
        2 * self.n_internal() + self.n_fixed() + self.n_free() == 3 * self.n()
    }

    /// Connected components of the node set (via internal edges), each sorted,
    /// ordered by smallest node id.
    pub fn node_components(&self) -> Vec<Vec<usize>> {
        let ids = self.node_ids();
        let pos = |id: usize| ids.iter().position(|&x| x == id).expect("known node");
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in self.edges.iter().filter(|e| e.is_internal()) {
            if let (End::Node(a), End::Node(b)) = (e.tail, e.head) {
                let (ra, rb) = (find(&mut parent, pos(a)), find(&mut parent, pos(b)));
                parent[ra] = rb;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..ids.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(ids[i]);
        }
        let mut out: Vec<Vec<usize>> = groups
            .into_values()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        out.sort();
        out
    }

    /// An internal edge whose removal splits off a leg-free piece. Momentum
    /// conservation forces such an edge to carry k = 0 (the leaves below a
    /// branch are paired among themselves), so the couple vanishes.
    pub fn zero_momentum_edge(&self) -> Option<usize> {
        let before = self.node_components().len();
        self.edges.iter().filter(|e| e.is_internal() && e.tail != e.head).map(|e| e.id).find(|&id| {
            let reduced = Couple {
                nodes: self.nodes.clone(),
                edges: self.edges.iter().filter(|e| e.id != id).copied().collect(),
                provenance: None,
            };
            let comps = reduced.node_components();
            comps.len() > before
                && comps.iter().any(|g| !self.legs().any(|l| g.contains(&l.leg_node().expect("leg"))))
        })
    }

    pub fn is_connected(&self) -> bool {
        self.node_components().len() <= 1
    }

    /// Property P: connected, exactly one free leg, at least one fixed normal leg.
    pub fn has_property_p(&self) -> bool {
        self.is_connected()
            && self.n_free() == 1
            && self.legs().any(|e| e.normal && e.leg == Some(LegState::Fixed))
    }

    /// Property P, or: connected with exactly one free leg, that leg normal,
    /// and at least one fixed leg. A couple in the second case becomes P after
    /// exchanging the roles of its free leg and one fixed leg.
    pub fn has_weak_property_p(&self) -> bool {
        if self.has_property_p() {
            return true;
        }
        self.is_connected()
            && self.n_free() == 1
            && self.legs().any(|e| e.leg == Some(LegState::Free) && e.normal)
            && self.n_fixed() >= 1
    }

    /// Checks every node equation Σι k = 0 and returns the signed leg sum
    /// Σ ι_l k_l (ι of each leg at its node), which vanishes for valid assignments.
    pub fn leg_momentum_sum(&self, assignment: &BTreeMap<usize, IVec>) -> Result<IVec> {
        let value = |id: usize| {
            assignment.get(&id).copied().ok_or_else(|| Error::param("assignment", format!("no value for edge {id}")))
        };
        for node in &self.nodes {
            let mut s = IVec::ZERO;
            for (e, iota) in self.incident(node.id) {
                s = s + value(e.id)? * iota;
            }
            if !s.is_zero() {
                return Err(Error::MomentumViolation { node: node.id });
            }
        }
        let mut total = IVec::ZERO;
        for e in self.legs() {
            let n = e.leg_node().expect("leg");
            total = total + value(e.id)? * e.iota(n);
        }
        Ok(total)
    }

    /// Restriction to a set of nodes: those nodes and every edge touching them.
    fn restrict(&self, nodes: &[usize]) -> Couple {
        Couple {
            nodes: self.nodes.iter().filter(|n| nodes.contains(&n.id)).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| nodes.iter().any(|&n| e.touches(n)))
                .copied()
                .collect(),
            provenance: None,
        }
    }

    /// Exchange the roles of the single free leg and the lowest-id fixed leg.
    pub fn swap_free_leg(&mut self) -> Option<(usize, usize)> {
        let free = self.legs().find(|e| e.leg == Some(LegState::Free))?.id;
        let fixed = self.legs().filter(|e| e.leg == Some(LegState::Fixed)).map(|e| e.id).min()?;
        self.edge_mut(free)?.leg = Some(LegState::Fixed);
        self.edge_mut(fixed)?.leg = Some(LegState::Free);
        Some((free, fixed))
    }

    pub(crate) fn set_leg(&mut self, id: usize, state: LegState) -> Result<()> {
        let e = self.edge_mut(id).ok_or_else(|| Error::param("edge", format!("no edge {id}")))?;
        if !e.is_leg() {
            return Err(Error::param("edge", format!("edge {id} is not a leg")));
        }
        e.leg = Some(state);
        Ok(())
    }

    pub fn max_edge_id(&self) -> Option<usize> {
        self.edges.iter().map(|e| e.id).max()
    }
}

/// Glue T and the flipped T′ along the pairing `p`.
///
/// Node ids: T branches in preorder, then T′ branches. Edge ids: edges above
/// T branches (root leg first), then those above T′ branches, then one
/// merged edge per pair in pairing order.
pub fn build_couple(t: &BinaryTree, t2: &BinaryTree, p: &Pairing) -> Result<Couple> {
    if t.box_count() + t2.box_count() > 0 {
        return Err(Error::param("tree", "couples are built from box-free trees"));
    }
    let p = Pairing::new(t, t2, p.pairs.clone())?;
    let mut nodes = Vec::new();
    let mut node_of: BTreeMap<(Side, usize), usize> = BTreeMap::new();
    for (side, tree) in [(Side::Left, t), (Side::Right, t2)] {
        for b in tree.branches() {
            let id = nodes.len();
            nodes.push(CoupleNode { id, origin: Some((side, b)) });
            node_of.insert((side, b), id);
        }
    }
    let mut edges = Vec::new();
    for (side, tree) in [(Side::Left, t), (Side::Right, t2)] {
        for b in tree.branches() {
            let here = End::Node(node_of[&(side, b)]);
            let above = tree.parent(b).map(|q| End::Node(node_of[&(side, q)])).unwrap_or(End::Terminal);
            let (tail, head) = if side == Side::Left { (above, here) } else { (here, above) };
            let leg = (above == End::Terminal).then_some(LegState::Fixed);
            edges.push(CoupleEdge { id: edges.len(), tail, head, normal: true, leg });
        }
    }
    let attach = |r: LeafRef| -> End {
        let tree = if r.side == Side::Left { t } else { t2 };
        let leaf = tree.leaf_node(r.label).expect("validated");
        debug_assert_eq!(tree.decoration(leaf), Decoration::Leaf);
        tree.parent(leaf).map(|q| End::Node(node_of[&(r.side, q)])).unwrap_or(End::Terminal)
    };
    for &(a, b) in &p.pairs {
        let (tail, head) = (attach(a), attach(b));
        let is_leg = matches!((tail, head), (End::Node(_), End::Terminal) | (End::Terminal, End::Node(_)));
        edges.push(CoupleEdge { id: edges.len(), tail, head, normal: false, leg: is_leg.then_some(LegState::Fixed) });
    }
    let c = Couple {
        nodes,
        edges,
        provenance: Some(Provenance { left: t.to_string(), right: t2.to_string(), pairing: p }),
    };
    c.validate()?;
    debug_assert!(c.degree_identity_holds());
    Ok(c)
}

/// Which end of a cut edge keeps the free half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeSide {
    Tail,
    Head,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSpec {
    pub edges: Vec<usize>,
    pub free_at: Vec<FreeSide>,
}

/// Cut record: original edge id → (tail-half id, head-half id).
pub type HalfIds = BTreeMap<usize, (usize, usize)>;

/// Cut the listed internal edges. Each edge e = (a → b) becomes a leg leaving
/// `a` and a leg entering `b` (both carrying k_e); the half named by
/// `free_at` is free, the other fixed. Half ids are fresh (above every
/// existing id). Components are returned in order of their smallest node id.
pub fn cut(c: &Couple, spec: &CutSpec) -> Result<Vec<Couple>> {
    let mut next = c.max_edge_id().map_or(0, |m| m + 1);
    cut_with_ids(c, spec, &mut next).map(|(parts, _)| parts)
}

pub(crate) fn cut_with_ids(c: &Couple, spec: &CutSpec, next_id: &mut usize) -> Result<(Vec<Couple>, HalfIds)> {
    if spec.edges.is_empty() {
        return Err(Error::CutDoesNotDisconnect);
    }
    if spec.edges.len() != spec.free_at.len() {
        return Err(Error::param("cut", "one free side per cut edge"));
    }
    let uniq: BTreeSet<usize> = spec.edges.iter().copied().collect();
    if uniq.len() != spec.edges.len() {
        return Err(Error::param("cut", "edge listed twice"));
    }
    let before = c.node_components().len();
    let mut work = c.clone();
    let mut halves = HalfIds::new();
    for (&id, &side) in spec.edges.iter().zip(&spec.free_at) {
        let pos = work.edges.iter().position(|e| e.id == id).ok_or_else(|| Error::param("cut", format!("no edge {id}")))?;
        let e = work.edges[pos];
        if !e.is_internal() {
            return Err(Error::param("cut", format!("edge {id} is not internal")));
        }
        let (tail_state, head_state) = match side {
            FreeSide::Tail => (LegState::Free, LegState::Fixed),
            FreeSide::Head => (LegState::Fixed, LegState::Free),
        };
        let t_id = *next_id;
        let h_id = *next_id + 1;
        *next_id += 2;
        work.edges[pos] = CoupleEdge { id: t_id, tail: e.tail, head: End::Terminal, normal: e.normal, leg: Some(tail_state) };
        work.edges.push(CoupleEdge { id: h_id, tail: End::Terminal, head: e.head, normal: e.normal, leg: Some(head_state) });
        halves.insert(id, (t_id, h_id));
    }
    let comps = work.node_components();
    if comps.len() <= before {
        return Err(Error::CutDoesNotDisconnect);
    }
    let parts: Vec<Couple> = comps.iter().map(|g| work.restrict(g)).collect();
    for part in &parts {
        part.validate()?;
    }
    Ok((parts, halves))
}

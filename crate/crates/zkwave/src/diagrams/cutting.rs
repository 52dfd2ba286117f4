//! The cutting algorithm: repeatedly split off one node carrying a fixed
//! normal leg until only one-node pieces remain, keeping every remaining
//! piece connected with exactly one free leg and a fixed normal leg.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::couple::{cut_with_ids, Couple, CutSpec, End, FreeSide, HalfIds, LegState};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepCase {
    /// Removing the node leaves one piece; the free leg is elsewhere.
    Case11,
    /// Removing the node leaves one piece; the free leg sits at the node.
    Case12,
    /// Removing the node leaves two pieces.
    Case2,
}

/// Shape of a one-node component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneNodeKind {
    /// One fixed normal leg, two free legs.
    CI,
    /// Two fixed legs (at least one normal), one free leg.
    CII,
    Other,
}

pub fn one_node_kind(c: &Couple) -> OneNodeKind {
    if c.n() != 1 || c.n_internal() != 0 {
        return OneNodeKind::Other;
    }
    let fixed_normal = c.legs().filter(|e| e.leg == Some(LegState::Fixed) && e.normal).count();
    match (c.n_fixed(), c.n_free()) {
        (1, 2) if fixed_normal == 1 => OneNodeKind::CI,
        (2, 1) if fixed_normal >= 1 => OneNodeKind::CII,
        _ => OneNodeKind::Other,
    }
}

/// Role exchange applied to an output piece: its free leg became fixed and
/// `made_free` became free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Swap {
    pub made_fixed: usize,
    pub made_free: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub index: usize,
    pub input: Couple,
    /// The fixed normal leg chosen (lowest edge id).
    pub leg: usize,
    pub node: usize,
    pub case: StepCase,
    pub cut: CutSpec,
    /// Original edge id → (tail-half id, head-half id).
    pub halves: HalfIds,
    /// The one-node piece holding the chosen leg.
    pub isolated: Couple,
    pub isolated_kind: OneNodeKind,
    /// Remaining pieces after any role exchange, with the exchange applied.
    pub rest: Vec<Couple>,
    pub swaps: Vec<Option<Swap>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    /// Input with one fixed leg turned free (the first algorithm input).
    pub start: Option<Couple>,
    pub freed_leg: Option<usize>,
    pub steps: Vec<TraceStep>,
    /// Pieces at the end of the recursion (one node each).
    pub terminals: Vec<Couple>,
    /// Broken guarantees, if any; empty on a correct run.
    pub violations: Vec<String>,
}

/// Run the algorithm on a couple glued from two trees (two fixed legs,
/// connected, no self-loops, no edge forced to zero momentum). The leg
/// leaving its node (the T′ root leg) is freed first, unless one leg is a
/// leaf edge; a 0-node couple yields an empty trace.
pub fn cutting_algorithm(c: &Couple) -> Result<DecompositionTrace> {
    c.validate()?;
    let mut trace =
        DecompositionTrace { start: None, freed_leg: None, steps: Vec::new(), terminals: Vec::new(), violations: Vec::new() };
    if c.n() == 0 {
        return Ok(trace);
    }
    if !c.is_connected() {
        return Err(Error::MalformedCouple("couple is disconnected".into()));
    }
    if c.has_self_loop() {
        return Err(Error::MalformedCouple("couple has a self-loop (sibling leaves paired)".into()));
    }
    if let Some(e) = c.zero_momentum_edge() {
        return Err(Error::MalformedCouple(format!("edge {e} is forced to carry zero momentum")));
    }
    if c.n_fixed() != 2 || c.n_free() != 0 {
        return Err(Error::MalformedCouple("expected exactly two fixed legs and no free leg".into()));
    }
    let legs: Vec<_> = c.legs().copied().collect();
    // A non-normal leg (a single-leaf side) is freed so a fixed normal leg remains.
    let freed = legs
        .iter()
        .find(|e| !e.normal)
        .or_else(|| legs.iter().find(|e| matches!(e.head, End::Terminal)))
        .or_else(|| legs.iter().max_by_key(|e| e.id))
        .expect("two legs")
        .id;
    let mut start = c.clone();
    start.set_leg(freed, LegState::Free)?;
    start.provenance = None;
    trace.start = Some(start.clone());
    trace.freed_leg = Some(freed);

    let budget = c.n();
    let mut next_id = c.max_edge_id().map_or(0, |m| m + 1);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur.n() <= 1 {
            if one_node_kind(&cur) == OneNodeKind::Other {
                trace.violations.push(format!("terminal piece {:?} is neither C_I nor C_II", cur.node_ids()));
            }
            trace.terminals.push(cur);
            continue;
        }
        if !cur.has_property_p() {
            trace.violations.push(format!("step input {:?} lacks property P", cur.node_ids()));
        }
        let Some(leg) = cur
            .legs()
            .filter(|e| e.leg == Some(LegState::Fixed) && e.normal)
            .min_by_key(|e| e.id)
            .copied()
        else {
            trace.violations.push(format!("no fixed normal leg in {:?}", cur.node_ids()));
            trace.terminals.push(cur);
            continue;
        };
        let node = leg.leg_node().expect("leg");
        let to_others: Vec<_> = cur.incident(node).into_iter().filter(|(e, _)| e.is_internal()).map(|(e, _)| *e).collect();
        let pieces = components_without(&cur, node);
        let free_here = cur.incident(node).iter().any(|(e, _)| e.leg == Some(LegState::Free));
        let side_at_node = |e: &super::couple::CoupleEdge, at_node_free: bool| {
            let node_is_tail = e.tail == End::Node(node);
            match (node_is_tail, at_node_free) {
                (true, true) | (false, false) => FreeSide::Tail,
                _ => FreeSide::Head,
            }
        };
        let (case, free_at): (StepCase, Vec<FreeSide>) = if pieces.len() <= 1 {
            if free_here {
                // The edge leaving the node is fixed on the node side, free beyond.
                (StepCase::Case12, to_others.iter().map(|e| side_at_node(e, false)).collect())
            } else {
                (StepCase::Case11, to_others.iter().map(|e| side_at_node(e, true)).collect())
            }
        } else {
            let sides = to_others
                .iter()
                .map(|e| {
                    let End::Node(other) = e.other_end(node) else { unreachable!("internal edge") };
                    let piece = pieces.iter().find(|p| p.contains(&other)).expect("covered");
                    let piece_has_free = cur
                        .legs()
                        .any(|l| l.leg == Some(LegState::Free) && piece.contains(&l.leg_node().expect("leg")));
                    // Piece half fixed iff the piece already has a free leg.
                    side_at_node(e, piece_has_free)
                })
                .collect();
            (StepCase::Case2, sides)
        };
        let spec = CutSpec { edges: to_others.iter().map(|e| e.id).collect(), free_at };
        let (parts, halves) = cut_with_ids(&cur, &spec, &mut next_id)?;
        let (mut isolated, mut rest) = (None, Vec::new());
        for p in parts {
            if p.node_ids() == [node] {
                isolated = Some(p);
            } else {
                rest.push(p);
            }
        }
        let isolated = isolated.ok_or_else(|| Error::Numerical("cut did not isolate the chosen node".into()))?;
        let isolated_kind = one_node_kind(&isolated);
        if isolated_kind == OneNodeKind::Other {
            trace.violations.push(format!("isolated node {node} is neither C_I nor C_II"));
        }
        let mut swaps = Vec::new();
        for piece in &mut rest {
            if !piece.has_weak_property_p() {
                trace.violations.push(format!("piece {:?} lacks weak property P", piece.node_ids()));
            }
            let swap = if piece.has_property_p() {
                None
            } else {
                piece.swap_free_leg().map(|(made_fixed, made_free)| Swap { made_fixed, made_free })
            };
            if !piece.has_property_p() {
                trace.violations.push(format!("piece {:?} lacks property P after exchange", piece.node_ids()));
            }
            swaps.push(swap);
        }
        let chi_out: i64 = isolated.chi() + rest.iter().map(Couple::chi).sum::<i64>();
        if chi_out != cur.chi() {
            trace.violations.push(format!("χ not additive at step {}", trace.steps.len()));
        }
        if !isolated.degree_identity_holds() || !rest.iter().all(Couple::degree_identity_holds) {
            trace.violations.push(format!("degree identity broken at step {}", trace.steps.len()));
        }
        for p in &rest {
            queue.push_back(p.clone());
        }
        trace.terminals.push(isolated.clone());
        trace.steps.push(TraceStep {
            index: trace.steps.len() + 1,
            input: cur,
            leg: leg.id,
            node,
            case,
            cut: spec,
            halves,
            isolated,
            isolated_kind,
            rest,
            swaps,
        });
    }
    if trace.steps.len() > budget {
        trace.violations.push(format!("{} steps exceed n = {budget}", trace.steps.len()));
    }
    Ok(trace)
}

/// Node sets of the pieces left when `node` and its edges are removed.
fn components_without(c: &Couple, node: usize) -> Vec<Vec<usize>> {
    let reduced = Couple {
        nodes: c.nodes.iter().filter(|n| n.id != node).copied().collect(),
        edges: c.edges.iter().filter(|e| !e.touches(node)).copied().collect(),
        provenance: None,
    };
    reduced.node_components()
}

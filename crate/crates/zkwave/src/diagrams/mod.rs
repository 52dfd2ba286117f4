//! Trees, Wick pairings, couples, cuts and the cutting algorithm.

pub mod couple;
pub mod cutting;
pub mod pairing;
pub mod tree;

pub use couple::{build_couple, cut, Couple, CoupleEdge, CoupleNode, CutSpec, End, FreeSide, LegState, Provenance};
pub use cutting::{cutting_algorithm, one_node_kind, DecompositionTrace, OneNodeKind, StepCase, Swap, TraceStep};
pub use pairing::{enumerate_pairings, LeafRef, Pairing, Side};
pub use tree::{enumerate_trees, trees_with_branches, BinaryTree, Decoration, Orientation};

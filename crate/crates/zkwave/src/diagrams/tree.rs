//! Ordered binary trees decorated with branch / leaf / box nodes.
//!
//! Nodes are stored in preorder (root first, left subtree before right), so
//! node ids are canonical for a given shape. Every node except the root owns
//! the edge above it; the root owns the leg. Edge ids therefore coincide with
//! node ids. Leaves are labelled 1, 2, … from left to right.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoration {
    Branch,
    Leaf,
    /// Placeholder for the argument of a linearized operator.
    Box,
}

/// Orientation of an edge relative to the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Parent → child (the root leg points into the root).
    Down,
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeNode {
    pub decoration: Decoration,
    pub parent: Option<usize>,
    pub children: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryTree {
    nodes: Vec<TreeNode>,
    /// Node id of leaf with label `i + 1`.
    leaves: Vec<usize>,
    /// Orientation of the edge above each node (the leg for the root).
    directions: Vec<Orientation>,
}

/// Shape-only recursive description used to assemble trees.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    Leaf,
    Box,
    Join(Box<Shape>, Box<Shape>),
}

impl BinaryTree {
    pub fn leaf() -> BinaryTree {
        BinaryTree::from_shape(&Shape::Leaf)
    }

    pub fn boxed() -> BinaryTree {
        BinaryTree::from_shape(&Shape::Box)
    }

    /// The tree whose root has `left` and `right` as subtrees.
    pub fn join(left: &BinaryTree, right: &BinaryTree) -> BinaryTree {
        BinaryTree::from_shape(&Shape::Join(Box::new(left.shape(0)), Box::new(right.shape(0))))
    }

    fn from_shape(shape: &Shape) -> BinaryTree {
        fn rec(s: &Shape, parent: Option<usize>, nodes: &mut Vec<TreeNode>, leaves: &mut Vec<usize>) -> usize {
            let id = nodes.len();
            match s {
                Shape::Leaf | Shape::Box => {
                    let decoration = if *s == Shape::Leaf { Decoration::Leaf } else { Decoration::Box };
                    nodes.push(TreeNode { decoration, parent, children: None });
                    leaves.push(id);
                }
                Shape::Join(l, r) => {
                    nodes.push(TreeNode { decoration: Decoration::Branch, parent, children: None });
                    let a = rec(l, Some(id), nodes, leaves);
                    let b = rec(r, Some(id), nodes, leaves);
                    nodes[id].children = Some([a, b]);
                }
            }
            id
        }
        let mut nodes = Vec::new();
        let mut leaves = Vec::new();
        rec(shape, None, &mut nodes, &mut leaves);
        let directions = vec![Orientation::Down; nodes.len()];
        BinaryTree { nodes, leaves, directions }
    }

    fn shape(&self, n: usize) -> Shape {
        match (self.nodes[n].decoration, self.nodes[n].children) {
            (Decoration::Leaf, _) => Shape::Leaf,
            (Decoration::Box, _) => Shape::Box,
            (Decoration::Branch, Some([a, b])) => Shape::Join(Box::new(self.shape(a)), Box::new(self.shape(b))),
            (Decoration::Branch, None) => unreachable!("branch nodes have two children"),
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub const ROOT: usize = 0;

    /// l(T): the number of branch nodes.
    pub fn l(&self) -> usize {
        self.nodes.iter().filter(|n| n.decoration == Decoration::Branch).count()
    }

    /// Leaf and box nodes in label order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Node id of the leaf labelled `label` (1-based).
    pub fn leaf_node(&self, label: usize) -> Option<usize> {
        label.checked_sub(1).and_then(|i| self.leaves.get(i)).copied()
    }

    pub fn directions(&self) -> &[Orientation] {
        &self.directions
    }

    /// Branch nodes in preorder.
    pub fn branches(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&n| self.nodes[n].decoration == Decoration::Branch).collect()
    }

    pub fn children(&self, n: usize) -> Option<[usize; 2]> {
        self.nodes[n].children
    }

    pub fn parent(&self, n: usize) -> Option<usize> {
        self.nodes[n].parent
    }

    pub fn decoration(&self, n: usize) -> Decoration {
        self.nodes[n].decoration
    }

    pub fn box_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.decoration == Decoration::Box).count()
    }

    /// The subtree rooted at node `n`, renumbered canonically.
    pub fn subtree(&self, n: usize) -> BinaryTree {
        BinaryTree::from_shape(&self.shape(n))
    }

    /// Both root subtrees, if the root is a branch.
    pub fn split(&self) -> Option<(BinaryTree, BinaryTree)> {
        self.children(Self::ROOT).map(|[a, b]| (self.subtree(a), self.subtree(b)))
    }

    /// Same tree with every edge orientation reversed.
    pub fn flipped(&self) -> BinaryTree {
        let mut t = self.clone();
        for d in &mut t.directions {
            *d = match d {
                Orientation::Down => Orientation::Up,
                Orientation::Up => Orientation::Down,
            };
        }
        t
    }

    /// Replace the leaf with the given label by a box.
    pub fn with_box_at(&self, label: usize) -> Result<BinaryTree> {
        let n = self.leaf_node(label).ok_or_else(|| Error::param("label", format!("no leaf {label}")))?;
        let mut t = self.clone();
        t.nodes[n].decoration = Decoration::Box;
        Ok(t)
    }

    /// Bracket notation: `*` leaf, `#` box, `[L,R]` branch.
    pub fn parse(s: &str) -> Result<BinaryTree> {
        fn rec(b: &[u8], i: &mut usize) -> Result<Shape> {
            match b.get(*i) {
                Some(b'*') => {
                    *i += 1;
                    Ok(Shape::Leaf)
                }
                Some(b'#') => {
                    *i += 1;
                    Ok(Shape::Box)
                }
                Some(b'[') => {
                    *i += 1;
                    let l = rec(b, i)?;
                    if b.get(*i) != Some(&b',') {
                        return Err(Error::param("tree", format!("expected ',' at {}", *i)));
                    }
                    *i += 1;
                    let r = rec(b, i)?;
                    if b.get(*i) != Some(&b']') {
                        return Err(Error::param("tree", format!("expected ']' at {}", *i)));
                    }
                    *i += 1;
                    Ok(Shape::Join(Box::new(l), Box::new(r)))
                }
                _ => Err(Error::param("tree", format!("unexpected input at {}", *i))),
            }
        }
        let compact: Vec<u8> = s.bytes().filter(|c| !c.is_ascii_whitespace()).collect();
        let mut i = 0;
        let shape = rec(&compact, &mut i)?;
        if i != compact.len() {
            return Err(Error::param("tree", "trailing input"));
        }
        Ok(BinaryTree::from_shape(&shape))
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rec(t: &BinaryTree, n: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.nodes[n].children {
                None if t.nodes[n].decoration == Decoration::Box => write!(f, "#"),
                None => write!(f, "*"),
                Some([a, b]) => {
                    write!(f, "[")?;
                    rec(t, a, f)?;
                    write!(f, ",")?;
                    rec(t, b, f)?;
                    write!(f, "]")
                }
            }
        }
        rec(self, 0, f)
    }
}

/// All box-free trees with exactly `l` branches, ordered by the size of the
/// left subtree and then recursively.
pub fn trees_with_branches(l: usize) -> Vec<BinaryTree> {
    fn shapes(l: usize, memo: &mut Vec<Option<Vec<Shape>>>) -> Vec<Shape> {
        if let Some(s) = &memo[l] {
            return s.clone();
        }
        let out = if l == 0 {
            vec![Shape::Leaf]
        } else {
            let mut out = Vec::new();
            for i in 0..l {
                let left = shapes(i, memo);
                let right = shapes(l - 1 - i, memo);
                for a in &left {
                    for b in &right {
                        out.push(Shape::Join(Box::new(a.clone()), Box::new(b.clone())));
                    }
                }
            }
            out
        };
        memo[l] = Some(out.clone());
        out
    }
    let mut memo = vec![None; l + 1];
    shapes(l, &mut memo).iter().map(BinaryTree::from_shape).collect()
}

/// All box-free trees with l(T) ≤ `max_branches`, in increasing l.
pub fn enumerate_trees(max_branches: usize) -> Vec<BinaryTree> {
    (0..=max_branches).flat_map(trees_with_branches).collect()
}

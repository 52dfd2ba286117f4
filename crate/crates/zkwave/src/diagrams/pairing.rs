//! Perfect matchings of the combined leaf set of two trees.

use serde::{Deserialize, Serialize};

use super::tree::BinaryTree;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// The first tree T.
    Left,
    /// The second tree T′ (the conjugated factor).
    Right,
}

/// A leaf of T or T′, by its 1-based label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeafRef {
    pub side: Side,
    pub label: usize,
}

impl LeafRef {
    pub fn left(label: usize) -> LeafRef {
        LeafRef { side: Side::Left, label }
    }

    pub fn right(label: usize) -> LeafRef {
        LeafRef { side: Side::Right, label }
    }
}

/// Pairs with the smaller leaf first, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pairing {
    pub pairs: Vec<(LeafRef, LeafRef)>,
}

impl Pairing {
    /// Normalizes the order and checks that every leaf of (T, T′) occurs exactly once.
    pub fn new(t: &BinaryTree, t2: &BinaryTree, pairs: Vec<(LeafRef, LeafRef)>) -> Result<Pairing> {
        let m1 = t.leaf_count();
        let m2 = t2.leaf_count();
        let mut seen = vec![false; m1 + m2];
        let mut norm = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            for r in [a, b] {
                let slot = match r.side {
                    Side::Left if (1..=m1).contains(&r.label) => r.label - 1,
                    Side::Right if (1..=m2).contains(&r.label) => m1 + r.label - 1,
                    _ => return Err(Error::InvalidPairing(format!("no leaf {:?} {}", r.side, r.label))),
                };
                if seen[slot] {
                    return Err(Error::InvalidPairing(format!("leaf {:?} {} used twice", r.side, r.label)));
                }
                seen[slot] = true;
            }
            norm.push(if a <= b { (a, b) } else { (b, a) });
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            let r = if i < m1 { LeafRef::left(i + 1) } else { LeafRef::right(i - m1 + 1) };
            return Err(Error::InvalidPairing(format!("leaf {:?} {} unpaired", r.side, r.label)));
        }
        norm.sort();
        Ok(Pairing { pairs: norm })
    }

    /// The partner of `r`.
    pub fn partner(&self, r: LeafRef) -> Option<LeafRef> {
        self.pairs.iter().find_map(|&(a, b)| {
            if a == r {
                Some(b)
            } else if b == r {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Number of pairs joining T to T′.
    pub fn cross_count(&self) -> usize {
        self.pairs.iter().filter(|(a, b)| a.side != b.side).count()
    }
}

/// All (2m−1)!! perfect matchings of the leaves of (T, T′). The smallest
/// unmatched leaf (T leaves first, then T′) is paired with each larger leaf
/// in turn, recursively.
pub fn enumerate_pairings(t: &BinaryTree, t2: &BinaryTree) -> Result<Vec<Pairing>> {
    let m1 = t.leaf_count();
    let total = m1 + t2.leaf_count();
    if total % 2 != 0 {
        return Err(Error::InvalidPairing(format!("odd combined leaf count {total}")));
    }
    let refs: Vec<LeafRef> =
        (0..total).map(|i| if i < m1 { LeafRef::left(i + 1) } else { LeafRef::right(i - m1 + 1) }).collect();
    let mut out = Vec::new();
    let mut used = vec![false; total];
    let mut cur = Vec::with_capacity(total / 2);
    fn rec(refs: &[LeafRef], used: &mut [bool], cur: &mut Vec<(LeafRef, LeafRef)>, out: &mut Vec<Pairing>) {
        let Some(i) = used.iter().position(|u| !u) else {
            out.push(Pairing { pairs: cur.clone() });
            return;
        };
        used[i] = true;
        for j in i + 1..refs.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            cur.push((refs[i], refs[j]));
            rec(refs, used, cur, out);
            cur.pop();
            used[j] = false;
        }
        used[i] = false;
    }
    rec(&refs, &mut used, &mut cur, &mut out);
    Ok(out)
}

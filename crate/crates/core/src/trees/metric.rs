use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::length::{ExtendedLength, LengthScalar};
use super::shape::Shape;
use super::{EdgeId, Tree, TreeError};
use crate::Rational;

/// A tree together with a length in `[0, ∞]` on every internal edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MetricTree<T = Rational> {
    tree: Tree,
    lengths: BTreeMap<EdgeId, ExtendedLength<T>>,
}

/// One row of the JSON length table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthEntry {
    pub edge: String,
    pub len: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricTreeJson {
    pub tree: String,
    pub lengths: Vec<LengthEntry>,
}

/// Pieces of a cut, outermost first, with the length each removed edge
/// carried. `cut_lengths[i]` joins `pieces[i]` (at its last leaf) to
/// `pieces[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult<T = Rational> {
    pub pieces: Vec<MetricTree<T>>,
    pub cut_lengths: Vec<ExtendedLength<T>>,
}

impl<T: LengthScalar> MetricTree<T> {
    pub fn new(tree: Tree, lengths: BTreeMap<EdgeId, ExtendedLength<T>>) -> Result<Self, TreeError> {
        let edges = tree.internal_edges();
        for e in &edges {
            if !lengths.contains_key(e) {
                return Err(TreeError::MissingLength(e.to_string()));
            }
        }
        if let Some(extra) = lengths.keys().find(|k| !tree.is_internal_edge(k)) {
            return Err(TreeError::UnknownEdge(extra.to_string()));
        }
        Ok(MetricTree { tree, lengths })
    }

    /// Every internal edge gets the same length.
    pub fn uniform(tree: Tree, len: ExtendedLength<T>) -> Self {
        let lengths = tree.internal_edges().into_iter().map(|e| (e, len.clone())).collect();
        MetricTree { tree, lengths }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn lengths(&self) -> &BTreeMap<EdgeId, ExtendedLength<T>> {
        &self.lengths
    }

    pub fn length(&self, e: &EdgeId) -> Option<&ExtendedLength<T>> {
        self.lengths.get(e)
    }

    pub fn leaves(&self) -> usize {
        self.tree.leaves()
    }

    fn to_shape(&self) -> Shape<ExtendedLength<T>> {
        Shape::from_tree(&self.tree, &mut |p| self.lengths[&EdgeId(p.to_vec())].clone())
    }

    fn from_shape(shape: &Shape<ExtendedLength<T>>) -> Self {
        MetricTree { tree: shape.to_tree(), lengths: shape.labels().into_iter().collect() }
    }

    pub fn is_canonical(&self) -> bool {
        self.lengths.values().all(|l| !l.is_zero())
    }

    /// Contract every zero-length internal edge.
    pub fn canonicalize(&self) -> Self {
        Self::from_shape(&self.to_shape().collapse_where(&|l| l.is_zero()))
    }

    /// Elementary collapse at one internal edge, regardless of its length.
    pub fn collapse_edge(&self, e: &EdgeId) -> Result<Self, TreeError> {
        if !self.tree.is_internal_edge(e) {
            return Err(TreeError::UnknownEdge(e.to_string()));
        }
        let tagged: Shape<(bool, ExtendedLength<T>)> =
            Shape::from_tree(&self.tree, &mut |p| (p == e.0.as_slice(), self.lengths[&EdgeId(p.to_vec())].clone()));
        let collapsed = tagged.collapse_where(&|(hit, _)| *hit);
        let labels = collapsed.labels().into_iter().map(|(id, (_, l))| (id, l)).collect();
        Ok(MetricTree { tree: collapsed.to_tree(), lengths: labels })
    }

    /// Grafting `∂_k^L`: the new internal edge carries `len`.
    pub fn graft_metric(&self, k: usize, sigma: &MetricTree<T>, len: ExtendedLength<T>) -> Result<Self, TreeError> {
        let out = self.to_shape().graft(k, sigma.to_shape(), len)?;
        Ok(Self::from_shape(&out))
    }

    /// Degeneracy `s_k`; two internal edges fused by the deletion take the
    /// larger of their lengths.
    pub fn degeneracy_metric(&self, k: usize) -> Result<Self, TreeError> {
        let out = self.to_shape().remove_leaf(k, &|a, b| a.clone().max(b.clone()))?;
        Ok(Self::from_shape(&out))
    }

    /// Internal edges on the path from the last leaf to the root, outermost
    /// first.
    pub fn spine(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut cur = &self.tree;
        while let Tree::Node(ch) = cur {
            let last = ch.len() - 1;
            if let Tree::Node(_) = &ch[last] {
                path.push(last);
                out.push(EdgeId(path.clone()));
            }
            cur = &ch[last];
        }
        out
    }

    /// Spine edges of length at least `threshold`.
    pub fn spine_at_least(&self, threshold: &ExtendedLength<T>) -> Vec<EdgeId> {
        self.spine().into_iter().filter(|e| &self.lengths[e] >= threshold).collect()
    }

    /// Cut at every spine edge of length ≥ `threshold`. Each cut point
    /// becomes the last leaf of the lower piece and the root of the upper
    /// piece.
    pub fn cut(&self, threshold: &ExtendedLength<T>) -> CutResult<T> {
        let cuts = self.spine_at_least(threshold);
        let mut pieces = Vec::with_capacity(cuts.len() + 1);
        let mut cut_lengths = Vec::with_capacity(cuts.len());
        let mut rest = self.to_shape();
        // paths below are relative to the current remainder's outermost node
        let mut consumed = 0;
        for e in &cuts {
            let rel = &e.0[consumed..];
            let (lower, upper) = split_at_path(rest, rel);
            pieces.push(Self::from_shape(&lower));
            cut_lengths.push(self.lengths[e].clone());
            rest = upper;
            consumed = e.0.len();
        }
        pieces.push(Self::from_shape(&rest));
        CutResult { pieces, cut_lengths }
    }

    pub fn to_json(&self) -> MetricTreeJson {
        MetricTreeJson {
            tree: self.tree.serialize(),
            lengths: self
                .lengths
                .iter()
                .map(|(e, l)| LengthEntry { edge: e.to_string(), len: l.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &MetricTreeJson) -> Result<Self, TreeError> {
        let tree = Tree::parse(&j.tree)?;
        Self::from_table(tree, &j.lengths)
    }

    pub fn from_table(tree: Tree, table: &[LengthEntry]) -> Result<Self, TreeError> {
        let mut lengths = BTreeMap::new();
        for entry in table {
            let e: EdgeId = entry.edge.parse()?;
            let l: ExtendedLength<T> = entry.len.parse()?;
            lengths.insert(e, l);
        }
        Self::new(tree, lengths)
    }
}

impl<T: LengthScalar> CutResult<T> {
    /// Graft the pieces back together at their last leaves.
    pub fn reassemble(&self) -> MetricTree<T> {
        let mut acc = self.pieces.last().expect("at least one piece").clone();
        for i in (0..self.pieces.len() - 1).rev() {
            let lower = &self.pieces[i];
            acc = lower
                .graft_metric(lower.leaves(), &acc, self.cut_lengths[i].clone())
                .expect("last leaf is always in range");
        }
        acc
    }
}

/// Detach the subtree at `path` (which runs along last children); the
/// lower part keeps a leaf in its place.
fn split_at_path<L: Clone>(shape: Shape<L>, path: &[usize]) -> (Shape<L>, Shape<L>) {
    match shape {
        Shape::Node(own, mut ch) => {
            let (&head, tail) = path.split_first().expect("nonempty path");
            let child = std::mem::replace(&mut ch[head], Shape::Leaf);
            if tail.is_empty() {
                let upper = match child {
                    Shape::Node(_, grand) => Shape::Node(None, grand),
                    Shape::Leaf => unreachable!("cut edges are internal"),
                };
                (Shape::Node(own, ch), upper)
            } else {
                let (lower_child, upper) = split_at_path(child, tail);
                ch[head] = lower_child;
                (Shape::Node(own, ch), upper)
            }
        }
        Shape::Leaf => unreachable!("cut path runs through internal nodes"),
    }
}

//! Trees whose non-root internal nodes carry a label for the edge below
//! them. Every structural operation is written once here; plain trees use
//! the unit label and metric trees use lengths.

use super::{EdgeId, Tree, TreeError};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Shape<L> {
    Leaf,
    /// `None` exactly at the outermost node.
    Node(Option<L>, Vec<Shape<L>>),
}

impl<L: Clone> Shape<L> {
    pub fn from_tree(t: &Tree, label: &mut impl FnMut(&[usize]) -> L) -> Self {
        let mut path = Vec::new();
        Self::build(t, &mut path, label)
    }

    fn build(t: &Tree, path: &mut Vec<usize>, label: &mut impl FnMut(&[usize]) -> L) -> Self {
        match t {
            Tree::Leaf => Shape::Leaf,
            Tree::Node(ch) => {
                let own = if path.is_empty() { None } else { Some(label(path)) };
                let mut kids = Vec::with_capacity(ch.len());
                for (i, c) in ch.iter().enumerate() {
                    path.push(i);
                    kids.push(Self::build(c, path, label));
                    path.pop();
                }
                Shape::Node(own, kids)
            }
        }
    }

    pub fn to_tree(&self) -> Tree {
        match self {
            Shape::Leaf => Tree::Leaf,
            Shape::Node(_, ch) => Tree::Node(ch.iter().map(Shape::to_tree).collect()),
        }
    }

    /// Edge labels keyed by edge identifier, in preorder.
    pub fn labels(&self) -> Vec<(EdgeId, L)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_labels(&mut path, &mut out);
        out
    }

    fn collect_labels(&self, path: &mut Vec<usize>, out: &mut Vec<(EdgeId, L)>) {
        if let Shape::Node(own, ch) = self {
            if let Some(l) = own {
                out.push((EdgeId(path.clone()), l.clone()));
            }
            for (i, c) in ch.iter().enumerate() {
                path.push(i);
                c.collect_labels(path, out);
                path.pop();
            }
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(_, ch) => ch.iter().map(Shape::leaves).sum(),
        }
    }

    /// Replace the `k`-th leaf by `sigma`; `sigma`'s outermost node gets
    /// `label` on its new edge.
    pub fn graft(self, k: usize, sigma: Shape<L>, label: L) -> Result<Shape<L>, TreeError> {
        let n = self.leaves();
        if k == 0 || k > n {
            return Err(TreeError::LeafOutOfRange { k, leaves: n });
        }
        let sigma = match sigma {
            Shape::Leaf => return Ok(self),
            Shape::Node(_, ch) => ch,
        };
        if let Shape::Leaf = self {
            // grafting onto the trivial tree: sigma becomes the whole tree
            return Ok(Shape::Node(None, sigma));
        }
        let mut remaining = k;
        let mut replacement = Some(Shape::Node(Some(label), sigma));
        Ok(self.replace_leaf(&mut remaining, &mut replacement))
    }

    fn replace_leaf(self, remaining: &mut usize, replacement: &mut Option<Shape<L>>) -> Shape<L> {
        match self {
            Shape::Leaf => {
                if *remaining == 1 && replacement.is_some() {
                    *remaining = 0;
                    replacement.take().expect("checked")
                } else {
                    *remaining = remaining.saturating_sub(1);
                    Shape::Leaf
                }
            }
            Shape::Node(own, ch) => {
                let kids = ch.into_iter().map(|c| c.replace_leaf(remaining, replacement)).collect();
                Shape::Node(own, kids)
            }
        }
    }

    /// Delete the `k`-th leaf. A node left with one child is merged with
    /// it; when both edges around the merged vertex are internal their
    /// labels combine with `merge`.
    pub fn remove_leaf(self, k: usize, merge: &dyn Fn(&L, &L) -> L) -> Result<Shape<L>, TreeError> {
        let n = self.leaves();
        if n < 3 {
            return Err(TreeError::TooFewLeaves(n));
        }
        if k == 0 || k > n {
            return Err(TreeError::LeafOutOfRange { k, leaves: n });
        }
        let mut remaining = k;
        Ok(self.drop_leaf(&mut remaining, merge))
    }

    fn drop_leaf(self, remaining: &mut usize, merge: &dyn Fn(&L, &L) -> L) -> Shape<L> {
        match self {
            Shape::Leaf => Shape::Leaf,
            Shape::Node(own, ch) => {
                let mut kids = Vec::with_capacity(ch.len());
                for c in ch {
                    if *remaining == 0 {
                        kids.push(c);
                        continue;
                    }
                    match c {
                        Shape::Leaf => {
                            *remaining -= 1;
                            if *remaining != 0 {
                                kids.push(Shape::Leaf);
                            }
                        }
                        node => {
                            let l = node.leaves();
                            if *remaining > l {
                                *remaining -= l;
                                kids.push(node);
                            } else {
                                kids.push(node.drop_leaf(remaining, merge));
                            }
                        }
                    }
                }
                if kids.len() == 1 {
                    match kids.pop().expect("one child") {
                        Shape::Leaf => Shape::Leaf,
                        Shape::Node(inner, grand) => {
                            let label = match (own, inner) {
                                (Some(a), Some(b)) => Some(merge(&a, &b)),
                                (None, _) => None,
                                (Some(a), None) => Some(a),
                            };
                            Shape::Node(label, grand)
                        }
                    }
                } else {
                    Shape::Node(own, kids)
                }
            }
        }
    }

    /// Contract every internal edge whose label satisfies `pred`.
    pub fn collapse_where(self, pred: &dyn Fn(&L) -> bool) -> Shape<L> {
        match self {
            Shape::Leaf => Shape::Leaf,
            Shape::Node(own, ch) => {
                let mut kids = Vec::with_capacity(ch.len());
                for c in ch {
                    match c.collapse_where(pred) {
                        Shape::Node(Some(l), grand) if pred(&l) => kids.extend(grand),
                        other => kids.push(other),
                    }
                }
                Shape::Node(own, kids)
            }
        }
    }
}

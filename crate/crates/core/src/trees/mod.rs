//! Planar rooted trees with no vertex of degree two, their metric
//! versions with internal edge lengths in `[0, ∞]`, and the operations the
//! associahedron is built from: grafting, elementary collapse, leaf
//! deletion and cutting along the path to the last leaf.
//!
//! A tree is an ordered nested structure: a leaf, or an internal node with
//! at least two ordered children. The root edge is implicit and hangs below
//! the outermost node. Internal edges are the edges above non-root internal
//! nodes and are addressed by the child-index path from the outermost node
//! (see [`EdgeId`]). Lexicographic order on paths is preorder.

mod enumerate;
mod length;
mod metric;
mod shape;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use enumerate::{enumerate_trees, MAX_ENUMERATION_LEAVES};
pub use length::{ExtendedLength, LengthScalar};
pub use metric::{CutResult, LengthEntry, MetricTree, MetricTreeJson};

use shape::Shape;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("node with a single child at byte {offset}")]
    ArityOne { offset: usize },
    #[error("leaf index {k} out of range 1..={leaves}")]
    LeafOutOfRange { k: usize, leaves: usize },
    #[error("degeneracy needs at least 3 leaves, tree has {0}")]
    TooFewLeaves(usize),
    #[error("leaf count {0} outside the supported range 1..=12")]
    EnumerationRange(usize),
    #[error("negative length {0}")]
    NegativeLength(String),
    #[error("unparseable length {0:?}")]
    BadLength(String),
    #[error("malformed edge identifier {0:?}")]
    BadEdgeId(String),
    #[error("edge {0} is not an internal edge of the tree")]
    UnknownEdge(String),
    #[error("internal edge {0} has no length")]
    MissingLength(String),
    #[error("leaf counts differ: {0} vs {1}")]
    LeafCountMismatch(usize, usize),
}

/// Address of an internal edge: child indices (0-based) from the outermost
/// node down to the node sitting on top of the edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub Vec<usize>);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for EdgeId {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, TreeError> {
        if s.is_empty() {
            return Err(TreeError::BadEdgeId(s.into()));
        }
        s.split('.')
            .map(|p| p.parse::<usize>().map_err(|_| TreeError::BadEdgeId(s.into())))
            .collect::<Result<Vec<_>, _>>()
            .map(EdgeId)
    }
}

/// A canonical planar rooted tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    /// The tree with one internal node and `n ≥ 2` leaves.
    pub fn corolla(n: usize) -> Tree {
        assert!(n >= 2, "a corolla has at least two leaves");
        Tree::Node(vec![Tree::Leaf; n])
    }

    pub fn parse(text: &str) -> Result<Tree, TreeError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let t = parse_at(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(TreeError::Syntax { offset: pos, message: "trailing input".into() });
        }
        Ok(t)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        self.write_into(&mut s);
        s
    }

    fn write_into(&self, s: &mut String) {
        match self {
            Tree::Leaf => s.push('*'),
            Tree::Node(ch) => {
                s.push('(');
                for c in ch {
                    c.write_into(s);
                }
                s.push(')');
            }
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    pub fn children(&self) -> &[Tree] {
        match self {
            Tree::Leaf => &[],
            Tree::Node(ch) => ch,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(ch) => ch.iter().map(Tree::leaves).sum(),
        }
    }

    pub fn internal_nodes(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node(ch) => 1 + ch.iter().map(Tree::internal_nodes).sum::<usize>(),
        }
    }

    /// Internal edges in preorder (equivalently, sorted by [`EdgeId`]).
    pub fn internal_edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_edges(self, &mut path, &mut out);
        out
    }

    pub fn internal_edge_count(&self) -> usize {
        self.internal_nodes().saturating_sub(1)
    }

    /// The subtree on top of an internal edge (or the whole tree for the
    /// empty path).
    pub fn subtree(&self, path: &[usize]) -> Option<&Tree> {
        let mut cur = self;
        for &i in path {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn is_internal_edge(&self, e: &EdgeId) -> bool {
        !e.0.is_empty() && matches!(self.subtree(&e.0), Some(Tree::Node(_)))
    }

    /// Binary means every internal node has exactly two children.
    pub fn is_binary(&self) -> bool {
        match self {
            Tree::Leaf => true,
            Tree::Node(ch) => ch.len() == 2 && ch.iter().all(Tree::is_binary),
        }
    }

    /// Grafting `∂_k(self, sigma)`: the root edge of `sigma` is identified
    /// with the `k`-th leaf edge (1-based). Grafting the one-leaf tree is
    /// the identity.
    pub fn graft(&self, k: usize, sigma: &Tree) -> Result<Tree, TreeError> {
        let rho: Shape<()> = Shape::from_tree(self, &mut |_| ());
        let s: Shape<()> = Shape::from_tree(sigma, &mut |_| ());
        Ok(rho.graft(k, s, ())?.to_tree())
    }

    /// Degeneracy `s_k`: delete the `k`-th leaf, merging any node left
    /// with a single child.
    pub fn degeneracy(&self, k: usize) -> Result<Tree, TreeError> {
        let shape: Shape<()> = Shape::from_tree(self, &mut |_| ());
        Ok(shape.remove_leaf(k, &|_, _| ())?.to_tree())
    }

    /// Contract one internal edge (no length check).
    pub fn collapse(&self, e: &EdgeId) -> Result<Tree, TreeError> {
        if !self.is_internal_edge(e) {
            return Err(TreeError::UnknownEdge(e.to_string()));
        }
        let shape: Shape<bool> = Shape::from_tree(self, &mut |p| p == e.0.as_slice());
        Ok(shape.collapse_where(&|hit| *hit).to_tree())
    }

    /// Contract `e` and report where every surviving internal edge moved.
    pub fn collapse_tracking(&self, e: &EdgeId) -> Result<(Tree, Vec<(EdgeId, EdgeId)>), TreeError> {
        if !self.is_internal_edge(e) {
            return Err(TreeError::UnknownEdge(e.to_string()));
        }
        let shape: Shape<EdgeId> = Shape::from_tree(self, &mut |p| EdgeId(p.to_vec()));
        let collapsed = shape.collapse_where(&|old| old == e);
        let moves = collapsed.labels().into_iter().map(|(new, old)| (old, new)).collect();
        Ok((collapsed.to_tree(), moves))
    }

    /// Path from the outermost node to the `k`-th leaf.
    pub fn leaf_path(&self, k: usize) -> Result<Vec<usize>, TreeError> {
        let n = self.leaves();
        if k == 0 || k > n {
            return Err(TreeError::LeafOutOfRange { k, leaves: n });
        }
        let mut path = Vec::new();
        let mut cur = self;
        let mut remaining = k;
        while let Tree::Node(ch) = cur {
            let mut next = None;
            for (i, c) in ch.iter().enumerate() {
                let l = c.leaves();
                if remaining <= l {
                    next = Some((i, c));
                    break;
                }
                remaining -= l;
            }
            let (i, c) = next.expect("leaf index within range");
            path.push(i);
            cur = c;
        }
        Ok(path)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for Tree {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Tree, TreeError> {
        Tree::parse(s)
    }
}

fn collect_edges(t: &Tree, path: &mut Vec<usize>, out: &mut Vec<EdgeId>) {
    if let Tree::Node(ch) = t {
        if !path.is_empty() {
            out.push(EdgeId(path.clone()));
        }
        for (i, c) in ch.iter().enumerate() {
            path.push(i);
            collect_edges(c, path, out);
            path.pop();
        }
    }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_at(b: &[u8], pos: &mut usize) -> Result<Tree, TreeError> {
    skip_ws(b, pos);
    match b.get(*pos) {
        Some(b'*') => {
            *pos += 1;
            Ok(Tree::Leaf)
        }
        Some(b'(') => {
            let open = *pos;
            *pos += 1;
            let mut children = Vec::new();
            loop {
                skip_ws(b, pos);
                match b.get(*pos) {
                    Some(b')') => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => children.push(parse_at(b, pos)?),
                    None => {
                        return Err(TreeError::Syntax { offset: *pos, message: "unclosed '('".into() });
                    }
                }
            }
            match children.len() {
                0 => Err(TreeError::Syntax { offset: open, message: "empty node".into() }),
                1 => Err(TreeError::ArityOne { offset: open }),
                _ => Ok(Tree::Node(children)),
            }
        }
        Some(c) => Err(TreeError::Syntax { offset: *pos, message: format!("unexpected byte {:?}", *c as char) }),
        None => Err(TreeError::Syntax { offset: *pos, message: "unexpected end of input".into() }),
    }
}

#[cfg(test)]
mod tests;

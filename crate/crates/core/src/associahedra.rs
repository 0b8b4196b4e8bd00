//! Cubical cell structure of the associahedron `K_n`.
//!
//! A point of `K_n` is a canonical metric tree with `n` leaves. Fixing the
//! tree `τ` and which internal edges sit at `∞` leaves the remaining edge
//! lengths free in `(0, ∞)`, so each pair `(τ, pinned ⊆ I(τ))` is an open
//! cube of dimension `|I(τ)| - |pinned|`. Sending a free length to `0`
//! collapses its edge; sending it to `∞` pins it.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{chain_homology, Coefficients, HomologyGroup, SparseMatrix};
use crate::trees::{enumerate_trees, EdgeId, MetricTree, Tree, TreeError};
use crate::Rational;

pub const MIN_LEAVES: usize = 2;
pub const MAX_LEAVES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssocError {
    #[error("leaf count {0} outside the supported range 2..=8")]
    OutOfRange(usize),
    #[error("face {0} is not an enumerated cell")]
    MissingFace(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// One open cell: a tree and the internal edges pinned at `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicalCell {
    tree: Tree,
    pinned: BTreeSet<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub tree: String,
    pub pinned: Vec<String>,
    pub dim: usize,
}

impl CubicalCell {
    pub fn new(tree: Tree, pinned: BTreeSet<EdgeId>) -> Result<Self, AssocError> {
        if let Some(bad) = pinned.iter().find(|e| !tree.is_internal_edge(e)) {
            return Err(TreeError::UnknownEdge(bad.to_string()).into());
        }
        Ok(CubicalCell { tree, pinned })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn pinned(&self) -> &BTreeSet<EdgeId> {
        &self.pinned
    }

    pub fn dim(&self) -> usize {
        self.tree.internal_edge_count() - self.pinned.len()
    }

    /// Free coordinates in edge-identifier order.
    pub fn free_edges(&self) -> Vec<EdgeId> {
        self.tree.internal_edges().into_iter().filter(|e| !self.pinned.contains(e)).collect()
    }

    pub fn record(&self) -> CellRecord {
        CellRecord {
            tree: self.tree.serialize(),
            pinned: self.pinned.iter().map(|e| e.to_string()).collect(),
            dim: self.dim(),
        }
    }

    /// Signed codimension-one faces `Σ (-1)^i (face_0 - face_∞)` over the
    /// free coordinates, with the sign corrected for any reordering of the
    /// surviving coordinates in the face.
    pub fn faces(&self) -> Vec<(CubicalCell, i64)> {
        let free = self.free_edges();
        let mut out = Vec::with_capacity(2 * free.len());
        for (pos, e) in free.iter().enumerate() {
            let base = if pos % 2 == 0 { 1 } else { -1 };

            let (collapsed, moves) = self.tree.collapse_tracking(e).expect("free edge is internal");
            let moved = |old: &EdgeId| moves.iter().find(|(o, _)| o == old).map(|(_, n)| n.clone());
            let pinned0: BTreeSet<EdgeId> =
                self.pinned.iter().map(|p| moved(p).expect("pinned edge survives")).collect();
            let zero_face = CubicalCell { tree: collapsed, pinned: pinned0 };
            let induced0: Vec<EdgeId> =
                free.iter().filter(|f| *f != e).map(|f| moved(f).expect("free edge survives")).collect();
            out.push((zero_face.clone(), base * order_sign(&induced0, &zero_face.free_edges())));

            let mut pinned_inf = self.pinned.clone();
            pinned_inf.insert(e.clone());
            let inf_face = CubicalCell { tree: self.tree.clone(), pinned: pinned_inf };
            let induced_inf: Vec<EdgeId> = free.iter().filter(|f| *f != e).cloned().collect();
            out.push((inf_face.clone(), -base * order_sign(&induced_inf, &inf_face.free_edges())));
        }
        out
    }
}

/// Sign of the permutation taking `induced` to `canonical` (same elements).
fn order_sign(induced: &[EdgeId], canonical: &[EdgeId]) -> i64 {
    debug_assert_eq!(induced.len(), canonical.len());
    let perm: Vec<usize> =
        induced.iter().map(|x| canonical.iter().position(|c| c == x).expect("same coordinates")).collect();
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn check_range(n: usize) -> Result<(), AssocError> {
    if !(MIN_LEAVES..=MAX_LEAVES).contains(&n) {
        return Err(AssocError::OutOfRange(n));
    }
    Ok(())
}

/// Two metric trees name the same point of `K_n` iff their canonical forms
/// coincide.
pub fn point_equal(a: &MetricTree<Rational>, b: &MetricTree<Rational>) -> Result<bool, AssocError> {
    if a.leaves() != b.leaves() {
        return Err(TreeError::LeafCountMismatch(a.leaves(), b.leaves()).into());
    }
    Ok(a.canonicalize() == b.canonicalize())
}

/// All cells of `K_n`, by dimension, then tree order, then pinned set.
pub fn cells(n: usize) -> Result<Vec<CubicalCell>, AssocError> {
    check_range(n)?;
    let trees = enumerate_trees(n, false)?;
    let mut out = Vec::new();
    for tree in &trees {
        let edges = tree.internal_edges();
        for mask in 0u32..(1 << edges.len()) {
            let pinned =
                edges.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| e.clone()).collect();
            out.push(CubicalCell { tree: tree.clone(), pinned });
        }
    }
    // stable: keeps tree order within a dimension
    let order: HashMap<&Tree, usize> = trees.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut keyed: Vec<(usize, usize, Vec<EdgeId>, CubicalCell)> =
        out.into_iter().map(|c| (c.dim(), order[c.tree()], c.pinned.iter().cloned().collect(), c)).collect();
    keyed.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
    Ok(keyed.into_iter().map(|(_, _, _, c)| c).collect())
}

/// Cell counts per dimension.
pub fn f_vector(n: usize) -> Result<Vec<usize>, AssocError> {
    check_range(n)?;
    let mut f = vec![0usize; n - 1];
    for tree in enumerate_trees(n, false)? {
        let edges = tree.internal_edge_count();
        // C(|I|, d) cells of dimension d
        let mut binom = 1usize;
        for (d, slot) in f.iter_mut().enumerate().take(edges + 1) {
            *slot += binom;
            binom = binom * (edges - d) / (d + 1);
        }
    }
    Ok(f)
}

pub fn euler(n: usize) -> Result<i64, AssocError> {
    Ok(f_vector(n)?.iter().enumerate().map(|(d, c)| if d % 2 == 0 { *c as i64 } else { -(*c as i64) }).sum())
}

/// Cellular chain complex of `K_n`: bases per dimension and the integer
/// boundary matrices `d_d : C_d -> C_{d-1}` (`boundaries[0]` is the
/// empty map out of `C_0`).
#[derive(Clone, Debug)]
pub struct ChainComplexDescription {
    pub bases: Vec<Vec<CubicalCell>>,
    pub boundaries: Vec<SparseMatrix<i64>>,
}

impl ChainComplexDescription {
    pub fn cell_counts(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// Checks `d_{d-1} ∘ d_d = 0` in every degree.
    pub fn boundary_squares_vanish(&self) -> bool {
        (2..self.boundaries.len()).all(|d| self.boundaries[d - 1].mul(&self.boundaries[d]).is_zero())
    }

    pub fn homology(&self, coeffs: Coefficients) -> Vec<HomologyGroup> {
        chain_homology(&self.cell_counts(), &self.boundaries, coeffs)
    }
}

pub fn boundary(n: usize) -> Result<ChainComplexDescription, AssocError> {
    let all = cells(n)?;
    let top = n - 2;
    let mut bases: Vec<Vec<CubicalCell>> = vec![Vec::new(); top + 1];
    for c in all {
        let d = c.dim();
        bases[d].push(c);
    }
    let index: Vec<HashMap<&CubicalCell, usize>> =
        bases.iter().map(|b| b.iter().enumerate().map(|(i, c)| (c, i)).collect()).collect();

    let mut boundaries = vec![SparseMatrix::zeros(0, bases[0].len())];
    for d in 1..=top {
        let columns: Vec<Result<Vec<(usize, i64)>, AssocError>> = bases[d]
            .par_iter()
            .map(|cell| {
                cell.faces()
                    .into_iter()
                    .map(|(face, sign)| {
                        index[d - 1]
                            .get(&face)
                            .map(|&row| (row, sign))
                            .ok_or_else(|| AssocError::MissingFace(format!("{:?}", face.record())))
                    })
                    .collect()
            })
            .collect();
        let mut m = SparseMatrix::zeros(bases[d - 1].len(), bases[d].len());
        for (col, entries) in columns.into_iter().enumerate() {
            for (row, sign) in entries? {
                let cur = m.get(row, col).copied().unwrap_or(0);
                m.set(row, col, cur + sign);
            }
        }
        boundaries.push(m);
    }
    Ok(ChainComplexDescription { bases, boundaries })
}

pub fn homology(n: usize, coeffs: Coefficients) -> Result<Vec<HomologyGroup>, AssocError> {
    Ok(boundary(n)?.homology(coeffs))
}

//! Truncated two-sided bar constructions `B_k(X, G, Y)` for a finite monoid
//! `G`, a finite right `G`-set `X` and a finite left `G`-set `Y`, as
//! normalized cellular chain complexes. With `X = Y = pt` this is the
//! `k`-th projective space `B_k G`.
//!
//! A nondegenerate `i`-simplex is `(x, g_1, ..., g_i, y)` with every
//! `g_j ≠ e`. The faces are
//!
//! ```text
//! d_0     = (x·g_1, g_2, ..., g_i, y)
//! d_j     = (x, ..., g_j·g_{j+1}, ..., y)      0 < j < i
//! d_i     = (x, g_1, ..., g_{i-1}, g_i·y)
//! ```
//!
//! and a face that lands on a tuple containing `e` is degenerate and drops.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{chain_homology, Coefficients, HomologyGroup, SparseMatrix};

pub const MAX_TRUNCATION: usize = 8;
pub const MAX_ORDER: usize = 24;
/// Bound on the total number of nondegenerate simplices in one complex.
pub const MAX_CELLS: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarError {
    #[error("multiplication table must be a nonempty square table of element indices")]
    MalformedTable,
    #[error("table is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(String, String, String),
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("cyclic group order must be at least 1")]
    BadOrder,
    #[error("action table is malformed or violates the action laws")]
    BadAction,
    #[error("truncation level {0} exceeds {MAX_TRUNCATION}")]
    TruncationTooLarge(usize),
    #[error("monoid order {0} exceeds {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("complex would have {0} cells, more than {MAX_CELLS}")]
    TooManyCells(u128),
    #[error("invalid table JSON: {0}")]
    Json(String),
}

/// A finite monoid given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    labels: Vec<String>,
    identity: usize,
    table: Vec<Vec<usize>>,
    is_group: bool,
}

/// On-disk form of a multiplication table: `table[a][b]` is the index of
/// `labels[a] * labels[b]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonoidJson {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl FiniteMonoid {
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, BarError> {
        let n = labels.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(BarError::MalformedTable);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(BarError::NotAssociative(labels[a].clone(), labels[b].clone(), labels[c].clone()));
                    }
                }
            }
        }
        let identity =
            (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)).ok_or(BarError::NoIdentity)?;
        let is_group = (0..n).all(|a| (0..n).any(|b| table[a][b] == identity && table[b][a] == identity));
        Ok(FiniteMonoid { labels, identity, table, is_group })
    }

    /// `Z/q` with elements `0..q` and identity `0`.
    pub fn cyclic(q: usize) -> Result<Self, BarError> {
        if q == 0 {
            return Err(BarError::BadOrder);
        }
        let labels = (0..q).map(|i| i.to_string()).collect();
        let table = (0..q).map(|a| (0..q).map(|b| (a + b) % q).collect()).collect();
        Self::new(labels, table)
    }

    pub fn from_json(text: &str) -> Result<Self, BarError> {
        let j: MonoidJson = serde_json::from_str(text).map_err(|e| BarError::Json(e.to_string()))?;
        Self::new(j.elements, j.table)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn is_group(&self) -> bool {
        self.is_group
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    fn non_identity(&self) -> Vec<usize> {
        (0..self.order()).filter(|&g| g != self.identity).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x · g`
    Right,
    /// `g · y`
    Left,
}

/// A finite `G`-set; `action[s][g]` is the image of point `s` under `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    side: Side,
    action: Vec<Vec<usize>>,
}

impl GSet {
    pub fn point(side: Side, g: &FiniteMonoid) -> Self {
        GSet { side, action: vec![vec![0; g.order()]] }
    }

    /// `G` acting on itself by multiplication from the given side.
    pub fn regular(side: Side, g: &FiniteMonoid) -> Self {
        let action = (0..g.order())
            .map(|s| {
                (0..g.order())
                    .map(|h| match side {
                        Side::Right => g.mul(s, h),
                        Side::Left => g.mul(h, s),
                    })
                    .collect()
            })
            .collect();
        GSet { side, action }
    }

    pub fn new(side: Side, g: &FiniteMonoid, action: Vec<Vec<usize>>) -> Result<Self, BarError> {
        let size = action.len();
        if size == 0 || action.iter().any(|r| r.len() != g.order() || r.iter().any(|&v| v >= size)) {
            return Err(BarError::BadAction);
        }
        let e = g.identity();
        for s in 0..size {
            if action[s][e] != s {
                return Err(BarError::BadAction);
            }
            for a in 0..g.order() {
                for b in 0..g.order() {
                    let ok = match side {
                        Side::Right => action[action[s][a]][b] == action[s][g.mul(a, b)],
                        Side::Left => action[action[s][b]][a] == action[s][g.mul(a, b)],
                    };
                    if !ok {
                        return Err(BarError::BadAction);
                    }
                }
            }
        }
        Ok(GSet { side, action })
    }

    pub fn size(&self) -> usize {
        self.action.len()
    }

    pub fn side(&self) -> Side {
        self.side
    }

    fn act(&self, s: usize, g: usize) -> usize {
        self.action[s][g]
    }
}

/// A nondegenerate simplex `(x, word, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarCell {
    pub x: usize,
    pub word: Vec<usize>,
    pub y: usize,
}

#[derive(Clone, Debug)]
pub struct BarComplex {
    k: usize,
    bases: Vec<Vec<BarCell>>,
    boundaries: Vec<SparseMatrix<i64>>,
}

impl BarComplex {
    pub fn truncation(&self) -> usize {
        self.k
    }

    pub fn bases(&self) -> &[Vec<BarCell>] {
        &self.bases
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// `boundaries()[i]` is `d_i : C_i -> C_{i-1}`; slot 0 is empty.
    pub fn boundaries(&self) -> &[SparseMatrix<i64>] {
        &self.boundaries
    }

    pub fn boundary_squares_vanish(&self) -> bool {
        (2..self.boundaries.len()).all(|i| self.boundaries[i - 1].mul(&self.boundaries[i]).is_zero())
    }
}

pub fn build_bar(g: &FiniteMonoid, x: &GSet, y: &GSet, k: usize) -> Result<BarComplex, BarError> {
    if k > MAX_TRUNCATION {
        return Err(BarError::TruncationTooLarge(k));
    }
    if g.order() > MAX_ORDER {
        return Err(BarError::OrderTooLarge(g.order()));
    }
    if x.side() != Side::Right || y.side() != Side::Left {
        return Err(BarError::BadAction);
    }
    let letters = g.non_identity();
    let q = letters.len() as u128;
    let ends = (x.size() * y.size()) as u128;
    let total: u128 = (0..=k as u32).map(|i| ends * q.pow(i)).sum();
    if total > MAX_CELLS as u128 {
        return Err(BarError::TooManyCells(total));
    }

    // position of each element among the non-identity letters
    let mut letter_pos = vec![usize::MAX; g.order()];
    for (i, &l) in letters.iter().enumerate() {
        letter_pos[l] = i;
    }
    let q = letters.len();
    let ny = y.size();
    let index = |c: &BarCell| -> usize {
        let w = c.word.iter().fold(0usize, |acc, &l| acc * q + letter_pos[l]);
        (c.x * q.pow(c.word.len() as u32) + w) * ny + c.y
    };

    let mut bases = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut cells = Vec::with_capacity(x.size() * q.pow(i as u32) * ny);
        for xs in 0..x.size() {
            let mut word = vec![0usize; i];
            loop {
                for ys in 0..ny {
                    cells.push(BarCell { x: xs, word: word.iter().map(|&d| letters[d]).collect(), y: ys });
                }
                if !advance(&mut word, q) {
                    break;
                }
            }
        }
        bases.push(cells);
    }

    let e = g.identity();
    let mut boundaries = vec![SparseMatrix::zeros(0, bases[0].len())];
    for i in 1..=k {
        let mut d = SparseMatrix::zeros(bases[i - 1].len(), bases[i].len());
        for (col, c) in bases[i].iter().enumerate() {
            for j in 0..=i {
                let face = if j == 0 {
                    BarCell { x: x.act(c.x, c.word[0]), word: c.word[1..].to_vec(), y: c.y }
                } else if j == i {
                    BarCell { x: c.x, word: c.word[..i - 1].to_vec(), y: y.act(c.y, c.word[i - 1]) }
                } else {
                    let mut w = c.word[..j - 1].to_vec();
                    w.push(g.mul(c.word[j - 1], c.word[j]));
                    w.extend_from_slice(&c.word[j + 1..]);
                    BarCell { x: c.x, word: w, y: c.y }
                };
                if face.word.contains(&e) {
                    continue;
                }
                let row = index(&face);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let cur = d.get(row, col).copied().unwrap_or(0);
                d.set(row, col, cur + sign);
            }
        }
        boundaries.push(d);
    }
    Ok(BarComplex { k, bases, boundaries })
}

/// Odometer step over `{0..q}^len`; false once every word has been seen.
fn advance(word: &mut [usize], q: usize) -> bool {
    for d in word.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// `B_k G = B_k(pt, G, pt)`.
pub fn projective_space(g: &FiniteMonoid, k: usize) -> Result<BarComplex, BarError> {
    build_bar(g, &GSet::point(Side::Right, g), &GSet::point(Side::Left, g), k)
}

/// Homology in degrees `0..=k`. Below `k` this is the homology of the
/// realization; degree `k` reports the top cycles of the skeleton stage.
pub fn bar_homology(bc: &BarComplex, coeffs: Coefficients) -> Vec<HomologyGroup> {
    chain_homology(&bc.cell_counts(), &bc.boundaries, coeffs)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;

    fn ranks(h: &[HomologyGroup]) -> Vec<usize> {
        h.iter().map(|g| g.rank).collect()
    }

    #[test]
    fn rp2_over_integers() {
        let g = FiniteMonoid::cyclic(2).unwrap();
        let bc = projective_space(&g, 2).unwrap();
        assert_eq!(bc.cell_counts(), vec![1, 1, 1]);
        assert_eq!(bc.boundaries()[2].get(0, 0), Some(&2));
        assert!(bc.boundaries()[1].is_zero());
        let h = bar_homology(&bc, Coefficients::Integers);
        assert_eq!(h[0], HomologyGroup { rank: 1, torsion: vec![] });
        assert_eq!(h[1], HomologyGroup { rank: 0, torsion: vec![BigInt::from(2)] });
        assert_eq!(h[2], HomologyGroup { rank: 0, torsion: vec![] });
    }

    #[test]
    fn projective_spaces_mod_two() {
        let g = FiniteMonoid::cyclic(2).unwrap();
        for k in 0..=6 {
            let h = bar_homology(&projective_space(&g, k).unwrap(), Coefficients::PrimeField(2));
            assert_eq!(ranks(&h), vec![1; k + 1], "k = {k}");
        }
    }

    #[test]
    fn one_skeleton_is_a_wedge_of_circles() {
        let g = FiniteMonoid::cyclic(3).unwrap();
        let bc = projective_space(&g, 1).unwrap();
        assert_eq!(bc.cell_counts(), vec![1, 2]);
        let h = bar_homology(&bc, Coefficients::Integers);
        assert_eq!(h[1], HomologyGroup { rank: 2, torsion: vec![] });
        let bc0 = projective_space(&FiniteMonoid::cyclic(2).unwrap(), 0).unwrap();
        assert_eq!(bar_homology(&bc0, Coefficients::Integers), vec![HomologyGroup { rank: 1, torsion: vec![] }]);
    }

    #[test]
    fn first_homology_of_cyclic_groups() {
        for q in 2..=6 {
            let g = FiniteMonoid::cyclic(q).unwrap();
            for k in 2..=4 {
                let h = bar_homology(&projective_space(&g, k).unwrap(), Coefficients::Integers);
                assert_eq!(h[0], HomologyGroup { rank: 1, torsion: vec![] });
                assert_eq!(h[1], HomologyGroup { rank: 0, torsion: vec![BigInt::from(q)] }, "q = {q}, k = {k}");
            }
        }
    }

    #[test]
    fn skeletal_stability() {
        for q in 2..=6 {
            let g = FiniteMonoid::cyclic(q).unwrap();
            let mut prev = bar_homology(&projective_space(&g, 1).unwrap(), Coefficients::Integers);
            for k in 2..=5 {
                let bc = projective_space(&g, k).unwrap();
                assert!(bc.boundary_squares_vanish());
                let h = bar_homology(&bc, Coefficients::Integers);
                assert_eq!(&h[..k - 1], &prev[..k - 1], "q = {q}, k = {k}");
                prev = h;
            }
        }
    }

    #[test]
    fn lens_space_pattern() {
        // H_i(BZ/q; Z) is Z/q in odd degrees and 0 in positive even ones
        let g = FiniteMonoid::cyclic(3).unwrap();
        let h = bar_homology(&projective_space(&g, 5).unwrap(), Coefficients::Integers);
        for (i, grp) in h.iter().enumerate().take(5).skip(1) {
            let expected = if i % 2 == 1 { vec![BigInt::from(3)] } else { vec![] };
            assert_eq!(grp, &HomologyGroup { rank: 0, torsion: expected });
        }
    }

    #[test]
    fn free_left_end_is_acyclic_below_top() {
        let g = FiniteMonoid::cyclic(3).unwrap();
        let x = GSet::regular(Side::Right, &g);
        let y = GSet::point(Side::Left, &g);
        let bc = build_bar(&g, &x, &y, 4).unwrap();
        assert!(bc.boundary_squares_vanish());
        let h = bar_homology(&bc, Coefficients::Integers);
        assert_eq!(h[0], HomologyGroup { rank: 1, torsion: vec![] });
        for grp in &h[1..4] {
            assert_eq!(grp, &HomologyGroup { rank: 0, torsion: vec![] });
        }
    }

    #[test]
    fn non_cyclic_and_non_group_tables() {
        // Klein four group
        let table = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]];
        let v4 = FiniteMonoid::new(vec!["e".into(), "a".into(), "b".into(), "c".into()], table).unwrap();
        assert!(v4.is_group());
        let h = bar_homology(&projective_space(&v4, 3).unwrap(), Coefficients::Integers);
        assert_eq!(h[1].torsion, vec![BigInt::from(2), BigInt::from(2)]);
        // H_2(V_4) = Z/2
        assert_eq!(h[2].torsion, vec![BigInt::from(2)]);

        let m = FiniteMonoid::from_json(r#"{"elements":["1","z"],"table":[[0,1],[1,1]]}"#).unwrap();
        assert!(!m.is_group());
        let bc = projective_space(&m, 3).unwrap();
        assert!(bc.boundary_squares_vanish());
        let h = bar_homology(&bc, Coefficients::Integers);
        assert!(h[1..3].iter().all(|g| g.rank == 0 && g.torsion.is_empty()));
    }

    #[test]
    fn table_validation() {
        let bad = FiniteMonoid::new(vec!["a".into(), "b".into()], vec![vec![1, 0], vec![0, 0]]);
        assert!(matches!(bad, Err(BarError::NotAssociative(..)) | Err(BarError::NoIdentity)));
        let no_id = FiniteMonoid::new(vec!["a".into(), "b".into()], vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(no_id, Err(BarError::NoIdentity));
        assert_eq!(FiniteMonoid::new(vec!["a".into()], vec![vec![3]]), Err(BarError::MalformedTable));
        assert_eq!(FiniteMonoid::cyclic(0), Err(BarError::BadOrder));
        assert!(FiniteMonoid::from_json("{").is_err());
        let g = FiniteMonoid::cyclic(2).unwrap();
        assert_eq!(GSet::new(Side::Right, &g, vec![vec![1, 0], vec![1, 0]]), Err(BarError::BadAction));
    }

    #[test]
    fn resource_guards() {
        let g = FiniteMonoid::cyclic(2).unwrap();
        assert_eq!(projective_space(&g, 9).unwrap_err(), BarError::TruncationTooLarge(9));
        let big = FiniteMonoid::cyclic(25).unwrap();
        assert_eq!(projective_space(&big, 1).unwrap_err(), BarError::OrderTooLarge(25));
        let g23 = FiniteMonoid::cyclic(23).unwrap();
        assert!(matches!(projective_space(&g23, 8), Err(BarError::TooManyCells(_))));
        assert!(projective_space(&g23, 3).is_ok());
    }
}

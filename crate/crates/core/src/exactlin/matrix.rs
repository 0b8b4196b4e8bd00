use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::fp::Fp;

/// Scalars that the elimination routines can pivot on.
///
/// Integers pivot only on `±1` during sparse elimination; every nonzero
/// element of `F_p` is a unit.
pub trait PivotScalar: Clone + PartialEq + Debug {
    fn is_zero_elem(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `self * unit^{-1}`; `unit` must satisfy `is_unit`.
    fn div_unit(&self, unit: &Self) -> Self;
    /// `self - factor * x`.
    fn sub_scaled(&self, factor: &Self, x: &Self) -> Self;
    /// Additive identity of the ring `self` lives in.
    fn zero_like(&self) -> Self;
}

impl<T> PivotScalar for T
where
    T: Integer + Signed + Clone + Debug,
{
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn div_unit(&self, unit: &Self) -> Self {
        // a unit of Z is its own inverse
        self.clone() * unit.clone()
    }
    fn sub_scaled(&self, factor: &Self, x: &Self) -> Self {
        self.clone() - factor.clone() * x.clone()
    }
    fn zero_like(&self) -> Self {
        T::zero()
    }
}

impl PivotScalar for Fp {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }
    fn div_unit(&self, unit: &Self) -> Self {
        *self * unit.inverse().expect("nonzero element of F_p is invertible")
    }
    fn sub_scaled(&self, factor: &Self, x: &Self) -> Self {
        *self - *factor * *x
    }
    fn zero_like(&self) -> Self {
        Fp::from_residue(0, self.modulus())
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let nrows = rows.len();
        Matrix { rows: nrows, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

/// Sparse matrix stored as one ordered map per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<usize, T>>,
}

impl<T: PivotScalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: vec![BTreeMap::new(); rows] }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// Insert or overwrite; zero values remove the entry.
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        if v.is_zero_elem() {
            self.entries[r].remove(&c);
        } else {
            self.entries[r].insert(c, v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&T> {
        self.entries[r].get(&c)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &T)> {
        self.entries[r].iter().map(|(c, v)| (*c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn map<U: PivotScalar>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        let mut out = SparseMatrix::zeros(self.rows, self.cols);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                out.set(r, *c, f(v));
            }
        }
        out
    }

    pub fn to_dense(&self, zero: T) -> Matrix<T> {
        let mut m = Matrix::filled(self.rows, self.cols, zero);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                m.set(r, *c, v.clone());
            }
        }
        m
    }
}

impl<T> SparseMatrix<T>
where
    T: PivotScalar + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix<T>) -> SparseMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = SparseMatrix::zeros(self.rows, rhs.cols);
        for (r, row) in self.entries.iter().enumerate() {
            let mut acc: BTreeMap<usize, T> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &rhs.entries[*k] {
                    let term = a.clone() * b.clone();
                    let next = match acc.remove(c) {
                        Some(prev) => prev + term,
                        None => term,
                    };
                    acc.insert(*c, next);
                }
            }
            for (c, v) in acc {
                out.set(r, c, v);
            }
        }
        out
    }
}

/// Result of eliminating every reachable unit pivot from a sparse matrix.
#[derive(Clone, Debug)]
pub struct UnitReduction<T> {
    /// Number of unit pivots removed; each contributes a `1` to the SNF.
    pub unit_pivots: usize,
    /// Rows and columns that never met a unit pivot.
    pub remainder: Vec<Vec<T>>,
    pub remainder_cols: usize,
}

/// Sparse Gaussian elimination restricted to unit pivots.
///
/// Row operations clear the pivot column; the pivot row is then dropped,
/// which corresponds to column operations touching nothing else. The
/// invariant factors of the input are `unit_pivots` ones followed by the
/// invariant factors of the remainder.
pub fn eliminate_unit_pivots<T: PivotScalar>(m: &SparseMatrix<T>) -> UnitReduction<T> {
    let mut rows: Vec<Option<BTreeMap<usize, T>>> = m.entries.iter().cloned().map(Some).collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (r, row) in m.entries.iter().enumerate() {
        for c in row.keys() {
            col_rows[*c].insert(r);
        }
    }

    let mut pivots = 0;
    loop {
        let mut progressed = false;
        for c in 0..m.cols {
            // shortest row holding a unit in this column
            let pivot = col_rows[c]
                .iter()
                .filter(|&&r| rows[r].as_ref().and_then(|row| row.get(&c)).is_some_and(T::is_unit))
                .min_by_key(|&&r| (rows[r].as_ref().map_or(usize::MAX, BTreeMap::len), r))
                .copied();
            let Some(pr) = pivot else { continue };
            let prow = rows[pr].take().expect("active pivot row");
            let pval = prow[&c].clone();
            for &pc in prow.keys() {
                col_rows[pc].remove(&pr);
            }
            let targets: Vec<usize> = col_rows[c].iter().copied().collect();
            for r in targets {
                let row = rows[r].as_mut().expect("active row");
                let factor = row[&c].div_unit(&pval);
                for (pc, pv) in &prow {
                    let cur = row.get(pc).cloned();
                    let next = match cur {
                        Some(ref v) => v.sub_scaled(&factor, pv),
                        None => pv.zero_like().sub_scaled(&factor, pv),
                    };
                    if next.is_zero_elem() {
                        row.remove(pc);
                        col_rows[*pc].remove(&r);
                    } else {
                        if cur.is_none() {
                            col_rows[*pc].insert(r);
                        }
                        row.insert(*pc, next);
                    }
                }
            }
            pivots += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }

    let live_cols: Vec<usize> = (0..m.cols).filter(|&c| !col_rows[c].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut remainder = Vec::new();
    for row in rows.into_iter().flatten() {
        if row.is_empty() {
            continue;
        }
        let zero = row.values().next().expect("nonempty").zero_like();
        let mut dense = vec![zero; live_cols.len()];
        for (c, v) in row {
            dense[col_pos[&c]] = v;
        }
        remainder.push(dense);
    }
    UnitReduction { unit_pivots: pivots, remainder, remainder_cols: live_cols.len() }
}

/// Invariant factors `d_1 | d_2 | ...` (all positive, zeros omitted) of an
/// integer matrix, by elementary row and column reduction with a
/// least-magnitude pivot.
pub fn smith_normal_form<T>(m: &Matrix<T>) -> Vec<T>
where
    T: Integer + Signed + Clone + Debug,
{
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // least nonzero magnitude in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    let v = a.get(r, c);
                    if !v.is_zero() && best.is_none_or(|(br, bc)| v.abs() < a.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else {
                diag.sort();
                return fix_chain(diag);
            };
            a.swap_rows(t, br);
            a.swap_cols(t, bc);
            let piv = a.get(t, t).clone();

            let mut clean = true;
            for r in t + 1..rows {
                let v = a.get(r, t).clone();
                if v.is_zero() {
                    continue;
                }
                let q = v.div_floor(&piv);
                for c in t..cols {
                    let nv = a.get(r, c).clone() - q.clone() * a.get(t, c).clone();
                    a.set(r, c, nv);
                }
                if !a.get(r, t).is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                let v = a.get(t, c).clone();
                if v.is_zero() {
                    continue;
                }
                let q = v.div_floor(&piv);
                for r in t..rows {
                    let nv = a.get(r, c).clone() - q.clone() * a.get(r, t).clone();
                    a.set(r, c, nv);
                }
                if !a.get(t, c).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let mut offender = None;
            'scan: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !a.get(r, c).is_multiple_of(&piv) {
                        offender = Some(r);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(r) => {
                    for c in t..cols {
                        let nv = a.get(t, c).clone() + a.get(r, c).clone();
                        a.set(t, c, nv);
                    }
                }
                None => {
                    diag.push(piv.abs());
                    break;
                }
            }
        }
    }
    fix_chain(diag)
}

fn fix_chain<T: Integer + Clone>(diag: Vec<T>) -> Vec<T> {
    // the least-magnitude strategy already yields a chain; sorting keeps
    // the output canonical when a block exhausts early
    let mut d = diag;
    d.sort();
    d
}

/// Rank of a dense matrix over `F_p`.
pub fn rank_fp(m: &Matrix<Fp>) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for c in 0..a.cols {
        let Some(pr) = (rank..a.rows).find(|&r| !a.get(r, c).is_zero()) else { continue };
        a.swap_rows(rank, pr);
        let inv = a.get(rank, c).inverse().expect("nonzero pivot");
        for r in 0..a.rows {
            if r == rank || a.get(r, c).is_zero() {
                continue;
            }
            let f = *a.get(r, c) * inv;
            for cc in c..a.cols {
                let nv = *a.get(r, cc) - f * *a.get(rank, cc);
                a.set(r, cc, nv);
            }
        }
        rank += 1;
    }
    rank
}

/// Invariant factors of a sparse integer matrix: unit pivots first, dense
/// reduction of whatever is left.
pub fn sparse_invariant_factors(m: &SparseMatrix<i64>) -> Vec<BigInt> {
    let big = m.map(|v| BigInt::from(*v));
    let red = eliminate_unit_pivots(&big);
    let mut out = vec![BigInt::from(1); red.unit_pivots];
    if !red.remainder.is_empty() {
        let dense = Matrix::from_rows(red.remainder, red.remainder_cols);
        out.extend(smith_normal_form(&dense));
    }
    out.sort();
    out
}

/// Rank over `F_p` of a sparse integer matrix.
pub fn sparse_rank_fp(m: &SparseMatrix<i64>, p: u64) -> usize {
    let reduced = m.map(|v| Fp::new(*v, p));
    let red = eliminate_unit_pivots(&reduced);
    debug_assert!(red.remainder.is_empty(), "every nonzero of F_p is a pivot");
    red.unit_pivots
}

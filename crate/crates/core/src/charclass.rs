//! Mod-p polynomial algebra in Chern classes `c_2..c_n` or Pontryagin
//! classes `p_1..p_n`, the Steenrod operation `P^1` on them via the mod-p
//! Wu formulas, and an independent splitting-principle oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{factorial, is_prime, reduce_mod_p, LinalgError};

/// Largest rank the splitting oracle accepts.
pub const MAX_ORACLE_RANK: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("rank {0} is out of range for this family")]
    BadRank(usize),
    #[error("class index {i} outside {lo}..={hi}")]
    IndexOutOfRange { i: usize, lo: usize, hi: usize },
    #[error("operands differ in prime or generator family")]
    Mismatch,
    #[error("no P^1 value supplied for generator {0}")]
    MissingTableEntry(String),
    #[error("rank {0} exceeds the oracle limit {MAX_ORACLE_RANK}")]
    OracleTooLarge(usize),
    #[error("oracle could not rewrite in the elementary basis: {0}")]
    OracleBasis(String),
    #[error("witness monomial is degenerate (k + l'' = 1)")]
    DegenerateWitness,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorFamily {
    /// `c_2, ..., c_n`, `deg c_j = 2j`.
    Chern(usize),
    /// `p_1, ..., p_n`, `deg p_j = 4j`.
    Pontryagin(usize),
}

impl GeneratorFamily {
    pub fn chern(n: usize) -> Result<Self, CharError> {
        if n < 2 {
            return Err(CharError::BadRank(n));
        }
        Ok(GeneratorFamily::Chern(n))
    }

    pub fn pontryagin(n: usize) -> Result<Self, CharError> {
        if n < 1 {
            return Err(CharError::BadRank(n));
        }
        Ok(GeneratorFamily::Pontryagin(n))
    }

    pub fn rank(self) -> usize {
        match self {
            GeneratorFamily::Chern(n) | GeneratorFamily::Pontryagin(n) => n,
        }
    }

    /// Smallest generator index.
    pub fn first(self) -> usize {
        match self {
            GeneratorFamily::Chern(_) => 2,
            GeneratorFamily::Pontryagin(_) => 1,
        }
    }

    /// Number of generators, i.e. length of an exponent vector.
    pub fn len(self) -> usize {
        self.rank() + 1 - self.first()
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn symbol(self) -> char {
        match self {
            GeneratorFamily::Chern(_) => 'c',
            GeneratorFamily::Pontryagin(_) => 'p',
        }
    }

    /// Cohomological degree of generator `j`.
    pub fn degree(self, j: usize) -> usize {
        match self {
            GeneratorFamily::Chern(_) => 2 * j,
            GeneratorFamily::Pontryagin(_) => 4 * j,
        }
    }

    fn check_index(self, i: usize) -> Result<(), CharError> {
        if i < self.first() || i > self.rank() {
            return Err(CharError::IndexOutOfRange { i, lo: self.first(), hi: self.rank() });
        }
        Ok(())
    }
}

pub type Exponents = Vec<u32>;

/// Sparse polynomial over `F_p`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    p: u64,
    family: GeneratorFamily,
    terms: BTreeMap<Exponents, u64>,
    truncation: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Exponents,
    pub coeff: u64,
}

impl SparsePoly {
    pub fn zero(p: u64, family: GeneratorFamily) -> Self {
        SparsePoly { p, family, terms: BTreeMap::new(), truncation: None }
    }

    pub fn constant(p: u64, family: GeneratorFamily, c: i64) -> Self {
        let mut out = Self::zero(p, family);
        out.add_term(vec![0; family.len()], c.rem_euclid(p as i64) as u64);
        out
    }

    /// The generator with index `j` (`c_j` or `p_j`).
    pub fn generator(p: u64, family: GeneratorFamily, j: usize) -> Result<Self, CharError> {
        family.check_index(j)?;
        let mut e = vec![0; family.len()];
        e[j - family.first()] = 1;
        let mut out = Self::zero(p, family);
        out.add_term(e, 1);
        Ok(out)
    }

    pub fn monomial(p: u64, family: GeneratorFamily, exps: Exponents, coeff: u64) -> Result<Self, CharError> {
        if exps.len() != family.len() {
            return Err(CharError::Mismatch);
        }
        let mut out = Self::zero(p, family);
        out.add_term(exps, coeff % p);
        Ok(out)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn family(&self) -> GeneratorFamily {
        self.family
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exponents, c: u64) {
        if c == 0 {
            return;
        }
        if let Some(k) = self.truncation {
            if e.iter().sum::<u32>() > k {
                return;
            }
        }
        let p = self.p;
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (*o.get() + c) % p;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn compatible(&self, other: &SparsePoly) -> Result<(), CharError> {
        if self.p != other.p || self.family != other.family {
            return Err(CharError::Mismatch);
        }
        Ok(())
    }

    fn joint_truncation(&self, other: &SparsePoly) -> Option<u32> {
        match (self.truncation, other.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, CharError> {
        self.compatible(other)?;
        let mut out = self.clone();
        out.truncation = self.joint_truncation(other);
        if out.truncation != self.truncation {
            out = out.truncate_opt(out.truncation);
        }
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> SparsePoly {
        let mut out = SparsePoly { terms: BTreeMap::new(), ..self.clone() };
        for (e, v) in &self.terms {
            out.add_term(e.clone(), (v * (c % self.p)) % self.p);
        }
        out
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(self.p - 1)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly, CharError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly, CharError> {
        self.compatible(other)?;
        let mut out = Self::zero(self.p, self.family);
        out.truncation = self.joint_truncation(other);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, (ca * cb) % self.p);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<SparsePoly, CharError> {
        let mut acc = Self::constant(self.p, self.family, 1);
        acc.truncation = self.truncation;
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Quotient by the `(k+1)`-st power of the augmentation ideal: drops
    /// monomials of total exponent above `k`.
    pub fn truncate(&self, k: u32) -> SparsePoly {
        self.truncate_opt(Some(k))
    }

    fn truncate_opt(&self, k: Option<u32>) -> SparsePoly {
        let mut out = Self::zero(self.p, self.family);
        out.truncation = k;
        for (e, c) in &self.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    /// Coefficient of a monomial; zero when absent.
    pub fn coefficient(&self, exps: &[u32]) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    /// Weighted degree `Σ j·e_j` of a monomial.
    pub fn weight(&self, exps: &[u32]) -> usize {
        exps.iter().enumerate().map(|(pos, &e)| (pos + self.family.first()) * e as usize).sum()
    }

    /// Cohomological degree if homogeneous; `None` for zero or mixed.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|e| {
            e.iter().enumerate().map(|(pos, &x)| self.family.degree(pos + self.family.first()) * x as usize).sum()
        });
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Terms in display order (lexicographically largest exponent first).
    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms.iter().rev().map(|(e, c)| TermJson { exponents: e.clone(), coeff: *c }).collect()
    }

    pub fn from_json(p: u64, family: GeneratorFamily, terms: &[TermJson]) -> Result<Self, CharError> {
        let mut out = Self::zero(p, family);
        for t in terms {
            if t.exponents.len() != family.len() {
                return Err(CharError::Mismatch);
            }
            out.add_term(t.exponents.clone(), t.coeff % p);
        }
        Ok(out)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sym = self.family.symbol();
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(pos, &x)| {
                    let j = pos + self.family.first();
                    if x == 1 {
                        format!("{sym}{j}")
                    } else {
                        format!("{sym}{j}^{x}")
                    }
                })
                .collect();
            match (factors.is_empty(), *c == 1) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => write!(f, "{}", factors.join("*"))?,
                (false, false) => write!(f, "{c}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<(), CharError> {
    if p == 2 || !is_prime(p) {
        return Err(CharError::BadPrime(p));
    }
    Ok(())
}

/// Exponent vectors `(i_lo, ..., i_hi)` with `Σ j·i_j = target`.
fn weighted_partitions(lo: usize, hi: usize, target: usize) -> Vec<Vec<u32>> {
    fn rec(j: usize, lo: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if j < lo {
            if left == 0 {
                let mut v = cur.clone();
                v.reverse();
                out.push(v);
            }
            return;
        }
        for e in 0..=left / j {
            cur.push(e as u32);
            rec(j - 1, lo, left - e * j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if hi >= lo {
        rec(hi, lo, target, &mut Vec::new(), &mut out);
    }
    out
}

/// One Wu-formula coefficient as an exact rational:
/// `sign · (S-1)!/Π i_j! · (top - Σ_{lo ≤ j < i} (top - step·j)·i_j / (S-1))`,
/// where the subtracted term is zero whenever its numerator sum is empty.
fn wu_term(exps: &[u32], lo: usize, i: usize, top: i64, step: i64, sign_extra: i64) -> Result<BigRational, CharError> {
    let s: i64 = exps.iter().map(|&e| e as i64).sum();
    let mut denom = BigInt::one();
    for &e in exps {
        denom *= factorial(e as i64)?;
    }
    let lead = BigRational::new(factorial(s - 1)?, denom);
    let mut num = BigInt::zero();
    for (pos, &e) in exps.iter().enumerate() {
        let j = pos + lo;
        if j < i && e > 0 {
            num += BigInt::from((top - step * j as i64) * e as i64);
        }
    }
    let bracket = if num.is_zero() {
        BigRational::from_integer(BigInt::from(top))
    } else {
        BigRational::from_integer(BigInt::from(top)) - BigRational::new(num, BigInt::from(s - 1))
    };
    let sign = if (s - 1 + sign_extra).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(lead * bracket * BigRational::from_integer(BigInt::from(sign)))
}

type CacheKey = (GeneratorFamily, u64, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<SparsePoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<SparsePoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(
    key: CacheKey,
    compute: impl FnOnce() -> Result<SparsePoly, CharError>,
) -> Result<Arc<SparsePoly>, CharError> {
    if let Some(hit) = cache().lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let value = Arc::new(compute()?);
    cache().lock().expect("cache lock").insert(key, value.clone());
    Ok(value)
}

/// `P^1 c_i` in `F_p[c_2, ..., c_n]`.
pub fn wu_p1_chern(p: u64, n: usize, i: usize) -> Result<SparsePoly, CharError> {
    check_prime(p)?;
    let family = GeneratorFamily::chern(n)?;
    family.check_index(i)?;
    let out = cached((family, p, i), || {
        let top = (i + p as usize - 1) as i64;
        let mut out = SparsePoly::zero(p, family);
        for exps in weighted_partitions(2, n, top as usize) {
            let q = wu_term(&exps, 2, i, top, 1, 0)?;
            out.add_term(exps, reduce_mod_p(&q, p)?);
        }
        Ok(out)
    })?;
    Ok((*out).clone())
}

/// `P^1 p_i` in `F_p[p_1, ..., p_n]`.
///
/// The sign is `(-1)^{S-1+(p-1)/2}` with `S = i_1 + ... + i_n`, which
/// is what the splitting principle gives for `P^1(t^2) = 2 t^{p+1}`.
pub fn wu_p1_pontryagin(p: u64, n: usize, i: usize) -> Result<SparsePoly, CharError> {
    check_prime(p)?;
    let family = GeneratorFamily::pontryagin(n)?;
    family.check_index(i)?;
    let out = cached((family, p, i), || {
        let half = (p as usize - 1) / 2;
        let top = (2 * i + p as usize - 1) as i64;
        let mut out = SparsePoly::zero(p, family);
        for exps in weighted_partitions(1, n, i + half) {
            let q = wu_term(&exps, 1, i, top, 2, half as i64)?;
            out.add_term(exps, reduce_mod_p(&q, p)?);
        }
        Ok(out)
    })?;
    Ok((*out).clone())
}

/// `P^1` of a generator of either family.
pub fn wu_p1(p: u64, family: GeneratorFamily, i: usize) -> Result<SparsePoly, CharError> {
    match family {
        GeneratorFamily::Chern(n) => wu_p1_chern(p, n, i),
        GeneratorFamily::Pontryagin(n) => wu_p1_pontryagin(p, n, i),
    }
}

/// Extend `P^1` from generators to all of `f` by additivity and the
/// product rule.
pub fn p1_extend(f: &SparsePoly, table: &BTreeMap<usize, SparsePoly>) -> Result<SparsePoly, CharError> {
    let family = f.family();
    let mut out = SparsePoly::zero(f.prime(), family);
    out.truncation = f.truncation();
    for (e, c) in f.terms() {
        for (pos, &x) in e.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let j = pos + family.first();
            let image =
                table.get(&j).ok_or_else(|| CharError::MissingTableEntry(format!("{}{}", family.symbol(), j)))?;
            let mut rest = e.clone();
            rest[pos] -= 1;
            let coeff = (c * (x as u64 % f.prime())) % f.prime();
            let mut lhs = SparsePoly::monomial(f.prime(), family, rest, coeff)?;
            lhs.truncation = f.truncation();
            out = out.add(&lhs.mul(image)?)?;
        }
    }
    Ok(out)
}

/// The table `j ↦ P^1 g_j` for every generator of `family`.
pub fn wu_table(p: u64, family: GeneratorFamily) -> Result<BTreeMap<usize, SparsePoly>, CharError> {
    (family.first()..=family.rank()).map(|j| Ok((j, wu_p1(p, family, j)?))).collect()
}

/// Closed form for the coefficient of `g_j g_m^{l'} g_n^k` in `P^1 g_i`
/// (`g_0 = 1`), where `i` is fixed by the degree.
///
/// Chern: `(-1)^{k+l''-1} (k+l''-2)!/((k-1)! l'!) ((k-1)n + l'm + j)`
/// with `l'' = l' + [j ≠ 0]`. Pontryagin: the same times
/// `2·(-1)^{(p-1)/2}`.
pub fn closed_form_witness_coeff(
    family: GeneratorFamily,
    k: usize,
    lprime: usize,
    j: usize,
    m: usize,
    p: u64,
) -> Result<u64, CharError> {
    check_prime(p)?;
    let n = family.rank();
    if k < 1 || m >= n || m < family.first() || (j != 0 && (j < family.first() || j >= m)) {
        return Err(CharError::BadParameters(format!("k={k} l'={lprime} j={j} m={m} n={n}")));
    }
    let l2 = lprime + usize::from(j != 0);
    if k + l2 < 2 {
        return Err(CharError::DegenerateWitness);
    }
    let sign = if (k + l2 - 1).is_multiple_of(2) { 1 } else { -1 };
    let num = factorial((k + l2 - 2) as i64)? * BigInt::from(((k - 1) * n + lprime * m + j) as i64) * sign;
    let den = factorial((k - 1) as i64)? * factorial(lprime as i64)?;
    let mut q = BigRational::new(num, den);
    if let GeneratorFamily::Pontryagin(_) = family {
        let half = (p as i64 - 1) / 2;
        q *= BigRational::from_integer(BigInt::from(if half % 2 == 0 { 2 } else { -2 }));
    }
    Ok(reduce_mod_p(&q, p)?)
}

/// Exponent vector of `g_j g_m^{l'} g_n^k`.
pub fn witness_monomial(family: GeneratorFamily, k: usize, lprime: usize, j: usize, m: usize) -> Exponents {
    let mut e = vec![0u32; family.len()];
    let at = |idx: usize| idx - family.first();
    e[at(family.rank())] += k as u32;
    e[at(m)] += lprime as u32;
    if j != 0 {
        e[at(j)] += 1;
    }
    e
}

/// Generic extraction: read the witness coefficient off the full Wu
/// expansion of `P^1 g_i`.
pub fn extracted_witness_coeff(
    family: GeneratorFamily,
    i: usize,
    k: usize,
    lprime: usize,
    j: usize,
    m: usize,
    p: u64,
) -> Result<u64, CharError> {
    let poly = wu_p1(p, family, i)?;
    Ok(poly.coefficient(&witness_monomial(family, k, lprime, j, m)))
}

// ---------------------------------------------------------------------------
// splitting-principle oracle

type VarPoly = HashMap<Vec<u32>, u64>;

fn var_mul(a: &VarPoly, b: &VarPoly, p: u64) -> VarPoly {
    let mut out: VarPoly = HashMap::with_capacity(a.len() * 2);
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let v = out.entry(e).or_insert(0);
            *v = (*v + ca * cb) % p;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// `e_j(x_1, ..., x_n)` as a polynomial in the `x`'s.
fn elementary(n: usize, j: usize) -> VarPoly {
    let mut out = VarPoly::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == j {
            out.insert((0..n).map(|t| (mask >> t) & 1).collect(), 1);
        }
    }
    out
}

/// Rewrite a symmetric polynomial in `x_1..x_n` in the elementary basis
/// by repeatedly cancelling the lexicographically leading monomial.
fn to_elementary_basis(mut f: VarPoly, n: usize, p: u64) -> Result<BTreeMap<Vec<u32>, u64>, CharError> {
    let es: Vec<VarPoly> = (0..=n).map(|j| elementary(n, j)).collect();
    let mut powers: HashMap<Vec<u32>, VarPoly> = HashMap::new();
    powers.insert(vec![0; n], std::iter::once((vec![0; n], 1)).collect());
    let mut out = BTreeMap::new();
    while let Some(lead) = f.keys().max().cloned() {
        if lead.windows(2).any(|w| w[0] < w[1]) {
            return Err(CharError::OracleBasis(format!("leading exponent {lead:?} is not a partition")));
        }
        let c = f[&lead];
        // e_1^{a1-a2} e_2^{a2-a3} ... e_n^{an}
        let key: Vec<u32> = (0..n).map(|t| lead[t] - lead.get(t + 1).copied().unwrap_or(0)).collect();
        let prod = elementary_power(&key, &es, &mut powers, p);
        for (e, v) in prod {
            let cur = f.entry(e.clone()).or_insert(0);
            *cur = (*cur + (p - (c * v) % p)) % p;
            if *cur == 0 {
                f.remove(&e);
            }
        }
        out.insert(key, c);
    }
    Ok(out)
}

fn elementary_power(key: &[u32], es: &[VarPoly], memo: &mut HashMap<Vec<u32>, VarPoly>, p: u64) -> VarPoly {
    if let Some(hit) = memo.get(key) {
        return hit.clone();
    }
    let t = key.iter().position(|&x| x > 0).expect("nonzero key");
    let mut smaller = key.to_vec();
    smaller[t] -= 1;
    let base = elementary_power(&smaller, es, memo, p);
    let value = var_mul(&base, &es[t + 1], p);
    memo.insert(key.to_vec(), value.clone());
    value
}

/// `P^1 g_i` computed through the splitting principle: expand `e_i` in
/// formal roots, apply `P^1` as a derivation (`x ↦ x^p` for Chern roots,
/// `t^2 ↦ 2 t^{p+1}` on squared roots for Pontryagin), rewrite in the
/// elementary basis and, for Chern classes, set `e_1 = 0`.
pub fn splitting_oracle(p: u64, family: GeneratorFamily, i: usize) -> Result<SparsePoly, CharError> {
    check_prime(p)?;
    family.check_index(i)?;
    let n = family.rank();
    if n > MAX_ORACLE_RANK {
        return Err(CharError::OracleTooLarge(n));
    }
    let (q, scale) = match family {
        GeneratorFamily::Chern(_) => (p as u32, 1u64),
        GeneratorFamily::Pontryagin(_) => ((p as u32).div_ceil(2), 2u64),
    };
    // Σ_{|S| = i} Σ_{t ∈ S} y_t^q Π_{S∖t} y_s
    let mut expanded = VarPoly::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != i {
            continue;
        }
        for t in (0..n).filter(|t| (mask >> t) & 1 == 1) {
            let e: Vec<u32> = (0..n).map(|s| if s == t { q } else { (mask >> s) & 1 }).collect();
            let v = expanded.entry(e).or_insert(0);
            *v = (*v + scale) % p;
        }
    }
    expanded.retain(|_, v| *v != 0);
    let in_e = to_elementary_basis(expanded, n, p)?;
    let mut out = SparsePoly::zero(p, family);
    for (key, c) in in_e {
        match family {
            GeneratorFamily::Chern(_) => {
                if key[0] == 0 {
                    out.add_term(key[1..].to_vec(), c);
                }
            }
            GeneratorFamily::Pontryagin(_) => out.add_term(key, c),
        }
    }
    Ok(out)
}

//! Exact arithmetic and linear algebra: big integers and rationals, prime
//! field elements, Smith normal form over the integers and rank over `F_p`.

mod arith;
mod fp;
mod matrix;

pub use arith::{bigint_mod, factorial, is_prime, mod_inverse, multinomial, odd_primes_in, reduce_mod_p, sign_pow};
pub use fp::Fp;
pub use matrix::{
    eliminate_unit_pivots, rank_fp, smith_normal_form, sparse_invariant_factors, sparse_rank_fp, Matrix, PivotScalar,
    SparseMatrix, UnitReduction,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("negative argument {0}")]
    NegativeArgument(i64),
    #[error("P_DIVIDES_DENOMINATOR: {value} is not {p}-integral")]
    PDividesDenominator { p: u64, value: String },
}

/// Coefficient ring for homology computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Integers,
    PrimeField(u64),
}

impl std::fmt::Display for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// One homology group: free rank plus torsion invariant factors (> 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<num_bigint::BigInt>,
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology of a chain complex `C_0 <- C_1 <- ... <- C_top` given by its
/// cell counts and sparse boundary matrices `d_i : C_i -> C_{i-1}`
/// (rows index `C_{i-1}`, columns index `C_i`; `boundaries[i]` for i ≥ 1).
///
/// Over a prime field the torsion lists are empty and `rank` is the Betti
/// number.
pub fn chain_homology(
    cell_counts: &[usize],
    boundaries: &[SparseMatrix<i64>],
    coeffs: Coefficients,
) -> Vec<HomologyGroup> {
    let top = cell_counts.len();
    assert_eq!(boundaries.len(), top, "one boundary slot per degree (slot 0 unused)");
    // rank and torsion of d_i for i in 1..top; d_0 = 0 and d_top+1 = 0
    let mut ranks = vec![0usize; top + 1];
    let mut torsion: Vec<Vec<num_bigint::BigInt>> = vec![Vec::new(); top + 1];
    for i in 1..top {
        let d = &boundaries[i];
        assert_eq!(d.nrows(), cell_counts[i - 1]);
        assert_eq!(d.ncols(), cell_counts[i]);
        match coeffs {
            Coefficients::Integers => {
                let inv = sparse_invariant_factors(d);
                ranks[i] = inv.len();
                torsion[i] = inv.into_iter().filter(|x| *x > num_bigint::BigInt::from(1)).collect();
            }
            Coefficients::PrimeField(p) => ranks[i] = sparse_rank_fp(d, p),
        }
    }
    (0..top)
        .map(|i| HomologyGroup { rank: cell_counts[i] - ranks[i] - ranks[i + 1], torsion: torsion[i + 1].clone() })
        .collect()
}

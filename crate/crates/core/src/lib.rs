//! Computational companion to higher homotopy normality of Lie group
//! inclusions: planar rooted trees and their cubical associahedra,
//! truncated bar constructions of finite groups, Steenrod `P^1` on Chern
//! and Pontryagin classes via the mod-p Wu formulas, and a decision engine
//! producing checkable certificates for p-local `N_k(l)`-normality of
//! `SU(m) -> SU(n)` and `SO(2m+1) -> SO(2n+1)`.

pub mod associahedra;
pub mod barhomology;
pub mod charclass;
pub mod exactlin;
pub mod normality;

/// Arbitrary-precision integers.
pub type Integer = num_bigint::BigInt;
/// Normalized arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
/// Dense integer matrix.
pub type IntMatrix = exactlin::Matrix<Integer>;
/// Dense matrix over a prime field.
pub type FpMatrix = exactlin::Matrix<exactlin::Fp>;

pub mod trees;

/// Edge length in `[0, ∞]` with exact rational finite part.
pub type Length = trees::ExtendedLength<Rational>;

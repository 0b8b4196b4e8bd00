use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_traits::Zero;

use super::TreeError;

/// Scalars usable as finite edge lengths.
pub trait LengthScalar: Clone + Ord + Zero + Add<Output = Self> + fmt::Display + FromStr + fmt::Debug {}

impl<T> LengthScalar for T where T: Clone + Ord + Zero + Add<Output = T> + fmt::Display + FromStr + fmt::Debug {}

/// A point of `[0, ∞]`: a nonnegative finite value or infinity.
///
/// The derived order puts every finite value below `Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedLength<T> {
    Finite(T),
    Infinity,
}

impl<T: LengthScalar> ExtendedLength<T> {
    pub fn finite(value: T) -> Result<Self, TreeError> {
        if value < T::zero() {
            return Err(TreeError::NegativeLength(value.to_string()));
        }
        Ok(ExtendedLength::Finite(value))
    }

    pub fn zero() -> Self {
        ExtendedLength::Finite(T::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedLength::Finite(v) if v.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedLength::Infinity)
    }
}

impl<T: LengthScalar> Add for ExtendedLength<T> {
    type Output = ExtendedLength<T>;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedLength::Finite(a), ExtendedLength::Finite(b)) => ExtendedLength::Finite(a + b),
            _ => ExtendedLength::Infinity,
        }
    }
}

impl<T: fmt::Display> fmt::Display for ExtendedLength<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedLength::Finite(v) => write!(f, "{v}"),
            ExtendedLength::Infinity => write!(f, "inf"),
        }
    }
}

impl<T: LengthScalar> FromStr for ExtendedLength<T> {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, TreeError> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtendedLength::Infinity);
        }
        let v = s.parse::<T>().map_err(|_| TreeError::BadLength(s.to_string()))?;
        ExtendedLength::finite(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Length;

    #[test]
    fn order_and_arithmetic() {
        let a: Length = "5/2".parse().unwrap();
        let b: Length = "3".parse().unwrap();
        let inf: Length = "inf".parse().unwrap();
        assert!(a < b && b < inf);
        assert_eq!((a.clone() + b.clone()).to_string(), "11/2");
        assert_eq!(a.clone() + inf.clone(), inf);
        assert_eq!(a.clone().max(b.clone()), b);
        assert_eq!(inf.to_string(), "inf");
        assert!(Length::zero().is_zero());
        assert!("-1".parse::<Length>().is_err());
        assert!("x".parse::<Length>().is_err());
    }

    #[test]
    fn integer_lengths_work_too() {
        let a: ExtendedLength<i64> = "4".parse().unwrap();
        assert_eq!(a + ExtendedLength::Finite(1), ExtendedLength::Finite(5));
    }
}

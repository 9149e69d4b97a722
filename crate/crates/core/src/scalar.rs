//! Integer types that can carry ranks and binomial coefficients.

use std::fmt::{Debug, Display};

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Num};

/// An unsigned integer usable as a combination rank.
///
/// Fixed-width implementors (`u64`, `u128`) surface overflow through the
/// checked operations, so every combinatorial routine returns
/// [`Error::Overflow`](crate::Error::Overflow) instead of wrapping.
/// [`BigUint`] never overflows and is the default everywhere ranks are
/// stored.
pub trait RankInt:
    Num + Clone + Ord + Debug + Display + CheckedAdd + CheckedSub + CheckedMul + From<u32>
{
    /// Number of significant bits (0 for zero).
    fn bit_len(&self) -> u64;
}

impl RankInt for u64 {
    fn bit_len(&self) -> u64 {
        u64::from(64 - self.leading_zeros())
    }
}

impl RankInt for u128 {
    fn bit_len(&self) -> u64 {
        u64::from(128 - self.leading_zeros())
    }
}

impl RankInt for BigUint {
    fn bit_len(&self) -> u64 {
        self.bits()
    }
}

/// Minimal number of bytes needed to hold `value` (at least one).
pub fn byte_len<T: RankInt>(value: &T) -> u64 {
    value.bit_len().div_ceil(8).max(1)
}

//! The `(h, k)` group key and its canonical `h:k` text form.

use std::fmt;
use std::str::FromStr;

use crate::scalar::RankInt;
use crate::{Error, Result};

/// A group encoded as its 1-based lexicographic rank `h` among all
/// `k`-combinations of the item universe, together with the size `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKeyOf<T> {
    // Field order gives the canonical ordering: by size first, then rank.
    k: u32,
    h: T,
}

impl<T: RankInt> GroupKeyOf<T> {
    /// Builds a key, rejecting `h = 0` and `k = 0`.
    ///
    /// Whether `h <= C(n, k)` holds depends on the universe and is checked
    /// when the key is expanded.
    pub fn new(h: T, k: u32) -> Result<Self> {
        if h.is_zero() || k == 0 {
            return Err(Error::InvalidGroupKey(format!("{h}:{k}")));
        }
        Ok(GroupKeyOf { k, h })
    }

    pub fn h(&self) -> &T {
        &self.h
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn into_parts(self) -> (T, u32) {
        (self.h, self.k)
    }
}

impl<T: RankInt> fmt::Display for GroupKeyOf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.h, self.k)
    }
}

fn canonical_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

impl<T: RankInt> FromStr for GroupKeyOf<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let malformed = || Error::GroupKeyParse(text.to_string());
        let (h, k) = text.split_once(':').ok_or_else(malformed)?;
        if !canonical_digits(h) || !canonical_digits(k) {
            return Err(malformed());
        }
        let h = T::from_str_radix(h, 10).map_err(|_| malformed())?;
        let k: u32 = k.parse().map_err(|_| malformed())?;
        GroupKeyOf::new(h, k)
    }
}

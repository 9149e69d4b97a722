//! Exact binomial coefficients and the bijection between `k`-combinations
//! of `{1..n}` and their 1-based lexicographic rank.
//!
//! Ranking uses the complement identity
//!
//! ```text
//! h = C(n, k) - sum_{l=1..k} C(n - c[k-l+1], l)
//! ```
//!
//! where `c` is the combination in ascending order. The sum is the
//! combinatorial-number-system value of the dual combination
//! `e[l] = n + 1 - c[k-l+1]`, so unranking recovers `e` greedily from
//! `g = C(n, k) - h` (largest `e[l]` with `C(e[l]-1, l) <= g`, for
//! `l = k..1`) and maps it back through the same complement.
//!
//! All routines are generic over [`RankInt`]; with a fixed-width type they
//! fail with [`Error::Overflow`] rather than wrap.

use num_bigint::BigUint;

use crate::scalar::RankInt;
use crate::{Error, Result};

/// Number of distinct items `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UniverseSize(u32);

impl UniverseSize {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        Ok(UniverseSize(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A non-empty, strictly increasing sequence of 1-based item indices.
///
/// The upper bound `n` is not part of the value; it is checked against the
/// universe whenever the combination is ranked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Combination(Vec<u32>);

impl Combination {
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidCombination("empty combination".into()));
        }
        if indices[0] == 0 {
            return Err(Error::InvalidCombination("indices are 1-based".into()));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCombination(format!(
                "not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Combination(indices))
    }

    /// Builds a combination from any collection of distinct indices.
    pub fn from_unsorted(mut indices: Vec<u32>) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    /// Group size `k`.
    pub fn len(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

/// `C(n, k)` in `T`, or `None` if an intermediate product overflows `T`.
///
/// Uses the multiplicative form `C(n-k+i, i) = C(n-k+i-1, i-1) * (n-k+i) / i`,
/// where every division is exact.
pub fn try_binomial<T: RankInt>(n: u32, k: u32) -> Option<T> {
    if k > n {
        return Some(T::zero());
    }
    let k = k.min(n - k);
    let base = n - k;
    let mut acc = T::one();
    for i in 1..=k {
        acc = acc.checked_mul(&T::from(base + i))? / T::from(i);
    }
    Some(acc)
}

/// Exact `C(n, k)`; 0 when `k > n` and 1 when `k = 0`.
pub fn binomial(n: u32, k: u32) -> BigUint {
    try_binomial(n, k).expect("BigUint arithmetic does not overflow")
}

fn checked_binomial<T: RankInt>(n: u32, k: u32) -> Result<T> {
    try_binomial(n, k).ok_or(Error::Overflow("binomial coefficient"))
}

fn check_against(c: &Combination, n: UniverseSize) -> Result<()> {
    let last = *c.0.last().expect("combination is non-empty");
    if last > n.get() {
        return Err(Error::InvalidCombination(format!(
            "index {last} outside 1..={}",
            n.get()
        )));
    }
    Ok(())
}

/// 1-based position of `c` in the lexicographic order of all
/// `|c|`-combinations of `{1..n}`.
pub fn rank_group<T: RankInt>(c: &Combination, n: UniverseSize) -> Result<T> {
    check_against(c, n)?;
    let (n, k) = (n.get(), c.len());
    let mut sum = T::zero();
    for l in 1..=k {
        let dual = n - c.0[(k - l) as usize];
        sum = sum
            .checked_add(&checked_binomial(dual, l)?)
            .ok_or(Error::Overflow("rank sum"))?;
    }
    let total: T = checked_binomial(n, k)?;
    // sum <= C(n,k) - 1 by the hockey-stick identity, so this cannot underflow.
    Ok(total - sum)
}

/// The unique `k`-combination of `{1..n}` whose rank is `h`.
pub fn unrank_group<T: RankInt>(h: &T, k: u32, n: UniverseSize) -> Result<Combination> {
    let n = n.get();
    if k == 0 || k > n {
        return Err(Error::InvalidSize { k, n });
    }
    let total: T = checked_binomial(n, k)?;
    if h.is_zero() || *h > total {
        return Err(Error::RankOutOfRange {
            h: h.to_string(),
            k,
            n,
        });
    }
    let mut g = total - h.clone();
    let mut out = vec![0u32; k as usize];
    // `upper` bounds the next dual element from above (exclusive of the
    // element just placed); duals strictly decrease as l decreases.
    let mut upper = n;
    for l in (1..=k).rev() {
        let mut j = upper;
        let mut t: T = checked_binomial(j - 1, l)?;
        while t > g {
            // C(j-2, l) = C(j-1, l) * (j-1-l) / (j-1); exact.
            t = t.checked_mul(&T::from(j - 1 - l)).ok_or(Error::Overflow("unrank step"))?
                / T::from(j - 1);
            j -= 1;
        }
        g = g - t;
        out[(k - l) as usize] = n + 1 - j;
        upper = j - 1;
    }
    Ok(Combination(out))
}

/// All `k`-combinations of `{1..n}` in lexicographic order.
///
/// Yields nothing when `k == 0` or `k > n`.
pub fn enumerate_combinations(n: u32, k: u32) -> LexCombinations {
    let current = (k >= 1 && k <= n).then(|| (1..=k).collect());
    LexCombinations { n, current }
}

/// Iterator returned by [`enumerate_combinations`].
#[derive(Debug, Clone)]
pub struct LexCombinations {
    n: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for LexCombinations {
    type Item = Combination;

    fn next(&mut self) -> Option<Combination> {
        let cur = self.current.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        // Rightmost position that can still be incremented.
        let pivot = (0..k).rev().find(|&a| next[a] < self.n - (k - 1 - a) as u32);
        if let Some(a) = pivot {
            next[a] += 1;
            for b in a + 1..k {
                next[b] = next[b - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(Combination(cur))
    }
}

//! Lossless compression of many-to-many bridge tables.
//!
//! Each group of `k` items is replaced by a single key `(h, k)`, where `h`
//! is the group's 1-based lexicographic rank among all `k`-combinations of
//! the ordered item universe. The bridge table disappears: a grouped design
//! stores the key as a column of the group relation, a direct design stores
//! only the keys. Rank joins expand the keys on the fly and reproduce every
//! answer of the classic `g ⋈ b ⋈ i`.
//!
//! The combinatorial core in [`combinat`] is generic over [`RankInt`], so it
//! runs on `u64`/`u128` where ranks fit and on [`Natural`] (arbitrary
//! precision) everywhere else. Stored keys always use [`Natural`].
//!
//! ```
//! use combridge::combinat::{rank_group, unrank_group, Combination, UniverseSize};
//! use combridge::Natural;
//!
//! let n = UniverseSize::new(5).unwrap();
//! let c = Combination::new(vec![1, 2, 3]).unwrap();
//! let h: Natural = rank_group(&c, n).unwrap();
//! assert_eq!(h, Natural::from(1u32));
//! assert_eq!(unrank_group(&h, 3, n).unwrap(), c);
//! ```

pub mod bridgeio;
pub mod combinat;
mod error;
pub mod key;
pub mod operators;
pub mod relmodel;
pub mod scalar;
pub mod synth;

pub use error::{CsvErrorKind, Error, Result};
pub use key::GroupKeyOf;
pub use scalar::RankInt;

/// Arbitrary-precision natural number used for stored ranks.
pub type Natural = num_bigint::BigUint;

/// Group key with an arbitrary-precision rank.
pub type GroupKey = GroupKeyOf<Natural>;

/// Group key with a 64-bit rank, for universes where `C(n, k) < 2^64`.
pub type GroupKey64 = GroupKeyOf<u64>;

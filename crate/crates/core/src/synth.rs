//! Seeded synthetic bridges whose group widths follow the inpatient
//! diagnosis-count distribution (740,731 visits over 700 diagnosis codes).

use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bridgeio::ClassicBridge;
use crate::operators::{GROUP_PK, ITEM_PK};
use crate::relmodel::{Relation, Schema, Value, ValueType};
use crate::{Error, Result};

/// Visits per number of distinct diagnoses. The last bucket is open-ended
/// (`>= 11`); [`SynthConfig::open_bucket_max`] closes it.
pub const INPATIENT_WIDTHS: [(u32, u64); 11] = [
    (1, 102_747),
    (2, 185_211),
    (3, 130_781),
    (4, 83_743),
    (5, 69_580),
    (6, 53_660),
    (7, 32_723),
    (8, 20_036),
    (9, 13_506),
    (10, 9_402),
    (11, 39_342),
];

pub const INPATIENT_VISITS: u64 = 740_731;
pub const DIAGNOSIS_CODES: u32 = 700;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Down-scaling divisor applied to every bucket count.
    pub scale: u64,
    pub items: u32,
    /// Widths of the open bucket are drawn uniformly from `11..=open_bucket_max`.
    pub open_bucket_max: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            scale: 1000,
            items: DIAGNOSIS_CODES,
            open_bucket_max: 15,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    /// `(Item_PK, description)`.
    pub items: Relation,
    /// `(Group_PK, visit)`.
    pub groups: Relation,
    pub bridge: ClassicBridge,
}

/// Bucket sizes after dividing by `scale`, apportioned by largest remainder
/// so they sum to `round(740731 / scale)`.
pub fn bucket_counts(scale: u64) -> Vec<(RangeInclusive<u32>, u64)> {
    let scale = scale.max(1);
    let target = (INPATIENT_VISITS + scale / 2) / scale;
    let mut counts: Vec<u64> = INPATIENT_WIDTHS.iter().map(|&(_, c)| c / scale).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // Ties broken by bucket order for determinism.
    order.sort_by_key(|&b| (std::cmp::Reverse(INPATIENT_WIDTHS[b].1 % scale), b));
    for &b in order.iter().take(target.saturating_sub(assigned) as usize) {
        counts[b] += 1;
    }
    INPATIENT_WIDTHS
        .iter()
        .zip(counts)
        .map(|(&(w, _), c)| (w..=w, c))
        .collect()
}

/// Item key for dense position `j` (1-based): sparse, ICD-like integers.
pub fn item_key(j: u32) -> i64 {
    10_000 + 7 * i64::from(j)
}

pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    if config.items == 0 {
        return Err(Error::EmptyUniverse);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut widths = Vec::new();
    for (bucket, count) in bucket_counts(config.scale) {
        let open = *bucket.start() == 11;
        for _ in 0..count {
            let w = if open {
                rng.gen_range(11..=config.open_bucket_max.max(11))
            } else {
                *bucket.start()
            };
            widths.push(w);
        }
    }
    widths.shuffle(&mut rng);
    if let Some(&w) = widths.iter().find(|&&w| w > config.items) {
        return Err(Error::InvalidSize { k: w, n: config.items });
    }

    let items = Relation::from_rows(
        Schema::new(
            vec![(ITEM_PK, ValueType::Int), ("description", ValueType::Text)],
            &[ITEM_PK],
        )?,
        (1..=config.items).map(|j| vec![Value::Int(item_key(j)), Value::Text(format!("diagnosis {j}"))]),
    )?;
    let groups = Relation::from_rows(
        Schema::new(vec![(GROUP_PK, ValueType::Int), ("visit", ValueType::Text)], &[GROUP_PK])?,
        (1..=widths.len() as i64).map(|g| vec![Value::Int(g), Value::Text(format!("visit-{g:06}"))]),
    )?;
    let mut pairs = Vec::new();
    for (g, &w) in widths.iter().enumerate() {
        for j in sample(&mut rng, config.items as usize, w as usize) {
            pairs.push((Value::Int(g as i64 + 1), Value::Int(item_key(j as u32 + 1))));
        }
    }
    let bridge = ClassicBridge::from_pairs(ValueType::Int, ValueType::Int, pairs)?;
    Ok(SynthData { items, groups, bridge })
}

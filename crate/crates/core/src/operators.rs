//! Relational operators over group-key columns.
//!
//! * [`rank_inverse_join`] expands every `(h, k)` value of a column into
//!   its `k` member items.
//! * [`rank_join_grouped`] evaluates `g_rankc ⋈ α(g_rankc) ⋈ i`.
//! * [`rank_join_direct`] evaluates `α(b_rankc) ⋈ i`.
//! * [`classic_three_way_join`] is `g ⋈ b ⋈ i` over a stored bridge, the
//!   reference every rank join must agree with.

use std::collections::BTreeSet;

use crate::combinat::unrank_group;
use crate::relmodel::{natural_join, ItemUniverse, Relation, Schema, Value, ValueType};
use crate::{Error, GroupKey, Result};

pub const GROUP_PK: &str = "Group_PK";
pub const ITEM_PK: &str = "Item_PK";
pub const GROUP_RANK: &str = "groupRank";

/// How dangling references are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrity {
    /// Dangling references are an error.
    #[default]
    Strict,
    /// Dangling rows are dropped, as plain natural-join semantics would.
    Permissive,
}

/// A relation together with the name of its group-key column.
#[derive(Debug, Clone, Copy)]
pub struct RankColumnRef<'a> {
    relation: &'a Relation,
    column: &'a str,
}

impl<'a> RankColumnRef<'a> {
    pub fn new(relation: &'a Relation, column: &'a str) -> Result<Self> {
        let ty = relation.schema().type_of(column)?;
        if ty != ValueType::Group {
            return Err(Error::TypeMismatch {
                attribute: column.to_string(),
                left: ValueType::Group.to_string(),
                right: ty.to_string(),
            });
        }
        Ok(RankColumnRef { relation, column })
    }

    pub fn relation(&self) -> &'a Relation {
        self.relation
    }

    pub fn column(&self) -> &'a str {
        self.column
    }

    fn distinct_keys(&self) -> BTreeSet<&'a GroupKey> {
        self.relation
            .column(self.column)
            .expect("column checked at construction")
            .filter_map(Value::as_group)
            .collect()
    }
}

/// Item keys of the group encoded by `key`, in ascending order.
pub fn expand_group_key(key: &GroupKey, universe: &ItemUniverse) -> Result<Vec<Value>> {
    let combination =
        unrank_group(key.h(), key.k(), universe.size()).map_err(|e| Error::CorruptGroupKey {
            key: key.to_string(),
            reason: e.to_string(),
        })?;
    Ok(combination
        .indices()
        .iter()
        .map(|&d| universe.key_at(d).expect("unranked index within universe").clone())
        .collect())
}

/// Expands each distinct group key into `(key, item)` rows.
///
/// The output schema is `(column, <universe key attribute>)`.
pub fn rank_inverse_join(input: &RankColumnRef<'_>, universe: &ItemUniverse) -> Result<Relation> {
    let schema = Schema::new(
        vec![
            (input.column(), ValueType::Group),
            (universe.key_attribute(), universe.key_type()),
        ],
        &[],
    )?;
    let mut out = Relation::new(schema);
    for key in input.distinct_keys() {
        for item in expand_group_key(key, universe)? {
            out.insert(vec![Value::Group(key.clone()), item])?;
        }
    }
    Ok(out)
}

fn reject_collisions(left: &Relation, items: &Relation) -> Result<()> {
    let clashes: Vec<&str> = left
        .schema()
        .names()
        .filter(|name| items.schema().contains(name))
        .collect();
    if clashes.is_empty() {
        Ok(())
    } else {
        Err(Error::NameCollision(clashes.join(", ")))
    }
}

fn check_items_present(
    expanded: &Relation,
    items: &Relation,
    universe: &ItemUniverse,
) -> Result<()> {
    let known: BTreeSet<&Value> = items.column(universe.key_attribute())?.collect();
    for item in expanded.column(universe.key_attribute())? {
        if !known.contains(item) {
            return Err(Error::ReferentialViolation(format!(
                "item {item} is in the universe but not in the item relation"
            )));
        }
    }
    Ok(())
}

fn expand_and_join_items(
    input: &RankColumnRef<'_>,
    items: &Relation,
    universe: &ItemUniverse,
    integrity: Integrity,
) -> Result<Relation> {
    reject_collisions(input.relation(), items)?;
    let item_ty = items.schema().type_of(universe.key_attribute())?;
    if item_ty != universe.key_type() {
        return Err(Error::TypeMismatch {
            attribute: universe.key_attribute().to_string(),
            left: universe.key_type().to_string(),
            right: item_ty.to_string(),
        });
    }
    let expanded = rank_inverse_join(input, universe)?;
    if integrity == Integrity::Strict {
        check_items_present(&expanded, items, universe)?;
    }
    natural_join(&expanded, items)
}

/// Rank-Join for the grouped design: every row of `g_rankc` paired with
/// every member item row of `items`.
///
/// `g_rankc` and `items` must not share attribute names, since natural-join
/// semantics would silently constrain on them.
pub fn rank_join_grouped(
    g_rankc: &Relation,
    items: &Relation,
    column: &str,
    universe: &ItemUniverse,
    integrity: Integrity,
) -> Result<Relation> {
    let input = RankColumnRef::new(g_rankc, column)?;
    let expanded = expand_and_join_items(&input, items, universe, integrity)?;
    natural_join(g_rankc, &expanded)
}

/// Rank-Join for the direct design: `α(b_rankc) ⋈ items`.
pub fn rank_join_direct(
    b_rankc: &Relation,
    items: &Relation,
    column: &str,
    universe: &ItemUniverse,
    integrity: Integrity,
) -> Result<Relation> {
    let input = RankColumnRef::new(b_rankc, column)?;
    expand_and_join_items(&input, items, universe, integrity)
}

fn check_references(
    bridge: &Relation,
    attribute: &str,
    target: &Relation,
    what: &str,
) -> Result<()> {
    let known: BTreeSet<&Value> = target.column(attribute)?.collect();
    if let Some(missing) = bridge.column(attribute)?.find(|v| !known.contains(v)) {
        return Err(Error::ReferentialViolation(format!(
            "bridge references {what} {missing} which does not exist"
        )));
    }
    Ok(())
}

/// `g ⋈ b ⋈ i` over a classic bridge `b = (Group_PK, Item_PK)`.
pub fn classic_three_way_join(
    g: &Relation,
    b: &Relation,
    i: &Relation,
    integrity: Integrity,
) -> Result<Relation> {
    for (rel, attr) in [(b, GROUP_PK), (b, ITEM_PK), (g, GROUP_PK), (i, ITEM_PK)] {
        rel.schema().index_of(attr)?;
    }
    if integrity == Integrity::Strict {
        check_references(b, GROUP_PK, g, "group")?;
        check_references(b, ITEM_PK, i, "item")?;
    }
    natural_join(&natural_join(g, b)?, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{binomial, enumerate_combinations};

    fn key(h: u64, k: u32) -> GroupKey {
        GroupKey::new(h.into(), k).unwrap()
    }

    fn items(n: i64) -> Relation {
        let schema =
            Schema::new(vec![(ITEM_PK, ValueType::Text), ("label", ValueType::Text)], &[ITEM_PK])
                .unwrap();
        Relation::from_rows(
            schema,
            (1..=n).map(|j| vec![Value::Text(format!("I{j}")), Value::Text(format!("item {j}"))]),
        )
        .unwrap()
    }

    fn universe(n: i64) -> ItemUniverse {
        crate::relmodel::build_universe(&items(n), ITEM_PK).unwrap()
    }

    fn rank_relation(keys: &[GroupKey]) -> Relation {
        Relation::from_rows(
            Schema::new(vec![(GROUP_RANK, ValueType::Group)], &[GROUP_RANK]).unwrap(),
            keys.iter().map(|k| vec![Value::Group(k.clone())]),
        )
        .unwrap()
    }

    #[test]
    fn inverse_join_expands_first_combinations() {
        let u = universe(5);
        let b = rank_relation(&[key(1, 3)]);
        let out = rank_inverse_join(&RankColumnRef::new(&b, GROUP_RANK).unwrap(), &u).unwrap();
        let got = out.row_set(&[GROUP_RANK, ITEM_PK]).unwrap();
        let expected: BTreeSet<Vec<Value>> = ["I1", "I2", "I3"]
            .iter()
            .map(|i| vec![Value::Group(key(1, 3)), Value::from(*i)])
            .collect();
        assert_eq!(got, expected);

        let b = rank_relation(&[key(1, 2)]);
        let out = rank_inverse_join(&RankColumnRef::new(&b, GROUP_RANK).unwrap(), &u).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn inverse_join_of_empty_is_empty() {
        let u = universe(4);
        let b = rank_relation(&[]);
        let out = rank_inverse_join(&RankColumnRef::new(&b, GROUP_RANK).unwrap(), &u).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn inverse_join_matches_enumeration_over_eight_items() {
        // With text keys "I1".."I8" lexicographic and numeric order agree.
        let u = universe(8);
        for k in 1..=8u32 {
            let all: Vec<_> = enumerate_combinations(8, k).collect();
            for (pos, comb) in all.iter().enumerate().step_by(3) {
                let gk = key(pos as u64 + 1, k);
                let b = rank_relation(std::slice::from_ref(&gk));
                let out =
                    rank_inverse_join(&RankColumnRef::new(&b, GROUP_RANK).unwrap(), &u).unwrap();
                let got: BTreeSet<Value> = out.column(ITEM_PK).unwrap().cloned().collect();
                let expected: BTreeSet<Value> = comb
                    .indices()
                    .iter()
                    .map(|&d| Value::Text(format!("I{d}")))
                    .collect();
                assert_eq!(got, expected, "h={} k={k}", pos + 1);
            }
        }
    }

    #[test]
    fn inverse_join_rejects_corrupt_keys() {
        let u = universe(5);
        let too_big = GroupKey::new(binomial(5, 2) + 1u32, 2).unwrap();
        let b = rank_relation(&[too_big]);
        let r = rank_inverse_join(&RankColumnRef::new(&b, GROUP_RANK).unwrap(), &u);
        assert!(matches!(r, Err(Error::CorruptGroupKey { .. })));
        let b = rank_relation(&[key(1, 6)]);
        let r = rank_inverse_join(&RankColumnRef::new(&b, GROUP_RANK).unwrap(), &u);
        assert!(matches!(r, Err(Error::CorruptGroupKey { .. })));
        assert!(matches!(
            RankColumnRef::new(&b, "nope"),
            Err(Error::UnknownAttribute(_))
        ));
        let i = items(2);
        assert!(matches!(
            RankColumnRef::new(&i, ITEM_PK),
            Err(Error::TypeMismatch { .. })
        ));
    }

    #[test]
    fn duplicate_keys_expand_once() {
        let u = universe(5);
        let schema = Schema::new(
            vec![(GROUP_PK, ValueType::Int), (GROUP_RANK, ValueType::Group)],
            &[GROUP_PK],
        )
        .unwrap();
        let g = Relation::from_rows(
            schema,
            vec![
                vec![1.into(), key(2, 2).into()],
                vec![2.into(), key(2, 2).into()],
            ],
        )
        .unwrap();
        let out = rank_inverse_join(&RankColumnRef::new(&g, GROUP_RANK).unwrap(), &u).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn grouped_join_pairs_group_with_members() {
        let u = universe(3);
        let schema = Schema::new(
            vec![
                (GROUP_PK, ValueType::Int),
                (GROUP_RANK, ValueType::Group),
                ("visit", ValueType::Text),
            ],
            &[GROUP_PK],
        )
        .unwrap();
        let g = Relation::from_rows(schema, vec![vec![7.into(), key(1, 3).into(), "v7".into()]])
            .unwrap();
        let out = rank_join_grouped(&g, &items(3), GROUP_RANK, &u, Integrity::Strict).unwrap();
        assert_eq!(out.len(), 3);
        let names: BTreeSet<&str> = out.schema().names().collect();
        assert_eq!(
            names,
            [GROUP_PK, GROUP_RANK, "visit", ITEM_PK, "label"].into_iter().collect()
        );

        let empty = Relation::new(g.schema().clone());
        assert!(rank_join_grouped(&empty, &items(3), GROUP_RANK, &u, Integrity::Strict)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn grouped_join_rejects_name_collisions() {
        let u = universe(3);
        let schema = Schema::new(
            vec![(GROUP_RANK, ValueType::Group), ("label", ValueType::Text)],
            &[],
        )
        .unwrap();
        let g = Relation::from_rows(schema, vec![vec![key(1, 2).into(), "x".into()]]).unwrap();
        assert!(matches!(
            rank_join_grouped(&g, &items(3), GROUP_RANK, &u, Integrity::Strict),
            Err(Error::NameCollision(_))
        ));
    }

    #[test]
    fn direct_join_expands_to_items() {
        let u = universe(4);
        let out = rank_join_direct(
            &rank_relation(&[key(1, 2)]),
            &items(4),
            GROUP_RANK,
            &u,
            Integrity::Strict,
        )
        .unwrap();
        let got = out.row_set(&[GROUP_RANK, ITEM_PK, "label"]).unwrap();
        let expected: BTreeSet<Vec<Value>> = [1, 2]
            .iter()
            .map(|j| {
                vec![
                    Value::Group(key(1, 2)),
                    Value::Text(format!("I{j}")),
                    Value::Text(format!("item {j}")),
                ]
            })
            .collect();
        assert_eq!(got, expected);
        let empty = rank_relation(&[]);
        assert!(rank_join_direct(&empty, &items(4), GROUP_RANK, &u, Integrity::Strict)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn strict_mode_flags_items_missing_from_item_relation() {
        let u = universe(4);
        let partial = items(2);
        let b = rank_relation(&[key(6, 2)]); // (3,4)
        assert!(matches!(
            rank_join_direct(&b, &partial, GROUP_RANK, &u, Integrity::Strict),
            Err(Error::ReferentialViolation(_))
        ));
        let out = rank_join_direct(&b, &partial, GROUP_RANK, &u, Integrity::Permissive).unwrap();
        assert!(out.is_empty());
    }

    fn fig5() -> (Relation, Relation, Relation) {
        let g = Relation::from_rows(
            Schema::new(vec![(GROUP_PK, ValueType::Int)], &[GROUP_PK]).unwrap(),
            vec![vec![1000.into()], vec![2000.into()]],
        )
        .unwrap();
        let b = Relation::from_rows(
            Schema::new(
                vec![(GROUP_PK, ValueType::Int), (ITEM_PK, ValueType::Int)],
                &[GROUP_PK, ITEM_PK],
            )
            .unwrap(),
            [(1000, 100), (1000, 300), (2000, 100), (2000, 200), (2000, 300)]
                .iter()
                .map(|&(g, i)| vec![g.into(), i.into()]),
        )
        .unwrap();
        let i = Relation::from_rows(
            Schema::new(vec![(ITEM_PK, ValueType::Int), ("desc", ValueType::Text)], &[ITEM_PK])
                .unwrap(),
            vec![
                vec![100.into(), "flu".into()],
                vec![200.into(), "cough".into()],
                vec![300.into(), "asthma".into()],
            ],
        )
        .unwrap();
        (g, b, i)
    }

    #[test]
    fn classic_join_on_two_groups() {
        let (g, b, i) = fig5();
        let out = classic_three_way_join(&g, &b, &i, Integrity::Strict).unwrap();
        assert_eq!(out.len(), 5);
        let empty_b = Relation::new(b.schema().clone());
        assert!(classic_three_way_join(&g, &empty_b, &i, Integrity::Strict)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn classic_join_referential_checks() {
        let (g, mut b, i) = fig5();
        b.insert(vec![3000.into(), 100.into()]).unwrap();
        assert!(matches!(
            classic_three_way_join(&g, &b, &i, Integrity::Strict),
            Err(Error::ReferentialViolation(_))
        ));
        let out = classic_three_way_join(&g, &b, &i, Integrity::Permissive).unwrap();
        assert_eq!(out.len(), 5);
    }
}

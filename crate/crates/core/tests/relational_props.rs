use std::collections::BTreeSet;

use combridge::relmodel::{natural_join, project, ItemUniverse, Relation, Schema, Value, ValueType};
use proptest::prelude::*;

/// Relation over the given attribute names with small integer cells so that
/// joins actually match.
fn relation(names: &'static [&'static str]) -> impl Strategy<Value = Relation> {
    proptest::collection::vec(proptest::collection::vec(0i64..4, names.len()), 0..8).prop_map(
        move |rows| {
            let schema = Schema::new(names.iter().map(|n| (*n, ValueType::Int)).collect(), &[]).unwrap();
            Relation::from_rows(schema, rows.into_iter().map(|r| r.into_iter().map(Value::Int).collect()))
                .unwrap()
        },
    )
}

/// Nested-loop reference join producing attribute→value maps.
fn nested_loop(r: &Relation, s: &Relation) -> BTreeSet<Vec<(String, Value)>> {
    let mut out = BTreeSet::new();
    for a in r.rows() {
        for b in s.rows() {
            let mut row: Vec<(String, Value)> = r.schema().names().map(String::from).zip(a.iter().cloned()).collect();
            let mut ok = true;
            for (name, v) in s.schema().names().zip(b) {
                match row.iter().find(|(n, _)| n == name) {
                    Some((_, existing)) => ok &= existing == v,
                    None => row.push((name.to_string(), v.clone())),
                }
            }
            if ok {
                row.sort();
                out.insert(row);
            }
        }
    }
    out
}

fn as_maps(r: &Relation) -> BTreeSet<Vec<(String, Value)>> {
    r.rows()
        .map(|row| {
            let mut m: Vec<(String, Value)> = r.schema().names().map(String::from).zip(row.iter().cloned()).collect();
            m.sort();
            m
        })
        .collect()
}

proptest! {
    #[test]
    fn join_matches_nested_loop(r in relation(&["a", "b"]), s in relation(&["b", "c"])) {
        prop_assert_eq!(as_maps(&natural_join(&r, &s).unwrap()), nested_loop(&r, &s));
    }

    #[test]
    fn join_commutes(r in relation(&["a", "b"]), s in relation(&["b", "c", "a"])) {
        let rs = natural_join(&r, &s).unwrap();
        let sr = natural_join(&s, &r).unwrap();
        prop_assert!(rs.same_content(&sr));
    }

    #[test]
    fn join_associates(r in relation(&["a", "b"]), s in relation(&["b", "c"]), t in relation(&["c", "a"])) {
        let left = natural_join(&natural_join(&r, &s).unwrap(), &t).unwrap();
        let right = natural_join(&r, &natural_join(&s, &t).unwrap()).unwrap();
        prop_assert!(left.same_content(&right));
    }

    #[test]
    fn projection_matches_distinct_values(r in relation(&["a", "b", "c"])) {
        let p = project(&r, &["b"]).unwrap();
        let oracle: BTreeSet<Value> = r.rows().map(|row| row[1].clone()).collect();
        let got: BTreeSet<Value> = p.rows().map(|row| row[0].clone()).collect();
        prop_assert_eq!(got, oracle);
    }

    #[test]
    fn universe_round_trip(keys in proptest::collection::btree_set("[a-z]{1,6}", 1..40)) {
        let values: Vec<Value> = keys.iter().rev().map(|k| Value::Text(k.clone())).collect();
        let u = ItemUniverse::from_keys("Item_PK", values).unwrap();
        prop_assert_eq!(u.n() as usize, keys.len());
        for key in &keys {
            let v = Value::Text(key.clone());
            let d = u.index_of(&v).unwrap();
            prop_assert_eq!(u.key_at(d), Some(&v));
        }
        for d in 1..=u.n() {
            prop_assert_eq!(u.index_of(u.key_at(d).unwrap()), Some(d));
        }
        // dense order is key order
        prop_assert!(u.keys().windows(2).all(|w| w[0] < w[1]));
    }
}

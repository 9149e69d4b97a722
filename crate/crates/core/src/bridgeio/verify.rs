//! Losslessness check: decode every group key and compare with the stored
//! bridge, then compare both rank joins with the classic three-way join.

use std::collections::{BTreeMap, BTreeSet};

use crate::operators::{
    classic_three_way_join, expand_group_key, rank_join_direct, rank_join_grouped, Integrity,
    GROUP_RANK,
};
use crate::relmodel::{natural_join, project, ItemUniverse, Relation, Value};
use crate::{Error, Result};

use super::codec::{compress_bridge, ClassicBridge, CompressedBridge, Mode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub groups: usize,
    pub bridge_rows: usize,
    pub grouped_join_rows: usize,
    pub direct_join_rows: usize,
}

fn render(values: &BTreeSet<&Value>) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// First group whose membership differs between two bridges, described for
/// humans; `None` when they hold the same rows.
pub fn first_divergence(expected: &ClassicBridge, actual: &ClassicBridge) -> Option<String> {
    let exp = expected.groups();
    let act = actual.groups();
    let ids: BTreeSet<&Value> = exp.keys().chain(act.keys()).copied().collect();
    let empty = BTreeSet::new();
    ids.into_iter().find_map(|id| {
        let e = exp.get(id).unwrap_or(&empty);
        let a = act.get(id).unwrap_or(&empty);
        (e != a).then(|| {
            format!("group {id}: expected items {}, decoded {}", render(e), render(a))
        })
    })
}

fn compare_rows(
    label: &str,
    expected: &Relation,
    actual: &Relation,
    order: &[&str],
) -> Result<usize> {
    let exp = expected.row_set(order)?;
    let act = actual.row_set(order)?;
    if let Some(row) = exp.symmetric_difference(&act).next() {
        let side = if exp.contains(row) { "missing from" } else { "unexpected in" };
        let text: Vec<String> = row.iter().map(Value::to_string).collect();
        return Err(Error::Divergence(format!(
            "{label}: row ({}) {side} rank-join result",
            text.join(", ")
        )));
    }
    Ok(act.len())
}

/// Group-by-group round trip of `correspondence` against `bridge`.
fn check_round_trip(
    bridge: &ClassicBridge,
    correspondence: &Relation,
    universe: &ItemUniverse,
) -> Result<()> {
    let groups = bridge.groups();
    let mut decoded_ids = BTreeSet::new();
    let mut decoded: BTreeMap<&Value, Vec<Value>> = BTreeMap::new();
    for row in correspondence.rows() {
        let (id, key) = (&row[0], row[1].as_group().expect("typed column"));
        decoded_ids.insert(id);
        let items = expand_group_key(key, universe).map_err(|e| {
            Error::Divergence(format!("group {id}: {e}"))
        })?;
        decoded.insert(id, items);
    }
    let empty = BTreeSet::new();
    let ids: BTreeSet<&Value> = groups.keys().copied().chain(decoded_ids).collect();
    for id in ids {
        let expected = groups.get(id).unwrap_or(&empty);
        let got: BTreeSet<&Value> = decoded.get(id).map(|v| v.iter().collect()).unwrap_or_default();
        if *expected != got {
            return Err(Error::Divergence(format!(
                "group {id}: expected items {}, decoded {}",
                render(expected),
                render(&got)
            )));
        }
    }
    Ok(())
}

/// Checks that `compressed` (or a fresh grouped compression of `bridge`)
/// loses nothing.
///
/// `groups` is the group relation `g` (it must contain `Group_PK`); `items`
/// the item relation `i`. Any mismatch is reported as
/// [`Error::Divergence`] naming the first differing group or row.
pub fn verify_lossless(
    groups: &Relation,
    bridge: &ClassicBridge,
    items: &Relation,
    universe: &ItemUniverse,
    compressed: Option<&CompressedBridge>,
) -> Result<VerifyReport> {
    let fresh;
    let compressed = match compressed {
        Some(c) => c,
        None => {
            fresh = compress_bridge(bridge, universe, Mode::Grouped)?;
            &fresh
        }
    };
    if compressed.universe_version() != universe.version() {
        return Err(Error::StaleUniverse {
            expected: compressed.universe_version().to_string(),
            found: universe.version().to_string(),
        });
    }
    let correspondence = compressed.correspondence().ok_or_else(|| {
        Error::Divergence("direct-mode data has no Group_PK correspondence to check against".into())
    })??;

    check_round_trip(bridge, &correspondence, universe)?;

    // g ⋈ b ⋈ i against g_rankc ▷ i
    let classic = classic_three_way_join(groups, bridge.relation(), items, Integrity::Strict)?;
    let g_rankc = natural_join(groups, &correspondence)?;
    let grouped = rank_join_grouped(&g_rankc, items, GROUP_RANK, universe, Integrity::Strict)?;
    let classic_attrs: Vec<&str> = classic.schema().names().collect();
    let grouped_rows = compare_rows("grouped rank-join", &classic, &grouped, &classic_attrs)?;

    // b ⋈ i (re-keyed through the correspondence) against b_rankc ▷ i
    let b_rankc = match compressed.mode() {
        Mode::Direct => compressed.relation().clone(),
        Mode::Grouped => project(&correspondence, &[GROUP_RANK])?,
    };
    let direct = rank_join_direct(&b_rankc, items, GROUP_RANK, universe, Integrity::Strict)?;
    let direct_attrs: Vec<&str> = direct.schema().names().collect();
    let rekeyed = natural_join(&natural_join(&correspondence, bridge.relation())?, items)?;
    let classic_direct = project(&rekeyed, &direct_attrs)?;
    let direct_rows = compare_rows("direct rank-join", &classic_direct, &direct, &direct_attrs)?;

    Ok(VerifyReport {
        groups: correspondence.len(),
        bridge_rows: bridge.len(),
        grouped_join_rows: grouped_rows,
        direct_join_rows: direct_rows,
    })
}

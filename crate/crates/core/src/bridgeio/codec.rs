use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::combinat::{rank_group, Combination};
use crate::operators::{expand_group_key, GROUP_PK, GROUP_RANK, ITEM_PK};
use crate::relmodel::{project, ItemUniverse, Relation, Schema, Value, ValueType};
use crate::{Error, GroupKey, Result};

/// Which combinatorial design the compressed rows follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// `G_rankc`: the group relation gains a `groupRank` column.
    #[default]
    Grouped,
    /// `B_rankc`: a single `groupRank` column replaces the bridge.
    Direct,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Grouped => "grouped",
            Mode::Direct => "direct",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grouped" => Ok(Mode::Grouped),
            "direct" => Ok(Mode::Direct),
            other => Err(format!("unknown mode `{other}` (expected grouped or direct)")),
        }
    }
}

/// A bridge relation `(Group_PK, Item_PK)` keyed by both columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicBridge(Relation);

impl ClassicBridge {
    pub fn new(relation: Relation) -> Result<Self> {
        if relation.schema().len() != 2 {
            return Err(Error::Arity {
                expected: 2,
                got: relation.schema().len(),
            });
        }
        let group_ty = relation.schema().type_of(GROUP_PK)?;
        let item_ty = relation.schema().type_of(ITEM_PK)?;
        let projected = project(&relation, &[GROUP_PK, ITEM_PK])?;
        Self::from_pairs(
            group_ty,
            item_ty,
            projected.rows().map(|r| (r[0].clone(), r[1].clone())),
        )
    }

    pub fn from_pairs<I>(group_ty: ValueType, item_ty: ValueType, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Value, Value)>,
    {
        let schema = Schema::new(
            vec![(GROUP_PK, group_ty), (ITEM_PK, item_ty)],
            &[GROUP_PK, ITEM_PK],
        )?;
        Relation::from_rows(schema, pairs.into_iter().map(|(g, i)| vec![g, i])).map(ClassicBridge)
    }

    pub fn relation(&self) -> &Relation {
        &self.0
    }

    pub fn into_relation(self) -> Relation {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Group key → member item keys.
    pub fn groups(&self) -> BTreeMap<&Value, BTreeSet<&Value>> {
        let mut groups: BTreeMap<&Value, BTreeSet<&Value>> = BTreeMap::new();
        for row in self.0.rows() {
            groups.entry(&row[0]).or_default().insert(&row[1]);
        }
        groups
    }

    /// Drops rows whose item is not in `universe`; returns the kept bridge
    /// and the number of dropped rows.
    pub fn retain_known_items(&self, universe: &ItemUniverse) -> Result<(Self, usize)> {
        let schema = self.0.schema();
        let kept = Self::from_pairs(
            schema.attributes()[0].ty,
            schema.attributes()[1].ty,
            self.0
                .rows()
                .filter(|r| universe.index_of(&r[1]).is_some())
                .map(|r| (r[0].clone(), r[1].clone())),
        )?;
        let dropped = self.len() - kept.len();
        Ok((kept, dropped))
    }
}

/// The combinatorial form of a bridge, bound to the universe it was encoded
/// against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBridge {
    mode: Mode,
    rows: Relation,
    correspondence: Option<Relation>,
    universe_version: String,
}

fn correspondence_schema(group_ty: ValueType) -> Result<Schema> {
    Schema::new(
        vec![(GROUP_PK, group_ty), (GROUP_RANK, ValueType::Group)],
        &[GROUP_PK],
    )
}

fn direct_schema() -> Result<Schema> {
    Schema::new(vec![(GROUP_RANK, ValueType::Group)], &[GROUP_RANK])
}

fn require_rank_column(rel: &Relation) -> Result<()> {
    let ty = rel.schema().type_of(GROUP_RANK)?;
    if ty != ValueType::Group {
        return Err(Error::TypeMismatch {
            attribute: GROUP_RANK.into(),
            left: ValueType::Group.to_string(),
            right: ty.to_string(),
        });
    }
    Ok(())
}

impl CompressedBridge {
    /// Wraps a `G_rankc`-shaped relation: it must carry `Group_PK` and a
    /// group-key `groupRank`; other group attributes are allowed.
    pub fn grouped(rows: Relation, universe_version: impl Into<String>) -> Result<Self> {
        require_rank_column(&rows)?;
        rows.schema().index_of(GROUP_PK)?;
        Ok(CompressedBridge {
            mode: Mode::Grouped,
            rows,
            correspondence: None,
            universe_version: universe_version.into(),
        })
    }

    /// Wraps a `B_rankc`-shaped relation, optionally with the
    /// `(Group_PK, groupRank)` sidecar produced at compression time.
    pub fn direct(
        rows: Relation,
        correspondence: Option<Relation>,
        universe_version: impl Into<String>,
    ) -> Result<Self> {
        require_rank_column(&rows)?;
        if let Some(c) = &correspondence {
            require_rank_column(c)?;
            c.schema().index_of(GROUP_PK)?;
        }
        Ok(CompressedBridge {
            mode: Mode::Direct,
            rows,
            correspondence,
            universe_version: universe_version.into(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The stored rows: `G_rankc` in grouped mode, `B_rankc` in direct mode.
    pub fn relation(&self) -> &Relation {
        &self.rows
    }

    /// `(Group_PK, groupRank)` pairs, when known.
    pub fn correspondence(&self) -> Option<Result<Relation>> {
        match self.mode {
            Mode::Grouped => Some(project(&self.rows, &[GROUP_PK, GROUP_RANK])),
            Mode::Direct => self.correspondence.clone().map(Ok),
        }
    }

    pub fn universe_version(&self) -> &str {
        &self.universe_version
    }

    /// Group keys of the stored rows, one per row.
    pub fn keys(&self) -> impl Iterator<Item = &GroupKey> {
        self.rows
            .column(GROUP_RANK)
            .expect("rank column checked at construction")
            .filter_map(Value::as_group)
    }

    /// Distinct `Group_PK` values that share a group key with an earlier
    /// group, i.e. groups with identical membership.
    pub fn mergeable_duplicates(&self) -> usize {
        let Some(Ok(corr)) = self.correspondence() else {
            return 0;
        };
        let distinct: BTreeSet<&Value> = corr.column(GROUP_RANK).expect("checked").collect();
        corr.len() - distinct.len()
    }
}

/// Ranks one group's item keys against `universe`.
pub fn encode_group<'a, I>(items: I, universe: &ItemUniverse) -> Result<GroupKey>
where
    I: IntoIterator<Item = &'a Value>,
{
    let indices = items
        .into_iter()
        .map(|item| {
            universe
                .index_of(item)
                .ok_or_else(|| Error::UnknownItem(item.to_string()))
        })
        .collect::<Result<Vec<u32>>>()?;
    let combination = Combination::from_unsorted(indices)?;
    let h: BigUint = rank_group(&combination, universe.size())?;
    GroupKey::new(h, combination.len())
}

/// Replaces every group's member rows by its `(h, k)` key.
pub fn compress_bridge(
    bridge: &ClassicBridge,
    universe: &ItemUniverse,
    mode: Mode,
) -> Result<CompressedBridge> {
    if bridge.is_empty() {
        return Err(Error::EmptyBridge);
    }
    let group_ty = bridge.relation().schema().attributes()[0].ty;
    let mut correspondence = Relation::new(correspondence_schema(group_ty)?);
    for (group, items) in bridge.groups() {
        let key = encode_group(items, universe)?;
        correspondence.insert(vec![group.clone(), Value::Group(key)])?;
    }
    let version = universe.version().to_string();
    match mode {
        Mode::Grouped => CompressedBridge::grouped(correspondence, version),
        Mode::Direct => {
            let rows = project(&correspondence, &[GROUP_RANK])?;
            let rows = Relation::from_rows(direct_schema()?, rows.rows().map(<[Value]>::to_vec))?;
            CompressedBridge::direct(rows, Some(correspondence), version)
        }
    }
}

/// Expands a compressed bridge back into `(group, item)` rows.
///
/// Grouped rows keep their `Group_PK`; direct rows are identified by their
/// group key.
pub fn decompress_bridge(
    compressed: &CompressedBridge,
    universe: &ItemUniverse,
) -> Result<ClassicBridge> {
    if compressed.universe_version() != universe.version() {
        return Err(Error::StaleUniverse {
            expected: compressed.universe_version().to_string(),
            found: universe.version().to_string(),
        });
    }
    let mut pairs = Vec::new();
    let group_ty = match compressed.mode() {
        Mode::Grouped => {
            let rel = compressed.relation();
            let g = rel.schema().index_of(GROUP_PK)?;
            let r = rel.schema().index_of(GROUP_RANK)?;
            for row in rel.rows() {
                let key = row[r].as_group().expect("typed column");
                for item in expand_group_key(key, universe)? {
                    pairs.push((row[g].clone(), item));
                }
            }
            rel.schema().attributes()[g].ty
        }
        Mode::Direct => {
            for key in compressed.keys() {
                for item in expand_group_key(key, universe)? {
                    pairs.push((Value::Group(key.clone()), item));
                }
            }
            ValueType::Group
        }
    };
    ClassicBridge::from_pairs(group_ty, universe.key_type(), pairs)
}

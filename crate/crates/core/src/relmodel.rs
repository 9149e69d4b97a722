//! A small in-memory relational core: typed values, schemas with primary
//! keys, set-semantics relations, natural join and projection, plus the
//! item-universe dictionary that maps external item keys to dense indices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::combinat::UniverseSize;
use crate::{Error, GroupKey, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Int,
    Text,
    Group,
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueType::Int => "int",
            ValueType::Text => "text",
            ValueType::Group => "group-key",
        })
    }
}

/// A scalar cell.
///
/// The derived ordering ranks tags before payloads; it only serves canonical
/// row ordering. Columns are typed, so comparisons that matter (joins, keys)
/// never mix tags.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Text(String),
    Group(GroupKey),
}

impl Value {
    pub fn value_type(&self) -> ValueType {
        match self {
            Value::Int(_) => ValueType::Int,
            Value::Text(_) => ValueType::Text,
            Value::Group(_) => ValueType::Group,
        }
    }

    pub fn as_group(&self) -> Option<&GroupKey> {
        match self {
            Value::Group(key) => Some(key),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
            Value::Group(key) => write!(f, "{key}"),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<GroupKey> for Value {
    fn from(v: GroupKey) -> Self {
        Value::Group(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub ty: ValueType,
}

/// Ordered, typed attribute list with a primary key.
///
/// An empty key means every attribute is part of the key, i.e. plain set
/// semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    key: Vec<usize>,
}

impl Schema {
    pub fn new<S: Into<String>>(attributes: Vec<(S, ValueType)>, key: &[&str]) -> Result<Self> {
        let attributes: Vec<Attribute> = attributes
            .into_iter()
            .map(|(name, ty)| Attribute { name: name.into(), ty })
            .collect();
        let mut seen = BTreeSet::new();
        for attr in &attributes {
            if attr.name.is_empty() {
                return Err(Error::UnknownAttribute(String::new()));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::DuplicateAttribute(attr.name.clone()));
            }
        }
        let mut schema = Schema { attributes, key: Vec::new() };
        let mut key_idx = Vec::with_capacity(key.len());
        for name in key {
            let idx = schema.index_of(name)?;
            if key_idx.contains(&idx) {
                return Err(Error::DuplicateAttribute((*name).to_string()));
            }
            key_idx.push(idx);
        }
        schema.key = key_idx;
        Ok(schema)
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.position(name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn type_of(&self, name: &str) -> Result<ValueType> {
        Ok(self.attributes[self.index_of(name)?].ty)
    }

    /// Names of the declared key attributes (empty for set semantics).
    pub fn key_names(&self) -> Vec<&str> {
        self.key.iter().map(|&i| self.attributes[i].name.as_str()).collect()
    }

    fn key_of(&self, row: &[Value]) -> Vec<Value> {
        if self.key.is_empty() {
            row.to_vec()
        } else {
            self.key.iter().map(|&i| row[i].clone()).collect()
        }
    }

    fn check_row(&self, row: &[Value]) -> Result<()> {
        if row.len() != self.attributes.len() {
            return Err(Error::Arity {
                expected: self.attributes.len(),
                got: row.len(),
            });
        }
        for (attr, value) in self.attributes.iter().zip(row) {
            if value.value_type() != attr.ty {
                return Err(Error::TypeMismatch {
                    attribute: attr.name.clone(),
                    left: attr.ty.to_string(),
                    right: value.value_type().to_string(),
                });
            }
        }
        Ok(())
    }
}

/// A set of typed rows under a schema, ordered canonically by primary key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    schema: Schema,
    rows: BTreeMap<Vec<Value>, Vec<Value>>,
}

impl Relation {
    pub fn new(schema: Schema) -> Self {
        Relation {
            schema,
            rows: BTreeMap::new(),
        }
    }

    pub fn from_rows<I>(schema: Schema, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Value>>,
    {
        let mut rel = Relation::new(schema);
        for row in rows {
            rel.insert(row)?;
        }
        Ok(rel)
    }

    /// Adds a row. Returns `false` if the identical row was already present;
    /// a different row with the same key is a key violation.
    pub fn insert(&mut self, row: Vec<Value>) -> Result<bool> {
        self.schema.check_row(&row)?;
        let key = self.schema.key_of(&row);
        match self.rows.get(&key) {
            Some(existing) if *existing == row => Ok(false),
            Some(existing) => Err(Error::KeyViolation(format!(
                "key ({}) already holds ({})",
                join_values(&key),
                join_values(existing)
            ))),
            None => {
                self.rows.insert(key, row);
                Ok(true)
            }
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Value]> {
        self.rows.values().map(Vec::as_slice)
    }

    /// Values of one column, in row order.
    pub fn column<'a>(&'a self, name: &str) -> Result<impl Iterator<Item = &'a Value> + 'a> {
        let idx = self.schema.index_of(name)?;
        Ok(self.rows.values().map(move |row| &row[idx]))
    }

    /// The rows as a set of tuples laid out in the given attribute order.
    pub fn row_set(&self, order: &[&str]) -> Result<BTreeSet<Vec<Value>>> {
        let idx = order
            .iter()
            .map(|name| self.schema.index_of(name))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .rows()
            .map(|row| idx.iter().map(|&i| row[i].clone()).collect())
            .collect())
    }

    /// Same attribute names and the same rows, ignoring column order.
    pub fn same_content(&self, other: &Relation) -> bool {
        let mine: BTreeSet<&str> = self.schema.names().collect();
        let theirs: BTreeSet<&str> = other.schema.names().collect();
        if mine != theirs {
            return false;
        }
        let order: Vec<&str> = self.schema.names().collect();
        match (self.row_set(&order), other.row_set(&order)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

fn join_values(values: &[Value]) -> String {
    values.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
}

/// Natural join: rows of `r` and `s` agreeing on every shared attribute.
/// Without shared attributes this is the Cartesian product.
pub fn natural_join(r: &Relation, s: &Relation) -> Result<Relation> {
    let mut shared = Vec::new();
    for (ri, attr) in r.schema.attributes.iter().enumerate() {
        if let Some(si) = s.schema.position(&attr.name) {
            let other = s.schema.attributes[si].ty;
            if other != attr.ty {
                return Err(Error::TypeMismatch {
                    attribute: attr.name.clone(),
                    left: attr.ty.to_string(),
                    right: other.to_string(),
                });
            }
            shared.push((ri, si));
        }
    }
    let s_extra: Vec<usize> = (0..s.schema.len())
        .filter(|si| !shared.iter().any(|&(_, x)| x == *si))
        .collect();

    let mut attributes: Vec<(String, ValueType)> = r
        .schema
        .attributes
        .iter()
        .map(|a| (a.name.clone(), a.ty))
        .collect();
    attributes.extend(
        s_extra
            .iter()
            .map(|&i| (s.schema.attributes[i].name.clone(), s.schema.attributes[i].ty)),
    );
    let mut out = Relation::new(Schema::new(attributes, &[])?);

    let mut index: HashMap<Vec<&Value>, Vec<&[Value]>> = HashMap::new();
    for row in s.rows() {
        let probe = shared.iter().map(|&(_, si)| &row[si]).collect();
        index.entry(probe).or_default().push(row);
    }
    for left in r.rows() {
        let probe: Vec<&Value> = shared.iter().map(|&(ri, _)| &left[ri]).collect();
        let Some(matches) = index.get(&probe) else {
            continue;
        };
        for right in matches {
            let mut row = left.to_vec();
            row.extend(s_extra.iter().map(|&i| right[i].clone()));
            out.insert(row)?;
        }
    }
    Ok(out)
}

/// Set-semantics projection onto `attrs`, in the given order.
pub fn project(r: &Relation, attrs: &[&str]) -> Result<Relation> {
    let idx = attrs
        .iter()
        .map(|name| r.schema.index_of(name))
        .collect::<Result<Vec<_>>>()?;
    let schema = Schema::new(
        idx.iter()
            .map(|&i| (r.schema.attributes[i].name.clone(), r.schema.attributes[i].ty))
            .collect(),
        &[],
    )?;
    Relation::from_rows(
        schema,
        r.rows().map(|row| idx.iter().map(|&i| row[i].clone()).collect()),
    )
}

/// The frozen, ascending dictionary of item keys against which group ranks
/// are minted. Dense indices run `1..=n` in key order.
///
/// Adding or removing an item changes [`ItemUniverse::version`]; keys minted
/// against one version must be re-encoded for another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemUniverse {
    key_attribute: String,
    key_type: ValueType,
    keys: Vec<Value>,
    forward: BTreeMap<Value, u32>,
    version: String,
}

impl ItemUniverse {
    /// Builds a universe from distinct keys of one type, in any order.
    pub fn from_keys(key_attribute: impl Into<String>, mut keys: Vec<Value>) -> Result<Self> {
        let first = keys.first().ok_or(Error::EmptyUniverse)?;
        let key_type = first.value_type();
        if let Some(odd) = keys.iter().find(|k| k.value_type() != key_type) {
            return Err(Error::TypeMismatch {
                attribute: "item key".into(),
                left: key_type.to_string(),
                right: odd.value_type().to_string(),
            });
        }
        if keys.len() > u32::MAX as usize {
            return Err(Error::UniverseTooLarge {
                n: keys.len(),
                limit: u32::MAX as usize,
            });
        }
        keys.sort();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateKey(w[0].to_string()));
        }
        let forward = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i as u32 + 1))
            .collect();
        let version = fingerprint(&keys);
        Ok(ItemUniverse {
            key_attribute: key_attribute.into(),
            key_type,
            keys,
            forward,
            version,
        })
    }

    pub fn size(&self) -> UniverseSize {
        UniverseSize::new(self.keys.len() as u32).expect("universe is non-empty")
    }

    pub fn n(&self) -> u32 {
        self.keys.len() as u32
    }

    pub fn key_attribute(&self) -> &str {
        &self.key_attribute
    }

    pub fn key_type(&self) -> ValueType {
        self.key_type
    }

    /// Item keys in ascending order; `keys()[d - 1]` has dense index `d`.
    pub fn keys(&self) -> &[Value] {
        &self.keys
    }

    pub fn index_of(&self, key: &Value) -> Option<u32> {
        self.forward.get(key).copied()
    }

    pub fn key_at(&self, index: u32) -> Option<&Value> {
        index
            .checked_sub(1)
            .and_then(|i| self.keys.get(i as usize))
    }

    /// Content fingerprint; equal universes share it.
    pub fn version(&self) -> &str {
        &self.version
    }
}

fn fingerprint(keys: &[Value]) -> String {
    let mut hasher = Sha256::new();
    for key in keys {
        let (tag, body) = match key {
            Value::Int(v) => (b'i', v.to_string()),
            Value::Text(v) => (b't', v.clone()),
            Value::Group(v) => (b'g', v.to_string()),
        };
        hasher.update([tag]);
        hasher.update((body.len() as u64).to_le_bytes());
        hasher.update(body.as_bytes());
    }
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the universe from the distinct values of `key_attribute` in
/// `items`.
pub fn build_universe(items: &Relation, key_attribute: &str) -> Result<ItemUniverse> {
    let keys: Vec<Value> = items.column(key_attribute)?.cloned().collect();
    ItemUniverse::from_keys(key_attribute, keys)
}

//! Universe manifest: a header line `n=<count>` followed by one item key per
//! line in ascending order. Line `j + 1` holds the key with dense index `j`.

use std::fs;
use std::path::Path;

use crate::relmodel::{ItemUniverse, Value, ValueType};
use crate::{CsvErrorKind, Error, Result};

use super::csvio::write_atomic;

pub fn render_manifest(universe: &ItemUniverse) -> Result<String> {
    let mut out = format!("n={}\n", universe.n());
    for key in universe.keys() {
        let text = match key {
            Value::Int(v) => v.to_string(),
            Value::Text(t) if !t.is_empty() && !t.contains(['\n', '\r']) => t.clone(),
            other => {
                return Err(Error::TypeMismatch {
                    attribute: universe.key_attribute().to_string(),
                    left: "single-line int or text key".into(),
                    right: format!("{:?}", other),
                })
            }
        };
        out.push_str(&text);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_universe_manifest(universe: &ItemUniverse, path: &Path) -> Result<()> {
    write_atomic(path, render_manifest(universe)?.as_bytes())
}

/// Parses manifest text. Keys are `int` when every line is a canonical
/// integer, unless `key_type` says otherwise.
pub fn parse_manifest(
    text: &str,
    source: &Path,
    key_attribute: &str,
    key_type: Option<ValueType>,
) -> Result<ItemUniverse> {
    let err = |line: usize, kind| Error::Csv {
        path: source.to_path_buf(),
        line: Some(line as u64),
        kind,
    };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| err(1, CsvErrorKind::MissingHeader))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| err(1, CsvErrorKind::Syntax(format!("expected `n=<count>`, found `{header}`"))))?;
    let raw: Vec<&str> = lines.collect();
    if raw.len() != n {
        return Err(err(
            raw.len() + 1,
            CsvErrorKind::Syntax(format!("header declares {n} keys, file has {}", raw.len())),
        ));
    }
    let ty = key_type.unwrap_or_else(|| {
        if !raw.is_empty() && raw.iter().all(|l| l.parse::<i64>().is_ok_and(|v| v.to_string() == *l)) {
            ValueType::Int
        } else {
            ValueType::Text
        }
    });
    let mut keys = Vec::with_capacity(n);
    for (j, line) in raw.iter().enumerate() {
        let value = match ty {
            ValueType::Int => line
                .parse()
                .map(Value::Int)
                .map_err(|_| err(j + 2, CsvErrorKind::BadValue(format!("`{line}` is not an integer"))))?,
            ValueType::Text if !line.is_empty() => Value::Text(line.to_string()),
            _ => return Err(err(j + 2, CsvErrorKind::BadValue(format!("unusable item key `{line}`")))),
        };
        if keys.last().is_some_and(|prev| prev >= &value) {
            return Err(err(j + 2, CsvErrorKind::BadValue(format!("key `{line}` is not in ascending order"))));
        }
        keys.push(value);
    }
    ItemUniverse::from_keys(key_attribute, keys)
}

pub fn read_universe_manifest(
    path: &Path,
    key_attribute: &str,
    key_type: Option<ValueType>,
) -> Result<ItemUniverse> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_manifest(&text, path, key_attribute, key_type)
}

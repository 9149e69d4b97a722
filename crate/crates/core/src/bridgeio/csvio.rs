//! UTF-8 CSV with a header row. Column types come from a [`SchemaHint`] or
//! are inferred: a column is `int` if every cell is a canonical `i64`,
//! `group-key` if every cell is a canonical `h:k`, and `text` otherwise.
//! Rows are written in canonical (primary-key) order.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::relmodel::{Relation, Schema, Value, ValueType};
use crate::{CsvErrorKind, Error, GroupKey, Result};

/// Optional column types and primary key for [`read_relation_csv`].
#[derive(Debug, Clone, Default)]
pub struct SchemaHint {
    types: HashMap<String, ValueType>,
    key: Vec<String>,
}

impl SchemaHint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_type(mut self, attribute: impl Into<String>, ty: ValueType) -> Self {
        self.types.insert(attribute.into(), ty);
        self
    }

    pub fn with_key(mut self, key: &[&str]) -> Self {
        self.key = key.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Hint reproducing `schema` exactly.
    pub fn from_schema(schema: &Schema) -> Self {
        let mut hint = SchemaHint::new();
        for attr in schema.attributes() {
            hint = hint.with_type(attr.name.clone(), attr.ty);
        }
        hint.with_key(&schema.key_names())
    }
}

fn csv_error(path: &Path, line: Option<u64>, kind: CsvErrorKind) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        line,
        kind,
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn is_canonical_int(cell: &str) -> bool {
    cell.parse::<i64>().is_ok_and(|v| v.to_string() == cell)
}

fn infer_type<'a>(mut cells: impl Iterator<Item = &'a str> + Clone) -> ValueType {
    if cells.clone().next().is_none() {
        ValueType::Text
    } else if cells.clone().all(is_canonical_int) {
        ValueType::Int
    } else if cells.all(|c| c.parse::<GroupKey>().is_ok()) {
        ValueType::Group
    } else {
        ValueType::Text
    }
}

fn parse_cell(cell: &str, ty: ValueType) -> std::result::Result<Value, String> {
    match ty {
        ValueType::Text => Ok(Value::Text(cell.to_string())),
        ValueType::Int => cell
            .parse()
            .map(Value::Int)
            .map_err(|_| format!("`{cell}` is not an integer")),
        ValueType::Group => cell
            .parse::<GroupKey>()
            .map(Value::Group)
            .map_err(|e| e.to_string()),
    }
}

pub fn read_relation_csv(path: &Path, hint: &SchemaHint) -> Result<Relation> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    read_relation_from(file, path, hint)
}

/// Reads a relation from any reader; `source` names it in diagnostics.
pub fn read_relation_from<R: Read>(reader: R, source: &Path, hint: &SchemaHint) -> Result<Relation> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(csv_error(source, Some(1), CsvErrorKind::MissingHeader)),
        Some(r) => r.map_err(|e| from_csv(source, e))?,
    };
    let header_line = header.position().map(|p| p.line());
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    let mut seen = BTreeSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(csv_error(
                source,
                header_line,
                CsvErrorKind::DuplicateHeader(name.clone()),
            ));
        }
    }

    let mut data = Vec::new();
    for record in records {
        let record = record.map_err(|e| from_csv(source, e))?;
        let line = record.position().map(|p| p.line());
        if record.len() != names.len() {
            return Err(csv_error(
                source,
                line,
                CsvErrorKind::Ragged {
                    expected: names.len(),
                    found: record.len(),
                },
            ));
        }
        data.push((line, record));
    }

    let types: Vec<ValueType> = names
        .iter()
        .enumerate()
        .map(|(c, name)| match hint.types.get(name) {
            Some(&ty) => ty,
            None => infer_type(data.iter().map(move |(_, r)| &r[c])),
        })
        .collect();
    let key: Vec<&str> = hint.key.iter().map(String::as_str).collect();
    let schema = Schema::new(names.iter().cloned().zip(types.iter().copied()).collect(), &key)
        .map_err(|e| csv_error(source, header_line, CsvErrorKind::Syntax(e.to_string())))?;

    let mut relation = Relation::new(schema);
    for (line, record) in data {
        let row = record
            .iter()
            .zip(&types)
            .map(|(cell, &ty)| parse_cell(cell, ty))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|msg| csv_error(source, line, CsvErrorKind::BadValue(msg)))?;
        relation.insert(row).map_err(|e| match e {
            Error::KeyViolation(msg) => csv_error(source, line, CsvErrorKind::KeyViolation(msg)),
            other => csv_error(source, line, CsvErrorKind::BadValue(other.to_string())),
        })?;
    }
    Ok(relation)
}

fn from_csv(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => io_error(path, e),
        csv::ErrorKind::Utf8 { err, .. } => {
            csv_error(path, line, CsvErrorKind::Syntax(format!("invalid UTF-8: {err}")))
        }
        other => csv_error(path, line, CsvErrorKind::Syntax(format!("{other:?}"))),
    }
}

/// Writes `relation` as CSV in canonical row order.
pub fn write_relation_to<W: Write>(relation: &Relation, writer: W) -> std::io::Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    wtr.write_record(relation.schema().names())?;
    for row in relation.rows() {
        wtr.write_record(row.iter().map(Value::to_string))?;
    }
    wtr.flush()
}

pub fn write_relation_csv(relation: &Relation, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_relation_to(relation, &mut buf).map_err(|e| io_error(path, e))?;
    write_atomic(path, &buf)
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir: PathBuf = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

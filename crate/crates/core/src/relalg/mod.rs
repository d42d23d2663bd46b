//! In-memory relational algebra with set semantics.
//!
//! Tables are finite *sets* of rows over named, typed columns. This follows
//! the formal definitions rather than the SQL bag model: every operator
//! deduplicates at its boundary, and counting correctness relies on explicit
//! counter columns instead of row multiplicity.
//!
//! Values are either 64-bit integers (booleans, bounded integers, measures)
//! or arbitrary-precision non-negative counters. Rows are stored
//! positionally, aligned with the owning table's column list, and are cheap
//! to share between tables.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

mod expr;
mod ops;

pub use expr::{AggKind, Aggregate, Formula, ValueExpr};
pub use ops::{
    cross_join, extended_project, group_aggregate, natural_join, project, rename, select,
    theta_join,
};

/// Errors raised by table construction and the algebra operators.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelalgError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("rename target `{0}` collides with another column")]
    RenameCollision(String),
    #[error("row has {got} values but the table has {want} columns")]
    ArityMismatch { got: usize, want: usize },
    #[error("value {value} outside the domain of column `{column}`")]
    ValueOutsideDomain { column: String, value: String },
    #[error("overlapping column `{0}` in cross join")]
    OverlappingColumn(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("integer overflow while evaluating `{0}`")]
    Overflow(String),
}

/// Domain of a column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Exactly the values 0 and 1.
    Bool,
    /// Integers in `lo..=hi`.
    BoundedInt { lo: i64, hi: i64 },
    /// Unbounded non-negative integer (arbitrary precision).
    Counter,
    /// Signed integer used for costs and cardinalities.
    Measure,
}

impl Domain {
    pub fn admits(&self, value: &Value) -> bool {
        match (self, value) {
            (Domain::Bool, Value::Int(x)) => *x == 0 || *x == 1,
            (Domain::BoundedInt { lo, hi }, Value::Int(x)) => lo <= x && x <= hi,
            (Domain::Measure, Value::Int(_)) => true,
            (Domain::Counter, Value::Count(_)) => true,
            _ => false,
        }
    }
}

/// A named, typed column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub domain: Domain,
}

impl Column {
    pub fn new(name: impl Into<String>, domain: Domain) -> Self {
        Column {
            name: name.into(),
            domain,
        }
    }

    pub fn boolean(name: impl Into<String>) -> Self {
        Column::new(name, Domain::Bool)
    }

    pub fn counter(name: impl Into<String>) -> Self {
        Column::new(name, Domain::Counter)
    }

    pub fn measure(name: impl Into<String>) -> Self {
        Column::new(name, Domain::Measure)
    }
}

/// A single cell value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Count(BigUint),
}

impl Value {
    pub fn as_int(&self) -> Result<i64, RelalgError> {
        match self {
            Value::Int(x) => Ok(*x),
            Value::Count(_) => Err(RelalgError::Type("expected integer, found counter".into())),
        }
    }

    pub fn as_count(&self) -> Result<&BigUint, RelalgError> {
        match self {
            Value::Count(c) => Ok(c),
            Value::Int(_) => Err(RelalgError::Type("expected counter, found integer".into())),
        }
    }

    fn eq_const(&self, d: i64) -> bool {
        match self {
            Value::Int(x) => *x == d,
            Value::Count(c) => d >= 0 && *c == BigUint::from(d as u64),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(x) => write!(f, "{x}"),
            Value::Count(c) => write!(f, "{c}"),
        }
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<BigUint> for Value {
    fn from(c: BigUint) -> Self {
        Value::Count(c)
    }
}

/// An immutable row; values are positional with respect to the owning
/// table's column list. Cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row(Arc<[Value]>);

impl Row {
    pub fn new(values: Vec<Value>) -> Self {
        Row(values.into())
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn get(&self, idx: usize) -> &Value {
        &self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A set of rows over a fixed column list.
///
/// Construction validates column uniqueness, row arity and domain
/// membership, and collapses duplicate rows. Iteration order is the
/// (deduplicated) insertion order; use [`Table::canonical_rows`] for a
/// deterministic order.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<Column>,
    rows: Vec<Row>,
}

impl Table {
    pub fn new(columns: Vec<Column>, rows: Vec<Row>) -> Result<Table, RelalgError> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.clone()) {
                return Err(RelalgError::DuplicateColumn(c.name.clone()));
            }
        }
        let mut t = Table {
            columns,
            rows: Vec::new(),
        };
        let mut dedup = HashSet::new();
        for row in rows {
            t.check_row(&row)?;
            if dedup.insert(row.clone()) {
                t.rows.push(row);
            }
        }
        Ok(t)
    }

    /// The table with the given columns and no rows.
    pub fn empty(columns: Vec<Column>) -> Result<Table, RelalgError> {
        Table::new(columns, Vec::new())
    }

    /// The nullary table holding a single empty row (the unit of cross join).
    pub fn unit() -> Table {
        Table {
            columns: Vec::new(),
            rows: vec![Row::new(Vec::new())],
        }
    }

    fn check_row(&self, row: &Row) -> Result<(), RelalgError> {
        if row.len() != self.columns.len() {
            return Err(RelalgError::ArityMismatch {
                got: row.len(),
                want: self.columns.len(),
            });
        }
        for (col, v) in self.columns.iter().zip(row.values()) {
            if !col.domain.admits(v) {
                return Err(RelalgError::ValueOutsideDomain {
                    column: col.name.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, RelalgError> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| RelalgError::UnknownColumn(name.to_string()))
    }

    pub(crate) fn index_map(&self) -> HashMap<&str, usize> {
        self.columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.as_str(), i))
            .collect()
    }

    /// Rows sorted lexicographically over the declared column order. The
    /// order carries no semantic weight; it exists for deterministic
    /// serialization and table comparison.
    pub fn canonical_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| a.values().cmp(b.values()));
        rows
    }

    /// Debug serialization: one row per line, values space-separated in
    /// declared column order, rows in canonical order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in self.canonical_rows() {
            let mut first = true;
            for v in row.values() {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Set equality: same column names (any order) and the same row set.
    pub fn set_eq(&self, other: &Table) -> bool {
        if self.columns.len() != other.columns.len() || self.rows.len() != other.rows.len() {
            return false;
        }
        let perm: Option<Vec<usize>> = self
            .columns
            .iter()
            .map(|c| other.column_index(&c.name).ok())
            .collect();
        let Some(perm) = perm else { return false };
        let ours: HashSet<&[Value]> = self.rows.iter().map(|r| r.values()).collect();
        other.rows.iter().all(|r| {
            ours.contains(
                perm.iter()
                    .map(|&i| r.get(i).clone())
                    .collect::<Vec<_>>()
                    .as_slice(),
            )
        })
    }
}

/// Convenience for tests and oracles: build a table of `Int` values.
pub fn table_of_ints(columns: Vec<Column>, rows: &[&[i64]]) -> Result<Table, RelalgError> {
    let rows = rows
        .iter()
        .map(|vals| Row::new(vals.iter().map(|&v| Value::Int(v)).collect()))
        .collect();
    Table::new(columns, rows)
}

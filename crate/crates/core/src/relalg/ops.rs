//! The relational operators.
//!
//! All operators are pure: they borrow their inputs and build new tables.
//! Outputs are deduplicated (set semantics). `theta_join` is definitionally
//! `select . cross_join` but takes an equality-hash fast path whenever the
//! predicate contains cross-side equality conjuncts, so callers never pay
//! for a materialized cross product on equi-joins.

use std::collections::{HashMap, HashSet};

use super::expr::{accumulate, AggKind, Aggregate, BoundFormula, Formula, ValueExpr};
use super::{Column, RelalgError, Row, Table, Value};

/// Rename columns of `t` according to `mapping` (old name, new name).
///
/// Columns not mentioned keep their names, so partial maps extend to the
/// identity; the resulting names must be pairwise distinct. Domains are
/// carried over unchanged.
pub fn rename(t: &Table, mapping: &[(String, String)]) -> Result<Table, RelalgError> {
    let mut map = HashMap::new();
    for (old, new) in mapping {
        t.column_index(old)?;
        if map.insert(old.as_str(), new.as_str()).is_some() {
            return Err(RelalgError::DuplicateColumn(old.clone()));
        }
    }
    let mut names = HashSet::new();
    let columns: Vec<Column> = t
        .columns()
        .iter()
        .map(|c| Column {
            name: map
                .get(c.name.as_str())
                .map_or_else(|| c.name.clone(), |s| s.to_string()),
            domain: c.domain.clone(),
        })
        .collect();
    for c in &columns {
        if !names.insert(c.name.clone()) {
            return Err(RelalgError::RenameCollision(c.name.clone()));
        }
    }
    Ok(Table {
        columns,
        rows: t.rows().to_vec(),
    })
}

/// Keep exactly the rows satisfying `phi`; columns unchanged.
pub fn select(t: &Table, phi: &Formula) -> Result<Table, RelalgError> {
    let bound = phi.bind(&t.index_map())?;
    let rows = t
        .rows()
        .iter()
        .filter(|r| bound.eval(r.values()))
        .cloned()
        .collect();
    Ok(Table {
        columns: t.columns().to_vec(),
        rows,
    })
}

/// Cross join of two tables with disjoint column sets.
pub fn cross_join(t1: &Table, t2: &Table) -> Result<Table, RelalgError> {
    check_disjoint(t1, t2)?;
    let columns: Vec<Column> = t1.columns().iter().chain(t2.columns()).cloned().collect();
    let mut rows = Vec::with_capacity(t1.len() * t2.len());
    for r1 in t1.rows() {
        for r2 in t2.rows() {
            rows.push(concat_rows(r1, r2));
        }
    }
    // Disjoint inputs cannot produce duplicates, so no dedup pass is needed.
    Ok(Table { columns, rows })
}

fn check_disjoint(t1: &Table, t2: &Table) -> Result<(), RelalgError> {
    let left: HashSet<&str> = t1.column_names().collect();
    for name in t2.column_names() {
        if left.contains(name) {
            return Err(RelalgError::OverlappingColumn(name.to_string()));
        }
    }
    Ok(())
}

fn concat_rows(r1: &Row, r2: &Row) -> Row {
    let mut values = Vec::with_capacity(r1.len() + r2.len());
    values.extend_from_slice(r1.values());
    values.extend_from_slice(r2.values());
    Row::new(values)
}

/// θ-join: `select(cross_join(t1, t2), phi)`.
///
/// Cross-side equality conjuncts of `phi` are executed as a hash join; the
/// remaining conjuncts are applied as a residual selection. The result is
/// identical to the definition.
pub fn theta_join(t1: &Table, t2: &Table, phi: &Formula) -> Result<Table, RelalgError> {
    check_disjoint(t1, t2)?;
    let columns: Vec<Column> = t1.columns().iter().chain(t2.columns()).cloned().collect();
    let left_idx = t1.index_map();
    let right_idx = t2.index_map();

    // Split phi into hashable equality pairs and a residual formula.
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let mut residual: Vec<Formula> = Vec::new();
    for conj in phi.conjuncts() {
        match &conj {
            Formula::EqCol(a, b) => {
                if let (Some(&i), Some(&j)) = (left_idx.get(a.as_str()), right_idx.get(b.as_str()))
                {
                    keys.push((i, j));
                    continue;
                }
                if let (Some(&i), Some(&j)) = (left_idx.get(b.as_str()), right_idx.get(a.as_str()))
                {
                    keys.push((i, j));
                    continue;
                }
                residual.push(conj);
            }
            _ => residual.push(conj),
        }
    }
    let residual = Formula::And(residual);
    let combined_idx: HashMap<&str, usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect();
    let bound_residual = residual.bind(&combined_idx)?;
    // Validate the full predicate against the combined layout up front, so
    // unknown columns surface even when they sit in the hashed part.
    phi.bind(&combined_idx)?;

    let mut rows = Vec::new();
    if keys.is_empty() {
        for r1 in t1.rows() {
            for r2 in t2.rows() {
                push_if(&mut rows, r1, r2, &bound_residual);
            }
        }
    } else {
        let mut by_key: HashMap<Vec<&Value>, Vec<&Row>> = HashMap::new();
        for r2 in t2.rows() {
            by_key
                .entry(keys.iter().map(|&(_, j)| r2.get(j)).collect())
                .or_default()
                .push(r2);
        }
        for r1 in t1.rows() {
            let probe: Vec<&Value> = keys.iter().map(|&(i, _)| r1.get(i)).collect();
            if let Some(matches) = by_key.get(&probe) {
                for r2 in matches {
                    push_if(&mut rows, r1, r2, &bound_residual);
                }
            }
        }
    }
    Ok(Table { columns, rows })
}

fn push_if(rows: &mut Vec<Row>, r1: &Row, r2: &Row, residual: &BoundFormula) {
    let row = concat_rows(r1, r2);
    if residual.eval(row.values()) {
        rows.push(row);
    }
}

/// Natural join: rows agreeing on all shared column names are merged; the
/// output carries `t1`'s columns followed by `t2`'s non-shared columns.
///
/// Equivalent to renaming the shared columns of `t2` apart, θ-joining on
/// their equality and projecting the primed copies away.
pub fn natural_join(t1: &Table, t2: &Table) -> Result<Table, RelalgError> {
    let left_idx = t1.index_map();
    let mut shared: Vec<(usize, usize)> = Vec::new();
    let mut extra: Vec<usize> = Vec::new();
    for (j, c) in t2.columns().iter().enumerate() {
        match left_idx.get(c.name.as_str()) {
            Some(&i) => shared.push((i, j)),
            None => extra.push(j),
        }
    }
    let columns: Vec<Column> = t1
        .columns()
        .iter()
        .cloned()
        .chain(extra.iter().map(|&j| t2.columns()[j].clone()))
        .collect();

    let mut by_key: HashMap<Vec<&Value>, Vec<&Row>> = HashMap::new();
    for r2 in t2.rows() {
        by_key
            .entry(shared.iter().map(|&(_, j)| r2.get(j)).collect())
            .or_default()
            .push(r2);
    }
    let mut rows = Vec::new();
    for r1 in t1.rows() {
        let probe: Vec<&Value> = shared.iter().map(|&(i, _)| r1.get(i)).collect();
        if let Some(matches) = by_key.get(&probe) {
            for r2 in matches {
                let mut values = r1.values().to_vec();
                values.extend(extra.iter().map(|&j| r2.get(j).clone()));
                rows.push(Row::new(values));
            }
        }
    }
    dedup(Table { columns, rows })
}

/// Project to the given columns; duplicates collapse.
pub fn project(t: &Table, keep: &[&str]) -> Result<Table, RelalgError> {
    let indices: Vec<usize> = keep
        .iter()
        .map(|name| t.column_index(name))
        .collect::<Result<_, _>>()?;
    let columns: Vec<Column> = indices.iter().map(|&i| t.columns()[i].clone()).collect();
    let rows = t
        .rows()
        .iter()
        .map(|r| Row::new(indices.iter().map(|&i| r.get(i).clone()).collect()))
        .collect();
    dedup(Table { columns, rows })
}

/// Extended projection: keep the columns in `keep` and add one computed
/// column per `(column, expression)` pair; duplicates collapse.
pub fn extended_project(
    t: &Table,
    keep: &[&str],
    compute: &[(Column, ValueExpr)],
) -> Result<Table, RelalgError> {
    let indices: Vec<usize> = keep
        .iter()
        .map(|name| t.column_index(name))
        .collect::<Result<_, _>>()?;
    let index = t.index_map();
    let bound: Vec<_> = compute
        .iter()
        .map(|(_, e)| e.bind(&index))
        .collect::<Result<Vec<_>, _>>()?;
    let columns: Vec<Column> = indices
        .iter()
        .map(|&i| t.columns()[i].clone())
        .chain(compute.iter().map(|(c, _)| c.clone()))
        .collect();
    let mut rows = Vec::with_capacity(t.len());
    for r in t.rows() {
        let mut values: Vec<Value> = indices.iter().map(|&i| r.get(i).clone()).collect();
        for b in &bound {
            values.push(b.eval(r.values())?);
        }
        rows.push(Row::new(values));
    }
    Table::new(columns, rows)
}

/// Aggregation by grouping.
///
/// One output row per distinct projection of the input onto `group`,
/// carrying the group values plus the aggregates evaluated over all input
/// rows extending the group (the removed columns are still visible to the
/// aggregate arguments). Output columns are the group columns followed by
/// the aggregate columns in the given order.
pub fn group_aggregate(
    t: &Table,
    group: &[&str],
    outs: &[(Column, Aggregate)],
) -> Result<Table, RelalgError> {
    let group_indices: Vec<usize> = group
        .iter()
        .map(|name| t.column_index(name))
        .collect::<Result<_, _>>()?;
    let index = t.index_map();
    let bound: Vec<(AggKind, _)> = outs
        .iter()
        .map(|(_, a)| Ok((a.kind, a.arg.bind(&index)?)))
        .collect::<Result<Vec<_>, RelalgError>>()?;
    for (c, _) in outs {
        if group.contains(&c.name.as_str()) {
            return Err(RelalgError::DuplicateColumn(c.name.clone()));
        }
    }

    let mut order: Vec<Vec<Value>> = Vec::new();
    let mut accs: HashMap<Vec<Value>, Vec<Value>> = HashMap::new();
    for r in t.rows() {
        let key: Vec<Value> = group_indices.iter().map(|&i| r.get(i).clone()).collect();
        let mut fresh = false;
        let entry = accs.entry(key.clone()).or_insert_with(|| {
            fresh = true;
            Vec::new()
        });
        if fresh {
            order.push(key);
            for (_, arg) in &bound {
                entry.push(arg.eval(r.values())?);
            }
        } else {
            for (slot, (kind, arg)) in entry.iter_mut().zip(&bound) {
                accumulate(*kind, slot, arg.eval(r.values())?)?;
            }
        }
    }

    let columns: Vec<Column> = group_indices
        .iter()
        .map(|&i| t.columns()[i].clone())
        .chain(outs.iter().map(|(c, _)| c.clone()))
        .collect();
    let mut rows = Vec::with_capacity(order.len());
    for key in order {
        let acc = accs.remove(&key).expect("group recorded");
        let mut values = key;
        values.extend(acc);
        rows.push(Row::new(values));
    }
    Table::new(columns, rows)
}

fn dedup(t: Table) -> Result<Table, RelalgError> {
    let mut seen = HashSet::new();
    let rows = t
        .rows
        .into_iter()
        .filter(|r| seen.insert(r.clone()))
        .collect();
    Ok(Table {
        columns: t.columns,
        rows,
    })
}

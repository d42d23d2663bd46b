//! Equality formulas, value expressions and aggregates.
//!
//! An equality formula is a Boolean combination of atoms `v = d` and
//! `v = v'` over column names; `v` abbreviates `v = 1` and `!v` abbreviates
//! `v = 0` for binary columns. A value expression computes one cell value
//! per row and may embed an equality formula as a 0/1 term.
//!
//! Both carry a `bind` step that resolves column names to positions once,
//! so per-row evaluation in operator inner loops is lookup-free.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use super::{RelalgError, Value};

/// Boolean expression over equality atoms on column values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// `column = constant`
    EqConst(String, i64),
    /// `column = column'`
    EqCol(String, String),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::EqConst(c, d) => write!(f, "{c}={d}"),
            Formula::EqCol(a, b) => write!(f, "{a}={b}"),
            Formula::And(fs) if fs.is_empty() => write!(f, "true"),
            Formula::Or(fs) if fs.is_empty() => write!(f, "false"),
            Formula::And(fs) => write_joined(f, fs, " & "),
            Formula::Or(fs) => write_joined(f, fs, " | "),
            Formula::Not(inner) => write!(f, "!({inner})"),
        }
    }
}

fn write_joined<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    parts: &[T],
    sep: &str,
) -> fmt::Result {
    write!(f, "(")?;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{p}")?;
    }
    write!(f, ")")
}

impl Formula {
    /// `v = 1` on a binary column.
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::EqConst(name.into(), 1)
    }

    /// `v = 0` on a binary column.
    pub fn not_var(name: impl Into<String>) -> Formula {
        Formula::EqConst(name.into(), 0)
    }

    /// The empty conjunction.
    pub fn tautology() -> Formula {
        Formula::And(Vec::new())
    }

    /// The empty disjunction.
    pub fn contradiction() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn is_tautology(&self) -> bool {
        matches!(self, Formula::And(fs) if fs.is_empty())
    }

    /// Conjunction, flattening nested `And`s.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Formula::And(flat)
        }
    }

    /// Top-level conjuncts of the formula.
    pub fn conjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::And(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }

    /// All column names referenced by the formula.
    pub fn columns(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_columns(&mut out);
        out
    }

    fn collect_columns(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::EqConst(c, _) => {
                out.insert(c.clone());
            }
            Formula::EqCol(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_columns(out);
                }
            }
            Formula::Not(f) => f.collect_columns(out),
        }
    }

    pub(crate) fn bind(&self, index: &HashMap<&str, usize>) -> Result<BoundFormula, RelalgError> {
        let resolve = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| RelalgError::UnknownColumn(name.to_string()))
        };
        Ok(match self {
            Formula::EqConst(c, d) => BoundFormula::EqConst(resolve(c)?, *d),
            Formula::EqCol(a, b) => BoundFormula::EqCol(resolve(a)?, resolve(b)?),
            Formula::And(fs) => {
                BoundFormula::And(fs.iter().map(|f| f.bind(index)).collect::<Result<_, _>>()?)
            }
            Formula::Or(fs) => {
                BoundFormula::Or(fs.iter().map(|f| f.bind(index)).collect::<Result<_, _>>()?)
            }
            Formula::Not(f) => BoundFormula::Not(Box::new(f.bind(index)?)),
        })
    }

    /// Evaluate against a row of the given table layout. Total: every leaf
    /// must reference a column of the layout.
    pub fn eval(&self, index: &HashMap<&str, usize>, row: &[Value]) -> Result<bool, RelalgError> {
        Ok(self.bind(index)?.eval(row))
    }
}

#[derive(Debug, Clone)]
pub(crate) enum BoundFormula {
    EqConst(usize, i64),
    EqCol(usize, usize),
    And(Vec<BoundFormula>),
    Or(Vec<BoundFormula>),
    Not(Box<BoundFormula>),
}

impl BoundFormula {
    pub(crate) fn eval(&self, row: &[Value]) -> bool {
        match self {
            BoundFormula::EqConst(i, d) => row[*i].eq_const(*d),
            BoundFormula::EqCol(i, j) => row[*i] == row[*j],
            BoundFormula::And(fs) => fs.iter().all(|f| f.eval(row)),
            BoundFormula::Or(fs) => fs.iter().any(|f| f.eval(row)),
            BoundFormula::Not(f) => !f.eval(row),
        }
    }
}

/// Arithmetic/Boolean expression over row values.
///
/// Integer arithmetic is checked; counter arithmetic is arbitrary
/// precision. Boolean connectives operate on 0/1 integers. The two kinds do
/// not mix implicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueExpr {
    Const(Value),
    Col(String),
    Add(Vec<ValueExpr>),
    Mul(Vec<ValueExpr>),
    Or(Vec<ValueExpr>),
    And(Vec<ValueExpr>),
    Not(Box<ValueExpr>),
    /// 0/1-valued embedded equality formula.
    Pred(Formula),
}

impl fmt::Display for ValueExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueExpr::Const(v) => write!(f, "{v}"),
            ValueExpr::Col(c) => write!(f, "{c}"),
            ValueExpr::Add(es) => write_joined(f, es, " + "),
            ValueExpr::Mul(es) => write_joined(f, es, " * "),
            ValueExpr::Or(es) => write_joined(f, es, " | "),
            ValueExpr::And(es) => write_joined(f, es, " & "),
            ValueExpr::Not(e) => write!(f, "!({e})"),
            // Iverson bracket: the 0/1 value of the embedded formula.
            ValueExpr::Pred(p) => write!(f, "[{p}]"),
        }
    }
}

impl ValueExpr {
    pub fn int(x: i64) -> ValueExpr {
        ValueExpr::Const(Value::Int(x))
    }

    pub fn count(c: u64) -> ValueExpr {
        ValueExpr::Const(Value::Count(BigUint::from(c)))
    }

    pub fn col(name: impl Into<String>) -> ValueExpr {
        ValueExpr::Col(name.into())
    }

    /// All column names referenced by the expression.
    pub fn columns(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_columns(&mut out);
        out
    }

    fn collect_columns(&self, out: &mut BTreeSet<String>) {
        match self {
            ValueExpr::Const(_) => {}
            ValueExpr::Col(c) => {
                out.insert(c.clone());
            }
            ValueExpr::Add(es) | ValueExpr::Mul(es) | ValueExpr::Or(es) | ValueExpr::And(es) => {
                for e in es {
                    e.collect_columns(out);
                }
            }
            ValueExpr::Not(e) => e.collect_columns(out),
            ValueExpr::Pred(f) => {
                out.extend(f.columns());
            }
        }
    }

    /// Replace every reference to `col` by `with`.
    pub fn substitute(&self, col: &str, with: &ValueExpr) -> ValueExpr {
        match self {
            ValueExpr::Const(v) => ValueExpr::Const(v.clone()),
            ValueExpr::Col(c) => {
                if c == col {
                    with.clone()
                } else {
                    ValueExpr::Col(c.clone())
                }
            }
            ValueExpr::Add(es) => {
                ValueExpr::Add(es.iter().map(|e| e.substitute(col, with)).collect())
            }
            ValueExpr::Mul(es) => {
                ValueExpr::Mul(es.iter().map(|e| e.substitute(col, with)).collect())
            }
            ValueExpr::Or(es) => {
                ValueExpr::Or(es.iter().map(|e| e.substitute(col, with)).collect())
            }
            ValueExpr::And(es) => {
                ValueExpr::And(es.iter().map(|e| e.substitute(col, with)).collect())
            }
            ValueExpr::Not(e) => ValueExpr::Not(Box::new(e.substitute(col, with))),
            ValueExpr::Pred(f) => ValueExpr::Pred(f.clone()),
        }
    }

    pub(crate) fn bind(&self, index: &HashMap<&str, usize>) -> Result<BoundExpr, RelalgError> {
        Ok(match self {
            ValueExpr::Const(v) => BoundExpr::Const(v.clone()),
            ValueExpr::Col(c) => BoundExpr::Col(
                *index
                    .get(c.as_str())
                    .ok_or_else(|| RelalgError::UnknownColumn(c.clone()))?,
            ),
            ValueExpr::Add(es) => {
                BoundExpr::Add(es.iter().map(|e| e.bind(index)).collect::<Result<_, _>>()?)
            }
            ValueExpr::Mul(es) => {
                BoundExpr::Mul(es.iter().map(|e| e.bind(index)).collect::<Result<_, _>>()?)
            }
            ValueExpr::Or(es) => {
                BoundExpr::Or(es.iter().map(|e| e.bind(index)).collect::<Result<_, _>>()?)
            }
            ValueExpr::And(es) => {
                BoundExpr::And(es.iter().map(|e| e.bind(index)).collect::<Result<_, _>>()?)
            }
            ValueExpr::Not(e) => BoundExpr::Not(Box::new(e.bind(index)?)),
            ValueExpr::Pred(f) => BoundExpr::Pred(f.bind(index)?),
        })
    }

    pub fn eval(&self, index: &HashMap<&str, usize>, row: &[Value]) -> Result<Value, RelalgError> {
        self.bind(index)?.eval(row)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum BoundExpr {
    Const(Value),
    Col(usize),
    Add(Vec<BoundExpr>),
    Mul(Vec<BoundExpr>),
    Or(Vec<BoundExpr>),
    And(Vec<BoundExpr>),
    Not(Box<BoundExpr>),
    Pred(BoundFormula),
}

impl BoundExpr {
    pub(crate) fn eval(&self, row: &[Value]) -> Result<Value, RelalgError> {
        match self {
            BoundExpr::Const(v) => Ok(v.clone()),
            BoundExpr::Col(i) => Ok(row[*i].clone()),
            BoundExpr::Add(es) => fold_arith(es, row, "+", |a, b| a.checked_add(b), |a, b| a + b),
            BoundExpr::Mul(es) => fold_arith(es, row, "*", |a, b| a.checked_mul(b), |a, b| a * b),
            BoundExpr::Or(es) => {
                for e in es {
                    if e.eval(row)?.as_int()? != 0 {
                        return Ok(Value::Int(1));
                    }
                }
                Ok(Value::Int(0))
            }
            BoundExpr::And(es) => {
                for e in es {
                    if e.eval(row)?.as_int()? == 0 {
                        return Ok(Value::Int(0));
                    }
                }
                Ok(Value::Int(1))
            }
            BoundExpr::Not(e) => Ok(Value::Int(if e.eval(row)?.as_int()? == 0 { 1 } else { 0 })),
            BoundExpr::Pred(f) => Ok(Value::Int(if f.eval(row) { 1 } else { 0 })),
        }
    }
}

fn fold_arith(
    es: &[BoundExpr],
    row: &[Value],
    op: &str,
    int_op: impl Fn(i64, i64) -> Option<i64>,
    count_op: impl Fn(BigUint, &BigUint) -> BigUint,
) -> Result<Value, RelalgError> {
    let mut acc: Option<Value> = None;
    for e in es {
        let v = e.eval(row)?;
        acc = Some(match acc {
            None => v,
            Some(Value::Int(a)) => {
                let b = v.as_int()?;
                Value::Int(int_op(a, b).ok_or_else(|| RelalgError::Overflow(op.to_string()))?)
            }
            Some(Value::Count(a)) => Value::Count(count_op(a, v.as_count()?)),
        });
    }
    // The empty sum is 0, the empty product 1; integers by convention.
    Ok(acc.unwrap_or(Value::Int(match op {
        "+" => 0,
        _ => 1,
    })))
}

/// Aggregate kinds usable in grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggKind {
    Sum,
    Min,
    Max,
}

/// An aggregate applied to a per-row expression within each group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub kind: AggKind,
    pub arg: ValueExpr,
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            AggKind::Sum => "SUM",
            AggKind::Min => "MIN",
            AggKind::Max => "MAX",
        };
        write!(f, "{kind}({})", self.arg)
    }
}

impl Aggregate {
    pub fn sum(arg: ValueExpr) -> Aggregate {
        Aggregate {
            kind: AggKind::Sum,
            arg,
        }
    }

    pub fn min(arg: ValueExpr) -> Aggregate {
        Aggregate {
            kind: AggKind::Min,
            arg,
        }
    }

    pub fn max(arg: ValueExpr) -> Aggregate {
        Aggregate {
            kind: AggKind::Max,
            arg,
        }
    }
}

pub(crate) fn accumulate(kind: AggKind, acc: &mut Value, v: Value) -> Result<(), RelalgError> {
    match kind {
        AggKind::Sum => {
            *acc = match (std::mem::replace(acc, Value::Int(0)), v) {
                (Value::Int(a), b) => Value::Int(
                    a.checked_add(b.as_int()?)
                        .ok_or_else(|| RelalgError::Overflow("SUM".into()))?,
                ),
                (Value::Count(a), b) => Value::Count(a + b.as_count()?),
            };
        }
        AggKind::Min => {
            if v < *acc {
                *acc = v;
            }
        }
        AggKind::Max => {
            if v > *acc {
                *acc = v;
            }
        }
    }
    Ok(())
}

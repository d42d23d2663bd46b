//! Model counting.
//!
//! Tables carry one boolean column per bag variable plus a counter `cnt`.
//! Introduction guesses a truth value and keeps rows satisfying the local
//! clauses; removal sums counters of rows that concur; joins multiply the
//! counters of agreeing rows. The root counter is the model count, times
//! two per free variable when those are counted.

use num_bigint::BigUint;
use num_traits::One;

use crate::decomp::TreeDecomposition;
use crate::engine::{var_col, EngineError, FreeVarMode, NodeCtx, ProblemBundle, SolutionKind};
use crate::instance::{CnfFormula, Graph, Var};
use crate::relalg::{Aggregate, Column, Formula, Row, Table, Value, ValueExpr};

use super::{clause_formula, covered_by, render_clauses, unchecked_local_clauses};

pub struct SharpSatBundle {
    formula: CnfFormula,
    graph: Graph,
    free: Vec<Var>,
}

impl SharpSatBundle {
    pub fn new(formula: CnfFormula) -> Self {
        let graph = formula.primal_graph();
        let free = formula.free_vars();
        SharpSatBundle {
            formula,
            graph,
            free,
        }
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }
}

impl ProblemBundle for SharpSatBundle {
    type NodePlan = ();

    fn name(&self) -> &'static str {
        "sharpsat"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn skip_item(&self, v: Var) -> bool {
        self.free.binary_search(&v).is_ok()
    }

    fn free_factor(&self) -> Option<u64> {
        Some(2)
    }

    fn plan(&self, td: &TreeDecomposition, _compressed: bool) -> Vec<()> {
        vec![(); td.len()]
    }

    fn base_aux(&self) -> Vec<Column> {
        vec![Column::counter("cnt")]
    }

    fn leaf_table(&self) -> Table {
        Table::new(
            vec![Column::counter("cnt")],
            vec![Row::new(vec![Value::Count(BigUint::one())])],
        )
        .expect("valid leaf table")
    }

    fn intro_table(&self, v: Var) -> Table {
        boolean_intro(v)
    }

    fn intro_filter(&self, ctx: &NodeCtx) -> Vec<Formula> {
        unchecked_local_clauses(&self.formula.clauses, ctx)
            .into_iter()
            .map(clause_formula)
            .collect()
    }

    fn join_add_cols(&self, _aux: &str, copies: &[String]) -> ValueExpr {
        ValueExpr::Mul(copies.iter().map(ValueExpr::col).collect())
    }

    fn rem_aggr(&self, _ctx: &NodeCtx, _plan: &()) -> Vec<(Column, Aggregate)> {
        vec![(
            Column::counter("cnt"),
            Aggregate::sum(ValueExpr::col("cnt")),
        )]
    }

    fn finalize(
        &self,
        root: &Table,
        free_count: u64,
        mode: FreeVarMode,
    ) -> Result<SolutionKind, EngineError> {
        let count = counting_root(root)?;
        Ok(SolutionKind::Count(scale_by_free(
            count, 2, free_count, mode,
        )))
    }

    fn local_summary(&self, ctx: &NodeCtx) -> String {
        let local: Vec<_> = self
            .formula
            .clauses
            .iter()
            .filter(|c| covered_by(ctx.bag, c.vars()))
            .collect();
        format!("phi_t = {}", render_clauses(&local))
    }
}

/// The {0,1} introduction table shared by the boolean-valued bundles.
pub(crate) fn boolean_intro(v: Var) -> Table {
    Table::new(
        vec![Column::boolean(var_col(v))],
        vec![Row::new(vec![Value::Int(0)]), Row::new(vec![Value::Int(1)])],
    )
    .expect("valid intro table")
}

/// Read the counter of the unique root row; the empty table counts zero.
pub(crate) fn counting_root(root: &Table) -> Result<BigUint, EngineError> {
    let idx = root
        .column_index("cnt")
        .map_err(|e| EngineError::Internal(format!("root table: {e}")))?;
    match root.rows() {
        [] => Ok(BigUint::ZERO),
        [row] => row
            .get(idx)
            .as_count()
            .cloned()
            .map_err(|e| EngineError::Internal(format!("root counter: {e}"))),
        rows => Err(EngineError::Internal(format!(
            "normalized root table has {} rows",
            rows.len()
        ))),
    }
}

pub(crate) fn scale_by_free(
    count: BigUint,
    factor: u64,
    free_count: u64,
    mode: FreeVarMode,
) -> BigUint {
    match mode {
        FreeVarMode::Count => count * BigUint::from(factor).pow(free_count as u32),
        FreeVarMode::Ignore => count,
    }
}

/// Read the measure of the unique root row; `None` for the empty table.
pub(crate) fn optimum_root(root: &Table, col: &str) -> Result<Option<i64>, EngineError> {
    let idx = root
        .column_index(col)
        .map_err(|e| EngineError::Internal(format!("root table: {e}")))?;
    match root.rows() {
        [] => Ok(None),
        [row] => row
            .get(idx)
            .as_int()
            .map(Some)
            .map_err(|e| EngineError::Internal(format!("root measure: {e}"))),
        rows => Err(EngineError::Internal(format!(
            "normalized root table has {} rows",
            rows.len()
        ))),
    }
}

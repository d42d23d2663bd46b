//! Minimum vertex cover.
//!
//! Tables carry a measure column `card` that accounts for removed vertices
//! only: introduction guesses membership and enforces coverage of local
//! edges, removal takes the minimum of `card` plus the removed membership
//! values, joins add the cardinalities of agreeing rows.

use crate::decomp::TreeDecomposition;
use crate::engine::{var_col, EngineError, FreeVarMode, NodeCtx, ProblemBundle, SolutionKind};
use crate::instance::{Graph, Var};
use crate::relalg::{Aggregate, Column, Formula, Row, Table, Value, ValueExpr};

use super::sharpsat::{boolean_intro, optimum_root};
use super::{render_edges, unchecked_local_edges};

pub struct VcBundle {
    graph: Graph,
}

impl VcBundle {
    pub fn new(graph: Graph) -> Self {
        VcBundle { graph }
    }
}

impl ProblemBundle for VcBundle {
    type NodePlan = ();

    fn name(&self) -> &'static str {
        "vc"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn plan(&self, td: &TreeDecomposition, _compressed: bool) -> Vec<()> {
        vec![(); td.len()]
    }

    fn base_aux(&self) -> Vec<Column> {
        vec![Column::measure("card")]
    }

    fn leaf_table(&self) -> Table {
        Table::new(
            vec![Column::measure("card")],
            vec![Row::new(vec![Value::Int(0)])],
        )
        .expect("valid leaf table")
    }

    fn intro_table(&self, v: Var) -> Table {
        boolean_intro(v)
    }

    fn intro_filter(&self, ctx: &NodeCtx) -> Vec<Formula> {
        unchecked_local_edges(&self.graph.local_edges(ctx.bag), ctx)
            .into_iter()
            .map(|(u, v)| Formula::Or(vec![Formula::var(var_col(u)), Formula::var(var_col(v))]))
            .collect()
    }

    fn join_add_cols(&self, _aux: &str, copies: &[String]) -> ValueExpr {
        ValueExpr::Add(copies.iter().map(ValueExpr::col).collect())
    }

    fn rem_aggr(&self, ctx: &NodeCtx, _plan: &()) -> Vec<(Column, Aggregate)> {
        let mut terms = vec![ValueExpr::col("card")];
        terms.extend(ctx.removed.iter().map(|&r| ValueExpr::col(var_col(r))));
        vec![(
            Column::measure("card"),
            Aggregate::min(ValueExpr::Add(terms)),
        )]
    }

    fn finalize(
        &self,
        root: &Table,
        _free_count: u64,
        _mode: FreeVarMode,
    ) -> Result<SolutionKind, EngineError> {
        match optimum_root(root, "card")? {
            Some(card) => Ok(SolutionKind::Optimum(card)),
            // The full vertex set always covers, so this cannot happen on
            // a decomposition that validated.
            None => Err(EngineError::Internal(
                "empty root table for vertex cover".into(),
            )),
        }
    }

    fn local_summary(&self, ctx: &NodeCtx) -> String {
        format!(
            "E(G_t) = {}",
            render_edges(&self.graph.local_edges(ctx.bag))
        )
    }
}

//! Counting proper o-colorings.
//!
//! Identical in shape to model counting, but the introduction table ranges
//! over the o color values and the local filter demands different colors on
//! the endpoints of every local edge. Isolated vertices are free items and
//! contribute a factor of o each.

use num_bigint::BigUint;
use num_traits::One;

use crate::decomp::TreeDecomposition;
use crate::engine::{var_col, EngineError, FreeVarMode, NodeCtx, ProblemBundle, SolutionKind};
use crate::instance::{Graph, Var};
use crate::relalg::{Aggregate, Column, Domain, Formula, Row, Table, Value, ValueExpr};

use super::sharpsat::{counting_root, scale_by_free};
use super::{render_edges, unchecked_local_edges};

pub struct ColBundle {
    graph: Graph,
    colors: u32,
    isolated: Vec<Var>,
}

impl ColBundle {
    /// Requires at least one color.
    pub fn new(graph: Graph, colors: u32) -> Self {
        assert!(colors >= 1, "coloring needs at least one color");
        let isolated = graph.isolated_vertices();
        ColBundle {
            graph,
            colors,
            isolated,
        }
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }
}

impl ProblemBundle for ColBundle {
    type NodePlan = ();

    fn name(&self) -> &'static str {
        "col"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn skip_item(&self, v: Var) -> bool {
        self.isolated.binary_search(&v).is_ok()
    }

    fn free_factor(&self) -> Option<u64> {
        Some(self.colors as u64)
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
        let domain = Domain::BoundedInt {
            lo: 0,
            hi: self.colors as i64 - 1,
        };
        let rows = (0..self.colors as i64)
            .map(|c| Row::new(vec![Value::Int(c)]))
            .collect();
        Table::new(vec![Column::new(var_col(v), domain)], rows).expect("valid intro table")
    }

    fn intro_filter(&self, ctx: &NodeCtx) -> Vec<Formula> {
        unchecked_local_edges(&self.graph.local_edges(ctx.bag), ctx)
            .into_iter()
            .map(|(u, v)| Formula::Not(Box::new(Formula::EqCol(var_col(u), var_col(v)))))
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
            count,
            self.colors as u64,
            free_count,
            mode,
        )))
    }

    fn local_summary(&self, ctx: &NodeCtx) -> String {
        format!(
            "E(G_t) = {}",
            render_edges(&self.graph.local_edges(ctx.bag))
        )
    }
}

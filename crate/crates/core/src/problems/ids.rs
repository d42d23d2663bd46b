//! Minimum independent dominating set.
//!
//! Besides the membership column, every bag vertex u carries a boolean
//! domination flag d_u: u is in the set or adjacent to a member.
//! Introduction seeds d_v with the membership value, rejects adjacent
//! members, and ORs every bag vertex's flag with its selected local
//! neighbors. Removal keeps only rows whose removed vertices are dominated,
//! groups by the surviving flags too, and takes the minimum cardinality.
//! Joins OR the flags and add the cards of agreeing rows.

use crate::decomp::TreeDecomposition;
use crate::engine::{var_col, EngineError, FreeVarMode, NodeCtx, ProblemBundle, SolutionKind};
use crate::instance::{Graph, Var};
use crate::relalg::{Aggregate, Column, Formula, Row, Table, Value, ValueExpr};

use super::sharpsat::optimum_root;
use super::{render_edges, unchecked_local_edges};

/// Column name of the domination flag of a vertex.
pub(crate) fn dom_col(v: Var) -> String {
    format!("d{v}")
}

pub struct IdsBundle {
    graph: Graph,
}

impl IdsBundle {
    pub fn new(graph: Graph) -> Self {
        IdsBundle { graph }
    }
}

impl ProblemBundle for IdsBundle {
    type NodePlan = ();

    fn name(&self) -> &'static str {
        "ids"
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

    fn var_aux(&self, v: Var) -> Vec<Column> {
        vec![Column::boolean(dom_col(v))]
    }

    fn leaf_table(&self) -> Table {
        Table::new(
            vec![Column::measure("card")],
            vec![Row::new(vec![Value::Int(0)])],
        )
        .expect("valid leaf table")
    }

    /// Membership and domination enter together: (0,0) and (1,1).
    fn intro_table(&self, v: Var) -> Table {
        Table::new(
            vec![Column::boolean(var_col(v)), Column::boolean(dom_col(v))],
            vec![
                Row::new(vec![Value::Int(0), Value::Int(0)]),
                Row::new(vec![Value::Int(1), Value::Int(1)]),
            ],
        )
        .expect("valid intro table")
    }

    fn intro_filter(&self, ctx: &NodeCtx) -> Vec<Formula> {
        unchecked_local_edges(&self.graph.local_edges(ctx.bag), ctx)
            .into_iter()
            .map(|(u, v)| {
                Formula::Or(vec![
                    Formula::not_var(var_col(u)),
                    Formula::not_var(var_col(v)),
                ])
            })
            .collect()
    }

    fn intro_add_cols(&self, ctx: &NodeCtx) -> Vec<(String, ValueExpr)> {
        ctx.bag
            .iter()
            .map(|&u| {
                let mut terms = vec![ValueExpr::col(dom_col(u))];
                for v in self.graph.neighbors(u) {
                    if ctx.bag.binary_search(&v).is_ok() {
                        terms.push(ValueExpr::col(var_col(v)));
                    }
                }
                (dom_col(u), ValueExpr::Or(terms))
            })
            .collect()
    }

    fn join_add_cols(&self, aux: &str, copies: &[String]) -> ValueExpr {
        if aux == "card" {
            ValueExpr::Add(copies.iter().map(ValueExpr::col).collect())
        } else {
            ValueExpr::Or(copies.iter().map(ValueExpr::col).collect())
        }
    }

    /// Removed vertices must be dominated by now.
    fn rem_filter(&self, ctx: &NodeCtx) -> Formula {
        Formula::And(
            ctx.removed
                .iter()
                .map(|&a| Formula::var(dom_col(a)))
                .collect(),
        )
    }

    fn rem_group_cols(&self, ctx: &NodeCtx) -> Vec<String> {
        ctx.kept.iter().map(|&u| dom_col(u)).collect()
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
            // A greedy maximal independent set always dominates, so a valid
            // graph cannot get here.
            None => Err(EngineError::Internal(
                "empty root table for independent dominating set".into(),
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

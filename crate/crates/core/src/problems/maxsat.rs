//! Partial MaxSAT: maximize satisfied soft clauses subject to the hard
//! clauses.
//!
//! Hard clauses are filtered exactly as in model counting. Every nonempty
//! soft clause is scored once, at its disposal node: the node where its
//! variables stop being visible. With parent-relevant compression that is
//! the top node of its covering subtree; in the literal pipeline it is that
//! node's parent, where the child's columns are still present before
//! grouping. Removal aggregates the maximum of `card` plus the disposed
//! clauses' per-row satisfaction; joins add the cards of agreeing rows. An
//! empty root table means the hard part is unsatisfiable.

use crate::decomp::TreeDecomposition;
use crate::engine::{EngineError, FreeVarMode, NodeCtx, ProblemBundle, SolutionKind};
use crate::instance::{Graph, PartialMaxSatInstance, Var};
use crate::relalg::{Aggregate, Column, Formula, Row, Table, Value, ValueExpr};

use super::sharpsat::{boolean_intro, optimum_root};
use super::{clause_formula, covered_by, render_clauses, unchecked_local_clauses};

pub struct MaxSatBundle {
    instance: PartialMaxSatInstance,
    graph: Graph,
}

impl MaxSatBundle {
    pub fn new(instance: PartialMaxSatInstance) -> Self {
        let graph = instance.primal_graph();
        MaxSatBundle { instance, graph }
    }

    pub fn instance(&self) -> &PartialMaxSatInstance {
        &self.instance
    }
}

impl ProblemBundle for MaxSatBundle {
    /// Indices of the soft clauses disposed at the node.
    type NodePlan = Vec<usize>;

    fn name(&self) -> &'static str {
        "maxsat"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn plan(&self, td: &TreeDecomposition, compressed: bool) -> Vec<Vec<usize>> {
        let mut disposal: Vec<Vec<usize>> = vec![Vec::new(); td.len()];
        for (i, soft) in self.instance.soft.iter().enumerate() {
            // The empty clause is never satisfiable and scores 0 wherever
            // it would be disposed; skip it.
            if soft.is_empty() {
                continue;
            }
            let top = top_covering_node(td, soft.vars()).unwrap_or_else(|| {
                panic!("soft clause {i} not covered by any bag of a valid decomposition")
            });
            let node = if compressed {
                top
            } else {
                td.node(top)
                    .parent
                    .expect("the normalized root bag is empty, so a covering node has a parent")
            };
            disposal[node].push(i);
        }
        disposal
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
        unchecked_local_clauses(&self.instance.hard.clauses, ctx)
            .into_iter()
            .map(clause_formula)
            .collect()
    }

    fn join_add_cols(&self, _aux: &str, copies: &[String]) -> ValueExpr {
        ValueExpr::Add(copies.iter().map(ValueExpr::col).collect())
    }

    fn rem_aggr(&self, _ctx: &NodeCtx, disposed: &Vec<usize>) -> Vec<(Column, Aggregate)> {
        let mut terms = vec![ValueExpr::col("card")];
        terms.extend(
            disposed
                .iter()
                .map(|&i| ValueExpr::Pred(clause_formula(&self.instance.soft[i]))),
        );
        vec![(
            Column::measure("card"),
            Aggregate::max(ValueExpr::Add(terms)),
        )]
    }

    fn node_scoring(&self, _ctx: &NodeCtx, disposed: &Vec<usize>) -> bool {
        !disposed.is_empty()
    }

    fn finalize(
        &self,
        root: &Table,
        _free_count: u64,
        _mode: FreeVarMode,
    ) -> Result<SolutionKind, EngineError> {
        match optimum_root(root, "card")? {
            Some(card) => Ok(SolutionKind::Optimum(card)),
            None => Ok(SolutionKind::Unsat),
        }
    }

    fn local_summary(&self, ctx: &NodeCtx) -> String {
        let hard: Vec<_> = self
            .instance
            .hard
            .clauses
            .iter()
            .filter(|c| covered_by(ctx.bag, c.vars()))
            .collect();
        let soft: Vec<_> = self
            .instance
            .soft
            .iter()
            .filter(|c| covered_by(ctx.bag, c.vars()))
            .collect();
        format!(
            "phi_t = {} psi_t = {}",
            render_clauses(&hard),
            render_clauses(&soft)
        )
    }
}

/// The highest node whose bag covers `vars`. The covering nodes of a clause
/// form a nonempty connected subtree, so the top is unique.
fn top_covering_node(
    td: &TreeDecomposition,
    vars: impl Iterator<Item = Var> + Clone,
) -> Option<usize> {
    (0..td.len()).find(|&t| {
        covered_by(&td.node(t).bag, vars.clone())
            && td
                .node(t)
                .parent
                .is_none_or(|p| !covered_by(&td.node(p).bag, vars.clone()))
    })
}

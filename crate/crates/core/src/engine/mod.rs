//! Generic DP driver over (non-nice) tree decompositions.
//!
//! A problem is plugged in as a [`ProblemBundle`]: a set of placeholder
//! functions that parameterize one merged per-node pipeline. For every node
//! the pipeline computes, in order: the θ-join of the child tables on their
//! shared bag columns (plus an optional extra join filter), a cross join
//! with the introduction table of every introduced item, the extended
//! projection merging child auxiliary columns and applying introduction
//! updates, the introduction filter, the removal filter, and finally
//! aggregation grouped by the columns that stay relevant, with the removal
//! summands evaluated while the removed columns are still present.
//!
//! In the default mode each node's table keeps only the columns relevant to
//! its parent, so an item is aggregated out at the highest node whose bag
//! contains it. Debug mode disables that compression and keeps the literal
//! child-bag-minus-bag removal rule, which reproduces the per-node tables
//! of the nice-TD table algorithms exactly; both modes yield the same
//! solution, and introduction-filter conjuncts are applied as soon as their
//! columns exist, which commutes with the remaining pipeline under set
//! semantics.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::decomp::{TdViolation, TreeDecomposition};
use crate::instance::{Graph, Var};
use crate::relalg::{self, Aggregate, Column, Formula, RelalgError, Table, ValueExpr};

mod scheduler;

/// Column name of a bag item.
pub fn var_col(v: Var) -> String {
    format!("v{v}")
}

fn suffixed(name: &str, child: usize) -> String {
    format!("{name}#{child}")
}

/// How declared-but-unconstrained items contribute to counting solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreeVarMode {
    /// Each free item multiplies the count by the bundle's free factor.
    #[default]
    Count,
    /// Free items are ignored.
    Ignore,
}

/// Final interpretation of the root table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionKind {
    Count(BigUint),
    Optimum(i64),
    Unsat,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolutionKind::Count(c) => write!(f, "s {c}"),
            SolutionKind::Optimum(o) => write!(f, "o {o}"),
            SolutionKind::Unsat => write!(f, "s UNSAT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid tree decomposition: {0}")]
    InvalidTd(#[from] TdViolation),
    #[error("tree decomposition root bag is not empty")]
    RootNotNormalized,
    #[error("node {node}: table would exceed the row capacity of {cap} rows")]
    Capacity { node: usize, cap: usize },
    #[error("node {node}: {source}")]
    Relalg { node: usize, source: RelalgError },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Engine knobs; `workers` and `row_cap` bound resources, `debug` turns on
/// tracing and the uncompressed literal pipeline.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub workers: usize,
    pub row_cap: usize,
    pub debug: bool,
    pub free_vars: FreeVarMode,
}

pub const DEFAULT_ROW_CAP: usize = 1 << 26;
pub const MAX_DEFAULT_WORKERS: usize = 24;

impl Default for EngineConfig {
    fn default() -> Self {
        let cores = std::thread::available_parallelism().map_or(1, |p| p.get());
        EngineConfig {
            workers: cores.min(MAX_DEFAULT_WORKERS),
            row_cap: DEFAULT_ROW_CAP,
            debug: false,
            free_vars: FreeVarMode::Count,
        }
    }
}

/// Static per-node context handed to the bundle placeholders.
#[derive(Debug)]
pub struct NodeCtx<'a> {
    pub node_id: usize,
    /// Bag items that participate in the DP (free items filtered out).
    pub bag: &'a [Var],
    /// Items whose columns first appear at this node.
    pub introduced: &'a [Var],
    /// Items aggregated out at this node.
    pub removed: &'a [Var],
    /// Items whose columns survive into this node's table.
    pub kept: &'a [Var],
    /// Active bags of the children, for coverage checks.
    pub child_bags: Vec<&'a [Var]>,
    pub n_children: usize,
}

/// The problem-specific placeholders of the template table algorithm plus a
/// finalizer. Bundles are immutable and shared across worker threads.
pub trait ProblemBundle: Sync {
    /// Per-node data computed once per run (e.g. disposal sets).
    type NodePlan: Send + Sync;

    fn name(&self) -> &'static str;

    /// Graph representation whose tree decompositions drive the DP.
    fn graph(&self) -> &Graph;

    /// Items excluded from the DP and compensated in `finalize`.
    fn skip_item(&self, _v: Var) -> bool {
        false
    }

    /// Count multiplier contributed by each free item.
    fn free_factor(&self) -> Option<u64> {
        None
    }

    fn plan(&self, td: &TreeDecomposition, compressed: bool) -> Vec<Self::NodePlan>;

    /// Auxiliary columns carried by every table (e.g. `cnt`, `card`).
    fn base_aux(&self) -> Vec<Column>;

    /// Extra auxiliary columns tied to one bag item (e.g. domination flags).
    fn var_aux(&self, _v: Var) -> Vec<Column> {
        Vec::new()
    }

    /// Table for childless nodes.
    fn leaf_table(&self) -> Table;

    /// Candidate values for an introduced item; columns are the item column
    /// plus its `var_aux` columns.
    fn intro_table(&self, v: Var) -> Table;

    /// Filter conjuncts of the local instance, excluding those already
    /// enforced by a child. The engine applies each as soon as its columns
    /// exist.
    fn intro_filter(&self, ctx: &NodeCtx) -> Vec<Formula>;

    /// Updates to auxiliary columns on introduction, expressed over plain
    /// column names; the engine splices in the join-merge expressions.
    fn intro_add_cols(&self, _ctx: &NodeCtx) -> Vec<(String, ValueExpr)> {
        Vec::new()
    }

    /// Extra join predicate beyond bag-column equality.
    fn join_add_filter(&self, _ctx: &NodeCtx) -> Option<Formula> {
        None
    }

    /// Merge expression for one auxiliary column from the per-child copies
    /// present after the join.
    fn join_add_cols(&self, aux: &str, copies: &[String]) -> ValueExpr;

    /// Selection applied before removal (e.g. domination of removed items).
    fn rem_filter(&self, _ctx: &NodeCtx) -> Formula {
        Formula::tautology()
    }

    /// Additional grouping columns beyond the kept bag columns.
    fn rem_group_cols(&self, _ctx: &NodeCtx) -> Vec<String> {
        Vec::new()
    }

    /// Aggregates evaluated per group; arguments may reference the removed
    /// columns, which are still present.
    fn rem_aggr(&self, ctx: &NodeCtx, plan: &Self::NodePlan) -> Vec<(Column, Aggregate)>;

    /// True when the node scores something beyond the removed columns
    /// (e.g. disposed soft clauses), so aggregation must run even without
    /// removals.
    fn node_scoring(&self, _ctx: &NodeCtx, _plan: &Self::NodePlan) -> bool {
        false
    }

    /// Interpret the root table.
    fn finalize(
        &self,
        root: &Table,
        free_count: u64,
        mode: FreeVarMode,
    ) -> Result<SolutionKind, EngineError>;

    /// Human-readable local instance, for traces.
    fn local_summary(&self, ctx: &NodeCtx) -> String;
}

/// Per-node dump produced in debug mode.
#[derive(Debug, Clone)]
pub struct NodeDump {
    /// 1-based node id, matching PACE numbering.
    pub node: usize,
    pub bag: Vec<Var>,
    pub local: String,
    /// The node's pipeline in readable algebra.
    pub plan: String,
    pub input_rows: usize,
    pub table: Table,
}

impl NodeDump {
    /// Render as `node <id> bag <v...> rows <n>` followed by the local
    /// instance, the pipeline, column names, input row count and the
    /// canonical table.
    pub fn render(&self) -> String {
        let mut head = format!("node {}", self.node);
        head.push_str(" bag");
        for v in &self.bag {
            head.push_str(&format!(" {v}"));
        }
        head.push_str(&format!(" rows {}\n", self.table.len()));
        head.push_str(&format!("local {}\n", self.local));
        head.push_str(&format!("plan {}\n", self.plan));
        head.push_str(&format!(
            "cols {}\n",
            self.table.column_names().collect::<Vec<_>>().join(" ")
        ));
        head.push_str(&format!("in {}\n", self.input_rows));
        head.push_str(&self.table.render());
        head
    }
}

/// Run statistics; wall time covers the DP traversal only, callers add
/// parse and decomposition time.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub width: i64,
    pub node_count: usize,
    pub max_table_rows: usize,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub solution: SolutionKind,
    pub stats: RunStats,
    /// One dump per node in id order; `None` unless debug mode is on.
    pub trace: Option<Vec<NodeDump>>,
}

/// Everything the pipeline needs to know about one node, precomputed.
struct NodeInfo {
    active_bag: Vec<Var>,
    introduced: Vec<Var>,
    removed: Vec<Var>,
    kept: Vec<Var>,
    children: Vec<usize>,
}

fn ordered_diff(a: &[Var], b: &[Var]) -> Vec<Var> {
    a.iter()
        .copied()
        .filter(|v| b.binary_search(v).is_err())
        .collect()
}

fn ordered_intersect(a: &[Var], b: &[Var]) -> Vec<Var> {
    a.iter()
        .copied()
        .filter(|v| b.binary_search(v).is_ok())
        .collect()
}

fn node_infos<B: ProblemBundle>(
    bundle: &B,
    td: &TreeDecomposition,
    compressed: bool,
) -> Vec<NodeInfo> {
    let active: Vec<Vec<Var>> = td
        .nodes()
        .iter()
        .map(|n| {
            n.bag
                .iter()
                .copied()
                .filter(|&v| !bundle.skip_item(v))
                .collect()
        })
        .collect();
    td.nodes()
        .iter()
        .enumerate()
        .map(|(t, node)| {
            let bag = &active[t];
            let mut from_children: Vec<Var> = Vec::new();
            for &c in &node.children {
                from_children.extend(ordered_intersect(&active[c], bag));
            }
            from_children.sort_unstable();
            from_children.dedup();
            let introduced = ordered_diff(bag, &from_children);
            let (kept, removed) = if compressed {
                let parent_bag: &[Var] = node.parent.map_or(&[][..], |p| active[p].as_slice());
                let kept = ordered_intersect(bag, parent_bag);
                let removed = ordered_diff(bag, &kept);
                (kept, removed)
            } else {
                // Literal mode: drop exactly what the children carried
                // beyond this bag.
                let mut removed: Vec<Var> = Vec::new();
                for &c in &node.children {
                    removed.extend(ordered_diff(&active[c], bag));
                }
                removed.sort_unstable();
                removed.dedup();
                (bag.clone(), removed)
            };
            NodeInfo {
                active_bag: bag.clone(),
                introduced,
                removed,
                kept,
                children: node.children.clone(),
            }
        })
        .collect()
}

fn make_ctx<'a>(infos: &'a [NodeInfo], t: usize) -> NodeCtx<'a> {
    let info = &infos[t];
    NodeCtx {
        node_id: t,
        bag: &info.active_bag,
        introduced: &info.introduced,
        removed: &info.removed,
        kept: &info.kept,
        child_bags: info
            .children
            .iter()
            .map(|&c| infos[c].active_bag.as_slice())
            .collect(),
        n_children: info.children.len(),
    }
}

/// In compressed mode the kept set is relative to the parent, so a child's
/// table columns are its kept items; in literal mode they are its full bag.
fn child_var_cols(infos: &[NodeInfo], c: usize, compressed: bool) -> &[Var] {
    if compressed {
        &infos[c].kept
    } else {
        // Literal mode keeps the whole bag plus nothing extra: removed
        // items were dropped at c itself.
        &infos[c].active_bag
    }
}

fn present_vars(ctx: &NodeCtx) -> Vec<Var> {
    let mut p: Vec<Var> = ctx.kept.iter().chain(ctx.removed).copied().collect();
    p.sort_unstable();
    p
}

/// The extended-projection compute set for one node: every auxiliary
/// column's value, merged from per-child copies and rewritten by the
/// introduction updates.
fn assemble_aux_exprs<B: ProblemBundle>(
    bundle: &B,
    ctx: &NodeCtx,
    aux_copies: &BTreeMap<String, Vec<String>>,
) -> Result<Vec<(Column, ValueExpr)>, EngineError> {
    let mut merged: BTreeMap<String, (Column, ValueExpr)> = BTreeMap::new();
    let mut aux_schema: Vec<Column> = bundle.base_aux();
    for &v in &present_vars(ctx) {
        aux_schema.extend(bundle.var_aux(v));
    }
    for col in aux_schema {
        let expr = match aux_copies.get(&col.name).map(Vec::as_slice) {
            None | Some([]) => ValueExpr::col(&col.name),
            Some(copies) => bundle.join_add_cols(&col.name, copies),
        };
        merged.insert(col.name.clone(), (col, expr));
    }
    for (name, update) in bundle.intro_add_cols(ctx) {
        let (_, base) = merged
            .get(&name)
            .ok_or_else(|| EngineError::Internal(format!("update for unknown column {name}")))?;
        let combined = update.substitute(&name, base);
        merged.get_mut(&name).expect("present").1 = combined;
    }
    Ok(merged.into_values().collect())
}

/// Auxiliary-copy names per child, as the join stage renames them.
fn child_aux_copies<B: ProblemBundle>(
    bundle: &B,
    child_vars: &[&[Var]],
) -> BTreeMap<String, Vec<String>> {
    let mut aux_copies: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, vars) in child_vars.iter().enumerate() {
        for col in bundle.base_aux() {
            aux_copies
                .entry(col.name.clone())
                .or_default()
                .push(suffixed(&col.name, i));
        }
        for &v in *vars {
            for col in bundle.var_aux(v) {
                aux_copies
                    .entry(col.name.clone())
                    .or_default()
                    .push(suffixed(&col.name, i));
            }
        }
    }
    aux_copies
}

/// Render one node's pipeline in readable algebra, stage by stage in the
/// canonical order the result is defined by.
pub fn render_plan<B: ProblemBundle>(
    bundle: &B,
    ctx: &NodeCtx,
    child_ids: &[usize],
    child_vars: &[&[Var]],
    plan: &B::NodePlan,
) -> String {
    let mut stages: Vec<String> = Vec::new();
    if child_ids.is_empty() {
        stages.push("leaf".to_string());
    } else {
        let names: Vec<String> = child_ids.iter().map(|c| format!("t{}", c + 1)).collect();
        let mut join = format!("join({})", names.join(", "));
        if let Some(phi) = bundle.join_add_filter(ctx) {
            join.push_str(&format!(" on {phi}"));
        }
        stages.push(join);
    }
    for &v in ctx.introduced {
        stages.push(format!("intro {}", var_col(v)));
    }

    let keep: Vec<String> = present_vars(ctx).iter().map(|&v| var_col(v)).collect();
    let aux_copies = child_aux_copies(bundle, child_vars);
    let compute = assemble_aux_exprs(bundle, ctx, &aux_copies).unwrap_or_default();
    let computed: Vec<String> = compute
        .iter()
        .map(|(c, e)| format!("{} := {e}", c.name))
        .collect();
    stages.push(format!(
        "extend [{} ; {}]",
        keep.join(", "),
        computed.join(", ")
    ));

    let intro_filter = Formula::and(bundle.intro_filter(ctx));
    if !intro_filter.is_tautology() {
        stages.push(format!("filter {intro_filter}"));
    }
    let rem_filter = bundle.rem_filter(ctx);
    if !rem_filter.is_tautology() {
        stages.push(format!("filter {rem_filter}"));
    }

    let mut group_cols: Vec<String> = ctx.kept.iter().map(|&v| var_col(v)).collect();
    group_cols.extend(bundle.rem_group_cols(ctx));
    let aggs: Vec<String> = bundle
        .rem_aggr(ctx, plan)
        .iter()
        .map(|(c, a)| format!("{} := {a}", c.name))
        .collect();
    stages.push(format!(
        "group [{} ; {}]",
        group_cols.join(", "),
        aggs.join(", ")
    ));
    stages.join(" -> ")
}

/// Compute one node's table from its children's tables.
///
/// `compressed` selects the parent-relevant column mode; in literal mode a
/// node with nothing to remove or score skips the aggregation stage, which
/// makes the per-node tables on nice decompositions coincide with the
/// case-dispatched table algorithms.
pub fn compute_node_table<B: ProblemBundle>(
    bundle: &B,
    ctx: &NodeCtx,
    child_tables: &[Arc<Table>],
    child_vars: &[&[Var]],
    plan: &B::NodePlan,
    row_cap: usize,
    compressed: bool,
) -> Result<Table, EngineError> {
    let node = ctx.node_id;
    let err = |source: RelalgError| EngineError::Relalg { node, source };
    let cap = |t: &Table| {
        if t.len() > row_cap {
            Err(EngineError::Capacity { node, cap: row_cap })
        } else {
            Ok(())
        }
    };

    // Stage 1: θ-join of the child tables on shared bag columns; auxiliary
    // columns are renamed apart per child. Childless nodes start from the
    // leaf table.
    let mut aux_copies: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current: Table;
    if child_tables.is_empty() {
        current = bundle.leaf_table();
        for col in bundle.base_aux() {
            aux_copies.entry(col.name).or_default();
        }
    } else {
        let mut acc: Option<Table> = None;
        for (i, (table, vars)) in child_tables.iter().zip(child_vars).enumerate() {
            let mut renames: Vec<(String, String)> = Vec::new();
            let mut track: Vec<(String, String)> = Vec::new();
            for col in bundle.base_aux() {
                renames.push((col.name.clone(), suffixed(&col.name, i)));
                track.push((col.name.clone(), suffixed(&col.name, i)));
            }
            for &v in *vars {
                for col in bundle.var_aux(v) {
                    renames.push((col.name.clone(), suffixed(&col.name, i)));
                    track.push((col.name.clone(), suffixed(&col.name, i)));
                }
            }
            let renamed = relalg::rename(table, &renames).map_err(err)?;
            for (plain, suffix) in track {
                aux_copies.entry(plain).or_default().push(suffix);
            }
            acc = Some(match acc {
                None => renamed,
                Some(a) => {
                    let joined = relalg::natural_join(&a, &renamed).map_err(err)?;
                    cap(&joined)?;
                    joined
                }
            });
        }
        current = acc.expect("at least one child");
    }
    if let Some(phi) = bundle.join_add_filter(ctx) {
        current = relalg::select(&current, &phi).map_err(err)?;
    }

    // Stage 2 + 4 interleaved: introduce items one at a time and apply each
    // introduction-filter conjunct as soon as all its columns exist. The
    // result equals cross-joining everything first and selecting afterwards.
    let mut available: Vec<String> = current.column_names().map(|s| s.to_string()).collect();
    let mut conjuncts: Vec<(Formula, Vec<String>)> = bundle
        .intro_filter(ctx)
        .into_iter()
        .map(|f| {
            let cols = f.columns().into_iter().collect();
            (f, cols)
        })
        .collect();
    let apply_ready = |current: &mut Table,
                       available: &[String],
                       conjuncts: &mut Vec<(Formula, Vec<String>)>|
     -> Result<(), EngineError> {
        let ready: Vec<Formula> = {
            let (r, rest): (Vec<_>, Vec<_>) = std::mem::take(conjuncts)
                .into_iter()
                .partition(|(_, cols)| cols.iter().all(|c| available.contains(c)));
            *conjuncts = rest;
            r.into_iter().map(|(f, _)| f).collect()
        };
        if !ready.is_empty() {
            *current = relalg::select(current, &Formula::and(ready)).map_err(err)?;
        }
        Ok(())
    };
    apply_ready(&mut current, &available, &mut conjuncts)?;
    for &v in ctx.introduced {
        current = relalg::cross_join(&current, &bundle.intro_table(v)).map_err(err)?;
        cap(&current)?;
        available.push(var_col(v));
        for col in bundle.var_aux(v) {
            available.push(col.name);
        }
        apply_ready(&mut current, &available, &mut conjuncts)?;
    }
    if let Some((f, _)) = conjuncts.first() {
        return Err(EngineError::Internal(format!(
            "filter {f:?} references columns outside node {node}"
        )));
    }

    // Stage 3: extended projection to the bag columns, merging per-child
    // auxiliary copies and applying introduction updates.
    let keep: Vec<String> = present_vars(ctx).iter().map(|&v| var_col(v)).collect();
    let compute = assemble_aux_exprs(bundle, ctx, &aux_copies)?;
    let keep_refs: Vec<&str> = keep.iter().map(String::as_str).collect();
    current = relalg::extended_project(&current, &keep_refs, &compute).map_err(err)?;
    cap(&current)?;

    // Stage 5: removal filter.
    let rem_filter = bundle.rem_filter(ctx);
    if !rem_filter.is_tautology() {
        current = relalg::select(&current, &rem_filter).map_err(err)?;
    }

    // Stage 6: group by the surviving columns; aggregate arguments see the
    // removed columns, the output drops them.
    let mut group_cols: Vec<String> = ctx.kept.iter().map(|&v| var_col(v)).collect();
    group_cols.extend(bundle.rem_group_cols(ctx));
    let aggs = bundle.rem_aggr(ctx, plan);
    let result = if !compressed && ctx.removed.is_empty() && !bundle.node_scoring(ctx, plan) {
        // Nothing leaves and nothing is scored: aggregation would only
        // reorder columns, so project to the output layout instead.
        let layout: Vec<&str> = group_cols
            .iter()
            .map(String::as_str)
            .chain(aggs.iter().map(|(c, _)| c.name.as_str()))
            .collect();
        relalg::project(&current, &layout).map_err(err)?
    } else {
        let group_refs: Vec<&str> = group_cols.iter().map(String::as_str).collect();
        relalg::group_aggregate(&current, &group_refs, &aggs).map_err(err)?
    };
    cap(&result)?;
    Ok(result)
}

/// Decompose the bundle's graph heuristically and make the result
/// engine-ready: fan-out capped at `child_limit`, root bag empty.
pub fn prepare_generated_td<B: ProblemBundle>(
    bundle: &B,
    seed: u64,
    child_limit: usize,
) -> TreeDecomposition {
    crate::decomp::decompose(bundle.graph(), seed)
        .limit_children(child_limit)
        .normalize_root()
}

/// Validate a user-supplied decomposition against the bundle's graph and
/// normalize its root; the tree is otherwise used verbatim.
pub fn prepare_user_td<B: ProblemBundle>(
    bundle: &B,
    td: &TreeDecomposition,
) -> Result<TreeDecomposition, EngineError> {
    td.validate(bundle.graph())?;
    Ok(td.normalize_root())
}

/// Run the DP bottom-up over `td` and interpret the root table.
///
/// The decomposition must validate against the bundle's graph and have an
/// empty root bag. The solution is independent of the worker count and, for
/// a fixed instance and bundle, of the decomposition itself.
pub fn run_dp<B: ProblemBundle>(
    bundle: &B,
    td: &TreeDecomposition,
    config: &EngineConfig,
) -> Result<RunOutcome, EngineError> {
    let started = Instant::now();
    td.validate(bundle.graph())?;
    if !td.node(td.root()).bag.is_empty() {
        return Err(EngineError::RootNotNormalized);
    }
    let compressed = !config.debug;
    let infos = node_infos(bundle, td, compressed);
    let plans = bundle.plan(td, compressed);
    if plans.len() != td.len() {
        return Err(EngineError::Internal("plan length mismatch".into()));
    }

    let workers = config.workers.max(1);
    let keep_tables = config.debug;
    let outcome = scheduler::run(td, workers, keep_tables, |t, child_tables| {
        let ctx = make_ctx(&infos, t);
        let child_vars: Vec<&[Var]> = infos[t]
            .children
            .iter()
            .map(|&c| child_var_cols(&infos, c, compressed))
            .collect();
        compute_node_table(
            bundle,
            &ctx,
            child_tables,
            &child_vars,
            &plans[t],
            config.row_cap,
            compressed,
        )
    })?;

    let root_table = outcome.tables[td.root()].as_ref().expect("root retained");
    let free_count = (1..=bundle.graph().num_vertices())
        .filter(|&v| bundle.skip_item(v))
        .count() as u64;
    let solution = bundle.finalize(root_table, free_count, config.free_vars)?;

    let trace = if config.debug {
        let dumps = (0..td.len())
            .map(|t| {
                let ctx = make_ctx(&infos, t);
                let input_rows = infos[t]
                    .children
                    .iter()
                    .map(|&c| outcome.row_counts[c])
                    .sum();
                let child_vars: Vec<&[Var]> = infos[t]
                    .children
                    .iter()
                    .map(|&c| child_var_cols(&infos, c, compressed))
                    .collect();
                NodeDump {
                    node: t + 1,
                    bag: td.node(t).bag.clone(),
                    local: bundle.local_summary(&ctx),
                    plan: render_plan(bundle, &ctx, &infos[t].children, &child_vars, &plans[t]),
                    input_rows,
                    table: outcome.tables[t]
                        .as_ref()
                        .expect("debug keeps tables")
                        .as_ref()
                        .clone(),
                }
            })
            .collect();
        Some(dumps)
    } else {
        None
    };

    Ok(RunOutcome {
        solution,
        stats: RunStats {
            width: td.width(),
            node_count: td.len(),
            max_table_rows: outcome.row_counts.iter().copied().max().unwrap_or(0),
            wall: started.elapsed(),
        },
        trace,
    })
}

//! The five problem bundles and their brute-force oracles.
//!
//! Each bundle instantiates the engine's placeholder set for one problem:
//! model counting, coloring counting, minimum vertex cover, partial MaxSAT
//! and minimum independent dominating set. The oracles solve the same
//! problems by exhaustive enumeration on small instances and exist purely
//! for verification.

use crate::engine::{var_col, NodeCtx};
use crate::instance::{Clause, Lit, Var};
use crate::relalg::Formula;

mod col;
mod ids;
mod maxsat;
pub mod oracle;
mod sharpsat;
mod vc;

pub use col::ColBundle;
pub use ids::IdsBundle;
pub use maxsat::MaxSatBundle;
pub use sharpsat::SharpSatBundle;
pub use vc::VcBundle;

pub(crate) fn lit_formula(l: Lit) -> Formula {
    if l > 0 {
        Formula::var(var_col(l as Var))
    } else {
        Formula::not_var(var_col(l.unsigned_abs()))
    }
}

/// A clause as the disjunction of its literal atoms; the empty clause is
/// the contradiction.
pub(crate) fn clause_formula(c: &Clause) -> Formula {
    Formula::Or(c.lits().iter().map(|&l| lit_formula(l)).collect())
}

pub(crate) fn covered_by(bag: &[Var], vars: impl IntoIterator<Item = Var>) -> bool {
    vars.into_iter().all(|v| bag.binary_search(&v).is_ok())
}

/// Clauses local to the node that no child bag already covers; only these
/// need checking here.
pub(crate) fn unchecked_local_clauses<'a>(clauses: &'a [Clause], ctx: &NodeCtx) -> Vec<&'a Clause> {
    clauses
        .iter()
        .filter(|c| covered_by(ctx.bag, c.vars()))
        .filter(|c| !ctx.child_bags.iter().any(|cb| covered_by(cb, c.vars())))
        .collect()
}

/// Local edges that no child bag already covers.
pub(crate) fn unchecked_local_edges(edges: &[(Var, Var)], ctx: &NodeCtx) -> Vec<(Var, Var)> {
    edges
        .iter()
        .copied()
        .filter(|&(u, v)| !ctx.child_bags.iter().any(|cb| covered_by(cb, [u, v])))
        .collect()
}

pub(crate) fn render_clauses(clauses: &[&Clause]) -> String {
    let mut out = String::from("{");
    for (i, c) in clauses.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('(');
        for (j, l) in c.lits().iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&l.to_string());
        }
        out.push(')');
    }
    out.push('}');
    out
}

pub(crate) fn render_edges(edges: &[(Var, Var)]) -> String {
    let mut out = String::from("{");
    for (i, (u, v)) in edges.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format!("{u}-{v}"));
    }
    out.push('}');
    out
}

//! Brute-force oracles by exhaustive enumeration, for verifying the DP on
//! small instances. Enumeration is over bitmasks, hard-limited to 20
//! variables or vertices.

use num_bigint::BigUint;

use crate::engine::SolutionKind;
use crate::instance::{CnfFormula, Graph, PartialMaxSatInstance, Var};

pub const MAX_ITEMS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {items} items, the oracle enumerates at most {max}")]
    TooLarge { items: u32, max: u32 },
    #[error("enumeration space {space} exceeds the oracle budget")]
    SpaceTooLarge { space: u64 },
}

fn guard(items: u32) -> Result<(), OracleError> {
    if items > MAX_ITEMS {
        Err(OracleError::TooLarge {
            items,
            max: MAX_ITEMS,
        })
    } else {
        Ok(())
    }
}

/// Count satisfying assignments over all declared variables.
pub fn count_models(f: &CnfFormula) -> Result<BigUint, OracleError> {
    guard(f.num_vars)?;
    let mut count = 0u64;
    for mask in 0..1u64 << f.num_vars {
        if f.clauses.iter().all(|c| c.satisfied_by_mask(mask)) {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Count proper colorings with `colors` color values.
pub fn count_colorings(g: &Graph, colors: u32) -> Result<BigUint, OracleError> {
    let n = g.num_vertices();
    guard(n)?;
    let space = (colors as u64).checked_pow(n).unwrap_or(u64::MAX);
    if space > 1 << 25 {
        return Err(OracleError::SpaceTooLarge { space });
    }
    if n == 0 {
        return Ok(BigUint::from(1u32));
    }
    let edges = g.edges();
    let mut assignment = vec![0u32; n as usize];
    let mut count = 0u64;
    'outer: loop {
        if edges
            .iter()
            .all(|&(u, v)| assignment[u as usize - 1] != assignment[v as usize - 1])
        {
            count += 1;
        }
        // Odometer step.
        for slot in assignment.iter_mut() {
            *slot += 1;
            if *slot < colors {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok(BigUint::from(count))
}

fn neighbor_masks(g: &Graph) -> Vec<u32> {
    let n = g.num_vertices() as usize;
    let mut masks = vec![0u32; n + 1];
    for v in 1..=n as Var {
        for u in g.neighbors(v) {
            masks[v as usize] |= 1 << (u - 1);
        }
    }
    masks
}

/// Minimum cardinality of a vertex cover.
pub fn min_vertex_cover(g: &Graph) -> Result<i64, OracleError> {
    let n = g.num_vertices();
    guard(n)?;
    let edges = g.edges();
    let mut best = n as i64;
    for mask in 0..1u32 << n {
        let covered = edges
            .iter()
            .all(|&(u, v)| mask >> (u - 1) & 1 == 1 || mask >> (v - 1) & 1 == 1);
        if covered {
            best = best.min(mask.count_ones() as i64);
        }
    }
    Ok(best)
}

/// Maximum number of soft clauses satisfiable under the hard clauses, or
/// `None` if the hard part is unsatisfiable.
pub fn max_satisfied_soft(inst: &PartialMaxSatInstance) -> Result<Option<i64>, OracleError> {
    let n = inst.num_vars();
    guard(n)?;
    let mut best: Option<i64> = None;
    for mask in 0..1u64 << n {
        if inst.hard.clauses.iter().all(|c| c.satisfied_by_mask(mask)) {
            let score = inst
                .soft
                .iter()
                .filter(|c| c.satisfied_by_mask(mask))
                .count() as i64;
            best = Some(best.map_or(score, |b| b.max(score)));
        }
    }
    Ok(best)
}

/// Minimum cardinality of an independent dominating set; one always exists.
pub fn min_independent_dominating_set(g: &Graph) -> Result<i64, OracleError> {
    let n = g.num_vertices();
    guard(n)?;
    let nbr = neighbor_masks(g);
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut best = i64::MAX;
    for mask in 0..=full {
        if n == 0 && mask > 0 {
            break;
        }
        let independent = (1..=n).all(|v| mask >> (v - 1) & 1 == 0 || mask & nbr[v as usize] == 0);
        if !independent {
            continue;
        }
        let mut dominated = mask;
        for v in 1..=n {
            if mask >> (v - 1) & 1 == 1 {
                dominated |= nbr[v as usize];
            }
        }
        if dominated == full {
            best = best.min(mask.count_ones() as i64);
        }
    }
    Ok(best)
}

/// Problem selector for the unified oracle entry point.
pub enum OracleProblem<'a> {
    SharpSat(&'a CnfFormula),
    Coloring(&'a Graph, u32),
    VertexCover(&'a Graph),
    MaxSat(&'a PartialMaxSatInstance),
    Ids(&'a Graph),
}

/// Solve a small instance exhaustively, mirroring the engine's solution
/// shape.
pub fn solve(problem: &OracleProblem) -> Result<SolutionKind, OracleError> {
    Ok(match problem {
        OracleProblem::SharpSat(f) => SolutionKind::Count(count_models(f)?),
        OracleProblem::Coloring(g, o) => SolutionKind::Count(count_colorings(g, *o)?),
        OracleProblem::VertexCover(g) => SolutionKind::Optimum(min_vertex_cover(g)?),
        OracleProblem::MaxSat(inst) => match max_satisfied_soft(inst)? {
            Some(best) => SolutionKind::Optimum(best),
            None => SolutionKind::Unsat,
        },
        OracleProblem::Ids(g) => SolutionKind::Optimum(min_independent_dominating_set(g)?),
    })
}

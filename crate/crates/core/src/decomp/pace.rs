//! Tree-decomposition files in the PACE competition format.
//!
//! ```text
//! s td <#bags> <max bag size> <#vertices>
//! b <id> <v...>
//! <u> <v>
//! ```
//!
//! The format carries no root. Reading roots the tree at the
//! highest-numbered empty-bag node when one exists (a natural full
//! aggregation point), otherwise at a centroid; callers normalize the root
//! afterwards as needed.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::instance::{Parsed, Var};

use super::{TdNode, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TdReadError {
    #[error("line {line}: malformed `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: missing `s td` header before content")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate `s td` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: bag id {id} out of range (1..={bags})")]
    BagIdOutOfRange { line: usize, id: i64, bags: usize },
    #[error("line {line}: duplicate bag id {id}")]
    DuplicateBag { line: usize, id: usize },
    #[error("line {line}: bag vertex {vertex} out of range (1..={num_vertices})")]
    BagVertexOutOfRange {
        line: usize,
        vertex: i64,
        num_vertices: u32,
    },
    #[error("tree edges do not form a tree over the bags (disconnected or cyclic)")]
    NotATree,
    #[error("no `s td` header found")]
    NoHeader,
    #[error("a decomposition needs at least one bag")]
    NoBags,
}

/// Parse a PACE-format tree decomposition. The recomputed width is checked
/// against the header; a mismatch is a warning, not an error.
pub fn read_td(text: &str) -> Result<Parsed<TreeDecomposition>, TdReadError> {
    let mut header: Option<(usize, usize, u32)> = None;
    let mut bags: Vec<Option<Vec<Var>>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut warnings = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let malformed = || TdReadError::Malformed {
            line,
            text: content.to_string(),
        };
        match toks.as_slice() {
            ["s", "td", nb, w1, nv] => {
                if header.is_some() {
                    return Err(TdReadError::DuplicateHeader { line });
                }
                let nb: usize = nb.parse().map_err(|_| malformed())?;
                let w1: usize = w1.parse().map_err(|_| malformed())?;
                let nv: u32 = nv.parse().map_err(|_| malformed())?;
                header = Some((nb, w1, nv));
                bags = vec![None; nb];
            }
            ["b", rest @ ..] => {
                let (nb, _, nv) = header.ok_or(TdReadError::MissingHeader { line })?;
                if rest.is_empty() {
                    return Err(malformed());
                }
                let id: i64 = rest[0].parse().map_err(|_| malformed())?;
                if id < 1 || id as usize > nb {
                    return Err(TdReadError::BagIdOutOfRange { line, id, bags: nb });
                }
                let id = id as usize;
                let mut bag = Vec::with_capacity(rest.len() - 1);
                for tok in &rest[1..] {
                    let v: i64 = tok.parse().map_err(|_| malformed())?;
                    if v < 1 || v > nv as i64 {
                        return Err(TdReadError::BagVertexOutOfRange {
                            line,
                            vertex: v,
                            num_vertices: nv,
                        });
                    }
                    bag.push(v as Var);
                }
                bag.sort_unstable();
                bag.dedup();
                if bags[id - 1].replace(bag).is_some() {
                    return Err(TdReadError::DuplicateBag { line, id });
                }
            }
            [u, v] => {
                let (nb, _, _) = header.ok_or(TdReadError::MissingHeader { line })?;
                let u: i64 = u.parse().map_err(|_| malformed())?;
                let v: i64 = v.parse().map_err(|_| malformed())?;
                for id in [u, v] {
                    if id < 1 || id as usize > nb {
                        return Err(TdReadError::BagIdOutOfRange { line, id, bags: nb });
                    }
                }
                edges.push((u as usize - 1, v as usize - 1));
            }
            _ => return Err(malformed()),
        }
    }

    let (nb, declared_width, nv) = header.ok_or(TdReadError::NoHeader)?;
    if nb == 0 {
        return Err(TdReadError::NoBags);
    }
    let bags: Vec<Vec<Var>> = bags.into_iter().map(|b| b.unwrap_or_default()).collect();

    // Orient the undirected tree away from a provisional root.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    if edges.len() != nb - 1 {
        return Err(TdReadError::NotATree);
    }
    let mut nodes: Vec<TdNode> = bags
        .iter()
        .map(|b| TdNode {
            bag: b.clone(),
            children: Vec::new(),
            parent: None,
        })
        .collect();
    let mut seen = vec![false; nb];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(t) = queue.pop_front() {
        let mut next: Vec<usize> = adj[t].iter().copied().filter(|&x| !seen[x]).collect();
        next.sort_unstable();
        for x in next {
            seen[x] = true;
            reached += 1;
            nodes[t].children.push(x);
            nodes[x].parent = Some(t);
            queue.push_back(x);
        }
    }
    if reached != nb {
        return Err(TdReadError::NotATree);
    }

    let td = TreeDecomposition::from_parts(nodes, 0, nv);
    let actual = td.max_bag_size();
    if actual != declared_width {
        warnings.push(format!(
            "header declares max bag size {declared_width} but bags reach {actual}"
        ));
    }

    // Final root: highest-numbered empty bag, else a centroid.
    let root = td
        .nodes()
        .iter()
        .enumerate()
        .rev()
        .find(|(_, n)| n.bag.is_empty())
        .map(|(i, _)| i)
        .unwrap_or_else(|| td.centroid());
    Ok(Parsed {
        value: td.re_root(root),
        warnings,
    })
}

/// Render a decomposition in PACE format: bags in id order, tree edges as
/// sorted unordered pairs.
pub fn write_td(td: &TreeDecomposition) -> String {
    let mut out = format!(
        "s td {} {} {}\n",
        td.len(),
        td.max_bag_size(),
        td.num_vertices()
    );
    for (i, node) in td.nodes().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in &node.bag {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(td.len().saturating_sub(1));
    for (t, node) in td.nodes().iter().enumerate() {
        for &c in &node.children {
            edges.push((t.min(c) + 1, t.max(c) + 1));
        }
    }
    edges.sort_unstable();
    for (u, v) in edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

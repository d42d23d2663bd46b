//! Tree decompositions: construction, validation, normalization and
//! PACE-format I/O.
//!
//! Decompositions are rooted trees of bags. Niceness is never enforced;
//! the engine consumes arbitrary rooted TDs. Transforms never increase the
//! width and keep all three TD invariants intact.

use std::collections::{BTreeSet, VecDeque};

use crate::instance::{Graph, Var};

mod minfill;
mod pace;

pub use minfill::decompose;
pub use pace::{read_td, write_td, TdReadError};

/// One node of a rooted tree decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdNode {
    /// Bag contents, sorted ascending.
    pub bag: Vec<Var>,
    /// Children in fixed order; join order follows this list.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// A rooted tree decomposition of a graph over vertices `1..=num_vertices`.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    nodes: Vec<TdNode>,
    root: usize,
    num_vertices: u32,
}

/// First violated TD invariant, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TdViolation {
    #[error("bag of node {node} contains vertex {vertex}, outside 1..={num_vertices}")]
    BagVertexOutOfRange {
        node: usize,
        vertex: Var,
        num_vertices: u32,
    },
    #[error("vertex {vertex} occurs in no bag")]
    VertexNotCovered { vertex: Var },
    #[error("edge {{{u},{v}}} is contained in no bag")]
    EdgeNotCovered { u: Var, v: Var },
    #[error("nodes containing vertex {vertex} do not form a connected subtree (node {node} unreachable)")]
    VertexDisconnected { vertex: Var, node: usize },
}

impl TreeDecomposition {
    pub(crate) fn from_parts(nodes: Vec<TdNode>, root: usize, num_vertices: u32) -> Self {
        let td = TreeDecomposition {
            nodes,
            root,
            num_vertices,
        };
        debug_assert!(td.structure_ok());
        td
    }

    /// A decomposition with a single node holding `bag`.
    pub fn single(bag: Vec<Var>, num_vertices: u32) -> Self {
        let mut bag = bag;
        bag.sort_unstable();
        bag.dedup();
        TreeDecomposition {
            nodes: vec![TdNode {
                bag,
                children: Vec::new(),
                parent: None,
            }],
            root: 0,
            num_vertices,
        }
    }

    /// Build a decomposition from bags and parent pointers; exactly one
    /// node must be parentless, and the pointers must form one tree.
    /// Children are ordered by node id.
    pub fn from_parent_pointers(
        bags: Vec<Vec<Var>>,
        parents: Vec<Option<usize>>,
        num_vertices: u32,
    ) -> Result<Self, String> {
        if bags.is_empty() || bags.len() != parents.len() {
            return Err("bags and parents must be nonempty and aligned".into());
        }
        let n = bags.len();
        let mut nodes: Vec<TdNode> = bags
            .into_iter()
            .zip(parents.iter())
            .map(|(mut bag, &parent)| {
                bag.sort_unstable();
                bag.dedup();
                TdNode {
                    bag,
                    children: Vec::new(),
                    parent,
                }
            })
            .collect();
        let mut root = None;
        for t in 0..n {
            match nodes[t].parent {
                None => {
                    if root.replace(t).is_some() {
                        return Err("multiple parentless nodes".into());
                    }
                }
                Some(p) if p < n => nodes[p].children.push(t),
                Some(p) => return Err(format!("parent {p} out of range")),
            }
        }
        let root = root.ok_or("no parentless node")?;
        // Reject cycles: every node must reach the root.
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut reached = 1;
        while let Some(t) = stack.pop() {
            for &c in &nodes[t].children {
                if !std::mem::replace(&mut seen[c], true) {
                    reached += 1;
                    stack.push(c);
                }
            }
        }
        if reached != n {
            return Err("parent pointers contain a cycle".into());
        }
        Ok(TreeDecomposition {
            nodes,
            root,
            num_vertices,
        })
    }

    fn structure_ok(&self) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        if self.nodes[self.root].parent.is_some() {
            return false;
        }
        while let Some(t) = stack.pop() {
            if std::mem::replace(&mut seen[t], true) {
                return false;
            }
            for &c in &self.nodes[t].children {
                if self.nodes[c].parent != Some(t) {
                    return false;
                }
                stack.push(c);
            }
        }
        seen.iter().all(|&s| s)
            && self
                .nodes
                .iter()
                .all(|n| n.bag.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn node(&self, id: usize) -> &TdNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TdNode] {
        &self.nodes
    }

    pub fn max_bag_size(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    /// Largest bag size minus one; -1 for the decomposition of the empty
    /// graph (a single empty bag).
    pub fn width(&self) -> i64 {
        self.max_bag_size() as i64 - 1
    }

    /// Node ids in an order where every child precedes its parent.
    pub fn post_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(t) = stack.pop() {
            order.push(t);
            stack.extend(self.nodes[t].children.iter().copied());
        }
        order.reverse();
        order
    }

    /// Check the three TD invariants against `g`, reporting the first
    /// violation found.
    pub fn validate(&self, g: &Graph) -> Result<(), TdViolation> {
        let n = g.num_vertices();
        for (id, node) in self.nodes.iter().enumerate() {
            for &v in &node.bag {
                if v < 1 || v > n {
                    return Err(TdViolation::BagVertexOutOfRange {
                        node: id,
                        vertex: v,
                        num_vertices: n,
                    });
                }
            }
        }

        // Vertex coverage, and the node lists reused by the connectedness check.
        let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); n as usize + 1];
        for (id, node) in self.nodes.iter().enumerate() {
            for &v in &node.bag {
                occurrences[v as usize].push(id);
            }
        }
        for v in 1..=n {
            if occurrences[v as usize].is_empty() {
                return Err(TdViolation::VertexNotCovered { vertex: v });
            }
        }

        for (u, v) in g.edges() {
            let covered = occurrences[u as usize]
                .iter()
                .any(|&id| self.nodes[id].bag.binary_search(&v).is_ok());
            if !covered {
                return Err(TdViolation::EdgeNotCovered { u, v });
            }
        }

        for v in 1..=n {
            let members: BTreeSet<usize> = occurrences[v as usize].iter().copied().collect();
            let mut reached = BTreeSet::new();
            let start = occurrences[v as usize][0];
            let mut queue = VecDeque::from([start]);
            reached.insert(start);
            while let Some(t) = queue.pop_front() {
                let node = &self.nodes[t];
                for next in node.children.iter().copied().chain(node.parent) {
                    if members.contains(&next) && reached.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
            if let Some(&missing) = members.difference(&reached).next() {
                return Err(TdViolation::VertexDisconnected {
                    vertex: v,
                    node: missing,
                });
            }
        }
        Ok(())
    }

    /// Cap the fan-out at `k` (k >= 2) by inserting intermediate nodes that
    /// copy the parent's bag. Width and validity are preserved; existing
    /// node ids are unchanged.
    pub fn limit_children(&self, k: usize) -> TreeDecomposition {
        assert!(k >= 2, "child limit must be at least 2");
        let mut nodes = self.nodes.clone();
        let original = nodes.len();
        for t in 0..original {
            while nodes[t].children.len() > k {
                let moved: Vec<usize> = nodes[t].children.drain(..k).collect();
                let fresh = nodes.len();
                nodes.push(TdNode {
                    bag: nodes[t].bag.clone(),
                    children: moved.clone(),
                    parent: Some(t),
                });
                for c in moved {
                    nodes[c].parent = Some(fresh);
                }
                nodes[t].children.push(fresh);
            }
        }
        TreeDecomposition::from_parts(nodes, self.root, self.num_vertices)
    }

    /// Ensure the root bag is empty, appending a fresh empty-bag root above
    /// the old root when necessary.
    pub fn normalize_root(&self) -> TreeDecomposition {
        if self.nodes[self.root].bag.is_empty() {
            return self.clone();
        }
        let mut nodes = self.nodes.clone();
        let fresh = nodes.len();
        nodes[self.root].parent = Some(fresh);
        nodes.push(TdNode {
            bag: Vec::new(),
            children: vec![self.root],
            parent: None,
        });
        TreeDecomposition::from_parts(nodes, fresh, self.num_vertices)
    }

    /// Re-root the tree at `new_root`, keeping node ids. Children end up in
    /// ascending id order.
    pub fn re_root(&self, new_root: usize) -> TreeDecomposition {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                adj[t].insert(c);
                adj[c].insert(t);
            }
        }
        let mut nodes: Vec<TdNode> = self
            .nodes
            .iter()
            .map(|n| TdNode {
                bag: n.bag.clone(),
                children: Vec::new(),
                parent: None,
            })
            .collect();
        let mut queue = VecDeque::from([new_root]);
        let mut seen = vec![false; nodes.len()];
        seen[new_root] = true;
        while let Some(t) = queue.pop_front() {
            for &next in &adj[t] {
                if !std::mem::replace(&mut seen[next], true) {
                    nodes[t].children.push(next);
                    nodes[next].parent = Some(t);
                    queue.push_back(next);
                }
            }
        }
        TreeDecomposition::from_parts(nodes, new_root, self.num_vertices)
    }

    /// A centroid: removing it leaves components of size at most n/2.
    /// Ties break toward the smaller id.
    pub fn centroid(&self) -> usize {
        let n = self.nodes.len();
        let order = self.post_order();
        let mut subtree = vec![1usize; n];
        for &t in &order {
            for &c in &self.nodes[t].children {
                subtree[t] += subtree[c];
            }
        }
        let mut best = (usize::MAX, 0usize);
        for t in 0..n {
            let mut largest = n - subtree[t];
            for &c in &self.nodes[t].children {
                largest = largest.max(subtree[c]);
            }
            if (largest, t) < best {
                best = (largest, t);
            }
        }
        best.1
    }
}

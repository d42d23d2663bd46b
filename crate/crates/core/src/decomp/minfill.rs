//! Heuristic tree decompositions from a min-fill elimination ordering.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::instance::{Graph, Var};

use super::{TdNode, TreeDecomposition};

/// Compute a tree decomposition of `g` from a min-fill elimination
/// ordering with seeded random tie-breaking, rooted at a centroid.
///
/// Bit-reproducible for a fixed seed. The empty graph yields a single
/// empty-bag node.
pub fn decompose(g: &Graph, seed: u64) -> TreeDecomposition {
    let n = g.num_vertices() as usize;
    if n == 0 {
        return TreeDecomposition::single(Vec::new(), 0);
    }
    let mut rng = StdRng::seed_from_u64(seed);

    // Working adjacency, 1-based.
    let mut adj: Vec<BTreeSet<Var>> = vec![BTreeSet::new(); n + 1];
    for (u, v) in g.edges() {
        adj[u as usize].insert(v);
        adj[v as usize].insert(u);
    }
    let mut alive = vec![true; n + 1];
    let mut fill: Vec<u64> = vec![0; n + 1];
    for (v, slot) in fill.iter_mut().enumerate().skip(1) {
        *slot = fill_count(&adj, v as Var);
    }

    let mut elim_pos = vec![usize::MAX; n + 1];
    let mut bags: Vec<Vec<Var>> = Vec::with_capacity(n);
    let mut eliminated: Vec<Var> = Vec::with_capacity(n);

    for step in 0..n {
        let min_fill = (1..=n)
            .filter(|&v| alive[v])
            .map(|v| fill[v])
            .min()
            .expect("some vertex alive");
        let ties: Vec<Var> = (1..=n as Var)
            .filter(|&v| alive[v as usize] && fill[v as usize] == min_fill)
            .collect();
        let v = ties[rng.gen_range(0..ties.len())];

        let neighbors: Vec<Var> = adj[v as usize].iter().copied().collect();
        let mut bag = neighbors.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        eliminated.push(v);
        elim_pos[v as usize] = step;

        // Turn the neighborhood into a clique, then retire v.
        let mut new_edges: Vec<(Var, Var)> = Vec::new();
        for (i, &x) in neighbors.iter().enumerate() {
            for &y in &neighbors[i + 1..] {
                if adj[x as usize].insert(y) {
                    adj[y as usize].insert(x);
                    new_edges.push((x, y));
                }
            }
        }
        for &u in &neighbors {
            adj[u as usize].remove(&v);
        }
        alive[v as usize] = false;

        // Fill counts change only near v and the new edges.
        let mut affected: BTreeSet<Var> = neighbors.iter().copied().collect();
        for &(x, y) in &new_edges {
            affected.extend(adj[x as usize].intersection(&adj[y as usize]).copied());
        }
        for u in affected {
            if alive[u as usize] {
                fill[u as usize] = fill_count(&adj, u);
            }
        }
    }

    // Clique-tree construction: the node of v hangs below the node of the
    // earliest-eliminated remaining bag member.
    let mut nodes: Vec<TdNode> = bags
        .iter()
        .map(|bag| TdNode {
            bag: bag.clone(),
            children: Vec::new(),
            parent: None,
        })
        .collect();
    let mut roots: Vec<usize> = Vec::new();
    for (i, &v) in eliminated.iter().enumerate() {
        let parent = bags[i]
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| elim_pos[u as usize])
            .min();
        match parent {
            Some(p) => {
                nodes[i].parent = Some(p);
                nodes[p].children.push(i);
            }
            None => roots.push(i),
        }
    }

    // Disconnected inputs produce one tree per component; link them.
    let last_root = *roots.last().expect("at least one root");
    for &r in &roots[..roots.len() - 1] {
        nodes[r].parent = Some(last_root);
        nodes[last_root].children.push(r);
    }
    for node in &mut nodes {
        node.children.sort_unstable();
    }

    let td = TreeDecomposition::from_parts(nodes, last_root, g.num_vertices());
    let centroid = td.centroid();
    td.re_root(centroid)
}

fn fill_count(adj: &[BTreeSet<Var>], v: Var) -> u64 {
    let neighbors: Vec<Var> = adj[v as usize].iter().copied().collect();
    let mut missing = 0;
    for (i, &x) in neighbors.iter().enumerate() {
        for &y in &neighbors[i + 1..] {
            if !adj[x as usize].contains(&y) {
                missing += 1;
            }
        }
    }
    missing
}

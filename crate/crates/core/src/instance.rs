//! Problem instances: CNF formulas, partial MaxSAT pairs and undirected
//! graphs, their DIMACS-style parsers, and primal-graph construction.
//!
//! Parsing is deliberately tolerant where real corpora are sloppy: comment
//! lines and blank lines are skipped everywhere, clauses may span lines,
//! and count mismatches against the header are reported as warnings rather
//! than errors. Structural problems (bad headers, out-of-range indices,
//! self-loops) are errors.

use std::collections::BTreeSet;
use std::fmt::Write as _;

/// 1-based variable or vertex index.
pub type Var = u32;
/// Nonzero literal; sign is polarity, absolute value the variable.
pub type Lit = i32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: missing `p` header before content")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate `p` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: cannot parse token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range (1..={num_vars})")]
    LiteralOutOfRange {
        line: usize,
        lit: i64,
        num_vars: u32,
    },
    #[error("line {line}: vertex {vertex} out of range (1..={num_vertices})")]
    VertexOutOfRange {
        line: usize,
        vertex: i64,
        num_vertices: u32,
    },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u32 },
    #[error("line {line}: clause weight {weight} is neither 1 nor top ({top})")]
    BadWeight { line: usize, weight: u64, top: u64 },
    #[error("no header found")]
    NoHeader,
}

/// A parsed value together with non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

/// A clause as a set of literals; duplicate literals collapse, opposing
/// literals are kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(mut lits: Vec<Lit>) -> Clause {
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + Clone + '_ {
        self.lits.iter().map(|l| l.unsigned_abs())
    }

    /// True when some literal is satisfied by the assignment bitmask
    /// (bit v-1 set means variable v is true). Usable for up to 64 vars.
    pub fn satisfied_by_mask(&self, mask: u64) -> bool {
        self.lits.iter().any(|&l| {
            let bit = mask >> (l.unsigned_abs() - 1) & 1;
            (l > 0) == (bit == 1)
        })
    }
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Vec<Lit>>) -> CnfFormula {
        CnfFormula {
            num_vars,
            clauses: clauses.into_iter().map(Clause::new).collect(),
        }
    }

    /// Variables that occur in no clause.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut used = vec![false; self.num_vars as usize + 1];
        for c in &self.clauses {
            for v in c.vars() {
                used[v as usize] = true;
            }
        }
        (1..=self.num_vars).filter(|&v| !used[v as usize]).collect()
    }

    /// The primal graph: one vertex per variable, an edge whenever two
    /// variables occur together in a clause.
    pub fn primal_graph(&self) -> Graph {
        let mut g = Graph::edgeless(self.num_vars);
        for c in &self.clauses {
            g.add_clique(c.vars());
        }
        g
    }

    /// DIMACS rendering: header plus one clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

/// A partial MaxSAT instance: hard clauses that must hold, soft clauses to
/// be maximized, over a shared variable range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMaxSatInstance {
    pub hard: CnfFormula,
    pub soft: Vec<Clause>,
}

impl PartialMaxSatInstance {
    pub fn num_vars(&self) -> u32 {
        self.hard.num_vars
    }

    /// Variables that occur in neither hard nor soft clauses.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut used = vec![false; self.num_vars() as usize + 1];
        for c in self.hard.clauses.iter().chain(&self.soft) {
            for v in c.vars() {
                used[v as usize] = true;
            }
        }
        (1..=self.num_vars())
            .filter(|&v| !used[v as usize])
            .collect()
    }

    /// Primal graph of the union of hard and soft clauses.
    pub fn primal_graph(&self) -> Graph {
        let mut g = Graph::edgeless(self.num_vars());
        for c in self.hard.clauses.iter().chain(&self.soft) {
            g.add_clique(c.vars());
        }
        g
    }
}

/// An undirected simple graph over vertices `1..=num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: u32,
    adj: Vec<BTreeSet<Var>>,
    num_edges: usize,
}

impl Graph {
    pub fn edgeless(num_vertices: u32) -> Graph {
        Graph {
            num_vertices,
            adj: vec![BTreeSet::new(); num_vertices as usize + 1],
            num_edges: 0,
        }
    }

    pub fn from_edges(num_vertices: u32, edges: &[(Var, Var)]) -> Graph {
        let mut g = Graph::edgeless(num_vertices);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Insert an edge; out-of-range endpoints and self-loops panic, parsers
    /// check ranges beforehand.
    pub fn add_edge(&mut self, u: Var, v: Var) {
        assert!(u != v, "self-loop on {u}");
        assert!(
            (1..=self.num_vertices).contains(&u) && (1..=self.num_vertices).contains(&v),
            "edge ({u},{v}) out of range"
        );
        if self.adj[u as usize].insert(v) {
            self.adj[v as usize].insert(u);
            self.num_edges += 1;
        }
    }

    fn add_clique(&mut self, vars: impl Iterator<Item = Var> + Clone) {
        for u in vars.clone() {
            for v in vars.clone() {
                if u < v {
                    self.add_edge(u, v);
                }
            }
        }
    }

    pub fn has_edge(&self, u: Var, v: Var) -> bool {
        self.adj.get(u as usize).is_some_and(|s| s.contains(&v))
    }

    pub fn neighbors(&self, v: Var) -> impl Iterator<Item = Var> + '_ {
        self.adj[v as usize].iter().copied()
    }

    pub fn degree(&self, v: Var) -> usize {
        self.adj[v as usize].len()
    }

    /// Edges as (u, v) pairs with u < v, ascending.
    pub fn edges(&self) -> Vec<(Var, Var)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for u in 1..=self.num_vertices {
            for &v in &self.adj[u as usize] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Edges of the subgraph induced by `bag` (bag must be sorted).
    pub fn local_edges(&self, bag: &[Var]) -> Vec<(Var, Var)> {
        let mut out = Vec::new();
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Vertices with no incident edges.
    pub fn isolated_vertices(&self) -> Vec<Var> {
        (1..=self.num_vertices)
            .filter(|&v| self.adj[v as usize].is_empty())
            .collect()
    }

    /// DIMACS rendering (`p edge`) with one `e u v` line per edge.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.num_vertices, self.num_edges);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_header(line: usize, text: &str, kind: &str, arity: usize) -> Result<Vec<u64>, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let malformed = || ParseError::MalformedHeader {
        line,
        text: text.to_string(),
    };
    if toks.len() != arity + 2 || toks[0] != "p" || toks[1] != kind {
        return Err(malformed());
    }
    toks[2..]
        .iter()
        .map(|t| t.parse::<u64>().map_err(|_| malformed()))
        .collect()
}

/// Parse DIMACS CNF (`p cnf <vars> <clauses>`, 0-terminated clauses).
pub fn parse_dimacs_cnf(text: &str) -> Result<Parsed<CnfFormula>, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut warnings = Vec::new();
    let mut last_line = 0;

    for (line, content) in significant_lines(text) {
        last_line = line;
        if content.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            let h = parse_header(line, content, "cnf", 2)?;
            if h[0] > u32::MAX as u64 {
                return Err(ParseError::MalformedHeader {
                    line,
                    text: content.to_string(),
                });
            }
            header = Some((h[0] as u32, h[1] as usize));
            continue;
        }
        let (num_vars, _) = header.ok_or(ParseError::MissingHeader { line })?;
        for tok in content.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| ParseError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                clauses.push(Clause::new(std::mem::take(&mut pending)));
            } else {
                if lit.unsigned_abs() > num_vars as u64 {
                    return Err(ParseError::LiteralOutOfRange {
                        line,
                        lit,
                        num_vars,
                    });
                }
                pending.push(lit as Lit);
            }
        }
    }

    let (num_vars, declared) = header.ok_or(ParseError::NoHeader)?;
    if !pending.is_empty() {
        warnings.push(format!("line {last_line}: final clause not 0-terminated"));
        clauses.push(Clause::new(pending));
    }
    if clauses.len() != declared {
        warnings.push(format!(
            "header declares {declared} clauses but {} were read",
            clauses.len()
        ));
    }
    Ok(Parsed {
        value: CnfFormula { num_vars, clauses },
        warnings,
    })
}

/// Parse WDIMACS (`p wcnf <vars> <clauses> <top>`) into a partial MaxSAT
/// instance: weight `top` marks a hard clause, weight 1 a soft clause, and
/// any other weight is rejected.
pub fn parse_wdimacs(text: &str) -> Result<Parsed<PartialMaxSatInstance>, ParseError> {
    let mut header: Option<(u32, usize, u64)> = None;
    let mut hard: Vec<Clause> = Vec::new();
    let mut soft: Vec<Clause> = Vec::new();
    let mut warnings = Vec::new();

    for (line, content) in significant_lines(text) {
        if content.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            let h = parse_header(line, content, "wcnf", 3)?;
            if h[0] > u32::MAX as u64 {
                return Err(ParseError::MalformedHeader {
                    line,
                    text: content.to_string(),
                });
            }
            header = Some((h[0] as u32, h[1] as usize, h[2]));
            continue;
        }
        let (num_vars, _, top) = header.ok_or(ParseError::MissingHeader { line })?;
        let mut toks = content.split_whitespace();
        let wtok = toks.next().expect("nonempty line");
        let weight: u64 = wtok.parse().map_err(|_| ParseError::BadToken {
            line,
            token: wtok.to_string(),
        })?;
        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in toks {
            let lit: i64 = tok.parse().map_err(|_| ParseError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                terminated = true;
                break;
            }
            if lit.unsigned_abs() > num_vars as u64 {
                return Err(ParseError::LiteralOutOfRange {
                    line,
                    lit,
                    num_vars,
                });
            }
            lits.push(lit as Lit);
        }
        if !terminated {
            warnings.push(format!("line {line}: clause not 0-terminated"));
        }
        if weight == top {
            hard.push(Clause::new(lits));
        } else if weight == 1 {
            soft.push(Clause::new(lits));
        } else {
            return Err(ParseError::BadWeight { line, weight, top });
        }
    }

    let (num_vars, declared, _) = header.ok_or(ParseError::NoHeader)?;
    if hard.len() + soft.len() != declared {
        warnings.push(format!(
            "header declares {declared} clauses but {} were read",
            hard.len() + soft.len()
        ));
    }
    Ok(Parsed {
        value: PartialMaxSatInstance {
            hard: CnfFormula {
                num_vars,
                clauses: hard,
            },
            soft,
        },
        warnings,
    })
}

/// Parse a DIMACS (`p edge`) or PACE (`p tw`) graph. Edge lines are either
/// `e u v` or bare `u v` pairs; duplicates collapse, self-loops are errors.
pub fn parse_dimacs_graph(text: &str) -> Result<Parsed<Graph>, ParseError> {
    let mut graph: Option<Graph> = None;
    let mut declared = 0usize;
    let mut warnings = Vec::new();

    for (line, content) in significant_lines(text) {
        if content.starts_with('p') {
            if graph.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            let h = parse_header(line, content, "edge", 2)
                .or_else(|_| parse_header(line, content, "tw", 2))?;
            if h[0] > u32::MAX as u64 {
                return Err(ParseError::MalformedHeader {
                    line,
                    text: content.to_string(),
                });
            }
            graph = Some(Graph::edgeless(h[0] as u32));
            declared = h[1] as usize;
            continue;
        }
        let g = graph.as_mut().ok_or(ParseError::MissingHeader { line })?;
        let toks: Vec<&str> = content.split_whitespace().collect();
        let pair: &[&str] = match toks.as_slice() {
            ["e", rest @ ..] => rest,
            other => other,
        };
        if pair.len() != 2 {
            return Err(ParseError::BadToken {
                line,
                token: content.to_string(),
            });
        }
        let mut ends = [0u32; 2];
        for (slot, tok) in ends.iter_mut().zip(pair) {
            let v: i64 = tok.parse().map_err(|_| ParseError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if v < 1 || v > g.num_vertices() as i64 {
                return Err(ParseError::VertexOutOfRange {
                    line,
                    vertex: v,
                    num_vertices: g.num_vertices(),
                });
            }
            *slot = v as u32;
        }
        if ends[0] == ends[1] {
            return Err(ParseError::SelfLoop {
                line,
                vertex: ends[0],
            });
        }
        g.add_edge(ends[0], ends[1]);
    }

    let g = graph.ok_or(ParseError::NoHeader)?;
    if g.num_edges() != declared {
        warnings.push(format!(
            "header declares {declared} edges but {} distinct edges were read",
            g.num_edges()
        ));
    }
    Ok(Parsed { value: g, warnings })
}

/// The running-example formula: `p cnf 4 4` with clauses
/// {-1,2,3}, {1,-2,-3}, {1,4}, {1,-4}.
#[cfg(test)]
pub fn example_formula() -> CnfFormula {
    CnfFormula::new(
        4,
        vec![vec![-1, 2, 3], vec![1, -2, -3], vec![1, 4], vec![1, -4]],
    )
}

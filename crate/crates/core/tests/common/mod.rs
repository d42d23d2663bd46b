//! Shared test support: fixtures, random instance generators, a nicifier,
//! and literal case-dispatched implementations of the five table
//! algorithms, used as a reference semantics on nice decompositions.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::One;
use rand::rngs::StdRng;
use rand::Rng;

use treedp::decomp::TreeDecomposition;
use treedp::engine::var_col;
use treedp::instance::{Clause, CnfFormula, Graph, PartialMaxSatInstance, Var};
use treedp::relalg::{self, Aggregate, Column, Domain, Formula, Row, Table, Value, ValueExpr};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture readable")
}

// ---------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------

/// Random CNF with up to `max_n` variables and `max_m` clauses of 1..=3
/// literals. Every variable occurs in some clause.
pub fn random_cnf(rng: &mut StdRng, max_n: u32, max_m: usize) -> CnfFormula {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let mut clauses: Vec<Vec<i32>> = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=3usize);
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=n) as i32;
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    // Give unused variables a home so the primal graph covers them.
    let mut used = vec![false; n as usize + 1];
    for c in &clauses {
        for &l in c {
            used[l.unsigned_abs() as usize] = true;
        }
    }
    for v in 1..=n {
        if !used[v as usize] {
            let idx = rng.gen_range(0..clauses.len());
            let lit = if rng.gen_bool(0.5) {
                v as i32
            } else {
                -(v as i32)
            };
            clauses[idx].push(lit);
        }
    }
    CnfFormula::new(n, clauses)
}

/// Random CNF that may leave variables unused (for free-variable paths).
pub fn random_cnf_with_free(rng: &mut StdRng, max_n: u32, max_m: usize) -> CnfFormula {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let clauses: Vec<Vec<i32>> = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=3usize);
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=n) as i32;
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses)
}

pub fn random_graph(rng: &mut StdRng, max_n: u32) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let density: f64 = rng.gen_range(0.0..=0.9);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random graph where every vertex has a neighbor (no free items).
pub fn random_connected_ish_graph(rng: &mut StdRng, max_n: u32) -> Graph {
    let n = rng.gen_range(2..=max_n.max(2));
    let mut edges: Vec<(Var, Var)> = Vec::new();
    // A random spanning structure keeps everyone attached.
    for v in 2..=n {
        let u = rng.gen_range(1..v);
        edges.push((u, v));
    }
    let extra = rng.gen_range(0..=n as usize);
    for _ in 0..extra {
        let u = rng.gen_range(1..=n);
        let v = rng.gen_range(1..=n);
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn random_maxsat(rng: &mut StdRng, max_n: u32, max_m: usize) -> PartialMaxSatInstance {
    let hard = random_cnf_with_free(rng, max_n, max_m);
    let n = hard.num_vars;
    let soft_count = rng.gen_range(0..=max_m);
    let soft: Vec<Clause> = (0..soft_count)
        .map(|_| {
            let len = rng.gen_range(1..=3usize);
            Clause::new(
                (0..len)
                    .map(|_| {
                        let v = rng.gen_range(1..=n) as i32;
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    PartialMaxSatInstance { hard, soft }
}

// ---------------------------------------------------------------------
// Nicifier
// ---------------------------------------------------------------------

/// Rebuild `td` as a nice decomposition: empty leaves, single-item
/// introduce/remove chains, binary joins on equal bags, empty root.
pub fn nicify(td: &TreeDecomposition) -> TreeDecomposition {
    struct Builder {
        bags: Vec<Vec<Var>>,
        parents: Vec<Option<usize>>,
    }
    impl Builder {
        fn push(&mut self, bag: Vec<Var>, children: &[usize]) -> usize {
            let id = self.bags.len();
            self.bags.push(bag);
            self.parents.push(None);
            for &c in children {
                self.parents[c] = Some(id);
            }
            id
        }

        /// Chain of remove/introduce nodes turning `from` into `to`.
        fn morph(&mut self, mut node: usize, from: &[Var], to: &[Var]) -> usize {
            let mut bag: Vec<Var> = from.to_vec();
            for &v in from.iter().filter(|v| !to.contains(v)) {
                bag.retain(|&u| u != v);
                node = self.push(bag.clone(), &[node]);
            }
            for &v in to.iter().filter(|v| !from.contains(v)) {
                bag.push(v);
                bag.sort_unstable();
                node = self.push(bag.clone(), &[node]);
            }
            node
        }

        fn build(&mut self, td: &TreeDecomposition, t: usize) -> usize {
            let bag = &td.node(t).bag;
            let kids: Vec<usize> = td
                .node(t)
                .children
                .iter()
                .map(|&c| {
                    let sub = self.build(td, c);
                    self.morph(sub, &td.node(c).bag, bag)
                })
                .collect();
            match kids.as_slice() {
                [] => {
                    let leaf = self.push(Vec::new(), &[]);
                    self.morph(leaf, &[], bag)
                }
                [only] => *only,
                [first, rest @ ..] => {
                    let mut acc = *first;
                    for &k in rest {
                        acc = self.push(bag.clone(), &[acc, k]);
                    }
                    acc
                }
            }
        }
    }

    let mut b = Builder {
        bags: Vec::new(),
        parents: Vec::new(),
    };
    let top = b.build(td, td.root());
    let root_bag = td.node(td.root()).bag.clone();
    b.morph(top, &root_bag, &[]);
    TreeDecomposition::from_parent_pointers(b.bags, b.parents, td.num_vertices())
        .expect("nicifier builds a tree")
}

/// Node types of a nice decomposition.
pub enum NiceCase {
    Leaf,
    Intro(Var),
    Remove(Var),
    Join,
}

pub fn classify(td: &TreeDecomposition, t: usize) -> NiceCase {
    let node = td.node(t);
    let bag = &node.bag;
    match node.children.as_slice() {
        [] => {
            assert!(bag.is_empty(), "nice leaves are empty");
            NiceCase::Leaf
        }
        [c] => {
            let child = &td.node(*c).bag;
            if bag.len() == child.len() + 1 {
                let v = *bag
                    .iter()
                    .find(|v| !child.contains(v))
                    .expect("introduced item");
                assert!(child.iter().all(|v| bag.contains(v)));
                NiceCase::Intro(v)
            } else if child.len() == bag.len() + 1 {
                let v = *child
                    .iter()
                    .find(|v| !bag.contains(v))
                    .expect("removed item");
                assert!(bag.iter().all(|v| child.contains(v)));
                NiceCase::Remove(v)
            } else {
                panic!("not a nice node: {bag:?} with child {child:?}");
            }
        }
        [a, b] => {
            assert_eq!(&td.node(*a).bag, bag);
            assert_eq!(&td.node(*b).bag, bag);
            NiceCase::Join
        }
        _ => panic!("nice nodes have at most two children"),
    }
}

// ---------------------------------------------------------------------
// Literal case-dispatched table algorithms (the reference semantics)
// ---------------------------------------------------------------------

/// One table algorithm given by its four nice-TD cases.
pub trait NiceAlgo {
    fn leaf(&self) -> Table;
    fn intro(&self, bag: &[Var], v: Var, child: &Table) -> Table;
    fn remove(&self, bag: &[Var], child_bag: &[Var], v: Var, child: &Table) -> Table;
    fn join(&self, bag: &[Var], left: &Table, right: &Table) -> Table;
}

/// Run a case-dispatched algorithm over a nice decomposition, returning
/// every node table.
pub fn run_nice<A: NiceAlgo>(algo: &A, td: &TreeDecomposition) -> Vec<Table> {
    let mut tables: Vec<Option<Table>> = (0..td.len()).map(|_| None).collect();
    for t in td.post_order() {
        let bag = &td.node(t).bag;
        let table = match classify(td, t) {
            NiceCase::Leaf => algo.leaf(),
            NiceCase::Intro(v) => {
                let c = td.node(t).children[0];
                algo.intro(bag, v, tables[c].as_ref().unwrap())
            }
            NiceCase::Remove(v) => {
                let c = td.node(t).children[0];
                algo.remove(bag, &td.node(c).bag, v, tables[c].as_ref().unwrap())
            }
            NiceCase::Join => {
                let a = td.node(t).children[0];
                let b = td.node(t).children[1];
                algo.join(
                    bag,
                    tables[a].as_ref().unwrap(),
                    tables[b].as_ref().unwrap(),
                )
            }
        };
        tables[t] = Some(table);
    }
    tables.into_iter().map(|t| t.unwrap()).collect()
}

fn lit_atom(l: i32) -> Formula {
    if l > 0 {
        Formula::var(var_col(l as Var))
    } else {
        Formula::not_var(var_col(l.unsigned_abs()))
    }
}

fn clause_or(c: &Clause) -> Formula {
    Formula::Or(c.lits().iter().map(|&l| lit_atom(l)).collect())
}

fn local_filter(clauses: &[Clause], bag: &[Var]) -> Formula {
    Formula::And(
        clauses
            .iter()
            .filter(|c| c.vars().all(|v| bag.contains(&v)))
            .map(clause_or)
            .collect(),
    )
}

fn bool_intro(v: Var) -> Table {
    relalg::Table::new(
        vec![Column::boolean(var_col(v))],
        vec![Row::new(vec![Value::Int(0)]), Row::new(vec![Value::Int(1)])],
    )
    .unwrap()
}

fn prime_all(t: &Table) -> Table {
    let mapping: Vec<(String, String)> = t
        .column_names()
        .map(|c| (c.to_string(), format!("{c}~")))
        .collect();
    relalg::rename(t, &mapping).unwrap()
}

fn equal_on_bag(bag: &[Var]) -> Formula {
    Formula::And(
        bag.iter()
            .map(|&v| Formula::EqCol(var_col(v), format!("{}~", var_col(v))))
            .collect(),
    )
}

fn bag_cols(bag: &[Var]) -> Vec<String> {
    bag.iter().map(|&v| var_col(v)).collect()
}

pub struct NiceSat {
    pub formula: CnfFormula,
}

impl NiceAlgo for NiceSat {
    fn leaf(&self) -> Table {
        Table::new(
            vec![Column::counter("cnt")],
            vec![Row::new(vec![Value::Count(BigUint::one())])],
        )
        .unwrap()
    }

    fn intro(&self, bag: &[Var], v: Var, child: &Table) -> Table {
        relalg::theta_join(
            child,
            &bool_intro(v),
            &local_filter(&self.formula.clauses, bag),
        )
        .unwrap()
    }

    fn remove(&self, bag: &[Var], _child_bag: &[Var], _v: Var, child: &Table) -> Table {
        let group = bag_cols(bag);
        let refs: Vec<&str> = group.iter().map(String::as_str).collect();
        relalg::group_aggregate(
            child,
            &refs,
            &[(
                Column::counter("cnt"),
                Aggregate::sum(ValueExpr::col("cnt")),
            )],
        )
        .unwrap()
    }

    fn join(&self, bag: &[Var], left: &Table, right: &Table) -> Table {
        let joined = relalg::theta_join(left, &prime_all(right), &equal_on_bag(bag)).unwrap();
        let keep = bag_cols(bag);
        let refs: Vec<&str> = keep.iter().map(String::as_str).collect();
        relalg::extended_project(
            &joined,
            &refs,
            &[(
                Column::counter("cnt"),
                ValueExpr::Mul(vec![ValueExpr::col("cnt"), ValueExpr::col("cnt~")]),
            )],
        )
        .unwrap()
    }
}

pub struct NiceCol {
    pub graph: Graph,
    pub colors: u32,
}

impl NiceCol {
    fn edge_filter(&self, bag: &[Var]) -> Formula {
        Formula::And(
            self.graph
                .local_edges(bag)
                .into_iter()
                .map(|(u, v)| Formula::Not(Box::new(Formula::EqCol(var_col(u), var_col(v)))))
                .collect(),
        )
    }
}

impl NiceAlgo for NiceCol {
    fn leaf(&self) -> Table {
        Table::new(
            vec![Column::counter("cnt")],
            vec![Row::new(vec![Value::Count(BigUint::one())])],
        )
        .unwrap()
    }

    fn intro(&self, bag: &[Var], v: Var, child: &Table) -> Table {
        let domain = Domain::BoundedInt {
            lo: 0,
            hi: self.colors as i64 - 1,
        };
        let intro = Table::new(
            vec![Column::new(var_col(v), domain)],
            (0..self.colors as i64)
                .map(|c| Row::new(vec![Value::Int(c)]))
                .collect(),
        )
        .unwrap();
        relalg::theta_join(child, &intro, &self.edge_filter(bag)).unwrap()
    }

    fn remove(&self, bag: &[Var], _child_bag: &[Var], _v: Var, child: &Table) -> Table {
        let group = bag_cols(bag);
        let refs: Vec<&str> = group.iter().map(String::as_str).collect();
        relalg::group_aggregate(
            child,
            &refs,
            &[(
                Column::counter("cnt"),
                Aggregate::sum(ValueExpr::col("cnt")),
            )],
        )
        .unwrap()
    }

    fn join(&self, bag: &[Var], left: &Table, right: &Table) -> Table {
        let joined = relalg::theta_join(left, &prime_all(right), &equal_on_bag(bag)).unwrap();
        let keep = bag_cols(bag);
        let refs: Vec<&str> = keep.iter().map(String::as_str).collect();
        relalg::extended_project(
            &joined,
            &refs,
            &[(
                Column::counter("cnt"),
                ValueExpr::Mul(vec![ValueExpr::col("cnt"), ValueExpr::col("cnt~")]),
            )],
        )
        .unwrap()
    }
}

pub struct NiceVc {
    pub graph: Graph,
}

impl NiceAlgo for NiceVc {
    fn leaf(&self) -> Table {
        Table::new(
            vec![Column::measure("card")],
            vec![Row::new(vec![Value::Int(0)])],
        )
        .unwrap()
    }

    fn intro(&self, bag: &[Var], v: Var, child: &Table) -> Table {
        let filter = Formula::And(
            self.graph
                .local_edges(bag)
                .into_iter()
                .map(|(u, w)| Formula::Or(vec![Formula::var(var_col(u)), Formula::var(var_col(w))]))
                .collect(),
        );
        relalg::theta_join(child, &bool_intro(v), &filter).unwrap()
    }

    fn remove(&self, bag: &[Var], _child_bag: &[Var], v: Var, child: &Table) -> Table {
        let group = bag_cols(bag);
        let refs: Vec<&str> = group.iter().map(String::as_str).collect();
        relalg::group_aggregate(
            child,
            &refs,
            &[(
                Column::measure("card"),
                Aggregate::min(ValueExpr::Add(vec![
                    ValueExpr::col("card"),
                    ValueExpr::col(var_col(v)),
                ])),
            )],
        )
        .unwrap()
    }

    fn join(&self, bag: &[Var], left: &Table, right: &Table) -> Table {
        let joined = relalg::theta_join(left, &prime_all(right), &equal_on_bag(bag)).unwrap();
        let keep = bag_cols(bag);
        let refs: Vec<&str> = keep.iter().map(String::as_str).collect();
        relalg::extended_project(
            &joined,
            &refs,
            &[(
                Column::measure("card"),
                ValueExpr::Add(vec![ValueExpr::col("card"), ValueExpr::col("card~")]),
            )],
        )
        .unwrap()
    }
}

pub struct NiceMaxSat {
    pub instance: PartialMaxSatInstance,
}

impl NiceAlgo for NiceMaxSat {
    fn leaf(&self) -> Table {
        Table::new(
            vec![Column::measure("card")],
            vec![Row::new(vec![Value::Int(0)])],
        )
        .unwrap()
    }

    fn intro(&self, bag: &[Var], v: Var, child: &Table) -> Table {
        relalg::theta_join(
            child,
            &bool_intro(v),
            &local_filter(&self.instance.hard.clauses, bag),
        )
        .unwrap()
    }

    fn remove(&self, bag: &[Var], child_bag: &[Var], _v: Var, child: &Table) -> Table {
        // Soft clauses local to the child whose scope just closed.
        let disposed: Vec<&Clause> = self
            .instance
            .soft
            .iter()
            .filter(|c| !c.is_empty())
            .filter(|c| c.vars().all(|u| child_bag.contains(&u)))
            .filter(|c| !c.vars().all(|u| bag.contains(&u)))
            .collect();
        let mut terms = vec![ValueExpr::col("card")];
        terms.extend(disposed.iter().map(|c| ValueExpr::Pred(clause_or(c))));
        let group = bag_cols(bag);
        let refs: Vec<&str> = group.iter().map(String::as_str).collect();
        relalg::group_aggregate(
            child,
            &refs,
            &[(
                Column::measure("card"),
                Aggregate::max(ValueExpr::Add(terms)),
            )],
        )
        .unwrap()
    }

    fn join(&self, bag: &[Var], left: &Table, right: &Table) -> Table {
        let joined = relalg::theta_join(left, &prime_all(right), &equal_on_bag(bag)).unwrap();
        let keep = bag_cols(bag);
        let refs: Vec<&str> = keep.iter().map(String::as_str).collect();
        relalg::extended_project(
            &joined,
            &refs,
            &[(
                Column::measure("card"),
                ValueExpr::Add(vec![ValueExpr::col("card"), ValueExpr::col("card~")]),
            )],
        )
        .unwrap()
    }
}

pub struct NiceIds {
    pub graph: Graph,
}

fn dom(v: Var) -> String {
    format!("d{v}")
}

impl NiceAlgo for NiceIds {
    fn leaf(&self) -> Table {
        Table::new(
            vec![Column::measure("card")],
            vec![Row::new(vec![Value::Int(0)])],
        )
        .unwrap()
    }

    fn intro(&self, bag: &[Var], v: Var, child: &Table) -> Table {
        let intro = Table::new(
            vec![Column::boolean(var_col(v)), Column::boolean(dom(v))],
            vec![
                Row::new(vec![Value::Int(0), Value::Int(0)]),
                Row::new(vec![Value::Int(1), Value::Int(1)]),
            ],
        )
        .unwrap();
        let independence = Formula::And(
            self.graph
                .local_edges(bag)
                .into_iter()
                .map(|(u, w)| {
                    Formula::Or(vec![
                        Formula::not_var(var_col(u)),
                        Formula::not_var(var_col(w)),
                    ])
                })
                .collect(),
        );
        let joined = relalg::theta_join(child, &intro, &independence).unwrap();
        // Update every bag vertex's domination flag with its selected
        // local neighbors; keep card as is.
        let mut compute: Vec<(Column, ValueExpr)> = bag
            .iter()
            .map(|&u| {
                let mut terms = vec![ValueExpr::col(dom(u))];
                for w in self.graph.neighbors(u) {
                    if bag.contains(&w) {
                        terms.push(ValueExpr::col(var_col(w)));
                    }
                }
                (Column::boolean(dom(u)), ValueExpr::Or(terms))
            })
            .collect();
        compute.push((Column::measure("card"), ValueExpr::col("card")));
        let keep = bag_cols(bag);
        let refs: Vec<&str> = keep.iter().map(String::as_str).collect();
        relalg::extended_project(&joined, &refs, &compute).unwrap()
    }

    fn remove(&self, bag: &[Var], _child_bag: &[Var], v: Var, child: &Table) -> Table {
        let filtered = relalg::select(child, &Formula::var(dom(v))).unwrap();
        let mut group = bag_cols(bag);
        group.extend(bag.iter().map(|&u| dom(u)));
        let refs: Vec<&str> = group.iter().map(String::as_str).collect();
        relalg::group_aggregate(
            &filtered,
            &refs,
            &[(
                Column::measure("card"),
                Aggregate::min(ValueExpr::Add(vec![
                    ValueExpr::col("card"),
                    ValueExpr::col(var_col(v)),
                ])),
            )],
        )
        .unwrap()
    }

    fn join(&self, bag: &[Var], left: &Table, right: &Table) -> Table {
        let joined = relalg::theta_join(left, &prime_all(right), &equal_on_bag(bag)).unwrap();
        let mut compute: Vec<(Column, ValueExpr)> = bag
            .iter()
            .map(|&u| {
                (
                    Column::boolean(dom(u)),
                    ValueExpr::Or(vec![
                        ValueExpr::col(dom(u)),
                        ValueExpr::col(format!("{}~", dom(u))),
                    ]),
                )
            })
            .collect();
        compute.push((
            Column::measure("card"),
            ValueExpr::Add(vec![ValueExpr::col("card"), ValueExpr::col("card~")]),
        ));
        let keep = bag_cols(bag);
        let refs: Vec<&str> = keep.iter().map(String::as_str).collect();
        relalg::extended_project(&joined, &refs, &compute).unwrap()
    }
}

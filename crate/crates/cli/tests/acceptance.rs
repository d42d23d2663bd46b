//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines; timings are asserted where the criterion states
//! them.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use treedp::decomp::{decompose, read_td, write_td};
use treedp::engine::{prepare_generated_td, run_dp, EngineConfig, ProblemBundle, SolutionKind};
use treedp::instance::{
    parse_dimacs_cnf, parse_dimacs_graph, Clause, CnfFormula, Graph, PartialMaxSatInstance,
};
use treedp::problems::{oracle, ColBundle, IdsBundle, MaxSatBundle, SharpSatBundle, VcBundle};
use treedp::relalg::{self, Aggregate, Column, Formula, Row, Table, Value, ValueExpr};

fn fixture_path(name: &str) -> String {
    format!(
        "{}/../core/tests/fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    )
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treedp"))
}

fn sequential() -> EngineConfig {
    EngineConfig {
        workers: 1,
        ..EngineConfig::default()
    }
}

fn pass(line: &str) {
    println!("acceptance {line}: PASS");
}

// -----------------------------------------------------------------------
// Criterion 1: golden traces on the worked nice decomposition.
// -----------------------------------------------------------------------

#[test]
fn criterion_1_trace_golden() {
    let started = Instant::now();
    let output = binary()
        .args([
            "--problem",
            "sharpsat",
            "--input",
            &fixture_path("example4.cnf"),
            "--td",
            &fixture_path("example4-nice.td"),
            "--debug",
            "--workers",
            "1",
        ])
        .output()
        .expect("binary runs");
    let elapsed = started.elapsed();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).unwrap();

    let rows_of = |node: usize| -> Vec<String> {
        let header = format!("node {node} ");
        let block = stdout
            .split("\n\n")
            .find(|b| b.trim_start().starts_with(&header))
            .unwrap_or_else(|| panic!("no dump for node {node}"));
        block
            .lines()
            .skip_while(|l| !l.starts_with("in "))
            .skip(1)
            .map(str::to_string)
            .collect()
    };

    let mut tau6 = rows_of(6);
    tau6.sort();
    assert_eq!(tau6, vec!["0 3".to_string(), "1 3".into()], "tau6 mismatch");
    assert_eq!(rows_of(10), vec!["1 2".to_string()], "tau10 mismatch");
    assert_eq!(rows_of(12), vec!["6".to_string()], "tau12 mismatch");
    assert_eq!(stdout.lines().last(), Some("s 6"), "final count");
    assert!(
        elapsed < Duration::from_secs(1),
        "took {elapsed:?}, limit 1s"
    );
    pass("criterion 1 (golden traces: tau6/tau10/tau12 exact, count 6, <1s)");
}

// -----------------------------------------------------------------------
// Criterion 2: relational-algebra golden tests.
// -----------------------------------------------------------------------

#[test]
fn criterion_2_relalg_goldens() {
    let started = Instant::now();
    let tau1 = Table::new(
        vec![Column::boolean("a"), Column::boolean("b")],
        vec![
            Row::new(vec![Value::Int(1), Value::Int(1)]),
            Row::new(vec![Value::Int(0), Value::Int(0)]),
            Row::new(vec![Value::Int(0), Value::Int(1)]),
        ],
    )
    .unwrap();

    // Selection sigma_{b=1}(tau1) = {r1, r3}.
    let selected = relalg::select(&tau1, &Formula::var("b")).unwrap();
    let expected = Table::new(
        vec![Column::boolean("a"), Column::boolean("b")],
        vec![
            Row::new(vec![Value::Int(1), Value::Int(1)]),
            Row::new(vec![Value::Int(0), Value::Int(1)]),
        ],
    )
    .unwrap();
    assert!(selected.set_eq(&expected), "selection golden");

    // θ-join of tau1 with the primed swap of tau1 on a=a' and b=b'.
    let tau2 =
        relalg::rename(&tau1, &[("a".into(), "b".into()), ("b".into(), "a".into())]).unwrap();
    let primed = relalg::rename(
        &tau2,
        &[("a".into(), "ap".into()), ("b".into(), "bp".into())],
    )
    .unwrap();
    let tau3 = relalg::theta_join(
        &tau1,
        &primed,
        &Formula::And(vec![
            Formula::EqCol("a".into(), "ap".into()),
            Formula::EqCol("b".into(), "bp".into()),
        ]),
    )
    .unwrap();
    assert_eq!(
        tau3.len(),
        2,
        "theta-join golden has the two all-equal rows"
    );
    for row in tau3.rows() {
        let vals: Vec<i64> = row.values().iter().map(|v| v.as_int().unwrap()).collect();
        assert!(
            vals.iter().all(|&x| x == vals[0]),
            "row not constant: {vals:?}"
        );
    }

    // Extended projection to {a} with c <- a + b.
    let extended = relalg::extended_project(
        &tau1,
        &["a"],
        &[(
            Column::measure("c"),
            ValueExpr::Add(vec![ValueExpr::col("a"), ValueExpr::col("b")]),
        )],
    )
    .unwrap();
    let expected = Table::new(
        vec![Column::boolean("a"), Column::measure("c")],
        vec![
            Row::new(vec![Value::Int(1), Value::Int(2)]),
            Row::new(vec![Value::Int(0), Value::Int(0)]),
            Row::new(vec![Value::Int(0), Value::Int(1)]),
        ],
    )
    .unwrap();
    assert!(extended.set_eq(&expected), "extended projection golden");

    // Grouping by {a} with d <- SUM(b).
    let grouped = relalg::group_aggregate(
        &tau1,
        &["a"],
        &[(Column::measure("d"), Aggregate::sum(ValueExpr::col("b")))],
    )
    .unwrap();
    let expected = Table::new(
        vec![Column::boolean("a"), Column::measure("d")],
        vec![
            Row::new(vec![Value::Int(1), Value::Int(1)]),
            Row::new(vec![Value::Int(0), Value::Int(1)]),
        ],
    )
    .unwrap();
    assert!(grouped.set_eq(&expected), "grouping golden");

    assert!(started.elapsed() < Duration::from_millis(500));
    pass("criterion 2 (four worked relational-algebra results exact)");
}

// -----------------------------------------------------------------------
// Criterion 3: oracle equivalence at spec volume.
// -----------------------------------------------------------------------

fn random_cnf(rng: &mut StdRng, max_n: u32, max_m: usize) -> CnfFormula {
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

fn random_graph(rng: &mut StdRng, max_n: u32) -> Graph {
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

fn random_maxsat(rng: &mut StdRng, max_n: u32, max_m: usize) -> PartialMaxSatInstance {
    let hard = random_cnf(rng, max_n, max_m);
    let n = hard.num_vars;
    let soft: Vec<Clause> = (0..rng.gen_range(0..=max_m))
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

#[test]
fn criterion_3_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(33_000);

    // 500 CNFs, n <= 12, two decomposition seeds each.
    for trial in 0..500u64 {
        let f = random_cnf(&mut rng, 12, 24);
        let expected = SolutionKind::Count(oracle::count_models(&f).unwrap());
        let bundle = SharpSatBundle::new(f);
        for seed in [2 * trial, 2 * trial + 1] {
            let td = prepare_generated_td(&bundle, seed, 5);
            let got = run_dp(&bundle, &td, &sequential()).unwrap().solution;
            assert_eq!(got, expected, "sharpsat trial {trial} seed {seed}");
        }
    }

    // 500 graphs, n <= 10: coloring (o in {2,3}), vertex cover, IDS.
    for trial in 0..500u64 {
        let g = random_graph(&mut rng, 10);
        for colors in [2u32, 3] {
            let expected = SolutionKind::Count(oracle::count_colorings(&g, colors).unwrap());
            let bundle = ColBundle::new(g.clone(), colors);
            for seed in [2 * trial, 2 * trial + 1] {
                let td = prepare_generated_td(&bundle, seed, 5);
                let got = run_dp(&bundle, &td, &sequential()).unwrap().solution;
                assert_eq!(got, expected, "col{colors} trial {trial} seed {seed}");
            }
        }
        let expected = SolutionKind::Optimum(oracle::min_vertex_cover(&g).unwrap());
        let bundle = VcBundle::new(g.clone());
        for seed in [2 * trial, 2 * trial + 1] {
            let td = prepare_generated_td(&bundle, seed, 5);
            let got = run_dp(&bundle, &td, &sequential()).unwrap().solution;
            assert_eq!(got, expected, "vc trial {trial} seed {seed}");
        }
        let expected = SolutionKind::Optimum(oracle::min_independent_dominating_set(&g).unwrap());
        let bundle = IdsBundle::new(g.clone());
        for seed in [2 * trial, 2 * trial + 1] {
            let td = prepare_generated_td(&bundle, seed, 5);
            let got = run_dp(&bundle, &td, &sequential()).unwrap().solution;
            assert_eq!(got, expected, "ids trial {trial} seed {seed}");
        }
    }

    // 200 partial MaxSAT instances, n <= 10, including unsat detection.
    let mut unsat_seen = 0;
    for trial in 0..200u64 {
        let inst = random_maxsat(&mut rng, 10, 12);
        let expected = match oracle::max_satisfied_soft(&inst).unwrap() {
            Some(best) => SolutionKind::Optimum(best),
            None => {
                unsat_seen += 1;
                SolutionKind::Unsat
            }
        };
        let bundle = MaxSatBundle::new(inst);
        for seed in [2 * trial, 2 * trial + 1] {
            let td = prepare_generated_td(&bundle, seed, 5);
            let got = run_dp(&bundle, &td, &sequential()).unwrap().solution;
            assert_eq!(got, expected, "maxsat trial {trial} seed {seed}");
        }
    }
    assert!(
        unsat_seen > 0,
        "the MaxSAT sample should include unsat instances"
    );

    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "took {elapsed:?}, limit 5min"
    );
    pass("criterion 3 (500 CNFs + 500 graphs + 200 MaxSAT match the oracles, 2 seeds each, <5min)");
}

// -----------------------------------------------------------------------
// Criterion 4: determinism across worker counts.
// -----------------------------------------------------------------------

#[test]
fn criterion_4_worker_determinism() {
    let mut rng = StdRng::seed_from_u64(44_000);
    let max_workers = std::thread::available_parallelism()
        .map_or(4, |p| p.get())
        .max(2);
    let debug1 = EngineConfig {
        workers: 1,
        debug: true,
        ..EngineConfig::default()
    };
    let debug_max = EngineConfig {
        workers: max_workers,
        debug: true,
        ..EngineConfig::default()
    };

    for trial in 0..50u64 {
        // Rotate through the five problems.
        let (a, b) = match trial % 5 {
            0 => {
                let bundle = SharpSatBundle::new(random_cnf(&mut rng, 12, 20));
                let td = prepare_generated_td(&bundle, trial, 5);
                (
                    run_dp(&bundle, &td, &debug1).unwrap(),
                    run_dp(&bundle, &td, &debug_max).unwrap(),
                )
            }
            1 => {
                let bundle = ColBundle::new(random_graph(&mut rng, 9), 3);
                let td = prepare_generated_td(&bundle, trial, 5);
                (
                    run_dp(&bundle, &td, &debug1).unwrap(),
                    run_dp(&bundle, &td, &debug_max).unwrap(),
                )
            }
            2 => {
                let bundle = VcBundle::new(random_graph(&mut rng, 9));
                let td = prepare_generated_td(&bundle, trial, 5);
                (
                    run_dp(&bundle, &td, &debug1).unwrap(),
                    run_dp(&bundle, &td, &debug_max).unwrap(),
                )
            }
            3 => {
                let bundle = MaxSatBundle::new(random_maxsat(&mut rng, 9, 10));
                let td = prepare_generated_td(&bundle, trial, 5);
                (
                    run_dp(&bundle, &td, &debug1).unwrap(),
                    run_dp(&bundle, &td, &debug_max).unwrap(),
                )
            }
            _ => {
                let bundle = IdsBundle::new(random_graph(&mut rng, 9));
                let td = prepare_generated_td(&bundle, trial, 5);
                (
                    run_dp(&bundle, &td, &debug1).unwrap(),
                    run_dp(&bundle, &td, &debug_max).unwrap(),
                )
            }
        };
        assert_eq!(a.solution, b.solution, "trial {trial}");
        let ta = a.trace.unwrap();
        let tb = b.trace.unwrap();
        assert_eq!(ta.len(), tb.len());
        for (x, y) in ta.iter().zip(&tb) {
            assert!(x.table.set_eq(&y.table), "trial {trial}, node {}", x.node);
            assert_eq!(x.render(), y.render(), "trial {trial}, node {}", x.node);
        }
    }
    pass(
        "criterion 4 (50 instances: solutions and per-node tables identical for 1 and max workers)",
    );
}

// -----------------------------------------------------------------------
// Criterion 5: decomposition quality.
// -----------------------------------------------------------------------

#[test]
fn criterion_5_td_quality() {
    // The 4-vertex example graph has treewidth 2 and min-fill must reach it.
    let example = Graph::from_edges(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]);
    let td = decompose(&example, 0);
    assert_eq!(td.validate(&example), Ok(()));
    assert_eq!(td.width(), 2, "example graph");

    // 100 random trees: width exactly 1.
    let mut rng = StdRng::seed_from_u64(55_000);
    for trial in 0..100u64 {
        let n = rng.gen_range(2..=40u32);
        let edges: Vec<(u32, u32)> = (2..=n).map(|v| (rng.gen_range(1..v), v)).collect();
        let tree = Graph::from_edges(n, &edges);
        let td = decompose(&tree, trial);
        assert_eq!(td.validate(&tree), Ok(()), "tree {trial}");
        assert_eq!(td.width(), 1, "tree {trial}");
    }

    // Planted k-cliques force width >= k-1.
    for trial in 0..40u64 {
        let k = rng.gen_range(3..=6u32);
        let n = rng.gen_range(k..=12u32);
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                if rng.gen_bool(0.2) {
                    edges.push((u, v));
                }
            }
        }
        // Plant the clique on vertices 1..=k.
        for u in 1..=k {
            for v in u + 1..=k {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(n, &edges);
        let td = decompose(&g, trial);
        assert_eq!(td.validate(&g), Ok(()), "clique {trial}");
        assert!(
            td.width() >= k as i64 - 1,
            "clique {trial}: width {} < {}",
            td.width(),
            k - 1
        );
    }
    pass("criterion 5 (example graph width 2; 100 trees width 1; planted cliques width >= k-1)");
}

// -----------------------------------------------------------------------
// Criterion 6: structural scale check on a width-20 chained-clique CNF.
// -----------------------------------------------------------------------

/// 2000 variables in blocks of 21 overlapping by one: each block carries an
/// implication chain (direction alternating per block) and one big
/// all-positive clause, so the primal graph is a chain of 21-cliques of
/// treewidth exactly 20, per-bag tables stay monotone-pattern small, and
/// the model count still grows by a factor of about twenty per block.
fn chained_clique_cnf() -> (CnfFormula, Vec<(u32, u32)>) {
    let n: u32 = 2000;
    let mut blocks: Vec<(u32, u32)> = Vec::new();
    let mut start = 1u32;
    loop {
        let end = (start + 20).min(n);
        blocks.push((start, end));
        if end == n {
            break;
        }
        start = end;
    }
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for (i, &(lo, hi)) in blocks.iter().enumerate() {
        clauses.push((lo..=hi).map(|v| v as i32).collect());
        for v in lo..hi {
            if i % 2 == 0 {
                clauses.push(vec![-(v as i32), v as i32 + 1]);
            } else {
                clauses.push(vec![v as i32, -(v as i32 + 1)]);
            }
        }
    }
    (CnfFormula::new(n, clauses), blocks)
}

/// Independent transfer-matrix count: enumerate each block's assignments
/// (bucketed by the boundary values), then chain the per-block tallies over
/// the shared variable. Identical blocks share one enumeration.
fn chained_count(f: &CnfFormula, blocks: &[(u32, u32)]) -> BigUint {
    use std::collections::HashMap;

    // Local clauses of a block, remapped to bit positions 0..len.
    let local = |lo: u32, hi: u32| -> Vec<Clause> {
        f.clauses
            .iter()
            .filter(|c| c.vars().all(|v| lo <= v && v <= hi))
            .map(|c| {
                Clause::new(
                    c.lits()
                        .iter()
                        .map(|&l| {
                            let bit = (l.unsigned_abs() - lo + 1) as i32;
                            if l > 0 {
                                bit
                            } else {
                                -bit
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    };

    // tally[first][last] = number of block assignments with those boundary
    // values.
    let tally = |clauses: &[Clause], len: u32| -> [[u64; 2]; 2] {
        let mut out = [[0u64; 2]; 2];
        for mask in 0..1u64 << len {
            if clauses.iter().all(|c| c.satisfied_by_mask(mask)) {
                let first = (mask & 1) as usize;
                let last = (mask >> (len - 1) & 1) as usize;
                out[first][last] += 1;
            }
        }
        out
    };

    let mut cache: HashMap<Vec<Clause>, [[u64; 2]; 2]> = HashMap::new();
    let mut boundary: Option<[BigUint; 2]> = None;
    for &(lo, hi) in blocks {
        let len = hi - lo + 1;
        let clauses = local(lo, hi);
        let t = *cache
            .entry(clauses.clone())
            .or_insert_with(|| tally(&clauses, len));
        boundary = Some(match boundary {
            // First block: both boundaries free, bucket by the last value.
            None => [
                BigUint::from(t[0][0] + t[1][0]),
                BigUint::from(t[0][1] + t[1][1]),
            ],
            // Later blocks share their first variable with the previous
            // block's last; gluing assignments that agree on it is a
            // bijection, so the boundary-bucketed product is exact.
            Some(prev) => [
                &prev[0] * t[0][0] + &prev[1] * t[1][0],
                &prev[0] * t[0][1] + &prev[1] * t[1][1],
            ],
        });
    }
    let [zero, one] = boundary.expect("at least one block");
    zero + one
}

#[test]
fn criterion_6_structural_scale() {
    let started = Instant::now();
    let (f, blocks) = chained_clique_cnf();
    assert_eq!(f.num_vars, 2000);

    let expected = chained_count(&f, &blocks);
    assert!(expected.bits() > 64, "the count should dwarf u64");

    let bundle = SharpSatBundle::new(f);
    let td = prepare_generated_td(&bundle, 0, 5);
    assert_eq!(td.validate(bundle.graph()), Ok(()));
    assert!(
        td.width() <= 20,
        "chained cliques decompose to width 20, got {}",
        td.width()
    );

    let out = run_dp(&bundle, &td, &EngineConfig::default()).unwrap();
    assert_eq!(out.solution, SolutionKind::Count(expected));

    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "took {elapsed:?}, limit 60s"
    );
    pass("criterion 6 (2000-var width-20 chained cliques: exact #SAT under 60s, default row cap)");
}

// -----------------------------------------------------------------------
// Criterion 7: format conformance.
// -----------------------------------------------------------------------

#[test]
fn criterion_7_format_conformance() {
    // PACE round trip: canonical text is reproduced byte for byte, and
    // generated decompositions survive write-read.
    let nice = fixture("example4-nice.td");
    let td = read_td(&nice).unwrap().value;
    assert_eq!(write_td(&td), nice, "the fixture is canonical");
    let mut rng = StdRng::seed_from_u64(77_000);
    for trial in 0..20u64 {
        let g = random_graph(&mut rng, 12);
        let td = decompose(&g, trial);
        let text = write_td(&td);
        let again = read_td(&text).unwrap().value;
        assert_eq!(write_td(&again), text, "round trip {trial}");
        assert_eq!(again.validate(&g), Ok(()), "round trip {trial} validates");
    }

    // The example instance parses byte-exactly.
    let cnf = fixture("example4.cnf");
    let parsed = parse_dimacs_cnf(&cnf).unwrap();
    assert!(parsed.warnings.is_empty());
    assert_eq!(parsed.value.num_vars, 4);
    assert_eq!(parsed.value.clauses.len(), 4);
    let expect = CnfFormula::new(
        4,
        vec![vec![-1, 2, 3], vec![1, -2, -3], vec![1, 4], vec![1, -4]],
    );
    assert_eq!(parsed.value, expect);

    // Graph parsing of the example graph.
    let g = parse_dimacs_graph("p edge 4 4\ne 1 2\ne 1 3\ne 2 3\ne 1 4\n")
        .unwrap()
        .value;
    assert_eq!(g.num_edges(), 4);

    // A weight-5 soft clause is rejected with exit code 2.
    let dir = std::env::temp_dir().join("treedp-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let wcnf = dir.join("weight5.wcnf");
    std::fs::write(&wcnf, "p wcnf 2 2 10\n10 1 0\n5 1 2 0\n").unwrap();
    let output = binary()
        .args(["--problem", "maxsat", "--input", wcnf.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert_eq!(
        output.status.code(),
        Some(2),
        "weight-5 soft clause must exit 2"
    );
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("weight"),
        "diagnostic names the weight: {stderr}"
    );

    pass("criterion 7 (PACE round-trip identity; example CNF byte-exact; weight-5 soft clause exits 2)");
}

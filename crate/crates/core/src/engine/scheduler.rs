//! Bottom-up scheduling of node-table computations.
//!
//! A node becomes ready once all its children are complete; ready nodes are
//! handed to a fixed pool of workers. Tables are written exactly once and
//! read only by the parent's computation, so results are independent of the
//! schedule. Unless `keep_tables` is set, child tables are dropped as soon
//! as the parent is done, bounding memory to the active frontier.

use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex};

use crate::decomp::TreeDecomposition;
use crate::relalg::Table;

use super::EngineError;

pub(crate) struct ScheduleOutcome {
    pub tables: Vec<Option<Arc<Table>>>,
    pub row_counts: Vec<usize>,
}

struct Shared {
    queue: VecDeque<usize>,
    pending: Vec<usize>,
    remaining: usize,
    error: Option<EngineError>,
}

pub(crate) fn run<F>(
    td: &TreeDecomposition,
    workers: usize,
    keep_tables: bool,
    compute: F,
) -> Result<ScheduleOutcome, EngineError>
where
    F: Fn(usize, &[Arc<Table>]) -> Result<Table, EngineError> + Sync,
{
    let n = td.len();
    if workers <= 1 {
        return run_sequential(td, keep_tables, compute);
    }

    let pending: Vec<usize> = td.nodes().iter().map(|node| node.children.len()).collect();
    let queue: VecDeque<usize> = (0..n).filter(|&t| td.node(t).children.is_empty()).collect();
    let shared = Mutex::new(Shared {
        queue,
        pending,
        remaining: n,
        error: None,
    });
    let ready = Condvar::new();
    let tables: Vec<Mutex<Option<Arc<Table>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let row_counts: Vec<Mutex<usize>> = (0..n).map(|_| Mutex::new(0)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let t = {
                    let mut s = shared.lock().unwrap();
                    loop {
                        if s.error.is_some() || s.remaining == 0 {
                            return;
                        }
                        if let Some(t) = s.queue.pop_front() {
                            break t;
                        }
                        s = ready.wait(s).unwrap();
                    }
                };

                let children = &td.node(t).children;
                let child_tables: Vec<Arc<Table>> = children
                    .iter()
                    .map(|&c| tables[c].lock().unwrap().clone().expect("child complete"))
                    .collect();
                match compute(t, &child_tables) {
                    Err(e) => {
                        let mut s = shared.lock().unwrap();
                        if s.error.is_none() {
                            s.error = Some(e);
                        }
                        ready.notify_all();
                        return;
                    }
                    Ok(table) => {
                        *row_counts[t].lock().unwrap() = table.len();
                        *tables[t].lock().unwrap() = Some(Arc::new(table));
                        if !keep_tables {
                            for &c in children {
                                *tables[c].lock().unwrap() = None;
                            }
                        }
                        let mut s = shared.lock().unwrap();
                        s.remaining -= 1;
                        if let Some(p) = td.node(t).parent {
                            s.pending[p] -= 1;
                            if s.pending[p] == 0 {
                                s.queue.push_back(p);
                            }
                        }
                        ready.notify_all();
                    }
                }
            });
        }
    });

    let mut s = shared.into_inner().unwrap();
    if let Some(e) = s.error.take() {
        return Err(e);
    }
    Ok(ScheduleOutcome {
        tables: tables
            .into_iter()
            .map(|m| m.into_inner().unwrap())
            .collect(),
        row_counts: row_counts
            .into_iter()
            .map(|m| m.into_inner().unwrap())
            .collect(),
    })
}

fn run_sequential<F>(
    td: &TreeDecomposition,
    keep_tables: bool,
    compute: F,
) -> Result<ScheduleOutcome, EngineError>
where
    F: Fn(usize, &[Arc<Table>]) -> Result<Table, EngineError>,
{
    let n = td.len();
    let mut tables: Vec<Option<Arc<Table>>> = vec![None; n];
    let mut row_counts = vec![0usize; n];
    for t in td.post_order() {
        let children = &td.node(t).children;
        let child_tables: Vec<Arc<Table>> = children
            .iter()
            .map(|&c| tables[c].clone().expect("child complete"))
            .collect();
        let table = compute(t, &child_tables)?;
        row_counts[t] = table.len();
        tables[t] = Some(Arc::new(table));
        if !keep_tables {
            for &c in children {
                tables[c] = None;
            }
        }
    }
    Ok(ScheduleOutcome { tables, row_counts })
}

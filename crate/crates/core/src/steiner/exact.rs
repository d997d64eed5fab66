//! Exact Steiner trees by dynamic programming over terminal subsets.
//!
//! `best[S][v]` is the cheapest tree spanning the terminal subset `S` plus
//! node `v`. Each level first merges two complementary sub-trees at the same
//! node, then lets trees grow along edges with one multi-source Dijkstra pass
//! per subset. One terminal serves as the root and is left out of the subset
//! lattice, halving the table. Runtime is `O(3^k·n + 2^k·m log n)`.

use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::tree::{Cost, HeapItem, SolverKind, SteinerTree};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, WeightedWireGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Back {
    None,
    Edge(u32),
    Merge(u32),
}

const ENTRY_BYTES: usize = std::mem::size_of::<Cost>() + std::mem::size_of::<Back>();

/// Bytes of DP table needed for `terminals` distinct terminals on `nodes`
/// nodes.
pub fn table_bytes(terminals: usize, nodes: usize) -> usize {
    if terminals <= 1 {
        return 0;
    }
    (1usize << (terminals - 1))
        .saturating_mul(nodes)
        .saturating_mul(ENTRY_BYTES)
}

pub fn solve_exact(graph: &WeightedWireGraph, cap: usize, memory_budget: usize) -> Result<SteinerTree> {
    graph.validate()?;
    let mut terms = graph.terminals.clone();
    terms.sort_unstable();
    terms.dedup();
    if terms.len() > cap {
        return Err(Error::TerminalCapExceeded {
            terminals: terms.len(),
            cap,
        });
    }
    graph.check_terminals_connected()?;
    if terms.len() <= 1 {
        return Ok(SteinerTree::from_tree_edges(graph, Vec::new(), SolverKind::ExactDw));
    }
    let needed = table_bytes(terms.len(), graph.node_count);
    if needed > memory_budget {
        return Err(Error::MemoryBudgetExceeded {
            needed,
            budget: memory_budget,
        });
    }

    let n = graph.node_count;
    let q = terms.len() - 1;
    let root = terms[q];
    let full = (1usize << q) - 1;
    let adj = graph.adjacency();

    let mut rows: Vec<Vec<Cost>> = vec![Vec::new(); full + 1];
    let mut backs: Vec<Vec<Back>> = vec![Vec::new(); full + 1];

    for level in 1..=q {
        let masks: Vec<usize> = (1..=full).filter(|m| m.count_ones() as usize == level).collect();
        let computed: Vec<(usize, Vec<Cost>, Vec<Back>)> = masks
            .par_iter()
            .map(|&mask| {
                let mut cost = vec![Cost::INF; n];
                let mut back = vec![Back::None; n];
                if level == 1 {
                    let t = terms[mask.trailing_zeros() as usize];
                    cost[t] = Cost::ZERO;
                } else {
                    merge_row(mask, &rows, &mut cost, &mut back);
                }
                grow_row(graph, &adj, &mut cost, &mut back);
                (mask, cost, back)
            })
            .collect();
        for (mask, cost, back) in computed {
            rows[mask] = cost;
            backs[mask] = back;
        }
    }

    if !rows[full][root].is_finite() {
        return Err(Error::DisconnectedTerminals {
            components: vec![terms],
        });
    }

    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        match backs[mask][v] {
            Back::None => {}
            Back::Edge(e) => {
                let e = e as usize;
                edges.push(e);
                stack.push((mask, graph.edges[e].other(v)));
            }
            Back::Merge(a) => {
                let a = a as usize;
                stack.push((a, v));
                stack.push((mask ^ a, v));
            }
        }
    }
    Ok(SteinerTree::from_edge_set(graph, edges, SolverKind::ExactDw))
}

/// `best[S][v] = min over splits S = A ∪ B of best[A][v] + best[B][v]`,
/// with `A` holding the lowest bit of `S` so each split is visited once.
fn merge_row(mask: usize, rows: &[Vec<Cost>], cost: &mut [Cost], back: &mut [Back]) {
    let low = mask & mask.wrapping_neg();
    let rest = mask ^ low;
    // Submasks of `rest` in decreasing order, excluding `rest` itself so B ≠ ∅.
    let mut sub = rest;
    loop {
        sub = sub.wrapping_sub(1) & rest;
        let a = sub | low;
        let b = mask ^ a;
        if b != 0 {
            let (ra, rb) = (&rows[a], &rows[b]);
            for v in 0..cost.len() {
                let c = ra[v].add(rb[v]);
                if c.lt(&cost[v]) {
                    cost[v] = c;
                    back[v] = Back::Merge(a as u32);
                }
            }
        }
        if sub == 0 {
            break;
        }
    }
}

/// Dijkstra seeded with every finite entry of the row.
fn grow_row(graph: &WeightedWireGraph, adj: &Adjacency, cost: &mut [Cost], back: &mut [Back]) {
    let mut heap: BinaryHeap<HeapItem> = cost
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_finite())
        .map(|(node, &cost)| HeapItem { cost, node })
        .collect();
    while let Some(HeapItem { cost: c, node }) = heap.pop() {
        if cost[node].lt(&c) {
            continue;
        }
        for &(next, eid) in adj.neighbours(node) {
            let e = &graph.edges[eid];
            let nc = c.add(Cost {
                w: e.weight,
                len: e.length,
            });
            if nc.lt(&cost[next]) {
                cost[next] = nc;
                back[next] = Back::Edge(eid as u32);
                heap.push(HeapItem { cost: nc, node: next });
            }
        }
    }
}

/// Shortest path tree from `source` (weight, then length).
pub(crate) fn shortest_paths(
    graph: &WeightedWireGraph,
    adj: &Adjacency,
    sources: &[usize],
) -> (Vec<Cost>, Vec<Option<usize>>, Vec<usize>) {
    let n = graph.node_count;
    let mut cost = vec![Cost::INF; n];
    let mut pred = vec![None; n];
    let mut base = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        cost[s] = Cost::ZERO;
        base[s] = s;
        heap.push(HeapItem {
            cost: Cost::ZERO,
            node: s,
        });
    }
    while let Some(HeapItem { cost: c, node }) = heap.pop() {
        if cost[node].lt(&c) {
            continue;
        }
        for &(next, eid) in adj.neighbours(node) {
            let e = &graph.edges[eid];
            let nc = c.add(Cost {
                w: e.weight,
                len: e.length,
            });
            if nc.lt(&cost[next]) {
                cost[next] = nc;
                pred[next] = Some(eid);
                base[next] = base[node];
                heap.push(HeapItem { cost: nc, node: next });
            }
        }
    }
    (cost, pred, base)
}

//! Mehlhorn's 2-approximation.
//!
//! Grow Voronoi regions around the terminals, connect neighbouring regions
//! through their cheapest bridging edge, take the MST of that terminal graph,
//! expand its edges back into graph paths and clean up with another MST and
//! leaf pruning.

use std::collections::BTreeMap;

use super::exact::shortest_paths;
use super::tree::{Cost, SolverKind, SteinerTree, UnionFind};
use crate::error::Result;
use crate::graph::WeightedWireGraph;

pub fn solve_approx(graph: &WeightedWireGraph) -> Result<SteinerTree> {
    graph.validate()?;
    graph.check_terminals_connected()?;
    let mut terms = graph.terminals.clone();
    terms.sort_unstable();
    terms.dedup();
    if terms.len() <= 1 {
        return Ok(SteinerTree::from_tree_edges(graph, Vec::new(), SolverKind::ApproxMehlhorn));
    }
    let adj = graph.adjacency();
    let (dist, pred, base) = shortest_paths(graph, &adj, &terms);

    // Cheapest bridge per pair of neighbouring regions.
    let mut bridges: BTreeMap<(usize, usize), (Cost, usize)> = BTreeMap::new();
    for (id, e) in graph.edges.iter().enumerate() {
        let (bu, bv) = (base[e.u], base[e.v]);
        if bu == usize::MAX || bv == usize::MAX || bu == bv {
            continue;
        }
        let c = dist[e.u].add(Cost {
            w: e.weight,
            len: e.length,
        })
        .add(dist[e.v]);
        let key = (bu.min(bv), bu.max(bv));
        match bridges.get(&key) {
            Some((old, _)) if !c.lt(old) => {}
            _ => {
                bridges.insert(key, (c, id));
            }
        }
    }

    let mut candidates: Vec<((usize, usize), Cost, usize)> =
        bridges.into_iter().map(|(k, (c, id))| (k, c, id)).collect();
    candidates.sort_by(|a, b| a.1.cmp_total(&b.1).then(a.2.cmp(&b.2)));
    let mut uf = UnionFind::new(graph.node_count);
    let mut edges = Vec::new();
    for ((s, t), _, id) in candidates {
        if !uf.union(s, t) {
            continue;
        }
        edges.push(id);
        let e = &graph.edges[id];
        for start in [e.u, e.v] {
            let mut x = start;
            while let Some(p) = pred[x] {
                edges.push(p);
                x = graph.edges[p].other(x);
            }
        }
    }
    Ok(SteinerTree::from_edge_set(graph, edges, SolverKind::ApproxMehlhorn))
}

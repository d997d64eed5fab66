//! Exhaustive reference solver for small graphs.
//!
//! Enumerates every acyclic edge subset (branch and bound on weight) and keeps
//! the cheapest one that connects the terminals and has only terminal leaves.
//! Ties are broken by pattern length, then by the lexicographically smallest
//! sorted edge id list. Shares nothing with the DP solver beyond the graph type.

use std::cmp::Ordering;

use super::tree::{SolverKind, SteinerTree};
use crate::error::{Error, Result};
use crate::graph::WeightedWireGraph;

pub const ORACLE_EDGE_CAP: usize = 25;

struct Rollback {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl Rollback {
    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push((rb, ra));
        true
    }

    fn undo(&mut self) {
        let (rb, ra) = self.history.pop().expect("undo without union");
        self.parent[rb] = rb;
        self.size[ra] -= self.size[rb];
    }
}

struct Search<'a> {
    graph: &'a WeightedWireGraph,
    terms: Vec<usize>,
    is_terminal: Vec<bool>,
    uf: Rollback,
    chosen: Vec<usize>,
    degree: Vec<usize>,
    best: Option<(f64, f64, Vec<usize>)>,
}

impl Search<'_> {
    fn better(&self, w: f64, len: f64, ids: &[usize]) -> bool {
        match &self.best {
            None => true,
            Some((bw, bl, bids)) => match w.total_cmp(bw).then(len.total_cmp(bl)) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => ids < bids.as_slice(),
            },
        }
    }

    fn leaf(&mut self) {
        let root = self.uf.find(self.terms[0]);
        if self.terms.iter().any(|&t| self.uf.find(t) != root) {
            return;
        }
        for &id in &self.chosen {
            let e = &self.graph.edges[id];
            if self.uf.find(e.u) != root {
                return;
            }
            for x in [e.u, e.v] {
                if self.degree[x] == 1 && !self.is_terminal[x] {
                    return;
                }
            }
        }
        // Sum in id order, the same order SteinerTree uses.
        let w: f64 = self.chosen.iter().map(|&i| self.graph.edges[i].weight).sum();
        let len: f64 = self.chosen.iter().map(|&i| self.graph.edges[i].length).sum();
        if self.better(w, len, &self.chosen) {
            self.best = Some((w, len, self.chosen.clone()));
        }
    }

    fn go(&mut self, i: usize, partial: f64) {
        if let Some((bw, _, _)) = &self.best {
            if partial > *bw {
                return;
            }
        }
        if i == self.graph.edges.len() {
            self.leaf();
            return;
        }
        let (u, v) = (self.graph.edges[i].u, self.graph.edges[i].v);
        if self.uf.union(u, v) {
            self.chosen.push(i);
            self.degree[u] += 1;
            self.degree[v] += 1;
            self.go(i + 1, partial + self.graph.edges[i].weight);
            self.degree[u] -= 1;
            self.degree[v] -= 1;
            self.chosen.pop();
            self.uf.undo();
        }
        self.go(i + 1, partial);
    }
}

pub fn solve_oracle(graph: &WeightedWireGraph) -> Result<SteinerTree> {
    graph.validate()?;
    if graph.edges.len() > ORACLE_EDGE_CAP {
        return Err(Error::OracleTooLarge {
            edges: graph.edges.len(),
            cap: ORACLE_EDGE_CAP,
        });
    }
    graph.check_terminals_connected()?;
    let mut terms = graph.terminals.clone();
    terms.sort_unstable();
    terms.dedup();
    if terms.len() <= 1 {
        return Ok(SteinerTree::from_tree_edges(graph, Vec::new(), SolverKind::Oracle));
    }
    let n = graph.node_count;
    let mut is_terminal = vec![false; n];
    for &t in &terms {
        is_terminal[t] = true;
    }
    let mut search = Search {
        graph,
        terms,
        is_terminal,
        uf: Rollback {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        },
        chosen: Vec::new(),
        degree: vec![0; n],
        best: None,
    };
    search.go(0, 0.0);
    let (_, _, edges) = search.best.ok_or_else(|| Error::DisconnectedTerminals {
        components: vec![graph.terminals.clone()],
    })?;
    Ok(SteinerTree::from_tree_edges(graph, edges, SolverKind::Oracle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = WeightedWireGraph::from_edges(2, [(0, 1, 2.5, 1.0)], vec![0, 1]).unwrap();
        let t = solve_oracle(&g).unwrap();
        assert_eq!(t.edges, vec![0]);
        assert_eq!(t.total_weight, 2.5);
    }

    #[test]
    fn equal_triangle_picks_smallest_pair() {
        let g = WeightedWireGraph::from_edges(
            3,
            [(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0), (0, 2, 1.0, 1.0)],
            vec![0, 1, 2],
        )
        .unwrap();
        assert_eq!(solve_oracle(&g).unwrap().edges, vec![0, 1]);
    }

    #[test]
    fn four_cycle_avoids_heavy_edge() {
        // Cycle 0-1-2-3-0 with weights 1,1,1,10. Opposite corners 0 and 2 are
        // joined by two 2-edge paths, one of them through the heavy edge.
        let g = WeightedWireGraph::from_edges(
            4,
            [(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0), (2, 3, 1.0, 1.0), (3, 0, 10.0, 1.0)],
            vec![0, 2],
        )
        .unwrap();
        let t = solve_oracle(&g).unwrap();
        assert_eq!(t.edges, vec![0, 1]);
        assert_eq!(t.total_weight, 2.0);
    }

    #[test]
    fn too_large() {
        let edges: Vec<_> = (0..26).map(|i| (i, i + 1, 1.0, 1.0)).collect();
        let g = WeightedWireGraph::from_edges(27, edges, vec![0, 26]).unwrap();
        assert!(matches!(solve_oracle(&g), Err(Error::OracleTooLarge { .. })));
    }
}

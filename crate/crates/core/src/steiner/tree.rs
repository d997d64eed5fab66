use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::graph::WeightedWireGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "exact-dw")]
    ExactDw,
    #[serde(rename = "approx-mehlhorn")]
    ApproxMehlhorn,
    #[serde(rename = "oracle")]
    Oracle,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::ExactDw => "exact-dw",
            SolverKind::ApproxMehlhorn => "approx-mehlhorn",
            SolverKind::Oracle => "oracle",
        })
    }
}

/// Path cost ordered by weight, then pattern length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cost {
    pub w: f64,
    pub len: f64,
}

impl Cost {
    pub const ZERO: Cost = Cost { w: 0.0, len: 0.0 };
    pub const INF: Cost = Cost {
        w: f64::INFINITY,
        len: f64::INFINITY,
    };

    #[inline]
    pub fn add(self, o: Cost) -> Cost {
        Cost {
            w: self.w + o.w,
            len: self.len + o.len,
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite()
    }

    #[inline]
    pub fn cmp_total(&self, o: &Cost) -> Ordering {
        self.w.total_cmp(&o.w).then(self.len.total_cmp(&o.len))
    }

    #[inline]
    pub fn lt(&self, o: &Cost) -> bool {
        self.cmp_total(o) == Ordering::Less
    }
}

/// Heap entry for min-ordered Dijkstra; ties go to the smaller node id.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HeapItem {
    pub cost: Cost,
    pub node: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        // Reversed so BinaryHeap pops the minimum.
        o.cost
            .cmp_total(&self.cost)
            .then_with(|| o.node.cmp(&self.node))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerTree {
    /// Graph edge ids, ascending.
    pub edges: Vec<usize>,
    #[serde(rename = "weight")]
    pub total_weight: f64,
    #[serde(rename = "length")]
    pub total_length: f64,
    pub terminals: Vec<usize>,
    #[serde(rename = "solverKind")]
    pub solver: SolverKind,
}

impl SteinerTree {
    /// Tree from an edge set that connects the terminals. Cycles are removed
    /// by a minimum spanning forest (weight, length, id order) and
    /// non-terminal leaves are pruned.
    pub fn from_edge_set(
        graph: &WeightedWireGraph,
        edges: impl IntoIterator<Item = usize>,
        solver: SolverKind,
    ) -> SteinerTree {
        let mut ids: Vec<usize> = edges.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        ids.sort_by(|&a, &b| {
            let (ea, eb) = (&graph.edges[a], &graph.edges[b]);
            ea.weight
                .total_cmp(&eb.weight)
                .then(ea.length.total_cmp(&eb.length))
                .then(a.cmp(&b))
        });
        let mut uf = UnionFind::new(graph.node_count);
        let mut kept: Vec<usize> = ids
            .into_iter()
            .filter(|&id| {
                let e = &graph.edges[id];
                uf.union(e.u, e.v)
            })
            .collect();

        let mut is_terminal = vec![false; graph.node_count];
        for &t in &graph.terminals {
            is_terminal[t] = true;
        }
        loop {
            let mut degree = vec![0usize; graph.node_count];
            for &id in &kept {
                let e = &graph.edges[id];
                degree[e.u] += 1;
                degree[e.v] += 1;
            }
            let before = kept.len();
            kept.retain(|&id| {
                let e = &graph.edges[id];
                !((degree[e.u] == 1 && !is_terminal[e.u]) || (degree[e.v] == 1 && !is_terminal[e.v]))
            });
            if kept.len() == before {
                break;
            }
        }
        Self::from_tree_edges(graph, kept, solver)
    }

    /// Wraps an edge list that is already a pruned tree.
    pub fn from_tree_edges(graph: &WeightedWireGraph, mut edges: Vec<usize>, solver: SolverKind) -> SteinerTree {
        edges.sort_unstable();
        let total_weight = edges.iter().map(|&e| graph.edges[e].weight).sum();
        let total_length = edges.iter().map(|&e| graph.edges[e].length).sum();
        let mut terminals = graph.terminals.clone();
        terminals.sort_unstable();
        terminals.dedup();
        SteinerTree {
            edges,
            total_weight,
            total_length,
            terminals,
            solver,
        }
    }

    /// Nodes incident to tree edges, ascending.
    pub fn nodes(&self, graph: &WeightedWireGraph) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&e| [graph.edges[e].u, graph.edges[e].v])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Checks acyclicity, connectivity, terminal coverage, terminal leaves
    /// and the stored weight sum.
    pub fn validate(&self, graph: &WeightedWireGraph) -> Result<(), String> {
        let mut uf = UnionFind::new(graph.node_count);
        let mut degree = vec![0usize; graph.node_count];
        for &id in &self.edges {
            let e = graph.edges.get(id).ok_or_else(|| format!("edge {id} not in graph"))?;
            if !uf.union(e.u, e.v) {
                return Err(format!("edge {id} closes a cycle"));
            }
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let nodes = self.nodes(graph);
        let mut terms = graph.terminals.clone();
        terms.sort_unstable();
        terms.dedup();
        if terms.len() <= 1 {
            return if self.edges.is_empty() {
                Ok(())
            } else {
                Err("single terminal needs an empty tree".into())
            };
        }
        let root = uf.find(terms[0]);
        for &t in &terms {
            if uf.find(t) != root || degree[t] == 0 {
                return Err(format!("terminal {t} not spanned"));
            }
        }
        for &v in &nodes {
            if uf.find(v) != root {
                return Err(format!("node {v} outside the terminal component"));
            }
            if degree[v] == 1 && terms.binary_search(&v).is_err() {
                return Err(format!("non-terminal leaf {v}"));
            }
        }
        let sum: f64 = self.edges.iter().map(|&e| graph.edges[e].weight).sum();
        let tol = 1e-12 * sum.abs().max(1e-300);
        if (sum - self.total_weight).abs() > tol {
            return Err(format!("stored weight {} != edge sum {sum}", self.total_weight));
        }
        Ok(())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets; false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

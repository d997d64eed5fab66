use crate::error::{Error, Result};
use crate::graph::WeightedWireGraph;
use crate::mesh::GarmentMesh;
use crate::steiner::SteinerTree;

/// Maximal run of tree edges between two stop vertices, expressed in mesh
/// vertices so that it has a single pattern-space polyline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchPath {
    pub vertices: Vec<usize>,
    pub graph_edges: Vec<usize>,
}

/// Splits a tree at junctions (degree ≥ 3), leaves and terminals. A branch
/// that passes through a sewn seam is also split there, because the two
/// sides of the seam sit at different pattern positions.
pub fn extract_branches(
    tree: &SteinerTree,
    graph: &WeightedWireGraph,
    mesh: &GarmentMesh,
) -> Result<Vec<BranchPath>> {
    let n = graph.node_count;
    let rep = |v: usize| graph.node_of_vertex.get(v).copied().unwrap_or(v);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &id in &tree.edges {
        let e = graph
            .edges
            .get(id)
            .ok_or_else(|| Error::Topology(format!("tree edge {id} not in graph")))?;
        if e.mesh_edges.is_empty() {
            return Err(Error::Topology(
                "graph edges carry no mesh edges; cannot lay out on the mesh".into(),
            ));
        }
        incident[e.u].push(id);
        incident[e.v].push(id);
    }
    let mut is_terminal = vec![false; n];
    for &t in &graph.terminals {
        is_terminal[t] = true;
    }
    let is_stop = |v: usize| incident[v].len() != 2 || is_terminal[v];

    let mut used = vec![false; graph.edges.len()];
    let mut out = Vec::new();
    let mut starts: Vec<usize> = (0..n)
        .filter(|&v| !incident[v].is_empty() && is_stop(v))
        .collect();
    starts.sort_unstable();
    for s in starts {
        let mut first_edges = incident[s].clone();
        first_edges.sort_unstable();
        for e0 in first_edges {
            if used[e0] {
                continue;
            }
            let mut node = s;
            let mut edge = e0;
            let mut current: Vec<usize> = Vec::new();
            let mut current_edges: Vec<usize> = Vec::new();
            loop {
                used[edge] = true;
                let we = &graph.edges[edge];
                let next = we.other(node);
                let at = current.last().copied();
                let me = we
                    .mesh_edges
                    .iter()
                    .copied()
                    .find(|&m| at.is_some_and(|a| mesh.edges()[m].vertices.contains(&a)))
                    .unwrap_or(we.mesh_edges[0]);
                let [a, b] = mesh.edges()[me].vertices;
                let (from, to) = match at {
                    Some(x) if x == a => (a, b),
                    Some(x) if x == b => (b, a),
                    _ if rep(a) == node => (a, b),
                    _ => (b, a),
                };
                if at.is_some_and(|x| x != from) {
                    out.push(BranchPath {
                        vertices: std::mem::take(&mut current),
                        graph_edges: std::mem::take(&mut current_edges),
                    });
                }
                if current.is_empty() {
                    current.push(from);
                }
                current.push(to);
                current_edges.push(edge);
                node = next;
                if is_stop(node) {
                    break;
                }
                let Some(&nxt) = incident[node].iter().find(|&&x| !used[x]) else {
                    break;
                };
                edge = nxt;
            }
            out.push(BranchPath {
                vertices: current,
                graph_edges: current_edges,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, BuildOptions};
    use crate::steiner::{SolverKind, SteinerTree};
    use crate::strain::StrainField;
    use crate::synth::flat_sheet;

    fn graph(terminals: &[usize]) -> (GarmentMesh, WeightedWireGraph) {
        let mesh = flat_sheet(0.04, 0.04, 4, 4).unwrap();
        let field = StrainField::from_values(vec![0.0; mesh.face_count()]);
        let opts = BuildOptions {
            eta: 1.0,
            strip_width: 0.005,
            uniform_weights: true,
        };
        let g = build_graph(&mesh, &field, terminals, opts, None).unwrap();
        (mesh, g)
    }

    fn edge(g: &WeightedWireGraph, a: usize, b: usize) -> usize {
        g.edges
            .iter()
            .position(|e| (e.u, e.v) == (a.min(b), a.max(b)))
            .unwrap()
    }

    #[test]
    fn path_is_one_branch() {
        // Bottom row of a 5×5 vertex grid: 0-1-2-3-4.
        let (mesh, g) = graph(&[0, 4]);
        let ids: Vec<usize> = (0..4).map(|i| edge(&g, i, i + 1)).collect();
        let tree = SteinerTree::from_tree_edges(&g, ids, SolverKind::Oracle);
        let b = extract_branches(&tree, &g, &mesh).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].vertices, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn y_tree_has_three_branches() {
        // Junction at vertex 12 (grid centre) joining 2, 10 and 14.
        let (mesh, g) = graph(&[2, 10, 14]);
        let ids = vec![
            edge(&g, 2, 7),
            edge(&g, 7, 12),
            edge(&g, 10, 11),
            edge(&g, 11, 12),
            edge(&g, 12, 13),
            edge(&g, 13, 14),
        ];
        let tree = SteinerTree::from_tree_edges(&g, ids, SolverKind::Oracle);
        let b = extract_branches(&tree, &g, &mesh).unwrap();
        assert_eq!(b.len(), 3);
        for br in &b {
            assert!(br.vertices.first() == Some(&12) || br.vertices.last() == Some(&12));
        }
    }

    #[test]
    fn interior_terminal_splits_path() {
        let (mesh, g) = graph(&[0, 2, 4]);
        let ids: Vec<usize> = (0..4).map(|i| edge(&g, i, i + 1)).collect();
        let tree = SteinerTree::from_tree_edges(&g, ids, SolverKind::Oracle);
        assert_eq!(extract_branches(&tree, &g, &mesh).unwrap().len(), 2);
    }
}

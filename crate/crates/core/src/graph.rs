//! Deformation-weighted wiring graph.
//!
//! Every mesh edge gets a strip rectangle of width `wd` in pattern space. Its
//! weight is the strain energy of the cloth under that strip plus a
//! regularising density `η` that charges for strip area, i.e. wire length:
//!
//! ```text
//! ω(e) = Σ_f (ε(f) + η) · area(f ∩ strip(e))
//! ```
//!
//! Since ω is affine in η, the two face sums are computed once per edge as
//! [`EdgeIntegrals`] and any η can be applied afterwards.

use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FaceGrid;
use crate::mesh::GarmentMesh;
use crate::polygon::clip_triangle_rect;
use crate::strain::StrainField;

/// Relative floor on η, as a fraction of the median positive density.
pub const ETA_FLOOR_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    /// Regularisation density η (Pa), as applied.
    pub eta: f64,
    /// Strip width wd (m).
    pub strip_width: f64,
    #[serde(default)]
    pub uniform_weights: bool,
}

/// Pairs of boundary edges that are sewn together.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeamGlue {
    pub pairs: Vec<[usize; 2]>,
}

impl SeamGlue {
    /// Vertex classes induced by the glue: `rep[v]` is the smallest vertex
    /// sewn to `v`.
    pub fn vertex_classes(&self, mesh: &GarmentMesh) -> Result<Vec<usize>> {
        let n = mesh.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &[a, b] in &self.pairs {
            for e in [a, b] {
                let edge = mesh.edges().get(e).ok_or(Error::OutOfRange {
                    what: "seam edge",
                    index: e,
                    len: mesh.edge_count(),
                })?;
                if !edge.is_boundary() {
                    return Err(Error::Topology(format!("seam edge {e} is not a boundary edge")));
                }
            }
            for (x, y) in matched_ends(mesh, a, b) {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
        let mut rep: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        // Roots are already minimal because unions always keep the smaller root.
        for v in 0..n {
            rep[v] = rep[rep[v]];
        }
        Ok(rep)
    }
}

/// Matches the endpoints of two sewn edges by rest 3D position.
fn matched_ends(mesh: &GarmentMesh, a: usize, b: usize) -> [(usize, usize); 2] {
    let [a0, a1] = mesh.edges()[a].vertices;
    let [b0, b1] = mesh.edges()[b].vertices;
    let p = mesh.positions();
    let straight = (p[a0] - p[b0]).norm() + (p[a1] - p[b1]).norm();
    let crossed = (p[a0] - p[b1]).norm() + (p[a1] - p[b0]).norm();
    if straight <= crossed {
        [(a0, b0), (a1, b1)]
    } else {
        [(a0, b1), (a1, b0)]
    }
}

/// Per-edge face sums `Σ ε·area` and `Σ area` over the strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeIntegrals {
    pub strip_width: f64,
    pub strain: Vec<f64>,
    pub area: Vec<f64>,
}

impl EdgeIntegrals {
    pub fn compute(mesh: &GarmentMesh, field: &StrainField, strip_width: f64) -> Result<Self> {
        if field.face_count() != mesh.face_count() {
            return Err(Error::MotionMismatch(format!(
                "strain field has {} faces, mesh has {}",
                field.face_count(),
                mesh.face_count()
            )));
        }
        if !(strip_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "strip width must be positive, got {strip_width}"
            )));
        }
        let grid = FaceGrid::new(mesh, strip_width);
        let sums: Vec<(f64, f64)> = (0..mesh.edge_count())
            .into_par_iter()
            .map(|e| strip_sums(mesh, field, &grid, e, strip_width))
            .collect::<Result<_>>()?;
        let (strain, area) = sums.into_iter().unzip();
        Ok(EdgeIntegrals {
            strip_width,
            strain,
            area,
        })
    }

    pub fn weight(&self, edge: usize, eta: f64) -> f64 {
        self.strain[edge] + eta * self.area[edge]
    }
}

fn strip_sums(
    mesh: &GarmentMesh,
    field: &StrainField,
    grid: &FaceGrid,
    edge: usize,
    width: f64,
) -> Result<(f64, f64)> {
    let rect = mesh.edge_strip_rect(edge, width)?;
    let piece = mesh.edge_piece(edge);
    let mut strain = 0.0;
    let mut area = 0.0;
    for f in grid.candidates(&rect.bounds()) {
        if mesh.face_piece(f) != piece {
            continue;
        }
        let a = clip_triangle_rect(&mesh.face_polygon(f), &rect);
        if a > 0.0 {
            strain += field.density(f) * a;
            area += a;
        }
    }
    Ok((strain, area))
}

/// ω(e) for a single mesh edge, using `grid` for candidate faces.
pub fn edge_weight(
    mesh: &GarmentMesh,
    field: &StrainField,
    grid: &FaceGrid,
    edge: usize,
    eta: f64,
    strip_width: f64,
) -> Result<f64> {
    let rect = mesh.edge_strip_rect(edge, strip_width)?;
    let piece = mesh.edge_piece(edge);
    let mut w = 0.0;
    for f in grid.candidates(&rect.bounds()) {
        if mesh.face_piece(f) != piece {
            continue;
        }
        let a = clip_triangle_rect(&mesh.face_polygon(f), &rect);
        if a > 0.0 {
            w += (field.density(f) + eta) * a;
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireEdge {
    pub u: usize,
    pub v: usize,
    /// Pattern length (m).
    pub length: f64,
    pub weight: f64,
    /// Underlying mesh edges: one, or two for a sewn seam edge. Empty for
    /// graphs read from files.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mesh_edges: Vec<usize>,
}

impl WireEdge {
    pub fn other(&self, node: usize) -> usize {
        if self.u == node {
            self.v
        } else {
            self.u
        }
    }
}

/// Compressed adjacency: `(neighbour, edge id)` per node.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<(usize, usize)>,
}

impl Adjacency {
    pub fn neighbours(&self, node: usize) -> &[(usize, usize)] {
        &self.entries[self.offsets[node]..self.offsets[node + 1]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedWireGraph {
    pub node_count: usize,
    pub edges: Vec<WireEdge>,
    pub terminals: Vec<usize>,
    pub params: GraphParams,
    /// Mesh vertex → graph node (identity unless seams are sewn).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_of_vertex: Vec<usize>,
}

impl WeightedWireGraph {
    /// Plain graph from an edge list `(u, v, weight, length)`.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64, f64)>,
        terminals: Vec<usize>,
    ) -> Result<Self> {
        let edges: Vec<WireEdge> = edges
            .into_iter()
            .map(|(u, v, weight, length)| WireEdge {
                u,
                v,
                length,
                weight,
                mesh_edges: Vec::new(),
            })
            .collect();
        let g = WeightedWireGraph {
            node_count,
            edges,
            terminals,
            params: GraphParams {
                eta: 0.0,
                strip_width: 0.0,
                uniform_weights: false,
            },
            node_of_vertex: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= self.node_count || e.v >= self.node_count {
                return Err(Error::OutOfRange {
                    what: "graph node",
                    index: e.u.max(e.v),
                    len: self.node_count,
                });
            }
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(Error::InvalidParameter(format!("edge {i} has weight {}", e.weight)));
            }
        }
        for &t in &self.terminals {
            if t >= self.node_count {
                return Err(Error::OutOfRange {
                    what: "terminal",
                    index: t,
                    len: self.node_count,
                });
            }
        }
        Ok(())
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut degree = vec![0usize; self.node_count + 1];
        for e in &self.edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = vec![0usize; self.node_count + 1];
        for i in 0..self.node_count {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut entries = vec![(0, 0); offsets[self.node_count]];
        for (id, e) in self.edges.iter().enumerate() {
            entries[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            if e.v != e.u {
                entries[fill[e.v]] = (e.u, id);
                fill[e.v] += 1;
            }
        }
        Adjacency { offsets, entries }
    }

    /// Nodes touched by at least one edge or terminal.
    pub fn active_nodes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.node_count];
        for e in &self.edges {
            seen[e.u] = true;
            seen[e.v] = true;
        }
        for &t in &self.terminals {
            seen[t] = true;
        }
        (0..self.node_count).filter(|&v| seen[v]).collect()
    }

    /// Errors with the terminal grouping if the terminals do not share one
    /// connected component.
    pub fn check_terminals_connected(&self) -> Result<()> {
        if self.terminals.is_empty() {
            return Ok(());
        }
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.node_count];
        let mut next = 0;
        for &t in &self.terminals {
            if comp[t] != usize::MAX {
                continue;
            }
            let mut stack = vec![t];
            comp[t] = next;
            while let Some(x) = stack.pop() {
                for &(y, _) in adj.neighbours(x) {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        if next > 1 {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &t in &self.terminals {
                groups.entry(comp[t]).or_default().push(t);
            }
            return Err(Error::DisconnectedTerminals {
                components: groups.into_values().collect(),
            });
        }
        Ok(())
    }

    /// Copy with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> WeightedWireGraph {
        let mut g = self.clone();
        g.edges.iter_mut().for_each(|e| e.weight *= c);
        g
    }

    pub fn with_terminals(&self, terminals: Vec<usize>) -> WeightedWireGraph {
        let mut g = self.clone();
        g.terminals = terminals;
        g
    }
}

/// Options for turning a mesh into a wiring graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub eta: f64,
    pub strip_width: f64,
    /// Baseline: ω(e) = 1 for every edge.
    pub uniform_weights: bool,
}

/// Smallest η the builder accepts for `field`.
pub fn eta_floor(field: &StrainField) -> f64 {
    ETA_FLOOR_FRACTION * field.median_positive().unwrap_or(1.0)
}

/// Builds the graph from precomputed edge integrals (reusable across
/// terminal sets and η values).
pub fn build_graph_from_integrals(
    mesh: &GarmentMesh,
    field: Option<&StrainField>,
    integrals: Option<&EdgeIntegrals>,
    terminals: &[usize],
    opts: BuildOptions,
    glue: Option<&SeamGlue>,
) -> Result<WeightedWireGraph> {
    if !(opts.strip_width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "strip width must be positive, got {}",
            opts.strip_width
        )));
    }
    if !(opts.eta >= 0.0) {
        return Err(Error::InvalidParameter(format!("η must be non-negative, got {}", opts.eta)));
    }
    let mut eta = opts.eta;
    if !opts.uniform_weights {
        let integrals = integrals.ok_or_else(|| {
            Error::InvalidParameter("weighted graph needs edge integrals".into())
        })?;
        if integrals.strain.len() != mesh.edge_count() {
            return Err(Error::Topology("edge integrals do not match mesh".into()));
        }
        let floor = field.map(eta_floor).unwrap_or(ETA_FLOOR_FRACTION);
        if eta < floor {
            warn!("η = {eta} would allow zero-cost edges; raising it to {floor}");
            eta = floor;
        }
    }

    let rep = match glue {
        Some(g) if !g.pairs.is_empty() => g.vertex_classes(mesh)?,
        _ => (0..mesh.vertex_count()).collect(),
    };
    let mut glued_with: Vec<Option<usize>> = vec![None; mesh.edge_count()];
    if let Some(g) = glue {
        for &[a, b] in &g.pairs {
            glued_with[a] = Some(b);
            glued_with[b] = Some(a);
        }
    }

    let weight_of = |e: usize| -> f64 {
        match integrals {
            Some(i) if !opts.uniform_weights => i.weight(e, eta),
            _ => 1.0,
        }
    };

    let mut edges = Vec::with_capacity(mesh.edge_count());
    for (ei, me) in mesh.edges().iter().enumerate() {
        let [a, b] = me.vertices;
        let (u, v) = (rep[a].min(rep[b]), rep[a].max(rep[b]));
        match glued_with[ei] {
            Some(other) if other < ei => continue,
            Some(other) => {
                let length = 0.5 * (mesh.edge_pattern_length(ei) + mesh.edge_pattern_length(other));
                let weight = if opts.uniform_weights {
                    1.0
                } else {
                    weight_of(ei) + weight_of(other)
                };
                edges.push(WireEdge {
                    u,
                    v,
                    length,
                    weight,
                    mesh_edges: vec![ei, other],
                });
            }
            None => edges.push(WireEdge {
                u,
                v,
                length: mesh.edge_pattern_length(ei),
                weight: weight_of(ei),
                mesh_edges: vec![ei],
            }),
        }
    }
    edges.sort_by(|x, y| (x.u, x.v, x.mesh_edges[0]).cmp(&(y.u, y.v, y.mesh_edges[0])));

    let graph = WeightedWireGraph {
        node_count: mesh.vertex_count(),
        edges,
        terminals: terminals.iter().map(|&t| rep[t]).collect(),
        params: GraphParams {
            eta: if opts.uniform_weights { 0.0 } else { eta },
            strip_width: opts.strip_width,
            uniform_weights: opts.uniform_weights,
        },
        node_of_vertex: rep,
    };
    graph.validate()?;
    graph.check_terminals_connected()?;
    Ok(graph)
}

/// One-shot graph construction from a strain field.
pub fn build_graph(
    mesh: &GarmentMesh,
    field: &StrainField,
    terminals: &[usize],
    opts: BuildOptions,
    glue: Option<&SeamGlue>,
) -> Result<WeightedWireGraph> {
    if opts.uniform_weights {
        return build_graph_from_integrals(mesh, Some(field), None, terminals, opts, glue);
    }
    let integrals = EdgeIntegrals::compute(mesh, field, opts.strip_width)?;
    build_graph_from_integrals(mesh, Some(field), Some(&integrals), terminals, opts, glue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::flat_sheet;
    use approx::assert_relative_eq;

    fn opts(eta: f64, wd: f64) -> BuildOptions {
        BuildOptions {
            eta,
            strip_width: wd,
            uniform_weights: false,
        }
    }

    #[test]
    fn square_graph() {
        let mesh = crate::mesh::tests::unit_square();
        let field = StrainField::from_values(vec![0.0; 2]);
        let g = build_graph(&mesh, &field, &[0, 2], opts(1.0, 0.1), None).unwrap();
        assert_eq!(g.edges.len(), 5);
        assert_eq!(g.terminals, vec![0, 2]);
        let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.u, e.v)).collect();
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);
    }

    #[test]
    fn zero_field_zero_eta_is_floored() {
        let mesh = crate::mesh::tests::unit_square();
        let field = StrainField::from_values(vec![0.0; 2]);
        let g = build_graph(&mesh, &field, &[0, 2], opts(0.0, 0.1), None).unwrap();
        assert!(g.params.eta > 0.0);
        assert!(g.edges.iter().all(|e| e.weight > 0.0));
    }

    #[test]
    fn uniform_weights_are_one() {
        let mesh = flat_sheet(1.0, 1.0, 3, 3).unwrap();
        let field = StrainField::from_values(vec![5.0; mesh.face_count()]);
        let g = build_graph(
            &mesh,
            &field,
            &[0, 5],
            BuildOptions {
                eta: 0.3,
                strip_width: 0.1,
                uniform_weights: true,
            },
            None,
        )
        .unwrap();
        assert!(g.edges.iter().all(|e| e.weight == 1.0));
    }

    #[test]
    fn constant_field_interior_edge() {
        // Interior edge whose strip lies well inside the sheet.
        let mesh = flat_sheet(1.0, 1.0, 4, 4).unwrap();
        let c = 3.0;
        let eta = 0.5;
        let wd = 0.05;
        let field = StrainField::from_values(vec![c; mesh.face_count()]);
        let grid = FaceGrid::new(&mesh, wd);
        let e = (0..mesh.edge_count())
            .find(|&e| {
                let [a, b] = mesh.edges()[e].vertices;
                let (pa, pb) = (mesh.pattern()[a], mesh.pattern()[b]);
                pa.x.min(pb.x) >= 0.25 && pa.x.max(pb.x) <= 0.75 && pa.y.min(pb.y) >= 0.25 && pa.y.max(pb.y) <= 0.75
            })
            .unwrap();
        let w = edge_weight(&mesh, &field, &grid, e, eta, wd).unwrap();
        assert_relative_eq!(w, (c + eta) * wd * mesh.edge_pattern_length(e), max_relative = 1e-12);
    }

    #[test]
    fn boundary_edge_covers_half_strip() {
        let mesh = flat_sheet(1.0, 1.0, 4, 4).unwrap();
        let field = StrainField::from_values(vec![0.0; mesh.face_count()]);
        let ints = EdgeIntegrals::compute(&mesh, &field, 0.05).unwrap();
        for (e, me) in mesh.edges().iter().enumerate() {
            let full = 0.05 * mesh.edge_pattern_length(e);
            assert!(ints.area[e] <= full + 1e-9);
            if me.is_boundary() {
                assert!(ints.area[e] < 0.51 * full);
            }
        }
    }

    #[test]
    fn disconnected_terminals_reported() {
        let g = WeightedWireGraph::from_edges(4, [(0, 1, 1.0, 1.0), (2, 3, 1.0, 1.0)], vec![0, 1, 3]).unwrap();
        match g.check_terminals_connected() {
            Err(Error::DisconnectedTerminals { components }) => {
                assert_eq!(components, vec![vec![0, 1], vec![3]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

//! Garment mesh: 3D drape, 2D rest pattern and the derived edge topology.
//!
//! A mesh vertex is a unique (position, pattern coordinate) pair, so a 3D
//! point lying on a seam appears once per pattern piece. Pieces are the
//! face-connected components of the pattern charts.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{Point2, Point3};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polygon::{barycentric, shoelace, strip_rect, Polygon2D};

/// Faces with rest-pattern area at or below this are rejected (m²).
pub const DEGENERATE_AREA: f64 = 1e-12;
/// Tolerance for barycentric validity and corner snapping.
pub const BARY_TOL: f64 = 1e-9;

/// Where a vertex's deformed position comes from when reading motion frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexOrigin {
    /// Index into the per-frame position arrays of the source file.
    Source(usize),
    /// Barycentric combination of earlier mesh vertices (inserted terminals,
    /// subdivision centroids).
    Embedded { corners: [usize; 3], weights: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshEdge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// One entry for boundary edges, two for interior edges.
    pub faces: Vec<usize>,
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.faces.len() == 1
    }
}

#[derive(Debug, Clone)]
pub struct GarmentMesh {
    positions: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    pattern: Vec<Point2<f64>>,
    origins: Vec<VertexOrigin>,
    source_count: usize,
    piece: Vec<usize>,
    piece_count: usize,
    edges: Vec<MeshEdge>,
    edge_lookup: HashMap<(usize, usize), usize>,
    face_edges: Vec<[usize; 3]>,
}

impl GarmentMesh {
    /// Builds and validates a mesh whose vertices all come from a source
    /// position array in the same order.
    pub fn new(
        positions: Vec<Point3<f64>>,
        faces: Vec<[usize; 3]>,
        pattern: Vec<Point2<f64>>,
    ) -> Result<Self> {
        let origins = (0..positions.len()).map(VertexOrigin::Source).collect();
        let n = positions.len();
        Self::with_origins(positions, faces, pattern, origins, n)
    }

    pub fn with_origins(
        positions: Vec<Point3<f64>>,
        faces: Vec<[usize; 3]>,
        pattern: Vec<Point2<f64>>,
        origins: Vec<VertexOrigin>,
        source_count: usize,
    ) -> Result<Self> {
        let n = positions.len();
        if pattern.len() != n {
            return Err(Error::PatternMissing);
        }
        if origins.len() != n {
            return Err(Error::Topology(format!(
                "{} vertex origins for {} vertices",
                origins.len(),
                n
            )));
        }
        for (v, origin) in origins.iter().enumerate() {
            match *origin {
                VertexOrigin::Source(i) if i >= source_count => {
                    return Err(Error::OutOfRange {
                        what: "source vertex",
                        index: i,
                        len: source_count,
                    })
                }
                VertexOrigin::Embedded { corners, .. } if corners.iter().any(|&c| c >= v) => {
                    return Err(Error::Topology(format!(
                        "embedded vertex {v} must reference earlier vertices"
                    )))
                }
                _ => {}
            }
        }
        for face in &faces {
            for &i in face {
                if i >= n {
                    return Err(Error::OutOfRange {
                        what: "vertex",
                        index: i,
                        len: n,
                    });
                }
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            let area = shoelace(&[pattern[f[0]], pattern[f[1]], pattern[f[2]]]).abs();
            if !(area > DEGENERATE_AREA) {
                return Err(Error::DegenerateFace(fi));
            }
        }

        let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let list = edge_faces.entry(key).or_default();
                list.push(fi);
                if list.len() > 2 {
                    return Err(Error::NonManifold(key.0, key.1));
                }
            }
        }
        let mut keys: Vec<(usize, usize)> = edge_faces.keys().copied().collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len());
        let mut edge_lookup = HashMap::with_capacity(keys.len());
        for (ei, key) in keys.into_iter().enumerate() {
            let faces = edge_faces.remove(&key).unwrap();
            edge_lookup.insert(key, ei);
            edges.push(MeshEdge {
                vertices: [key.0, key.1],
                faces,
            });
        }
        let face_edges = faces
            .iter()
            .map(|f| {
                let mut out = [0; 3];
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    out[k] = edge_lookup[&(a.min(b), a.max(b))];
                }
                out
            })
            .collect();

        let (piece, piece_count) = label_pieces(faces.len(), &edges);

        Ok(GarmentMesh {
            positions,
            faces,
            pattern,
            origins,
            source_count,
            piece,
            piece_count,
            edges,
            edge_lookup,
            face_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn positions(&self) -> &[Point3<f64>] {
        &self.positions
    }

    pub fn pattern(&self) -> &[Point2<f64>] {
        &self.pattern
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn origins(&self) -> &[VertexOrigin] {
        &self.origins
    }

    /// Number of positions per frame in the source motion data.
    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn face_piece(&self, face: usize) -> usize {
        self.piece[face]
    }

    pub fn piece_count(&self) -> usize {
        self.piece_count
    }

    pub fn face_edges(&self, face: usize) -> [usize; 3] {
        self.face_edges[face]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    /// Piece owning the edge (any incident face; an edge never straddles two).
    pub fn edge_piece(&self, edge: usize) -> usize {
        self.piece[self.edges[edge].faces[0]]
    }

    pub fn face_pattern(&self, face: usize) -> [Point2<f64>; 3] {
        let f = self.faces[face];
        [self.pattern[f[0]], self.pattern[f[1]], self.pattern[f[2]]]
    }

    pub fn face_polygon(&self, face: usize) -> Polygon2D {
        let [a, b, c] = self.face_pattern(face);
        Polygon2D::triangle(a, b, c)
    }

    pub fn face_rest_area(&self, face: usize) -> f64 {
        shoelace(&self.face_pattern(face)).abs()
    }

    pub fn edge_pattern_length(&self, edge: usize) -> f64 {
        let [a, b] = self.edges[edge].vertices;
        (self.pattern[b] - self.pattern[a]).norm()
    }

    pub fn median_edge_length(&self) -> f64 {
        let mut lens: Vec<f64> = (0..self.edges.len())
            .map(|e| self.edge_pattern_length(e))
            .collect();
        if lens.is_empty() {
            return 0.0;
        }
        lens.sort_by(f64::total_cmp);
        lens[lens.len() / 2]
    }

    /// Strip neighbourhood of an edge: a rectangle of total width `width`
    /// with the edge's pattern segment as midline.
    pub fn edge_strip_rect(&self, edge: usize, width: f64) -> Result<Polygon2D> {
        let e = self.edges.get(edge).ok_or(Error::OutOfRange {
            what: "edge",
            index: edge,
            len: self.edges.len(),
        })?;
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "strip width must be positive, got {width}"
            )));
        }
        let pieces = &e.faces;
        if pieces.iter().any(|&f| self.piece[f] != self.piece[pieces[0]]) {
            return Err(Error::SeamEdge(edge));
        }
        let [a, b] = e.vertices;
        Ok(strip_rect(self.pattern[a], self.pattern[b], width))
    }

    /// Number of closed boundary loops.
    pub fn boundary_loop_count(&self) -> usize {
        let boundary: Vec<&MeshEdge> = self.edges.iter().filter(|e| e.is_boundary()).collect();
        let mut parent: HashMap<usize, usize> = HashMap::new();
        fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
            let p = *parent.entry(x).or_insert(x);
            if p == x {
                x
            } else {
                let r = find(parent, p);
                parent.insert(x, r);
                r
            }
        }
        for e in &boundary {
            let a = find(&mut parent, e.vertices[0]);
            let b = find(&mut parent, e.vertices[1]);
            if a != b {
                parent.insert(a, b);
            }
        }
        let verts: Vec<usize> = parent.keys().copied().collect();
        let mut roots: Vec<usize> = verts.into_iter().map(|v| find(&mut parent, v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Boundary loops as vertex cycles that follow face winding, each tagged
    /// with its piece. Loops start at their smallest vertex and are listed
    /// in order of that vertex.
    pub fn boundary_loops(&self) -> Vec<(usize, Vec<usize>)> {
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            let f = self.faces[e.faces[0]];
            let [a, b] = e.vertices;
            let forward = (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b);
            let (from, to) = if forward { (a, b) } else { (b, a) };
            next.entry(from).or_default().push(to);
        }
        for outs in next.values_mut() {
            outs.sort_unstable_by(|x, y| y.cmp(x));
        }
        let mut loops = Vec::new();
        while let Some(&start) = next.iter().find(|(_, o)| !o.is_empty()).map(|(k, _)| k) {
            let mut cycle = vec![start];
            let mut v = start;
            while let Some(w) = next.get_mut(&v).and_then(|o| o.pop()) {
                if w == start {
                    break;
                }
                cycle.push(w);
                v = w;
            }
            let piece = self.edge_between(cycle[0], cycle[1 % cycle.len()])
                .map_or(0, |e| self.edge_piece(e));
            loops.push((piece, cycle));
        }
        loops
    }

    /// Content hash over topology, pattern and rest positions.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.positions.len() as u64).to_le_bytes());
        for p in &self.positions {
            for c in p.iter() {
                h.update(c.to_le_bytes());
            }
        }
        for p in &self.pattern {
            for c in p.iter() {
                h.update(c.to_le_bytes());
            }
        }
        for f in &self.faces {
            for &i in f {
                h.update((i as u64).to_le_bytes());
            }
        }
        hex(&h.finalize())
    }

    /// Face containing pattern point `p` within piece `piece` (any piece when
    /// `None`), with its barycentric coordinates. Points within `tol` outside
    /// a face still count; the closest face wins.
    pub fn locate(
        &self,
        p: Point2<f64>,
        piece: Option<usize>,
        tol: f64,
    ) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for face in 0..self.faces.len() {
            if piece.is_some_and(|pc| self.piece[face] != pc) {
                continue;
            }
            let [a, b, c] = self.face_pattern(face);
            let Some(w) = barycentric(p, a, b, c) else {
                continue;
            };
            let outside = -w.iter().copied().fold(f64::INFINITY, f64::min);
            if outside <= 0.0 {
                return Some((face, w));
            }
            // Convert the barycentric deficit to a distance-like measure.
            let scale = (b - a).norm().max((c - a).norm());
            let dist = outside * scale;
            if dist <= tol && best.as_ref().is_none_or(|b| dist < b.2) {
                best = Some((face, w, dist));
            }
        }
        best.map(|(f, w, _)| (f, clamp_bary(w)))
    }

    /// Adds a vertex inside `face` at barycentric `bary`.
    ///
    /// The face is split into three (or, when the point sits on an edge, the
    /// edge is split along with both incident faces). A weight within
    /// [`BARY_TOL`] of one returns the existing corner and the mesh unchanged.
    pub fn insert_terminal(&self, face: usize, bary: [f64; 3]) -> Result<(GarmentMesh, usize)> {
        if face >= self.faces.len() {
            return Err(Error::OutOfRange {
                what: "face",
                index: face,
                len: self.faces.len(),
            });
        }
        validate_bary(bary)?;
        let f = self.faces[face];
        if let Some(k) = (0..3).find(|&k| bary[k] >= 1.0 - BARY_TOL) {
            return Ok((self.clone(), f[k]));
        }

        let new_v = self.positions.len();
        let mut positions = self.positions.clone();
        let mut pattern = self.pattern.clone();
        let mut origins = self.origins.clone();
        let mut faces = self.faces.clone();

        let mut pos = Point3::origin().coords;
        let mut pat = Point2::origin().coords;
        for k in 0..3 {
            pos += self.positions[f[k]].coords * bary[k];
            pat += self.pattern[f[k]].coords * bary[k];
        }
        positions.push(pos.into());
        pattern.push(pat.into());
        origins.push(VertexOrigin::Embedded {
            corners: f,
            weights: bary,
        });

        if let Some(k) = (0..3).find(|&k| bary[k] <= BARY_TOL) {
            // On the edge opposite corner k.
            let a = f[(k + 1) % 3];
            let b = f[(k + 2) % 3];
            let edge = self.edge_lookup[&(a.min(b), a.max(b))];
            for &g in &self.edges[edge].faces {
                let gf = self.faces[g];
                let j = (0..3)
                    .find(|&j| gf[j] != a && gf[j] != b)
                    .expect("triangle has a corner off its edge");
                let (x, y, z) = (gf[j], gf[(j + 1) % 3], gf[(j + 2) % 3]);
                faces[g] = [x, y, new_v];
                faces.push([x, new_v, z]);
            }
        } else {
            let [a, b, c] = f;
            faces[face] = [a, b, new_v];
            faces.push([b, c, new_v]);
            faces.push([c, a, new_v]);
        }

        let mesh = GarmentMesh::with_origins(positions, faces, pattern, origins, self.source_count)?;
        Ok((mesh, new_v))
    }

    /// Splits every face at its centroid (one level of 1→3 subdivision).
    pub fn subdivide_centroids(&self) -> Result<GarmentMesh> {
        let mut positions = self.positions.clone();
        let mut pattern = self.pattern.clone();
        let mut origins = self.origins.clone();
        let mut faces = Vec::with_capacity(self.faces.len() * 3);
        let third = 1.0 / 3.0;
        for f in &self.faces {
            let c = positions.len();
            let p3 = (self.positions[f[0]].coords
                + self.positions[f[1]].coords
                + self.positions[f[2]].coords)
                * third;
            let p2 = (self.pattern[f[0]].coords
                + self.pattern[f[1]].coords
                + self.pattern[f[2]].coords)
                * third;
            positions.push(p3.into());
            pattern.push(p2.into());
            origins.push(VertexOrigin::Embedded {
                corners: *f,
                weights: [third; 3],
            });
            faces.push([f[0], f[1], c]);
            faces.push([f[1], f[2], c]);
            faces.push([f[2], f[0], c]);
        }
        GarmentMesh::with_origins(positions, faces, pattern, origins, self.source_count)
    }

    /// Splits every edge at its midpoint and every face into four. New
    /// edges run parallel to old ones, so no new directions appear.
    pub fn subdivide_midpoints(&self) -> Result<GarmentMesh> {
        let mut positions = self.positions.clone();
        let mut pattern = self.pattern.clone();
        let mut origins = self.origins.clone();
        let n = positions.len();
        for e in &self.edges {
            let [a, b] = e.vertices;
            positions.push(((self.positions[a].coords + self.positions[b].coords) * 0.5).into());
            pattern.push(((self.pattern[a].coords + self.pattern[b].coords) * 0.5).into());
            origins.push(VertexOrigin::Embedded {
                corners: [a, b, a],
                weights: [0.5, 0.5, 0.0],
            });
        }
        let mut faces = Vec::with_capacity(self.faces.len() * 4);
        for &[a, b, c] in &self.faces {
            let mid = |x: usize, y: usize| n + self.edge_between(x, y).expect("face edge");
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            faces.push([a, ab, ca]);
            faces.push([ab, b, bc]);
            faces.push([ca, bc, c]);
            faces.push([ab, bc, ca]);
        }
        GarmentMesh::with_origins(positions, faces, pattern, origins, self.source_count)
    }

    /// Checks that `other` has the same vertex and face structure.
    pub fn same_topology(&self, other: &GarmentMesh) -> bool {
        self.faces == other.faces && self.positions.len() == other.positions.len()
    }
}

fn validate_bary(bary: [f64; 3]) -> Result<()> {
    let sum: f64 = bary.iter().sum();
    if bary.iter().any(|w| !w.is_finite() || *w < -BARY_TOL) || (sum - 1.0).abs() > BARY_TOL {
        return Err(Error::InvalidBarycentric(bary));
    }
    Ok(())
}

fn clamp_bary(w: [f64; 3]) -> [f64; 3] {
    let c = w.map(|x| x.max(0.0));
    let s: f64 = c.iter().sum();
    c.map(|x| x / s)
}

fn label_pieces(face_count: usize, edges: &[MeshEdge]) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..face_count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in edges {
        if let [f, g] = e.faces[..] {
            let (a, b) = (find(&mut parent, f), find(&mut parent, g));
            if a != b {
                // Keep the smaller face as root so piece ids follow face order.
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    let mut label = vec![usize::MAX; face_count];
    let mut piece = vec![0; face_count];
    let mut count = 0;
    for f in 0..face_count {
        let r = find(&mut parent, f);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        piece[f] = label[r];
    }
    (piece, count)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn unit_square() -> GarmentMesh {
        let pattern = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let positions = pattern.iter().map(|p| Point3::new(p.x, p.y, 0.0)).collect();
        GarmentMesh::new(positions, vec![[0, 1, 2], [0, 2, 3]], pattern).unwrap()
    }

    #[test]
    fn square_topology() {
        let m = unit_square();
        assert_eq!(m.face_count(), 2);
        assert_eq!(m.edge_count(), 5);
        assert_eq!(m.boundary_loop_count(), 1);
        assert_eq!(m.boundary_loops(), vec![(0, vec![0, 1, 2, 3])]);
        assert_eq!(m.piece_count(), 1);
        let interior: Vec<_> = m.edges().iter().filter(|e| !e.is_boundary()).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].vertices, [0, 2]);
    }

    #[test]
    fn rejects_degenerate_and_nonmanifold() {
        let pattern = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        let pos = vec![Point3::origin(); 3];
        assert!(matches!(
            GarmentMesh::new(pos, vec![[0, 1, 2]], pattern),
            Err(Error::DegenerateFace(0))
        ));

        let pattern = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
            Point2::new(0.5, -1.0),
            Point2::new(0.2, 2.0),
        ];
        let pos = vec![Point3::origin(); 5];
        let faces = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        assert!(matches!(
            GarmentMesh::new(pos, faces, pattern),
            Err(Error::NonManifold(0, 1))
        ));
    }

    #[test]
    fn corner_bary_returns_existing_vertex() {
        let m = unit_square();
        let (m2, v) = m.insert_terminal(0, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, 0);
        assert_eq!(m2.face_count(), 2);
        assert_eq!(m2.vertex_count(), 4);
    }

    #[test]
    fn centroid_insertion() {
        let m = unit_square();
        let t = 1.0 / 3.0;
        let (m2, v) = m.insert_terminal(0, [t, t, t]).unwrap();
        assert_eq!(v, 4);
        assert_eq!(m2.face_count(), 4);
        let expect = Point2::new(2.0 / 3.0, 1.0 / 3.0);
        assert_relative_eq!(m2.pattern()[v], expect, epsilon = 1e-15);
        assert_relative_eq!(m2.positions()[v], Point3::new(2.0 / 3.0, 1.0 / 3.0, 0.0), epsilon = 1e-15);
        let total: f64 = (0..4).map(|f| m2.face_rest_area(f)).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn insertion_on_interior_edge_splits_both_faces() {
        let m = unit_square();
        // Midpoint of the diagonal 0-2, seen from face 0 = (0, 1, 2).
        let (m2, v) = m.insert_terminal(0, [0.5, 0.0, 0.5]).unwrap();
        assert_eq!(m2.face_count(), 4);
        assert_relative_eq!(m2.pattern()[v], Point2::new(0.5, 0.5));
        assert!(m2.edge_between(0, 2).is_none());
        let total: f64 = (0..4).map(|f| m2.face_rest_area(f)).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn invalid_bary() {
        let m = unit_square();
        assert!(matches!(
            m.insert_terminal(0, [0.5, 0.6, 0.0]),
            Err(Error::InvalidBarycentric(_))
        ));
        assert!(matches!(
            m.insert_terminal(0, [1.2, -0.2, 0.0]),
            Err(Error::InvalidBarycentric(_))
        ));
        assert!(m.insert_terminal(7, [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn strip_area_matches_length_times_width() {
        let m = unit_square();
        for e in 0..m.edge_count() {
            let r = m.edge_strip_rect(e, 0.015).unwrap();
            assert_relative_eq!(
                r.area(),
                0.015 * m.edge_pattern_length(e),
                max_relative = 1e-12
            );
        }
        assert!(m.edge_strip_rect(0, 0.0).is_err());
    }

    #[test]
    fn two_pieces_are_labelled() {
        let pattern = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(3.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(3.0, 1.0),
        ];
        let pos = pattern.iter().map(|p| Point3::new(p.x, p.y, 0.0)).collect();
        let m = GarmentMesh::new(pos, vec![[0, 1, 2], [3, 4, 5]], pattern).unwrap();
        assert_eq!(m.piece_count(), 2);
        assert_eq!(m.face_piece(1), 1);
        assert_eq!(m.boundary_loop_count(), 2);
    }

    #[test]
    fn locate_finds_face() {
        let m = unit_square();
        let (f, w) = m.locate(Point2::new(0.9, 0.2), None, 0.0).unwrap();
        assert_eq!(f, 0);
        assert!(w.iter().all(|&x| x >= 0.0));
        assert!(m.locate(Point2::new(2.0, 2.0), None, 1e-9).is_none());
    }
}

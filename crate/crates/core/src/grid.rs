//! Uniform bucket grid over pattern space for candidate-face lookup.

use nalgebra::Point2;

use crate::mesh::GarmentMesh;
use crate::polygon::{barycentric, Aabb};

#[derive(Debug, Clone)]
pub struct FaceGrid {
    origin: Point2<f64>,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
    face_bounds: Vec<Aabb>,
}

impl FaceGrid {
    /// Grid with cell size `max(min_cell, median edge length)`.
    pub fn new(mesh: &GarmentMesh, min_cell: f64) -> FaceGrid {
        let cell = min_cell.max(mesh.median_edge_length()).max(1e-9);
        let face_bounds: Vec<Aabb> = (0..mesh.face_count())
            .map(|f| Aabb::from_points(&mesh.face_pattern(f)))
            .collect();
        let all = Aabb::from_points(mesh.pattern());
        let origin = all.min;
        let cols = (((all.max.x - all.min.x) / cell).floor() as usize + 1).max(1);
        let rows = (((all.max.y - all.min.y) / cell).floor() as usize + 1).max(1);
        let mut grid = FaceGrid {
            origin,
            cell,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
            face_bounds,
        };
        for f in 0..grid.face_bounds.len() {
            let (c0, r0, c1, r1) = grid.span(&grid.face_bounds[f]);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    grid.buckets[r * cols + c].push(f as u32);
                }
            }
        }
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn clamp_col(&self, x: f64) -> usize {
        let c = ((x - self.origin.x) / self.cell).floor();
        c.clamp(0.0, (self.cols - 1) as f64) as usize
    }

    fn clamp_row(&self, y: f64) -> usize {
        let r = ((y - self.origin.y) / self.cell).floor();
        r.clamp(0.0, (self.rows - 1) as f64) as usize
    }

    fn span(&self, b: &Aabb) -> (usize, usize, usize, usize) {
        (
            self.clamp_col(b.min.x),
            self.clamp_row(b.min.y),
            self.clamp_col(b.max.x),
            self.clamp_row(b.max.y),
        )
    }

    /// Faces whose bounding boxes overlap `query`, ascending and unique.
    pub fn candidates(&self, query: &Aabb) -> Vec<usize> {
        let mut out = Vec::new();
        self.candidates_into(query, &mut out);
        out
    }

    pub fn candidates_into(&self, query: &Aabb, out: &mut Vec<usize>) {
        out.clear();
        let (c0, r0, c1, r1) = self.span(query);
        for r in r0..=r1 {
            for c in c0..=c1 {
                for &f in &self.buckets[r * self.cols + c] {
                    if self.face_bounds[f as usize].overlaps(query) {
                        out.push(f as usize);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// Face of `piece` containing `p`, tolerating points up to `tol` outside.
    pub fn locate(
        &self,
        mesh: &GarmentMesh,
        p: Point2<f64>,
        piece: Option<usize>,
        tol: f64,
    ) -> Option<(usize, [f64; 3])> {
        let q = Aabb {
            min: Point2::new(p.x - tol, p.y - tol),
            max: Point2::new(p.x + tol, p.y + tol),
        };
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for f in self.candidates(&q) {
            if piece.is_some_and(|pc| mesh.face_piece(f) != pc) {
                continue;
            }
            let [a, b, c] = mesh.face_pattern(f);
            let Some(w) = barycentric(p, a, b, c) else {
                continue;
            };
            let deficit = -w.iter().copied().fold(f64::INFINITY, f64::min);
            if deficit <= 0.0 {
                return Some((f, w));
            }
            let scale = (b - a).norm().max((c - a).norm()).max((c - b).norm());
            let dist = deficit * scale;
            if dist <= tol && best.as_ref().is_none_or(|bst| dist < bst.2) {
                best = Some((f, w, dist));
            }
        }
        best.map(|(f, w, _)| {
            let c = w.map(|x| x.max(0.0));
            let s: f64 = c.iter().sum();
            (f, c.map(|x| x / s))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::flat_sheet;

    #[test]
    fn grid_matches_brute_force() {
        let mesh = flat_sheet(0.3, 0.2, 12, 8).unwrap();
        let grid = FaceGrid::new(&mesh, 0.01);
        let q = Aabb {
            min: Point2::new(0.05, 0.03),
            max: Point2::new(0.11, 0.07),
        };
        let brute: Vec<usize> = (0..mesh.face_count())
            .filter(|&f| Aabb::from_points(&mesh.face_pattern(f)).overlaps(&q))
            .collect();
        assert_eq!(grid.candidates(&q), brute);
    }

    #[test]
    fn locate_agrees_with_mesh_scan() {
        let mesh = flat_sheet(0.3, 0.2, 12, 8).unwrap();
        let grid = FaceGrid::new(&mesh, 0.01);
        for &(x, y) in &[(0.01, 0.01), (0.155, 0.1), (0.29, 0.19)] {
            let p = Point2::new(x, y);
            let a = grid.locate(&mesh, p, None, 0.0).unwrap();
            let b = mesh.locate(p, None, 0.0).unwrap();
            assert_eq!(a.0, b.0);
        }
    }
}

use std::collections::BTreeMap;

use nalgebra::{Point2, Vector2};

use crate::grid::FaceGrid;
use crate::mesh::GarmentMesh;
use crate::polygon::{convex_intersection_area, strip_rect, Polygon2D};
use crate::strain::StrainField;

use super::smooth::{ArcSpline, Segment};

/// Largest angle spanned by one arc trapezoid (5°).
pub const MAX_ARC_STEP: f64 = std::f64::consts::PI / 36.0;

/// Strip polygons covering a curve, each spanning at most `wd/2` of arc
/// length. Lines give rectangles. Arcs give trapezoids inscribed between the
/// circles of radius `r ± wd/2`; their angular step is also capped at
/// [`MAX_ARC_STEP`] so tight fillets do not lose area to the chords.
pub fn curve_strips(spline: &ArcSpline, wd: f64) -> Vec<Polygon2D> {
    let h = 0.5 * wd;
    let mut out = Vec::new();
    for seg in &spline.segments {
        let mut n = ((seg.length() / h).ceil() as usize).max(1);
        if let Segment::Arc { sweep, .. } = *seg {
            n = n.max((sweep.abs() / MAX_ARC_STEP).ceil() as usize);
        }
        match *seg {
            Segment::Line { start, end } => {
                for k in 0..n {
                    let a = start + (end - start) * (k as f64 / n as f64);
                    let b = start + (end - start) * ((k + 1) as f64 / n as f64);
                    out.push(strip_rect(a, b, wd));
                }
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let inner = (radius - h).max(0.0);
                let outer = radius + h;
                let at = |r: f64, a: f64| center + Vector2::new(a.cos(), a.sin()) * r;
                for k in 0..n {
                    let a0 = start_angle + sweep * (k as f64 / n as f64);
                    let a1 = start_angle + sweep * ((k + 1) as f64 / n as f64);
                    let pts: Vec<Point2<f64>> =
                        vec![at(inner, a0), at(inner, a1), at(outer, a1), at(outer, a0)];
                    out.push(Polygon2D::new(pts).to_ccw());
                }
            }
        }
    }
    out
}

/// Area of every face of `piece` (or any piece) covered by the strips,
/// ascending by face.
pub fn strip_coverage(
    strips: &[Polygon2D],
    mesh: &GarmentMesh,
    grid: &FaceGrid,
    piece: Option<usize>,
) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cand = Vec::new();
    for poly in strips {
        grid.candidates_into(&poly.bounds(), &mut cand);
        for &f in &cand {
            if piece.is_some_and(|p| mesh.face_piece(f) != p) {
                continue;
            }
            let a = convex_intersection_area(&mesh.face_polygon(f), poly);
            if a > 0.0 {
                *acc.entry(f).or_insert(0.0) += a;
            }
        }
    }
    acc.into_iter().collect()
}

/// `Σ (ε(f) + η)·area` over a coverage list.
pub fn coverage_energy(coverage: &[(usize, f64)], densities: &[f64], eta: f64) -> f64 {
    coverage
        .iter()
        .map(|&(f, a)| (densities[f] + eta) * a)
        .sum()
}

/// Strip energy of a set of curves, each restricted to its pattern piece.
pub fn curve_deformation_energy(
    curves: &[(&ArcSpline, usize)],
    mesh: &GarmentMesh,
    field: &StrainField,
    eta: f64,
    wd: f64,
) -> f64 {
    let grid = FaceGrid::new(mesh, wd);
    curves
        .iter()
        .map(|&(spline, piece)| {
            let cov = strip_coverage(&curve_strips(spline, wd), mesh, &grid, Some(piece));
            coverage_energy(&cov, &field.per_face, eta)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::smooth::smooth_branch;
    use crate::synth::flat_sheet;
    use approx::assert_relative_eq;

    #[test]
    fn straight_wire_on_zero_field() {
        let mesh = flat_sheet(0.3, 0.2, 12, 8).unwrap();
        let field = StrainField::from_values(vec![0.0; mesh.face_count()]);
        let s = ArcSpline::from_polyline(&[Point2::new(0.05, 0.1), Point2::new(0.25, 0.1)]);
        let e = curve_deformation_energy(&[(&s, 0)], &mesh, &field, 2.0, 0.015);
        assert_relative_eq!(e, 2.0 * 0.015 * 0.2, max_relative = 1e-9);
    }

    #[test]
    fn arc_trapezoids_tile_the_annulus() {
        let wd = 0.015;
        let s = smooth_branch(
            &[Point2::new(0.0, 0.0), Point2::new(0.1, 0.0), Point2::new(0.1, 0.1)],
            wd,
            &Default::default(),
        )
        .unwrap();
        let arc = s
            .spline
            .segments
            .iter()
            .find(|s| matches!(s, Segment::Arc { .. }))
            .unwrap();
        let Segment::Arc { radius, sweep, .. } = *arc else {
            unreachable!()
        };
        let strips = curve_strips(&ArcSpline { segments: vec![*arc] }, wd);
        let area: f64 = strips.iter().map(Polygon2D::area).sum();
        let exact = sweep.abs() * radius * wd;
        // Inscribed polygons are slightly smaller than the annulus sector.
        assert!(area < exact && area > 0.998 * exact);
    }
}

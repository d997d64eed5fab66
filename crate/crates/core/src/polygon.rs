//! Planar polygon utilities used in pattern space.
//!
//! Everything here works on convex polygons: face triangles, the strip
//! rectangles around mesh edges and the trapezoids that cover arc pieces of a
//! smoothed wire. Intersections are computed with Sutherland–Hodgman clipping,
//! which is exact for convex clip regions.

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

/// Simple polygon in pattern space, vertices in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon2D {
    pub points: Vec<Point2<f64>>,
}

impl Polygon2D {
    pub fn new(points: Vec<Point2<f64>>) -> Self {
        Polygon2D { points }
    }

    pub fn triangle(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> Self {
        Polygon2D {
            points: vec![a, b, c],
        }
    }

    pub fn signed_area(&self) -> f64 {
        shoelace(&self.points)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    /// Same polygon with counter-clockwise winding.
    pub fn to_ccw(&self) -> Polygon2D {
        if self.signed_area() < 0.0 {
            let mut points = self.points.clone();
            points.reverse();
            Polygon2D { points }
        } else {
            self.clone()
        }
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.points)
    }

    /// Point containment for a convex polygon, boundary inclusive within `tol`.
    pub fn contains_convex(&self, p: Point2<f64>, tol: f64) -> bool {
        let sign = if self.signed_area() >= 0.0 { 1.0 } else { -1.0 };
        let n = self.points.len();
        (0..n).all(|i| {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            let edge = b - a;
            let len = edge.norm();
            if len == 0.0 {
                return true;
            }
            sign * cross(edge, p - a) / len >= -tol
        })
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point2<f64>,
    pub max: Point2<f64>,
}

impl Aabb {
    pub fn from_points(points: &[Point2<f64>]) -> Aabb {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Aabb { min, max }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }
}

#[inline]
pub fn cross(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed shoelace area, positive for counter-clockwise order.
pub fn shoelace(points: &[Point2<f64>]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    // Relative to the first point to limit cancellation for far-off coordinates.
    let o = points[0];
    let mut twice = 0.0;
    for i in 1..n - 1 {
        twice += cross(points[i] - o, points[i + 1] - o);
    }
    0.5 * twice
}

/// Rectangle of total width `width` whose midline is the segment `a`–`b`.
///
/// Corners are returned counter-clockwise starting at `a` offset to the
/// right of the travel direction.
pub fn strip_rect(a: Point2<f64>, b: Point2<f64>, width: f64) -> Polygon2D {
    let dir = b - a;
    let len = dir.norm();
    let normal = if len > 0.0 {
        Vector2::new(-dir.y, dir.x) / len * (0.5 * width)
    } else {
        Vector2::zeros()
    };
    Polygon2D::new(vec![a - normal, b - normal, b + normal, a + normal])
}

/// Clips `subject` against the convex, counter-clockwise `clip` polygon.
pub fn clip_convex(subject: &[Point2<f64>], clip: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut output: Vec<Point2<f64>> = subject.to_vec();
    let n = clip.len();
    let mut input = Vec::with_capacity(subject.len() + n);
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let edge = b - a;
        if edge.norm_squared() == 0.0 {
            continue;
        }
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let side = |p: &Point2<f64>| cross(edge, p - a);
        let mut prev = *input.last().unwrap();
        let mut prev_side = side(&prev);
        for &cur in input.iter() {
            let cur_side = side(&cur);
            if cur_side >= 0.0 {
                if prev_side < 0.0 {
                    output.push(intersect(prev, cur, prev_side, cur_side));
                }
                output.push(cur);
            } else if prev_side >= 0.0 {
                output.push(intersect(prev, cur, prev_side, cur_side));
            }
            prev = cur;
            prev_side = cur_side;
        }
    }
    output
}

fn intersect(p: Point2<f64>, q: Point2<f64>, sp: f64, sq: f64) -> Point2<f64> {
    let t = sp / (sp - sq);
    p + (q - p) * t
}

/// Area of the intersection of two convex polygons (either winding).
pub fn convex_intersection_area(a: &Polygon2D, b: &Polygon2D) -> f64 {
    if a.points.len() < 3 || b.points.len() < 3 {
        return 0.0;
    }
    if !a.bounds().overlaps(&b.bounds()) {
        return 0.0;
    }
    let clip = b.to_ccw();
    if clip.signed_area() <= 0.0 {
        return 0.0;
    }
    let subject = a.to_ccw();
    let clipped = clip_convex(&subject.points, &clip.points);
    shoelace(&clipped).max(0.0)
}

/// Area of triangle ∩ rectangle (both convex).
pub fn clip_triangle_rect(tri: &Polygon2D, rect: &Polygon2D) -> f64 {
    convex_intersection_area(tri, rect)
}

/// Barycentric coordinates of `p` with respect to triangle `(a, b, c)`.
/// Returns `None` for a degenerate triangle.
pub fn barycentric(
    p: Point2<f64>,
    a: Point2<f64>,
    b: Point2<f64>,
    c: Point2<f64>,
) -> Option<[f64; 3]> {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let den = cross(v0, v1);
    if den.abs() < 1e-300 {
        return None;
    }
    let wb = cross(v2, v1) / den;
    let wc = cross(v0, v2) / den;
    Some([1.0 - wb - wc, wb, wc])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon2D {
        Polygon2D::new(vec![p(x0, y0), p(x1, y0), p(x1, y1), p(x0, y1)])
    }

    #[test]
    fn horizontal_strip_corners() {
        let r = strip_rect(p(0.0, 0.0), p(2.0, 0.0), 1.0);
        assert_eq!(
            r.points,
            vec![p(0.0, -0.5), p(2.0, -0.5), p(2.0, 0.5), p(0.0, 0.5)]
        );
        assert_relative_eq!(r.signed_area(), 2.0);
    }

    #[test]
    fn rotated_strip_area() {
        let r = strip_rect(p(0.0, 0.0), p(1.0, 1.0), 0.2);
        assert_relative_eq!(r.area(), 0.282842712474619, max_relative = 1e-12);
    }

    #[test]
    fn rect_inside_triangle() {
        let tri = Polygon2D::triangle(p(0.0, 0.0), p(10.0, 0.0), p(0.0, 10.0));
        let rect = square(1.0, 1.0, 2.0, 3.0);
        assert_relative_eq!(clip_triangle_rect(&tri, &rect), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn disjoint_is_zero() {
        let tri = Polygon2D::triangle(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0));
        assert_eq!(clip_triangle_rect(&tri, &square(5.0, 5.0, 6.0, 6.0)), 0.0);
        // touching along the hypotenuse only
        assert_eq!(clip_triangle_rect(&tri, &square(1.0, 1.0, 2.0, 2.0)), 0.0);
    }

    #[test]
    fn half_square() {
        let tri = Polygon2D::triangle(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0));
        assert_relative_eq!(clip_triangle_rect(&tri, &square(0.0, 0.0, 1.0, 1.0)), 0.5);
    }

    #[test]
    fn clockwise_inputs_are_normalised() {
        let mut tri = Polygon2D::triangle(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0));
        tri.points.reverse();
        let mut sq = square(0.0, 0.0, 1.0, 1.0);
        sq.points.reverse();
        assert_relative_eq!(convex_intersection_area(&tri, &sq), 0.5);
    }

    #[test]
    fn barycentric_round_trip() {
        let (a, b, c) = (p(0.0, 0.0), p(2.0, 0.0), p(0.5, 1.5));
        let w = barycentric(p(0.8, 0.4), a, b, c).unwrap();
        let q = a.coords * w[0] + b.coords * w[1] + c.coords * w[2];
        assert_relative_eq!(q.x, 0.8, epsilon = 1e-14);
        assert_relative_eq!(q.y, 0.4, epsilon = 1e-14);
        assert!(barycentric(p(0.0, 0.0), a, a, a).is_none());
    }
}

//! Arc-spline smoothing of wire branches.
//!
//! Every interior corner of a branch polyline is replaced by a circular fillet
//! tangent to both adjacent segments. Fillets never go below radius
//! `margin · wd/2`, so curvature stays strictly under `2/wd`. When two fillets
//! would overlap on a shared segment, radii above the floor shrink first;
//! corners already at the floor are dropped from the polyline, which merges
//! their segments. Branch end points never move.

use std::f64::consts::PI;

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::cross;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothOptions {
    pub max_iter: usize,
    /// Minimum fillet radius as a multiple of `wd/2`; must exceed one.
    pub margin: f64,
    /// Radius reduction applied to overlapping fillets each iteration.
    pub shrink: f64,
    /// Starting fillet radius (m). `None` starts at the minimum.
    pub preferred_radius: Option<f64>,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        SmoothOptions {
            max_iter: 10,
            margin: 1.05,
            shrink: 0.8,
            preferred_radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Segment {
    Line {
        start: Point2<f64>,
        end: Point2<f64>,
    },
    /// Counter-clockwise for positive `sweep` (radians).
    Arc {
        center: Point2<f64>,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn curvature(&self) -> f64 {
        match *self {
            Segment::Line { .. } => 0.0,
            Segment::Arc { radius, .. } => 1.0 / radius,
        }
    }

    /// Point at parameter `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Point2<f64> {
        match *self {
            Segment::Line { start, end } => start + (end - start) * t,
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let a = start_angle + sweep * t;
                center + Vector2::new(a.cos(), a.sin()) * radius
            }
        }
    }

    /// Unit tangent at parameter `t`.
    pub fn tangent_at(&self, t: f64) -> Vector2<f64> {
        match *self {
            Segment::Line { start, end } => (end - start).normalize(),
            Segment::Arc {
                start_angle, sweep, ..
            } => {
                let a = start_angle + sweep * t;
                Vector2::new(-a.sin(), a.cos()) * sweep.signum()
            }
        }
    }

    pub fn start(&self) -> Point2<f64> {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point2<f64> {
        self.point_at(1.0)
    }
}

/// Chain of lines and circular arcs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ArcSpline {
    pub segments: Vec<Segment>,
}

impl ArcSpline {
    /// Straight-line spline through the polyline points.
    pub fn from_polyline(points: &[Point2<f64>]) -> ArcSpline {
        ArcSpline {
            segments: points
                .windows(2)
                .filter(|w| w[0] != w[1])
                .map(|w| Segment::Line {
                    start: w[0],
                    end: w[1],
                })
                .collect(),
        }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn max_curvature(&self) -> f64 {
        self.segments.iter().map(Segment::curvature).fold(0.0, f64::max)
    }

    pub fn start(&self) -> Option<Point2<f64>> {
        self.segments.first().map(Segment::start)
    }

    pub fn end(&self) -> Option<Point2<f64>> {
        self.segments.last().map(Segment::end)
    }

    /// Samples with consecutive spacing at most `spacing`, both end points
    /// included, together with the local curvature.
    pub fn sample_with_curvature(&self, spacing: f64) -> Vec<(Point2<f64>, f64)> {
        let mut out = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let n = ((seg.length() / spacing).ceil() as usize).max(1);
            let k = seg.curvature();
            let first = if i == 0 { 0 } else { 1 };
            for j in first..=n {
                out.push((seg.point_at(j as f64 / n as f64), k));
            }
        }
        out
    }

    pub fn sample(&self, spacing: f64) -> Vec<Point2<f64>> {
        self.sample_with_curvature(spacing)
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }

    /// Largest position gap and tangent-angle jump between consecutive
    /// segments.
    pub fn joint_mismatch(&self) -> (f64, f64) {
        let mut gap: f64 = 0.0;
        let mut angle: f64 = 0.0;
        for w in self.segments.windows(2) {
            gap = gap.max((w[0].end() - w[1].start()).norm());
            let (t0, t1) = (w[0].tangent_at(1.0), w[1].tangent_at(0.0));
            angle = angle.max(cross(t0, t1).atan2(t0.dot(&t1)).abs());
        }
        (gap, angle)
    }

    /// True if the strip of width `wd` around the curve folds onto itself:
    /// two samples further apart along the curve than a half turn at the
    /// minimum radius come closer than `wd`.
    pub fn strip_self_overlaps(&self, wd: f64) -> bool {
        let spacing = wd / 4.0;
        let pts = self.sample(spacing);
        let mut arc = Vec::with_capacity(pts.len());
        let mut s = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                s += (p - pts[i - 1]).norm();
            }
            arc.push(s);
        }
        let local = PI * 0.5 * wd * 1.05 + spacing;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if arc[j] - arc[i] <= local {
                    continue;
                }
                if (pts[j] - pts[i]).norm() < wd * (1.0 - 1e-6) {
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub spline: ArcSpline,
    /// Polyline after corner removal.
    pub corners: Vec<Point2<f64>>,
    pub iterations: usize,
}

/// Turning angle at `b` for the path `a → b → c`, in `[0, π]`.
fn turn(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> (f64, f64) {
    let d1 = b - a;
    let d2 = c - b;
    let x = cross(d1, d2);
    let angle = x.atan2(d1.dot(&d2)).abs();
    (angle, x.signum())
}

fn simplify(points: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut pts: Vec<Point2<f64>> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last().is_none_or(|q| (p - q).norm() > 1e-12) {
            pts.push(p);
        }
    }
    let mut i = 1;
    while i + 1 < pts.len() {
        let (angle, _) = turn(pts[i - 1], pts[i], pts[i + 1]);
        if angle < 1e-9 {
            pts.remove(i);
        } else {
            i += 1;
        }
    }
    pts
}

pub fn smooth_branch(points: &[Point2<f64>], wd: f64, opts: &SmoothOptions) -> Result<Smoothed> {
    if !(wd > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "strip width must be positive, got {wd}"
        )));
    }
    if !(opts.margin > 1.0) || !(opts.shrink > 0.0 && opts.shrink < 1.0) {
        return Err(Error::InvalidParameter(
            "smoothing needs margin > 1 and shrink in (0, 1)".into(),
        ));
    }
    let r_min = opts.margin * 0.5 * wd;
    let r_start = opts.preferred_radius.unwrap_or(r_min).max(r_min);
    let mut pts = simplify(points);
    let mut radius = vec![r_start; pts.len()];

    for iter in 1..=opts.max_iter.max(1) {
        let n = pts.len();
        // Tangent length each corner needs; ends need none.
        let mut need = vec![0.0; n];
        for i in 1..n.saturating_sub(1) {
            let (angle, _) = turn(pts[i - 1], pts[i], pts[i + 1]);
            need[i] = if angle >= PI - 1e-9 {
                f64::INFINITY
            } else {
                radius[i] * (0.5 * angle).tan()
            };
        }
        let violating: Vec<usize> = (0..n.saturating_sub(1))
            .filter(|&j| need[j] + need[j + 1] > (pts[j + 1] - pts[j]).norm() * (1.0 + 1e-12))
            .collect();
        if violating.is_empty() {
            return Ok(Smoothed {
                spline: build_spline(&pts, &radius),
                corners: pts,
                iterations: iter,
            });
        }
        if iter == opts.max_iter.max(1) {
            let corner = violating[0].max(1).min(n - 2);
            return Err(Error::CannotSatisfyCurvature { corner });
        }

        let mut drop = vec![false; n];
        for &j in &violating {
            let mut shrunk = false;
            for c in [j, j + 1] {
                if c == 0 || c == n - 1 || radius[c] <= r_min {
                    continue;
                }
                radius[c] = (radius[c] * opts.shrink).max(r_min);
                shrunk = true;
            }
            if shrunk {
                continue;
            }
            // Both sides at the floor: drop the sharper interior corner.
            let candidates: Vec<usize> = [j, j + 1]
                .into_iter()
                .filter(|&c| c != 0 && c != n - 1)
                .collect();
            let Some(&c) = candidates
                .iter()
                .max_by(|&&a, &&b| need[a].total_cmp(&need[b]).then(b.cmp(&a)))
            else {
                continue;
            };
            if !drop[c - 1] && !drop[c + 1] {
                drop[c] = true;
            }
        }
        let mut next = Vec::with_capacity(n);
        let mut next_r = Vec::with_capacity(n);
        for i in 0..n {
            if !drop[i] {
                next.push(pts[i]);
                next_r.push(radius[i]);
            }
        }
        pts = simplify(&next);
        // Radii follow surviving points; simplify only removes collinear ones,
        // whose radius is irrelevant.
        if pts.len() != next.len() {
            next_r = pts
                .iter()
                .map(|p| {
                    next.iter()
                        .position(|q| q == p)
                        .map(|k| next_r[k])
                        .unwrap_or(r_start)
                })
                .collect();
        }
        radius = next_r;
    }
    unreachable!("loop returns on its last iteration")
}

fn build_spline(pts: &[Point2<f64>], radius: &[f64]) -> ArcSpline {
    let n = pts.len();
    if n < 2 {
        return ArcSpline::default();
    }
    let mut segments = Vec::new();
    let mut cursor = pts[0];
    for i in 1..n - 1 {
        let (angle, side) = turn(pts[i - 1], pts[i], pts[i + 1]);
        let d1 = (pts[i] - pts[i - 1]).normalize();
        let d2 = (pts[i + 1] - pts[i]).normalize();
        let r = radius[i];
        let t = r * (0.5 * angle).tan();
        let t1 = pts[i] - d1 * t;
        let t2 = pts[i] + d2 * t;
        if (t1 - cursor).norm() > 1e-15 {
            segments.push(Segment::Line {
                start: cursor,
                end: t1,
            });
        }
        let normal = Vector2::new(-d1.y, d1.x) * side;
        let center = t1 + normal * r;
        let start_angle = (t1.y - center.y).atan2(t1.x - center.x);
        segments.push(Segment::Arc {
            center,
            radius: r,
            start_angle,
            sweep: angle * side,
        });
        cursor = t2;
    }
    if (pts[n - 1] - cursor).norm() > 1e-15 {
        segments.push(Segment::Line {
            start: cursor,
            end: pts[n - 1],
        });
    }
    ArcSpline { segments }
}

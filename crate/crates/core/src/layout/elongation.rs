use nalgebra::{Point2, Point3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FaceGrid;
use crate::mesh::GarmentMesh;
use crate::motion::MotionSet;

use super::smooth::ArcSpline;

/// How far outside its face a curve sample may sit before embedding fails (m).
pub const EMBED_TOL: f64 = 1e-7;

/// A curve sampled in pattern space and pinned to the mesh by barycentric
/// coordinates, so it can be replayed in any frame.
#[derive(Debug, Clone)]
pub struct EmbeddedCurve {
    corners: Vec<[usize; 3]>,
    weights: Vec<[f64; 3]>,
    rest_length: f64,
}

impl EmbeddedCurve {
    pub fn new(
        spline: &ArcSpline,
        piece: usize,
        spacing: f64,
        mesh: &GarmentMesh,
        grid: &FaceGrid,
    ) -> Result<Self> {
        let pts = spline.sample(spacing);
        Self::from_points(&pts, piece, mesh, grid)
    }

    pub fn from_points(
        pts: &[Point2<f64>],
        piece: usize,
        mesh: &GarmentMesh,
        grid: &FaceGrid,
    ) -> Result<Self> {
        let mut corners = Vec::with_capacity(pts.len());
        let mut weights = Vec::with_capacity(pts.len());
        for &p in pts {
            let (f, w) = grid
                .locate(mesh, p, Some(piece), EMBED_TOL)
                .ok_or(Error::EmbeddingFailure(p.x, p.y))?;
            corners.push(mesh.faces()[f]);
            weights.push(w);
        }
        let rest_length = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        Ok(EmbeddedCurve {
            corners,
            weights,
            rest_length,
        })
    }

    pub fn rest_length(&self) -> f64 {
        self.rest_length
    }

    fn point(&self, i: usize, frame: &[Point3<f64>]) -> Point3<f64> {
        let [a, b, c] = self.corners[i];
        let [wa, wb, wc] = self.weights[i];
        Point3::from(frame[a].coords * wa + frame[b].coords * wb + frame[c].coords * wc)
    }

    /// Polyline length of the curve in a deformed frame.
    pub fn length_in(&self, frame: &[Point3<f64>]) -> f64 {
        (1..self.corners.len())
            .map(|i| (self.point(i, frame) - self.point(i - 1, frame)).norm())
            .sum()
    }

    /// Stretch `max(0, (ℓ − ℓ_rest)/ℓ_rest)` in a frame, as a fraction.
    pub fn rate_in(&self, frame: &[Point3<f64>]) -> f64 {
        if self.rest_length <= 0.0 {
            return 0.0;
        }
        ((self.length_in(frame) - self.rest_length) / self.rest_length).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElongationSummary {
    /// Percent.
    pub max_rate: f64,
    /// Percent.
    pub avg_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceElongation {
    pub name: String,
    pub max_rate: f64,
    pub avg_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElongationReport {
    /// Whole tree, branches weighted by rest length.
    pub tree: ElongationSummary,
    pub per_branch: Vec<ElongationSummary>,
    pub per_sequence: Vec<SequenceElongation>,
}

/// Elongation of every curve over every frame of `motions`.
pub fn elongation_rates(curves: &[EmbeddedCurve], motions: &MotionSet) -> ElongationReport {
    let frames: Vec<(usize, &[Point3<f64>])> = motions
        .sequences()
        .iter()
        .enumerate()
        .flat_map(|(s, seq)| seq.frames.iter().map(move |f| (s, f.as_slice())))
        .collect();
    // rates[frame][branch], fractions.
    let rates: Vec<Vec<f64>> = frames
        .par_iter()
        .map(|(_, f)| curves.iter().map(|c| c.rate_in(f)).collect())
        .collect();
    let total: f64 = curves.iter().map(EmbeddedCurve::rest_length).sum();
    let tree_rate = |r: &[f64]| -> f64 {
        if total <= 0.0 {
            return 0.0;
        }
        curves
            .iter()
            .zip(r)
            .map(|(c, x)| c.rest_length() * x)
            .sum::<f64>()
            / total
    };
    let per_frame: Vec<f64> = rates.iter().map(|r| tree_rate(r)).collect();
    let summarize = |xs: &mut dyn Iterator<Item = f64>| -> ElongationSummary {
        let (mut max, mut sum, mut n) = (0.0f64, 0.0, 0usize);
        for x in xs {
            max = max.max(x);
            sum += x;
            n += 1;
        }
        ElongationSummary {
            max_rate: 100.0 * max,
            avg_rate: if n == 0 { 0.0 } else { 100.0 * sum / n as f64 },
        }
    };
    let tree = summarize(&mut per_frame.iter().copied());
    let per_branch = (0..curves.len())
        .map(|b| summarize(&mut rates.iter().map(|r| r[b])))
        .collect();
    let per_sequence = motions
        .sequences()
        .iter()
        .enumerate()
        .map(|(s, seq)| {
            let sm = summarize(
                &mut frames
                    .iter()
                    .zip(&per_frame)
                    .filter(|((fs, _), _)| *fs == s)
                    .map(|(_, &x)| x),
            );
            SequenceElongation {
                name: seq.name.clone(),
                max_rate: sm.max_rate,
                avg_rate: sm.avg_rate,
            }
        })
        .collect();
    ElongationReport {
        tree,
        per_branch,
        per_sequence,
    }
}

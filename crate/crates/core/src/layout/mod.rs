//! From a Steiner tree to a wearable wire layout, and how to score one.
//!
//! The tree is cut into branches, each branch is smoothed into an arc spline
//! in pattern space, and the result is evaluated by the strain energy under
//! its strip and by how much it stretches over the motion frames.

mod branches;
mod compare;
mod elongation;
mod energy;
mod smooth;

use nalgebra::Point2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use branches::{extract_branches, BranchPath};
pub use compare::{compare_layouts, ComparisonReport, ComparisonRow};
pub use elongation::{
    elongation_rates, ElongationReport, ElongationSummary, EmbeddedCurve, SequenceElongation,
    EMBED_TOL,
};
pub use energy::{coverage_energy, curve_deformation_energy, curve_strips, strip_coverage};
pub use smooth::{smooth_branch, ArcSpline, Segment, SmoothOptions, Smoothed};

use crate::error::{Error, Result};
use crate::graph::WeightedWireGraph;
use crate::grid::FaceGrid;
use crate::mesh::GarmentMesh;
use crate::motion::MotionSet;
use crate::steiner::SteinerTree;
use crate::strain::StrainField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutBranch {
    /// Mesh vertices along the branch.
    pub vertices: Vec<usize>,
    pub piece: usize,
    /// Pattern positions of `vertices`.
    pub polyline: Vec<Point2<f64>>,
    #[serde(flatten)]
    pub spline: ArcSpline,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireLayout {
    pub tree: SteinerTree,
    pub branches: Vec<LayoutBranch>,
    #[serde(rename = "wd")]
    pub strip_width: f64,
}

impl WireLayout {
    pub fn total_length(&self) -> f64 {
        self.branches.iter().map(|b| b.spline.length()).sum()
    }

    pub fn max_curvature(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.spline.max_curvature())
            .fold(0.0, f64::max)
    }

    pub fn max_iterations(&self) -> usize {
        self.branches.iter().map(|b| b.iterations).max().unwrap_or(0)
    }

    /// Branch polylines as unsmoothed splines.
    pub fn polyline_splines(&self) -> Vec<ArcSpline> {
        self.branches
            .iter()
            .map(|b| ArcSpline::from_polyline(&b.polyline))
            .collect()
    }
}

/// Splits `tree` into branches and smooths each one.
pub fn build_layout(
    tree: &SteinerTree,
    graph: &WeightedWireGraph,
    mesh: &GarmentMesh,
    strip_width: f64,
    opts: &SmoothOptions,
) -> Result<WireLayout> {
    let paths = extract_branches(tree, graph, mesh)?;
    let branches = paths
        .par_iter()
        .map(|p| {
            let polyline: Vec<Point2<f64>> =
                p.vertices.iter().map(|&v| mesh.pattern()[v]).collect();
            let first_edge = mesh
                .edge_between(p.vertices[0], p.vertices[1])
                .ok_or_else(|| Error::Topology("branch vertices are not adjacent".into()))?;
            let smoothed = smooth_branch(&polyline, strip_width, opts)?;
            Ok(LayoutBranch {
                vertices: p.vertices.clone(),
                piece: mesh.edge_piece(first_edge),
                polyline,
                spline: smoothed.spline,
                iterations: smoothed.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WireLayout {
        tree: tree.clone(),
        branches,
        strip_width,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetrics {
    pub name: String,
    pub deformation_energy: f64,
    pub max_elongation_rate: f64,
    pub avg_elongation_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchMetrics {
    pub length: f64,
    pub max_elongation_rate: f64,
    pub avg_elongation_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutMetrics {
    /// Strip energy of the smoothed curves.
    pub deformation_energy: f64,
    /// Strip energy of the unsmoothed branch polylines.
    pub polyline_energy: f64,
    /// Percent.
    pub max_elongation_rate: f64,
    /// Percent.
    pub avg_elongation_rate: f64,
    /// Smoothed length in pattern space (m).
    pub total_length: f64,
    /// Density added to every face while integrating energy (Pa).
    pub eta: f64,
    pub per_sequence: Vec<SequenceMetrics>,
    pub per_branch: Vec<BranchMetrics>,
}

impl LayoutMetrics {
    /// Relative change of energy caused by smoothing, percent.
    pub fn smoothing_drift(&self) -> f64 {
        if self.polyline_energy == 0.0 {
            0.0
        } else {
            100.0 * (self.deformation_energy - self.polyline_energy).abs() / self.polyline_energy
        }
    }
}

/// Scores a layout. `eta` is added to every density, so `eta = 0` gives the
/// pure strain energy under the strips.
pub fn evaluate(
    layout: &WireLayout,
    mesh: &GarmentMesh,
    field: &StrainField,
    motions: &MotionSet,
    eta: f64,
) -> Result<LayoutMetrics> {
    if field.face_count() != mesh.face_count() {
        return Err(Error::MotionMismatch(format!(
            "strain field has {} faces, mesh has {}",
            field.face_count(),
            mesh.face_count()
        )));
    }
    motions.check_mesh(mesh)?;
    let wd = layout.strip_width;
    let grid = FaceGrid::new(mesh, wd);
    let cover = |s: &ArcSpline, piece: usize| {
        strip_coverage(&curve_strips(s, wd), mesh, &grid, Some(piece))
    };
    let smooth_cov: Vec<Vec<(usize, f64)>> = layout
        .branches
        .par_iter()
        .map(|b| cover(&b.spline, b.piece))
        .collect();
    let poly_cov: Vec<Vec<(usize, f64)>> = layout
        .branches
        .par_iter()
        .map(|b| cover(&ArcSpline::from_polyline(&b.polyline), b.piece))
        .collect();
    let energy_with = |cov: &[Vec<(usize, f64)>], dens: &[f64]| -> f64 {
        cov.iter().map(|c| coverage_energy(c, dens, eta)).sum()
    };

    let curves = layout
        .branches
        .par_iter()
        .map(|b| EmbeddedCurve::new(&b.spline, b.piece, wd / 4.0, mesh, &grid))
        .collect::<Result<Vec<_>>>()?;
    let el = elongation_rates(&curves, motions);

    let per_sequence = field
        .per_sequence
        .iter()
        .map(|s| {
            let e = el.per_sequence.iter().find(|x| x.name == s.name);
            SequenceMetrics {
                name: s.name.clone(),
                deformation_energy: energy_with(&smooth_cov, &s.means),
                max_elongation_rate: e.map_or(0.0, |x| x.max_rate),
                avg_elongation_rate: e.map_or(0.0, |x| x.avg_rate),
            }
        })
        .collect();
    let per_branch = layout
        .branches
        .iter()
        .zip(&el.per_branch)
        .map(|(b, s)| BranchMetrics {
            length: b.spline.length(),
            max_elongation_rate: s.max_rate,
            avg_elongation_rate: s.avg_rate,
        })
        .collect();
    Ok(LayoutMetrics {
        deformation_energy: energy_with(&smooth_cov, &field.per_face),
        polyline_energy: energy_with(&poly_cov, &field.per_face),
        max_elongation_rate: el.tree.max_rate,
        avg_elongation_rate: el.tree.avg_rate,
        total_length: layout.total_length(),
        eta,
        per_sequence,
        per_branch,
    })
}

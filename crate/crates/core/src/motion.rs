//! Motion sequences: per-frame deformed positions aligned to mesh vertices.

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::mesh::{GarmentMesh, VertexOrigin};

pub type Frame = Vec<Point3<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct MotionSequence {
    pub name: String,
    pub frames: Vec<Frame>,
}

impl MotionSequence {
    pub fn new(name: impl Into<String>, frames: Vec<Frame>) -> Self {
        MotionSequence {
            name: name.into(),
            frames,
        }
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionSet {
    sequences: Vec<MotionSequence>,
    vertex_count: usize,
}

impl MotionSet {
    /// Validates that there is at least one sequence, every sequence has a
    /// frame, and every frame has the same number of positions.
    pub fn new(sequences: Vec<MotionSequence>) -> Result<Self> {
        let first = sequences
            .first()
            .ok_or_else(|| Error::MotionMismatch("motion set has no sequences".into()))?;
        let vertex_count = first
            .frames
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::MotionMismatch(format!("sequence '{}' has no frames", first.name)))?;
        for s in &sequences {
            if s.frames.is_empty() {
                return Err(Error::MotionMismatch(format!(
                    "sequence '{}' has no frames",
                    s.name
                )));
            }
            for (j, f) in s.frames.iter().enumerate() {
                if f.len() != vertex_count {
                    return Err(Error::MotionMismatch(format!(
                        "sequence '{}' frame {j} has {} positions, expected {vertex_count}",
                        s.name,
                        f.len()
                    )));
                }
            }
        }
        Ok(MotionSet {
            sequences,
            vertex_count,
        })
    }

    /// Expands frames given over the mesh's source positions (as read from
    /// disk) to one position per mesh vertex.
    pub fn from_source(mesh: &GarmentMesh, sequences: Vec<MotionSequence>) -> Result<Self> {
        let expanded = sequences
            .into_iter()
            .map(|s| {
                let frames = s
                    .frames
                    .iter()
                    .enumerate()
                    .map(|(j, raw)| {
                        if raw.len() != mesh.source_count() {
                            return Err(Error::MotionMismatch(format!(
                                "sequence '{}' frame {j} has {} positions, mesh source has {}",
                                s.name,
                                raw.len(),
                                mesh.source_count()
                            )));
                        }
                        Ok(expand_frame(mesh, raw, 0, Vec::with_capacity(mesh.vertex_count())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MotionSequence::new(s.name, frames))
            })
            .collect::<Result<Vec<_>>>()?;
        MotionSet::new(expanded)
    }

    /// Extends every frame with positions for mesh vertices added after this
    /// set was built (terminal insertion, subdivision). Existing vertices must
    /// be unchanged.
    pub fn align_to(&self, mesh: &GarmentMesh) -> Result<MotionSet> {
        if self.vertex_count > mesh.vertex_count() {
            return Err(Error::MotionMismatch(format!(
                "motion has {} vertices, mesh only {}",
                self.vertex_count,
                mesh.vertex_count()
            )));
        }
        if self.vertex_count == mesh.vertex_count() {
            return Ok(self.clone());
        }
        let sequences = self
            .sequences
            .iter()
            .map(|s| {
                let frames = s
                    .frames
                    .iter()
                    .map(|f| expand_frame(mesh, &[], self.vertex_count, f.clone()))
                    .collect();
                MotionSequence::new(s.name.clone(), frames)
            })
            .collect();
        MotionSet::new(sequences)
    }

    /// A single sequence that repeats the rest pose `frames` times.
    pub fn rest(mesh: &GarmentMesh, frames: usize) -> MotionSet {
        let frame = mesh.positions().to_vec();
        MotionSet {
            sequences: vec![MotionSequence::new("rest", vec![frame; frames.max(1)])],
            vertex_count: mesh.vertex_count(),
        }
    }

    pub fn sequences(&self) -> &[MotionSequence] {
        &self.sequences
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn total_frames(&self) -> usize {
        self.sequences.iter().map(|s| s.frames.len()).sum()
    }

    pub fn check_mesh(&self, mesh: &GarmentMesh) -> Result<()> {
        if self.vertex_count != mesh.vertex_count() {
            return Err(Error::MotionMismatch(format!(
                "frames carry {} positions, mesh has {} vertices",
                self.vertex_count,
                mesh.vertex_count()
            )));
        }
        Ok(())
    }
}

/// Fills positions for vertices `start..` of `mesh` into `out` (which must
/// already hold `start` entries).
fn expand_frame(mesh: &GarmentMesh, raw: &[Point3<f64>], start: usize, mut out: Frame) -> Frame {
    debug_assert_eq!(out.len(), start);
    for origin in &mesh.origins()[start..] {
        let p = match *origin {
            VertexOrigin::Source(i) => raw[i],
            VertexOrigin::Embedded { corners, weights } => {
                let mut acc = Point3::origin().coords;
                for k in 0..3 {
                    acc += out[corners[k]].coords * weights[k];
                }
                acc.into()
            }
        };
        out.push(p);
    }
    out
}

//! Procedural garments and motions for tests and demos.
//!
//! Faceted cylinders unroll isometrically into a rectangle, so their pattern
//! is exact: `u` advances by the chord `2R·sin(π/n)` per column around and
//! `v = s` along the axis. The cut runs along `θ = ±π` and
//! is reported as [`SeamGlue`] pairs that can optionally be sewn.

use std::f64::consts::PI;

use nalgebra::{Point2, Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SeamGlue;
use crate::mesh::GarmentMesh;
use crate::motion::{Frame, MotionSequence, MotionSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SleeveParams {
    pub radius: f64,
    pub length: f64,
    /// Quads around the circumference.
    pub around: usize,
    /// Quads along the axis.
    pub along: usize,
    pub theta_max_deg: f64,
    /// Axial position of the middle of the bend zone.
    pub bend_center: f64,
    /// Axial extent of the bend zone.
    pub bend_length: f64,
    pub frames: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SleeveParams {
    fn default() -> Self {
        SleeveParams {
            radius: 0.05,
            length: 0.6,
            around: 32,
            along: 32,
            theta_max_deg: 90.0,
            bend_center: 0.3,
            bend_length: 0.15,
            frames: 60,
            noise: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwistParams {
    pub radius: f64,
    pub length: f64,
    pub around: usize,
    pub along: usize,
    /// Twist of the far end relative to the near end at the last frame.
    pub twist_max_deg: f64,
    pub frames: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for TwistParams {
    fn default() -> Self {
        TwistParams {
            radius: 0.15,
            length: 0.5,
            around: 48,
            along: 24,
            twist_max_deg: 30.0,
            frames: 30,
            noise: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StretchParams {
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    /// Stretch factor along x reached at the last frame.
    pub stretch: f64,
    pub frames: usize,
}

impl Default for StretchParams {
    fn default() -> Self {
        StretchParams {
            width: 0.3,
            height: 0.2,
            nx: 12,
            ny: 8,
            stretch: 1.1,
            frames: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SyntheticSpec {
    SleeveBend(SleeveParams),
    TorsoTwist(TwistParams),
    FlatStretch(StretchParams),
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub mesh: GarmentMesh,
    pub motions: MotionSet,
    pub glue: SeamGlue,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticScene> {
    match spec {
        SyntheticSpec::SleeveBend(p) => sleeve_bend(p),
        SyntheticSpec::TorsoTwist(p) => torso_twist(p),
        SyntheticSpec::FlatStretch(p) => flat_stretch(p),
    }
}

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.to_string()))
    }
}

/// Flat rectangular sheet in the z = 0 plane, `nx × ny` quads split along
/// one diagonal. Pattern equals the 3D layout.
pub fn flat_sheet(width: f64, height: f64, nx: usize, ny: usize) -> Result<GarmentMesh> {
    check(width > 0.0 && height > 0.0, "sheet size must be positive")?;
    check(nx >= 1 && ny >= 1, "sheet needs at least one quad per side")?;
    let mut pattern = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            pattern.push(Point2::new(
                width * i as f64 / nx as f64,
                height * j as f64 / ny as f64,
            ));
        }
    }
    let positions = pattern.iter().map(|p| Point3::new(p.x, p.y, 0.0)).collect();
    GarmentMesh::new(positions, grid_faces(nx, ny), pattern)
}

/// Triangles of an `(nx+1) × (ny+1)` vertex grid, row-major vertices.
fn grid_faces(nx: usize, ny: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    faces
}

/// Open cylinder along +x, cut at θ = ±π. Returns the mesh, the per-vertex
/// `(axial s, angle θ)` and the seam pairs.
pub fn cylinder(
    radius: f64,
    length: f64,
    around: usize,
    along: usize,
) -> Result<(GarmentMesh, Vec<(f64, f64)>, SeamGlue)> {
    check(radius > 0.0 && length > 0.0, "cylinder size must be positive")?;
    check(around >= 3 && along >= 1, "cylinder needs ≥3 quads around and ≥1 along")?;
    let nx = around;
    let ny = along;
    let mut pattern = Vec::new();
    let mut positions = Vec::new();
    let mut coords = Vec::new();
    // The faceted prism unrolls exactly with chord spacing; arc spacing
    // would leave every face slightly compressed at rest.
    let chord = 2.0 * radius * (PI / nx as f64).sin();
    for j in 0..=ny {
        let s = length * j as f64 / ny as f64;
        for i in 0..=nx {
            let theta = -PI + 2.0 * PI * i as f64 / nx as f64;
            pattern.push(Point2::new(chord * (i as f64 - nx as f64 / 2.0), s));
            positions.push(Point3::new(s, radius * theta.cos(), radius * theta.sin()));
            coords.push((s, theta));
        }
    }
    let mesh = GarmentMesh::new(positions, grid_faces(nx, ny), pattern)?;
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let pairs = (0..ny)
        .map(|j| {
            let a = mesh.edge_between(idx(0, j), idx(0, j + 1)).unwrap();
            let b = mesh.edge_between(idx(nx, j), idx(nx, j + 1)).unwrap();
            [a, b]
        })
        .collect();
    Ok((mesh, coords, SeamGlue { pairs }))
}

/// Position of a sleeve point after bending by `angle` about a hinge zone
/// `[s0, s0 + bend_length]`. The centre line follows a circular arc, so a
/// material line at height `y` above it stretches by `1 + y/ρ`.
pub fn bend_point(p: Point3<f64>, s0: f64, bend_length: f64, angle: f64) -> Point3<f64> {
    if angle == 0.0 || p.x <= s0 {
        return p;
    }
    let rho = bend_length / angle;
    let (s, y, z) = (p.x, p.y, p.z);
    let s1 = s0 + bend_length;
    let phi = if s < s1 { (s - s0) / rho } else { angle };
    let mut x = s0 + (rho + y) * phi.sin();
    let mut yy = -rho + (rho + y) * phi.cos();
    if s > s1 {
        x += (s - s1) * angle.cos();
        yy -= (s - s1) * angle.sin();
    }
    Point3::new(x, yy, z)
}

fn jitter(rng: &mut ChaCha8Rng, amp: f64) -> Vector3<f64> {
    if amp == 0.0 {
        return Vector3::zeros();
    }
    Vector3::new(
        rng.random_range(-amp..=amp),
        rng.random_range(-amp..=amp),
        rng.random_range(-amp..=amp),
    )
}

fn ramp(j: usize, frames: usize) -> f64 {
    if frames <= 1 {
        1.0
    } else {
        j as f64 / (frames - 1) as f64
    }
}

pub fn sleeve_bend(p: &SleeveParams) -> Result<SyntheticScene> {
    check(p.frames >= 1, "need at least one frame")?;
    check(p.bend_length > 0.0, "bend length must be positive")?;
    let theta_max = p.theta_max_deg.to_radians();
    check(
        theta_max >= 0.0 && theta_max < PI,
        "bend angle must lie in [0°, 180°)",
    )?;
    check(
        theta_max == 0.0 || p.bend_length / theta_max > p.radius,
        "bend too tight: inner side would fold (need bend_length / θmax > radius)",
    )?;
    let s0 = p.bend_center - 0.5 * p.bend_length;
    check(
        s0 >= 0.0 && s0 + p.bend_length <= p.length,
        "bend zone must lie within the sleeve",
    )?;
    let (mesh, _, glue) = cylinder(p.radius, p.length, p.around, p.along)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let frames: Vec<Frame> = (0..p.frames)
        .map(|j| {
            let angle = theta_max * ramp(j, p.frames);
            mesh.positions()
                .iter()
                .map(|&x| bend_point(x, s0, p.bend_length, angle) + jitter(&mut rng, p.noise))
                .collect()
        })
        .collect();
    let motions = MotionSet::from_source(&mesh, vec![MotionSequence::new("sleeve-bend", frames)])?;
    Ok(SyntheticScene {
        mesh,
        motions,
        glue,
    })
}

pub fn torso_twist(p: &TwistParams) -> Result<SyntheticScene> {
    check(p.frames >= 1, "need at least one frame")?;
    let (mesh, _, glue) = cylinder(p.radius, p.length, p.around, p.along)?;
    let twist = p.twist_max_deg.to_radians();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let frames: Vec<Frame> = (0..p.frames)
        .map(|j| {
            let tau = twist * ramp(j, p.frames);
            mesh.positions()
                .iter()
                .map(|q| {
                    let phi = tau * q.x / p.length;
                    let (c, s) = (phi.cos(), phi.sin());
                    Point3::new(q.x, c * q.y - s * q.z, s * q.y + c * q.z) + jitter(&mut rng, p.noise)
                })
                .collect()
        })
        .collect();
    let motions = MotionSet::from_source(&mesh, vec![MotionSequence::new("torso-twist", frames)])?;
    Ok(SyntheticScene {
        mesh,
        motions,
        glue,
    })
}

pub fn flat_stretch(p: &StretchParams) -> Result<SyntheticScene> {
    check(p.frames >= 1, "need at least one frame")?;
    check(p.stretch > 0.0, "stretch factor must be positive")?;
    let mesh = flat_sheet(p.width, p.height, p.nx, p.ny)?;
    let frames: Vec<Frame> = (0..p.frames)
        .map(|j| {
            let s = 1.0 + (p.stretch - 1.0) * ramp(j, p.frames);
            mesh.positions()
                .iter()
                .map(|q| Point3::new(s * q.x, q.y, q.z))
                .collect()
        })
        .collect();
    let motions = MotionSet::from_source(&mesh, vec![MotionSequence::new("flat-stretch", frames)])?;
    Ok(SyntheticScene {
        mesh,
        motions,
        glue: SeamGlue::default(),
    })
}

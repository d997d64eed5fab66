use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Point2, Point3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{GarmentMesh, VertexOrigin};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadOptions {
    /// Multiplier taking texture coordinates to meters.
    pub unit_scale: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { unit_scale: 1.0 }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn floats<const N: usize>(path: &Path, line: usize, rest: &[&str]) -> Result<[f64; N]> {
    if rest.len() < N {
        return Err(Error::parse(path, line, format!("expected {N} numbers")));
    }
    let mut out = [0.0; N];
    for (o, s) in out.iter_mut().zip(rest) {
        *o = s
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad number '{s}'")))?;
    }
    Ok(out)
}

/// OBJ index (1-based, or negative from the end) to a 0-based index.
fn index(path: &Path, line: usize, s: &str, count: usize) -> Result<usize> {
    let i: i64 = s
        .parse()
        .map_err(|_| Error::parse(path, line, format!("bad index '{s}'")))?;
    let resolved = if i > 0 { i - 1 } else { count as i64 + i };
    if resolved < 0 || resolved as usize >= count {
        return Err(Error::parse(path, line, format!("index {i} out of range")));
    }
    Ok(resolved as usize)
}

/// Reads `v` positions only, in file order.
pub fn read_obj_positions(path: &Path) -> Result<Vec<Point3<f64>>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() == Some("v") {
            let rest: Vec<&str> = it.collect();
            let [x, y, z] = floats::<3>(path, ln + 1, &rest)?;
            out.push(Point3::new(x, y, z));
        }
    }
    Ok(out)
}

/// Parses a garment OBJ. Every distinct `(v, vt)` pair becomes one mesh
/// vertex; polygons are fan-triangulated.
pub fn parse_obj(text: &str, path: &Path, opts: &LoadOptions) -> Result<GarmentMesh> {
    if !(opts.unit_scale > 0.0) {
        return Err(Error::InvalidParameter("unit scale must be positive".into()));
    }
    let mut v: Vec<Point3<f64>> = Vec::new();
    let mut vt: Vec<Point2<f64>> = Vec::new();
    let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut pattern = Vec::new();
    let mut origins = Vec::new();
    let mut faces = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        match tag {
            "v" => {
                let [x, y, z] = floats::<3>(path, ln, &rest)?;
                v.push(Point3::new(x, y, z));
            }
            "vt" => {
                let [x, y] = floats::<2>(path, ln, &rest)?;
                vt.push(Point2::new(x * opts.unit_scale, y * opts.unit_scale));
            }
            "f" => {
                if rest.len() < 3 {
                    return Err(Error::parse(path, ln, "face needs at least 3 corners"));
                }
                let mut corners = Vec::with_capacity(rest.len());
                for c in &rest {
                    let mut parts = c.split('/');
                    let vi = index(path, ln, parts.next().unwrap_or(""), v.len())?;
                    let ti = match parts.next() {
                        Some(s) if !s.is_empty() => index(path, ln, s, vt.len())?,
                        _ => return Err(Error::PatternMissing),
                    };
                    let id = *pair_index.entry((vi, ti)).or_insert_with(|| {
                        positions.push(v[vi]);
                        pattern.push(vt[ti]);
                        origins.push(VertexOrigin::Source(vi));
                        positions.len() - 1
                    });
                    corners.push(id);
                }
                for k in 1..corners.len() - 1 {
                    faces.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            _ => {}
        }
    }
    if faces.is_empty() {
        return Err(Error::parse(path, 0, "no faces"));
    }
    GarmentMesh::with_origins(positions, faces, pattern, origins, v.len())
}

pub fn read_obj(path: &Path, opts: &LoadOptions) -> Result<GarmentMesh> {
    parse_obj(&read_text(path)?, path, opts)
}

/// OBJ text with one `v`/`vt` per mesh vertex.
pub fn obj_string(mesh: &GarmentMesh) -> String {
    let mut s = String::new();
    for p in mesh.positions() {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    for p in mesh.pattern() {
        let _ = writeln!(s, "vt {} {}", p.x, p.y);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "f {0}/{0} {1}/{1} {2}/{2}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

/// Positions-only OBJ for one motion frame.
pub fn frame_obj_string(frame: &[Point3<f64>]) -> String {
    let mut s = String::new();
    for p in frame {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    s
}

pub fn write_obj(path: &Path, mesh: &GarmentMesh) -> Result<()> {
    super::write_bytes(path, obj_string(mesh).as_bytes())
}

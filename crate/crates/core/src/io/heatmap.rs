use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{curve_strips, WireLayout};
use crate::mesh::GarmentMesh;
use crate::strain::StrainField;

const STRAIN_MAGIC: &[u8; 4] = b"WLSF";

/// `.strain` sidecar: magic, `u32` face count, then little-endian `f64`
/// densities.
pub fn encode_strain(field: &StrainField) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * field.face_count());
    out.extend_from_slice(STRAIN_MAGIC);
    out.extend_from_slice(&(field.face_count() as u32).to_le_bytes());
    for x in &field.per_face {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_strain(bytes: &[u8], path: &Path) -> Result<StrainField> {
    if bytes.len() < 8 || &bytes[..4] != STRAIN_MAGIC {
        return Err(Error::parse(path, 0, "missing WLSF header"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if bytes.len() != 8 + 8 * n {
        return Err(Error::parse(path, 0, format!("expected {n} densities")));
    }
    let per_face = bytes[8..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(StrainField::from_values(per_face))
}

pub fn write_strain(path: &Path, field: &StrainField) -> Result<()> {
    super::write_bytes(path, &encode_strain(field))
}

pub fn read_strain(path: &Path) -> Result<StrainField> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_strain(&bytes, path)
}

/// Logarithmic binning of a density field. Bin 0 collects everything at or
/// below `edges[0]`; bin `i ≥ 1` covers `(edges[i-1], edges[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBins {
    pub edges: Vec<f64>,
    pub bins: Vec<u8>,
    pub max: f64,
}

/// Number of decades the color scale spans below the maximum.
const DECADES: f64 = 4.0;

pub fn log_bins(values: &[f64], count: usize) -> LogBins {
    let count = count.clamp(2, 255);
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return LogBins {
            edges: vec![0.0],
            bins: vec![0; values.len()],
            max,
        };
    }
    let lo = max.log10() - DECADES;
    let step = DECADES / (count - 1) as f64;
    let edges: Vec<f64> = (0..count).map(|i| 10f64.powf(lo + step * i as f64)).collect();
    let bins = values
        .iter()
        .map(|&x| {
            if x <= edges[0] {
                0
            } else {
                (((x.log10() - lo) / step).ceil() as usize).min(count - 1) as u8
            }
        })
        .collect();
    LogBins { edges, bins, max }
}

/// Viridis-like ramp for `t ∈ [0, 1]`.
pub fn ramp(t: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let mut out = [0u8; 3];
    for k in 0..3 {
        out[k] = (STOPS[i][k] + (STOPS[i + 1][k] - STOPS[i][k]) * f).round() as u8;
    }
    out
}

fn bin_color(bins: &LogBins, b: u8) -> [u8; 3] {
    let n = bins.edges.len().max(2) - 1;
    ramp(b as f64 / n as f64)
}

/// ASCII PLY of the 3D mesh with per-face colors from the log scale.
pub fn ply_string(mesh: &GarmentMesh, field: &StrainField) -> String {
    let bins = log_bins(&field.per_face, 16);
    let mut s = String::new();
    let _ = write!(
        s,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         element face {}\nproperty list uchar int vertex_indices\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        mesh.vertex_count(),
        mesh.face_count()
    );
    for p in mesh.positions() {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    for (f, tri) in mesh.faces().iter().enumerate() {
        let [r, g, b] = bin_color(&bins, bins.bins[f]);
        let _ = writeln!(s, "3 {} {} {} {r} {g} {b}", tri[0], tri[1], tri[2]);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay<'a> {
    pub layout: &'a WireLayout,
    pub color: &'a str,
}

/// Pattern-space SVG: faces colored by log density, optional wire strips
/// drawn as filled outlines plus their centre lines.
pub fn heatmap_svg(mesh: &GarmentMesh, field: Option<&StrainField>, overlays: &[Overlay]) -> String {
    let b = crate::polygon::Aabb::from_points(mesh.pattern());
    let w = (b.max.x - b.min.x).max(1e-9);
    let h = (b.max.y - b.min.y).max(1e-9);
    let pad = 0.02 * w.max(h);
    let scale = 1000.0 / (w + 2.0 * pad);
    let tx = |x: f64| (x - b.min.x + pad) * scale;
    let ty = |y: f64| (b.max.y - y + pad) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        (w + 2.0 * pad) * scale,
        (h + 2.0 * pad) * scale,
        (w + 2.0 * pad) * scale,
        (h + 2.0 * pad) * scale
    );
    let bins = field.map(|f| log_bins(&f.per_face, 16));
    let _ = writeln!(s, r#"<g stroke-width="0.2">"#);
    for f in 0..mesh.face_count() {
        let [a, bb, c] = mesh.face_pattern(f);
        let [r, g, bl] = match &bins {
            Some(bins) => bin_color(bins, bins.bins[f]),
            None => [220, 220, 220],
        };
        let _ = writeln!(
            s,
            r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="rgb({r},{g},{bl})" stroke="rgb({r},{g},{bl})"/>"#,
            tx(a.x), ty(a.y), tx(bb.x), ty(bb.y), tx(c.x), ty(c.y)
        );
    }
    let _ = writeln!(s, "</g>");
    for o in overlays {
        let wd = o.layout.strip_width;
        let _ = writeln!(s, r#"<g fill="{0}" fill-opacity="0.35" stroke="none">"#, o.color);
        for br in &o.layout.branches {
            for poly in curve_strips(&br.spline, wd) {
                let pts: Vec<String> = poly
                    .points
                    .iter()
                    .map(|p| format!("{:.3},{:.3}", tx(p.x), ty(p.y)))
                    .collect();
                let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
            }
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<g fill="none" stroke="{}" stroke-width="1.5">"#, o.color);
        for br in &o.layout.branches {
            let pts: Vec<String> = br
                .spline
                .sample(wd / 4.0)
                .iter()
                .map(|p| format!("{:.3},{:.3}", tx(p.x), ty(p.y)))
                .collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::flat_sheet;

    #[test]
    fn strain_roundtrip() {
        let f = StrainField::from_values(vec![0.0, 1.5, 3e5]);
        let bytes = encode_strain(&f);
        assert_eq!(&bytes[..4], b"WLSF");
        assert_eq!(decode_strain(&bytes, Path::new("x")).unwrap().per_face, f.per_face);
    }

    #[test]
    fn bins_are_monotone() {
        let b = log_bins(&[0.0, 1.0, 10.0, 100.0, 1e4], 5);
        assert_eq!(b.bins[0], 0);
        assert!(b.bins.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*b.bins.last().unwrap(), 4);
        assert_eq!(log_bins(&[0.0; 3], 8).bins, vec![0, 0, 0]);
    }

    #[test]
    fn svg_and_ply_mention_every_face() {
        let m = flat_sheet(0.1, 0.1, 2, 2).unwrap();
        let f = StrainField::from_values((0..8).map(f64::from).collect());
        assert_eq!(heatmap_svg(&m, Some(&f), &[]).matches("<polygon").count(), 8);
        assert!(ply_string(&m, &f).contains("element face 8"));
    }
}

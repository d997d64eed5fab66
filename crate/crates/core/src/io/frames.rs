use std::path::Path;

use nalgebra::Point3;

use super::obj::{frame_obj_string, read_obj_positions};
use crate::error::{Error, Result};
use crate::motion::{Frame, MotionSequence};

const FRAMES_MAGIC: &[u8; 4] = b"WLFR";

/// Packed frames: magic, `u32` vertex count, `u32` frame count, then
/// `frames × vertices × 3` little-endian `f64`. Full precision keeps a
/// rest-pose frame exactly at rest.
pub fn encode_frames(frames: &[Frame]) -> Result<Vec<u8>> {
    let n = frames.first().map_or(0, Vec::len);
    if frames.iter().any(|f| f.len() != n) {
        return Err(Error::MotionMismatch("frames differ in vertex count".into()));
    }
    let mut out = Vec::with_capacity(12 + frames.len() * n * 24);
    out.extend_from_slice(FRAMES_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(frames.len() as u32).to_le_bytes());
    for f in frames {
        for p in f {
            for c in [p.x, p.y, p.z] {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn decode_frames(bytes: &[u8], path: &Path) -> Result<Vec<Frame>> {
    if bytes.len() < 12 || &bytes[..4] != FRAMES_MAGIC {
        return Err(Error::parse(path, 0, "missing WLFR header"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let k = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = n
        .checked_mul(k)
        .and_then(|x| x.checked_mul(24))
        .and_then(|x| x.checked_add(12))
        .ok_or_else(|| Error::parse(path, 0, "header counts overflow"))?;
    if bytes.len() != expected {
        return Err(Error::parse(
            path,
            0,
            format!("expected {expected} bytes for {k} frames of {n} vertices, found {}", bytes.len()),
        ));
    }
    let body = &bytes[12..];
    let f = |i: usize| f64::from_le_bytes(body[8 * i..8 * i + 8].try_into().unwrap());
    Ok((0..k)
        .map(|j| {
            (0..n)
                .map(|v| {
                    let b = 3 * (j * n + v);
                    Point3::new(f(b), f(b + 1), f(b + 2))
                })
                .collect()
        })
        .collect())
}

/// Reads one motion sequence from a `.frames` file or from a directory of
/// `frame_NNNNN.obj` files (sorted by name). Positions follow the source
/// OBJ's `v` order.
pub fn read_sequence(path: &Path) -> Result<MotionSequence> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "motion".into());
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension().is_some_and(|x| x == "obj")
                    && p.file_name()
                        .is_some_and(|n| n.to_string_lossy().starts_with("frame_"))
            })
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::MotionMismatch(format!(
                "{} holds no frame_*.obj files",
                path.display()
            )));
        }
        let frames = files
            .iter()
            .map(|p| read_obj_positions(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(MotionSequence::new(name, frames))
    } else {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(MotionSequence::new(name, decode_frames(&bytes, path)?))
    }
}

/// Writes frames as a directory of `frame_NNNNN.obj` files.
pub fn write_frame_dir(dir: &Path, frames: &[Frame]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (j, f) in frames.iter().enumerate() {
        let p = dir.join(format!("frame_{j:05}.obj"));
        std::fs::write(&p, frame_obj_string(f)).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

pub fn write_frames(path: &Path, frames: &[Frame]) -> Result<()> {
    super::write_bytes(path, &encode_frames(frames)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_roundtrip() {
        let frames = vec![
            vec![Point3::new(0.0, 1.0, 2.0), Point3::new(0.5, -1.0, 3.25)],
            vec![Point3::new(1.0, 1.0, 2.0), Point3::new(0.5, -2.0, 3.25)],
        ];
        let bytes = encode_frames(&frames).unwrap();
        assert_eq!(&bytes[..4], b"WLFR");
        assert_eq!(bytes.len(), 12 + 2 * 2 * 24);
        assert_eq!(decode_frames(&bytes, Path::new("x")).unwrap(), frames);
        assert!(decode_frames(&bytes[..20], Path::new("x")).is_err());
    }

    #[test]
    fn directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let frames = vec![vec![Point3::new(0.0, 1.0, 2.0)]; 3];
        write_frame_dir(&dir.path().join("walk"), &frames).unwrap();
        let s = read_sequence(&dir.path().join("walk")).unwrap();
        assert_eq!(s.name, "walk");
        assert_eq!(s.frames, frames);
        assert!(read_sequence(&dir.path().join("missing")).is_err());
    }
}

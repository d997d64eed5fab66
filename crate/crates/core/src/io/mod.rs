//! File formats: garment OBJ, motion frames, strain sidecars, heatmaps and
//! graph interchange.

mod frames;
mod graph_file;
mod heatmap;
mod obj;

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

pub use frames::{decode_frames, encode_frames, read_sequence, write_frame_dir, write_frames};
pub use graph_file::{
    graph_json, parse_stp, read_graph, stp_string, GraphEdgeRecord, GraphFile,
};
pub use heatmap::{
    decode_strain, encode_strain, heatmap_svg, log_bins, ply_string, ramp, read_strain,
    write_strain, LogBins, Overlay,
};
pub use obj::{
    frame_obj_string, obj_string, parse_obj, read_obj, read_obj_positions, write_obj, LoadOptions,
};

use crate::error::{Error, Result};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

/// Writes a file, creating missing parent directories.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

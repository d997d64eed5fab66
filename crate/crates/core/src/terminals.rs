use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{GarmentMesh, BARY_TOL};

/// A terminal is either an existing mesh vertex or a point inside a face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Terminal {
    Vertex { vertex: usize },
    InFace { face: usize, bary: [f64; 3] },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TerminalSet {
    pub terminals: Vec<Terminal>,
}

impl TerminalSet {
    pub fn from_vertices(vertices: impl IntoIterator<Item = usize>) -> Self {
        TerminalSet {
            terminals: vertices
                .into_iter()
                .map(|vertex| Terminal::Vertex { vertex })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminals.is_empty()
    }

    /// Inserts in-face terminals into the mesh and returns the mesh together
    /// with one vertex index per terminal, in input order.
    ///
    /// Face indices always refer to `mesh` as given; later insertions are
    /// located by their pattern point, so several terminals may share a face.
    pub fn resolve(&self, mesh: &GarmentMesh) -> Result<(GarmentMesh, Vec<usize>)> {
        if self.terminals.len() < 2 {
            return Err(Error::InvalidTerminals(format!(
                "need at least 2 terminals, got {}",
                self.terminals.len()
            )));
        }
        let mut current = mesh.clone();
        let mut out = Vec::with_capacity(self.terminals.len());
        for t in &self.terminals {
            let v = match *t {
                Terminal::Vertex { vertex } => {
                    if vertex >= mesh.vertex_count() {
                        return Err(Error::OutOfRange {
                            what: "vertex",
                            index: vertex,
                            len: mesh.vertex_count(),
                        });
                    }
                    vertex
                }
                Terminal::InFace { face, bary } => {
                    if face >= mesh.face_count() {
                        return Err(Error::OutOfRange {
                            what: "face",
                            index: face,
                            len: mesh.face_count(),
                        });
                    }
                    let sum: f64 = bary.iter().sum();
                    if bary.iter().any(|w| *w < -BARY_TOL) || (sum - 1.0).abs() > BARY_TOL {
                        return Err(Error::InvalidBarycentric(bary));
                    }
                    let corners = mesh.face_pattern(face);
                    let mut p = nalgebra::Point2::origin().coords;
                    for k in 0..3 {
                        p += corners[k].coords * bary[k];
                    }
                    let piece = mesh.face_piece(face);
                    let (f, w) = current
                        .locate(p.into(), Some(piece), 1e-9)
                        .ok_or(Error::InvalidBarycentric(bary))?;
                    let (next, v) = current.insert_terminal(f, w)?;
                    current = next;
                    v
                }
            };
            out.push(v);
        }
        let mut sorted = out.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidTerminals(format!(
                "duplicate terminal at vertex {}",
                w[0]
            )));
        }
        Ok((current, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::flat_sheet;

    #[test]
    fn needs_two_distinct() {
        let mesh = flat_sheet(1.0, 1.0, 2, 2).unwrap();
        assert!(TerminalSet::from_vertices([0]).resolve(&mesh).is_err());
        assert!(TerminalSet::from_vertices([3, 3]).resolve(&mesh).is_err());
        let t = TerminalSet {
            terminals: vec![
                Terminal::Vertex { vertex: 0 },
                Terminal::InFace {
                    face: 0,
                    bary: [1.0, 0.0, 0.0],
                },
            ],
        };
        // the in-face terminal snaps onto a corner, which may collide
        let corner = mesh.faces()[0][0];
        let r = t.resolve(&mesh);
        if corner == 0 {
            assert!(r.is_err());
        } else {
            assert_eq!(r.unwrap().1, vec![0, corner]);
        }
    }

    #[test]
    fn two_terminals_in_one_face() {
        let mesh = flat_sheet(1.0, 1.0, 2, 2).unwrap();
        let t = TerminalSet {
            terminals: vec![
                Terminal::InFace {
                    face: 0,
                    bary: [0.6, 0.2, 0.2],
                },
                Terminal::InFace {
                    face: 0,
                    bary: [0.2, 0.2, 0.6],
                },
            ],
        };
        let (m2, vs) = t.resolve(&mesh).unwrap();
        assert_eq!(vs.len(), 2);
        assert_ne!(vs[0], vs[1]);
        assert_eq!(m2.vertex_count(), mesh.vertex_count() + 2);
        let total: f64 = (0..m2.face_count()).map(|f| m2.face_rest_area(f)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_shapes() {
        let t: TerminalSet = serde_json::from_str(
            r#"{"terminals":[{"vertex":4},{"face":2,"bary":[0.2,0.3,0.5]}]}"#,
        )
        .unwrap();
        assert_eq!(t.terminals[0], Terminal::Vertex { vertex: 4 });
        assert!(matches!(t.terminals[1], Terminal::InFace { face: 2, .. }));
    }
}

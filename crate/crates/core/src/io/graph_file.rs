use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphParams, WeightedWireGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdgeRecord {
    pub u: usize,
    pub v: usize,
    pub len: f64,
    pub w: f64,
}

/// Interchange form of a wiring graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: usize,
    pub edges: Vec<GraphEdgeRecord>,
    pub terminals: Vec<usize>,
    pub params: GraphParams,
}

impl From<&WeightedWireGraph> for GraphFile {
    fn from(g: &WeightedWireGraph) -> Self {
        GraphFile {
            nodes: g.node_count,
            edges: g
                .edges
                .iter()
                .map(|e| GraphEdgeRecord {
                    u: e.u,
                    v: e.v,
                    len: e.length,
                    w: e.weight,
                })
                .collect(),
            terminals: g.terminals.clone(),
            params: g.params,
        }
    }
}

impl GraphFile {
    pub fn into_graph(self) -> Result<WeightedWireGraph> {
        let mut g = WeightedWireGraph::from_edges(
            self.nodes,
            self.edges.into_iter().map(|e| (e.u, e.v, e.w, e.len)),
            self.terminals,
        )?;
        g.params = self.params;
        Ok(g)
    }
}

pub fn graph_json(g: &WeightedWireGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from(g)).expect("graph serializes")
}

/// SteinLib text. Weights are multiplied by `scale` and rounded to integers
/// of at least 1, so the export is lossy.
pub fn stp_string(g: &WeightedWireGraph, scale: f64, name: &str) -> String {
    let mut s = String::from("33D32945 STP File, STP Format Version 1.0\n\n");
    let _ = writeln!(s, "SECTION Comment\nName \"{name}\"\nRemark \"weights scaled by {scale}\"\nEND\n");
    let _ = writeln!(s, "SECTION Graph\nNodes {}\nEdges {}", g.node_count, g.edges.len());
    for e in &g.edges {
        let w = (e.weight * scale).round().max(1.0) as u64;
        let _ = writeln!(s, "E {} {} {w}", e.u + 1, e.v + 1);
    }
    let _ = writeln!(s, "END\n\nSECTION Terminals\nTerminals {}", g.terminals.len());
    for t in &g.terminals {
        let _ = writeln!(s, "T {}", t + 1);
    }
    s.push_str("END\n\nEOF\n");
    s
}

/// Reads a SteinLib graph. Weights are divided by `scale`; edge lengths are
/// set equal to the weights since the format has none.
pub fn parse_stp(text: &str, path: &Path, scale: f64) -> Result<WeightedWireGraph> {
    let mut nodes = None;
    let mut edges = Vec::new();
    let mut terminals = Vec::new();
    let mut section = String::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        let num = |i: usize| -> Result<f64> {
            toks.get(i)
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| Error::parse(path, ln, format!("expected a number in '{line}'")))
        };
        match (head.to_ascii_uppercase().as_str(), section.as_str()) {
            ("SECTION", _) => section = toks.get(1).unwrap_or(&"").to_ascii_lowercase(),
            ("END", _) => section.clear(),
            ("NODES", "graph") => nodes = Some(num(1)? as usize),
            ("E" | "A", "graph") => {
                let (u, v, w) = (num(1)? as usize, num(2)? as usize, num(3)?);
                if u == 0 || v == 0 {
                    return Err(Error::parse(path, ln, "node ids start at 1"));
                }
                edges.push((u - 1, v - 1, w / scale, w / scale));
            }
            ("T", "terminals") => {
                let t = num(1)? as usize;
                if t == 0 {
                    return Err(Error::parse(path, ln, "node ids start at 1"));
                }
                terminals.push(t - 1);
            }
            _ => {}
        }
    }
    let nodes = nodes.ok_or_else(|| Error::parse(path, 0, "missing Nodes line"))?;
    WeightedWireGraph::from_edges(nodes, edges, terminals)
}

pub fn read_graph(path: &Path, stp_scale: f64) -> Result<WeightedWireGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|x| x == "stp") {
        parse_stp(&text, path, stp_scale)
    } else {
        serde_json::from_str::<GraphFile>(&text)?.into_graph()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedWireGraph {
        WeightedWireGraph::from_edges(
            3,
            vec![(0, 1, 1.25, 1.0), (1, 2, 2.5, 1.0), (0, 2, 0.004, 1.0)],
            vec![0, 2],
        )
        .unwrap()
    }

    #[test]
    fn json_roundtrip() {
        let g = triangle();
        let back: GraphFile = serde_json::from_str(&graph_json(&g)).unwrap();
        assert_eq!(back.into_graph().unwrap().edges, g.edges);
    }

    #[test]
    fn stp_roundtrip_is_integerized() {
        let g = triangle();
        let text = stp_string(&g, 100.0, "tri");
        assert!(text.contains("E 1 2 125"));
        assert!(text.contains("E 1 3 1\n"));
        let back = parse_stp(&text, Path::new("t.stp"), 100.0).unwrap();
        assert_eq!(back.node_count, 3);
        assert_eq!(back.terminals, vec![0, 2]);
        assert_eq!(back.edges[1].weight, 2.5);
        assert_eq!(back.edges[2].weight, 0.01);
    }
}

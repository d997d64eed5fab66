#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wirelay::graph::WeightedWireGraph;
use wirelay::pipeline::{Analysis, Scene};
use wirelay::strain::{EnergyVariant, MaterialParams};
use wirelay::synth::{sleeve_bend, SleeveParams};

pub const WD: f64 = 0.015;

/// Vertex `(i, j)` of the default 32×32 sleeve grid: column `i` around,
/// row `j` along the axis.
pub fn sleeve_vertex(i: usize, j: usize) -> usize {
    j * 33 + i
}

/// Two terminals on the crease line, one on each side of the elbow.
pub fn elbow_two() -> Vec<usize> {
    vec![sleeve_vertex(16, 4), sleeve_vertex(16, 28)]
}

/// The two crease terminals plus one on each flank.
pub fn elbow_four() -> Vec<usize> {
    vec![
        sleeve_vertex(16, 4),
        sleeve_vertex(16, 28),
        sleeve_vertex(8, 4),
        sleeve_vertex(24, 28),
    ]
}

pub fn sleeve_analysis(theta_max_deg: f64) -> Analysis {
    let scene = sleeve_bend(&SleeveParams {
        theta_max_deg,
        ..Default::default()
    })
    .unwrap();
    Analysis::compute(
        Scene {
            mesh: scene.mesh,
            motions: scene.motions,
            glue: None,
        },
        &MaterialParams::default(),
        EnergyVariant::default(),
        WD,
    )
    .unwrap()
}

/// Connected random graph: a random spanning tree plus extra edges, integer
/// weights so that sums are exact.
pub fn random_graph(rng: &mut ChaCha8Rng) -> WeightedWireGraph {
    let n = rng.random_range(4..=12);
    let max_edges = (n * (n - 1) / 2).min(20);
    let m = rng.random_range(n - 1..=max_edges);
    let mut present = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let mut push = |u: usize, v: usize, rng: &mut ChaCha8Rng| {
        let key = (u.min(v), u.max(v));
        if u != v && present.insert(key) {
            let w = rng.random_range(1..=20) as f64;
            edges.push((key.0, key.1, w, w));
        }
        present.len()
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        push(u, v, rng);
    }
    let mut count = n - 1;
    while count < m {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        count = push(u, v, rng);
    }
    let k = rng.random_range(3..=6.min(n));
    let mut nodes: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        nodes.swap(i, j);
    }
    WeightedWireGraph::from_edges(n, edges, nodes[..k].to_vec()).unwrap()
}

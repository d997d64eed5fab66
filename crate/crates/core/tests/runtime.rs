//! Solve time on a garment-sized mesh with ten terminals.

use std::time::Instant;

use wirelay::config::EtaSpec;
use wirelay::pipeline::{resolve_eta, solve_at, Analysis, Scene, Settings};
use wirelay::strain::{EnergyVariant, MaterialParams};
use wirelay::synth::{sleeve_bend, SleeveParams};

#[test]
fn ten_terminals_on_a_large_mesh_within_a_minute() {
    let p = SleeveParams {
        around: 166,
        along: 140,
        frames: 4,
        ..Default::default()
    };
    let cols = p.around + 1;
    let scene = sleeve_bend(&p).unwrap();
    assert_eq!(scene.mesh.vertex_count(), 167 * 141);
    let a = Analysis::compute(
        Scene { mesh: scene.mesh, motions: scene.motions, glue: None },
        &MaterialParams::default(),
        EnergyVariant::default(),
        0.015,
    )
    .unwrap();
    let terminals: Vec<usize> = (0..10)
        .map(|k| {
            let i = 8 + 15 * k;
            let j = if k % 2 == 0 { 15 } else { 125 };
            j * cols + i
        })
        .collect();
    let s = Settings::default();
    let spec = EtaSpec::NegLog10 { neg_log10: 1.0 };
    let eta = resolve_eta(&a, &terminals, &spec, &s).unwrap();
    let t = Instant::now();
    let out = solve_at(&a, &terminals, false, eta, &s).unwrap();
    let secs = t.elapsed().as_secs_f64();
    println!(
        "{} vertices, 10 terminals: total {secs:.2} s (graph {:.2} s, tree {:.2} s, {:?})",
        a.mesh.vertex_count(),
        out.timings.graph.as_secs_f64(),
        out.timings.solve.as_secs_f64(),
        out.tree.solver,
    );
    out.tree.validate(&a.graph(&terminals, false, eta).unwrap()).unwrap();
    assert!(secs < 60.0, "took {secs:.1} s");
}

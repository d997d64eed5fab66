//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is printed even when
//! `cargo test` captures output. Exits non-zero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{Matrix2, Matrix3, Point2, Point3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use wirelay::config::{EtaPreset, EtaSpec, SweepGrid};
use wirelay::graph::WeightedWireGraph;
use wirelay::layout::{ArcSpline, SmoothOptions, WireLayout};
use wirelay::mesh::GarmentMesh;
use wirelay::pipeline::{
    cross_eval, resolve_eta, scaling_study, solve, solve_at, sweep, Analysis, Scene, Settings,
    SolveOutcome,
};
use wirelay::polygon::{clip_triangle_rect, Polygon2D};
use wirelay::steiner::{solve_approx, solve_exact, solve_oracle, SolvePolicy};
use wirelay::strain::{
    deformation_gradient, face_density, green_strain, EnergyVariant, MaterialParams,
};
use wirelay::synth::{flat_sheet, torso_twist, TwistParams};
use wirelay::terminals::TerminalSet;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Layouts produced along the way, checked together for the curvature bound.
#[derive(Default)]
struct Ctx {
    sleeve: Option<Analysis>,
    layouts: Vec<(String, WireLayout, f64)>,
}

impl Ctx {
    fn sleeve(&mut self) -> &Analysis {
        self.sleeve.get_or_insert_with(|| sleeve_analysis(90.0))
    }

    fn keep(&mut self, label: &str, o: &SolveOutcome) {
        self.layouts
            .push((label.to_string(), o.layout.clone(), o.metrics.smoothing_drift()));
    }
}

fn strain_correctness(_: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let m = MaterialParams::default();
    let rest = [Point2::new(0.0, 0.0), Point2::new(0.3, 0.05), Point2::new(0.1, 0.2)];
    let flat = rest.map(|p| Point3::new(p.x, p.y, 0.0));
    for variant in [EnergyVariant::Linear, EnergyVariant::Quadratic] {
        let d = face_density(&rest, &flat, &m, variant).map_err(|e| e.to_string())?;
        ensure(d.abs() < 1e-9, || format!("identity density {d}"))?;
    }

    let stretched = rest.map(|p| Point3::new(1.1 * p.x, p.y, 0.0));
    let g = green_strain(&deformation_gradient(&rest, &stretched).map_err(|e| e.to_string())?);
    let expected_g = Matrix2::new(0.105, 0.0, 0.0, 0.0);
    ensure((g - expected_g).norm() < 1e-12, || format!("G = {g}"))?;
    let density = face_density(&rest, &stretched, &m, EnergyVariant::Linear).unwrap();
    // μ·0.105 + (λ/2)·0.105 with the Lamé values from E = 5.4 MPa, ν = 0.33.
    let expected = 420_046.439_6;
    ensure(rel(density, expected) < 1e-6, || {
        format!("uniaxial density {density}, expected {expected}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let deformed = [
        Point3::new(0.01, -0.02, 0.03),
        Point3::new(0.33, 0.07, 0.02),
        Point3::new(0.09, 0.24, -0.04),
    ];
    let base = face_density(&rest, &deformed, &m, EnergyVariant::Linear).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let axis = Unit::new_normalize(Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ));
        let r: Matrix3<f64> = Rotation3::from_axis_angle(&axis, rng.random_range(0.0..6.3)).into();
        let shift = Vector3::new(rng.random_range(-1.0..1.0), 0.5, -2.0);
        let moved = deformed.map(|p| Point3::from(r * p.coords + shift));
        let d = face_density(&rest, &moved, &m, EnergyVariant::Linear).unwrap();
        worst = worst.max(rel(d, base));
    }
    ensure(worst < 1e-9, || format!("rigid motion changed density by {worst:e}"))?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3} s"))?;
    Ok(format!(
        "identity 0, uniaxial {density:.4} Pa, worst rigid-motion deviation {worst:.1e}, {secs:.3} s"
    ))
}

fn lame(_: &mut Ctx) -> Outcome {
    let m = MaterialParams::default();
    let (e, nu) = (5.4e6, 0.33);
    let mu = e / (2.0 * (1.0 + nu));
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    ensure(rel(m.mu(), mu) < 1e-9 && rel(m.lambda(), lambda) < 1e-9, || {
        format!("μ {} vs {mu}, λ {} vs {lambda}", m.mu(), m.lambda())
    })?;
    ensure(rel(m.mu(), 2.030075e6) < 1e-6, || format!("μ = {}", m.mu()))?;
    Ok(format!("μ = {:.6e} Pa, λ = {:.6e} Pa", m.mu(), m.lambda()))
}

/// Stratified Monte Carlo estimate of the triangle ∩ rectangle area.
fn monte_carlo_area(tri: &Polygon2D, rect: &Polygon2D, rng: &mut ChaCha8Rng) -> f64 {
    let b = tri.bounds();
    let side = 1000;
    let (dx, dy) = ((b.max.x - b.min.x) / side as f64, (b.max.y - b.min.y) / side as f64);
    let mut hits = 0usize;
    for i in 0..side {
        for j in 0..side {
            let p = Point2::new(
                b.min.x + (i as f64 + rng.random::<f64>()) * dx,
                b.min.y + (j as f64 + rng.random::<f64>()) * dy,
            );
            if tri.contains_convex(p, 0.0) && rect.contains_convex(p, 0.0) {
                hits += 1;
            }
        }
    }
    hits as f64 * dx * dy
}

fn clipping(_: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut overlapping = 0;
    for _ in 0..100 {
        let mut pt = || Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let tri = Polygon2D::triangle(pt(), pt(), pt()).to_ccw();
        let (a, b) = (pt(), pt());
        let rect = wirelay::polygon::strip_rect(a, b, rng.random_range(0.05..0.6));
        let exact = clip_triangle_rect(&tri, &rect);
        let mc = monte_carlo_area(&tri, &rect, &mut rng);
        if exact > 0.0 {
            overlapping += 1;
        }
        worst = worst.max((exact - mc).abs());
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(worst < 1e-3, || format!("largest deviation {worst:e}"))?;
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "100 pairs ({overlapping} overlapping), 1e6 samples each, max |Δ| = {worst:.2e}, {secs:.1} s"
    ))
}

fn solver_optimality(_: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ratios = Vec::new();
    for i in 0..500 {
        let g = random_graph(&mut rng);
        let exact = solve_exact(&g, 16, 1 << 30).map_err(|e| format!("graph {i}: {e}"))?;
        let oracle = solve_oracle(&g).map_err(|e| format!("graph {i}: {e}"))?;
        let approx = solve_approx(&g).map_err(|e| format!("graph {i}: {e}"))?;
        for tree in [&exact, &oracle, &approx] {
            tree.validate(&g).map_err(|e| format!("graph {i}: {e}"))?;
        }
        ensure(exact.total_weight == oracle.total_weight, || {
            format!("graph {i}: exact {} vs oracle {}", exact.total_weight, oracle.total_weight)
        })?;
        let r = approx.total_weight / exact.total_weight;
        ensure(r <= 2.0 + 1e-12, || format!("graph {i}: approximation ratio {r}"))?;
        ratios.push(r);
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1} s"))?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "500 graphs exact = oracle; approximation ratio mean {mean:.4}, max {max:.4}; {secs:.2} s"
    ))
}

fn branching(_: &mut Ctx) -> Outcome {
    // Corners 0, 1, 2 with sides of 1.8 and a centre 3 one unit from each.
    let g = WeightedWireGraph::from_edges(
        4,
        vec![
            (0, 1, 1.8, 1.8),
            (1, 2, 1.8, 1.8),
            (0, 2, 1.8, 1.8),
            (0, 3, 1.0, 1.0),
            (1, 3, 1.0, 1.0),
            (2, 3, 1.0, 1.0),
        ],
        vec![0, 1, 2],
    )
    .unwrap();
    let tree = solve_exact(&g, 16, 1 << 20).map_err(|e| e.to_string())?;
    let oracle = solve_oracle(&g).map_err(|e| e.to_string())?;
    ensure((tree.total_weight - 3.0).abs() < 1e-12, || {
        format!("tree weight {}", tree.total_weight)
    })?;
    ensure(tree.edges == vec![3, 4, 5], || format!("edges {:?}", tree.edges))?;
    ensure(oracle.total_weight == tree.total_weight, || "oracle disagrees".into())?;
    Ok("three spokes, weight 3.0 against 3.6 for two sides".into())
}

fn baseline_equivalence(_: &mut Ctx) -> Outcome {
    let mesh = flat_sheet(0.3, 0.2, 3, 2).map_err(|e| e.to_string())?;
    let mut meshes = vec![("flat 3×2".to_string(), mesh)];
    // A sheared copy so that edge lengths differ.
    let m = &meshes[0].1;
    let sheared: Vec<Point2<f64>> = m.pattern().iter().map(|p| Point2::new(p.x + 0.4 * p.y, p.y)).collect();
    let pos = sheared.iter().map(|p| Point3::new(p.x, p.y, 0.0)).collect();
    meshes.push((
        "sheared 3×2".into(),
        GarmentMesh::new(pos, m.faces().to_vec(), sheared).map_err(|e| e.to_string())?,
    ));
    let sets: [&[usize]; 4] = [&[0, 11], &[0, 3, 8], &[0, 3, 8, 11], &[1, 4, 6, 10]];
    let mut checked = 0;
    for (name, mesh) in meshes {
        let motions = wirelay::motion::MotionSet::rest(&mesh, 1);
        let a = Analysis::compute(
            Scene { mesh, motions, glue: None },
            &MaterialParams::default(),
            EnergyVariant::default(),
            WD,
        )
        .map_err(|e| e.to_string())?;
        for set in sets {
            let out = solve_at(&a, set, true, 0.0, &Settings::default()).map_err(|e| e.to_string())?;
            let g = a.graph(set, true, 0.0).unwrap();
            let oracle = solve_oracle(&g).map_err(|e| e.to_string())?;
            ensure(out.tree.total_weight == oracle.total_weight, || {
                format!("{name} {set:?}: {} vs {} edges", out.tree.total_weight, oracle.total_weight)
            })?;
            ensure((out.tree.total_length - oracle.total_length).abs() < 1e-12, || {
                format!("{name} {set:?}: length {} vs {}", out.tree.total_length, oracle.total_length)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} mesh/terminal cases match the oracle's fewest-edge, shortest tree"))
}

fn elbow_ordering(ctx: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let s = Settings::default();
    let mut report = Vec::new();
    for (label, set) in [("2 terminals", elbow_two()), ("4 terminals", elbow_four())] {
        let a = ctx.sleeve();
        let w = solve(a, &set, false, &s).map_err(|e| e.to_string())?;
        let b = solve(a, &set, true, &s).map_err(|e| e.to_string())?;
        let (we, be) = (w.metrics.deformation_energy, b.metrics.deformation_energy);
        let (wm, bm) = (w.metrics.max_elongation_rate, b.metrics.max_elongation_rate);
        ensure(we < be, || format!("{label}: energy {we} vs baseline {be}"))?;
        ensure(wm < bm, || format!("{label}: max elongation {wm}% vs baseline {bm}%"))?;
        report.push(format!(
            "{label}: energy {we:.2} vs {be:.2} (−{:.1}%), max elongation {wm:.2}% vs {bm:.2}%",
            100.0 * (1.0 - we / be)
        ));
        ctx.keep(&format!("elbow {label}"), &w);
        ctx.keep(&format!("elbow {label} baseline"), &b);
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{}; {secs:.2} s", report.join("; ")))
}

fn eta_sweep(ctx: &mut Ctx) -> Outcome {
    let s = Settings::default();
    let set = elbow_four();
    let mut pts = sweep(ctx.sleeve(), &set, &s, true).map_err(|e| e.to_string())?;
    ensure(pts.len() == 8, || format!("{} sweep points", pts.len()))?;
    pts.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let metric = |p: &wirelay::pipeline::SweepPoint| {
        let m = p.layout.as_ref().unwrap();
        (m.total_length, m.deformation_energy)
    };
    for w in pts.windows(2) {
        let ((l0, e0), (l1, e1)) = (metric(&w[0]), metric(&w[1]));
        ensure(l1 <= l0 * 1.02, || format!("length rose {l0} → {l1} at η {:e}", w[1].eta))?;
        ensure(e1 >= e0 * 0.98, || format!("energy fell {e0} → {e1} at η {:e}", w[1].eta))?;
    }
    let (lo, hi) = (metric(&pts[0]), metric(&pts[7]));
    Ok(format!(
        "η {:.0e} → {:.0e} Pa: length {:.3} → {:.3} m, energy {:.2} → {:.2}",
        pts[0].eta, pts[7].eta, lo.0, hi.0, lo.1, hi.1
    ))
}

fn scaling(ctx: &mut Ctx) -> Outcome {
    let twist = torso_twist(&TwistParams::default()).map_err(|e| e.to_string())?;
    let cols = TwistParams::default().around + 1;
    let a = Analysis::compute(
        Scene { mesh: twist.mesh, motions: twist.motions, glue: None },
        &MaterialParams::default(),
        EnergyVariant::default(),
        WD,
    )
    .map_err(|e| e.to_string())?;
    let set = vec![4 * cols + 12, 4 * cols + 36, 20 * cols + 24, 12 * cols + 20];
    let s = Settings::default();
    let eta = resolve_eta(&a, &set, &s.eta, &s).map_err(|e| e.to_string())?;
    let rows = scaling_study(&a, &set, eta, 3, &SolvePolicy::default()).map_err(|e| e.to_string())?;
    ensure(rows.len() == 3, || "three levels expected".into())?;
    for r in &rows {
        ensure(r.weight_change.abs() < 0.1, || {
            format!("level {}: weight change {:.4}%", r.level, r.weight_change)
        })?;
    }
    ensure(rows[2].solve_seconds > rows[0].solve_seconds, || {
        format!("solve time did not grow: {:?}", rows.iter().map(|r| r.solve_seconds).collect::<Vec<_>>())
    })?;
    let _ = ctx;
    Ok(rows
        .iter()
        .map(|r| {
            format!(
                "L{} {} verts {:.4} s Δw {:+.2e}%",
                r.level, r.vertices, r.solve_seconds, r.weight_change
            )
        })
        .collect::<Vec<_>>()
        .join("; "))
}

fn cross_evaluation(ctx: &mut Ctx) -> Outcome {
    let s = Settings::default();
    let fields = vec![
        ("bend 80°".to_string(), sleeve_analysis(80.0), s),
        ("bend 100°".to_string(), sleeve_analysis(100.0), s),
    ];
    let set = TerminalSet::from_vertices(elbow_four());
    let cx = cross_eval(&fields, &set).map_err(|e| e.to_string())?;
    for (i, row) in cx.weight_ratio.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            ensure(r >= 1.0 - 1e-12, || format!("ratio[{i}][{j}] = {r}"))?;
        }
        ensure((row[i] - 1.0).abs() < 1e-12, || format!("diagonal {i} = {}", row[i]))?;
    }
    let _ = ctx;
    Ok(format!(
        "weight ratios {:?}, energy ratios {:?}",
        cx.weight_ratio
            .iter()
            .map(|r| r.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        cx.energy_ratio
            .iter()
            .map(|r| r.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    ))
}

/// Curvature from three consecutive samples (inverse circumradius).
fn menger(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> f64 {
    let (ab, bc, ca) = ((b - a).norm(), (c - b).norm(), (a - c).norm());
    let cross = (b - a).perp(&(c - a)).abs();
    if ab * bc * ca == 0.0 {
        0.0
    } else {
        2.0 * cross / (ab * bc * ca)
    }
}

fn curvature(ctx: &mut Ctx) -> Outcome {
    // More layouts: every η of the sweep and a tighter strip.
    let set = elbow_four();
    let grid = SweepGrid::default();
    for x in grid.values() {
        let s = Settings {
            eta: EtaSpec::NegLog10 { neg_log10: x },
            ..Settings::default()
        };
        let o = solve(ctx.sleeve(), &set, false, &s).map_err(|e| e.to_string())?;
        ctx.keep(&format!("sweep x={x}"), &o);
    }
    let s = Settings {
        eta: EtaSpec::Preset(EtaPreset::Converged),
        smoothing: SmoothOptions::default(),
        ..Settings::default()
    };
    let o = solve(ctx.sleeve(), &elbow_two(), false, &s).map_err(|e| e.to_string())?;
    ctx.keep("converged", &o);

    let mut worst_ratio = 0.0f64;
    let mut max_iter = 0;
    let mut drifts = Vec::new();
    for (label, layout, drift) in &ctx.layouts {
        let wd = layout.strip_width;
        let bound = 2.0 / wd;
        for b in &layout.branches {
            let spline: &ArcSpline = &b.spline;
            let samples = spline.sample_with_curvature(wd / 10.0);
            let mut k = spline.max_curvature();
            for w in samples.windows(3) {
                k = k.max(menger(w[0].0, w[1].0, w[2].0));
            }
            ensure(k < bound, || format!("{label}: curvature {k} ≥ {bound}"))?;
            worst_ratio = worst_ratio.max(k / bound);
            max_iter = max_iter.max(b.iterations);
            ensure(b.iterations <= 10, || format!("{label}: {} iterations", b.iterations))?;
        }
        ensure(*drift < 10.0, || format!("{label}: smoothing drift {drift:.2}%"))?;
        drifts.push(*drift);
    }
    let n = drifts.len() as f64;
    let mean = drifts.iter().sum::<f64>() / n;
    let sd = (drifts.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(format!(
        "{} layouts: max κ·wd/2 = {worst_ratio:.3}, ≤ {max_iter} iterations, drift {mean:.2} ± {sd:.2}%",
        ctx.layouts.len()
    ))
}

fn main() {
    let checks: [(&str, fn(&mut Ctx) -> Outcome); 11] = [
        ("strain correctness", strain_correctness),
        ("Lamé parameters", lame),
        ("clipping oracle", clipping),
        ("solver optimality", solver_optimality),
        ("branching superiority", branching),
        ("baseline equivalence", baseline_equivalence),
        ("elbow ordering", elbow_ordering),
        ("regularisation sweep", eta_sweep),
        ("scaling study", scaling),
        ("cross-evaluation matrix", cross_evaluation),
        ("curvature bound", curvature),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut ctx = Ctx::default();
    let mut failed = 0;
    let total = Instant::now();
    for (name, check) in checks {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| check(&mut ctx)))
            .unwrap_or_else(|p| {
                Err(p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into()))
            });
        let secs = Duration::as_secs_f64(&t.elapsed());
        match result {
            Ok(detail) => println!("PASS  {name} [{secs:.2} s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.2} s]: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        11 - failed,
        total.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

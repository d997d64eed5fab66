//! End-to-end runs: load a garment, compute its field and edge integrals
//! once, then solve, smooth and score layouts for any number of terminal
//! sets and η values.

use std::borrow::Cow;
use std::time::{Duration, Instant};

use log::info;
use serde::{Deserialize, Serialize};

use crate::config::{
    eta_from_neg_log10, neg_log10_from_eta, EtaPreset, EtaSpec, ProjectConfig, SweepGrid,
    CONVERGED_NEG_LOG10,
};
use crate::error::{Error, Result};
use crate::graph::{build_graph_from_integrals, BuildOptions, EdgeIntegrals, SeamGlue, WeightedWireGraph};
use crate::io::{read_json, read_obj, read_sequence, LoadOptions};
use crate::layout::{build_layout, evaluate, LayoutMetrics, SmoothOptions, WireLayout};
use crate::mesh::GarmentMesh;
use crate::motion::MotionSet;
use crate::steiner::{solve as solve_tree, SolvePolicy, SteinerTree};
use crate::strain::{compute_strain_field, EnergyVariant, MaterialParams, StrainField};
use crate::synth::generate;
use crate::terminals::TerminalSet;

/// Garment geometry and motion, before any analysis.
#[derive(Debug, Clone)]
pub struct Scene {
    pub mesh: GarmentMesh,
    pub motions: MotionSet,
    pub glue: Option<SeamGlue>,
}

impl Scene {
    pub fn load(cfg: &ProjectConfig) -> Result<Scene> {
        cfg.validate()?;
        if let Some(spec) = &cfg.synthetic {
            let s = generate(spec)?;
            let glue = match &cfg.seam_glue {
                Some(p) => Some(read_json(p)?),
                None => None,
            };
            return Ok(Scene {
                mesh: s.mesh,
                motions: s.motions,
                glue,
            });
        }
        let mesh_path = cfg.mesh.as_ref().expect("validated");
        let mesh = read_obj(
            mesh_path,
            &LoadOptions {
                unit_scale: cfg.unit_scale,
            },
        )?;
        let sequences = cfg
            .frames
            .iter()
            .map(|p| read_sequence(p))
            .collect::<Result<Vec<_>>>()?;
        let motions = MotionSet::from_source(&mesh, sequences)?;
        let glue = match &cfg.seam_glue {
            Some(p) => Some(read_json(p)?),
            None => None,
        };
        Ok(Scene { mesh, motions, glue })
    }
}

/// Immutable products of the expensive steps, shareable across solves.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub mesh: GarmentMesh,
    pub motions: MotionSet,
    pub glue: Option<SeamGlue>,
    pub field: StrainField,
    pub integrals: EdgeIntegrals,
    pub strain_time: Duration,
    pub weights_time: Duration,
}

impl Analysis {
    pub fn compute(
        scene: Scene,
        material: &MaterialParams,
        variant: EnergyVariant,
        strip_width: f64,
    ) -> Result<Analysis> {
        let t = Instant::now();
        let field = compute_strain_field(&scene.mesh, &scene.motions, material, variant)?;
        let strain_time = t.elapsed();
        let t = Instant::now();
        let integrals = EdgeIntegrals::compute(&scene.mesh, &field, strip_width)?;
        let weights_time = t.elapsed();
        info!(
            "field over {} frames in {:.3} s, edge integrals in {:.3} s",
            scene.motions.total_frames(),
            strain_time.as_secs_f64(),
            weights_time.as_secs_f64()
        );
        Ok(Analysis {
            mesh: scene.mesh,
            motions: scene.motions,
            glue: scene.glue,
            field,
            integrals,
            strain_time,
            weights_time,
        })
    }

    pub fn from_config(cfg: &ProjectConfig) -> Result<Analysis> {
        Analysis::compute(Scene::load(cfg)?, &cfg.material, cfg.energy_variant, cfg.strip_width)
    }

    pub fn strip_width(&self) -> f64 {
        self.integrals.strip_width
    }

    /// Identifies the cached weights: mesh, field and strip width.
    pub fn cache_key(&self) -> String {
        format!(
            "{}:{}:{}",
            self.mesh.content_hash(),
            self.field.content_hash(),
            self.strip_width()
        )
    }

    /// Same garment on a refined mesh that keeps every existing vertex.
    pub fn on_mesh(&self, mesh: GarmentMesh) -> Result<Analysis> {
        let motions = self.motions.align_to(&mesh)?;
        let glue = self.glue.clone();
        Analysis::compute(
            Scene { mesh, motions, glue },
            &self.field.material,
            self.field.variant,
            self.strip_width(),
        )
    }

    /// Inserts in-face terminals; reuses `self` when nothing was inserted.
    pub fn resolve(&self, terminals: &TerminalSet) -> Result<(Cow<'_, Analysis>, Vec<usize>)> {
        let (mesh, ids) = terminals.resolve(&self.mesh)?;
        if mesh.vertex_count() == self.mesh.vertex_count() {
            Ok((Cow::Borrowed(self), ids))
        } else {
            Ok((Cow::Owned(self.on_mesh(mesh)?), ids))
        }
    }

    pub fn graph(&self, terminals: &[usize], baseline: bool, eta: f64) -> Result<WeightedWireGraph> {
        build_graph_from_integrals(
            &self.mesh,
            Some(&self.field),
            Some(&self.integrals),
            terminals,
            BuildOptions {
                eta,
                strip_width: self.strip_width(),
                uniform_weights: baseline,
            },
            self.glue.as_ref(),
        )
    }

    /// Pure strain part `Σ ε·area` of a tree's edge weights.
    pub fn tree_strain(&self, graph: &WeightedWireGraph, tree: &SteinerTree) -> f64 {
        tree.edges
            .iter()
            .flat_map(|&e| graph.edges[e].mesh_edges.iter())
            .map(|&m| self.integrals.strain[m])
            .sum()
    }
}

/// Solver, smoothing and evaluation choices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub eta: EtaSpec,
    pub sweep: SweepGrid,
    pub policy: SolvePolicy,
    pub smoothing: SmoothOptions,
    /// η used when scoring layouts; zero reports pure strain energy.
    pub eval_eta: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            eta: EtaSpec::default(),
            sweep: SweepGrid::default(),
            policy: SolvePolicy::default(),
            smoothing: SmoothOptions::default(),
            eval_eta: 0.0,
        }
    }
}

impl From<&ProjectConfig> for Settings {
    fn from(c: &ProjectConfig) -> Self {
        Settings {
            eta: c.eta,
            sweep: c.sweep,
            policy: c.solver,
            smoothing: c.smoothing,
            eval_eta: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub graph: Duration,
    pub solve: Duration,
    pub layout: Duration,
    pub evaluate: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub baseline: bool,
    /// η applied to the edge weights (Pa); zero for the baseline.
    pub eta: f64,
    pub tree: SteinerTree,
    pub layout: WireLayout,
    pub metrics: LayoutMetrics,
    #[serde(skip)]
    pub timings: Timings,
}

/// One solve at a known η.
pub fn solve_at(
    a: &Analysis,
    terminals: &[usize],
    baseline: bool,
    eta: f64,
    s: &Settings,
) -> Result<SolveOutcome> {
    let t = Instant::now();
    let graph = a.graph(terminals, baseline, eta)?;
    let graph_time = t.elapsed();
    let t = Instant::now();
    let tree = solve_tree(&graph, &s.policy)?;
    let solve_time = t.elapsed();
    let t = Instant::now();
    let layout = build_layout(&tree, &graph, &a.mesh, a.strip_width(), &s.smoothing)?;
    let layout_time = t.elapsed();
    let t = Instant::now();
    let metrics = evaluate(&layout, &a.mesh, &a.field, &a.motions, s.eval_eta)?;
    Ok(SolveOutcome {
        baseline,
        eta: graph.params.eta,
        tree,
        layout,
        metrics,
        timings: Timings {
            graph: graph_time,
            solve: solve_time,
            layout: layout_time,
            evaluate: t.elapsed(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// `−log10(η·scale)`.
    pub neg_log10: f64,
    pub eta: f64,
    pub tree_weight: f64,
    /// Mesh-edge length of the tree (m).
    pub tree_length: f64,
    /// `Σ ε·area` under the tree's edge strips.
    pub tree_strain: f64,
    /// Smoothed-layout metrics, when requested.
    pub layout: Option<LayoutMetrics>,
}

/// Solves once per grid value of `−log10(η·scale)`.
pub fn sweep(a: &Analysis, terminals: &[usize], s: &Settings, with_layouts: bool) -> Result<Vec<SweepPoint>> {
    s.sweep
        .values()
        .into_iter()
        .map(|x| {
            let eta = eta_from_neg_log10(x, s.sweep.scale);
            let graph = a.graph(terminals, false, eta)?;
            let tree = solve_tree(&graph, &s.policy)?;
            let layout = if with_layouts {
                let l = build_layout(&tree, &graph, &a.mesh, a.strip_width(), &s.smoothing)?;
                Some(evaluate(&l, &a.mesh, &a.field, &a.motions, s.eval_eta)?)
            } else {
                None
            };
            Ok(SweepPoint {
                neg_log10: x,
                eta: graph.params.eta,
                tree_weight: tree.total_weight,
                tree_length: tree.total_length,
                tree_strain: a.tree_strain(&graph, &tree),
                layout,
            })
        })
        .collect()
}

/// Sweep coordinate where the normalised length curve (rising with x) meets
/// the normalised strain curve (falling with x): the first grid point at
/// which the length has risen at least as far as the strain has fallen.
/// Snapping to a grid point keeps the choice away from the knife edge
/// between two layouts. Falls back to the converged preset when both curves
/// are flat.
pub fn calibrate(points: &[SweepPoint]) -> f64 {
    let norm = |v: Vec<f64>| -> Option<Vec<f64>> {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo > 1e-12 * hi.abs().max(1e-300))
            .then(|| v.iter().map(|x| (x - lo) / (hi - lo)).collect())
    };
    let mut pts: Vec<&SweepPoint> = points.iter().collect();
    pts.sort_by(|p, q| p.neg_log10.total_cmp(&q.neg_log10));
    let len = norm(pts.iter().map(|p| p.tree_length).collect());
    let en = norm(pts.iter().map(|p| p.tree_strain).collect());
    let (Some(len), Some(en)) = (len, en) else {
        return CONVERGED_NEG_LOG10;
    };
    len.iter()
        .zip(&en)
        .position(|(l, e)| l >= e)
        .map_or(pts[pts.len() - 1].neg_log10, |i| pts[i].neg_log10)
}

/// η for a solve: fixed values pass through, calibration runs a sweep.
pub fn resolve_eta(a: &Analysis, terminals: &[usize], spec: &EtaSpec, s: &Settings) -> Result<f64> {
    if let Some(eta) = spec.fixed(s.sweep.scale) {
        return Ok(eta);
    }
    debug_assert_eq!(*spec, EtaSpec::Preset(EtaPreset::Calibrated));
    let pts = sweep(a, terminals, s, false)?;
    let x = calibrate(&pts);
    info!("calibrated −log10(η·scale) = {x:.3}");
    Ok(eta_from_neg_log10(x, s.sweep.scale))
}

/// Resolves η from the settings and solves.
pub fn solve(a: &Analysis, terminals: &[usize], baseline: bool, s: &Settings) -> Result<SolveOutcome> {
    let eta = if baseline {
        0.0
    } else {
        resolve_eta(a, terminals, &s.eta, s)?
    };
    solve_at(a, terminals, baseline, eta, s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossEval {
    pub labels: Vec<String>,
    /// η applied for each field (Pa).
    pub etas: Vec<f64>,
    /// `[i][j]`: weight of layout j's tree under field i, over the weight of
    /// field i's own optimal tree.
    pub weight_ratio: Vec<Vec<f64>>,
    /// `[i][j]`: smoothed strip energy of layout j under field i, over that
    /// of layout i.
    pub energy_ratio: Vec<Vec<f64>>,
    pub trees: Vec<SteinerTree>,
}

impl CrossEval {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("field\\layout");
        for l in &self.labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for (i, row) in self.weight_ratio.iter().enumerate() {
            s.push_str(&self.labels[i]);
            for x in row {
                s.push_str(&format!(",{x}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Scores every field's own layout under every other field.
pub fn cross_eval(
    analyses: &[(String, Analysis, Settings)],
    terminals: &TerminalSet,
) -> Result<CrossEval> {
    let first = &analyses
        .first()
        .ok_or_else(|| Error::InvalidParameter("cross evaluation needs a config".into()))?
        .1;
    for (label, a, _) in analyses {
        if !a.mesh.same_topology(&first.mesh) {
            return Err(Error::Topology(format!("'{label}' uses a different mesh")));
        }
    }
    let mut graphs = Vec::new();
    let mut outcomes = Vec::new();
    let mut resolved = Vec::new();
    for (_, a, s) in analyses {
        let (ra, ids) = a.resolve(terminals)?;
        let ra = ra.into_owned();
        let eta = resolve_eta(&ra, &ids, &s.eta, s)?;
        let out = solve_at(&ra, &ids, false, eta, s)?;
        graphs.push(ra.graph(&ids, false, eta)?);
        outcomes.push(out);
        resolved.push(ra);
    }
    let k = analyses.len();
    let mut weight_ratio = vec![vec![0.0; k]; k];
    let mut energy_ratio = vec![vec![0.0; k]; k];
    for i in 0..k {
        let g = &graphs[i];
        let own = outcomes[i].tree.total_weight;
        let own_energy = outcomes[i].metrics.deformation_energy;
        for j in 0..k {
            let w: f64 = outcomes[j].tree.edges.iter().map(|&e| g.edges[e].weight).sum();
            weight_ratio[i][j] = if own > 0.0 { w / own } else { 1.0 };
            let m = evaluate(
                &outcomes[j].layout,
                &resolved[i].mesh,
                &resolved[i].field,
                &resolved[i].motions,
                analyses[i].2.eval_eta,
            )?;
            energy_ratio[i][j] = if own_energy > 0.0 {
                m.deformation_energy / own_energy
            } else {
                1.0
            };
        }
    }
    Ok(CrossEval {
        labels: analyses.iter().map(|(l, _, _)| l.clone()).collect(),
        etas: graphs.iter().map(|g| g.params.eta).collect(),
        weight_ratio,
        energy_ratio,
        trees: outcomes.into_iter().map(|o| o.tree).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub level: usize,
    pub vertices: usize,
    pub faces: usize,
    pub weight: f64,
    /// Change against level 0, percent.
    pub weight_change: f64,
    pub solve_seconds: f64,
}

/// Solves the same terminals on `levels` successive midpoint refinements
/// (level 0 is the input mesh) at a fixed η.
pub fn scaling_study(
    a: &Analysis,
    terminals: &[usize],
    eta: f64,
    levels: usize,
    policy: &SolvePolicy,
) -> Result<Vec<ScalingRow>> {
    let mut rows: Vec<ScalingRow> = Vec::new();
    let mut current = Cow::Borrowed(a);
    for level in 0..levels {
        if level > 0 {
            let refined = current.mesh.subdivide_midpoints()?;
            current = Cow::Owned(current.on_mesh(refined)?);
        }
        let graph = current.graph(terminals, false, eta)?;
        let t = Instant::now();
        let tree = solve_tree(&graph, policy)?;
        let secs = t.elapsed().as_secs_f64();
        let base = rows.first().map_or(tree.total_weight, |r| r.weight);
        rows.push(ScalingRow {
            level,
            vertices: current.mesh.vertex_count(),
            faces: current.mesh.face_count(),
            weight: tree.total_weight,
            weight_change: 100.0 * (tree.total_weight - base) / base,
            solve_seconds: secs,
        });
    }
    Ok(rows)
}

/// Sweep coordinate of an η value.
pub fn sweep_coordinate(eta: f64, grid: &SweepGrid) -> f64 {
    neg_log10_from_eta(eta, grid.scale)
}

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::bail;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use wirelay::config::{read_terminals, EtaSpec, ProjectConfig, TerminalSource};
use wirelay::io::{
    heatmap_svg, ply_string, write_frames, write_json, write_obj, write_strain, write_text,
    GraphFile, Overlay,
};
use wirelay::layout::{build_layout, compare_layouts, evaluate, WireLayout};
use wirelay::pipeline::{
    cross_eval, resolve_eta, scaling_study, solve, sweep, Analysis, Settings, SolveOutcome,
};
use wirelay::steiner::SteinerTree;
use wirelay::strain::{EnergyVariant, MaterialParams};
use wirelay::synth::{generate, SyntheticSpec};
use wirelay::terminals::TerminalSet;
use wirelay::Error;

#[derive(Debug, Parser)]
#[command(name = "wirelay", version, about = "Deformation-aware wire routing on garments")]
pub struct Cli {
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strain field over all frames, with heatmaps.
    Strain(Common),
    /// Weighted wiring graph as JSON and SteinLib text.
    Weights {
        #[command(flatten)]
        common: Common,
        /// Unit weights instead of strain weights.
        #[arg(long)]
        baseline: bool,
    },
    /// Tree, smoothed layout and metrics for a terminal set.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        baseline: bool,
        /// Also sweep η over the configured grid and write a CSV.
        #[arg(long)]
        sweep_eta: bool,
        /// Also run the subdivision scaling study with this many levels.
        #[arg(long)]
        scaling: Option<usize>,
    },
    /// Re-smooths the tree stored in a layout file.
    Smooth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        layout: PathBuf,
    },
    /// Scores layout files against the configured field and motions.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long = "layout", required = true)]
        layouts: Vec<PathBuf>,
    },
    /// Side-by-side metrics. Without layout files it compares the weighted
    /// solve against the baseline.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long = "layout")]
        layouts: Vec<PathBuf>,
    },
    /// Writes a synthetic garment, its motion and a project file.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::SleeveBend)]
        kind: Kind,
        /// Output directory.
        #[arg(long, default_value = "synthetic")]
        out: PathBuf,
        /// Generator parameter, e.g. `theta_max_deg=80` (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Terminal vertices written into the project file.
        #[arg(long, value_delimiter = ',')]
        terminals: Vec<usize>,
    },
    /// HTTP service for the designer front end.
    Serve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Every field's own layout scored under every other field.
    Crosseval {
        /// Project files, one per field (repeatable).
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Labels for the configs; file stems by default.
        #[arg(long = "label")]
        labels: Vec<String>,
        #[arg(long)]
        terminals: Option<String>,
        #[arg(long)]
        eta: Option<EtaSpec>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    SleeveBend,
    TorsoTwist,
    FlatStretch,
}

/// Project file plus the overrides every pipeline command accepts.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Project file (TOML, or JSON by extension).
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Strip width in metres.
    #[arg(long)]
    pub wd: Option<f64>,
    /// `calibrated`, `converged`, `x=<−log10 η·scale>` or Pa.
    #[arg(long)]
    pub eta: Option<EtaSpec>,
    /// `paper-literal` or `svk-quadratic`.
    #[arg(long)]
    pub variant: Option<EnergyVariant>,
    #[arg(long)]
    pub youngs: Option<f64>,
    #[arg(long)]
    pub poisson: Option<f64>,
    #[arg(long)]
    pub unit_scale: Option<f64>,
    /// Exact solver terminal cap.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Always use the 2-approximation.
    #[arg(long)]
    pub approx: bool,
    /// Comma-separated vertex ids or a terminal JSON file.
    #[arg(long)]
    pub terminals: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn load(&self) -> anyhow::Result<ProjectConfig> {
        let Some(path) = &self.config else {
            return Err(Error::InvalidParameter("--config is required".into()).into());
        };
        let mut cfg = ProjectConfig::load(path)?;
        self.apply(&mut cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut ProjectConfig) -> anyhow::Result<()> {
        if let Some(v) = self.wd {
            cfg.strip_width = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.variant {
            cfg.energy_variant = v;
        }
        if self.youngs.is_some() || self.poisson.is_some() {
            cfg.material = MaterialParams::new(
                self.youngs.unwrap_or(cfg.material.youngs_modulus()),
                self.poisson.unwrap_or(cfg.material.poisson_ratio()),
            )?;
        }
        if let Some(v) = self.unit_scale {
            cfg.unit_scale = v;
        }
        if let Some(v) = self.cap {
            cfg.solver.cap = v;
        }
        if self.approx {
            cfg.solver.prefer_exact = false;
        }
        if let Some(t) = &self.terminals {
            cfg.terminals = Some(parse_terminal_arg(t));
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        Ok(())
    }
}

/// `3,17,40` is a vertex list, anything else a file path.
pub fn parse_terminal_arg(s: &str) -> TerminalSource {
    let ids: Option<Vec<usize>> = s
        .split(',')
        .map(|t| t.trim().parse().ok())
        .collect();
    match ids {
        Some(v) if !v.is_empty() => TerminalSource::Vertices(v),
        _ => TerminalSource::File(PathBuf::from(s)),
    }
}

fn need_terminals(cfg: &ProjectConfig) -> anyhow::Result<TerminalSet> {
    cfg.resolve_terminals()?.ok_or_else(|| {
        Error::InvalidTerminals("no terminals: pass --terminals or set them in the config".into())
            .into()
    })
}

/// Process exit code for an error: 3 for solver failures, 2 for invalid
/// input, 1 for anything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_solver_failure() => 3,
        Some(_) => 2,
        None => 1,
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Strain(c) => cmd_strain(&c.load()?),
        Command::Weights { common, baseline } => cmd_weights(&common.load()?, baseline),
        Command::Solve {
            common,
            baseline,
            sweep_eta,
            scaling,
        } => cmd_solve(&common.load()?, baseline, sweep_eta, scaling),
        Command::Smooth { common, layout } => cmd_smooth(&common.load()?, &layout),
        Command::Eval { common, layouts } => cmd_eval(&common.load()?, &layouts),
        Command::Compare { common, layouts } => cmd_compare(&common.load()?, &layouts),
        Command::Gen {
            kind,
            out,
            params,
            terminals,
        } => cmd_gen(kind, &out, &params, &terminals),
        Command::Serve { common, host, port } => {
            let cfg = common.load()?;
            tokio::runtime::Runtime::new()?.block_on(crate::server::serve(cfg, &host, port))
        }
        Command::Crosseval {
            configs,
            labels,
            terminals,
            eta,
            out,
        } => cmd_crosseval(&configs, &labels, terminals.as_deref(), eta, out),
    }
}

fn cmd_strain(cfg: &ProjectConfig) -> anyhow::Result<()> {
    let a = Analysis::from_config(cfg)?;
    let out = &cfg.output_dir;
    write_strain(&out.join("field.strain"), &a.field)?;
    write_text(&out.join("heatmap.svg"), &heatmap_svg(&a.mesh, Some(&a.field), &[]))?;
    write_text(&out.join("heatmap.ply"), &ply_string(&a.mesh, &a.field))?;
    let frames = a.motions.total_frames().max(1);
    println!(
        "{} faces, {} frames: {:.3} ms per frame, max density {:.6e} Pa",
        a.mesh.face_count(),
        frames,
        1e3 * a.strain_time.as_secs_f64() / frames as f64,
        a.field.max_density()
    );
    println!("wrote {}", out.join("field.strain").display());
    Ok(())
}

fn cmd_weights(cfg: &ProjectConfig, baseline: bool) -> anyhow::Result<()> {
    let a = Analysis::from_config(cfg)?;
    let s = Settings::from(cfg);
    let terminals = cfg.resolve_terminals()?;
    let (a, ids) = match &terminals {
        Some(t) => {
            let (ra, ids) = a.resolve(t)?;
            (ra.into_owned(), ids)
        }
        None => (a, Vec::new()),
    };
    let eta = if baseline {
        0.0
    } else if let Some(eta) = cfg.eta.fixed(cfg.sweep.scale) {
        eta
    } else if ids.is_empty() {
        bail!(Error::InvalidParameter(
            "calibrated η needs terminals; give them or a fixed --eta".into()
        ));
    } else {
        resolve_eta(&a, &ids, &cfg.eta, &s)?
    };
    let g = a.graph(&ids, baseline, eta)?;
    let out = &cfg.output_dir;
    write_json(&out.join("graph.json"), &GraphFile::from(&g))?;
    write_text(
        &out.join("graph.stp"),
        &wirelay::io::stp_string(&g, cfg.stp_scale, "wirelay"),
    )?;
    println!(
        "{} nodes, {} edges, η = {:.6e} Pa, integrals in {:.3} s (key {})",
        g.node_count,
        g.edges.len(),
        g.params.eta,
        a.weights_time.as_secs_f64(),
        a.cache_key()
    );
    Ok(())
}

fn print_outcome(label: &str, o: &SolveOutcome) {
    println!(
        "{label}: η = {:.6e} Pa, weight {:.6}, length {:.4} m, energy {:.6}, elongation max {:.3}% avg {:.3}%, {} branches, solve {:.3} s",
        o.eta,
        o.tree.total_weight,
        o.metrics.total_length,
        o.metrics.deformation_energy,
        o.metrics.max_elongation_rate,
        o.metrics.avg_elongation_rate,
        o.layout.branches.len(),
        o.timings.solve.as_secs_f64()
    );
}

fn cmd_solve(
    cfg: &ProjectConfig,
    baseline: bool,
    sweep_eta: bool,
    scaling: Option<usize>,
) -> anyhow::Result<()> {
    let terminals = need_terminals(cfg)?;
    let a = Analysis::from_config(cfg)?;
    let s = Settings::from(cfg);
    let (a, ids) = a.resolve(&terminals)?;
    let out = &cfg.output_dir;
    let t = Instant::now();
    let outcome = solve(&a, &ids, baseline, &s)?;
    let stem = if baseline { "baseline" } else { "layout" };
    write_json(&out.join(format!("{stem}.json")), &outcome)?;
    let overlay = Overlay {
        layout: &outcome.layout,
        color: if baseline { "#ff3b30" } else { "#ffffff" },
    };
    write_text(
        &out.join(format!("{stem}.svg")),
        &heatmap_svg(&a.mesh, Some(&a.field), &[overlay]),
    )?;
    print_outcome(stem, &outcome);
    log::info!("solve command took {:.3} s", t.elapsed().as_secs_f64());

    if sweep_eta {
        let pts = sweep(&a, &ids, &s, true)?;
        let mut csv = String::from("neg_log10,eta,tree_weight,tree_length,tree_strain,deformation_energy,total_length\n");
        for p in &pts {
            let (e, l) = p
                .layout
                .as_ref()
                .map_or((f64::NAN, f64::NAN), |m| (m.deformation_energy, m.total_length));
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.neg_log10, p.eta, p.tree_weight, p.tree_length, p.tree_strain, e, l
            ));
        }
        write_text(&out.join("sweep.csv"), &csv)?;
        write_json(&out.join("sweep.json"), &pts)?;
        println!("wrote {} ({} points)", out.join("sweep.csv").display(), pts.len());
    }
    if let Some(levels) = scaling {
        let rows = scaling_study(&a, &ids, outcome.eta, levels, &s.policy)?;
        for r in &rows {
            println!(
                "level {}: {} vertices, weight {:.6} ({:+.4}%), solve {:.3} s",
                r.level, r.vertices, r.weight, r.weight_change, r.solve_seconds
            );
        }
        write_json(&out.join("scaling.json"), &rows)?;
    }
    Ok(())
}

fn read_layout(path: &Path) -> anyhow::Result<WireLayout> {
    let v: Value = wirelay::io::read_json(path)?;
    // Solve output wraps the layout; bare layout files are accepted too.
    let inner = v.get("layout").cloned().unwrap_or(v);
    serde_json::from_value(inner)
        .map_err(|e| Error::Config {
            path: path.into(),
            msg: format!("not a layout: {e}"),
        })
        .map_err(Into::into)
}

/// Analysis on the mesh the layout was built on: terminals from the config
/// are re-inserted so vertex ids line up.
fn analysis_for_layouts(cfg: &ProjectConfig) -> anyhow::Result<(Analysis, Vec<usize>)> {
    let a = Analysis::from_config(cfg)?;
    match cfg.resolve_terminals()? {
        Some(t) => {
            let (ra, ids) = a.resolve(&t)?;
            Ok((ra.into_owned(), ids))
        }
        None => Ok((a, Vec::new())),
    }
}

fn cmd_smooth(cfg: &ProjectConfig, layout: &Path) -> anyhow::Result<()> {
    let (a, ids) = analysis_for_layouts(cfg)?;
    let tree: SteinerTree = read_layout(layout)?.tree;
    // Edge ids do not depend on the weights, so a unit-weight graph over the
    // same mesh carries the tree back to mesh edges.
    let g = a.graph(&ids, true, 0.0)?;
    if tree.edges.iter().any(|&e| e >= g.edges.len()) {
        bail!(Error::Topology("layout tree does not match this mesh".into()));
    }
    let s = Settings::from(cfg);
    let new = build_layout(&tree, &g, &a.mesh, cfg.strip_width, &s.smoothing)?;
    let path = cfg.output_dir.join("smoothed.json");
    write_json(&path, &new)?;
    println!(
        "{} branches, length {:.4} m, max curvature {:.2} (bound {:.2}), {} iterations",
        new.branches.len(),
        new.total_length(),
        new.max_curvature(),
        2.0 / cfg.strip_width,
        new.max_iterations()
    );
    Ok(())
}

fn cmd_eval(cfg: &ProjectConfig, layouts: &[PathBuf]) -> anyhow::Result<()> {
    let (a, _) = analysis_for_layouts(cfg)?;
    let s = Settings::from(cfg);
    let mut all = Vec::new();
    for p in layouts {
        let l = read_layout(p)?;
        let m = evaluate(&l, &a.mesh, &a.field, &a.motions, s.eval_eta)?;
        println!(
            "{}: energy {:.6}, elongation max {:.3}% avg {:.3}%, length {:.4} m, drift {:.2}%",
            p.display(),
            m.deformation_energy,
            m.max_elongation_rate,
            m.avg_elongation_rate,
            m.total_length,
            m.smoothing_drift()
        );
        all.push(m);
    }
    write_json(&cfg.output_dir.join("metrics.json"), &all)?;
    Ok(())
}

fn cmd_compare(cfg: &ProjectConfig, layouts: &[PathBuf]) -> anyhow::Result<()> {
    let s = Settings::from(cfg);
    let (a, owned): (Analysis, Vec<(String, WireLayout)>) = if layouts.is_empty() {
        let terminals = need_terminals(cfg)?;
        let base = Analysis::from_config(cfg)?;
        let (a, ids) = base.resolve(&terminals)?;
        let a = a.into_owned();
        let w = solve(&a, &ids, false, &s)?;
        let b = solve(&a, &ids, true, &s)?;
        (
            a,
            vec![("baseline".into(), b.layout), ("weighted".into(), w.layout)],
        )
    } else {
        let (a, _) = analysis_for_layouts(cfg)?;
        let ls = layouts
            .iter()
            .map(|p| {
                let label = p.file_stem().map_or("layout".into(), |s| s.to_string_lossy().into_owned());
                Ok((label, read_layout(p)?))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        (a, ls)
    };
    let refs: Vec<(String, &WireLayout)> = owned.iter().map(|(l, x)| (l.clone(), x)).collect();
    let report = compare_layouts(&refs, &a.mesh, &a.field, &a.motions, s.eval_eta)?;
    write_text(&cfg.output_dir.join("compare.csv"), &report.to_csv())?;
    write_json(&cfg.output_dir.join("compare.json"), &report)?;
    print!("{}", report.to_csv());
    Ok(())
}

/// Applies `key=value` pairs to the generator's parameter object. Values
/// are read as JSON when they parse, as strings otherwise.
pub fn synthetic_spec(kind: Kind, params: &[String]) -> anyhow::Result<SyntheticSpec> {
    let name = match kind {
        Kind::SleeveBend => "sleeve-bend",
        Kind::TorsoTwist => "torso-twist",
        Kind::FlatStretch => "flat-stretch",
    };
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), Value::String(name.into()));
    for p in params {
        let Some((k, v)) = p.split_once('=') else {
            bail!(Error::InvalidParameter(format!("expected KEY=VALUE, got '{p}'")));
        };
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.into()));
        obj.insert(k.trim().into(), v);
    }
    serde_json::from_value(Value::Object(obj))
        .map_err(|e| Error::InvalidParameter(format!("{name}: {e}")).into())
}

fn cmd_gen(kind: Kind, out: &Path, params: &[String], terminals: &[usize]) -> anyhow::Result<()> {
    let spec = synthetic_spec(kind, params)?;
    let scene = generate(&spec)?;
    write_obj(&out.join("mesh.obj"), &scene.mesh)?;
    let mut frames = Vec::new();
    for seq in scene.motions.sequences() {
        let rel = PathBuf::from("frames").join(format!("{}.frames", seq.name));
        write_frames(&out.join(&rel), &seq.frames)?;
        frames.push(rel);
    }
    write_json(&out.join("glue.json"), &scene.glue)?;
    let cfg = ProjectConfig {
        mesh: Some("mesh.obj".into()),
        frames,
        terminals: (!terminals.is_empty()).then(|| TerminalSource::Vertices(terminals.to_vec())),
        ..Default::default()
    };
    write_text(&out.join("project.toml"), &cfg.to_toml()?)?;
    println!(
        "{} vertices, {} faces, {} frames in {}",
        scene.mesh.vertex_count(),
        scene.mesh.face_count(),
        scene.motions.total_frames(),
        out.display()
    );
    Ok(())
}

/// File stem of the config, or its directory name when stems repeat.
fn default_label(configs: &[PathBuf], i: usize) -> String {
    let stem = |p: &PathBuf| p.file_stem().map(|s| s.to_string_lossy().into_owned());
    let unique = configs.iter().filter(|p| stem(p) == stem(&configs[i])).count() == 1;
    let name = if unique {
        stem(&configs[i])
    } else {
        configs[i]
            .canonicalize()
            .ok()
            .and_then(|c| c.parent()?.file_name().map(|s| s.to_string_lossy().into_owned()))
    };
    name.unwrap_or_else(|| format!("field{i}"))
}

fn cmd_crosseval(
    configs: &[PathBuf],
    labels: &[String],
    terminals: Option<&str>,
    eta: Option<EtaSpec>,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    if !labels.is_empty() && labels.len() != configs.len() {
        bail!(Error::InvalidParameter(format!(
            "{} labels for {} configs",
            labels.len(),
            configs.len()
        )));
    }
    let mut analyses = Vec::new();
    let mut first_terminals = None;
    for (i, p) in configs.iter().enumerate() {
        let mut cfg = ProjectConfig::load(p)?;
        if let Some(e) = eta {
            cfg.eta = e;
        }
        cfg.validate()?;
        if first_terminals.is_none() {
            first_terminals = match terminals {
                Some(t) => Some(match parse_terminal_arg(t) {
                    TerminalSource::Vertices(v) => TerminalSet::from_vertices(v),
                    TerminalSource::File(f) => read_terminals(&f)?,
                    TerminalSource::Inline(s) => s,
                }),
                None => cfg.resolve_terminals()?,
            };
        }
        let label = labels.get(i).cloned().unwrap_or_else(|| default_label(configs, i));
        let s = Settings::from(&cfg);
        analyses.push((label, Analysis::from_config(&cfg)?, s, cfg.output_dir.clone()));
    }
    let terminals = first_terminals.ok_or_else(|| {
        Error::InvalidTerminals("no terminals: pass --terminals or set them in the first config".into())
    })?;
    let out = out.unwrap_or_else(|| analyses[0].3.clone());
    let input: Vec<(String, Analysis, Settings)> =
        analyses.into_iter().map(|(l, a, s, _)| (l, a, s)).collect();
    let report = cross_eval(&input, &terminals)?;
    write_text(&out.join("crosseval.csv"), &report.to_csv())?;
    write_json(&out.join("crosseval.json"), &report)?;
    print!("{}", report.to_csv());
    Ok(())
}

//! Project configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::SmoothOptions;
use crate::steiner::SolvePolicy;
use crate::strain::{EnergyVariant, MaterialParams};
use crate::synth::SyntheticSpec;
use crate::terminals::TerminalSet;

/// Default strip width (m).
pub const DEFAULT_STRIP_WIDTH: f64 = 0.015;

/// Named choices for η.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaPreset {
    /// Where the normalised length and energy curves of a sweep cross.
    Calibrated,
    /// `−log10(η·scale) = 1`, inside the range where layouts stop changing.
    Converged,
}

/// Regularisation density. Either a preset, an absolute value in Pa, or the
/// sweep coordinate `x = −log10(η·scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaSpec {
    Preset(EtaPreset),
    Pascal(f64),
    NegLog10 { neg_log10: f64 },
}

impl Default for EtaSpec {
    fn default() -> Self {
        EtaSpec::Preset(EtaPreset::Calibrated)
    }
}

/// Sweep coordinate of the `converged` preset.
pub const CONVERGED_NEG_LOG10: f64 = 1.0;

impl EtaSpec {
    /// η in Pa if it does not need a calibration sweep.
    pub fn fixed(&self, scale: f64) -> Option<f64> {
        match *self {
            EtaSpec::Pascal(v) => Some(v),
            EtaSpec::NegLog10 { neg_log10 } => Some(eta_from_neg_log10(neg_log10, scale)),
            EtaSpec::Preset(EtaPreset::Converged) => {
                Some(eta_from_neg_log10(CONVERGED_NEG_LOG10, scale))
            }
            EtaSpec::Preset(EtaPreset::Calibrated) => None,
        }
    }
}

impl std::str::FromStr for EtaSpec {
    type Err = Error;

    /// `calibrated`, `converged`, `x=<neg log10>` or a number of Pa.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "calibrated" => Ok(EtaSpec::Preset(EtaPreset::Calibrated)),
            "converged" => Ok(EtaSpec::Preset(EtaPreset::Converged)),
            _ => {
                if let Some(x) = s.strip_prefix("x=") {
                    x.parse()
                        .map(|neg_log10| EtaSpec::NegLog10 { neg_log10 })
                        .map_err(|_| Error::InvalidParameter(format!("bad η '{s}'")))
                } else {
                    s.parse()
                        .map(EtaSpec::Pascal)
                        .map_err(|_| Error::InvalidParameter(format!("bad η '{s}'")))
                }
            }
        }
    }
}

pub fn eta_from_neg_log10(x: f64, scale: f64) -> f64 {
    10f64.powf(-x) / scale
}

pub fn neg_log10_from_eta(eta: f64, scale: f64) -> f64 {
    -(eta * scale).log10()
}

/// Grid over `x = −log10(η·scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Converts Pa into the sweep's unit; 1e-6 means η is read in MPa.
    pub scale: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            from: -2.0,
            to: 5.0,
            points: 8,
            scale: 1e-6,
        }
    }
}

impl SweepGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.from];
        }
        (0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Terminals given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TerminalSource {
    Inline(TerminalSet),
    Vertices(Vec<usize>),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    /// Garment OBJ with texture coordinates as the pattern.
    pub mesh: Option<PathBuf>,
    /// One motion sequence per entry: a `.frames` file or a frame directory.
    pub frames: Vec<PathBuf>,
    /// Procedural garment used instead of `mesh` and `frames`.
    pub synthetic: Option<SyntheticSpec>,
    pub unit_scale: f64,
    pub seam_glue: Option<PathBuf>,
    pub material: MaterialParams,
    pub energy_variant: EnergyVariant,
    pub strip_width: f64,
    pub eta: EtaSpec,
    pub sweep: SweepGrid,
    pub solver: SolvePolicy,
    pub smoothing: SmoothOptions,
    pub terminals: Option<TerminalSource>,
    pub output_dir: PathBuf,
    /// Weight multiplier for SteinLib export.
    pub stp_scale: f64,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            mesh: None,
            frames: Vec::new(),
            synthetic: None,
            unit_scale: 1.0,
            seam_glue: None,
            material: MaterialParams::default(),
            energy_variant: EnergyVariant::default(),
            strip_width: DEFAULT_STRIP_WIDTH,
            eta: EtaSpec::default(),
            sweep: SweepGrid::default(),
            solver: SolvePolicy::default(),
            smoothing: SmoothOptions::default(),
            terminals: None,
            output_dir: PathBuf::from("out"),
            stp_scale: 1e3,
        }
    }
}

impl ProjectConfig {
    /// Parses TOML, or JSON when the file ends in `.json`. Relative paths
    /// are resolved against the config file's directory.
    pub fn load(path: &Path) -> Result<ProjectConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ProjectConfig = if path.extension().is_some_and(|x| x == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config {
                path: path.into(),
                msg: e.to_string(),
            })?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config {
                path: path.into(),
                msg: e.to_string(),
            })?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(cfg.rebased(base))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidParameter(format!("config to TOML: {e}")))
    }

    /// Makes every relative path relative to `base`.
    pub fn rebased(mut self, base: &Path) -> ProjectConfig {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(m) = &mut self.mesh {
            fix(m);
        }
        self.frames.iter_mut().for_each(fix);
        if let Some(g) = &mut self.seam_glue {
            fix(g);
        }
        if let Some(TerminalSource::File(t)) = &mut self.terminals {
            fix(t);
        }
        fix(&mut self.output_dir);
        self
    }

    /// Range checks and input presence.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.strip_width > 0.0 && self.strip_width.is_finite()) {
            return bad(format!("strip_width must be positive, got {}", self.strip_width));
        }
        if !(self.unit_scale > 0.0) {
            return bad(format!("unit_scale must be positive, got {}", self.unit_scale));
        }
        if let Some(eta) = self.eta.fixed(self.sweep.scale) {
            if !(eta >= 0.0) || !eta.is_finite() {
                return bad(format!("η must be a non-negative number, got {eta}"));
            }
        }
        if !(self.sweep.scale > 0.0) || self.sweep.points == 0 {
            return bad("sweep needs a positive scale and at least one point".into());
        }
        if self.solver.cap < 2 {
            return bad("solver cap must be at least 2".into());
        }
        match (&self.mesh, &self.synthetic) {
            (Some(_), Some(_)) => return bad("give either mesh or synthetic, not both".into()),
            (None, None) => return bad("config needs a mesh or a synthetic garment".into()),
            (Some(m), None) => {
                if !m.exists() {
                    return Err(Error::io(
                        m,
                        std::io::Error::new(std::io::ErrorKind::NotFound, "mesh not found"),
                    ));
                }
                if self.frames.is_empty() {
                    return bad("a mesh needs at least one frames entry".into());
                }
                for f in &self.frames {
                    if !f.exists() {
                        return Err(Error::io(
                            f,
                            std::io::Error::new(std::io::ErrorKind::NotFound, "frames not found"),
                        ));
                    }
                }
            }
            (None, Some(_)) => {}
        }
        Ok(())
    }

    pub fn resolve_terminals(&self) -> Result<Option<TerminalSet>> {
        Ok(match &self.terminals {
            None => None,
            Some(TerminalSource::Inline(t)) => Some(t.clone()),
            Some(TerminalSource::Vertices(v)) => Some(TerminalSet::from_vertices(v.iter().copied())),
            Some(TerminalSource::File(p)) => Some(read_terminals(p)?),
        })
    }
}

/// A terminal file holds either `{"terminals": [...]}` or a bare list.
pub fn read_terminals(path: &Path) -> Result<TerminalSet> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        Set(TerminalSet),
        List(Vec<crate::terminals::Terminal>),
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(match serde_json::from_str(&text)? {
        Form::Set(s) => s,
        Form::List(terminals) => TerminalSet { terminals },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults_and_overrides() {
        let cfg: ProjectConfig = toml::from_str(
            r#"
            strip_width = 0.02
            eta = "converged"
            terminals = [3, 9]
            [synthetic]
            kind = "sleeve-bend"
            theta_max_deg = 45.0
            [material]
            poisson_ratio = 0.3
            "#,
        )
        .unwrap();
        assert_eq!(cfg.strip_width, 0.02);
        assert!((cfg.eta.fixed(1e-6).unwrap() - 1e5).abs() < 1e-6);
        assert_eq!(cfg.material.youngs_modulus(), 5.4e6);
        assert!(matches!(cfg.terminals, Some(TerminalSource::Vertices(_))));
        cfg.validate().unwrap();
        assert_eq!(cfg.resolve_terminals().unwrap().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = ProjectConfig {
            synthetic: Some(SyntheticSpec::FlatStretch(Default::default())),
            ..Default::default()
        };
        cfg.validate().unwrap();
        cfg.strip_width = 0.0;
        assert!(cfg.validate().is_err());
        cfg.strip_width = 0.015;
        cfg.eta = EtaSpec::Pascal(-1.0);
        assert!(cfg.validate().is_err());
        assert!(toml::from_str::<ProjectConfig>("bogus = 1").is_err());
        assert!(toml::from_str::<ProjectConfig>("[material]\npoisson_ratio = 0.5").is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let cfg = ProjectConfig {
            mesh: Some("mesh.obj".into()),
            frames: vec!["frames/walk.frames".into()],
            eta: EtaSpec::NegLog10 { neg_log10: 2.0 },
            ..Default::default()
        };
        let back: ProjectConfig = toml::from_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn eta_forms() {
        assert_eq!("12.5".parse::<EtaSpec>().unwrap(), EtaSpec::Pascal(12.5));
        assert_eq!(
            "x=2".parse::<EtaSpec>().unwrap().fixed(1e-6).unwrap(),
            eta_from_neg_log10(2.0, 1e-6)
        );
        assert!((neg_log10_from_eta(1e4, 1e-6) - 2.0).abs() < 1e-12);
        assert_eq!(SweepGrid::default().values().len(), 8);
    }
}

//! Membrane strain energy on the garment, per face and per frame.
//!
//! Each triangle carries one deformation gradient mapping its flat pattern
//! shape to its deformed 3D shape. The Green strain of that gradient is fed to
//! a St. Venant–Kirchhoff style density. Per-face densities are averaged over
//! the frames of each motion sequence, and the field keeps the worst sequence
//! for each face.

use nalgebra::{Matrix2, Matrix2x3, Matrix3x2, Point2, Point3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mesh::{hex, GarmentMesh, DEGENERATE_AREA};
use crate::motion::MotionSet;

/// Young's modulus of the knit fabric, Pa.
pub const DEFAULT_YOUNGS_MODULUS: f64 = 5.4e6;
pub const DEFAULT_POISSON_RATIO: f64 = 0.33;

/// Isotropic material constants. The Lamé parameters are derived on
/// construction and stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialSpec", into = "MaterialSpec")]
pub struct MaterialParams {
    youngs_modulus: f64,
    poisson_ratio: f64,
    mu: f64,
    lambda: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(default = "default_e")]
    pub youngs_modulus: f64,
    #[serde(default = "default_nu")]
    pub poisson_ratio: f64,
}

fn default_e() -> f64 {
    DEFAULT_YOUNGS_MODULUS
}

fn default_nu() -> f64 {
    DEFAULT_POISSON_RATIO
}

impl Default for MaterialSpec {
    fn default() -> Self {
        MaterialSpec {
            youngs_modulus: DEFAULT_YOUNGS_MODULUS,
            poisson_ratio: DEFAULT_POISSON_RATIO,
        }
    }
}

impl TryFrom<MaterialSpec> for MaterialParams {
    type Error = Error;

    fn try_from(s: MaterialSpec) -> Result<Self> {
        MaterialParams::new(s.youngs_modulus, s.poisson_ratio)
    }
}

impl From<MaterialParams> for MaterialSpec {
    fn from(m: MaterialParams) -> Self {
        MaterialSpec {
            youngs_modulus: m.youngs_modulus,
            poisson_ratio: m.poisson_ratio,
        }
    }
}

impl MaterialParams {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        if !(youngs_modulus > 0.0 && youngs_modulus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Young's modulus must be positive, got {youngs_modulus}"
            )));
        }
        if !(0.0..0.5).contains(&poisson_ratio) {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio must lie in [0, 0.5), got {poisson_ratio}"
            )));
        }
        let mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
        let lambda =
            youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
        Ok(MaterialParams {
            youngs_modulus,
            poisson_ratio,
            mu,
            lambda,
        })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    /// First Lamé parameter (shear modulus), Pa.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Second Lamé parameter, Pa.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams::new(DEFAULT_YOUNGS_MODULUS, DEFAULT_POISSON_RATIO).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EnergyVariant {
    /// `μ‖G‖_F + (λ/2) tr G`, clamped at zero.
    #[default]
    #[serde(rename = "paper-literal")]
    Linear,
    /// Standard SVK: `μ‖G‖_F² + (λ/2) (tr G)²`.
    #[serde(rename = "svk-quadratic")]
    Quadratic,
}

impl std::str::FromStr for EnergyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" | "linear" => Ok(EnergyVariant::Linear),
            "svk-quadratic" | "quadratic" => Ok(EnergyVariant::Quadratic),
            other => Err(Error::InvalidParameter(format!("unknown energy variant '{other}'"))),
        }
    }
}

/// Inverse of the 2×2 matrix of rest edge vectors `[b−a, c−a]`.
pub fn rest_inverse(rest: &[Point2<f64>; 3]) -> Result<Matrix2<f64>> {
    let r = Matrix2::from_columns(&[rest[1] - rest[0], rest[2] - rest[0]]);
    if !(0.5 * r.determinant().abs() > DEGENERATE_AREA) {
        return Err(Error::DegenerateFace(0));
    }
    r.try_inverse().ok_or(Error::DegenerateFace(0))
}

/// Deformation gradient of a triangle: `[d1 d2] = F [r1 r2]`.
pub fn deformation_gradient(
    rest: &[Point2<f64>; 3],
    deformed: &[Point3<f64>; 3],
) -> Result<Matrix3x2<f64>> {
    let inv = rest_inverse(rest)?;
    Ok(gradient_with_inverse(&inv, deformed))
}

#[inline]
fn gradient_with_inverse(inv: &Matrix2<f64>, deformed: &[Point3<f64>; 3]) -> Matrix3x2<f64> {
    let d = Matrix3x2::from_columns(&[deformed[1] - deformed[0], deformed[2] - deformed[0]]);
    d * inv
}

/// `G = ½(FᵀF − I)`.
pub fn green_strain(f: &Matrix3x2<f64>) -> Matrix2<f64> {
    let ft: Matrix2x3<f64> = f.transpose();
    (ft * f - Matrix2::identity()) * 0.5
}

pub fn svk_density(g: &Matrix2<f64>, material: &MaterialParams, variant: EnergyVariant) -> f64 {
    let trace = g.trace();
    match variant {
        EnergyVariant::Linear => {
            (material.mu * g.norm() + 0.5 * material.lambda * trace).max(0.0)
        }
        EnergyVariant::Quadratic => {
            material.mu * g.norm_squared() + 0.5 * material.lambda * trace * trace
        }
    }
}

/// Energy density of one deformed triangle.
pub fn face_density(
    rest: &[Point2<f64>; 3],
    deformed: &[Point3<f64>; 3],
    material: &MaterialParams,
    variant: EnergyVariant,
) -> Result<f64> {
    let f = deformation_gradient(rest, deformed)?;
    Ok(svk_density(&green_strain(&f), material, variant))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeans {
    pub name: String,
    pub frames: usize,
    pub means: Vec<f64>,
}

/// Aggregated per-face energy density, Pa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrainField {
    pub per_face: Vec<f64>,
    pub per_sequence: Vec<SequenceMeans>,
    pub material: MaterialParams,
    pub variant: EnergyVariant,
}

impl StrainField {
    /// Field with the given per-face values and no sequence breakdown.
    pub fn from_values(per_face: Vec<f64>) -> StrainField {
        StrainField {
            per_sequence: vec![SequenceMeans {
                name: "constant".into(),
                frames: 1,
                means: per_face.clone(),
            }],
            per_face,
            material: MaterialParams::default(),
            variant: EnergyVariant::default(),
        }
    }

    pub fn face_count(&self) -> usize {
        self.per_face.len()
    }

    pub fn density(&self, face: usize) -> f64 {
        self.per_face[face]
    }

    /// Every density (and the sequence breakdown) multiplied by `c`.
    pub fn scaled(&self, c: f64) -> StrainField {
        let mut out = self.clone();
        out.per_face.iter_mut().for_each(|x| *x *= c);
        for s in &mut out.per_sequence {
            s.means.iter_mut().for_each(|x| *x *= c);
        }
        out
    }

    pub fn max_density(&self) -> f64 {
        self.per_face.iter().copied().fold(0.0, f64::max)
    }

    /// Median over strictly positive densities.
    pub fn median_positive(&self) -> Option<f64> {
        let mut pos: Vec<f64> = self.per_face.iter().copied().filter(|&x| x > 0.0).collect();
        if pos.is_empty() {
            return None;
        }
        pos.sort_by(f64::total_cmp);
        Some(pos[pos.len() / 2])
    }

    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for x in &self.per_face {
            h.update(x.to_le_bytes());
        }
        hex(&h.finalize())
    }

    /// Per-face field carried over to a mesh refined by centroid
    /// subdivision: child `3f + k` inherits face `f`.
    pub fn refine_centroids(&self) -> StrainField {
        let per_face: Vec<f64> = self.per_face.iter().flat_map(|&x| [x, x, x]).collect();
        let per_sequence = self
            .per_sequence
            .iter()
            .map(|s| SequenceMeans {
                name: s.name.clone(),
                frames: s.frames,
                means: s.means.iter().flat_map(|&x| [x, x, x]).collect(),
            })
            .collect();
        StrainField {
            per_face,
            per_sequence,
            material: self.material,
            variant: self.variant,
        }
    }
}

/// Evaluates the field over every frame of every sequence.
pub fn compute_strain_field(
    mesh: &GarmentMesh,
    motions: &MotionSet,
    material: &MaterialParams,
    variant: EnergyVariant,
) -> Result<StrainField> {
    motions.check_mesh(mesh)?;
    let inverses: Vec<Matrix2<f64>> = (0..mesh.face_count())
        .map(|f| rest_inverse(&mesh.face_pattern(f)).map_err(|_| Error::DegenerateFace(f)))
        .collect::<Result<_>>()?;
    let faces = mesh.faces();

    let per_sequence: Vec<SequenceMeans> = motions
        .sequences()
        .iter()
        .map(|seq| {
            let k = seq.frames.len();
            let means: Vec<f64> = (0..faces.len())
                .into_par_iter()
                .map(|fi| {
                    let f = faces[fi];
                    let values: Vec<f64> = seq
                        .frames
                        .iter()
                        .map(|frame| {
                            let def = [frame[f[0]], frame[f[1]], frame[f[2]]];
                            let grad = gradient_with_inverse(&inverses[fi], &def);
                            svk_density(&green_strain(&grad), material, variant)
                        })
                        .collect();
                    pairwise_sum(&values) / k as f64
                })
                .collect();
            SequenceMeans {
                name: seq.name.clone(),
                frames: k,
                means,
            }
        })
        .collect();

    let mut per_face = vec![0.0f64; faces.len()];
    for s in &per_sequence {
        for (acc, &x) in per_face.iter_mut().zip(&s.means) {
            *acc = acc.max(x);
        }
    }
    Ok(StrainField {
        per_face,
        per_sequence,
        material: *material,
        variant,
    })
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Rotation3, Vector3};

    // Frozen from direct evaluation of the Lamé formulas in f64.
    const MU: f64 = 2030075.1879699246;
    const LAMBDA: f64 = 3940734.188412207;

    fn unit_rest() -> [Point2<f64>; 3] {
        [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ]
    }

    fn embed(rest: &[Point2<f64>; 3]) -> [Point3<f64>; 3] {
        rest.map(|p| Point3::new(p.x, p.y, 0.0))
    }

    #[test]
    fn lame_constants() {
        let m = MaterialParams::default();
        assert_relative_eq!(m.mu(), MU, max_relative = 1e-12);
        assert_relative_eq!(m.lambda(), LAMBDA, max_relative = 1e-12);
        assert!(MaterialParams::new(-1.0, 0.3).is_err());
        assert!(MaterialParams::new(1.0, 0.5).is_err());
        assert!(MaterialParams::new(1.0, -0.1).is_err());
    }

    #[test]
    fn identity_gradient() {
        let rest = unit_rest();
        let f = deformation_gradient(&rest, &embed(&rest)).unwrap();
        assert_relative_eq!(f, Matrix3x2::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0));
        assert_relative_eq!(green_strain(&f), Matrix2::zeros());
    }

    #[test]
    fn scaled_gradient() {
        let rest = unit_rest();
        let def = rest.map(|p| Point3::new(2.0 * p.x, 2.0 * p.y, 0.0));
        let f = deformation_gradient(&rest, &def).unwrap();
        assert_relative_eq!(f, Matrix3x2::new(2.0, 0.0, 0.0, 2.0, 0.0, 0.0));
    }

    #[test]
    fn uniaxial_stretch() {
        let rest = unit_rest();
        let def = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.1, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let f = deformation_gradient(&rest, &def).unwrap();
        assert_relative_eq!(f, Matrix3x2::new(1.1, 0.0, 0.0, 1.0, 0.0, 0.0), epsilon = 1e-15);
        let g = green_strain(&f);
        assert_relative_eq!(g, Matrix2::new(0.105, 0.0, 0.0, 0.0), epsilon = 1e-15);
        let m = MaterialParams::default();
        let lin = svk_density(&g, &m, EnergyVariant::Linear);
        assert_relative_eq!(lin, 0.105 * (MU + 0.5 * LAMBDA), max_relative = 1e-12);
        assert_relative_eq!(lin, 420046.4396284829, max_relative = 1e-9);
        let quad = svk_density(&g, &m, EnergyVariant::Quadratic);
        assert_relative_eq!(quad, 0.105 * 0.105 * (MU + 0.5 * LAMBDA), max_relative = 1e-12);
    }

    #[test]
    fn rotation_has_no_strain() {
        let rest = unit_rest();
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), 30f64.to_radians());
        let def = embed(&rest).map(|p| rot * p);
        let g = green_strain(&deformation_gradient(&rest, &def).unwrap());
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn compression_clamps_linear_variant() {
        let m = MaterialParams::default();
        // Equibiaxial compression: negative trace dominates the norm term.
        let g = Matrix2::new(-0.1, 0.0, 0.0, -0.1);
        assert_eq!(svk_density(&g, &m, EnergyVariant::Linear), 0.0);
        assert!(svk_density(&g, &m, EnergyVariant::Quadratic) > 0.0);
        assert_eq!(svk_density(&Matrix2::zeros(), &m, EnergyVariant::Linear), 0.0);
        assert_eq!(svk_density(&Matrix2::zeros(), &m, EnergyVariant::Quadratic), 0.0);
    }

    #[test]
    fn degenerate_rest_is_rejected() {
        let rest = [Point2::origin(), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)];
        assert!(matches!(
            deformation_gradient(&rest, &embed(&rest)),
            Err(Error::DegenerateFace(_))
        ));
    }

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i: i32| f64::from(i).sin()).collect();
        assert_relative_eq!(pairwise_sum(&v), v.iter().sum::<f64>(), epsilon = 1e-12);
    }

    #[test]
    fn variant_names() {
        assert_eq!("paper-literal".parse::<EnergyVariant>().unwrap(), EnergyVariant::Linear);
        assert_eq!(
            serde_json::to_string(&EnergyVariant::Quadratic).unwrap(),
            "\"svk-quadratic\""
        );
    }
}

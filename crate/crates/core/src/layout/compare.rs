use serde::{Deserialize, Serialize};

use super::{evaluate, LayoutMetrics, WireLayout};
use crate::error::Result;
use crate::mesh::GarmentMesh;
use crate::motion::MotionSet;
use crate::strain::StrainField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub deformation_energy: f64,
    pub max_elongation_rate: f64,
    pub avg_elongation_rate: f64,
    pub total_length: f64,
    /// Energy change against the first row, percent.
    pub energy_vs_first: f64,
    pub length_vs_first: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub metrics: Vec<LayoutMetrics>,
}

fn pct(x: f64, base: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        100.0 * (x - base) / base
    }
}

impl ComparisonReport {
    pub fn from_metrics(labels: &[String], metrics: Vec<LayoutMetrics>) -> ComparisonReport {
        let base = metrics.first().cloned();
        let rows = labels
            .iter()
            .zip(&metrics)
            .map(|(label, m)| {
                let (be, bl) = base
                    .as_ref()
                    .map_or((0.0, 0.0), |b| (b.deformation_energy, b.total_length));
                ComparisonRow {
                    label: label.clone(),
                    deformation_energy: m.deformation_energy,
                    max_elongation_rate: m.max_elongation_rate,
                    avg_elongation_rate: m.avg_elongation_rate,
                    total_length: m.total_length,
                    energy_vs_first: pct(m.deformation_energy, be),
                    length_vs_first: pct(m.total_length, bl),
                }
            })
            .collect();
        ComparisonReport { rows, metrics }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "label,deformation_energy,max_elongation_pct,avg_elongation_pct,total_length_m,energy_vs_first_pct,length_vs_first_pct\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.label.replace(',', ";"),
                r.deformation_energy,
                r.max_elongation_rate,
                r.avg_elongation_rate,
                r.total_length,
                r.energy_vs_first,
                r.length_vs_first
            ));
        }
        s
    }
}

/// Evaluates each labelled layout under the same field, motions and η.
pub fn compare_layouts(
    layouts: &[(String, &WireLayout)],
    mesh: &GarmentMesh,
    field: &StrainField,
    motions: &MotionSet,
    eta: f64,
) -> Result<ComparisonReport> {
    let metrics = layouts
        .iter()
        .map(|(_, l)| evaluate(l, mesh, field, motions, eta))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = layouts.iter().map(|(l, _)| l.clone()).collect();
    Ok(ComparisonReport::from_metrics(&labels, metrics))
}

//! Report documents. Field order is the serialization order, so JSON output
//! is stable; class indices are 1-based.

use std::fmt::Write as _;

use funcorr_core::{CoefficientProfile, CoefficientReport, ConfusionMatrix, Outcome, Verdict};
use serde::{Deserialize, Serialize};

use crate::io::NamedMatrix;

/// Rounds to `digits` decimals; negative zero becomes zero.
pub fn round(x: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_all(xs: &[f64], digits: u32) -> Vec<f64> {
    xs.iter().map(|&x| round(x, digits)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixInfo {
    pub name: String,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub cells: Vec<Vec<f64>>,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
    pub mass_deficit: f64,
    pub dropped_rows: Vec<usize>,
    pub dropped_cols: Vec<usize>,
}

impl MatrixInfo {
    pub fn new(input: &NamedMatrix, digits: u32) -> Self {
        let m: &ConfusionMatrix = &input.matrix;
        let (dropped_rows, dropped_cols) = match m.collapse_null_classes() {
            Ok((_, map)) => (
                map.dropped_rows.iter().map(|i| i + 1).collect(),
                map.dropped_cols.iter().map(|j| j + 1).collect(),
            ),
            Err(_) => (Vec::new(), Vec::new()),
        };
        Self {
            name: input.name.clone(),
            d: m.dim(),
            labels: input.labels.clone(),
            cells: m.rows().map(|r| round_all(r, digits)).collect(),
            row_marginals: round_all(m.row_marginals(), digits),
            col_marginals: round_all(m.col_marginals(), digits),
            mass_deficit: round(m.mass_deficit(), digits),
            dropped_rows,
            dropped_cols,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub value: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub route: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

impl CoefficientEntry {
    pub fn new(r: &CoefficientReport, digits: u32) -> Self {
        Self {
            value: round(r.value, digits),
            f: round_all(&r.f_opt, digits),
            g: round_all(&r.g_opt, digits),
            route: r.route.as_str().to_string(),
            permutation: r.permutation.as_ref().map(|p| p.iter().map(|i| i + 1).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(rename = "II")]
    pub ii: CoefficientEntry,
    #[serde(rename = "ID")]
    pub id: CoefficientEntry,
    #[serde(rename = "MON")]
    pub mon: CoefficientEntry,
    #[serde(rename = "CO")]
    pub co: CoefficientEntry,
    #[serde(rename = "ANTI")]
    pub anti: CoefficientEntry,
    #[serde(rename = "COANTI")]
    pub coanti: CoefficientEntry,
    #[serde(rename = "SUP")]
    pub sup: CoefficientEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaValues {
    pub indicator: f64,
    pub linear: f64,
    pub quadratic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub restarts: usize,
    pub digits: u32,
    pub mass_deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub matrix: MatrixInfo,
    pub coefficients: Coefficients,
    pub kappa: KappaValues,
    pub meta: Meta,
}

impl ProfileReport {
    pub fn new(input: &NamedMatrix, p: &CoefficientProfile, seed: u64, restarts: usize, digits: u32) -> Self {
        let e = |r| CoefficientEntry::new(r, digits);
        Self {
            matrix: MatrixInfo::new(input, digits),
            coefficients: Coefficients {
                ii: e(&p.ii),
                id: e(&p.id),
                mon: e(&p.mon),
                co: e(&p.co),
                anti: e(&p.anti),
                coanti: e(&p.coanti),
                sup: e(&p.sup),
            },
            kappa: KappaValues {
                indicator: round(p.kappa.indicator, digits),
                linear: round(p.kappa.linear, digits),
                quadratic: round(p.kappa.quadratic, digits),
            },
            meta: Meta { seed, restarts, digits, mass_deficit: round(p.mass_deficit, digits) },
        }
    }

    pub fn entries(&self) -> [(&'static str, &CoefficientEntry); 7] {
        let c = &self.coefficients;
        [("II", &c.ii), ("ID", &c.id), ("MON", &c.mon), ("CO", &c.co), ("ANTI", &c.anti), ("COANTI", &c.coanti), ("SUP", &c.sup)]
    }

    pub fn table(&self) -> String {
        let d = self.meta.digits as usize;
        let mut out = String::new();
        let _ = writeln!(out, "{}  d={}  mass deficit {:.*}", self.matrix.name, self.matrix.d, d, self.matrix.mass_deficit);
        let _ = writeln!(out, "{:<8} {:>w$}  route", "class", "value", w = d + 3);
        for (name, e) in self.entries() {
            let _ = writeln!(out, "{:<8} {:>w$.*}  {}", name, d, e.value, e.route, w = d + 3);
        }
        let k = &self.kappa;
        let _ = writeln!(
            out,
            "kappa    indicator {:.*}  linear {:.*}  quadratic {:.*}",
            d, k.indicator, d, k.linear, d, k.quadratic
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    pub step: String,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareMeta {
    pub seed: u64,
    pub restarts: usize,
    pub digits: u32,
    pub mass_deficit: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub first: String,
    pub second: String,
    pub outcome: String,
    pub deciding_step: Option<String>,
    pub epsilon: f64,
    pub order: Vec<String>,
    pub steps: Vec<StepEntry>,
    pub meta: CompareMeta,
}

impl CompareReport {
    pub fn new(
        a: &NamedMatrix,
        b: &NamedMatrix,
        v: &Verdict,
        order: &[funcorr_core::Step],
        seed: u64,
        restarts: usize,
        digits: u32,
    ) -> Self {
        Self {
            first: a.name.clone(),
            second: b.name.clone(),
            outcome: v.outcome.as_str().to_string(),
            deciding_step: v.deciding_step.map(|s| s.name().to_string()),
            epsilon: v.epsilon,
            order: order.iter().map(|s| s.name().to_string()).collect(),
            steps: order
                .iter()
                .map(|&s| StepEntry {
                    step: s.name().to_string(),
                    first: round(v.values.0.get(s), digits),
                    second: round(v.values.1.get(s), digits),
                })
                .collect(),
            meta: CompareMeta {
                seed,
                restarts,
                digits,
                mass_deficit: [round(a.matrix.mass_deficit(), digits), round(b.matrix.mass_deficit(), digits)],
            },
        }
    }

    pub fn table(&self) -> String {
        let d = self.meta.digits as usize;
        let mut out = String::new();
        let w = self.first.len().max(self.second.len()).max(d + 3);
        let _ = writeln!(out, "{:<6} {:>w$} {:>w$}", "step", self.first, self.second);
        for s in &self.steps {
            let _ = writeln!(out, "{:<6} {:>w$.*} {:>w$.*}", s.step, d, s.first, d, s.second);
        }
        let verdict = match self.outcome.as_str() {
            o if o == Outcome::FirstInferior.as_str() => format!("{} is inferior to {}", self.first, self.second),
            o if o == Outcome::FirstSuperior.as_str() => format!("{} is superior to {}", self.first, self.second),
            _ => format!("{} and {} are incomparable", self.first, self.second),
        };
        let step = self.deciding_step.as_deref().map_or(String::new(), |s| format!(" (decided at {s})"));
        let _ = writeln!(out, "{verdict}{step}; epsilon {}", self.epsilon);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McComponent {
    pub class: String,
    pub estimate: f64,
    pub accepted: u64,
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub matrix: String,
    pub class: String,
    pub samples: u64,
    pub seed: u64,
    pub estimate: f64,
    pub exact: f64,
    pub gap: f64,
    pub within_bound: bool,
    pub components: Vec<McComponent>,
}

impl McReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}  class {}  samples {}  seed {}", self.matrix, self.class, self.samples, self.seed);
        for c in &self.components {
            let rate = c.accepted as f64 / c.draws.max(1) as f64;
            let _ = writeln!(out, "  {:<6} estimate {}  accepted {}  draws {}  rate {:.3e}", c.class, c.estimate, c.accepted, c.draws, rate);
        }
        let _ = writeln!(out, "estimate {}  exact {}  gap {}  {}", self.estimate, self.exact, self.gap, if self.within_bound { "ok" } else { "EXCEEDS EXACT" });
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEntry {
    pub scheme: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub matrix: String,
    pub d: usize,
    pub mass_deficit: f64,
    pub kappa: Vec<KappaEntry>,
}

impl KappaReport {
    pub fn table(&self, digits: u32) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}  d={}", self.matrix, self.d);
        for k in &self.kappa {
            let _ = writeln!(out, "{:<10} {:.*}", k.scheme, digits as usize, k.value);
        }
        out
    }
}

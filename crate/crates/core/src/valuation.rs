//! Category scores, the correlation functional and class membership.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::ConfusionMatrix;

/// Weighted variances at or below this value make a valuation degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// A vector of finite category scores (`f_i` for rows, `g_j` for columns).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Valuation(Vec<f64>);

impl Valuation {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteValuation(i));
        }
        Ok(Self(scores))
    }

    pub(crate) fn from_vec_unchecked(scores: Vec<f64>) -> Self {
        debug_assert!(scores.iter().all(|s| s.is_finite()));
        Self(scores)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }
}

impl Deref for Valuation {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Valuation {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

/// The feasible sets over which the correlation is maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValuationClass {
    Sup,
    Ii,
    Id,
    Mon,
    Co,
    Anti,
    Coanti,
}

impl ValuationClass {
    pub const ALL: [ValuationClass; 7] = [
        ValuationClass::Ii,
        ValuationClass::Id,
        ValuationClass::Mon,
        ValuationClass::Co,
        ValuationClass::Anti,
        ValuationClass::Coanti,
        ValuationClass::Sup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValuationClass::Sup => "SUP",
            ValuationClass::Ii => "II",
            ValuationClass::Id => "ID",
            ValuationClass::Mon => "MON",
            ValuationClass::Co => "CO",
            ValuationClass::Anti => "ANTI",
            ValuationClass::Coanti => "COANTI",
        }
    }
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ValuationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ValuationClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or(Error::InvalidOptions("unknown valuation class, expected one of SUP, II, ID, MON, CO, ANTI, COANTI"))
    }
}

pub(crate) fn weighted_moments(x: &[f64], w: &[f64]) -> (f64, f64) {
    let mean: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
    let var: f64 = x.iter().zip(w).map(|(a, b)| (a - mean) * (a - mean) * b).sum();
    (mean, var)
}

/// Affinely maps `f` to weighted mean 0 and weighted second moment 1.
pub fn standardize(f: &Valuation, weights: &[f64]) -> Result<Valuation> {
    if f.len() != weights.len() {
        return Err(Error::LengthMismatch(f.len(), weights.len()));
    }
    let (mean, var) = weighted_moments(f, weights);
    if !(var > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateValuation(var));
    }
    let scale = libm::sqrt(var);
    Ok(Valuation(f.iter().map(|x| (x - mean) / scale).collect()))
}

/// Pearson correlation of `f(X)` and `g(Y)` under the joint law `M`.
pub fn correlation(m: &ConfusionMatrix, f: &Valuation, g: &Valuation) -> Result<f64> {
    let d = m.dim();
    if f.len() != d {
        return Err(Error::LengthMismatch(f.len(), d));
    }
    if g.len() != d {
        return Err(Error::LengthMismatch(g.len(), d));
    }
    let (row, col) = m.marginals();
    let (mf, vf) = weighted_moments(f, row);
    let (mg, vg) = weighted_moments(g, col);
    if !(vf > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateValuation(vf));
    }
    if !(vg > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateValuation(vg));
    }
    let mut cov = 0.0;
    for (i, fi) in f.iter().enumerate() {
        for (j, gj) in g.iter().enumerate() {
            cov += (fi - mf) * m.cell(i, j) * (gj - mg);
        }
    }
    Ok((cov / (libm::sqrt(vf) * libm::sqrt(vg))).clamp(-1.0, 1.0))
}

/// A pair standardized against the row and column marginals of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedPair {
    pub f: Valuation,
    pub g: Valuation,
}

impl StandardizedPair {
    pub fn new(m: &ConfusionMatrix, f: &Valuation, g: &Valuation) -> Result<Self> {
        Ok(Self { f: standardize(f, m.row_marginals())?, g: standardize(g, m.col_marginals())? })
    }

    /// `Σ_ij f_i p_ij g_j`, the correlation for standardized scores.
    pub fn correlation(&self, m: &ConfusionMatrix) -> f64 {
        let mut s = 0.0;
        for (i, fi) in self.f.iter().enumerate() {
            for (j, gj) in self.g.iter().enumerate() {
                s += fi * m.cell(i, j) * gj;
            }
        }
        s
    }
}

pub(crate) fn is_nondecreasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] <= w[1])
}

pub(crate) fn is_nonincreasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] >= w[1])
}

pub(crate) fn is_comonotone(f: &[f64], g: &[f64]) -> bool {
    (0..f.len()).all(|i| (i + 1..f.len()).all(|j| (f[i] - f[j]) * (g[i] - g[j]) >= 0.0))
}

pub(crate) fn is_antimonotone(f: &[f64], g: &[f64]) -> bool {
    (0..f.len()).all(|i| (i + 1..f.len()).all(|j| (f[i] - f[j]) * (g[i] - g[j]) <= 0.0))
}

pub(crate) fn class_contains(f: &[f64], g: &[f64], class: ValuationClass) -> bool {
    match class {
        ValuationClass::Sup => true,
        ValuationClass::Ii => is_nondecreasing(f) && is_nondecreasing(g),
        ValuationClass::Id => is_nondecreasing(f) && is_nonincreasing(g),
        ValuationClass::Mon => {
            class_contains(f, g, ValuationClass::Ii) || class_contains(f, g, ValuationClass::Id)
        }
        ValuationClass::Co => is_comonotone(f, g),
        ValuationClass::Anti => is_antimonotone(f, g),
        ValuationClass::Coanti => is_comonotone(f, g) || is_antimonotone(f, g),
    }
}

/// Exact sign test of class membership, no tolerance.
pub fn pair_class_check(f: &[f64], g: &[f64], class: ValuationClass) -> Result<bool> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch(f.len(), g.len()));
    }
    Ok(class_contains(f, g, class))
}

//! Weighted kappa with the usual disagreement weight schemes.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::ConfusionMatrix;

/// Nonnegative `d × d` disagreement weights `w_ij`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    d: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(d: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != d * d {
            return Err(Error::LengthMismatch(w.len(), d * d));
        }
        for (k, &value) in w.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidWeight { row: k / d, col: k % d, value });
            }
        }
        Ok(Self { d, w })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.d + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    /// `[i != j]`
    Indicator,
    /// `|i - j|`
    Linear,
    /// `(i - j)^2`
    Quadratic,
    /// `(f_i - g_j)^2` for category scores `f`, `g`.
    Scores { f: Vec<f64>, g: Vec<f64> },
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Indicator => "indicator",
            WeightScheme::Linear => "linear",
            WeightScheme::Quadratic => "quadratic",
            WeightScheme::Scores { .. } => "scores",
        }
    }
}

pub fn weight_scheme(scheme: &WeightScheme, d: usize) -> Result<WeightMatrix> {
    if d < 2 {
        return Err(Error::TooFewClasses(d));
    }
    let w = match scheme {
        WeightScheme::Indicator => grid(d, |i, j| if i == j { 0.0 } else { 1.0 }),
        WeightScheme::Linear => grid(d, |i, j| i.abs_diff(j) as f64),
        WeightScheme::Quadratic => grid(d, |i, j| {
            let k = i.abs_diff(j) as f64;
            k * k
        }),
        WeightScheme::Scores { f, g } => {
            if f.len() != d {
                return Err(Error::LengthMismatch(f.len(), d));
            }
            if g.len() != d {
                return Err(Error::LengthMismatch(g.len(), d));
            }
            grid(d, |i, j| (f[i] - g[j]) * (f[i] - g[j]))
        }
    };
    WeightMatrix::new(d, w)
}

fn grid(d: usize, w: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..d * d).map(|k| w(k / d, k % d)).collect()
}

/// `1 - Σ w_ij p_ij / Σ w_ij p_i• p_•j`
pub fn weighted_kappa(m: &ConfusionMatrix, w: &WeightMatrix) -> Result<f64> {
    let d = m.dim();
    if w.dim() != d {
        return Err(Error::LengthMismatch(w.dim(), d));
    }
    let (row, col) = m.marginals();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for i in 0..d {
        for j in 0..d {
            observed += w.get(i, j) * m.cell(i, j);
            expected += w.get(i, j) * row[i] * col[j];
        }
    }
    if !(expected > 1e-12) {
        return Err(Error::ZeroExpectedDisagreement);
    }
    Ok(1.0 - observed / expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn built_in_schemes() {
        let q = weight_scheme(&WeightScheme::Quadratic, 3).unwrap();
        assert_eq!(q.as_slice(), &[0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0]);
        let ind = weight_scheme(&WeightScheme::Indicator, 2).unwrap();
        assert_eq!(ind.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        let lin = weight_scheme(&WeightScheme::Linear, 3).unwrap();
        assert_eq!(lin.as_slice(), &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0]);
        let ranks: Vec<f64> = (1..=4).map(|i| i as f64).collect();
        let s = weight_scheme(&WeightScheme::Scores { f: ranks.clone(), g: ranks }, 4).unwrap();
        assert_eq!(s, weight_scheme(&WeightScheme::Quadratic, 4).unwrap());
        assert_eq!(weight_scheme(&WeightScheme::Scores { f: vec![1.0], g: vec![1.0, 2.0] }, 2), Err(Error::LengthMismatch(1, 2)));
    }

    #[test]
    fn kappa_anchors() {
        let diag = ConfusionMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let prod = ConfusionMatrix::product(&[0.2, 0.5, 0.3], &[0.1, 0.1, 0.8]).unwrap();
        for scheme in [WeightScheme::Indicator, WeightScheme::Linear, WeightScheme::Quadratic] {
            let w = weight_scheme(&scheme, 3).unwrap();
            assert!((weighted_kappa(&diag, &w).unwrap() - 1.0).abs() < 1e-12);
            assert!(weighted_kappa(&prod, &w).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn cohen_kappa_by_hand() {
        let m = ConfusionMatrix::from_rows(&[[0.4, 0.1], [0.1, 0.4]]).unwrap();
        let w = weight_scheme(&WeightScheme::Indicator, 2).unwrap();
        // 1 - 0.2 / 0.5
        assert!((weighted_kappa(&m, &w).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn zero_expected_disagreement() {
        let m = ConfusionMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let w = weight_scheme(&WeightScheme::Indicator, 2).unwrap();
        assert_eq!(weighted_kappa(&m, &w), Err(Error::ZeroExpectedDisagreement));
        assert!(matches!(WeightMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0]), Err(Error::InvalidWeight { row: 0, col: 1, .. })));
    }
}

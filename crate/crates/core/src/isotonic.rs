//! Weighted isotonic regression by pool-adjacent-violators.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// Weighted least-squares nondecreasing fit.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicFit {
    pub fitted: Vec<f64>,
    /// Index ranges pooled to a common value, left to right.
    pub blocks: Vec<Range<usize>>,
}

#[derive(Debug, Clone, Copy)]
struct Block {
    start: usize,
    weight: f64,
    weighted_sum: f64,
    mean: f64,
}

/// Reusable stack for the solver's inner loop.
#[derive(Debug, Default, Clone)]
pub(crate) struct PavaWorkspace {
    stack: Vec<Block>,
}

impl PavaWorkspace {
    /// Writes the nondecreasing fit of `y` into `out`. Weights must be positive.
    pub(crate) fn fit_into(&mut self, y: &[f64], w: &[f64], out: &mut [f64]) {
        self.sweep(y, w);
        let n = y.len();
        for (k, b) in self.stack.iter().enumerate() {
            let end = self.stack.get(k + 1).map_or(n, |next| next.start);
            out[b.start..end].iter_mut().for_each(|o| *o = b.mean);
        }
    }

    fn sweep(&mut self, y: &[f64], w: &[f64]) {
        self.stack.clear();
        for (i, (&yi, &wi)) in y.iter().zip(w).enumerate() {
            let mut cur = Block { start: i, weight: wi, weighted_sum: wi * yi, mean: yi };
            while let Some(prev) = self.stack.last() {
                if prev.mean <= cur.mean {
                    break;
                }
                let weight = prev.weight + cur.weight;
                let weighted_sum = prev.weighted_sum + cur.weighted_sum;
                cur = Block { start: prev.start, weight, weighted_sum, mean: weighted_sum / weight };
                self.stack.pop();
            }
            self.stack.push(cur);
        }
    }

    fn blocks(&self, n: usize) -> Vec<Range<usize>> {
        self.stack
            .iter()
            .enumerate()
            .map(|(k, b)| b.start..self.stack.get(k + 1).map_or(n, |next| next.start))
            .collect()
    }
}

fn check(y: &[f64], w: &[f64]) -> Result<()> {
    if y.len() != w.len() {
        return Err(Error::LengthMismatch(y.len(), w.len()));
    }
    if let Some(index) = w.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositiveWeight { index, value: w[index] });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValuation(i));
    }
    Ok(())
}

/// Minimizes `Σ w_i (y_i - x_i)^2` over nondecreasing `x`.
pub fn pava(y: &[f64], w: &[f64]) -> Result<IsotonicFit> {
    check(y, w)?;
    let mut ws = PavaWorkspace::default();
    let mut fitted = alloc::vec![0.0; y.len()];
    ws.fit_into(y, w, &mut fitted);
    Ok(IsotonicFit { fitted, blocks: ws.blocks(y.len()) })
}

/// Nonincreasing fit, computed as the negated fit of `-y`.
pub fn pava_decreasing(y: &[f64], w: &[f64]) -> Result<IsotonicFit> {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    let mut fit = pava(&neg, w)?;
    fit.fitted.iter_mut().for_each(|v| *v = -*v);
    Ok(fit)
}

//! Rejection-sampling lower bounds for the coefficients.
//!
//! Score pairs with independent standard Gaussian coordinates are drawn,
//! kept when they lie in the requested class, standardized, and scored. The
//! maximum over kept pairs never exceeds the exact coefficient.
//!
//! Draws are split into [`CHUNKS`] fixed chunks; chunk `k` uses ChaCha8
//! stream `k` of the seed. Per-chunk quotas depend only on the requested
//! totals, so results are identical with or without the `parallel` feature
//! and the estimate is nondecreasing in `accepted_samples`.

use alloc::vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::ConfusionMatrix;
use crate::par;
use crate::valuation::{class_contains, is_nondecreasing, weighted_moments, ValuationClass};

pub const CHUNKS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McOptions {
    /// Number of in-class pairs to score.
    pub accepted_samples: u64,
    pub seed: u64,
    /// Cap on drawn pairs, accepted or not.
    pub max_draws: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { accepted_samples: 1_000_000, seed: 0x5eed, max_draws: 1_000_000_000 }
    }
}

impl McOptions {
    pub fn validate(&self) -> Result<()> {
        if self.accepted_samples == 0 {
            return Err(Error::InvalidOptions("accepted_samples must be at least 1"));
        }
        if self.max_draws < self.accepted_samples {
            return Err(Error::InvalidOptions("max_draws must be at least accepted_samples"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub class: ValuationClass,
    pub value: f64,
    pub accepted: u64,
    pub draws: u64,
}

impl McEstimate {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.draws as f64
    }
}

fn quota(total: u64, k: u64) -> u64 {
    total / CHUNKS + u64::from(k < total % CHUNKS)
}

struct Chunk {
    best: f64,
    accepted: u64,
    draws: u64,
}

/// Largest correlation over sampled pairs of `class`. MON and COANTI are not
/// sampled directly; take the maximum of their component estimates.
pub fn mc_estimate(m: &ConfusionMatrix, class: ValuationClass, opts: &McOptions) -> Result<McEstimate> {
    opts.validate()?;
    if matches!(class, ValuationClass::Mon | ValuationClass::Coanti) {
        return Err(Error::UnsupportedClass(class));
    }
    m.collapse_null_classes()?;
    let d = m.dim();
    let (r, c) = m.marginals();
    // For these classes row scores alone must be nondecreasing, so the column
    // draw is skipped when the row draw already fails.
    let rows_sorted = matches!(class, ValuationClass::Ii | ValuationClass::Id);

    let chunks = par::map_indexed(CHUNKS as usize, |k| {
        let k = k as u64;
        let (target, cap) = (quota(opts.accepted_samples, k), quota(opts.max_draws, k));
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k);
        let mut f = vec![0.0; d];
        let mut g = vec![0.0; d];
        let mut out = Chunk { best: f64::NEG_INFINITY, accepted: 0, draws: 0 };
        while out.accepted < target && out.draws < cap {
            out.draws += 1;
            f.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
            if rows_sorted && !is_nondecreasing(&f) {
                continue;
            }
            g.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
            // Membership is invariant under the positive affine standardization.
            if !class_contains(&f, &g, class) {
                continue;
            }
            let (fm, fv) = weighted_moments(&f, r);
            let (gm, gv) = weighted_moments(&g, c);
            if !(fv > 0.0 && gv > 0.0) {
                continue;
            }
            let (fs, gs) = (libm::sqrt(fv), libm::sqrt(gv));
            let mut value = 0.0;
            for i in 0..d {
                let fi = (f[i] - fm) / fs;
                for j in 0..d {
                    value += fi * m.cell(i, j) * (g[j] - gm) / gs;
                }
            }
            out.accepted += 1;
            out.best = out.best.max(value);
        }
        out
    });

    let accepted: u64 = chunks.iter().map(|c| c.accepted).sum();
    let draws: u64 = chunks.iter().map(|c| c.draws).sum();
    if accepted < opts.accepted_samples {
        return Err(Error::DrawLimit {
            accepted,
            draws,
            target: opts.accepted_samples,
            rate: accepted as f64 / draws.max(1) as f64,
        });
    }
    let value = chunks.iter().map(|c| c.best).fold(f64::NEG_INFINITY, f64::max).clamp(-1.0, 1.0);
    Ok(McEstimate { class, value, accepted, draws })
}

//! All seven coefficients for one matrix.
//!
//! A pair is comonotone iff both scores are nondecreasing functions of one
//! common relabeling of the classes, so CO is the largest II over joint
//! relabelings of rows and columns, and ANTI the largest ID. Relabelings are
//! enumerated exhaustively up to [`SolverOptions::exhaustive_max_classes`]
//! and searched by swap local search above it.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::kappa::{weight_scheme, weighted_kappa, WeightScheme};
use crate::matrix::{ClassMap, ConfusionMatrix};
use crate::par;
use crate::solver::{optimize_monotone, sup_correlation, CoefficientReport, Direction, Route, SolverOptions};
use crate::valuation::{Valuation, ValuationClass};

/// Tolerance of the feasible-set chain checks.
const CHAIN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaSummary {
    pub indicator: f64,
    pub linear: f64,
    pub quadratic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    pub dim: usize,
    pub mass_deficit: f64,
    pub class_map: ClassMap,
    pub ii: CoefficientReport,
    pub id: CoefficientReport,
    pub mon: CoefficientReport,
    pub co: CoefficientReport,
    pub anti: CoefficientReport,
    pub coanti: CoefficientReport,
    pub sup: CoefficientReport,
    pub kappa: KappaSummary,
}

impl CoefficientProfile {
    pub fn get(&self, class: ValuationClass) -> &CoefficientReport {
        match class {
            ValuationClass::Sup => &self.sup,
            ValuationClass::Ii => &self.ii,
            ValuationClass::Id => &self.id,
            ValuationClass::Mon => &self.mon,
            ValuationClass::Co => &self.co,
            ValuationClass::Anti => &self.anti,
            ValuationClass::Coanti => &self.coanti,
        }
    }

    /// Reports in [`ValuationClass::ALL`] order.
    pub fn reports(&self) -> impl Iterator<Item = &CoefficientReport> + '_ {
        ValuationClass::ALL.iter().map(move |&c| self.get(c))
    }

    /// Checks the feasible-set chain and the MON/COANTI identities.
    pub fn check_invariants(&self) -> Result<()> {
        let v = |c| self.get(c).value;
        use ValuationClass::*;
        let le = |a: ValuationClass, b: ValuationClass| -> Result<()> {
            if v(a) <= v(b) + CHAIN_TOLERANCE {
                Ok(())
            } else {
                Err(Error::InvariantViolation(format!("{a} = {} exceeds {b} = {}", v(a), v(b))))
            }
        };
        le(Ii, Co)?;
        le(Co, Sup)?;
        le(Id, Anti)?;
        le(Anti, Sup)?;
        le(Coanti, Sup)?;
        if v(Mon).abs() > v(Coanti) + CHAIN_TOLERANCE {
            return Err(Error::InvariantViolation(format!("|MON| = {} exceeds COANTI = {}", v(Mon).abs(), v(Coanti))));
        }
        if v(Mon) != v(Ii).max(v(Id)) {
            return Err(Error::InvariantViolation(format!("MON = {} is not max(II, ID)", v(Mon))));
        }
        if v(Coanti) != v(Co).max(v(Anti)) {
            return Err(Error::InvariantViolation(format!("COANTI = {} is not max(CO, ANTI)", v(Coanti))));
        }
        Ok(())
    }
}

/// Largest II over joint relabelings.
pub fn co_correlation(m: &ConfusionMatrix, opts: &SolverOptions) -> Result<CoefficientReport> {
    relabeled_max(m, Direction::Increasing, opts)
}

/// Largest ID over joint relabelings.
pub fn anti_correlation(m: &ConfusionMatrix, opts: &SolverOptions) -> Result<CoefficientReport> {
    relabeled_max(m, Direction::Decreasing, opts)
}

/// `max(II, ID)`; II wins ties.
pub fn mon_correlation(m: &ConfusionMatrix, opts: &SolverOptions) -> Result<CoefficientReport> {
    let ii = optimize_monotone(m, Direction::Increasing, opts)?;
    let id = optimize_monotone(m, Direction::Decreasing, opts)?;
    Ok(larger(ii, id, ValuationClass::Mon))
}

/// `max(CO, ANTI)`; CO wins ties.
pub fn coanti_correlation(m: &ConfusionMatrix, opts: &SolverOptions) -> Result<CoefficientReport> {
    let co = co_correlation(m, opts)?;
    let anti = anti_correlation(m, opts)?;
    Ok(larger(co, anti, ValuationClass::Coanti))
}

fn larger(first: CoefficientReport, second: CoefficientReport, class: ValuationClass) -> CoefficientReport {
    let mut winner = if second.value > first.value { second } else { first };
    winner.class = class;
    winner
}

/// Every coefficient and the built-in kappa variants, with invariants checked.
pub fn full_profile(m: &ConfusionMatrix, opts: &SolverOptions) -> Result<CoefficientProfile> {
    opts.validate()?;
    let (_, class_map) = m.collapse_null_classes()?;
    let ii = optimize_monotone(m, Direction::Increasing, opts)?;
    let id = optimize_monotone(m, Direction::Decreasing, opts)?;
    let co = co_correlation(m, opts)?;
    let anti = anti_correlation(m, opts)?;
    let sup = sup_correlation(m)?;
    let mon = larger(ii.clone(), id.clone(), ValuationClass::Mon);
    let coanti = larger(co.clone(), anti.clone(), ValuationClass::Coanti);
    let d = m.dim();
    let kappa = KappaSummary {
        indicator: weighted_kappa(m, &weight_scheme(&WeightScheme::Indicator, d)?)?,
        linear: weighted_kappa(m, &weight_scheme(&WeightScheme::Linear, d)?)?,
        quadratic: weighted_kappa(m, &weight_scheme(&WeightScheme::Quadratic, d)?)?,
    };
    let profile = CoefficientProfile {
        dim: d,
        mass_deficit: m.mass_deficit(),
        class_map,
        ii,
        id,
        mon,
        co,
        anti,
        coanti,
        sup,
        kappa,
    };
    profile.check_invariants()?;
    Ok(profile)
}

/// All permutations of `0..d` in lexicographic order.
pub(crate) fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..d).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..d).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn solve_relabeled(m: &ConfusionMatrix, perm: &[usize], direction: Direction, opts: &SolverOptions) -> Result<CoefficientReport> {
    optimize_monotone(&m.permute_jointly(perm)?, direction, opts)
}

fn relabeled_max(m: &ConfusionMatrix, direction: Direction, opts: &SolverOptions) -> Result<CoefficientReport> {
    opts.validate()?;
    m.collapse_null_classes()?;
    let d = m.dim();
    let (perm, inner, route) = if d <= opts.exhaustive_max_classes {
        let perms = permutations(d);
        let solved = par::map_indexed(perms.len(), |k| solve_relabeled(m, &perms[k], direction, opts));
        let mut best: Option<(usize, CoefficientReport)> = None;
        for (k, r) in solved.into_iter().enumerate() {
            let r = r?;
            if best.as_ref().map_or(true, |(_, b)| r.value > b.value) {
                best = Some((k, r));
            }
        }
        let (k, r) = best.expect("at least one permutation");
        (perms[k].clone(), r, Route::PermutationSearch)
    } else {
        let (p, r) = swap_search(m, direction, opts)?;
        (p, r, Route::PermutationHeuristic)
    };
    Ok(pull_back(inner, &perm, direction, route))
}

/// Maps scores on relabeled classes back to the original labels.
fn pull_back(inner: CoefficientReport, perm: &[usize], direction: Direction, route: Route) -> CoefficientReport {
    let mut f = alloc::vec![0.0; perm.len()];
    let mut g = alloc::vec![0.0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        f[p] = inner.f_opt[i];
        g[p] = inner.g_opt[i];
    }
    CoefficientReport {
        class: match direction {
            Direction::Increasing => ValuationClass::Co,
            Direction::Decreasing => ValuationClass::Anti,
        },
        f_opt: Valuation::from_vec_unchecked(f),
        g_opt: Valuation::from_vec_unchecked(g),
        route,
        permutation: Some(perm.to_vec()),
        ..inner
    }
}

/// Multi-restart best-improvement local search over transpositions. Restart
/// 0 starts from the identity, so the result never falls below II (or ID).
fn swap_search(m: &ConfusionMatrix, direction: Direction, opts: &SolverOptions) -> Result<(Vec<usize>, CoefficientReport)> {
    let d = m.dim();
    let runs = par::map_indexed(opts.permutation_restarts, |k| -> Result<(Vec<usize>, CoefficientReport)> {
        let mut perm: Vec<usize> = (0..d).collect();
        if k > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            perm.shuffle(&mut rng);
        }
        let mut current = solve_relabeled(m, &perm, direction, opts)?;
        loop {
            let mut best_move: Option<(Vec<usize>, CoefficientReport)> = None;
            for a in 0..d {
                for b in a + 1..d {
                    let mut cand = perm.clone();
                    cand.swap(a, b);
                    let r = solve_relabeled(m, &cand, direction, opts)?;
                    let bar = best_move.as_ref().map_or(current.value, |(_, r)| r.value);
                    if r.value > bar + 1e-12 {
                        best_move = Some((cand, r));
                    }
                }
            }
            match best_move {
                Some((p, r)) => {
                    perm = p;
                    current = r;
                }
                None => return Ok((perm, current)),
            }
        }
    });
    let mut best: Option<(Vec<usize>, CoefficientReport)> = None;
    for run in runs {
        let (p, r) = run?;
        if best.as_ref().map_or(true, |(_, b)| r.value > b.value) {
            best = Some((p, r));
        }
    }
    Ok(best.expect("permutation_restarts >= 1"))
}

//! Maximization of `C(f, g)` over feasible score sets.
//!
//! SUP is solved exactly from the singular value decomposition of
//! `Q_ij = p_ij / sqrt(p_i• p_•j)`. Restricted classes use block-coordinate
//! ascent: with `f` fixed, the best `g` in a cone maximizes
//! `Σ_j p_•j g_j b_j` with `b_j = E[f(X) | Y = j]`, which is the normalized
//! projection of `b` onto the cone. Each half-step is an exact conditional
//! maximizer, so the objective never decreases along a run.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::isotonic::PavaWorkspace;
use crate::matrix::{ClassMap, ConfusionMatrix, ReducedTable};
use crate::par;
use crate::valuation::{class_contains, standardize, weighted_moments, Valuation, ValuationClass};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Random starts per monotone solve.
    pub restarts: usize,
    /// Ascent iterations per start.
    pub max_iterations: usize,
    /// A start stops once one full iteration improves the objective by less than this.
    pub convergence_tol: f64,
    pub seed: u64,
    /// Decimal digits used when reporting values.
    pub report_precision: u32,
    /// CO/ANTI enumerate all relabelings up to this many classes and fall back
    /// to swap local search above it.
    pub exhaustive_max_classes: usize,
    /// Random restarts of the swap local search.
    pub permutation_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 500,
            convergence_tol: 1e-10,
            seed: 0x5eed,
            report_precision: 6,
            exhaustive_max_classes: 7,
            permutation_restarts: 200,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions("max_iterations must be at least 1"));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(Error::InvalidOptions("convergence_tol must be positive"));
        }
        if self.report_precision > 15 {
            return Err(Error::InvalidOptions("report_precision must be at most 15"));
        }
        if self.permutation_restarts == 0 {
            return Err(Error::InvalidOptions("permutation_restarts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Spectral,
    Alternating,
    PermutationSearch,
    PermutationHeuristic,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Spectral => "spectral",
            Route::Alternating => "alternating",
            Route::PermutationSearch => "permutation-search",
            Route::PermutationHeuristic => "permutation-search(heuristic)",
        }
    }
}

/// A coefficient value with the standardized scores attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientReport {
    pub class: ValuationClass,
    pub value: f64,
    pub f_opt: Valuation,
    pub g_opt: Valuation,
    pub route: Route,
    pub starts_used: usize,
    pub iterations_total: usize,
    /// Whether the winning start met the convergence tolerance.
    pub converged: bool,
    /// The joint relabeling (0-based) under which the optimum was found, for CO and ANTI.
    pub permutation: Option<Vec<usize>>,
}

impl CoefficientReport {
    /// Value rounded to `digits` decimals.
    pub fn rounded(&self, digits: u32) -> f64 {
        round_to(self.value, digits)
    }
}

pub(crate) fn round_to(x: f64, digits: u32) -> f64 {
    let scale = libm::pow(10.0, digits as f64);
    let r = libm::round(x * scale) / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Both scores nondecreasing (II).
    Increasing,
    /// Row scores nondecreasing, column scores nonincreasing (ID).
    Decreasing,
}

impl Direction {
    pub fn class(self) -> ValuationClass {
        match self {
            Direction::Increasing => ValuationClass::Ii,
            Direction::Decreasing => ValuationClass::Id,
        }
    }
}

/// Scratch buffers reused across best-response calls.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    pava: PavaWorkspace,
}

/// A set of score pairs `S = A × B` described by its conditional maximizers.
pub trait FeasibleSet: Sync {
    fn class(&self) -> ValuationClass;

    /// Writes into `out` a standardized `x` in the set maximizing
    /// `Σ_k weights_k x_k target_k`. `target` has weighted mean zero.
    fn best_response(&self, target: &[f64], weights: &[f64], out: &mut [f64], scratch: &mut Scratch);

    fn contains(&self, f: &[f64], g: &[f64]) -> bool {
        class_contains(f, g, self.class())
    }
}

/// All non-degenerate pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unrestricted;

/// Pairs of nondecreasing scores.
#[derive(Debug, Clone, Copy, Default)]
pub struct Isotone;

impl FeasibleSet for Unrestricted {
    fn class(&self) -> ValuationClass {
        ValuationClass::Sup
    }

    fn best_response(&self, target: &[f64], weights: &[f64], out: &mut [f64], _scratch: &mut Scratch) {
        out.copy_from_slice(target);
        if !standardize_in_place(out, weights, second_moment(target, weights)) {
            best_step(target, weights, out);
        }
    }
}

impl FeasibleSet for Isotone {
    fn class(&self) -> ValuationClass {
        ValuationClass::Ii
    }

    fn best_response(&self, target: &[f64], weights: &[f64], out: &mut [f64], scratch: &mut Scratch) {
        scratch.pava.fit_into(target, weights, out);
        // A constant projection means the target lies in the polar cone; the
        // maximum over the sphere is then attained on an extreme ray, i.e. a
        // single step between adjacent classes.
        if !standardize_in_place(out, weights, second_moment(target, weights)) {
            best_step(target, weights, out);
        }
    }
}

fn second_moment(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(a, b)| a * a * b).sum()
}

/// Standardizes `x` unless its variance is negligible next to `reference`.
fn standardize_in_place(x: &mut [f64], w: &[f64], reference: f64) -> bool {
    let (mean, var) = weighted_moments(x, w);
    if !(var > 1e-20 * reference && var > 1e-300) {
        return false;
    }
    let scale = libm::sqrt(var);
    x.iter_mut().for_each(|v| *v = (*v - mean) / scale);
    true
}

/// Best standardized step `[k <= j]` for `k = 1..n`, first on ties.
fn best_step(target: &[f64], weights: &[f64], out: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    let mut best = (f64::NEG_INFINITY, 1usize);
    let mut tail = total;
    for k in 1..target.len() {
        tail -= weights[k - 1];
        let p = (tail / total).clamp(0.0, 1.0);
        let sd = libm::sqrt(p * (1.0 - p));
        if !(sd > 0.0) {
            continue;
        }
        let value: f64 = target
            .iter()
            .zip(weights)
            .enumerate()
            .map(|(j, (t, w))| {
                let s = if j >= k { (1.0 - p) / sd } else { -p / sd };
                s * t * w
            })
            .sum::<f64>()
            / total;
        if value > best.0 {
            best = (value, k);
        }
    }
    let k = best.1;
    let tail: f64 = weights[k..].iter().sum();
    let p = tail / total;
    let sd = libm::sqrt(p * (1.0 - p));
    for (j, o) in out.iter_mut().enumerate() {
        *o = if j >= k { (1.0 - p) / sd } else { -p / sd };
    }
}

#[derive(Debug, Clone)]
struct StartResult {
    value: f64,
    f: Vec<f64>,
    g: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn run_start<S: FeasibleSet>(t: &ReducedTable, set: &S, opts: &SolverOptions, start: usize) -> StartResult {
    let (m, n) = (t.nrows(), t.ncols());
    let (r, c) = (t.row_marginals(), t.col_marginals());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(start as u64);
    let draw: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();

    let mut scratch = Scratch::default();
    let mut f = vec![0.0; m];
    let mut g = vec![0.0; n];
    let mut col_target = vec![0.0; n];
    let mut row_target = vec![0.0; m];
    set.best_response(&draw, r, &mut f, &mut scratch);

    let mut value = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        t.column_means_into(&f, &mut col_target);
        set.best_response(&col_target, c, &mut g, &mut scratch);
        let half = t.bilinear(&f, &g);
        t.row_means_into(&g, &mut row_target);
        set.best_response(&row_target, r, &mut f, &mut scratch);
        let next = t.bilinear(&f, &g);
        debug_assert!(half >= value - 1e-9, "g-step decreased the objective: {value} -> {half}");
        debug_assert!(next >= half - 1e-9, "f-step decreased the objective: {half} -> {next}");
        let improvement = next - value;
        value = next;
        if improvement < opts.convergence_tol {
            converged = true;
            break;
        }
    }
    StartResult { value, f, g, iterations, converged }
}

#[derive(Debug, Clone)]
pub(crate) struct TableOptimum {
    pub value: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub starts: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Runs every start and keeps the first best in start order.
pub(crate) fn solve_table<S: FeasibleSet>(t: &ReducedTable, set: &S, opts: &SolverOptions) -> TableOptimum {
    let results = par::map_indexed(opts.restarts, |k| run_start(t, set, opts, k));
    let iterations = results.iter().map(|r| r.iterations).sum();
    let mut best: Option<StartResult> = None;
    for r in results {
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("restarts >= 1");
    TableOptimum {
        value: best.value.clamp(-1.0, 1.0),
        f: best.f,
        g: best.g,
        starts: opts.restarts,
        iterations,
        converged: best.converged,
    }
}

fn report_from(class: ValuationClass, route: Route, map: &ClassMap, opt: TableOptimum) -> CoefficientReport {
    CoefficientReport {
        class,
        value: opt.value,
        f_opt: Valuation::from_vec_unchecked(map.expand_rows(&opt.f)),
        g_opt: Valuation::from_vec_unchecked(map.expand_cols(&opt.g)),
        route,
        starts_used: opt.starts,
        iterations_total: opt.iterations,
        converged: opt.converged,
        permutation: None,
    }
}

/// Multi-start alternating maximization over any feasible set.
pub fn multi_start_generic<S: FeasibleSet>(m: &ConfusionMatrix, set: &S, opts: &SolverOptions) -> Result<CoefficientReport> {
    opts.validate()?;
    let (t, map) = m.collapse_null_classes()?;
    let opt = solve_table(&t, set, opts);
    let report = report_from(set.class(), Route::Alternating, &map, opt);
    debug_assert!(set.contains(&report.f_opt, &report.g_opt));
    Ok(report)
}

/// II, or ID computed as II on the column-reversed matrix.
pub fn optimize_monotone(m: &ConfusionMatrix, direction: Direction, opts: &SolverOptions) -> Result<CoefficientReport> {
    match direction {
        Direction::Increasing => multi_start_generic(m, &Isotone, opts),
        Direction::Decreasing => {
            let mut report = multi_start_generic(&m.reverse_columns(), &Isotone, opts)?;
            report.g_opt = report.g_opt.reversed();
            report.class = ValuationClass::Id;
            Ok(report)
        }
    }
}

/// Maximal correlation: the second singular value of `Q_ij = p_ij / sqrt(p_i• p_•j)`.
pub fn sup_correlation(m: &ConfusionMatrix) -> Result<CoefficientReport> {
    let (t, map) = m.collapse_null_classes()?;
    let (nr, nc) = (t.nrows(), t.ncols());
    let sr: Vec<f64> = t.row_marginals().iter().map(|&p| libm::sqrt(p)).collect();
    let sc: Vec<f64> = t.col_marginals().iter().map(|&p| libm::sqrt(p)).collect();
    // Removing the trivial pair (sqrt(p_i•), sqrt(p_•j)) with singular value 1
    // leaves the second singular value on top.
    let q = DMatrix::from_fn(nr, nc, |i, j| t.cell(i, j) / (sr[i] * sc[j]) - sr[i] * sc[j]);
    let (u, v, sigma) = top_singular_pair(&q)?;
    let mut f: Vec<f64> = (0..nr).map(|i| u[i] / sr[i]).collect();
    let mut g: Vec<f64> = (0..nc).map(|j| v[j] / sc[j]).collect();
    sanitize(&mut f, t.row_marginals());
    sanitize(&mut g, t.col_marginals());
    // Sign convention: row scores trend upward with the class index.
    let trend: f64 = f.iter().zip(t.row_marginals()).enumerate().map(|(i, (x, p))| i as f64 * x * p).sum();
    if trend < 0.0 {
        f.iter_mut().for_each(|x| *x = -*x);
        g.iter_mut().for_each(|x| *x = -*x);
    }
    let opt = TableOptimum { value: sigma, f, g, starts: 0, iterations: 0, converged: true };
    Ok(report_from(ValuationClass::Sup, Route::Spectral, &map, opt))
}

/// Leading singular triple from the symmetric eigenproblem of the smaller
/// Gram matrix. `sigma` is recomputed as `|Q^T u|`, which is exact to second
/// order in the eigenvector error.
fn top_singular_pair(q: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let rows_first = q.nrows() <= q.ncols();
    let gram = if rows_first { q * q.transpose() } else { q.transpose() * q };
    let eig = gram.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    let x = eig.eigenvectors.column(k).into_owned();
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::Svd);
    }
    let y = if rows_first { q.transpose() * &x } else { q * &x };
    let sigma = y.norm();
    let y: Vec<f64> = if sigma > 0.0 { y.iter().map(|v| v / sigma).collect() } else { y.iter().copied().collect() };
    let x: Vec<f64> = x.iter().copied().collect();
    let sigma = sigma.clamp(0.0, 1.0);
    Ok(if rows_first { (x, y, sigma) } else { (y, x, sigma) })
}

/// Re-standardizes singular-vector scores; falls back to a step when the
/// vector carries no spread (only possible when the singular value is 0).
fn sanitize(x: &mut [f64], w: &[f64]) {
    match standardize(&Valuation::from_vec_unchecked(x.to_vec()), w) {
        Ok(s) => x.copy_from_slice(&s),
        Err(_) => best_step(&vec![0.0; x.len()], w, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{correlation, pair_class_check};

    fn cm0() -> ConfusionMatrix {
        ConfusionMatrix::from_rows(&[[0.1, 0.0, 0.1], [0.2, 0.0, 0.2], [0.0, 0.2, 0.2]]).unwrap()
    }

    fn cm1() -> ConfusionMatrix {
        ConfusionMatrix::from_rows(&[[0.2, 0.0, 0.1], [0.1, 0.1, 0.0], [0.2, 0.1, 0.2]]).unwrap()
    }

    fn cm2() -> ConfusionMatrix {
        ConfusionMatrix::from_rows(&[[0.1, 0.0, 0.0], [0.0, 0.4, 0.0], [0.2, 0.2, 0.1]]).unwrap()
    }

    fn check_report(m: &ConfusionMatrix, r: &CoefficientReport) {
        assert!(pair_class_check(&r.f_opt, &r.g_opt, r.class).unwrap(), "{r:?}");
        let c = correlation(m, &r.f_opt, &r.g_opt).unwrap();
        assert!((c - r.value).abs() < 1e-6, "{c} vs {}", r.value);
    }

    #[test]
    fn sup_of_worked_example() {
        let m = cm0();
        let r = sup_correlation(&m).unwrap();
        assert!((r.value - 0.7071).abs() < 1e-4);
        assert!((r.value - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        check_report(&m, &r);
        assert_eq!(r.route, Route::Spectral);
        assert!((sup_correlation(&cm1()).unwrap().value - 0.4537).abs() < 1e-4);
    }

    #[test]
    fn sup_anchors() {
        let diag = ConfusionMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let r = sup_correlation(&diag).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        check_report(&diag, &r);
        let prod = ConfusionMatrix::product(&[0.1, 0.6, 0.3], &[0.5, 0.25, 0.25]).unwrap();
        let r = sup_correlation(&prod).unwrap();
        assert!(r.value < 1e-9);
        check_report(&prod, &r);
    }

    #[test]
    fn monotone_worked_example() {
        let m = cm0();
        let opts = SolverOptions::default();
        let ii = optimize_monotone(&m, Direction::Increasing, &opts).unwrap();
        let id = optimize_monotone(&m, Direction::Decreasing, &opts).unwrap();
        assert!((ii.value - 0.5345).abs() < 1e-4, "{}", ii.value);
        assert!(id.value.abs() < 1e-3, "{}", id.value);
        check_report(&m, &ii);
        check_report(&m, &id);
        assert_eq!(id.class, ValuationClass::Id);
        let ii2 = optimize_monotone(&cm2(), Direction::Increasing, &opts).unwrap();
        let id2 = optimize_monotone(&cm2(), Direction::Decreasing, &opts).unwrap();
        assert!((ii2.value - 0.5091).abs() < 1e-3, "{}", ii2.value);
        assert!((id2.value - 0.2182).abs() < 1e-3, "{}", id2.value);
    }

    #[test]
    fn monotone_perfect_agreement() {
        let opts = SolverOptions::default();
        let diag = ConfusionMatrix::diagonal(&[0.3, 0.3, 0.4]).unwrap();
        let ii = optimize_monotone(&diag, Direction::Increasing, &opts).unwrap();
        assert!((ii.value - 1.0).abs() < 1e-12);
        for (a, b) in ii.f_opt.iter().zip(ii.g_opt.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
        let anti = ConfusionMatrix::anti_diagonal(&[0.3, 0.3, 0.4]).unwrap();
        let id = optimize_monotone(&anti, Direction::Decreasing, &opts).unwrap();
        assert!((id.value - 1.0).abs() < 1e-12);
        check_report(&anti, &id);
    }

    #[test]
    fn one_start_converges_immediately_when_start_is_optimal() {
        let diag = ConfusionMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let opts = SolverOptions { restarts: 1, ..SolverOptions::default() };
        let r = multi_start_generic(&diag, &Isotone, &opts).unwrap();
        assert!(r.converged);
        assert!(r.iterations_total <= 2);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_route_matches_spectral_sup() {
        let opts = SolverOptions::default();
        for m in [cm0(), cm1(), cm2()] {
            let generic = multi_start_generic(&m, &Unrestricted, &opts).unwrap();
            let spectral = sup_correlation(&m).unwrap();
            assert!((generic.value - spectral.value).abs() < 1e-4);
            check_report(&m, &generic);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let opts = SolverOptions { seed: 42, ..SolverOptions::default() };
        let a = optimize_monotone(&cm1(), Direction::Increasing, &opts).unwrap();
        let b = optimize_monotone(&cm1(), Direction::Increasing, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_ii_uses_extreme_rays() {
        // Mass concentrated against the diagonal: every increasing pair is
        // negatively correlated, so the optimum sits on a step function.
        let m = ConfusionMatrix::from_rows(&[[0.0, 0.3, 0.2], [0.1, 0.0, 0.1], [0.2, 0.1, 0.0]]).unwrap();
        let r = optimize_monotone(&m, Direction::Increasing, &SolverOptions::default()).unwrap();
        check_report(&m, &r);
        assert!(r.value < 0.0);
    }

    #[test]
    fn invalid_options() {
        let opts = SolverOptions { restarts: 0, ..SolverOptions::default() };
        assert!(matches!(optimize_monotone(&cm0(), Direction::Increasing, &opts), Err(Error::InvalidOptions(_))));
        let degenerate = ConfusionMatrix::from_rows(&[[0.5, 0.5], [0.0, 0.0]]).unwrap();
        assert!(matches!(sup_correlation(&degenerate), Err(Error::DegenerateMatrix { .. })));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to(0.70710678, 4), 0.7071);
        assert_eq!(round_to(-0.00000001, 6), 0.0);
        assert!(round_to(-0.00000001, 6).is_sign_positive());
    }
}

//! Coefficients checked against independent computations: dense grid
//! search over standardized score pairs, closed forms for two classes, and
//! random feasible pairs that must never beat the solver.

use funcorr_core::{
    anti_correlation, co_correlation, multi_start_generic, optimize_monotone, sup_correlation, ConfusionMatrix,
    Direction, Isotone, SolverOptions, Unrestricted,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, zero_share: f64) -> ConfusionMatrix {
    loop {
        let cells: Vec<f64> = (0..d * d).map(|_| if rng.random::<f64>() < zero_share { 0.0 } else { rng.random() }).collect();
        if let Ok(m) = ConfusionMatrix::from_cells(d, cells) {
            if m.collapse_null_classes().is_ok() {
                return m;
            }
        }
    }
}

fn orderings3() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Standardized version of `x`, or `None` when `x` is constant on the support.
fn standardized(x: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let mean: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
    let var: f64 = x.iter().zip(w).map(|(a, b)| (a - mean) * (a - mean) * b).sum();
    (var > 1e-12).then(|| x.iter().map(|a| (a - mean) / var.sqrt()).collect())
}

/// Every nondecreasing standardized score vector on three classes, in the
/// order `ord`, is an affine image of `(0, t, 1)` placed along `ord`.
fn grid_vectors(ord: [usize; 3], w: &[f64], steps: usize, decreasing: bool) -> Vec<Vec<f64>> {
    (0..=steps)
        .filter_map(|k| {
            let t = k as f64 / steps as f64;
            let mut x = [0.0; 3];
            for (rank, &class) in ord.iter().enumerate() {
                let v = [0.0, t, 1.0][rank];
                x[class] = if decreasing { -v } else { v };
            }
            standardized(&x, w)
        })
        .collect()
}

fn bilinear(m: &ConfusionMatrix, f: &[f64], g: &[f64]) -> f64 {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| f[i] * m.cell(i, j) * g[j]).sum::<f64>()).sum()
}

/// Grid maximum of C over pairs ordered by `orders` (row and column share
/// each ordering), with columns reversed when `decreasing`.
fn grid_max(m: &ConfusionMatrix, orders: &[[usize; 3]], decreasing: bool, steps: usize) -> f64 {
    let (r, c) = m.marginals();
    let mut best = f64::NEG_INFINITY;
    for &ord in orders {
        let fs = grid_vectors(ord, r, steps, false);
        let gs = grid_vectors(ord, c, steps, decreasing);
        for f in &fs {
            for g in &gs {
                best = best.max(bilinear(m, f, g));
            }
        }
    }
    best
}

#[test]
fn three_class_coefficients_match_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SolverOptions::default();
    for trial in 0..25 {
        let m = random_matrix(&mut rng, 3, if trial % 3 == 0 { 0.3 } else { 0.0 });
        let checks = [
            ("II", optimize_monotone(&m, Direction::Increasing, &opts).unwrap().value, grid_max(&m, &[[0, 1, 2]], false, 300)),
            ("ID", optimize_monotone(&m, Direction::Decreasing, &opts).unwrap().value, grid_max(&m, &[[0, 1, 2]], true, 300)),
            ("CO", co_correlation(&m, &opts).unwrap().value, grid_max(&m, &orderings3(), false, 300)),
            ("ANTI", anti_correlation(&m, &opts).unwrap().value, grid_max(&m, &orderings3(), true, 300)),
        ];
        for (name, solver, grid) in checks {
            assert!(grid <= solver + 1e-9, "trial {trial} {name}: grid {grid} beats solver {solver}");
            assert!(solver - grid < 5e-3, "trial {trial} {name}: solver {solver} vs grid {grid}");
        }
    }
}

#[test]
fn two_class_coefficients_have_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = SolverOptions::default();
    for _ in 0..50 {
        let m = random_matrix(&mut rng, 2, 0.0);
        let (r, c) = m.marginals();
        let phi = (m.cell(0, 0) * m.cell(1, 1) - m.cell(0, 1) * m.cell(1, 0)) / (r[0] * r[1] * c[0] * c[1]).sqrt();
        let ii = optimize_monotone(&m, Direction::Increasing, &opts).unwrap().value;
        let id = optimize_monotone(&m, Direction::Decreasing, &opts).unwrap().value;
        let sup = sup_correlation(&m).unwrap().value;
        assert!((ii - phi).abs() < 1e-9, "{ii} vs {phi}");
        assert!((id + phi).abs() < 1e-9, "{id} vs {}", -phi);
        assert!((sup - phi.abs()).abs() < 1e-9, "{sup} vs {} {:?}", phi.abs(), m);
    }
}

#[test]
fn random_feasible_pairs_never_beat_the_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let opts = SolverOptions::default();
    for d in [3, 4, 5] {
        let m = random_matrix(&mut rng, d, 0.2);
        let (r, c) = m.marginals();
        let ii = optimize_monotone(&m, Direction::Increasing, &opts).unwrap().value;
        let sup = sup_correlation(&m).unwrap().value;
        for _ in 0..1000 {
            let mut f: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let mut g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let (Some(fu), Some(gu)) = (standardized(&f, r), standardized(&g, c)) else { continue };
            assert!(bilinear(&m, &fu, &gu) <= sup + 1e-9);
            f.sort_by(f64::total_cmp);
            g.sort_by(f64::total_cmp);
            let (Some(fs), Some(gs)) = (standardized(&f, r), standardized(&g, c)) else { continue };
            assert!(bilinear(&m, &fs, &gs) <= ii + 1e-9);
        }
    }
}

#[test]
fn anti_equals_best_increasing_fit_of_relabeled_reversed_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let opts = SolverOptions::default();
    let perms = |d: usize| -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|p: Vec<usize>| (0..d).filter(|k| !p.contains(k)).map(|k| [p.clone(), vec![k]].concat()).collect::<Vec<_>>())
                .collect();
        }
        out
    };
    for d in [3, 4] {
        for _ in 0..4 {
            let m = random_matrix(&mut rng, d, 0.25);
            let direct = anti_correlation(&m, &opts).unwrap().value;
            let via_reversal = perms(d)
                .iter()
                .map(|p| {
                    let q = m.permute_jointly(p).unwrap().reverse_columns();
                    multi_start_generic(&q, &Isotone, &opts).unwrap().value
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((direct - via_reversal).abs() < 1e-6, "{direct} vs {via_reversal}");
        }
    }
}

#[test]
fn generic_unrestricted_route_matches_spectral() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let opts = SolverOptions::default();
    for d in 2..=5 {
        let m = random_matrix(&mut rng, d, 0.2);
        let generic = multi_start_generic(&m, &Unrestricted, &opts).unwrap().value;
        let spectral = sup_correlation(&m).unwrap().value;
        assert!((generic - spectral).abs() < 1e-4, "d={d}: {generic} vs {spectral}");
    }
}

#[test]
fn independence_is_detected_in_both_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for d in 2..=5 {
        let row: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
        let col: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
        let m = ConfusionMatrix::product(&row, &col).unwrap();
        assert!(m.is_product());
        assert!(sup_correlation(&m).unwrap().value <= 1e-9);

        let mut cells = m.cells().to_vec();
        let delta = 0.5 * cells[1].min(cells[d]);
        cells[0] += delta;
        cells[d + 1] += delta;
        cells[1] -= delta;
        cells[d] -= delta;
        let perturbed = ConfusionMatrix::from_cells(d, cells).unwrap();
        assert!(!perturbed.is_product());
        assert!(sup_correlation(&perturbed).unwrap().value > 1e-9);
    }
}

use filtres_core::rng::{rng_from_seed, uniform_symmetric};
use filtres_core::{
    assemble_state_matrix, covariance_rank, evaluate_error, memory_capacity, train_ridge, MemoryOptions, Ridge,
    StateMatrix,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    DMatrix::from_column_slice(rows, cols, &uniform_symmetric(&mut rng, rows * cols))
}

/// Solves `(XᵀX + λI) c = Xᵀg` by Gaussian elimination with partial pivoting.
fn normal_equation_oracle(x: &DMatrix<f64>, g: &[f64], lambda: f64) -> Vec<f64> {
    let (n, k) = x.shape();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..n).map(|r| x[(r, i)] * x[(r, j)]).sum::<f64>() + if i == j { lambda } else { 0.0 };
        }
        a[i][k] = (0..n).map(|r| x[(r, i)] * g[r]).sum();
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
        a.swap(col, pivot);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..=k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut c = vec![0.0; k];
    for row in (0..k).rev() {
        c[row] = (a[row][k] - (row + 1..k).map(|j| a[row][j] * c[j]).sum::<f64>()) / a[row][row];
    }
    c
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    num / b.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn ridge_matches_normal_equations() {
    let x = random_matrix(100, 10, 1);
    let g = uniform_symmetric(&mut rng_from_seed(2), 100);
    let sm = StateMatrix::from_nodes(x.clone()).unwrap();
    let model = train_ridge(&sm, &g, Ridge::Fixed(0.01)).unwrap();
    let oracle = normal_equation_oracle(&x, &g, 0.01);
    assert!(rel_diff(&model.coefficients, &oracle) < 1e-8);
    assert_eq!(model.ridge_lambda, 0.01);
}

#[test]
fn ridge_shrinks() {
    let x = StateMatrix::from_nodes(random_matrix(100, 10, 3)).unwrap();
    let g = uniform_symmetric(&mut rng_from_seed(4), 100);
    let norm = |r: f64| train_ridge(&x, &g, Ridge::Fixed(r)).unwrap().coefficients.iter().map(|c| c * c).sum::<f64>();
    assert!(norm(1.0) <= norm(0.01));
}

#[test]
fn relative_ridge_scales_with_gram_trace() {
    let raw = random_matrix(60, 4, 9);
    let x = StateMatrix::from_nodes(raw.clone()).unwrap();
    let g = uniform_symmetric(&mut rng_from_seed(10), 60);
    let model = train_ridge(&x, &g, Ridge::Relative(1e-3)).unwrap();
    let trace: f64 = raw.iter().map(|v| v * v).sum();
    assert!((model.ridge_lambda - 1e-3 * trace / 4.0).abs() < 1e-12 * trace);
}

#[test]
fn constructed_rank() {
    let left = random_matrix(1000, 7, 11);
    let right = random_matrix(7, 50, 12);
    let x = StateMatrix::from_nodes(left * right).unwrap();
    let report = covariance_rank(&x).unwrap();
    assert_eq!(report.rank, 7);
    assert_eq!(report.singular_values.len(), 50);
    assert!(report.singular_values.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn appending_columns_never_raises_training_error() {
    let raw = random_matrix(300, 12, 21);
    let g: Vec<f64> = (0..300).map(|i| (i as f64 * 0.05).sin() + raw[(i, 0)] * raw[(i, 1)]).collect();
    let mut last = f64::INFINITY;
    for k in 1..=12 {
        let x = StateMatrix::from_nodes(raw.columns(0, k).into_owned()).unwrap();
        let x = assemble_state_matrix(&x).unwrap();
        let err = train_ridge(&x, &g, Ridge::Fixed(0.0)).unwrap().training_error;
        assert!(err <= last + 1e-12, "k = {k}: {err} > {last}");
        last = err;
    }
}

#[test]
fn error_is_translation_invariant() {
    let x = assemble_state_matrix(&StateMatrix::from_nodes(random_matrix(80, 3, 5)).unwrap()).unwrap();
    let g = uniform_symmetric(&mut rng_from_seed(6), 80);
    let model = train_ridge(&x, &g, Ridge::Fixed(1e-3)).unwrap();
    let base = evaluate_error(&x, &model, &g).unwrap();
    // Shifting the bias coefficient and the target by the same constant.
    let mut shifted = model.clone();
    *shifted.coefficients.last_mut().unwrap() += 4.5;
    let g2: Vec<f64> = g.iter().map(|v| v + 4.5).collect();
    assert!((evaluate_error(&x, &shifted, &g2).unwrap() - base).abs() < 1e-12);
    assert!((model.training_error - base).abs() < 1e-15);
}

#[test]
fn delay_line_memory_equals_node_count() {
    let m = 10;
    let runner = |s: &[f64]| {
        let rows = s.len() - 100;
        // Node i holds the input delayed by i samples.
        StateMatrix::from_nodes(DMatrix::from_fn(rows, m, |r, i| s[100 + r - (i + 1)]))
    };
    let opts = MemoryOptions { samples: 6000, k_max: 30, ridge: Ridge::Fixed(1e-9), ..Default::default() };
    let report = memory_capacity(runner, 17, &opts).unwrap();
    assert!((report.total - m as f64).abs() < 0.3, "MC = {}", report.total);
    assert!(report.per_delay[..m].iter().all(|&c| c > 0.999));
    assert!(report.per_delay.iter().all(|&c| (0.0..=1.0).contains(&c)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ridge_oracle_random(seed in 0u64..10_000, lambda_exp in -6i32..1) {
        let lambda = 10f64.powi(lambda_exp);
        let x = random_matrix(60, 8, seed);
        let g = uniform_symmetric(&mut rng_from_seed(seed ^ 0xABCD), 60);
        let model = train_ridge(&StateMatrix::from_nodes(x.clone()).unwrap(), &g, Ridge::Fixed(lambda)).unwrap();
        prop_assert!(rel_diff(&model.coefficients, &normal_equation_oracle(&x, &g, lambda)) < 1e-8);
    }

    #[test]
    fn rank_ignores_scale(seed in 0u64..1000, r in 1usize..6) {
        let x = random_matrix(200, r, seed) * random_matrix(r, 9, seed + 1);
        let base = covariance_rank(&StateMatrix::from_nodes(x.clone()).unwrap()).unwrap().rank;
        let big = covariance_rank(&StateMatrix::from_nodes(x * 1e3).unwrap()).unwrap().rank;
        prop_assert_eq!(base, r);
        prop_assert_eq!(big, base);
    }
}

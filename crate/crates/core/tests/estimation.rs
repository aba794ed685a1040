use hysnarx::estimation::{
    aic_choose_size, constrained_least_squares, frols_select, least_squares, EqualityConstraint,
};
use hysnarx::linalg::Matrix;
use hysnarx::narx::{build_regressor_matrix, generate_term_pool, ExclusionRules, Signal, Term};
use hysnarx::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

mod common;
use common::{polynomial_pool, random_matrix, random_model, random_vec};

/// Dense Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Solves the KKT system `[P'P S'; S 0] [theta; lambda] = [P'y; c]`.
fn kkt_oracle(psi: &Matrix<f64>, y: &[f64], s: &Matrix<f64>, c: &[f64]) -> Vec<f64> {
    let n = psi.cols();
    let q = s.rows();
    let mut a = vec![vec![0.0; n + q]; n + q];
    let mut b = vec![0.0; n + q];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = psi.col(i).iter().zip(psi.col(j)).map(|(x, z)| x * z).sum();
        }
        b[i] = psi.col(i).iter().zip(y).map(|(x, z)| x * z).sum();
    }
    for r in 0..q {
        for j in 0..n {
            a[n + r][j] = s.col(j)[r];
            a[j][n + r] = s.col(j)[r];
        }
        b[n + r] = c[r];
    }
    solve_dense(a, b)[..n].to_vec()
}

fn rss(psi: &Matrix<f64>, y: &[f64], theta: &[f64]) -> f64 {
    psi.mul_vec(theta)
        .iter()
        .zip(y)
        .map(|(p, t)| (t - p) * (t - p))
        .sum()
}

#[test]
fn constrained_estimate_matches_kkt_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let (m, n) = (rng.gen_range(8..40), rng.gen_range(2..7));
        let q = rng.gen_range(1..n);
        let psi = random_matrix(&mut rng, m, n);
        let y = random_vec(&mut rng, m);
        let s = random_matrix(&mut rng, q, n);
        let c = random_vec(&mut rng, q);
        let con = EqualityConstraint::new(s.clone(), c.clone()).unwrap();
        let est = constrained_least_squares(&psi, &y, &con).unwrap();
        let oracle = kkt_oracle(&psi, &y, &s, &c);
        for (a, b) in est.theta.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn constraint_residual_on_hundred_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (m, n) = (rng.gen_range(10..200), rng.gen_range(2..10));
        let q = rng.gen_range(1..=n.min(4));
        let psi = random_matrix(&mut rng, m, n);
        let y = random_vec(&mut rng, m);
        let con = EqualityConstraint::new(random_matrix(&mut rng, q, n), random_vec(&mut rng, q))
            .unwrap();
        let est = constrained_least_squares(&psi, &y, &con).unwrap();
        worst = worst.max(con.residual(&est.theta));
    }
    assert!(worst <= 1e-10, "worst residual {worst:e}");
}

#[test]
fn constraint_satisfied_by_ls_solution_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let psi = random_matrix(&mut rng, 50, 5);
        let y = random_vec(&mut rng, 50);
        let ls = least_squares(&psi, &y).unwrap();
        let s = random_matrix(&mut rng, 2, 5);
        let c: Vec<f64> = (0..2)
            .map(|r| (0..5).map(|j| s.col(j)[r] * ls.theta[j]).sum())
            .collect();
        let cls =
            constrained_least_squares(&psi, &y, &EqualityConstraint::new(s, c).unwrap()).unwrap();
        for (a, b) in cls.theta.iter().zip(&ls.theta) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn dependent_constraints_are_singular() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_matrix(&mut rng, 30, 3);
    let y = random_vec(&mut rng, 30);
    let s = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]]);
    let con = EqualityConstraint::new(s, vec![1.0, 2.0]).unwrap();
    assert!(matches!(
        constrained_least_squares(&psi, &y, &con),
        Err(Error::SingularConstraint(_))
    ));
}

#[test]
fn duplicated_column_is_rank_deficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random_vec(&mut rng, 20);
    let b = random_vec(&mut rng, 20);
    let psi = Matrix::from_columns(vec![a.clone(), b, a.iter().map(|x| 3.0 * x).collect()]);
    match least_squares(&psi, &random_vec(&mut rng, 20)) {
        Err(Error::RankDeficient { columns }) => assert_eq!(columns[0].0, 2),
        other => panic!("expected rank deficiency, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn least_squares_is_optimal(seed in 0u64..10_000, probe in prop::collection::vec(-1.0f64..1.0, 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_matrix(&mut rng, 25, 4);
        let y = random_vec(&mut rng, 25);
        let est = least_squares(&psi, &y).unwrap();
        let base = rss(&psi, &y, &est.theta);
        let moved: Vec<f64> = est.theta.iter().zip(&probe).map(|(t, d)| t + 1e-3 * d).collect();
        prop_assert!(rss(&psi, &y, &moved) >= base * (1.0 - 1e-12));
        let resid: Vec<f64> = psi.mul_vec(&est.theta).iter().zip(&y).map(|(p, t)| t - p).collect();
        for j in 0..4 {
            let g: f64 = psi.col(j).iter().zip(&resid).map(|(a, r)| a * r).sum();
            prop_assert!(g.abs() <= 1e-10 * (1.0 + base));
        }
    }

    #[test]
    fn constrained_estimate_satisfies_constraint(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..8);
        let psi = random_matrix(&mut rng, 40, n);
        let y = random_vec(&mut rng, 40);
        let q = rng.gen_range(1..=n.min(3));
        let con = EqualityConstraint::new(random_matrix(&mut rng, q, n), random_vec(&mut rng, q)).unwrap();
        let est = constrained_least_squares(&psi, &y, &con).unwrap();
        prop_assert!(con.residual(&est.theta) <= 1e-10);
    }
}

#[test]
fn frols_recovers_noise_free_structures() {
    let pool = polynomial_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let u: Vec<f64> = (0..600)
            .map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let u = Signal::new(u, 0.01).unwrap();
        let (model, y) = random_model(&mut rng, &pool, &u);
        let report = frols_select(&pool, &u, &y, model.terms().len()).unwrap();
        let mut got = report.terms();
        let mut want = model.terms().to_vec();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert!(report.cumulative_err() > 1.0 - 1e-9);
        let reg = build_regressor_matrix(&report.terms(), &u, &y).unwrap();
        let est = least_squares(&reg.psi, &reg.target).unwrap();
        for (t, v) in report.terms().iter().zip(&est.theta) {
            let i = model.terms().iter().position(|x| x == t).unwrap();
            let truth = model.theta()[i];
            assert!(
                (v - truth).abs() <= 1e-8 * truth.abs(),
                "{t}: {v} vs {truth}"
            );
        }
    }
}

#[test]
fn noisy_data_ranks_true_terms_first_and_aic_keeps_them() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let terms: Vec<Term> = ["y[k-1]", "u[k-1]", "u[k-2]*phi1[k-1]"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let theta = [0.6, 0.8, -0.3];
    let n = 3000;
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut y = vec![0.0; n];
    for k in 2..n {
        let e: f64 = rng.sample(StandardNormal);
        y[k] = theta[0] * y[k - 1]
            + theta[1] * u[k - 1]
            + theta[2] * u[k - 2] * (u[k - 1] - u[k - 2])
            + 0.01 * e;
    }
    let u = Signal::new(u, 0.01).unwrap();
    let y = Signal::new(y, 0.01).unwrap();
    let pool = generate_term_pool(2, 1, 2, &ExclusionRules::full()).unwrap();
    let report = frols_select(&pool, &u, &y, 8).unwrap();
    let mut got = report.leading_terms(3);
    let mut want = terms;
    got.sort();
    want.sort();
    assert_eq!(got, want);
    let choice = aic_choose_size(&report, &u, &y).unwrap();
    assert!(choice.size >= 3);
    let knee = choice.aic[1] - choice.aic[2];
    let tail = choice.aic[2] - choice.aic[choice.aic.len() - 1];
    assert!(knee > 100.0 * tail.abs(), "knee {knee}, tail {tail}");
}

#[test]
fn white_equation_error_gives_unbiased_estimates() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let truth = [0.5, 1.5];
    let runs = 40;
    let n = 10_000;
    let mut mean = [0.0; 2];
    let mut estimates = Vec::new();
    for _ in 0..runs {
        let u: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut y = vec![0.0; n];
        for k in 1..n {
            let e: f64 = rng.sample(StandardNormal);
            y[k] = truth[0] * y[k - 1] + truth[1] * u[k - 1] + 0.5 * e;
        }
        let terms: Vec<Term> = vec!["y[k-1]".parse().unwrap(), "u[k-1]".parse().unwrap()];
        let reg = build_regressor_matrix(
            &terms,
            &Signal::new(u, 1.0).unwrap(),
            &Signal::new(y, 1.0).unwrap(),
        )
        .unwrap();
        let est = least_squares(&reg.psi, &reg.target).unwrap();
        for j in 0..2 {
            mean[j] += est.theta[j] / runs as f64;
        }
        estimates.push(est.theta);
    }
    for j in 0..2 {
        let var: f64 = estimates
            .iter()
            .map(|t| (t[j] - mean[j]).powi(2))
            .sum::<f64>()
            / (runs - 1) as f64;
        let stderr = (var / runs as f64).sqrt();
        assert!(
            (mean[j] - truth[j]).abs() < 4.0 * stderr + 1e-12,
            "parameter {j}: mean {} vs {} (stderr {stderr})",
            mean[j],
            truth[j]
        );
    }
}

//! Generators and oracles shared by the integration suites and the
//! acceptance run.
#![allow(dead_code)]

use hysnarx::analysis::check_assumption;
use hysnarx::linalg::Matrix;
use hysnarx::narx::{
    free_run, generate_term_pool, ExclusionRules, NarxModel, Signal, SignalKind, Term,
};
use hysnarx::plant::{simulate_bouc_wen, BoucWenParams, InputSpec, SimConfig};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn terms(names: &[&str]) -> Vec<Term> {
    names.iter().map(|s| s.parse().unwrap()).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_columns(
        (0..cols)
            .map(|_| (0..rows).map(|_| rng.sample(StandardNormal)).collect())
            .collect(),
    )
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Polynomial pool in lagged outputs and inputs only. Increment terms are
/// left out: `phi1[k-1] = u[k-1] - u[k-2]` makes mixed pools linearly
/// dependent, so their structures are not unique.
pub fn polynomial_pool() -> Vec<Term> {
    let mut pool = generate_term_pool(2, 2, 2, &ExclusionRules::full()).unwrap();
    pool.retain(|t| {
        t.factors()
            .iter()
            .all(|f| matches!(f.kind, SignalKind::Output | SignalKind::Input))
    });
    pool
}

/// Draws models with a damped output lag and a few other terms until one
/// gives a bounded, non-trivial response to `u`.
pub fn random_model(
    rng: &mut ChaCha8Rng,
    pool: &[Term],
    u: &Signal<f64>,
) -> (NarxModel<f64>, Signal<f64>) {
    let output: Term = "y[k-1]".parse().unwrap();
    let candidates: Vec<&Term> = pool
        .iter()
        .filter(|t| **t != output && !t.is_constant())
        .collect();
    loop {
        let mut terms = vec![output.clone()];
        let mut theta = vec![rng.gen_range(0.3..0.7)];
        let extra = rng.gen_range(1..4);
        while terms.len() < 1 + extra {
            let t = candidates[rng.gen_range(0..candidates.len())].clone();
            if !terms.contains(&t) {
                terms.push(t);
                let mag = rng.gen_range(0.2..0.5);
                theta.push(if rng.gen_bool(0.5) { mag } else { -mag });
            }
        }
        let model = NarxModel::from_terms(terms, theta, u.sample_time()).unwrap();
        if let Ok(y) = free_run(&model, u, &[0.0]) {
            let peak = y.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 1e-3 && peak < 1e3 {
                return (model, y);
            }
        }
    }
}

/// Pool of nonlinear terms that keep a direct model solvable for its
/// input with a pure delay of one sample.
pub fn compliant_pool() -> Vec<Term> {
    let rules = ExclusionRules::full().with_input_delay(1);
    generate_term_pool(3, 2, 3, &rules)
        .unwrap()
        .into_iter()
        .filter(|t| check_assumption(std::slice::from_ref(t)).is_ok())
        .filter(|t| t.linear_factor().is_none())
        .collect()
}

/// Random direct model with a pure delay of one sample that the law can be
/// solved for: one output lag, a dominant `u[k-1]` or `phi1[k-1]` term and a
/// few small nonlinear terms.
pub fn random_direct_model(rng: &mut ChaCha8Rng, pool: &[Term]) -> NarxModel<f64> {
    let delay = if rng.gen_bool(0.5) {
        "u[k-1]"
    } else {
        "phi1[k-1]"
    };
    let mut ts = terms(&["y[k-1]", delay]);
    let mut theta = vec![rng.gen_range(0.2..0.8), rng.gen_range(1.0..2.0)];
    let extra = rng.gen_range(1..4);
    while ts.len() < 2 + extra {
        let t = pool[rng.gen_range(0..pool.len())].clone();
        if !ts.contains(&t) && !t.is_constant() {
            ts.push(t);
            theta.push(rng.gen_range(-0.05..0.05));
        }
    }
    NarxModel::from_terms(ts, theta, 0.001).unwrap()
}

/// Two-tone reference at 1 kHz.
pub fn two_tone(n: usize) -> Signal<f64> {
    let tau = std::f64::consts::TAU;
    Signal::new(
        (0..n)
            .map(|k| {
                let k = k as f64;
                0.8 * (tau * k / 200.0).sin() + 0.3 * (tau * k / 37.0).sin()
            })
            .collect(),
        0.001,
    )
    .unwrap()
}

pub fn sine(amplitude: f64, freq_hz: f64) -> InputSpec<f64> {
    InputSpec::Sinusoid {
        amplitude,
        freq_hz,
        offset: 0.0,
    }
}

pub fn sim(dt: f64, sample_time: f64, duration: f64) -> SimConfig {
    SimConfig {
        dt,
        sample_time,
        duration,
        seed: 1,
    }
}

/// Plant output for 40 sin(2 pi t) at the instants `k * sample_time`,
/// integrated with step `dt`.
pub fn sampled_at(dt: f64, sample_time: f64) -> Vec<f64> {
    simulate_bouc_wen::<f64>(
        &BoucWenParams::default(),
        &sine(40.0, 1.0),
        &sim(dt, sample_time, 2.0),
    )
    .unwrap()
    .y
    .into_samples()
}

/// Observed convergence orders of the plant integrator between successive
/// halvings of the step, against a reference at 1/256 of the sample time.
pub fn rk4_orders(sample_time: f64) -> Vec<f64> {
    let reference = sampled_at(sample_time / 256.0, sample_time);
    let err = |dt: f64| {
        sampled_at(dt, sample_time)
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let e: Vec<f64> = [2.0, 4.0, 8.0]
        .iter()
        .map(|d| err(sample_time / d))
        .collect();
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Butterworth poles from the analog prototype mapped through the bilinear
/// transform with a pre-warped cutoff.
pub fn bilinear_oracle(order: usize, cutoff: f64, fs: f64) -> Vec<Complex64> {
    let wc = 2.0 * fs * (std::f64::consts::PI * cutoff / fs).tan();
    (0..order)
        .map(|k| {
            let angle = std::f64::consts::PI * (0.5 + (2 * k + 1) as f64 / (2 * order) as f64);
            let s = Complex64::from_polar(wc, angle);
            (2.0 * fs + s) / (2.0 * fs - s)
        })
        .collect()
}

/// Largest distance from a wanted pole to its nearest computed pole, or
/// infinity when the counts differ.
pub fn pole_gap(got: &[Complex64], want: &[Complex64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    want.iter()
        .map(|w| {
            got.iter()
                .map(|g| (g - w).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

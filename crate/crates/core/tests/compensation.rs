use hysnarx::compensation::{
    decompose_direct, read_law, run_compensator, synthesize_direct, synthesize_inverse, write_law,
    CompensatorLaw, LawKind, LawTerm,
};
use hysnarx::narx::{
    generate_term_pool, one_step_predict, ExclusionRules, ModelMeta, NarxModel, Signal,
};
use hysnarx::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{compliant_pool, random_direct_model, terms, two_tone};

fn law_term(s: &str) -> LawTerm {
    s.parse().unwrap()
}

#[test]
fn direct_law_inverts_its_model_on_its_own_trajectory() {
    let pool = compliant_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let r = two_tone(2000);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 20 {
        let model = random_direct_model(&mut rng, &pool);
        let law = synthesize_direct(&model).unwrap();
        let Ok(m) = run_compensator(&law, &r, &[]) else {
            continue;
        };
        if m.samples().iter().any(|v| v.abs() > 1e3) {
            continue;
        }
        let rr = Signal::new(r.samples()[..m.len()].to_vec(), r.sample_time()).unwrap();
        let y = one_step_predict(&model, &m, &rr).unwrap();
        let start = model.warmup().max(law.warmup() + 1);
        for k in start..m.len() {
            worst = worst.max((y.samples()[k] - rr.samples()[k]).abs());
        }
        checked += 1;
    }
    assert!(worst <= 1e-8, "worst one-step mismatch {worst:e}");
}

proptest! {
    #[test]
    fn decomposition_reassembles_the_model(seed in 0u64..5000) {
        let pool = compliant_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_direct_model(&mut rng, &pool);
        let back = decompose_direct(&model).unwrap().reassemble().unwrap();
        prop_assert_eq!(back.terms(), model.terms());
        for (a, b) in back.theta().iter().zip(model.theta()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        prop_assert_eq!(back.meta(), model.meta());
    }

    #[test]
    fn inverse_law_keeps_one_term_per_model_term(seed in 0u64..5000) {
        let pool = generate_term_pool(3, 2, 2, &ExclusionRules::full()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ts = terms(&["y[k-1]", "phi1[k-1]"]);
        while ts.len() < 5 {
            let t = pool[rng.gen_range(0..pool.len())].clone();
            if !ts.contains(&t) {
                ts.push(t);
            }
        }
        let theta: Vec<f64> = ts.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let model = NarxModel::from_terms(ts, theta, 0.001).unwrap().with_tau_s(2);
        let law = synthesize_inverse(&model).unwrap();
        prop_assert_eq!(law.terms.len(), model.len());
        prop_assert_eq!(law.horizon, 1);
        law.validate().unwrap();
    }

    #[test]
    fn law_text_round_trip_is_exact(seed in 0u64..5000) {
        let pool = compliant_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let law = synthesize_direct(&random_direct_model(&mut rng, &pool)).unwrap();
        let back: CompensatorLaw<f64> = read_law(&write_law(&law)).unwrap();
        prop_assert_eq!(back, law);
    }
}

#[test]
fn published_direct_model_gives_the_published_law() {
    let th: [f64; 6] = [1.00, 0.77, 1.44e-2, -9.60e-3, 3.15e-4, -2.47e-4];
    let model = NarxModel::from_terms(
        terms(&[
            "y[k-1]",
            "phi1[k-1]",
            "phi2[k-2]*phi1[k-2]*u[k-2]",
            "phi2[k-2]*phi1[k-2]*y[k-1]",
            "phi1[k-2]*u[k-2]^2",
            "phi1[k-2]*u[k-2]*y[k-1]",
        ]),
        th.to_vec(),
        0.001,
    )
    .unwrap();
    let law = synthesize_direct(&model).unwrap();
    assert_eq!(law.kind, LawKind::Direct);
    assert!((law.gain - 1.0 / th[1]).abs() < 1e-15);
    assert_eq!(law.horizon, 1);
    let expected = [
        ("r[j+1]", 1.0),
        ("r[j]", -th[0]),
        ("m[j-1]", th[1]),
        ("sm[j-1]*dm[j-1]*m[j-1]", -th[2]),
        ("sm[j-1]*dm[j-1]*r[j]", -th[3]),
        ("dm[j-1]*m[j-1]^2", -th[4]),
        ("dm[j-1]*m[j-1]*r[j]", -th[5]),
    ];
    assert_eq!(law.terms.len(), expected.len());
    for (t, c) in expected {
        let got = law
            .coefficient(&law_term(t))
            .unwrap_or_else(|| panic!("missing {t}"));
        assert!((got - c).abs() < 1e-15, "{t}: {got} vs {c}");
    }
}

#[test]
fn published_inverse_model_gives_the_published_law() {
    let th: [f64; 6] = [1.00, 1.27, -2.13e-2, 1.37e-2, -1.07e-5, 7.99e-6];
    let model = NarxModel::from_terms(
        terms(&[
            "y[k-1]",
            "phi1[k-1]",
            "phi2[k-1]*phi1[k-1]*y[k-1]",
            "phi2[k-1]*phi1[k-1]*u[k-1]",
            "phi2[k-1]*u[k-1]*y[k-1]",
            "phi2[k-1]*u[k-1]^2",
        ]),
        th.to_vec(),
        0.001,
    )
    .unwrap()
    .with_tau_s(2);
    let law = synthesize_inverse(&model).unwrap();
    assert_eq!(law.kind, LawKind::Inverse);
    assert_eq!(law.gain, 1.0);
    assert_eq!(law.horizon, 1);
    let expected = [
        ("m[j-1]", th[0]),
        ("dr[j+1]", th[1]),
        ("sr[j+1]*dr[j+1]*m[j-1]", th[2]),
        ("sr[j+1]*dr[j+1]*r[j+1]", th[3]),
        ("sr[j+1]*r[j+1]*m[j-1]", th[4]),
        ("sr[j+1]*r[j+1]^2", th[5]),
    ];
    assert_eq!(law.terms.len(), expected.len());
    for (t, c) in expected {
        assert_eq!(law.coefficient(&law_term(t)), Some(c), "{t}");
    }
}

#[test]
fn identity_inverse_law_shifts_the_reference() {
    let model = NarxModel::new(
        terms(&["u[k-1]"]),
        vec![1.0],
        ModelMeta {
            n_y: 0,
            n_u: 1,
            tau_d: 1,
            tau_s: 2,
            sample_time: 0.001,
        },
    )
    .unwrap();
    let law = synthesize_inverse(&model).unwrap();
    let r = two_tone(50);
    let m = run_compensator(&law, &r, &[]).unwrap();
    for j in law.warmup()..m.len() {
        assert_eq!(m.samples()[j], r.samples()[j + 1]);
    }
}

#[test]
fn inverse_needs_enough_lead() {
    let model = NarxModel::from_terms(terms(&["y[k-1]", "u[k-1]"]), vec![0.5, 1.0], 0.001)
        .unwrap()
        .with_tau_s(1);
    assert!(matches!(
        synthesize_inverse(&model),
        Err(Error::Causality(_))
    ));
}

#[test]
fn law_reading_the_present_is_rejected() {
    let law = CompensatorLaw {
        kind: LawKind::Direct,
        gain: 1.0,
        terms: vec![(law_term("m[j]"), 1.0)],
        horizon: 1,
        tau_d: 1,
        tau_s: 0,
        sample_time: 0.001,
    };
    assert!(matches!(law.validate(), Err(Error::Causality(_))));
}

#[test]
fn experimental_direct_model_gives_the_experimental_law() {
    let model = NarxModel::from_terms(
        terms(&[
            "y[k-1]",
            "phi1[k-2]",
            "phi1[k-1]",
            "phi2[k-2]*phi1[k-2]*u[k-2]",
            "phi2[k-2]*phi1[k-2]*y[k-1]",
        ]),
        vec![1.0f64, -19.76, 19.32, 9.44, -12.61],
        0.001,
    )
    .unwrap();
    let law = synthesize_direct(&model).unwrap();
    assert!((law.gain - 1.0 / 19.32).abs() <= 1e-12);
    let expected = [
        ("r[j+1]", 1.0),
        ("r[j]", -1.0f64),
        ("m[j-1]", 19.32),
        ("dm[j-1]", 19.76),
        ("sm[j-1]*dm[j-1]*m[j-1]", -9.44),
        ("sm[j-1]*dm[j-1]*r[j]", 12.61),
    ];
    assert_eq!(law.terms.len(), expected.len());
    for (t, c) in expected {
        let got = law
            .coefficient(&law_term(t))
            .unwrap_or_else(|| panic!("missing {t}"));
        assert!((got - c).abs() <= 1e-12, "{t}: {got} vs {c}");
    }
}

#[test]
fn experimental_inverse_model_gives_the_experimental_law() {
    let model = NarxModel::from_terms(
        terms(&[
            "y[k-1]",
            "phi1[k-1]",
            "phi1[k-2]",
            "phi1[k-1]*u[k-2]",
            "phi2[k-2]*phi1[k-2]*u[k-2]",
            "phi2[k-2]*phi1[k-2]*y[k-1]",
        ]),
        vec![1.0f64, 86.67, -85.02, -0.98, 1.72, -1.13],
        0.001,
    )
    .unwrap()
    .with_tau_s(2);
    let law = synthesize_inverse(&model).unwrap();
    assert_eq!(law.gain, 1.0);
    let expected = [
        ("m[j-1]", 1.0f64),
        ("dr[j+1]", 86.67),
        ("dr[j]", -85.02),
        ("dr[j+1]*r[j]", -0.98),
        ("sr[j]*dr[j]*r[j]", 1.72),
        ("sr[j]*dr[j]*m[j-1]", -1.13),
    ];
    assert_eq!(law.terms.len(), expected.len());
    for (t, c) in expected {
        let got = law
            .coefficient(&law_term(t))
            .unwrap_or_else(|| panic!("missing {t}"));
        assert!((got - c).abs() <= 1e-12, "{t}: {got} vs {c}");
    }
}

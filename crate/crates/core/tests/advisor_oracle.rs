mod common;

use ant_system::advisor::{
    alpha_coefficients, beta_coefficients, sigmoid_basis, Advisor, CoefficientFile, CosineSurface,
    SigmoidSurface, ALPHA_BAND, BETA_BAND,
};
use ant_system::roadmap::FeatureVector;
use common::{alpha_oracle, alpha_table, beta_oracle, beta_table, logistic};
use proptest::prelude::*;

#[test]
fn coefficients_match_published_tables() {
    for (co, t) in [
        (alpha_coefficients(), alpha_table()),
        (beta_coefficients(), beta_table()),
    ] {
        assert_eq!(co.a, t["a"]);
        for i in 1..=5 {
            assert_eq!(co.b[i - 1], t[&format!("b{i}")]);
            assert_eq!(co.c[i - 1], t[&format!("c{i}")]);
        }
        for i in 1..=4 {
            for j in 1..=(5 - i) {
                assert_eq!(co.d(i, j), t[&format!("d{i}{j}")], "d{i}{j}");
            }
        }
    }
}

#[test]
fn third_logistic_basis_at_one() {
    // 1 + 1 - 0.8 = 1.2 over width 0.12 gives exp(-10)
    let expected = -1.0 + 2.0 / (1.0 + (-10.0f64).exp());
    assert!((sigmoid_basis(3, 1.0) - expected).abs() < 1e-15);
    assert!((sigmoid_basis(3, 1.0) - 0.999_909_204_262_595_1).abs() < 1e-15);
}

#[test]
fn cosine_surface_at_scaled_origin_is_coefficient_sum() {
    let s = CosineSurface::default();
    let v = s.evaluate(50.0, 0.0).value;
    let total: f64 = beta_table().values().sum();
    assert!((v - 3.113).abs() < 1e-12);
    assert!((v - total).abs() < 1e-12);
}

#[test]
fn surfaces_agree_with_reference_on_a_grid() {
    let alpha = SigmoidSurface::default();
    let beta = CosineSurface::default();
    for i in 0..=40 {
        for j in 0..=25 {
            let n = 50.0 + 450.0 * i as f64 / 40.0;
            let s = j as f64 / 25.0;
            assert!((alpha.evaluate(n, s).value - alpha_oracle(n, s)).abs() < 1e-12);
            assert!((beta.evaluate(n, s).value - beta_oracle(n, s)).abs() < 1e-12);
        }
    }
}

#[test]
fn out_of_range_inputs_clamp_to_the_boundary() {
    let alpha = SigmoidSurface::default();
    let far = alpha.evaluate(5000.0, 3.0);
    assert!(far.clamped);
    assert_eq!(far.value, alpha.evaluate(500.0, 1.0).value);
    assert!(!alpha.evaluate(500.0, 1.0).clamped);
}

#[test]
fn recommendation_stays_in_bands() {
    let advisor = Advisor::default();
    for n in [2usize, 50, 120, 250, 400, 500, 10_000] {
        for s in [0.0, 0.2, 0.5, 0.9, 1.0, 4.0] {
            let f = FeatureVector {
                n,
                width: 300.0,
                height: 300.0,
                sigma_v: s,
            };
            let r = advisor.recommend_for_features(f);
            assert!((ALPHA_BAND.0..=ALPHA_BAND.1).contains(&r.alpha));
            assert!((BETA_BAND.0..=BETA_BAND.1).contains(&r.beta));
            assert!((r.raw_alpha - alpha_oracle(n as f64, s)).abs() < 1e-12);
            assert!((r.raw_beta - beta_oracle(n as f64, s)).abs() < 1e-12);
            assert_eq!(r.clamped, r.alpha != r.raw_alpha || r.beta != r.raw_beta);
        }
    }
}

#[test]
fn coefficient_file_round_trip_preserves_evaluation() {
    let mut text = String::from("function = cosine\nx_range = 50 500\na = 1.5\n");
    for i in 1..=5 {
        let b = if i == 1 { 0.25 } else { 0.0 };
        text.push_str(&format!("b{i} = {b}, c{i} = 0\n"));
    }
    for i in 1..=4 {
        for j in 1..=(5 - i) {
            let d = if (i, j) == (2, 3) { -0.5 } else { 0.0 };
            text.push_str(&format!("d{i}{j} = {d}\n"));
        }
    }
    let file: CoefficientFile = text.parse().unwrap();
    let again: CoefficientFile = file.to_text().parse().unwrap();
    assert_eq!(again, file);
    // cos(pi) = -1, cos(2 pi) = 1 and cos(3 pi) = -1 at the upper corner
    let v = file.into_cosine().evaluate(500.0, 1.0).value;
    assert!((v - (1.5 - 0.25 + 0.5)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn logistic_basis_is_bounded_and_matches_reference(i in 1usize..=5, x in -1.0f64..=1.0) {
        let v = sigmoid_basis(i, x);
        prop_assert!((-1.0..=1.0).contains(&v));
        prop_assert!((v - logistic(i, x)).abs() < 1e-15);
    }

    #[test]
    fn logistic_basis_is_nondecreasing(i in 1usize..=5, x in -1.0f64..1.0, dx in 0.0f64..0.5) {
        prop_assert!(sigmoid_basis(i, x) <= sigmoid_basis(i, (x + dx).min(1.0)));
    }

    #[test]
    fn surfaces_agree_with_reference(n in 0.0f64..800.0, s in -0.5f64..1.5) {
        let a = SigmoidSurface::default().evaluate(n, s).value;
        let b = CosineSurface::default().evaluate(n, s).value;
        prop_assert!((a - alpha_oracle(n, s)).abs() < 1e-12);
        prop_assert!((b - beta_oracle(n, s)).abs() < 1e-12);
    }
}

use proptest::prelude::*;
use safehorizon::{
    horizon_closed_form_double_rate, horizon_time, k_linear, Anticipation, DeploymentSchedule,
};

fn t_hor(s: &DeploymentSchedule, t: f64, k: f64, mode: Anticipation) -> f64 {
    horizon_time(s, t, k, mode).unwrap().t_hor.finite().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn linear_growth_matches_closed_form(
        rate in 1e-3..1e3f64,
        op_rate in 1e-2..1e5f64,
        k in 0.0..50.0f64,
        t in 1e-2..1e3f64,
    ) {
        let s = DeploymentSchedule::linear(rate, op_rate).unwrap();
        let h = t_hor(&s, t, k, Anticipation::Aware);
        prop_assert!((h - k_linear(k) * t).abs() < 1e-8 * t);
    }

    #[test]
    fn constant_fleet_horizon_is_k_t(n in 0.1..1e3f64, k in 0.0..50.0f64, t in 1e-2..1e3f64) {
        let s = DeploymentSchedule::constant_fleet(n, 3.0).unwrap();
        let h = t_hor(&s, t, k, Anticipation::Aware);
        prop_assert!((h - k * t).abs() < 1e-9 * t.max(1.0) * k.max(1.0));
    }

    #[test]
    fn anticipation_never_lengthens_horizon(
        factor in 1.0..8.0f64,
        step in 1.0..20.0f64,
        t in 0.1..40.0f64,
        k in 0.1..20.0f64,
    ) {
        let s = DeploymentSchedule::step(1.0, step, factor, 1.0).unwrap();
        let aware = t_hor(&s, t, k, Anticipation::Aware);
        let unaware = t_hor(&s, t, k, Anticipation::Unaware);
        prop_assert!(aware <= unaware + 1e-9 * t.max(1.0));
    }
}

#[test]
fn double_rate_agrees_with_closed_form() {
    let s = DeploymentSchedule::step(1.0, 5.0, 2.0, 1.0).unwrap();
    for i in 0..=450 {
        let t = 5.0 + 0.1 * i as f64;
        let solver = t_hor(&s, t, 5.0, Anticipation::Aware);
        let closed = horizon_closed_form_double_rate(t, 5.0, 5.0).unwrap();
        assert!(
            (solver - closed).abs() < 1e-9,
            "t={t}: {solver} vs {closed}"
        );
    }
}

#[test]
fn aware_dip_starts_before_the_step() {
    let s = DeploymentSchedule::step(1.0, 5.0, 4.0, 1.0).unwrap();
    // At t = 3 the horizon of 3 (sqrt 6 - 1) reaches past the step at 5.
    let aware = t_hor(&s, 3.0, 5.0, Anticipation::Aware);
    let unaware = t_hor(&s, 3.0, 5.0, Anticipation::Unaware);
    assert!(aware < unaware - 1e-3);
    // Before the horizon reaches the step both agree.
    let aware = t_hor(&s, 1.0, 5.0, Anticipation::Aware);
    let unaware = t_hor(&s, 1.0, 5.0, Anticipation::Unaware);
    assert!((aware - unaware).abs() < 1e-12);
}

#[test]
fn recovery_after_step_is_monotone() {
    let s = DeploymentSchedule::step(1.0, 5.0, 4.0, 1.0).unwrap();
    let mut prev = 0.0;
    for i in 0..=4500 {
        let t = 5.0 + 0.01 * i as f64;
        let h = t_hor(&s, t, 5.0, Anticipation::Aware);
        assert!(h >= prev - 1e-12, "t={t}");
        prev = h;
    }
    // Closed form (30 + sqrt(900 - 16 (75 - 12 T(t)))) / 8 - t, T the stepped operation.
    let ratio = t_hor(&s, 50.0, 5.0, Anticipation::Aware) / 50.0;
    assert!((ratio - 1.342_845_894_235_32).abs() < 1e-9);
    // The dip fades as 1/t: within 2% of k_linear from t ≈ 186.6 on.
    let ratio = t_hor(&s, 200.0, 5.0, Anticipation::Aware) / 200.0;
    assert!((ratio - k_linear(5.0)).abs() < 0.02 * k_linear(5.0));
    let ratio = t_hor(&s, 180.0, 5.0, Anticipation::Aware) / 180.0;
    assert!((ratio - k_linear(5.0)).abs() > 0.02 * k_linear(5.0));
}

#[test]
fn retirement_restores_k() {
    let age = 10.0;
    let s = DeploymentSchedule::linear(2.0, 5.0)
        .unwrap()
        .with_retirement(Some(age))
        .unwrap();
    let t = 100.0 * age;
    let ratio = t_hor(&s, t, 5.0, Anticipation::Aware) / t;
    assert!((ratio - 5.0).abs() < 0.02 * 5.0, "{ratio}");
    // k (1 - age / 2t) exactly, once the fleet is constant
    assert!((ratio - 5.0 * (1.0 - age / (2.0 * t))).abs() < 1e-9);
    // Early on, growth keeps the ratio near k_linear.
    let early = t_hor(&s, 1.0, 5.0, Anticipation::Aware);
    assert!(early < 5.0);
}

//! Property tests for the module invariants that hold over whole domains
//! rather than at worked points.

use proptest::prelude::*;

use qcournot::classical::{self, ClassicalQuantities, CountDistribution};
use qcournot::equilibrium::{closed_form_nash, numeric_nash};
use qcournot::quantum::{
    apply_loss, compensate_loss, mix_amplitudes, payoffs_closed, payoffs_mc, payoffs_series,
    GamePoint, LossChannel, ModeIntensities, StrategyPair, GAMMA_MAX,
};

fn gamma_strategy() -> impl Strategy<Value = f64> {
    0.0..(GAMMA_MAX - 1e-9)
}

proptest! {
    #[test]
    fn beam_splitter_conserves_intensity(
        x1 in 0.0..6.0_f64,
        x2 in 0.0..6.0_f64,
        gamma in gamma_strategy(),
    ) {
        let s = StrategyPair::new(x1, x2).unwrap();
        let modes = ModeIntensities::new(s, gamma);
        let total = 0.5 * (x1 * x1 + x2 * x2);
        prop_assert!((modes.n1 + modes.lambda2 - total).abs() < 1e-14);
        // The mixed amplitudes carry the same intensities.
        let (a1, a2) = mix_amplitudes(s, gamma);
        prop_assert!((a1.norm_sqr() - modes.n1).abs() < 1e-13);
        prop_assert!((a2.norm_sqr() - modes.lambda2).abs() < 1e-13);
    }

    #[test]
    fn series_tracks_closed_form(
        x1_sq in 0.0..40.0_f64,
        x2_sq in 0.0..40.0_f64,
        k in 1.0..20.0_f64,
        gamma in gamma_strategy(),
    ) {
        let s = StrategyPair::from_squares(x1_sq, x2_sq).unwrap();
        let g = GamePoint::new(k, gamma).unwrap();
        let closed = payoffs_closed(s, g);
        let series = payoffs_series(s, g, 1e-12).unwrap();
        prop_assert!((closed.0 - series.0).abs() < 1e-9);
        prop_assert!((closed.1 - series.1).abs() < 1e-9);
    }

    #[test]
    fn gamma_zero_is_the_classical_poisson_game(
        x1_sq in 0.0..30.0_f64,
        x2_sq in 0.0..30.0_f64,
        k in 1.0..20.0_f64,
    ) {
        let s = StrategyPair::from_squares(x1_sq, x2_sq).unwrap();
        let g = GamePoint::new(k, 0.0).unwrap();
        let quantum = payoffs_closed(s, g);
        let q = ClassicalQuantities::new(x1_sq / 2.0, x2_sq / 2.0, k).unwrap();
        let classical = classical::payoffs(q, &CountDistribution::Poisson).unwrap();
        prop_assert!((quantum.0 - classical.0).abs() < 1e-12);
        prop_assert!((quantum.1 - classical.1).abs() < 1e-12);
    }

    #[test]
    fn compensated_loss_leaves_payoffs_alone(
        x1 in 0.0..5.0_f64,
        x2 in 0.0..5.0_f64,
        k in 1.0..20.0_f64,
        gamma in gamma_strategy(),
        kappa_t in 0.0..3.0_f64,
    ) {
        let s = StrategyPair::new(x1, x2).unwrap();
        let g = GamePoint::new(k, gamma).unwrap();
        let ch = LossChannel::new(kappa_t, 1.0).unwrap();
        let before = payoffs_closed(s, g);
        let after = payoffs_closed(apply_loss(compensate_loss(s, ch), ch), g);
        prop_assert!((before.0 - after.0).abs() < 1e-12);
        prop_assert!((before.1 - after.1).abs() < 1e-12);
    }

    #[test]
    fn mandel_form_is_the_variance_form(
        q1 in 0.0..10.0_f64,
        q2 in 0.01..10.0_f64,
        k in 1.0..20.0_f64,
        sigma2 in 0.0..5.0_f64,
    ) {
        for dist in [
            CountDistribution::Poisson,
            CountDistribution::ConstantVariance(sigma2),
            CountDistribution::Deterministic,
        ] {
            let q = ClassicalQuantities::new(q1, q2, k).unwrap();
            let (mq, _) = classical::mandel_q(&dist, q2).unwrap();
            let direct = classical::payoffs(q, &dist).unwrap();
            let via_q = classical::payoffs_mandel_form(q, mq);
            prop_assert!((direct.0 - via_q.0).abs() < 1e-12);
            prop_assert!((direct.1 - via_q.1).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_variance_equilibrium_gap_is_sigma2(
        sigma2 in 0.0..4.0_f64,
        k in 1.0..20.0_f64,
    ) {
        let dist = CountDistribution::ConstantVariance(sigma2);
        let (q1, q2) = classical::nash(&dist, k).unwrap();
        let (u1, u2) =
            classical::payoffs(ClassicalQuantities::new(q1, q2, k).unwrap(), &dist).unwrap();
        prop_assert!((u1 - u2 - sigma2).abs() < 1e-9);
    }

    #[test]
    fn mc_same_seed_same_answer(
        x1_sq in 0.0..20.0_f64,
        x2_sq in 0.0..20.0_f64,
        k in 1.0..10.0_f64,
        gamma in gamma_strategy(),
        seed in any::<u64>(),
    ) {
        let s = StrategyPair::from_squares(x1_sq, x2_sq).unwrap();
        let g = GamePoint::new(k, gamma).unwrap();
        let a = payoffs_mc(s, g, 2_000, seed).unwrap();
        let b = payoffs_mc(s, g, 2_000, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn formatted_numbers_parse_back(
        x in -1e6..1e6_f64,
    ) {
        let text = qcournot::cli::format_sig(x, 12);
        let parsed: f64 = text.parse().unwrap();
        let scale = x.abs().max(1e-300);
        prop_assert!(((parsed - x) / scale).abs() < 1e-10, "{x} -> {text} -> {parsed}");
    }
}

proptest! {
    // The numeric oracle is slower, so fewer cases.
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn numeric_and_closed_equilibria_agree(
        k in 1.0..20.0_f64,
        gamma in 0.0..(GAMMA_MAX - 1e-3),
    ) {
        let g = GamePoint::new(k, gamma).unwrap();
        // Convergence slows right at the transition kink; the oracles are
        // compared there separately with one-sided tolerances.
        if let Some(gc) = qcournot::equilibrium::transition_gamma(k) {
            prop_assume!((gamma - gc).abs() > 1e-3);
        }
        let closed = closed_form_nash(g);
        let numeric = numeric_nash(g, 1e-10).unwrap();
        prop_assert!((closed.x1_sq - numeric.x1_sq).abs() < 1e-8);
        prop_assert!((closed.x2_sq - numeric.x2_sq).abs() < 1e-8);
    }
}

//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one `criterion N: PASS/FAIL` line (visible with `--nocapture`).
//!
//! Criterion 4's derivative clause asserts that the one-sided first
//! gamma-derivatives of the equilibrium payoffs agree across the transition
//! angle. They provably do not (the equilibrium strategy's slope jumps
//! between regimes, and the payoffs inherit an O(1) kink through the
//! cross-term of the envelope), so that single check fails and is expected
//! to: the suite reports the measured jumps rather than papering over them.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcournot::analysis::{
    asymmetry_measures, boundary_values, classify_region, payoff_sum_diff, scaled_diff, RegionLabel,
};
use qcournot::equilibrium::{closed_form_nash, nash_payoffs, numeric_nash, transition_gamma};
use qcournot::quantum::{
    apply_loss, compensate_loss, payoffs_closed, payoffs_mc, payoffs_series, GamePoint,
    LossChannel, ModeIntensities, StrategyPair, GAMMA_MAX,
};

const K_GRID_POINTS: usize = 25;
const GAMMA_GRID_POINTS: usize = 25;

fn k_grid() -> Vec<f64> {
    (0..K_GRID_POINTS)
        .map(|i| 1.0 + 19.0 * i as f64 / (K_GRID_POINTS - 1) as f64)
        .collect()
}

fn gamma_grid() -> Vec<f64> {
    let max = GAMMA_MAX - 1e-3;
    (0..GAMMA_GRID_POINTS)
        .map(|j| max * j as f64 / (GAMMA_GRID_POINTS - 1) as f64)
        .collect()
}

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} ({detail})");
}

#[test]
fn criterion_1_equilibrium_cross_validation() {
    let start = Instant::now();
    let mut max_strategy_err = 0.0_f64;
    let mut max_payoff_err = 0.0_f64;
    for &k in &k_grid() {
        for &gamma in &gamma_grid() {
            let g = GamePoint::new(k, gamma).unwrap();
            let closed = closed_form_nash(g);
            let numeric = numeric_nash(g, 1e-11).unwrap();
            max_strategy_err = max_strategy_err
                .max((closed.x1_sq - numeric.x1_sq).abs())
                .max((closed.x2_sq - numeric.x2_sq).abs());
            max_payoff_err = max_payoff_err
                .max((closed.u1 - numeric.u1).abs())
                .max((closed.u2 - numeric.u2).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_strategy_err < 1e-8 && max_payoff_err < 1e-8 && elapsed < 60.0;
    report(
        1,
        pass,
        &format!(
            "25x25 grid: strategy err {max_strategy_err:.2e}, payoff err \
             {max_payoff_err:.2e}, {elapsed:.1} s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_payoff_oracle_triangle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_808);
    let mut max_series_err = 0.0_f64;
    let mut worst_sigma = 0.0_f64;
    for i in 0..50 {
        let k = rng.gen_range(1.0..20.0);
        let gamma = rng.gen_range(0.0..GAMMA_MAX - 1e-9);
        let x1_sq = rng.gen_range(0.0..2.0 * k);
        let x2_sq = rng.gen_range(0.0..2.0 * k);
        let g = GamePoint::new(k, gamma).unwrap();
        let s = StrategyPair::from_squares(x1_sq, x2_sq).unwrap();

        let (u1_c, u2_c) = payoffs_closed(s, g);
        let (u1_s, u2_s) = payoffs_series(s, g, 1e-12).unwrap();
        max_series_err = max_series_err
            .max((u1_c - u1_s).abs())
            .max((u2_c - u2_s).abs());

        let est = payoffs_mc(s, g, 1_000_000, 7000 + i).unwrap();
        let modes = ModeIntensities::new(s, gamma);
        let stderr1 = modes.n1 * (modes.lambda2 / 1e6).sqrt();
        let z1 = (est.u1 - u1_c).abs() / stderr1.max(1e-12);
        let z2 = (est.u2 - u2_c).abs() / est.stderr2.max(1e-12);
        worst_sigma = worst_sigma.max(z1).max(z2);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_series_err < 1e-9 && worst_sigma < 4.0 && elapsed < 30.0;
    report(
        2,
        pass,
        &format!(
            "50 points: closed-vs-series err {max_series_err:.2e}, worst MC \
             deviation {worst_sigma:.2} sigma, {elapsed:.1} s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_gamma_zero_classical_reduction() {
    let mut max_err = 0.0_f64;
    for &k in &[1.0, 1.5, 2.0, 3.0, 4.0, 10.0, 50.0] {
        let g = GamePoint::new(k, 0.0).unwrap();
        let (u1, u2) = nash_payoffs(g);
        let (_, _, e1, e2) = qcournot::classical::poisson_equilibrium(k).unwrap();
        max_err = max_err.max((u1 - e1).abs()).max((u2 - e2).abs());
    }
    // Spot value: k = 4 gives (25/9, 4/9).
    let (u1, u2) = nash_payoffs(GamePoint::new(4.0, 0.0).unwrap());
    max_err = max_err
        .max((u1 - 25.0 / 9.0).abs())
        .max((u2 - 4.0 / 9.0).abs());
    let pass = max_err < 1e-12;
    report(3, pass, &format!("max err {max_err:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_4_transition_behavior() {
    // Strategy/payoff agreement of the two branch formulas at gamma_c.
    let mut max_value_err = 0.0_f64;
    for &k in &[2.5, 3.0, 4.0, 6.0, 10.0] {
        let gc = transition_gamma(k).unwrap();
        let c2 = (2.0 * gc).cos();
        let cc = gc.cos().powi(2);
        let scale = 2.0 * cc / (2.0 + c2);
        let x1_interior = scale * (k + 1.0 / c2);
        let x2_interior = scale * (k - 1.0 - 1.0 / c2);
        max_value_err = max_value_err
            .max((x1_interior - k).abs())
            .max(x2_interior.abs());

        let denom = 4.0 * (2.0 + c2) * (2.0 + c2);
        let u1_interior = cc * (1.0 + 2.0 * k + c2).powi(2) / denom;
        let u2_interior = cc * (3.0 - 2.0 * k + c2).powi(2) / denom;
        let u1_corner = 0.25 * k * k * cc;
        let u2_corner = 0.25 * k * (k - 2.0) * gc.sin().powi(2);
        max_value_err = max_value_err
            .max((u1_interior - u1_corner).abs())
            .max((u2_interior - u2_corner).abs());
    }
    let values_pass = max_value_err < 1e-10;

    // One-sided first derivatives, h = 1e-6 on each side of gamma_c.
    let h = 1e-6;
    let mut max_jump = 0.0_f64;
    for &k in &[2.5, 3.0, 4.0, 6.0, 10.0] {
        let gc = transition_gamma(k).unwrap();
        let at = nash_payoffs(GamePoint::new(k, gc).unwrap());
        let below = nash_payoffs(GamePoint::new(k, gc - h).unwrap());
        let above = nash_payoffs(GamePoint::new(k, gc + h).unwrap());
        let left = ((at.0 - below.0) / h, (at.1 - below.1) / h);
        let right = ((above.0 - at.0) / h, (above.1 - at.1) / h);
        let jump1 = (left.0 - right.0).abs();
        let jump2 = (left.1 - right.1).abs();
        max_jump = max_jump.max(jump1).max(jump2);
        println!(
            "  k = {k}: dU1 left {:+.4} right {:+.4}, dU2 left {:+.4} right {:+.4}",
            left.0, right.0, left.1, right.1
        );
    }
    let derivatives_pass = max_jump < 1e-3;

    let pass = values_pass && derivatives_pass;
    report(
        4,
        pass,
        &format!(
            "branch values agree to {max_value_err:.2e}; first-derivative \
             agreement required < 1e-3 but the measured jump is {max_jump:.2} \
             -- the equilibrium payoffs have a genuine kink at gamma_c"
        ),
    );
    assert!(
        values_pass,
        "branch formulas disagree at gamma_c: {max_value_err:.2e}"
    );
    assert!(
        derivatives_pass,
        "one-sided payoff derivatives at gamma_c differ by up to {max_jump:.3}; \
         the payoff surface is continuous but not C1 across the transition"
    );
}

#[test]
fn criterion_5_dominance_and_monotonicity() {
    let h = 1e-6;
    let mut dominance_ok = true;
    let mut u2_sign_ok = true;
    let mut u1_set_ok = true;
    for &k in &k_grid() {
        let gc = transition_gamma(k);
        for &gamma in &gamma_grid() {
            let g = GamePoint::new(k, gamma).unwrap();
            let (u1, u2) = nash_payoffs(g);
            dominance_ok &= u1 >= u2;

            // Derivative signs only where the derivative is trustworthy:
            // off gamma = 0 (odd symmetry makes it vanish) and off the
            // transition kink.
            if gamma < 1e-4 {
                continue;
            }
            if let Some(gc) = gc {
                if (gamma - gc).abs() < 1e-4 {
                    continue;
                }
            }
            let up = nash_payoffs(GamePoint::new(k, gamma + h).unwrap());
            let down = nash_payoffs(GamePoint::new(k, gamma - h).unwrap());
            let d1 = (up.0 - down.0) / (2.0 * h);
            let d2 = (up.1 - down.1) / (2.0 * h);

            if k > 2.0 {
                u2_sign_ok &= d2 > 0.0;
            } else if k < 2.0 {
                u2_sign_ok &= d2 < 0.0;
            }

            let c2 = (2.0 * gamma).cos();
            let expected_rising = k > 5.0 && {
                let disc = 4.0 * k * k - 20.0 * k + 9.0;
                let bound = (2.0 * k - 5.0 - disc.sqrt()) / 2.0;
                // Skip hairline calls on the boundary curve itself.
                if (c2 - bound).abs() < 1e-6 {
                    continue;
                }
                c2 > bound
            };
            u1_set_ok &= (d1 > 0.0) == expected_rising;
        }
    }
    // U2 vanishes identically at k = 2.
    let mut u2_zero_ok = true;
    for &gamma in &gamma_grid() {
        let (_, u2) = nash_payoffs(GamePoint::new(2.0, gamma).unwrap());
        u2_zero_ok &= u2 == 0.0;
    }
    let pass = dominance_ok && u2_sign_ok && u1_set_ok && u2_zero_ok;
    report(
        5,
        pass,
        &format!(
            "dominance {dominance_ok}, dU2 signs {u2_sign_ok}, dU1 region match \
             {u1_set_ok}, U2(k=2) = 0 {u2_zero_ok}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_analysis_identities() {
    let mut max_err = 0.0_f64;
    for &k in &k_grid() {
        for &gamma in &gamma_grid() {
            let g = GamePoint::new(k, gamma).unwrap();
            let (u1, u2) = nash_payoffs(g);
            let (sum, diff) = payoff_sum_diff(g);
            max_err = max_err
                .max((sum - (u1 + u2)).abs())
                .max((diff - (u1 - u2)).abs());
            max_err = max_err.max((scaled_diff(g) - diff / (k * k)).abs());
        }
    }
    // Boundary values against direct evaluation at gamma_c.
    for &k in &[2.0, 2.5, 3.0, 4.0, 6.0, 10.0] {
        let gc = transition_gamma(k).unwrap();
        let g = GamePoint::new(k, gc).unwrap();
        let (sum, diff) = payoff_sum_diff(g);
        let (bdiff, bsum) = boundary_values(k).unwrap();
        max_err = max_err
            .max((diff / (k * k) - bdiff).abs())
            .max((sum / (k * k) - bsum).abs());
        // The measure-based route lands on the same boundary value.
        let m = asymmetry_measures(g);
        max_err = max_err.max((scaled_diff(g) - 0.25 * m.s).abs());
    }
    let pass = max_err < 1e-10;
    report(6, pass, &format!("max identity err {max_err:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_7_region_consistency() {
    let mut counts = [0usize; 4];
    let mut d_only_beyond_k5 = true;
    let mut failures = Vec::new();
    for &k in &k_grid() {
        let gc = transition_gamma(k);
        for &gamma in &gamma_grid() {
            if !(1e-4..=GAMMA_MAX - 1e-4).contains(&gamma) {
                continue;
            }
            if let Some(gc) = gc {
                if (gamma - gc).abs() < 1e-4 {
                    continue;
                }
            }
            let g = GamePoint::new(k, gamma).unwrap();
            match classify_region(g) {
                Ok(label) => {
                    counts[label as usize] += 1;
                    if label == RegionLabel::D && k <= 5.0 {
                        d_only_beyond_k5 = false;
                    }
                }
                Err(e) => failures.push(format!("({k}, {gamma}): {e}")),
            }
        }
    }
    let all_four_seen = counts.iter().all(|&c| c > 0);
    let pass = failures.is_empty() && d_only_beyond_k5 && all_four_seen;
    report(
        7,
        pass,
        &format!(
            "A/B/C/D = {}/{}/{}/{} points, {} unclassifiable, D confined to \
             k > 5: {d_only_beyond_k5}",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            failures.len()
        ),
    );
    for f in &failures {
        println!("  {f}");
    }
    assert!(pass);
}

#[test]
fn criterion_8_loss_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut max_dev = 0.0_f64;
    for _ in 0..100 {
        let k = rng.gen_range(1.0..20.0);
        let gamma = rng.gen_range(0.0..GAMMA_MAX - 1e-9);
        let g = GamePoint::new(k, gamma).unwrap();
        let s = StrategyPair::new(
            rng.gen_range(0.0..(2.0 * k).sqrt()),
            rng.gen_range(0.0..(2.0 * k).sqrt()),
        )
        .unwrap();
        let ch = LossChannel::new(rng.gen_range(0.0..3.0), 1.0).unwrap();
        let before = payoffs_closed(s, g);
        let after = payoffs_closed(apply_loss(compensate_loss(s, ch), ch), g);
        max_dev = max_dev
            .max((before.0 - after.0).abs())
            .max((before.1 - after.1).abs());
    }
    let pass = max_dev < 1e-12;
    report(
        8,
        pass,
        &format!("100 draws, max payoff deviation {max_dev:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_determinism() {
    let exe = env!("CARGO_BIN_EXE_qcournot");
    let dir = std::env::temp_dir().join("qcournot-acceptance");
    std::fs::create_dir_all(&dir).unwrap();

    let sweep_out = |name: &str| dir.join(name);
    let run_sweep = |name: &str| {
        let status = std::process::Command::new(exe)
            .current_dir(&dir)
            .env_remove("QCOURNOT_CONFIG")
            .args([
                "--out",
                sweep_out(name).to_str().unwrap(),
                "sweep",
                "--k-min",
                "1",
                "--k-max",
                "12",
                "--k-steps",
                "8",
                "--gamma-min",
                "0",
                "--gamma-max",
                "0.75",
                "--gamma-steps",
                "9",
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(sweep_out(name)).unwrap()
    };
    let sweep_a = run_sweep("a.csv");
    let sweep_b = run_sweep("b.csv");

    let run_mc = || {
        let output = std::process::Command::new(exe)
            .current_dir(&dir)
            .env_remove("QCOURNOT_CONFIG")
            .args([
                "payoff",
                "--k",
                "4",
                "--gamma",
                "0.3",
                "--x1-sq",
                "2",
                "--x2-sq",
                "1.5",
                "--method",
                "mc",
                "--samples",
                "200000",
                "--seed",
                "42",
            ])
            .output()
            .unwrap();
        assert!(output.status.success());
        output.stdout
    };
    let mc_a = run_mc();
    let mc_b = run_mc();

    let pass = sweep_a == sweep_b && mc_a == mc_b && !sweep_a.is_empty() && !mc_a.is_empty();
    report(
        9,
        pass,
        &format!(
            "sweep bytes identical: {}, mc bytes identical: {}",
            sweep_a == sweep_b,
            mc_a == mc_b
        ),
    );
    assert!(pass);
}

//! Nash equilibria of the coherent-state game.
//!
//! The equilibrium has two regimes split by the sign of
//! `cos(2 gamma) - 1/(k - 1)`:
//!
//! ```text
//! interior:  x1^2 = 2 cos^2(g) [k + sec 2g]     / (2 + cos 2g)
//!            x2^2 = 2 cos^2(g) [k - 1 - sec 2g] / (2 + cos 2g)
//! corner:    x1^2 = k,  x2^2 = 0
//! ```
//!
//! with matching closed-form payoffs. On the boundary curve
//! `cos(2 gamma) = 1/(k - 1)` the two strategy formulas coincide at
//! `(k, 0)`, so the split is continuous in strategies and payoffs. Firm 2's
//! equilibrium strategy vanishes continuously there, which is what makes the
//! boundary transition-like; the payoffs keep a kink in their first
//! gamma-derivative (see the tests).
//!
//! Everything closed-form is validated against [`numeric_nash`], an
//! alternating best-response iteration whose inner step is a derivative-free
//! one-dimensional search, computationally independent of the formulas it
//! checks.

use crate::error::{Error, Result};
use crate::quantum::{payoffs_closed, GamePoint, StrategyPair};

/// Tie width for labelling a point as exactly on the transition curve.
const BOUNDARY_TOL: f64 = 1e-12;

/// Interval tolerance of the golden-section stage.
const GOLDEN_TOL: f64 = 1e-10;

/// Iteration cap for the alternating best-response loop.
const MAX_BR_ITERATIONS: usize = 10_000;

/// Which side of the transition curve a game point falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Interior,
    Corner,
    Boundary,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Interior => "interior",
            Branch::Corner => "corner",
            Branch::Boundary => "boundary",
        }
    }
}

/// Equilibrium strategies, payoffs, and regime of one game instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub point: GamePoint,
    pub x1_sq: f64,
    pub x2_sq: f64,
    pub u1: f64,
    pub u2: f64,
    pub branch: Branch,
}

/// The firm whose best response is being computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Firm {
    One,
    Two,
}

/// Classify a game point against the transition curve
/// `cos(2 gamma) = 1/(k-1)`. At `k = 1` the threshold diverges, so the
/// corner regime holds without evaluating it.
pub fn branch_of(g: GamePoint) -> Branch {
    if g.k() == 1.0 {
        return Branch::Corner;
    }
    let gap = (2.0 * g.gamma()).cos() - 1.0 / (g.k() - 1.0);
    if gap.abs() <= BOUNDARY_TOL {
        Branch::Boundary
    } else if gap > 0.0 {
        Branch::Interior
    } else {
        Branch::Corner
    }
}

/// Angle at which the interior regime hands over to the corner, when it
/// exists inside `[0, pi/4)`; for `k < 2` the whole strip is corner.
pub fn transition_gamma(k: f64) -> Option<f64> {
    if k >= 2.0 {
        Some(0.5 * (1.0 / (k - 1.0)).acos())
    } else {
        None
    }
}

/// Closed-form Nash equilibrium of the game.
pub fn closed_form_nash(g: GamePoint) -> EquilibriumResult {
    let branch = branch_of(g);
    let (x1_sq, x2_sq) = match branch {
        Branch::Interior => {
            let c2 = (2.0 * g.gamma()).cos();
            let cc = g.gamma().cos().powi(2);
            let scale = 2.0 * cc / (2.0 + c2);
            (scale * (g.k() + 1.0 / c2), scale * (g.k() - 1.0 - 1.0 / c2))
        }
        // Both formulas give (k, 0) on the boundary; return it exactly.
        Branch::Corner | Branch::Boundary => (g.k(), 0.0),
    };
    let (u1, u2) = nash_payoffs(g);
    EquilibriumResult {
        point: g,
        x1_sq,
        x2_sq,
        u1,
        u2,
        branch,
    }
}

/// Equilibrium payoffs `(U1, U2)` in closed form.
pub fn nash_payoffs(g: GamePoint) -> (f64, f64) {
    let k = g.k();
    let cc = g.gamma().cos().powi(2);
    match branch_of(g) {
        Branch::Interior => {
            let c2 = (2.0 * g.gamma()).cos();
            let denom = 4.0 * (2.0 + c2) * (2.0 + c2);
            (
                cc * (1.0 + 2.0 * k + c2).powi(2) / denom,
                cc * (3.0 - 2.0 * k + c2).powi(2) / denom,
            )
        }
        Branch::Corner | Branch::Boundary => {
            let ss = g.gamma().sin().powi(2);
            (0.25 * k * k * cc, 0.25 * k * (k - 2.0) * ss)
        }
    }
}

/// Golden-section search for the maximizer of `f` on `[lo, hi]`, followed by
/// one parabolic-vertex refinement.
///
/// Pure golden-section comparisons stall once the bracket shrinks to the
/// scale where payoff differences fall under f64 rounding (about
/// `sqrt(eps) ~ 1e-7` here), which is coarser than the oracle agreement this
/// search must support. The payoff is exactly quadratic in the searched
/// variable, so a three-point parabola fit recovers the vertex to near
/// machine precision without consulting any equilibrium formula.
fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let rough = 0.5 * (a + b);

    // Refinement stencil wide enough that curvature dominates rounding.
    let h = (1e-2 * (hi - lo)).max(1e-3);
    let center = rough.clamp(lo + h, hi - h);
    let (fm, f0, fp) = (f(center - h), f(center), f(center + h));
    let curvature = fm - 2.0 * f0 + fp;
    if curvature < 0.0 {
        let vertex = center + 0.5 * h * (fm - fp) / curvature;
        vertex.clamp(lo, hi)
    } else {
        rough
    }
}

/// Best response of one firm to the other's squared magnitude: the argmax
/// of its closed-form payoff over its own `x^2` in `[0, 4k]`, clamped at 0.
pub fn best_response(firm: Firm, other_x_sq: f64, g: GamePoint) -> Result<f64> {
    if !(other_x_sq >= 0.0 && other_x_sq.is_finite()) {
        return Err(Error::Domain(format!(
            "other_x_sq = {other_x_sq} must be nonnegative"
        )));
    }
    let objective = |own: f64| -> f64 {
        let s = match firm {
            Firm::One => StrategyPair::from_squares(own, other_x_sq),
            Firm::Two => StrategyPair::from_squares(other_x_sq, own),
        }
        .expect("search stays inside the valid domain");
        let (u1, u2) = payoffs_closed(s, g);
        match firm {
            Firm::One => u1,
            Firm::Two => u2,
        }
    };
    Ok(golden_max(objective, 0.0, 4.0 * g.k()))
}

/// Nash equilibrium by alternating best responses from the interior start
/// `(k/2, k/2)`, stopping once successive strategy changes fall below `tol`
/// (allowed range `[1e-12, 1e-4]`). Serves as the independent oracle for
/// [`closed_form_nash`].
pub fn numeric_nash(g: GamePoint, tol: f64) -> Result<EquilibriumResult> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Domain(format!(
            "tol = {tol} must lie in [1e-12, 1e-4]"
        )));
    }
    let mut x1_sq = 0.5 * g.k();
    let mut x2_sq = 0.5 * g.k();
    for _ in 0..MAX_BR_ITERATIONS {
        let next1 = best_response(Firm::One, x2_sq, g)?;
        let next2 = best_response(Firm::Two, next1, g)?;
        let change = (next1 - x1_sq).abs().max((next2 - x2_sq).abs());
        x1_sq = next1;
        x2_sq = next2;
        if change < tol {
            let s = StrategyPair::from_squares(x1_sq, x2_sq)?;
            let (u1, u2) = payoffs_closed(s, g);
            return Ok(EquilibriumResult {
                point: g,
                x1_sq,
                x2_sq,
                u1,
                u2,
                branch: branch_of(g),
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_BR_ITERATIONS,
        x1_sq,
        x2_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_6: f64 = std::f64::consts::FRAC_PI_6;

    fn gp(k: f64, gamma: f64) -> GamePoint {
        GamePoint::new(k, gamma).unwrap()
    }

    #[test]
    fn interior_at_gamma_zero_matches_poisson_case() {
        let eq = closed_form_nash(gp(4.0, 0.0));
        assert_eq!(eq.branch, Branch::Interior);
        assert!((eq.x1_sq - 10.0 / 3.0).abs() < 1e-14);
        assert!((eq.x2_sq - 4.0 / 3.0).abs() < 1e-14);
        // Halved squares are the classical Poisson-case quantities.
        let (q1, q2, u1, u2) = crate::classical::poisson_equilibrium(4.0).unwrap();
        assert!((eq.x1_sq / 2.0 - q1).abs() < 1e-14);
        assert!((eq.x2_sq / 2.0 - q2).abs() < 1e-14);
        assert!((eq.u1 - u1).abs() < 1e-14);
        assert!((eq.u2 - u2).abs() < 1e-14);
    }

    #[test]
    fn interior_worked_point() {
        let eq = closed_form_nash(gp(4.0, PI_6));
        assert_eq!(eq.branch, Branch::Interior);
        assert!((eq.x1_sq - 3.6).abs() < 1e-14);
        assert!((eq.x2_sq - 0.6).abs() < 1e-14);
        assert!((eq.u1 - 2.7075).abs() < 1e-14);
        assert!((eq.u2 - 0.6075).abs() < 1e-14);
        // The payoff formulas agree with direct evaluation at the strategies.
        let s = StrategyPair::from_squares(eq.x1_sq, eq.x2_sq).unwrap();
        let (u1, u2) = payoffs_closed(s, eq.point);
        assert!((eq.u1 - u1).abs() < 1e-13);
        assert!((eq.u2 - u2).abs() < 1e-13);
    }

    #[test]
    fn corner_point() {
        // cos(1.4) ~ 0.17 < 1/3.
        let eq = closed_form_nash(gp(4.0, 0.7));
        assert_eq!(eq.branch, Branch::Corner);
        assert_eq!(eq.x1_sq, 4.0);
        assert_eq!(eq.x2_sq, 0.0);
    }

    #[test]
    fn k_equal_one_is_always_corner() {
        for &gamma in &[0.0, 0.3, 0.78] {
            let eq = closed_form_nash(gp(1.0, gamma));
            assert_eq!(eq.branch, Branch::Corner);
            assert_eq!(eq.x1_sq, 1.0);
            assert_eq!(eq.x2_sq, 0.0);
        }
    }

    #[test]
    fn firm2_payoff_vanishes_at_k_two() {
        for &gamma in &[0.1, 0.4, 0.7] {
            let (_, u2) = nash_payoffs(gp(2.0, gamma));
            assert_eq!(u2, 0.0);
        }
    }

    #[test]
    fn firm1_always_dominates() {
        for i in 0..=30 {
            for j in 0..=30 {
                let k = 1.0 + 49.0 * i as f64 / 30.0;
                let gamma = (std::f64::consts::FRAC_PI_4 - 1e-9) * j as f64 / 30.0;
                let (u1, u2) = nash_payoffs(gp(k, gamma));
                assert!(u1 >= u2, "U1 < U2 at k = {k}, gamma = {gamma}");
            }
        }
    }

    #[test]
    fn transition_gamma_values() {
        assert_eq!(transition_gamma(2.0), Some(0.0));
        assert!((transition_gamma(3.0).unwrap() - PI_6).abs() < 1e-15);
        assert_eq!(transition_gamma(1.5), None);
        assert_eq!(transition_gamma(1.0), None);
    }

    #[test]
    fn branch_formulas_coincide_on_the_transition_curve() {
        for &k in &[2.5, 3.0, 4.0, 6.0, 10.0] {
            let gc = transition_gamma(k).unwrap();
            let c2 = (2.0 * gc).cos();
            let cc = gc.cos().powi(2);
            let scale = 2.0 * cc / (2.0 + c2);
            let x1_int = scale * (k + 1.0 / c2);
            let x2_int = scale * (k - 1.0 - 1.0 / c2);
            assert!((x1_int - k).abs() < 1e-10, "k = {k}: x1 {x1_int}");
            assert!(x2_int.abs() < 1e-10, "k = {k}: x2 {x2_int}");

            let denom = 4.0 * (2.0 + c2) * (2.0 + c2);
            let u1_int = cc * (1.0 + 2.0 * k + c2).powi(2) / denom;
            let u2_int = cc * (3.0 - 2.0 * k + c2).powi(2) / denom;
            let u1_cor = 0.25 * k * k * cc;
            let u2_cor = 0.25 * k * (k - 2.0) * gc.sin().powi(2);
            assert!((u1_int - u1_cor).abs() < 1e-10);
            assert!((u2_int - u2_cor).abs() < 1e-10);
        }
    }

    #[test]
    fn best_response_monopoly() {
        let x = best_response(Firm::One, 0.0, gp(4.0, 0.0)).unwrap();
        assert!((x - 4.0).abs() < 1e-9);
    }

    #[test]
    fn best_response_fixed_point_of_closed_form() {
        let g = gp(4.0, PI_6);
        let x2 = best_response(Firm::Two, 3.6, g).unwrap();
        assert!((x2 - 0.6).abs() < 1e-6);
        let x1 = best_response(Firm::One, 0.6, g).unwrap();
        assert!((x1 - 3.6).abs() < 1e-6);
    }

    #[test]
    fn best_response_corner_clamps_to_zero() {
        // Small cos(2g) makes firm 2's unconstrained optimum negative.
        let g = gp(4.0, 0.7);
        let x2 = best_response(Firm::Two, 4.0, g).unwrap();
        assert_eq!(x2, 0.0);
    }

    #[test]
    fn best_response_rejects_negative_input() {
        assert!(best_response(Firm::One, -1.0, gp(4.0, 0.0)).is_err());
    }

    #[test]
    fn numeric_nash_matches_closed_form() {
        let eq = numeric_nash(gp(4.0, PI_6), 1e-10).unwrap();
        assert!((eq.x1_sq - 3.6).abs() < 1e-9);
        assert!((eq.x2_sq - 0.6).abs() < 1e-9);

        let eq = numeric_nash(gp(4.0, 0.7), 1e-10).unwrap();
        assert!((eq.x1_sq - 4.0).abs() < 1e-9);
        assert_eq!(eq.x2_sq, 0.0);

        let eq = numeric_nash(gp(1.0, 0.3), 1e-10).unwrap();
        assert!((eq.x1_sq - 1.0).abs() < 1e-9);
        assert_eq!(eq.x2_sq, 0.0);
    }

    #[test]
    fn numeric_nash_rejects_out_of_range_tolerance() {
        assert!(numeric_nash(gp(4.0, 0.1), 1e-13).is_err());
        assert!(numeric_nash(gp(4.0, 0.1), 1e-3).is_err());
    }

    #[test]
    fn strategies_are_continuous_across_the_transition() {
        for &k in &[2.5, 4.0, 10.0] {
            let gc = transition_gamma(k).unwrap();
            let below = closed_form_nash(gp(k, gc - 1e-6));
            let above = closed_form_nash(gp(k, gc + 1e-6));
            assert!((below.x1_sq - k).abs() < 1e-4);
            assert!(below.x2_sq.abs() < 1e-4);
            assert!((above.x1_sq - k).abs() < 1e-4);
            assert_eq!(above.x2_sq, 0.0);
        }
    }

    #[test]
    fn payoffs_keep_a_first_derivative_kink_at_the_transition() {
        // The payoff surfaces are continuous across gamma_c but their first
        // gamma-derivatives jump: the envelope cross-term d(x1^2)/dgamma
        // changes discontinuously between regimes. Pin the measured jump so
        // any change in this behavior is caught.
        let k = 4.0;
        let gc = transition_gamma(k).unwrap();
        let one_sided = |sign: f64, h: f64| {
            let (u1_far, u2_far) = nash_payoffs(gp(k, gc + sign * h));
            let (u1_at, u2_at) = nash_payoffs(gp(k, gc));
            (sign * (u1_far - u1_at) / h, sign * (u2_far - u2_at) / h)
        };
        let (l1, l2) = one_sided(-1.0, 1e-6);
        let (r1, r2) = one_sided(1.0, 1e-6);
        // Values are continuous...
        let (u1_below, u2_below) = nash_payoffs(gp(k, gc - 1e-6));
        let (u1_above, u2_above) = nash_payoffs(gp(k, gc + 1e-6));
        assert!((u1_below - u1_above).abs() < 1e-4);
        assert!((u2_below - u2_above).abs() < 1e-4);
        // ...the one-sided slopes are well converged in h...
        let (l1_fine, _) = one_sided(-1.0, 1e-7);
        assert!((l1 - l1_fine).abs() < 1e-3);
        // ...and they disagree by an O(1) jump on each payoff.
        assert!((l1 - r1).abs() > 0.1, "dU1 jump vanished: {l1} vs {r1}");
        assert!((l2 - r2).abs() > 0.1, "dU2 jump vanished: {l2} vs {r2}");
    }

    #[test]
    fn nash_property_random_deviations() {
        // No unilateral deviation improves either firm at the closed-form
        // equilibrium, over a 20x20 grid with 500 random deviations per
        // firm at each point.
        let mut state = 42_u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for i in 0..20 {
            for j in 0..20 {
                let k = 1.0 + 19.0 * i as f64 / 19.0;
                let gamma = (std::f64::consts::FRAC_PI_4 - 1e-6) * j as f64 / 20.0;
                let g = gp(k, gamma);
                let eq = closed_form_nash(g);
                for _ in 0..500 {
                    let dev = next() * 2.0 * k;
                    let s1 = StrategyPair::from_squares(dev, eq.x2_sq).unwrap();
                    let s2 = StrategyPair::from_squares(eq.x1_sq, dev).unwrap();
                    let (u1_dev, _) = payoffs_closed(s1, g);
                    let (_, u2_dev) = payoffs_closed(s2, g);
                    assert!(u1_dev <= eq.u1 + 1e-8, "firm 1 improves at ({k}, {gamma})");
                    assert!(u2_dev <= eq.u2 + 1e-8, "firm 2 improves at ({k}, {gamma})");
                }
            }
        }
    }
}

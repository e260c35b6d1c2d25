//! Derived quantities behind the figures: payoff sums and differences,
//! asymmetry and cooperation measures, monotonicity regions, and grid
//! sweeps.
//!
//! The dimensionless measures are
//!
//! ```text
//! s     = min[2/k, 1]                    degree of asymmetry
//! s_bar = 1 - s                          degree of symmetry
//! xi    = (1 - cos 2g)/(1 + cos 2g)      degree of cooperation
//! ```
//!
//! and the scaled payoff difference `(U1 - U2)/k^2` takes one closed form
//! per ordering of `s_bar` against `xi`, meeting at `s/4` on the transition
//! curve where the two balance.

use crate::equilibrium::{branch_of, closed_form_nash, nash_payoffs, transition_gamma, Branch};
use crate::error::{Error, Result};
use crate::quantum::{GamePoint, GAMMA_MAX};

/// Exclusion half-width around gamma = 0, pi/4, and gamma_c inside which
/// derivative signs are not trusted.
const DERIV_GUARD: f64 = 1e-4;

/// Central-difference step for payoff derivatives.
const DERIV_STEP: f64 = 1e-6;

/// Margin below pi/4 enforced on sweep grids.
const GAMMA_CAP: f64 = 1e-6;

/// Dimensionless asymmetry/cooperation measures of a game point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryMeasures {
    /// Degree of asymmetry, in [0, 1].
    pub s: f64,
    /// Degree of symmetry, `1 - s`.
    pub s_bar: f64,
    /// Degree of cooperation, in [0, 1) over the gamma domain.
    pub xi: f64,
}

/// Monotonicity region of the payoff surfaces in gamma.
///
/// The letters follow the sign triple `(dU1, dU2, d(U1+U2))`:
/// A = (-,-,-), B = (-,+,-), C = (-,+,+), D = (+,+,+).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    A,
    B,
    C,
    D,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::A => "A",
            RegionLabel::B => "B",
            RegionLabel::C => "C",
            RegionLabel::D => "D",
        }
    }
}

/// One evaluated grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub gamma: f64,
    pub x1_sq: f64,
    pub x2_sq: f64,
    pub u1: f64,
    pub u2: f64,
    pub sum: f64,
    pub diff: f64,
    pub branch: Branch,
    /// None where the point sits inside a derivative guard band or on a
    /// region boundary.
    pub region: Option<RegionLabel>,
}

/// Gridded equilibrium results, ordered by (k index, gamma index).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Inclusive uniform grid `(min, max, count)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    min: f64,
    max: f64,
    count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::Domain("grid bounds must be finite".into()));
        }
        if count == 0 {
            return Err(Error::Domain("grid count must be at least 1".into()));
        }
        if min > max {
            return Err(Error::Domain(format!("grid min {min} exceeds max {max}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.min + step * i as f64)
            .collect()
    }
}

/// Equilibrium payoff sum and difference `(U1 + U2, U1 - U2)` in closed
/// form, dispatched by branch.
pub fn payoff_sum_diff(g: GamePoint) -> (f64, f64) {
    let k = g.k();
    let c2 = (2.0 * g.gamma()).cos();
    match branch_of(g) {
        Branch::Interior => {
            let cc = g.gamma().cos().powi(2);
            let c4 = (4.0 * g.gamma()).cos();
            let denom = 4.0 * (2.0 + c2) * (2.0 + c2);
            let sum = cc * (11.0 + 8.0 * k * (k - 1.0) + 8.0 * c2 + c4) / denom;
            let diff = cc * (2.0 * k - 1.0) / (2.0 + c2);
            (sum, diff)
        }
        Branch::Corner | Branch::Boundary => {
            (0.25 * k * (k - 1.0 + c2), 0.25 * k * (1.0 + (k - 1.0) * c2))
        }
    }
}

/// The `(s, s_bar, xi)` measures of a game point.
pub fn asymmetry_measures(g: GamePoint) -> AsymmetryMeasures {
    let s = (2.0 / g.k()).min(1.0);
    let c2 = (2.0 * g.gamma()).cos();
    AsymmetryMeasures {
        s,
        s_bar: 1.0 - s,
        xi: (1.0 - c2) / (1.0 + c2),
    }
}

/// Scaled payoff difference `(U1 - U2)/k^2` through the measure-based case
/// split; equals [`payoff_sum_diff`]`.1 / k^2`.
pub fn scaled_diff(g: GamePoint) -> f64 {
    let m = asymmetry_measures(g);
    if (m.s_bar - m.xi).abs() <= 1e-12 {
        // Balanced symmetry and cooperation: the transition curve.
        0.25 * m.s
    } else if m.s_bar > m.xi {
        (1.0 - 0.25 * (1.0 + m.s_bar) * (1.0 + m.s_bar)) / (3.0 + m.xi)
    } else if m.s_bar == 0.0 {
        0.25 * (1.0 + (2.0 / g.k() - 1.0) * m.xi) / (1.0 + m.xi)
    } else {
        0.25 * (1.0 - m.s_bar * m.xi) / (1.0 + m.xi)
    }
}

/// Scaled payoff difference and sum on the transition curve of a given `k`:
///
/// ```text
/// (U1 - U2)/k^2 = s/4
/// (U1 + U2)/k^2 = (1 + s_bar^2) / (4 (1 + s_bar))
/// ```
///
/// Errors for `k < 2`, where no transition exists.
pub fn boundary_values(k: f64) -> Result<(f64, f64)> {
    crate::classical::check_k(k)?;
    if k < 2.0 {
        return Err(Error::BoundaryAbsent { k });
    }
    let s = 2.0 / k;
    let s_bar = 1.0 - s;
    Ok((0.25 * s, 0.25 * (1.0 + s_bar * s_bar) / (1.0 + s_bar)))
}

fn sign_of(d: f64) -> i8 {
    if d.abs() <= 1e-12 {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

fn inside_guard_bands(g: GamePoint) -> bool {
    let gamma = g.gamma();
    if !(DERIV_GUARD..=GAMMA_MAX - DERIV_GUARD).contains(&gamma) {
        return true;
    }
    match transition_gamma(g.k()) {
        Some(gc) => (gamma - gc).abs() < DERIV_GUARD,
        None => false,
    }
}

/// Classify a game point into the monotonicity regions by the signs of the
/// central-difference gamma-derivatives of `U1`, `U2`, and their sum.
///
/// The point must sit clear (by 1e-4) of gamma = 0, pi/4, and the
/// transition angle, where the derivative is zero, one-sided, or kinked.
/// A zero derivative inside the valid band means the point lies on a region
/// boundary and is reported as such; a sign triple outside the four region
/// patterns reports an inconsistency.
pub fn classify_region(g: GamePoint) -> Result<RegionLabel> {
    if inside_guard_bands(g) {
        return Err(Error::Domain(format!(
            "gamma = {} is within {DERIV_GUARD} of 0, pi/4, or the transition angle",
            g.gamma()
        )));
    }
    let above = GamePoint::new(g.k(), g.gamma() + DERIV_STEP)?;
    let below = GamePoint::new(g.k(), g.gamma() - DERIV_STEP)?;
    let (u1_a, u2_a) = nash_payoffs(above);
    let (u1_b, u2_b) = nash_payoffs(below);
    let d1 = (u1_a - u1_b) / (2.0 * DERIV_STEP);
    let d2 = (u2_a - u2_b) / (2.0 * DERIV_STEP);
    let dsum = ((u1_a + u2_a) - (u1_b + u2_b)) / (2.0 * DERIV_STEP);

    let (s1, s2, ssum) = (sign_of(d1), sign_of(d2), sign_of(dsum));
    if s1 == 0 || s2 == 0 || ssum == 0 {
        return Err(Error::RegionBoundary {
            k: g.k(),
            gamma: g.gamma(),
        });
    }
    match (s1, s2, ssum) {
        (-1, -1, -1) => Ok(RegionLabel::A),
        (-1, 1, -1) => Ok(RegionLabel::B),
        (-1, 1, 1) => Ok(RegionLabel::C),
        (1, 1, 1) => Ok(RegionLabel::D),
        _ => Err(Error::RegionInconsistent {
            k: g.k(),
            gamma: g.gamma(),
            s1,
            s2,
            ssum,
        }),
    }
}

/// Evaluate the closed-form equilibrium and derived columns over the grid
/// product, rows ordered by (k index, gamma index).
///
/// Gamma values are capped at `pi/4 - 1e-6` to stay inside the open
/// interval. Region labels are omitted (not errors) on guard bands and
/// region boundaries; a genuinely inconsistent sign pattern aborts the
/// sweep.
pub fn sweep(k_grid: GridSpec, gamma_grid: GridSpec) -> Result<SweepTable> {
    if k_grid.min < 1.0 {
        return Err(Error::Domain(format!(
            "k grid starts at {} but k >= 1 is required",
            k_grid.min
        )));
    }
    if gamma_grid.min < 0.0 {
        return Err(Error::Domain(format!(
            "gamma grid starts at {} but gamma >= 0 is required",
            gamma_grid.min
        )));
    }
    let cap = GAMMA_MAX - GAMMA_CAP;
    let gamma_grid = GridSpec::new(gamma_grid.min, gamma_grid.max.min(cap), gamma_grid.count)?;

    let mut rows = Vec::with_capacity(k_grid.count * gamma_grid.count);
    for &k in &k_grid.values() {
        for &gamma in &gamma_grid.values() {
            let g = GamePoint::new(k, gamma)?;
            let eq = closed_form_nash(g);
            let (sum, diff) = payoff_sum_diff(g);
            let region = if inside_guard_bands(g) {
                None
            } else {
                match classify_region(g) {
                    Ok(label) => Some(label),
                    Err(Error::RegionBoundary { .. }) => None,
                    Err(e) => return Err(e),
                }
            };
            rows.push(SweepRow {
                k,
                gamma,
                x1_sq: eq.x1_sq,
                x2_sq: eq.x2_sq,
                u1: eq.u1,
                u2: eq.u2,
                sum,
                diff,
                branch: eq.branch,
                region,
            });
        }
    }
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::poisson_equilibrium;

    const PI_6: f64 = std::f64::consts::FRAC_PI_6;

    fn gp(k: f64, gamma: f64) -> GamePoint {
        GamePoint::new(k, gamma).unwrap()
    }

    #[test]
    fn sum_diff_worked_points() {
        let (sum, diff) = payoff_sum_diff(gp(4.0, PI_6));
        assert!((sum - 3.315).abs() < 1e-12);
        assert!((diff - 2.1).abs() < 1e-12);

        let (sum, diff) = payoff_sum_diff(gp(4.0, 0.0));
        assert!((sum - 29.0 / 9.0).abs() < 1e-12);
        assert!((diff - 21.0 / 9.0).abs() < 1e-12);

        let (sum, diff) = payoff_sum_diff(gp(1.0, 0.0));
        assert_eq!((sum, diff), (0.25, 0.25));
    }

    #[test]
    fn sum_diff_agrees_with_payoffs_everywhere() {
        for i in 0..=24 {
            for j in 0..=24 {
                let k = 1.0 + 19.0 * i as f64 / 24.0;
                let gamma = (GAMMA_MAX - 1e-6) * j as f64 / 24.0;
                let g = gp(k, gamma);
                let (u1, u2) = nash_payoffs(g);
                let (sum, diff) = payoff_sum_diff(g);
                assert!((sum - (u1 + u2)).abs() < 1e-12, "sum at ({k}, {gamma})");
                assert!((diff - (u1 - u2)).abs() < 1e-12, "diff at ({k}, {gamma})");
            }
        }
    }

    #[test]
    fn measures_worked_points() {
        let m = asymmetry_measures(gp(2.0, 0.0));
        assert_eq!((m.s, m.s_bar, m.xi), (1.0, 0.0, 0.0));

        let m = asymmetry_measures(gp(4.0, PI_6));
        assert!((m.s - 0.5).abs() < 1e-15);
        assert!((m.s_bar - 0.5).abs() < 1e-15);
        assert!((m.xi - 1.0 / 3.0).abs() < 1e-15);

        let m = asymmetry_measures(gp(1e6, 0.0));
        assert!((m.s - 2e-6).abs() < 1e-18);
        assert!(m.s_bar > 0.999_997);
    }

    #[test]
    fn scaled_diff_cases() {
        // s_bar = 1/2 > xi = 1/3.
        let v = scaled_diff(gp(4.0, PI_6));
        assert!((v - 0.13125).abs() < 1e-15);
        assert!((v - 2.1 / 16.0).abs() < 1e-12);

        // s_bar = 0 < xi.
        let v = scaled_diff(gp(2.0, PI_6));
        assert!((v - 3.0 / 16.0).abs() < 1e-15);

        // Balanced: gamma on the transition curve gives s/4.
        let gc = transition_gamma(4.0).unwrap();
        let v = scaled_diff(gp(4.0, gc));
        assert!((v - 0.125).abs() < 1e-14);
    }

    #[test]
    fn scaled_diff_agrees_with_sum_diff_route() {
        for i in 0..=24 {
            for j in 0..=24 {
                let k = 1.0 + 19.0 * i as f64 / 24.0;
                let gamma = (GAMMA_MAX - 1e-6) * j as f64 / 24.0;
                let g = gp(k, gamma);
                let direct = payoff_sum_diff(g).1 / (k * k);
                assert!(
                    (scaled_diff(g) - direct).abs() < 1e-12,
                    "({k}, {gamma}): {} vs {direct}",
                    scaled_diff(g)
                );
            }
        }
    }

    #[test]
    fn boundary_values_worked_points() {
        let (diff, sum) = boundary_values(2.0).unwrap();
        assert_eq!((diff, sum), (0.25, 0.25));

        let (diff, sum) = boundary_values(4.0).unwrap();
        assert!((diff - 0.125).abs() < 1e-15);
        assert!((sum - 5.0 / 24.0).abs() < 1e-15);

        let (diff, sum) = boundary_values(3.0).unwrap();
        assert!((diff - 1.0 / 6.0).abs() < 1e-15);
        assert!((sum - 5.0 / 24.0).abs() < 1e-15);

        assert!(matches!(
            boundary_values(1.5),
            Err(Error::BoundaryAbsent { .. })
        ));
    }

    #[test]
    fn boundary_values_match_direct_evaluation() {
        for &k in &[2.0, 2.5, 3.0, 4.0, 6.0, 10.0] {
            let gc = transition_gamma(k).unwrap();
            let g = gp(k, gc);
            let (sum, diff) = payoff_sum_diff(g);
            let (bdiff, bsum) = boundary_values(k).unwrap();
            assert!((diff / (k * k) - bdiff).abs() < 1e-10, "diff at k = {k}");
            assert!((sum / (k * k) - bsum).abs() < 1e-10, "sum at k = {k}");
        }
    }

    #[test]
    fn classify_worked_points() {
        // k < 2: every payoff falls with gamma.
        assert_eq!(classify_region(gp(1.5, 0.3)).unwrap(), RegionLabel::A);
        // Large k, small gamma: everything rises.
        assert_eq!(classify_region(gp(10.0, 0.05)).unwrap(), RegionLabel::D);
        // Mid k: firm 2 rises, firm 1 falls; the total decides B vs C.
        let label = classify_region(gp(3.0, 0.4)).unwrap();
        assert!(matches!(label, RegionLabel::B | RegionLabel::C));
    }

    #[test]
    fn classify_rejects_guarded_points() {
        assert!(classify_region(gp(4.0, 1e-5)).is_err());
        assert!(classify_region(gp(4.0, GAMMA_MAX - 1e-5)).is_err());
        let gc = transition_gamma(4.0).unwrap();
        assert!(classify_region(gp(4.0, gc + 1e-5)).is_err());
    }

    #[test]
    fn classify_flags_region_boundary_at_k_two() {
        // U2 is identically zero at k = 2; its derivative has no sign.
        let err = classify_region(gp(2.0, 0.3)).unwrap_err();
        assert!(matches!(err, Error::RegionBoundary { .. }), "{err}");
    }

    #[test]
    fn classification_covers_the_grid_consistently() {
        // Away from guard bands every point gets one of the four labels or
        // sits on a region boundary; no inconsistent patterns show up.
        for i in 0..=30 {
            for j in 1..30 {
                let k = 1.0 + 24.0 * i as f64 / 30.0;
                let gamma = GAMMA_MAX * j as f64 / 30.0;
                let g = gp(k, gamma);
                if inside_guard_bands(g) {
                    continue;
                }
                match classify_region(g) {
                    Ok(_) | Err(Error::RegionBoundary { .. }) => {}
                    Err(e) => panic!("unexpected failure at ({k}, {gamma}): {e}"),
                }
            }
        }
    }

    #[test]
    fn scaled_gap_shrinks_with_k() {
        for &gamma in &[0.2, 0.5, 0.7] {
            let mut last = f64::INFINITY;
            for &k in &[4.0, 8.0, 16.0, 32.0, 64.0] {
                let gap = payoff_sum_diff(gp(k, gamma)).1.abs() / (k * k);
                assert!(gap <= last + 1e-15, "gap grew at k = {k}, gamma = {gamma}");
                last = gap;
            }
        }
    }

    #[test]
    fn sweep_single_point() {
        let table = sweep(
            GridSpec::new(4.0, 4.0, 1).unwrap(),
            GridSpec::new(PI_6, PI_6, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert!((row.x1_sq - 3.6).abs() < 1e-14);
        assert!((row.x2_sq - 0.6).abs() < 1e-14);
        assert!((row.u1 - 2.7075).abs() < 1e-14);
        assert!((row.u2 - 0.6075).abs() < 1e-14);
        assert_eq!(row.branch, Branch::Interior);
    }

    #[test]
    fn sweep_k_two_has_zero_u2_column() {
        let table = sweep(
            GridSpec::new(2.0, 2.0, 1).unwrap(),
            GridSpec::new(0.0, 0.7, 15).unwrap(),
        )
        .unwrap();
        assert_eq!(table.rows.len(), 15);
        for row in &table.rows {
            assert_eq!(row.u2, 0.0);
            assert!(row.region.is_none(), "k = 2 rows sit on a region boundary");
        }
    }

    #[test]
    fn sweep_gamma_zero_reduces_to_poisson_case() {
        let table = sweep(
            GridSpec::new(1.0, 12.0, 12).unwrap(),
            GridSpec::new(0.0, 0.0, 1).unwrap(),
        )
        .unwrap();
        for row in &table.rows {
            let (_, _, u1, u2) = poisson_equilibrium(row.k).unwrap();
            assert!((row.u1 - u1).abs() < 1e-12);
            assert!((row.u2 - u2).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_caps_gamma_at_the_open_end() {
        let table = sweep(
            GridSpec::new(3.0, 3.0, 1).unwrap(),
            GridSpec::new(0.0, 10.0, 5).unwrap(),
        )
        .unwrap();
        let last = table.rows.last().unwrap();
        assert!(last.gamma <= GAMMA_MAX - 1e-6 + 1e-15);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        assert!(sweep(
            GridSpec::new(0.5, 4.0, 4).unwrap(),
            GridSpec::new(0.0, 0.5, 4).unwrap()
        )
        .is_err());
        assert!(sweep(
            GridSpec::new(1.0, 4.0, 4).unwrap(),
            GridSpec::new(-0.1, 0.5, 4).unwrap()
        )
        .is_err());
        assert!(GridSpec::new(1.0, 0.5, 3).is_err());
        assert!(GridSpec::new(1.0, 2.0, 0).is_err());
    }
}

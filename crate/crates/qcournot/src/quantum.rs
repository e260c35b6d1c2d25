//! Coherent-state simulation of the asymmetric duopoly.
//!
//! Each firm displaces a vacuum mode by a real magnitude, producing the
//! product of coherent states `|x1/sqrt(2)> (x) |x2/sqrt(2)>`. A passive
//! beam splitter with angle `gamma` then mixes the two amplitudes:
//!
//! ```text
//! alpha1 = (x1 cos g + i x2 sin g) / sqrt(2)
//! alpha2 = (x2 cos g + i x1 sin g) / sqrt(2)
//! ```
//!
//! Firm 1 is read out by a mean-power meter, so only `n1 = |alpha1|^2`
//! enters its payoff. Firm 2 is read out by a photon counter whose integer
//! outcome is Poisson with mean `lambda2 = |alpha2|^2`, and the count
//! fluctuations tax its expected payoff by exactly one unit of margin:
//!
//! ```text
//! u1 = n1      [k     - (x1^2 + x2^2)/2]
//! u2 = lambda2 [k - 1 - (x1^2 + x2^2)/2]
//! ```
//!
//! Three evaluators of the same expectation live here — the closed form
//! above, a truncated series over counts, and a seeded Monte Carlo — so
//! each can serve as an oracle for the others.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classical::check_k;
use crate::error::{Error, Result};
use crate::poisson;

/// Upper end of the gamma domain, exclusive.
pub const GAMMA_MAX: f64 = std::f64::consts::FRAC_PI_4;

/// One game instance: the demand-minus-cost scale `k >= 1` and the beam
/// splitter angle `gamma` in `[0, pi/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamePoint {
    k: f64,
    gamma: f64,
}

impl GamePoint {
    pub fn new(k: f64, gamma: f64) -> Result<Self> {
        check_k(k)?;
        if !(0.0..GAMMA_MAX).contains(&gamma) {
            return Err(Error::Domain(format!(
                "gamma = {gamma} must lie in [0, pi/4)"
            )));
        }
        Ok(Self { k, gamma })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Displacement magnitudes chosen by the two firms, both nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyPair {
    x1: f64,
    x2: f64,
}

impl StrategyPair {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        for (name, x) in [("x1", x1), ("x2", x2)] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Domain(format!("{name} = {x} must be nonnegative")));
            }
        }
        Ok(Self { x1, x2 })
    }

    /// Build from squared magnitudes, the natural unit of the figures.
    pub fn from_squares(x1_sq: f64, x2_sq: f64) -> Result<Self> {
        for (name, x) in [("x1_sq", x1_sq), ("x2_sq", x2_sq)] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Domain(format!("{name} = {x} must be nonnegative")));
            }
        }
        Ok(Self {
            x1: x1_sq.sqrt(),
            x2: x2_sq.sqrt(),
        })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }
}

/// Mean photon numbers of the two output modes.
///
/// The beam splitter is passive, so `n1 + lambda2 = (x1^2 + x2^2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIntensities {
    pub n1: f64,
    pub lambda2: f64,
}

impl ModeIntensities {
    pub fn new(s: StrategyPair, gamma: f64) -> Self {
        let (c2, s2) = (gamma.cos().powi(2), gamma.sin().powi(2));
        let (a, b) = (s.x1 * s.x1, s.x2 * s.x2);
        Self {
            n1: 0.5 * (a * c2 + b * s2),
            lambda2: 0.5 * (b * c2 + a * s2),
        }
    }
}

/// Symmetric photon-loss channel: both modes attenuate by `e^{-kappa t/2}`
/// in amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    kappa: f64,
    t: f64,
}

impl LossChannel {
    pub fn new(kappa: f64, t: f64) -> Result<Self> {
        for (name, v) in [("kappa", kappa), ("t", t)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} = {v} must be nonnegative")));
            }
        }
        Ok(Self { kappa, t })
    }

    /// Amplitude attenuation factor `e^{-kappa t / 2}`, in `(0, 1]`.
    pub fn attenuation(&self) -> f64 {
        (-0.5 * self.kappa * self.t).exp()
    }
}

/// Output amplitudes of the beam splitter. The cross terms pick up the
/// phase `i`; the moduli squared are the mode intensities.
pub fn mix_amplitudes(s: StrategyPair, gamma: f64) -> (Complex64, Complex64) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (cos_g, sin_g) = (gamma.cos(), gamma.sin());
    let alpha1 = Complex64::new(r * s.x1 * cos_g, r * s.x2 * sin_g);
    let alpha2 = Complex64::new(r * s.x2 * cos_g, r * s.x1 * sin_g);
    (alpha1, alpha2)
}

/// Probability of counting `m` photons in firm 2's mode.
pub fn photon_count_pmf(lambda2: f64, m: u64) -> f64 {
    poisson::pmf(lambda2, m)
}

/// Payoff of firm `i` conditional on a count `m` in firm 2's mode.
fn conditional_payoffs(n1: f64, m: f64, k: f64) -> (f64, f64) {
    let margin = k - (n1 + m);
    (n1 * margin, m * margin)
}

/// Expected payoffs in closed form.
pub fn payoffs_closed(s: StrategyPair, g: GamePoint) -> (f64, f64) {
    let modes = ModeIntensities::new(s, g.gamma);
    let total = 0.5 * (s.x1 * s.x1 + s.x2 * s.x2);
    (
        modes.n1 * (g.k - total),
        modes.lambda2 * (g.k - 1.0 - total),
    )
}

/// Expected payoffs by direct summation over counts, truncated once the
/// neglected Poisson mass drops below `tail_tol` (which must lie in
/// `(0, 1e-6]`). The initial cutoff `lambda2 + 12 sqrt(lambda2) + 30`
/// already leaves far less mass than that; the loop extends it if a
/// pathological tolerance check says otherwise.
pub fn payoffs_series(s: StrategyPair, g: GamePoint, tail_tol: f64) -> Result<(f64, f64)> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Domain(format!(
            "tail_tol = {tail_tol} must lie in (0, 1e-6]"
        )));
    }
    let modes = ModeIntensities::new(s, g.gamma);
    let lambda2 = modes.lambda2;

    let mut cutoff = (lambda2 + 12.0 * lambda2.sqrt() + 30.0).ceil() as u64;
    let mut u1 = 0.0;
    let mut u2 = 0.0;
    let mut mass = 0.0;
    let mut m = 0u64;
    loop {
        while m <= cutoff {
            let p = poisson::pmf(lambda2, m);
            let (c1, c2) = conditional_payoffs(modes.n1, m as f64, g.k);
            u1 += p * c1;
            u2 += p * c2;
            mass += p;
            m += 1;
        }
        if (1.0 - mass).max(0.0) < tail_tol {
            return Ok((u1, u2));
        }
        cutoff += 10 + cutoff / 2;
    }
}

/// Monte Carlo estimate of the expected payoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub u1: f64,
    pub u2: f64,
    /// Sample standard error of the firm-2 payoff mean.
    pub stderr2: f64,
}

/// Expected payoffs by sampling counts from the photon-count law with a
/// seeded generator: equal `(inputs, seed)` reproduce the result bit for
/// bit. `stderr2` is the standard error of the `u2` average.
pub fn payoffs_mc(s: StrategyPair, g: GamePoint, n_samples: u64, seed: u64) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    let modes = ModeIntensities::new(s, g.gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sum_u1 = 0.0;
    // Welford accumulation for the u2 stream.
    let mut mean2 = 0.0;
    let mut m2 = 0.0;
    for i in 1..=n_samples {
        let count = poisson::sample(modes.lambda2, &mut rng) as f64;
        let (c1, c2) = conditional_payoffs(modes.n1, count, g.k);
        sum_u1 += c1;
        let delta = c2 - mean2;
        mean2 += delta / i as f64;
        m2 += delta * (c2 - mean2);
    }

    let n = n_samples as f64;
    let stderr2 = if n_samples > 1 {
        (m2 / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        u1: sum_u1 / n,
        u2: mean2,
        stderr2,
    })
}

/// Pre-scale strategies by `e^{+kappa t/2}` so a subsequent symmetric loss
/// channel lands back on the intended amplitudes.
pub fn compensate_loss(s: StrategyPair, ch: LossChannel) -> StrategyPair {
    let f = 1.0 / ch.attenuation();
    StrategyPair {
        x1: s.x1 * f,
        x2: s.x2 * f,
    }
}

/// Attenuate both amplitudes by `e^{-kappa t/2}`. Symmetric loss commutes
/// with the beam splitter, so applying it before or after mixing is
/// equivalent.
pub fn apply_loss(s: StrategyPair, ch: LossChannel) -> StrategyPair {
    let f = ch.attenuation();
    StrategyPair {
        x1: s.x1 * f,
        x2: s.x2 * f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{self, ClassicalQuantities, CountDistribution};

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn game_point_domain() {
        assert!(GamePoint::new(1.0, 0.0).is_ok());
        assert!(GamePoint::new(0.9, 0.0).is_err());
        assert!(GamePoint::new(4.0, GAMMA_MAX).is_err());
        assert!(GamePoint::new(4.0, -0.1).is_err());
    }

    #[test]
    fn identity_splitter_passes_amplitudes_through() {
        let s = StrategyPair::new(2.0, 0.0).unwrap();
        let (a1, a2) = mix_amplitudes(s, 0.0);
        assert!((a1.re - SQRT_2).abs() < 1e-15);
        assert_eq!(a1.im, 0.0);
        assert_eq!(a2.norm_sqr(), 0.0);
    }

    #[test]
    fn equal_strategies_mix_to_equal_intensities() {
        let s = StrategyPair::new(1.0, 1.0).unwrap();
        let gamma = std::f64::consts::FRAC_PI_6;
        let (a1, a2) = mix_amplitudes(s, gamma);
        assert!((a1.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((a2.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixed_amplitudes_carry_the_intensities() {
        let s = StrategyPair::new(2.0, 1.0).unwrap();
        let gamma = std::f64::consts::FRAC_PI_6;
        let (a1, a2) = mix_amplitudes(s, gamma);
        assert!((a1.norm_sqr() - 1.625).abs() < 1e-15);
        assert!((a2.norm_sqr() - 0.875).abs() < 1e-15);
        let modes = ModeIntensities::new(s, gamma);
        assert!((a1.norm_sqr() - modes.n1).abs() < 1e-15);
        assert!((a2.norm_sqr() - modes.lambda2).abs() < 1e-15);
        // Passive mixing conserves total intensity.
        assert!((modes.n1 + modes.lambda2 - 2.5).abs() < 1e-14);
    }

    #[test]
    fn closed_form_reduces_to_classical_at_gamma_zero() {
        // x = sqrt(x^2) costs a couple of ulps, hence the 1e-12 slack.
        let s = StrategyPair::from_squares(2.0, 2.0).unwrap();
        let g = GamePoint::new(4.0, 0.0).unwrap();
        let (u1, u2) = payoffs_closed(s, g);
        assert!((u1 - 2.0).abs() < 1e-12);
        assert!((u2 - 1.0).abs() < 1e-12);

        let q = ClassicalQuantities::new(1.0, 1.0, 4.0).unwrap();
        let (c1, c2) = classical::payoffs(q, &CountDistribution::Poisson).unwrap();
        assert!((u1 - c1).abs() < 1e-12);
        assert!((u2 - c2).abs() < 1e-12);
    }

    #[test]
    fn closed_form_worked_point() {
        let s = StrategyPair::from_squares(3.6, 0.6).unwrap();
        let g = GamePoint::new(4.0, std::f64::consts::FRAC_PI_6).unwrap();
        let (u1, u2) = payoffs_closed(s, g);
        assert!((u1 - 2.7075).abs() < 1e-12);
        assert!((u2 - 0.6075).abs() < 1e-12);
    }

    #[test]
    fn vacuum_strategies_pay_nothing() {
        let s = StrategyPair::new(0.0, 0.0).unwrap();
        let g = GamePoint::new(7.0, 0.3).unwrap();
        assert_eq!(payoffs_closed(s, g), (0.0, 0.0));
    }

    #[test]
    fn series_matches_closed_form() {
        let points = [
            (2.0, 2.0, 4.0, 0.0),
            (3.6, 0.6, 4.0, std::f64::consts::FRAC_PI_6),
            (9.0, 4.0, 11.0, 0.6),
            (80.0, 70.0, 50.0, 0.2),
        ];
        for &(a, b, k, gamma) in &points {
            let s = StrategyPair::from_squares(a, b).unwrap();
            let g = GamePoint::new(k, gamma).unwrap();
            let closed = payoffs_closed(s, g);
            let series = payoffs_series(s, g, 1e-12).unwrap();
            assert!(
                (closed.0 - series.0).abs() < 1e-9,
                "u1 at {a},{b},{k},{gamma}: {} vs {}",
                closed.0,
                series.0
            );
            assert!(
                (closed.1 - series.1).abs() < 1e-9,
                "u2 at {a},{b},{k},{gamma}: {} vs {}",
                closed.1,
                series.1
            );
        }
    }

    #[test]
    fn series_degenerate_lambda() {
        // gamma = 0 and x2 = 0 leave firm 2's mode in vacuum.
        let s = StrategyPair::from_squares(3.0, 0.0).unwrap();
        let g = GamePoint::new(5.0, 0.0).unwrap();
        let (u1, u2) = payoffs_series(s, g, 1e-12).unwrap();
        assert_eq!(u2, 0.0);
        assert!((u1 - 1.5 * (5.0 - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn series_rejects_loose_tolerance() {
        let s = StrategyPair::new(1.0, 1.0).unwrap();
        let g = GamePoint::new(4.0, 0.1).unwrap();
        assert!(payoffs_series(s, g, 1e-3).is_err());
        assert!(payoffs_series(s, g, 0.0).is_err());
    }

    #[test]
    fn pmf_sums_to_one_within_cutoff() {
        let s = StrategyPair::from_squares(5.0, 3.0).unwrap();
        let modes = ModeIntensities::new(s, 0.4);
        let cutoff = (modes.lambda2 + 12.0 * modes.lambda2.sqrt() + 30.0).ceil() as u64;
        let total: f64 = (0..=cutoff)
            .map(|m| photon_count_pmf(modes.lambda2, m))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mc_is_deterministic_given_seed() {
        let s = StrategyPair::from_squares(2.0, 2.0).unwrap();
        let g = GamePoint::new(4.0, 0.0).unwrap();
        let a = payoffs_mc(s, g, 50_000, 42).unwrap();
        let b = payoffs_mc(s, g, 50_000, 42).unwrap();
        assert_eq!(a, b);
        let c = payoffs_mc(s, g, 50_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mc_degenerate_lambda_is_exact() {
        let s = StrategyPair::from_squares(3.0, 0.0).unwrap();
        let g = GamePoint::new(5.0, 0.0).unwrap();
        let est = payoffs_mc(s, g, 1000, 7).unwrap();
        let closed = payoffs_closed(s, g);
        assert_eq!(est.u1, closed.0);
        assert_eq!(est.u2, closed.1);
        assert_eq!(est.stderr2, 0.0);
    }

    #[test]
    fn mc_agrees_with_closed_form() {
        let s = StrategyPair::from_squares(2.0, 2.0).unwrap();
        let g = GamePoint::new(4.0, 0.0).unwrap();
        let est = payoffs_mc(s, g, 1_000_000, 42).unwrap();
        let (u1, u2) = payoffs_closed(s, g);
        assert!(est.stderr2 > 0.0);
        assert!(
            (est.u2 - u2).abs() < 4.0 * est.stderr2,
            "u2 {} vs {} (stderr {})",
            est.u2,
            u2,
            est.stderr2
        );
        // u1's spread comes solely from the sampled counts: stderr is
        // n1 * sqrt(lambda2 / n).
        let modes = ModeIntensities::new(s, g.gamma());
        let stderr1 = modes.n1 * (modes.lambda2 / 1e6).sqrt();
        assert!((est.u1 - u1).abs() < 4.0 * stderr1);
    }

    #[test]
    fn loss_compensation_round_trips() {
        let ch = LossChannel::new(2.0 * (2.0_f64).ln(), 1.0).unwrap();
        let s = StrategyPair::new(1.0, 2.0).unwrap();
        let comp = compensate_loss(s, ch);
        assert!((comp.x1() - 2.0).abs() < 1e-14);
        assert!((comp.x2() - 4.0).abs() < 1e-14);

        let back = apply_loss(comp, ch);
        assert!((back.x1() - s.x1()).abs() < 1e-14);
        assert!((back.x2() - s.x2()).abs() < 1e-14);

        let lossy = apply_loss(StrategyPair::new(2.0, 4.0).unwrap(), ch);
        assert!((lossy.x1() - 1.0).abs() < 1e-14);
        assert!((lossy.x2() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_loss_is_identity() {
        let ch = LossChannel::new(0.0, 3.0).unwrap();
        let s = StrategyPair::new(1.3, 0.4).unwrap();
        assert_eq!(apply_loss(s, ch), s);
        assert_eq!(compensate_loss(s, ch), s);
    }

    #[test]
    fn payoffs_invariant_under_compensated_loss() {
        let g = GamePoint::new(6.0, 0.5).unwrap();
        for i in 0..20 {
            let x1 = 0.3 * i as f64;
            let x2 = 3.0 - 0.14 * i as f64;
            let kt = 0.15 * i as f64;
            let s = StrategyPair::new(x1, x2).unwrap();
            let ch = LossChannel::new(kt, 1.0).unwrap();
            let before = payoffs_closed(s, g);
            let after = payoffs_closed(apply_loss(compensate_loss(s, ch), ch), g);
            assert!((before.0 - after.0).abs() < 1e-12);
            assert!((before.1 - after.1).abs() < 1e-12);
        }
    }
}

//! Asymmetric Cournot duopoly with heterogeneous measurement schemes and
//! its coherent-state simulation.
//!
//! Two firms compete on quantities, but they are evaluated differently:
//! firm 1 by a mean reading, firm 2 by a fluctuating count whose variance
//! taxes its expected payoff. The optical simulation realizes this with a
//! pair of coherent states mixed on a beam splitter, a power meter on one
//! output, and a photon counter on the other.
//!
//! - [`classical`]: payoffs and equilibria of the noisy classical game,
//!   parameterized by an execution-noise law and its Mandel-Q parameter.
//! - [`quantum`]: amplitude mixing, photon-count statistics, and three
//!   mutually validating payoff evaluators (closed form, series, Monte
//!   Carlo), plus photon-loss compensation.
//! - [`equilibrium`]: closed-form Nash equilibria, the interior/corner
//!   transition at `cos(2 gamma) = 1/(k-1)`, and an independent numeric
//!   best-response oracle.
//! - [`analysis`]: payoff sums/differences, asymmetry and cooperation
//!   measures, monotonicity regions, and grid sweeps.
//! - [`cli`]: deterministic command implementations behind the `qcournot`
//!   binary.
//!
//! ```
//! use qcournot::equilibrium::{closed_form_nash, Branch};
//! use qcournot::quantum::GamePoint;
//!
//! let g = GamePoint::new(4.0, std::f64::consts::FRAC_PI_6)?;
//! let eq = closed_form_nash(g);
//! assert_eq!(eq.branch, Branch::Interior);
//! assert!((eq.x1_sq - 3.6).abs() < 1e-12);
//! assert!((eq.u1 - 2.7075).abs() < 1e-12);
//! # Ok::<(), qcournot::error::Error>(())
//! ```

pub mod analysis;
pub mod classical;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod poisson;
pub mod quantum;

pub use analysis::{AsymmetryMeasures, GridSpec, RegionLabel, SweepRow, SweepTable};
pub use classical::{ClassicalQuantities, CountDistribution};
pub use equilibrium::{Branch, EquilibriumResult, Firm};
pub use error::{Error, Result};
pub use quantum::{GamePoint, LossChannel, McEstimate, ModeIntensities, StrategyPair};

// The book's code listings double as doc-tests so the guide cannot drift
// from the API.
#[cfg(doctest)]
mod book;

//! Error type shared by all solver and analysis routines.

use thiserror::Error;

/// Errors produced by game construction, solvers, and the sweep machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// An input fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The second-order equilibrium condition d2(var)/dq2^2 > -2 failed at
    /// the candidate root.
    #[error(
        "second-order condition violated: d2(var)/dq2^2 = {value} <= -2 at q2 = {q2}, \
         the stationary point is not a best response"
    )]
    SecondOrderCondition { value: f64, q2: f64 },

    /// Root bracketing failed: no sign change on the search interval.
    #[error("no root of the equilibrium condition in [0, {hi}] (f({hi}) = {f_hi})")]
    NoRoot { hi: f64, f_hi: f64 },

    /// An iterative solver hit its iteration cap.
    #[error(
        "no convergence after {iterations} iterations (last iterate x1^2 = {x1_sq}, \
         x2^2 = {x2_sq})"
    )]
    NonConvergence {
        iterations: usize,
        x1_sq: f64,
        x2_sq: f64,
    },

    /// Asked for transition-boundary values at a k with no boundary.
    #[error("no transition boundary for k = {k} (needs k >= 2)")]
    BoundaryAbsent { k: f64 },

    /// A payoff derivative vanished at the query point; the point sits on a
    /// region boundary and cannot be assigned a strict sign pattern.
    #[error("region boundary at k = {k}, gamma = {gamma}: a payoff derivative is zero")]
    RegionBoundary { k: f64, gamma: f64 },

    /// The derivative sign pattern matches none of the four regions.
    #[error(
        "inconsistent region signs at k = {k}, gamma = {gamma}: \
         (dU1, dU2, dSum) = ({s1}, {s2}, {ssum})"
    )]
    RegionInconsistent {
        k: f64,
        gamma: f64,
        s1: i8,
        s2: i8,
        ssum: i8,
    },

    /// Configuration file problem.
    #[error("config error: {0}")]
    Config(String),

    /// I/O failure writing output.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

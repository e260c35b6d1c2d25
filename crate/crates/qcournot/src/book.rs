//! Runs every code listing in the book as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/classical-game.md")]
mod classical_game {}

#[doc = include_str!("../../../book/src/coherent-simulation.md")]
mod coherent_simulation {}

#[doc = include_str!("../../../book/src/nash-and-transition.md")]
mod nash_and_transition {}

#[doc = include_str!("../../../book/src/asymmetry-and-regions.md")]
mod asymmetry_and_regions {}

#[doc = include_str!("../../../book/src/photon-loss.md")]
mod photon_loss {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}

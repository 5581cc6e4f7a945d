//! Simulation and analysis of collaborative best-option learning on
//! communication graphs.
//!
//! A population of agents, each with a bounded `(K+1)`-valued memory, shares
//! a `K`-armed Bernoulli bandit. At the ticks of independent Poisson clocks
//! an agent pulls the arm suggested by a uniformly random neighbor (or, when
//! still undecided, explores uniformly with probability `mu`) and adopts it
//! on a unit reward. This crate provides:
//!
//! * [`graph`]: communication graphs with the structural checks the
//!   guarantees rely on (regularity, double stochasticity, flow balance);
//! * [`dynamics`]: exact event-driven simulation of the resulting Markov
//!   chain through two interchangeable backends;
//! * [`meanfield`]: the deterministic ODE limit of the occupancy fractions,
//!   a dense-output integrator, and closed-form convergence envelopes;
//! * [`coupling`]: joint finite/limit simulation on shared randomness for
//!   propagation-of-chaos measurements;
//! * [`analysis`]: learnability estimation, jump-chain drift checks, the
//!   gambler's-ruin oracle, concentration checks and counterexample
//!   scenarios;
//! * [`cli`] plus the `sbs` binary: batch experiment runner emitting CSV.
//!
//! The narrative guide lives in `book/`; its code snippets compile and run
//! as part of `cargo test`.

pub mod analysis;
pub mod cli;
pub mod coupling;
pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod meanfield;
pub mod seeding;

pub use error::{Error, Result};

/// Book chapters included as doc comments so their fenced Rust blocks run
/// under `cargo test --doc` and cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/meanfield.md")]
    mod meanfield {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    mod coupling {}
    #[doc = include_str!("../../../book/src/learnability.md")]
    mod learnability {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

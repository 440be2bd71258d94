//! A two-player prediction market in which the traders also decide the
//! outcome.
//!
//! Alice trades first against a market-scoring-rule market maker, Bob
//! trades second unless he stays out (probability `pi`), and then both vote.
//! The security pays the average vote. This crate solves for the perfect
//! Bayesian equilibrium, simulates play, and checks what prices reveal.
//!
//! Modules, bottom up:
//!
//! - [`scoring`]: the three proper scoring rules and MSR payoffs.
//! - [`beliefs`]: the signal model and Alice's posterior `q0`.
//! - [`thresholds`]: Bob's collusion thresholds `p_L`, `p_H`.
//! - [`equilibrium`]: best responses, LPP/HPP candidates, crossover `pi_c`.
//! - [`game`]: playing, Monte Carlo, deviation checks, brute-force oracle.
//! - [`inference`]: price informativeness and signal recovery.
//! - [`cli`]: the `msr-game` command line.

pub mod beliefs;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod inference;
pub mod numeric;
pub mod parallel;
pub mod reproduce;
pub mod scoring;
pub mod thresholds;
pub mod types;

pub use beliefs::{Posterior, SignalModel};
pub use equilibrium::{
    alice_rational_vote, bob_best_response, crossover_curve, crossover_probability, solve_equilibrium,
    BobStrategy, Crossover, CrossoverNote, Direction, EquilibriumProfile, Market, Regime,
};
pub use error::{Error, Result};
pub use game::{
    brute_force_equilibrium, play, simulate, simulate_with, verify_no_deviation, Belief, DeviationReport,
    GameConfig, GameOutcome, OracleResult, SimulationReport,
};
pub use inference::{classify_informativeness, fixed_point_residual, recover_signal, RecoveryResult};
pub use parallel::Execution;
pub use scoring::{Affine, Score, ScoringFunction, ScoringRule};
pub use thresholds::{bob_indifference_gap, solve_thresholds, Thresholds};
pub use types::{Bit, Liquidation};

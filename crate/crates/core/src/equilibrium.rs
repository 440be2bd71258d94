//! Best responses and the two equilibrium families of the trade-then-vote
//! game.
//!
//! Throughout, `pi` is the probability that Bob does *not* trade and `q0`
//! is Alice's posterior that Bob's signal is 0. The market opens at 1/2.
//!
//! For `q0 < 1/2` Alice pushes the price up and votes 1. Two candidate
//! prices compete:
//!
//! * **LPP**: `p = (1 + pi (1 - q0)) / 2`, above `p_H`, so a trading Bob
//!   corrects to 1/2. The liquidation value is 1 only when Bob is absent
//!   and his signal is 1; `p` is exactly the mean of that distribution.
//! * **HPP**: `p = p_H`, where a trading Bob colludes and the value is 1
//!   unless he is absent holding signal 0.
//!
//! Alice takes whichever pays more in expectation (ties go to HPP). The
//! `q0 > 1/2` case is the mirror image.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::numeric::bisect_predicate;
use crate::parallel::{map_indexed, Execution};
use crate::scoring::{ScoringFunction, ScoringRule};
use crate::thresholds::{solve_thresholds, Thresholds, DEFAULT_TOLERANCE};
use crate::types::{Bit, Liquidation, OutcomeDistribution};

/// Opening market price.
pub const P0: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "LPP")]
    Lpp,
    #[serde(rename = "HPP")]
    Hpp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    /// `q0 = 1/2`; the up-direction profile is reported.
    Degenerate,
}

/// What a trading Bob does: move the price to `trade_target` and vote.
/// The target is always the liquidation value his vote locks in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BobStrategy {
    pub trade_target: f64,
    pub vote: Bit,
}

impl BobStrategy {
    fn reflect(self) -> Self {
        BobStrategy {
            trade_target: 1.0 - self.trade_target,
            vote: self.vote.flip(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub regime: Regime,
    pub direction: Direction,
    pub alice_price: f64,
    pub alice_vote: Bit,
    pub bob_if_trading: BobStrategy,
    pub alice_expected_payoff: f64,
    pub pi: f64,
    pub q0: f64,
}

/// One candidate price with Alice's expected payoff there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub price: f64,
    pub payoff: f64,
    /// LPP only: whether the price clears `p_H`, which is what makes a
    /// trading Bob correct rather than collude.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverNote {
    /// The regimes switch inside `(0, 1)`.
    Crossing,
    /// HPP at every `pi`; `pi_c` is reported as 1.
    HppOnly,
    /// LPP at every `pi`; `pi_c` is reported as 0.
    LppOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub q0: f64,
    pub pi_c: f64,
    pub note: CrossoverNote,
}

/// Alice votes in the direction she moved the price; at 1/2 she has no
/// stake and votes her signal.
pub fn alice_rational_vote(p_a: f64, s_a: Bit) -> Bit {
    if p_a > P0 {
        Bit::One
    } else if p_a < P0 {
        Bit::Zero
    } else {
        s_a
    }
}

/// Bob's optimal trade and vote after observing `p_a`.
///
/// Close to 1/2 (within `[p_L, p_H]`) he joins Alice and pushes the price
/// all the way to her side; beyond the thresholds he votes against her and
/// moves the price back to 1/2.
pub fn bob_best_response(thresholds: &Thresholds, p_a: f64) -> Result<BobStrategy> {
    if !(0.0..=1.0).contains(&p_a) {
        return Err(Error::Domain {
            name: "p_A",
            range: "[0,1]",
            value: p_a,
        });
    }
    let strategy = |trade_target, vote| BobStrategy { trade_target, vote };
    Ok(if p_a > P0 {
        if p_a <= thresholds.p_h {
            strategy(1.0, Bit::One)
        } else {
            strategy(0.5, Bit::Zero)
        }
    } else if p_a < P0 {
        if p_a >= thresholds.p_l {
            strategy(0.0, Bit::Zero)
        } else {
            strategy(0.5, Bit::One)
        }
    } else {
        return Err(Error::IndeterminateAliceVote);
    })
}

/// A scoring rule together with its thresholds.
#[derive(Debug, Clone, Copy)]
pub struct Market<S> {
    pub rule: S,
    pub thresholds: Thresholds,
}

impl Market<ScoringRule> {
    pub fn canonical(rule: ScoringRule) -> Self {
        Market {
            rule,
            thresholds: Thresholds::of(rule),
        }
    }
}

impl<S: ScoringFunction> Market<S> {
    pub fn new(rule: S) -> Result<Self> {
        let thresholds = solve_thresholds(&rule, DEFAULT_TOLERANCE)?;
        Ok(Market { rule, thresholds })
    }

    pub fn with_thresholds(rule: S, thresholds: Thresholds) -> Self {
        Market { rule, thresholds }
    }

    pub fn best_response(&self, p_a: f64) -> Result<BobStrategy> {
        bob_best_response(&self.thresholds, p_a)
    }

    /// Up-direction LPP candidate (requires `q0 <= 1/2`).
    pub fn lpp_candidate(&self, pi: f64, q0: f64) -> Result<Candidate> {
        check_up(pi, q0)?;
        let a = pi * (1.0 - q0);
        let price = 0.5 * (1.0 + a);
        let mut dist = OutcomeDistribution::default();
        dist.add(Liquidation::One, a);
        dist.add(Liquidation::Half, 1.0 - a);
        let payoff = self.rule.expected_payoff(price, P0, &dist)?;
        Ok(Candidate {
            price,
            payoff,
            valid: price > self.thresholds.p_h,
        })
    }

    /// Up-direction collusive candidate (requires `q0 <= 1/2`).
    ///
    /// The price is `p_H` unless the mean liquidation value under collusion,
    /// `1 - pi q0 / 2`, already lies below it; then that mean is optimal.
    /// Only the logarithmic rule, with `q0` near 1/2 and `pi` near 1, gets
    /// there.
    pub fn hpp_candidate(&self, pi: f64, q0: f64) -> Result<Candidate> {
        check_up(pi, q0)?;
        let b = pi * q0;
        let price = self.thresholds.p_h.min(1.0 - 0.5 * b);
        let mut dist = OutcomeDistribution::default();
        dist.add(Liquidation::One, 1.0 - b);
        dist.add(Liquidation::Half, b);
        let payoff = self.rule.expected_payoff(price, P0, &dist)?;
        Ok(Candidate {
            price,
            payoff,
            valid: true,
        })
    }

    fn lpp_wins(&self, pi: f64, q0: f64) -> Result<bool> {
        let lpp = self.lpp_candidate(pi, q0)?;
        let hpp = self.hpp_candidate(pi, q0)?;
        Ok(lpp.valid && lpp.payoff > hpp.payoff)
    }

    fn solve_up(&self, pi: f64, q0: f64) -> Result<EquilibriumProfile> {
        let lpp = self.lpp_candidate(pi, q0)?;
        let hpp = self.hpp_candidate(pi, q0)?;
        let (regime, chosen) = if lpp.valid && lpp.payoff > hpp.payoff {
            (Regime::Lpp, lpp)
        } else {
            (Regime::Hpp, hpp)
        };
        Ok(EquilibriumProfile {
            regime,
            direction: Direction::Up,
            alice_price: chosen.price,
            alice_vote: alice_rational_vote(chosen.price, Bit::One),
            bob_if_trading: self.best_response(chosen.price)?,
            alice_expected_payoff: chosen.payoff,
            pi,
            q0,
        })
    }

    /// The equilibrium for the given participation and belief parameters.
    pub fn solve(&self, pi: f64, q0: f64) -> Result<EquilibriumProfile> {
        check_unit("pi", pi)?;
        check_unit("q0", q0)?;
        if q0 < 0.5 {
            self.solve_up(pi, q0)
        } else if q0 > 0.5 {
            let up = self.solve_up(pi, 1.0 - q0)?;
            Ok(EquilibriumProfile {
                direction: Direction::Down,
                alice_price: 1.0 - up.alice_price,
                alice_vote: up.alice_vote.flip(),
                bob_if_trading: up.bob_if_trading.reflect(),
                q0,
                ..up
            })
        } else {
            Ok(EquilibriumProfile {
                direction: Direction::Degenerate,
                ..self.solve_up(pi, q0)?
            })
        }
    }

    /// The non-participation probability above which Alice switches from
    /// the collusive price to the LPP price.
    pub fn crossover(&self, q0: f64, tolerance: f64) -> Result<Crossover> {
        check_unit("q0", q0)?;
        if !(tolerance > 0.0) {
            return Err(Error::Domain {
                name: "tolerance",
                range: "(0,inf)",
                value: tolerance,
            });
        }
        let q = q0.min(1.0 - q0);
        let (pi_c, note) = if !self.lpp_wins(1.0, q)? {
            (1.0, CrossoverNote::HppOnly)
        } else if self.lpp_wins(0.0, q)? {
            (0.0, CrossoverNote::LppOnly)
        } else {
            let pi_c = bisect_predicate(
                |pi| self.lpp_wins(pi, q).unwrap_or(false),
                0.0,
                1.0,
                tolerance,
            );
            (pi_c, CrossoverNote::Crossing)
        };
        Ok(Crossover { q0, pi_c, note })
    }

    /// `pi_c` for every grid point, in grid order.
    pub fn crossover_curve(&self, q0_grid: &[f64], exec: Execution) -> Result<Vec<Crossover>> {
        for &q in q0_grid {
            if !(0.0 < q && q < 1.0) || q == 0.5 {
                return Err(Error::Domain {
                    name: "q0 grid point",
                    range: "(0,1) excluding 1/2",
                    value: q,
                });
            }
        }
        map_indexed(exec, q0_grid.len(), |i| self.crossover(q0_grid[i], DEFAULT_TOLERANCE))
            .into_iter()
            .collect()
    }
}

fn check_up(pi: f64, q0: f64) -> Result<()> {
    check_unit("pi", pi)?;
    check_unit("q0", q0)?;
    if q0 > 0.5 {
        return Err(Error::Domain {
            name: "q0",
            range: "[0,1/2] for an up-direction candidate",
            value: q0,
        });
    }
    Ok(())
}

/// `{ (k+1)/(n+1) : k < n }` with 1/2 dropped.
pub fn default_q0_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| k as f64 / (n + 1) as f64)
        .filter(|&q| q != 0.5)
        .collect()
}

pub fn lpp_candidate<S: ScoringFunction>(rule: S, thresholds: Thresholds, pi: f64, q0: f64) -> Result<Candidate> {
    Market::with_thresholds(rule, thresholds).lpp_candidate(pi, q0)
}

pub fn hpp_candidate<S: ScoringFunction>(rule: S, thresholds: Thresholds, pi: f64, q0: f64) -> Result<Candidate> {
    Market::with_thresholds(rule, thresholds).hpp_candidate(pi, q0)
}

pub fn solve_equilibrium(rule: ScoringRule, pi: f64, q0: f64) -> Result<EquilibriumProfile> {
    Market::canonical(rule).solve(pi, q0)
}

pub fn crossover_probability(rule: ScoringRule, q0: f64, tolerance: f64) -> Result<Crossover> {
    Market::canonical(rule).crossover(q0, tolerance)
}

pub fn crossover_curve(rule: ScoringRule, q0_grid: &[f64]) -> Result<Vec<Crossover>> {
    Market::canonical(rule).crossover_curve(q0_grid, Execution::default())
}

//! What an outside observer learns from prices: whether each price is a
//! posterior mean, a fixed collusive level, or the realized outcome, and
//! whether Alice's private signal can be read off her trade.

use serde::{Deserialize, Serialize};

use crate::beliefs::{SignalModel, DEFAULT_RELEVANCE_TOLERANCE};
use crate::equilibrium::{EquilibriumProfile, Market, Regime, P0};
use crate::error::{Error, Result};
use crate::game::outcome_distribution;
use crate::scoring::ScoringFunction;
use crate::types::Bit;

/// Prices closer than this are treated as the same price.
pub const PRICE_MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    AfterAlice,
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Informativeness {
    BayesianEstimate,
    Predetermined,
    ActualOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformativenessLabel {
    pub stage: Stage,
    pub label: Informativeness,
}

pub fn classify_informativeness(profile: &EquilibriumProfile, bob_traded: bool) -> [InformativenessLabel; 2] {
    let after_alice = match profile.regime {
        Regime::Lpp => Informativeness::BayesianEstimate,
        Regime::Hpp => Informativeness::Predetermined,
    };
    // a trading Bob moves the price to the value his vote locks in
    let last = if bob_traded {
        Informativeness::ActualOutcome
    } else {
        after_alice
    };
    [
        InformativenessLabel {
            stage: Stage::AfterAlice,
            label: after_alice,
        },
        InformativenessLabel {
            stage: Stage::Final,
            label: last,
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Halfspace {
    Q0BelowHalf,
    Q0AboveHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecoveryResult {
    ExactSignal { signal: Bit },
    HalfspaceOnly { halfspace: Halfspace },
    Indeterminate,
}

/// Tries to infer Alice's signal from the price she moved the market to,
/// knowing the signal model, the rule and `pi`.
pub fn recover_signal<S: ScoringFunction>(
    model: &SignalModel,
    market: &Market<S>,
    pi: f64,
    observed_p_a: f64,
) -> Result<RecoveryResult> {
    if !(0.0 < observed_p_a && observed_p_a < 1.0) {
        return Err(Error::Domain {
            name: "observed p_A",
            range: "(0,1)",
            value: observed_p_a,
        });
    }
    let relevant = model.stochastically_relevant(DEFAULT_RELEVANCE_TOLERANCE)?;
    let profiles = [
        market.solve(pi, model.posterior_q0(Bit::Zero)?)?,
        market.solve(pi, model.posterior_q0(Bit::One)?)?,
    ];
    let close = |a: f64, b: f64| (a - b).abs() <= PRICE_MATCH_TOLERANCE;
    let matches: Vec<Bit> = Bit::BOTH
        .into_iter()
        .filter(|s| close(profiles[s.index()].alice_price, observed_p_a))
        .collect();
    if let [s] = matches[..] {
        if relevant && profiles[s.index()].regime == Regime::Lpp {
            return Ok(RecoveryResult::ExactSignal { signal: s });
        }
    }
    let t = market.thresholds;
    if close(observed_p_a, t.p_h) {
        return Ok(RecoveryResult::HalfspaceOnly {
            halfspace: Halfspace::Q0BelowHalf,
        });
    }
    if close(observed_p_a, t.p_l) {
        return Ok(RecoveryResult::HalfspaceOnly {
            halfspace: Halfspace::Q0AboveHalf,
        });
    }
    Ok(RecoveryResult::Indeterminate)
}

/// `|p_A - E[v]|` with `E[v]` taken under the play that `p_A` induces.
/// Zero exactly when `p_A` is a self-fulfilling forecast.
pub fn fixed_point_residual<S: ScoringFunction>(market: &Market<S>, pi: f64, q0: f64, p_a: f64) -> Result<f64> {
    if p_a == P0 {
        return Err(Error::IndeterminateAliceVote);
    }
    let dist = outcome_distribution(market, pi, q0, p_a)?;
    Ok((p_a - dist.mean()).abs())
}

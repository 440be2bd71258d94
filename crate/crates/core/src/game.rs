//! Playing the game: single plays, seeded Monte Carlo, exact expected
//! payoffs for arbitrary prices, deviation checks and the brute-force
//! equilibrium oracle.

use rand::distr::{weighted::WeightedIndex, Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beliefs::SignalModel;
use crate::equilibrium::{alice_rational_vote, EquilibriumProfile, Market, Regime, P0};
use crate::error::{check_unit, Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::scoring::{ScoringFunction, ScoringRule};
use crate::thresholds::Thresholds;
use crate::types::{Bit, Liquidation, OutcomeDistribution};

/// Replications per work unit in [`simulate_with`]. Partial statistics are
/// merged in chunk order, so the result does not depend on scheduling.
const CHUNK: usize = 4096;

/// Alice's belief about Bob's signal: a full model, or `q0` given directly
/// for each of her signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Belief {
    Model(SignalModel),
    Direct { q0_given_sa0: f64, q0_given_sa1: f64 },
}

impl Belief {
    /// The same `q0` whatever Alice's signal.
    pub fn fixed(q0: f64) -> Belief {
        Belief::Direct {
            q0_given_sa0: q0,
            q0_given_sa1: q0,
        }
    }

    pub fn q0(&self, s_a: Bit) -> Result<f64> {
        match self {
            Belief::Model(m) => m.posterior_q0(s_a),
            Belief::Direct {
                q0_given_sa0,
                q0_given_sa1,
            } => Ok(match s_a {
                Bit::Zero => *q0_given_sa0,
                Bit::One => *q0_given_sa1,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub rule: ScoringRule,
    pub pi: f64,
    pub belief: Belief,
    pub seed: u64,
    pub replications: usize,
    /// Also tally how often each type was drawn. Needs a full model.
    #[serde(default)]
    pub per_type: bool,
}

impl GameConfig {
    pub fn new(rule: ScoringRule, pi: f64, belief: Belief) -> Self {
        GameConfig {
            rule,
            pi,
            belief,
            seed: 0,
            replications: 1,
            per_type: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("pi", self.pi)?;
        match &self.belief {
            Belief::Model(m) => m.validate()?,
            Belief::Direct {
                q0_given_sa0,
                q0_given_sa1,
            } => {
                check_unit("q0", *q0_given_sa0)?;
                check_unit("q0", *q0_given_sa1)?;
                if self.per_type {
                    return Err(Error::Config(
                        "per-type tallies need a signal model; direct q0 has no types".into(),
                    ));
                }
            }
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        Ok(())
    }
}

/// One realized play of the game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub s_a: Bit,
    pub s_b: Bit,
    pub bob_traded: bool,
    pub regime: Regime,
    pub p_a: f64,
    pub p_b: f64,
    pub v_a: Bit,
    pub v_b: Bit,
    pub v: Liquidation,
    pub r_a: f64,
    pub r_b: f64,
}

/// Plays one game with Alice following `profile`.
pub fn play_profile<S: ScoringFunction>(
    market: &Market<S>,
    profile: &EquilibriumProfile,
    s_a: Bit,
    s_b: Bit,
    bob_participates: bool,
) -> Result<GameOutcome> {
    let p_a = profile.alice_price;
    let v_a = alice_rational_vote(p_a, s_a);
    let (p_b, v_b) = if bob_participates {
        let bob = market.best_response(p_a)?;
        (bob.trade_target, bob.vote)
    } else {
        (p_a, s_b)
    };
    let v = Liquidation::from_votes(v_a, v_b);
    let r_a = market.rule.payoff(p_a, P0, v.as_f64())?;
    let r_b = if bob_participates {
        market.rule.payoff(p_b, p_a, v.as_f64())?
    } else {
        0.0
    };
    Ok(GameOutcome {
        s_a,
        s_b,
        bob_traded: bob_participates,
        regime: profile.regime,
        p_a,
        p_b,
        v_a,
        v_b,
        v,
        r_a,
        r_b,
    })
}

/// Plays one game with given signals and participation, Alice following
/// the equilibrium for her posterior.
pub fn play(config: &GameConfig, s_a: Bit, s_b: Bit, bob_participates: bool) -> Result<GameOutcome> {
    config.validate()?;
    let market = Market::canonical(config.rule);
    let profile = market.solve(config.pi, config.belief.q0(s_a)?)?;
    play_profile(&market, &profile, s_a, s_b, bob_participates)
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Welford accumulator with a pairwise merge.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    fn estimate(&self) -> Estimate {
        let std_error = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64).max(0.0).sqrt() / (self.n as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            std_error,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    r_a: Moments,
    r_b: Moments,
    v: Moments,
    bob_trades: u64,
    lpp: u64,
    hpp: u64,
    nonfinite: u64,
    types: Vec<u64>,
}

impl Tally {
    fn push(&mut self, o: &GameOutcome, ty: Option<usize>) {
        self.r_a.push(o.r_a);
        self.r_b.push(o.r_b);
        self.v.push(o.v.as_f64());
        self.bob_trades += o.bob_traded as u64;
        match o.regime {
            Regime::Lpp => self.lpp += 1,
            Regime::Hpp => self.hpp += 1,
        }
        if !(o.r_a.is_finite() && o.r_b.is_finite()) {
            self.nonfinite += 1;
        }
        if let Some(t) = ty {
            self.types[t] += 1;
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.r_a.merge(&other.r_a);
        self.r_b.merge(&other.r_b);
        self.v.merge(&other.v);
        self.bob_trades += other.bob_trades;
        self.lpp += other.lpp;
        self.hpp += other.hpp;
        self.nonfinite += other.nonfinite;
        for (a, b) in self.types.iter_mut().zip(&other.types) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeCounts {
    pub lpp: u64,
    pub hpp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub replications: usize,
    pub r_a: Estimate,
    pub r_b: Estimate,
    pub v: Estimate,
    pub bob_trade_frequency: f64,
    pub regime_counts: RegimeCounts,
    pub nonfinite_payoffs: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub type_frequencies: Option<Vec<f64>>,
}

/// Samples signals (and the type, when there is one) for a replication.
enum SignalSampler {
    Model {
        types: WeightedIndex<f64>,
        cells: Vec<Option<WeightedIndex<f64>>>,
    },
    Direct {
        s_b_zero: [Bernoulli; 2],
    },
}

impl SignalSampler {
    fn new(belief: &Belief) -> Result<Self> {
        let bad = |e: rand::distr::weighted::Error| Error::Config(format!("cannot sample model: {e}"));
        Ok(match belief {
            Belief::Model(model) => SignalSampler::Model {
                types: WeightedIndex::new(&model.prior).map_err(bad)?,
                cells: model
                    .conditional_joint
                    .iter()
                    .map(|t| WeightedIndex::new(t.iter().flatten().copied()).ok())
                    .collect(),
            },
            Belief::Direct { .. } => {
                let q = |s| -> Result<Bernoulli> {
                    Bernoulli::new(belief.q0(s)?).map_err(|e| Error::Config(e.to_string()))
                };
                SignalSampler::Direct {
                    s_b_zero: [q(Bit::Zero)?, q(Bit::One)?],
                }
            }
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (Option<usize>, Bit, Bit) {
        match self {
            SignalSampler::Model { types, cells } => {
                let t = types.sample(rng);
                let cell = cells[t]
                    .as_ref()
                    .expect("validated tables have positive mass")
                    .sample(rng);
                (Some(t), Bit::from(cell >= 2), Bit::from(cell % 2 == 1))
            }
            SignalSampler::Direct { s_b_zero } => {
                let s_a = Bit::from(Bernoulli::new(0.5).expect("valid").sample(rng));
                let s_b = Bit::from(!s_b_zero[s_a.index()].sample(rng));
                (None, s_a, s_b)
            }
        }
    }
}

/// Seeded Monte Carlo of equilibrium play.
pub fn simulate(config: &GameConfig) -> Result<SimulationReport> {
    simulate_with(config, Execution::default())
}

/// [`simulate`] with an explicit execution mode. Replication `i` draws from
/// ChaCha stream `i` of the root seed, so the report is bit-identical for
/// every mode and thread count.
pub fn simulate_with(config: &GameConfig, exec: Execution) -> Result<SimulationReport> {
    config.validate()?;
    let market = Market::canonical(config.rule);
    let profiles = [
        config.belief.q0(Bit::Zero).and_then(|q| market.solve(config.pi, q)),
        config.belief.q0(Bit::One).and_then(|q| market.solve(config.pi, q)),
    ];
    let sampler = SignalSampler::new(&config.belief)?;
    let participate = Bernoulli::new(1.0 - config.pi).map_err(|e| Error::Config(e.to_string()))?;
    let n_types = match &config.belief {
        Belief::Model(m) if config.per_type => m.types.len(),
        _ => 0,
    };

    let n = config.replications;
    let chunks = n.div_ceil(CHUNK);
    let partials = map_indexed(exec, chunks, |c| -> Result<Tally> {
        let mut tally = Tally {
            types: vec![0; n_types],
            ..Tally::default()
        };
        for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let (ty, s_a, s_b) = sampler.sample(&mut rng);
            let bob = participate.sample(&mut rng);
            let profile = profiles[s_a.index()].as_ref().map_err(Clone::clone)?;
            let outcome = play_profile(&market, profile, s_a, s_b, bob)?;
            tally.push(&outcome, ty.filter(|_| n_types > 0));
        }
        Ok(tally)
    });

    let mut total = Tally {
        types: vec![0; n_types],
        ..Tally::default()
    };
    for part in partials {
        total.merge(&part?);
    }
    Ok(SimulationReport {
        replications: n,
        r_a: total.r_a.estimate(),
        r_b: total.r_b.estimate(),
        v: total.v.estimate(),
        bob_trade_frequency: total.bob_trades as f64 / n as f64,
        regime_counts: RegimeCounts {
            lpp: total.lpp,
            hpp: total.hpp,
        },
        nonfinite_payoffs: total.nonfinite,
        type_frequencies: (n_types > 0)
            .then(|| total.types.iter().map(|&c| c as f64 / n as f64).collect()),
    })
}

/// Distribution of the liquidation value when Alice moves the price to
/// `p_a ≠ 1/2`, Bob best-responds if he trades (probability `1 - pi`) and
/// votes his signal otherwise.
pub fn outcome_distribution<S>(market: &Market<S>, pi: f64, q0: f64, p_a: f64) -> Result<OutcomeDistribution>
where
    S: ScoringFunction,
{
    check_unit("pi", pi)?;
    check_unit("q0", q0)?;
    let v_a = alice_rational_vote(p_a, Bit::Zero);
    if p_a == P0 {
        return Err(Error::IndeterminateAliceVote);
    }
    let bob = market.best_response(p_a)?;
    let mut dist = OutcomeDistribution::default();
    dist.add(Liquidation::from_votes(v_a, bob.vote), 1.0 - pi);
    dist.add(Liquidation::from_votes(v_a, Bit::Zero), pi * q0);
    dist.add(Liquidation::from_votes(v_a, Bit::One), pi * (1.0 - q0));
    Ok(dist)
}

/// Alice's exact expected payoff for moving the price to `p_a`. Not
/// trading (`p_a = 1/2`) pays 0.
pub fn alice_expected_payoff<S>(market: &Market<S>, pi: f64, q0: f64, p_a: f64) -> Result<f64>
where
    S: ScoringFunction,
{
    if p_a == P0 {
        return Ok(0.0);
    }
    let dist = outcome_distribution(market, pi, q0, p_a)?;
    market.rule.expected_payoff(p_a, P0, &dist)
}

/// Interior points of a uniform price grid with spacing `step`.
pub fn price_grid(step: f64) -> Vec<f64> {
    let inv = 1.0 / step;
    let n = inv.round();
    if (inv - n).abs() < 1e-6 {
        let n = n as usize;
        (1..n).map(|k| k as f64 / n as f64).collect()
    } else {
        (1..)
            .map(|k| k as f64 * step)
            .take_while(|&p| p < 1.0)
            .collect()
    }
}

fn with_breakpoints(mut grid: Vec<f64>, t: &Thresholds) -> Vec<f64> {
    grid.extend([t.p_l, t.p_h]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn check_step(step: f64, max: f64) -> Result<()> {
    if !(step > 0.0 && step <= max) {
        return Err(Error::Domain {
            name: "price grid step",
            range: if max == 0.1 { "(0,0.1]" } else { "(0,0.01]" },
            value: step,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub price: f64,
    pub payoff: f64,
    pub regime_guess: Regime,
}

/// Exhaustive search for Alice's best price on a grid.
///
/// Bob's response jumps at `p_L` and `p_H`, and the payoff on the
/// collusive side peaks right at the jump, so those two breakpoints are
/// searched along with the grid.
///
/// When the best prices on the two sides of 1/2 pay the same (to 1e-12),
/// the side Alice leans toward wins: up for `q0 <= 1/2`, down otherwise.
/// That is the only situation (`pi = 0`) where the two sides tie.
pub fn brute_force_equilibrium<S>(
    market: &Market<S>,
    pi: f64,
    q0: f64,
    step: f64,
    exec: Execution,
) -> Result<OracleResult>
where
    S: ScoringFunction,
{
    check_step(step, 0.01)?;
    check_unit("pi", pi)?;
    check_unit("q0", q0)?;
    let grid = with_breakpoints(price_grid(step), &market.thresholds);
    let payoffs = map_indexed(exec, grid.len(), |i| alice_expected_payoff(market, pi, q0, grid[i]));

    let mut up: Option<(f64, f64)> = None;
    let mut down: Option<(f64, f64)> = None;
    for (&p, r) in grid.iter().zip(payoffs) {
        let r = r?;
        let side = if p > P0 {
            &mut up
        } else if p < P0 {
            &mut down
        } else {
            continue;
        };
        if side.is_none_or(|(_, best)| r > best) {
            *side = Some((p, r));
        }
    }
    let (lean, other) = if q0 <= 0.5 { (up, down) } else { (down, up) };
    let mut best = (P0, 0.0);
    for cand in [lean, other].into_iter().flatten() {
        if cand.1 > best.1 + 1e-12 {
            best = cand;
        }
    }
    let (price, payoff) = best;
    let t = market.thresholds;
    let near = |x: f64| (price - x).abs() <= step * (1.0 + 1e-9);
    let regime_guess = if near(t.p_h) || near(t.p_l) {
        Regime::Hpp
    } else {
        Regime::Lpp
    };
    Ok(OracleResult {
        price,
        payoff,
        regime_guess,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub profile_price: f64,
    /// Alice's exact expected payoff at the profile's price.
    pub profile_payoff: f64,
    pub best_alternative_price: f64,
    pub best_alternative_payoff: f64,
    /// Best alternative payoff minus profile payoff.
    pub max_gap: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// Checks that no price on the grid (nor abstaining) beats `profile`.
///
/// A grid point can never beat the true optimum, so the tolerance only
/// absorbs rounding; it is set to the quadratic curvature of one step.
pub fn verify_no_deviation<S>(
    market: &Market<S>,
    pi: f64,
    q0: f64,
    profile: &EquilibriumProfile,
    step: f64,
    exec: Execution,
) -> Result<DeviationReport>
where
    S: ScoringFunction,
{
    check_step(step, 0.1)?;
    let profile_payoff = alice_expected_payoff(market, pi, q0, profile.alice_price)?;
    let grid = with_breakpoints(price_grid(step), &market.thresholds);
    let payoffs = map_indexed(exec, grid.len(), |i| alice_expected_payoff(market, pi, q0, grid[i]));
    let mut best = (P0, 0.0);
    for (&p, r) in grid.iter().zip(payoffs) {
        let r = r?;
        if r > best.1 {
            best = (p, r);
        }
    }
    let max_gap = best.1 - profile_payoff;
    let tolerance = step * step;
    Ok(DeviationReport {
        profile_price: profile.alice_price,
        profile_payoff,
        best_alternative_price: best.0,
        best_alternative_payoff: best.1,
        max_gap,
        tolerance,
        certified: max_gap <= tolerance,
    })
}

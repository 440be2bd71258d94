//! Strictly proper scoring rules for a binary event, their linear extension
//! to the three-valued liquidation outcome, and the market-scoring-rule
//! payoff (the score of the new report minus the score of the old one).
//!
//! Canonical binary forms, with `p` the reported probability of outcome 1:
//!
//! ```text
//! logarithmic   s(p,1) = ln p                     s(p,0) = ln(1-p)
//! quadratic     s(p,1) = 2p - p^2                 s(p,0) = 1 - p^2
//! spherical     s(p,1) = p / sqrt(p^2+(1-p)^2)    s(p,0) = (1-p) / sqrt(p^2+(1-p)^2)
//! ```
//!
//! A fractional outcome `v` scores as `v s(p,1) + (1-v) s(p,0)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::types::{Bit, OutcomeDistribution};

/// An extended-real score. Negative infinity is a legitimate value (the
/// logarithmic rule at a boundary report that turns out wrong); positive
/// infinity never is.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Score(f64);

impl Score {
    pub const NEG_INFINITY: Score = Score(f64::NEG_INFINITY);

    pub fn new(value: f64) -> Score {
        debug_assert!(!value.is_nan() && value != f64::INFINITY, "bad score {value}");
        Score(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `self - other`, refusing the indeterminate `-inf - -inf`.
    pub fn minus(self, other: Score) -> Result<f64> {
        if self.0 == f64::NEG_INFINITY && other.0 == f64::NEG_INFINITY {
            return Err(Error::IndeterminateDifference);
        }
        Ok(self.0 - other.0)
    }
}

/// Anything that scores a probability report against a binary outcome.
///
/// Every method except [`score`](ScoringFunction::score) has a default
/// built on top of it, so wrappers such as [`Affine`] only implement that.
pub trait ScoringFunction: Sync {
    fn score(&self, p: f64, outcome: Bit) -> Result<Score>;

    /// Score against a liquidation value `v ∈ [0,1]` by linear extension.
    fn score_outcome(&self, p: f64, v: f64) -> Result<Score> {
        check_unit("v", v)?;
        if v == 1.0 {
            return self.score(p, Bit::One);
        }
        if v == 0.0 {
            return self.score(p, Bit::Zero);
        }
        let one = self.score(p, Bit::One)?.value();
        let zero = self.score(p, Bit::Zero)?.value();
        Ok(Score::new(v * one + (1.0 - v) * zero))
    }

    /// Market-scoring-rule payoff for moving the price from `p_old` to
    /// `p_new` when the security liquidates at `v`.
    fn payoff(&self, p_new: f64, p_old: f64, v: f64) -> Result<f64> {
        check_unit("p_old", p_old)?;
        let new = self.score_outcome(p_new, v)?;
        let old = self.score_outcome(p_old, v)?;
        new.minus(old)
    }

    /// Expected payoff against a distribution of liquidation values.
    /// Zero-weight outcomes are skipped, so an infinite score on an
    /// impossible outcome does not poison the expectation.
    fn expected_payoff(&self, p_new: f64, p_old: f64, dist: &OutcomeDistribution) -> Result<f64> {
        let mut total = 0.0;
        for (v, w) in dist.iter() {
            if w == 0.0 {
                continue;
            }
            total += w * self.payoff(p_new, p_old, v.as_f64())?;
        }
        if total.is_nan() {
            return Err(Error::IndeterminateDifference);
        }
        Ok(total)
    }

    /// The report maximizing the expected score when the liquidation value
    /// has mean `expected_v`. Strict propriety plus linearity of the
    /// extension make this the mean itself.
    fn optimal_report(&self, expected_v: f64) -> Result<f64> {
        check_unit("expected_v", expected_v)
    }
}

/// The three scoring rules a market maker can use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoringRule {
    Logarithmic,
    Quadratic,
    Spherical,
}

impl ScoringRule {
    pub const ALL: [ScoringRule; 3] = [
        ScoringRule::Logarithmic,
        ScoringRule::Quadratic,
        ScoringRule::Spherical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoringRule::Logarithmic => "logarithmic",
            ScoringRule::Quadratic => "quadratic",
            ScoringRule::Spherical => "spherical",
        }
    }
}

impl ScoringFunction for ScoringRule {
    fn score(&self, p: f64, outcome: Bit) -> Result<Score> {
        check_unit("p", p)?;
        // probability assigned to the realized outcome
        let q = match outcome {
            Bit::One => p,
            Bit::Zero => 1.0 - p,
        };
        let value = match self {
            ScoringRule::Logarithmic => q.ln(),
            ScoringRule::Quadratic => 2.0 * q - q * q,
            ScoringRule::Spherical => q / (p * p + (1.0 - p) * (1.0 - p)).sqrt(),
        };
        Ok(Score::new(value))
    }
}

impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScoringRule> {
        match s {
            "logarithmic" | "lmsr" => Ok(ScoringRule::Logarithmic),
            "quadratic" | "qmsr" => Ok(ScoringRule::Quadratic),
            "spherical" | "smsr" => Ok(ScoringRule::Spherical),
            other => Err(Error::Config(format!(
                "unknown scoring rule {other:?} (expected logarithmic, quadratic or spherical)"
            ))),
        }
    }
}

impl Serialize for ScoringRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ScoringRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A positive affine transform `scale * s + shift` of another rule. It is
/// strictly proper whenever the inner rule is and induces the same behavior.
#[derive(Debug, Clone, Copy)]
pub struct Affine<S> {
    pub inner: S,
    pub scale: f64,
    pub shift: f64,
}

impl<S: ScoringFunction> Affine<S> {
    pub fn new(inner: S, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain {
                name: "scale",
                range: "(0,inf)",
                value: scale,
            });
        }
        Ok(Affine {
            inner,
            scale,
            shift,
        })
    }
}

impl<S: ScoringFunction> ScoringFunction for Affine<S> {
    fn score(&self, p: f64, outcome: Bit) -> Result<Score> {
        let s = self.inner.score(p, outcome)?.value();
        Ok(Score::new(self.scale * s + self.shift))
    }
}

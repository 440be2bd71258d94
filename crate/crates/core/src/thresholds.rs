//! Bob's vote-flip thresholds.
//!
//! After Alice moves the price up to `p`, a trading Bob either colludes
//! (votes 1, pushes the price to 1, earns `s(1,1) - s(p,1)`) or corrects
//! (votes 0, pushes the price to 1/2, earns `s(1/2,1/2) - s(p,1/2)`). The
//! upper threshold `p_H` is where the two are equal; the lower threshold
//! is its mirror image.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect_root;
use crate::scoring::{ScoringFunction, ScoringRule};
use crate::types::Bit;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub p_l: f64,
    pub p_h: f64,
}

impl Thresholds {
    /// Builds a threshold pair, checking `0 < p_l < 1/2 < p_h < 1`.
    pub fn new(p_l: f64, p_h: f64) -> Result<Self> {
        if !(0.0 < p_l && p_l < 0.5) {
            return Err(Error::Domain {
                name: "p_L",
                range: "(0,1/2)",
                value: p_l,
            });
        }
        if !(0.5 < p_h && p_h < 1.0) {
            return Err(Error::Domain {
                name: "p_H",
                range: "(1/2,1)",
                value: p_h,
            });
        }
        Ok(Thresholds { p_l, p_h })
    }

    /// Cached thresholds of a canonical rule at the default tolerance.
    pub fn of(rule: ScoringRule) -> Thresholds {
        static CACHE: [OnceLock<Thresholds>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let slot = match rule {
            ScoringRule::Logarithmic => 0,
            ScoringRule::Quadratic => 1,
            ScoringRule::Spherical => 2,
        };
        *CACHE[slot].get_or_init(|| {
            solve_thresholds(&rule, DEFAULT_TOLERANCE).expect("canonical rules have a threshold")
        })
    }
}

/// Collude payoff minus correct payoff, on the closed interval, as an
/// extended real.
fn gap_unchecked<S: ScoringFunction + ?Sized>(rule: &S, p: f64) -> Result<f64> {
    let collude = rule.score(1.0, Bit::One)?.minus(rule.score(p, Bit::One)?)?;
    let correct = rule.score_outcome(0.5, 0.5)?.minus(rule.score_outcome(p, 0.5)?)?;
    Ok(collude - correct)
}

/// How much more Bob earns by colluding than by correcting when Alice has
/// moved the price to `p ∈ (1/2, 1)`. Positive means he colludes.
pub fn bob_indifference_gap<S: ScoringFunction + ?Sized>(rule: &S, p: f64) -> Result<f64> {
    if !(0.5 < p && p < 1.0) {
        return Err(Error::Domain {
            name: "p",
            range: "(1/2,1)",
            value: p,
        });
    }
    gap_unchecked(rule, p)
}

/// Solves for `p_H` by bisection to a bracket width of `tolerance` and
/// mirrors it to get `p_L = 1 - p_H`.
pub fn solve_thresholds<S: ScoringFunction + ?Sized>(rule: &S, tolerance: f64) -> Result<Thresholds> {
    let gap = |p: f64| gap_unchecked(rule, p).unwrap_or(f64::NAN);
    let p_h = bisect_root(gap, 0.5, 1.0, tolerance)?;
    Thresholds::new(1.0 - p_h, p_h)
}

//! Small value types shared by every stage of the game.

use serde::{Deserialize, Serialize};

/// A binary signal or vote in `{0, 1}`.
///
/// Serializes as the integer `0` or `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn as_f64(self) -> f64 {
        match self {
            Bit::Zero => 0.0,
            Bit::One => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<Bit> for u8 {
    fn from(b: Bit) -> u8 {
        b as u8
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Bit {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl TryFrom<u8> for Bit {
    type Error = String;

    fn try_from(v: u8) -> Result<Bit, String> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            other => Err(format!("expected 0 or 1, got {other}")),
        }
    }
}

impl std::fmt::Display for Bit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// Settlement value of the security: the average of the two votes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Liquidation {
    Zero,
    Half,
    One,
}

impl Liquidation {
    pub const ALL: [Liquidation; 3] = [Liquidation::Zero, Liquidation::Half, Liquidation::One];

    pub fn from_votes(a: Bit, b: Bit) -> Liquidation {
        match (a, b) {
            (Bit::Zero, Bit::Zero) => Liquidation::Zero,
            (Bit::One, Bit::One) => Liquidation::One,
            _ => Liquidation::Half,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Liquidation::Zero => 0.0,
            Liquidation::Half => 0.5,
            Liquidation::One => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Serialize for Liquidation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Liquidation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if v == 0.0 {
            Ok(Liquidation::Zero)
        } else if v == 0.5 {
            Ok(Liquidation::Half)
        } else if v == 1.0 {
            Ok(Liquidation::One)
        } else {
            Err(serde::de::Error::custom(format!(
                "liquidation value must be 0, 0.5 or 1, got {v}"
            )))
        }
    }
}

/// Probability weights over the three liquidation values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutcomeDistribution {
    weights: [f64; 3],
}

impl OutcomeDistribution {
    pub fn point(v: Liquidation) -> Self {
        let mut d = Self::default();
        d.weights[v.index()] = 1.0;
        d
    }

    pub fn add(&mut self, v: Liquidation, w: f64) {
        self.weights[v.index()] += w;
    }

    pub fn weight(&self, v: Liquidation) -> f64 {
        self.weights[v.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Liquidation, f64)> + '_ {
        Liquidation::ALL.into_iter().map(|v| (v, self.weight(v)))
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(v, w)| w * v.as_f64()).sum()
    }

    /// Swaps the roles of 0 and 1.
    pub fn reflect(&self) -> Self {
        Self {
            weights: [self.weights[2], self.weights[1], self.weights[0]],
        }
    }
}

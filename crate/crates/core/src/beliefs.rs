//! Finite common-knowledge signal model and Alice's posterior over Bob's
//! signal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Bit;

/// Inputs must sum to one within this tolerance.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Default threshold on `|q0(0) - q0(1)|` for stochastic relevance.
pub const DEFAULT_RELEVANCE_TOLERANCE: f64 = 1e-6;

/// `joint[a][b] = Pr(s_A = a, s_B = b | type)`.
pub type JointTable = [[f64; 2]; 2];

/// A finite type space with a prior and, per type, the joint distribution
/// of the two private signals.
///
/// Construct through [`SignalModel::new`] or deserialize and call
/// [`SignalModel::validate`]; [`SignalModel::from_json`] does both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    pub types: Vec<String>,
    pub prior: Vec<f64>,
    pub conditional_joint: Vec<JointTable>,
}

/// `q0` for each of Alice's signals; `None` where `Pr(s_A = s) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub q0_given_sa0: Option<f64>,
    pub q0_given_sa1: Option<f64>,
}

impl Posterior {
    pub fn get(&self, s_a: Bit) -> Result<f64> {
        let q = match s_a {
            Bit::Zero => self.q0_given_sa0,
            Bit::One => self.q0_given_sa1,
        };
        q.ok_or(Error::UndefinedPosterior { signal: s_a.into() })
    }
}

impl SignalModel {
    pub fn new(types: Vec<String>, prior: Vec<f64>, conditional_joint: Vec<JointTable>) -> Result<Self> {
        let model = SignalModel {
            types,
            prior,
            conditional_joint,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: SignalModel = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed signal model: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    /// Two equally likely types `{0, 1}`; each agent's signal independently
    /// equals the type with probability `accuracy`.
    pub fn symmetric_binary(accuracy: f64) -> Result<Self> {
        Self::binary_types(0.5, accuracy, accuracy)
    }

    /// Types `{0, 1}` with `Pr(type = 1) = prior_one`; Alice's signal matches
    /// the type w.p. `accuracy_a`, Bob's w.p. `accuracy_b`, independently.
    pub fn binary_types(prior_one: f64, accuracy_a: f64, accuracy_b: f64) -> Result<Self> {
        let table = |t: usize| {
            let pa = |a: usize| if a == t { accuracy_a } else { 1.0 - accuracy_a };
            let pb = |b: usize| if b == t { accuracy_b } else { 1.0 - accuracy_b };
            [[pa(0) * pb(0), pa(0) * pb(1)], [pa(1) * pb(0), pa(1) * pb(1)]]
        };
        Self::new(
            vec!["0".into(), "1".into()],
            vec![1.0 - prior_one, prior_one],
            vec![table(0), table(1)],
        )
    }

    /// Signals independent of the type and of each other.
    pub fn independent(pr_sa0: f64, pr_sb0: f64) -> Result<Self> {
        let t = [
            [pr_sa0 * pr_sb0, pr_sa0 * (1.0 - pr_sb0)],
            [(1.0 - pr_sa0) * pr_sb0, (1.0 - pr_sa0) * (1.0 - pr_sb0)],
        ];
        Self::new(vec!["any".into()], vec![1.0], vec![t])
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field, index, reason: String| Error::InvalidModel {
            field,
            index,
            reason,
        };
        if self.types.is_empty() {
            return Err(invalid("types", 0, "at least one type is required".into()));
        }
        if self.prior.len() != self.types.len() {
            return Err(invalid(
                "prior",
                self.prior.len().min(self.types.len()),
                format!("expected {} entries, got {}", self.types.len(), self.prior.len()),
            ));
        }
        if self.conditional_joint.len() != self.types.len() {
            return Err(invalid(
                "conditional_joint",
                self.conditional_joint.len().min(self.types.len()),
                format!(
                    "expected {} tables, got {}",
                    self.types.len(),
                    self.conditional_joint.len()
                ),
            ));
        }
        for (i, &p) in self.prior.iter().enumerate() {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(invalid("prior", i, format!("entry {p} is not a probability")));
            }
        }
        let total: f64 = self.prior.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(invalid("prior", 0, format!("entries sum to {total}, not 1")));
        }
        for (i, table) in self.conditional_joint.iter().enumerate() {
            if table.iter().flatten().any(|&p| !(p >= 0.0 && p.is_finite())) {
                return Err(invalid(
                    "conditional_joint",
                    i,
                    "entries must be nonnegative probabilities".into(),
                ));
            }
            let sum: f64 = table.iter().flatten().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(invalid("conditional_joint", i, format!("table sums to {sum}, not 1")));
            }
        }
        Ok(())
    }

    /// `Pr(s_A = a, s_B = b)` after marginalizing the type.
    pub fn joint(&self, a: Bit, b: Bit) -> f64 {
        self.prior
            .iter()
            .zip(&self.conditional_joint)
            .map(|(p, t)| p * t[a.index()][b.index()])
            .sum()
    }

    pub fn marginal_alice(&self, a: Bit) -> f64 {
        self.joint(a, Bit::Zero) + self.joint(a, Bit::One)
    }

    pub fn marginal_bob(&self, b: Bit) -> f64 {
        self.joint(Bit::Zero, b) + self.joint(Bit::One, b)
    }

    /// `q0(s) = Pr(s_B = 0 | s_A = s)`.
    pub fn posterior_q0(&self, s_a: Bit) -> Result<f64> {
        let evidence = self.marginal_alice(s_a);
        if evidence <= 0.0 {
            return Err(Error::UndefinedPosterior { signal: s_a.into() });
        }
        Ok((self.joint(s_a, Bit::Zero) / evidence).clamp(0.0, 1.0))
    }

    pub fn posterior(&self) -> Posterior {
        Posterior {
            q0_given_sa0: self.posterior_q0(Bit::Zero).ok(),
            q0_given_sa1: self.posterior_q0(Bit::One).ok(),
        }
    }

    /// Whether Alice's signal moves her belief about Bob's by more than
    /// `tolerance`.
    pub fn stochastically_relevant(&self, tolerance: f64) -> Result<bool> {
        let q0 = self.posterior_q0(Bit::Zero)?;
        let q1 = self.posterior_q0(Bit::One)?;
        Ok((q0 - q1).abs() > tolerance)
    }
}

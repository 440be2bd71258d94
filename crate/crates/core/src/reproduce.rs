//! Headline numbers recomputed from scratch, each with its tolerance.

use serde::Serialize;

use crate::equilibrium::{crossover_probability, solve_equilibrium, Market, Regime};
use crate::error::Result;
use crate::game::brute_force_equilibrium;
use crate::parallel::Execution;
use crate::scoring::ScoringRule;
use crate::thresholds::{solve_thresholds, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

fn numeric(name: impl Into<String>, expected: f64, actual: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        expected: format!("{expected} ± {tol:e}"),
        actual: format!("{actual:.12}"),
        pass: (actual - expected).abs() <= tol,
    }
}

fn regime(name: impl Into<String>, expected: Regime, actual: Regime) -> Check {
    Check {
        name: name.into(),
        expected: format!("{expected:?}"),
        actual: format!("{actual:?}"),
        pass: expected == actual,
    }
}

pub fn run_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    for (rule, p_l, p_h) in [
        (ScoringRule::Logarithmic, 0.2, 0.8),
        (ScoringRule::Quadratic, 0.25, 0.75),
        (ScoringRule::Spherical, 0.2725, 0.7275),
    ] {
        let t = solve_thresholds(&rule, DEFAULT_TOLERANCE)?;
        checks.push(numeric(format!("thresholds {rule} p_L"), p_l, t.p_l, 5e-4));
        checks.push(numeric(format!("thresholds {rule} p_H"), p_h, t.p_h, 5e-4));
    }

    let q = ScoringRule::Quadratic;
    let c = crossover_probability(q, 0.25, DEFAULT_TOLERANCE)?;
    checks.push(numeric("crossover quadratic q0=0.25", 0.9537, c.pi_c, 5e-4));
    let root = (-4.0 + 448f64.sqrt()) / 18.0;
    checks.push(numeric("crossover root of 9x^2+4x-12", root, c.pi_c, 1e-8));

    let hpp = solve_equilibrium(q, 0.9, 0.25)?;
    checks.push(regime("quadratic pi=0.9 q0=0.25 regime", Regime::Hpp, hpp.regime));
    checks.push(numeric("quadratic pi=0.9 q0=0.25 price", 0.75, hpp.alice_price, 1e-9));

    for pi in [0.96, 0.98, 1.0] {
        let p = solve_equilibrium(q, pi, 0.25)?;
        checks.push(regime(format!("quadratic pi={pi} q0=0.25 regime"), Regime::Lpp, p.regime));
        let formula = (1.0 + pi * 0.75) / 2.0;
        checks.push(numeric(format!("quadratic pi={pi} q0=0.25 LPP price"), formula, p.alice_price, 1e-9));
    }

    let market = Market::canonical(q);
    for pi in [0.9, 0.98] {
        let solved = solve_equilibrium(q, pi, 0.25)?;
        let oracle = brute_force_equilibrium(&market, pi, 0.25, 1e-3, Execution::default())?;
        checks.push(numeric(
            format!("oracle agreement quadratic pi={pi} q0=0.25"),
            solved.alice_price,
            oracle.price,
            1e-3,
        ));
    }
    Ok(checks)
}

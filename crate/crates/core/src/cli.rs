//! `msr-game` command line.
//!
//! Every command prints a JSON envelope by default. `thresholds` and
//! `crossover` also speak CSV (and default to it); CSV rounds probabilities
//! to 4 decimals for thresholds and 6 for crossover rows.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::beliefs::SignalModel;
use crate::equilibrium::{default_q0_grid, Market};
use crate::error::{check_unit, Error, Result};
use crate::game::{brute_force_equilibrium, simulate, verify_no_deviation, Belief, GameConfig};
use crate::inference::{classify_informativeness, recover_signal};
use crate::parallel::Execution;
use crate::reproduce::run_checks;
use crate::scoring::ScoringRule;
use crate::thresholds::{solve_thresholds, DEFAULT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "msr-game", version, about = "Trade-then-vote prediction market equilibria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Point {
    #[arg(long)]
    rule: ScoringRule,
    /// Probability that Bob does not trade.
    #[arg(long)]
    pi: f64,
    /// Alice's posterior that Bob's signal is 0.
    #[arg(long)]
    q0: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bob's vote-flip thresholds p_L, p_H (all rules unless --rule).
    Thresholds {
        #[arg(long)]
        rule: Option<ScoringRule>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Crossover probability pi_c over a q0 grid.
    Crossover {
        #[arg(long)]
        rule: ScoringRule,
        /// Grid points k/(N+1), k = 1..N, with 1/2 dropped.
        #[arg(long, default_value_t = 99)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Solve the equilibrium at one parameter point.
    Equilibrium {
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Seeded Monte Carlo of equilibrium play.
    Simulate {
        #[arg(long)]
        rule: ScoringRule,
        #[arg(long)]
        pi: f64,
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        q0: Option<f64>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tally drawn types (requires --model).
        #[arg(long)]
        per_type: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check that no grid price beats the solved profile.
    Verify {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Brute-force best price over a grid.
    Oracle {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Infer Alice's signal from her observed price.
    Recover {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rule: ScoringRule,
        #[arg(long)]
        pi: f64,
        #[arg(long)]
        observed: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Label what each price conveys.
    Informativeness {
        #[command(flatten)]
        point: Point,
        #[arg(long, action = ArgAction::Set)]
        bob_traded: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Recompute the headline results and report pass/fail.
    Reproduce,
}

#[derive(Debug, Serialize)]
pub struct OutputEnvelope {
    pub command: &'static str,
    pub parameters: Value,
    pub results: Value,
    pub artifact_version: &'static str,
}

fn envelope(command: &'static str, parameters: Value, results: impl Serialize) -> Result<String> {
    let env = OutputEnvelope {
        command,
        parameters,
        results: serde_json::to_value(results).map_err(|e| Error::Config(e.to_string()))?,
        artifact_version: env!("CARGO_PKG_VERSION"),
    };
    serde_json::to_string_pretty(&env).map_err(|e| Error::Config(e.to_string()))
}

fn json_only(format: Format, command: &str) -> Result<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Config(format!("`{command}` only supports --format json"))),
    }
}

/// Formats `x` to `decimals` places and trims trailing zeros.
fn rounded(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn load_model(path: &PathBuf) -> Result<SignalModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    SignalModel::from_json(&text)
}

fn check_point(p: &Point) -> Result<()> {
    check_unit("pi", p.pi)?;
    check_unit("q0", p.q0)?;
    Ok(())
}

fn point_params(p: &Point) -> Value {
    json!({ "rule": p.rule, "pi": p.pi, "q0": p.q0 })
}

/// Output text plus exit code for a parsed command.
fn dispatch(command: Command) -> Result<(String, i32)> {
    let out = match command {
        Command::Thresholds {
            rule,
            tolerance,
            format,
        } => {
            let rules = rule.map_or(ScoringRule::ALL.to_vec(), |r| vec![r]);
            let rows = rules
                .iter()
                .map(|r| Ok((*r, solve_thresholds(r, tolerance)?)))
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Csv => {
                    let mut s = String::from("rule,p_L,p_H\n");
                    for (r, t) in rows {
                        s += &format!("{r},{},{}\n", rounded(t.p_l, 4), rounded(t.p_h, 4));
                    }
                    s
                }
                Format::Json => {
                    let results: Vec<Value> = rows
                        .iter()
                        .map(|(r, t)| json!({ "rule": r, "p_L": t.p_l, "p_H": t.p_h }))
                        .collect();
                    envelope("thresholds", json!({ "rules": rules, "tolerance": tolerance }), results)?
                }
            }
        }
        Command::Crossover { rule, grid, format } => {
            if grid == 0 {
                return Err(Error::Config("--grid must be at least 1".into()));
            }
            let q0s = default_q0_grid(grid);
            let rows = Market::canonical(rule).crossover_curve(&q0s, Execution::default())?;
            match format {
                Format::Csv => {
                    let mut s = String::from("q0,pi_c\n");
                    for row in rows {
                        s += &format!("{},{}\n", rounded(row.q0, 6), rounded(row.pi_c, 6));
                    }
                    s
                }
                Format::Json => envelope("crossover", json!({ "rule": rule, "grid": grid }), rows)?,
            }
        }
        Command::Equilibrium { point, format } => {
            json_only(format, "equilibrium")?;
            check_point(&point)?;
            let profile = Market::canonical(point.rule).solve(point.pi, point.q0)?;
            envelope("equilibrium", point_params(&point), profile)?
        }
        Command::Simulate {
            rule,
            pi,
            q0,
            model,
            n,
            seed,
            per_type,
            format,
        } => {
            json_only(format, "simulate")?;
            let belief = match (q0, &model) {
                (_, Some(path)) => Belief::Model(load_model(path)?),
                (Some(q), None) => Belief::fixed(check_unit("q0", q)?),
                (None, None) => return Err(Error::Config("one of --q0 or --model is required".into())),
            };
            let config = GameConfig {
                rule,
                pi,
                belief,
                seed,
                replications: n,
                per_type,
            };
            let report = simulate(&config)?;
            let params = json!({
                "rule": rule, "pi": pi, "q0": q0, "model": model, "n": n,
                "seed": seed, "per_type": per_type,
            });
            envelope("simulate", params, report)?
        }
        Command::Verify { point, step, format } => {
            json_only(format, "verify")?;
            check_point(&point)?;
            let market = Market::canonical(point.rule);
            let profile = market.solve(point.pi, point.q0)?;
            let report = verify_no_deviation(&market, point.pi, point.q0, &profile, step, Execution::default())?;
            let mut params = point_params(&point);
            params["step"] = json!(step);
            envelope("verify", params, json!({ "profile": profile, "deviation": report }))?
        }
        Command::Oracle { point, step, format } => {
            json_only(format, "oracle")?;
            check_point(&point)?;
            let market = Market::canonical(point.rule);
            let result = brute_force_equilibrium(&market, point.pi, point.q0, step, Execution::default())?;
            let mut params = point_params(&point);
            params["step"] = json!(step);
            envelope("oracle", params, result)?
        }
        Command::Recover {
            model,
            rule,
            pi,
            observed,
            format,
        } => {
            json_only(format, "recover")?;
            check_unit("pi", pi)?;
            let m = load_model(&model)?;
            let result = recover_signal(&m, &Market::canonical(rule), pi, observed)?;
            let params = json!({ "model": model, "rule": rule, "pi": pi, "observed": observed });
            envelope("recover", params, result)?
        }
        Command::Informativeness {
            point,
            bob_traded,
            format,
        } => {
            json_only(format, "informativeness")?;
            check_point(&point)?;
            let profile = Market::canonical(point.rule).solve(point.pi, point.q0)?;
            let labels = classify_informativeness(&profile, bob_traded);
            let mut params = point_params(&point);
            params["bob_traded"] = json!(bob_traded);
            envelope("informativeness", params, json!({ "regime": profile.regime, "labels": labels }))?
        }
        Command::Reproduce => {
            let checks = run_checks()?;
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for c in &checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                s += &format!(
                    "{verdict}  {:width$}  expected {}  got {}\n",
                    c.name, c.expected, c.actual
                );
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            s += &format!("{} checks, {} failed\n", checks.len(), failed);
            let code = if failed == 0 { EXIT_OK } else { EXIT_MISMATCH };
            return Ok((s, code));
        }
    };
    Ok((out, EXIT_OK))
}

/// Runs the command line, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INVALID
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((text, code)) => {
            let _ = write!(out, "{text}");
            if !text.ends_with('\n') {
                let _ = writeln!(out);
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

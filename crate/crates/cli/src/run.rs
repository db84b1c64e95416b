use std::time::Instant;

use clap::ValueEnum;
use fct_core::balanced::{solve_pfct_u, PackingMode, PfctuOptions};
use fct_core::bicriteria::solve_bicriteria;
use fct_core::fct_u::solve_fct_u;
use fct_core::greedy::greedy_solve;
use fct_core::model::classify_variant;
use fct_core::oracle::{exact_balanced_partition, exact_fct, partition_cost};
use fct_core::ptas::ptas_solve;
use fct_core::rational::{format_rational, from_u64, parse_rational, ratio};
use fct_core::{evaluate_cost, Error, FlowSolution, Instance, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CertificateInvalid(_) => CliError::Internal(e.to_string()),
            _ => CliError::User(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    PfctS,
    PfctU,
    FctU,
    FctBicriteria,
    PfctPtas,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::PfctS => "pfct-s",
            Variant::PfctU => "pfct-u",
            Variant::FctU => "fct-u",
            Variant::FctBicriteria => "fct-bicriteria",
            Variant::PfctPtas => "pfct-ptas",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exact,
    Ls,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub variant: Variant,
    pub mode: Mode,
    pub swap: usize,
    pub k: usize,
    pub epsilon: Option<Rational>,
}

impl SolverConfig {
    fn epsilon_or_default(&self) -> Rational {
        self.epsilon.clone().unwrap_or_else(|| match self.variant {
            Variant::PfctPtas => ratio(1, 2),
            _ => ratio(1, 4),
        })
    }

    pub fn algorithm(&self) -> &'static str {
        match (self.variant, self.mode) {
            (Variant::PfctS, _) => "greedy",
            (Variant::PfctU, Mode::Exact) => "balanced-packing-exact",
            (Variant::PfctU, Mode::Ls) => "balanced-packing-local-search",
            (Variant::FctU, _) => "transport-forest",
            (Variant::FctBicriteria, _) => "lp-tree-rounding",
            (Variant::PfctPtas, _) => "guessed-edges",
        }
    }

    pub fn params(&self, seed: Option<u64>) -> Params {
        let uses_eps = matches!(self.variant, Variant::FctBicriteria | Variant::PfctPtas);
        let is_u = self.variant == Variant::PfctU;
        Params {
            epsilon: uses_eps.then(|| format_rational(&self.epsilon_or_default())),
            swap: (is_u && self.mode == Mode::Ls).then_some(self.swap),
            k: is_u.then_some(self.k),
            seed,
        }
    }
}

pub fn parse_epsilon(s: &str) -> Result<Rational, String> {
    parse_rational(s)
        .filter(|e| *e > Rational::from_integer(0.into()))
        .ok_or_else(|| format!("'{s}' is not a positive rational p/q"))
}

pub struct Solved {
    pub flow: FlowSolution,
    pub cost: Rational,
}

/// Runs the configured solver and rechecks its output against the instance.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<Solved, CliError> {
    let (flow, claimed) = match cfg.variant {
        Variant::PfctS => {
            let x = greedy_solve(inst)?;
            let cost = evaluate_cost(inst, &x)?;
            (x, cost)
        }
        Variant::PfctU => {
            let mode = match cfg.mode {
                Mode::Exact => PackingMode::Exact,
                Mode::Ls => PackingMode::LocalSearch { swap: cfg.swap },
            };
            let sol = solve_pfct_u(inst, PfctuOptions { mode, max_k: cfg.k })?;
            (sol.flow, from_u64(sol.cost as u64))
        }
        Variant::FctU => {
            let sol = solve_fct_u(inst)?;
            (sol.flow, sol.cost)
        }
        Variant::FctBicriteria => {
            let sol = solve_bicriteria(inst, &cfg.epsilon_or_default())?;
            if sol.cost > sol.cost_bound {
                return Err(CliError::Internal("bicriteria cost above its bound".into()));
            }
            (sol.flow, sol.cost)
        }
        Variant::PfctPtas => {
            let sol = ptas_solve(inst, &cfg.epsilon_or_default())?;
            (sol.flow, sol.cost)
        }
    };
    flow.check_marginals(inst)
        .map_err(|v| CliError::Internal(format!("solver output: {v}")))?;
    let cost = evaluate_cost(inst, &flow)?;
    if cost != claimed {
        return Err(CliError::Internal(format!(
            "reported cost {claimed} differs from recomputed {cost}"
        )));
    }
    Ok(Solved { flow, cost })
}

/// Exact optimum: support enumeration, or the balanced-partition oracle
/// for uniform pure instances too large for it.
pub fn oracle(inst: &Instance) -> Result<(Rational, Option<FlowSolution>), CliError> {
    match exact_fct(inst) {
        Ok(sol) => Ok((sol.cost, Some(sol.flow))),
        Err(Error::TooLarge(_)) if classify_variant(inst).uniform && classify_variant(inst).pure_modulo_forbidden => {
            Ok((partition_cost(&exact_balanced_partition(inst)?), None))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub epsilon: Option<String>,
    pub swap: Option<usize>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

/// One solver run. `ratio` is present exactly when `oracle_cost` is.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub variant: String,
    pub algorithm: String,
    pub cost: Option<String>,
    pub oracle_cost: Option<String>,
    pub ratio: Option<String>,
    pub wall_time_us: Option<u64>,
    pub params: Params,
    pub error: Option<String>,
}

pub struct RunOptions {
    pub with_oracle: bool,
    pub wall_time: bool,
    pub seed: Option<u64>,
}

/// Solves and reports; solver failures are recorded in the report. The
/// flow is returned when solving succeeded.
pub fn run(
    id: &str,
    inst: &Instance,
    cfg: &SolverConfig,
    opts: &RunOptions,
) -> Result<(RunReport, Option<Solved>), CliError> {
    let start = Instant::now();
    let outcome = solve(inst, cfg);
    let elapsed = start.elapsed();
    let mut report = RunReport {
        instance: id.to_string(),
        variant: cfg.variant.name().to_string(),
        algorithm: cfg.algorithm().to_string(),
        cost: None,
        oracle_cost: None,
        ratio: None,
        wall_time_us: opts.wall_time.then_some(elapsed.as_micros() as u64),
        params: cfg.params(opts.seed),
        error: None,
    };
    let solved = match outcome {
        Ok(s) => s,
        Err(e @ CliError::Internal(_)) => return Err(e),
        Err(CliError::User(msg)) => {
            report.error = Some(msg);
            return Ok((report, None));
        }
    };
    report.cost = Some(format_rational(&solved.cost));
    if opts.with_oracle {
        match oracle(inst) {
            Ok((opt, _)) => {
                if solved.cost < opt && cfg.variant != Variant::FctBicriteria {
                    return Err(CliError::Internal(format!(
                        "{id}: solver cost {} below the optimum {opt}",
                        solved.cost
                    )));
                }
                report.ratio = Some(if opt == Rational::from_integer(0.into()) {
                    if solved.cost == opt { "1".into() } else { "inf".into() }
                } else {
                    format_rational(&(&solved.cost / &opt))
                });
                report.oracle_cost = Some(format_rational(&opt));
            }
            Err(CliError::User(msg)) => report.error = Some(format!("oracle: {msg}")),
            Err(e) => return Err(e),
        }
    }
    Ok((report, Some(solved)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_parsing() {
        assert_eq!(parse_epsilon("1/8"), Ok(ratio(1, 8)));
        assert!(parse_epsilon("0").is_err());
        assert!(parse_epsilon("0.25").is_err());
    }

    #[test]
    fn zero_optimum_ratio() {
        let inst = Instance::pure(vec![1], vec![1], vec![vec![Rational::from_integer(0.into())]]).unwrap();
        let opts = RunOptions {
            with_oracle: true,
            wall_time: false,
            seed: None,
        };
        let cfg = SolverConfig {
            variant: Variant::PfctPtas,
            mode: Mode::Exact,
            swap: 2,
            k: 5,
            epsilon: None,
        };
        let (report, _) = run("z", &inst, &cfg, &opts).unwrap();
        assert_eq!(report.ratio.as_deref(), Some("1"));
        assert_eq!(report.params.epsilon.as_deref(), Some("1/2"));
    }
}

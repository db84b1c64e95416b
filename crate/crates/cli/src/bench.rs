use std::collections::BTreeMap;

use fct_core::random::Family;
use fct_core::rational::{format_rational, parse_rational};
use fct_core::Rational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::run::{parse_epsilon, run, CliError, Mode, RunOptions, RunReport, SolverConfig, Variant};

/// Bench configuration, read from TOML:
///
/// ```toml
/// [[run]]
/// family = "pfct-s"
/// sizes = [[2, 3], [4, 6]]
/// seeds = 200
/// variants = ["pfct-s"]
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub run: Vec<RunEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub family: String,
    pub sizes: Vec<(usize, usize)>,
    /// Seeds `seed_start..seed_start + seeds`.
    pub seeds: u64,
    #[serde(default)]
    pub seed_start: u64,
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_swap")]
    pub swap: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    pub epsilon: Option<String>,
    #[serde(default = "default_oracle")]
    pub oracle: bool,
}

fn default_swap() -> usize {
    2
}

fn default_k() -> usize {
    5
}

fn default_oracle() -> bool {
    true
}

/// Largest ratio seen per variant.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub variant: String,
    pub rows: usize,
    pub errors: usize,
    pub max_ratio: Option<String>,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    variant: &'a str,
    algorithm: &'a str,
    cost: Option<&'a str>,
    oracle_cost: Option<&'a str>,
    ratio: Option<&'a str>,
    wall_time_us: Option<u64>,
    epsilon: Option<&'a str>,
    swap: Option<usize>,
    k: Option<usize>,
    seed: Option<u64>,
    error: Option<&'a str>,
}

struct Job {
    family: Family,
    n: usize,
    m: usize,
    seed: u64,
    cfg: SolverConfig,
    oracle: bool,
}

/// Runs every row of the configuration; rows come back ordered by family,
/// size, seed and variant.
pub fn run_bench(config: &BenchConfig, wall_time: bool) -> Result<Vec<RunReport>, CliError> {
    let mut jobs = Vec::new();
    for entry in &config.run {
        let family: Family = entry.family.parse().map_err(|e: fct_core::Error| CliError::User(e.to_string()))?;
        let epsilon = entry
            .epsilon
            .as_deref()
            .map(parse_epsilon)
            .transpose()
            .map_err(CliError::User)?;
        for &(n, m) in &entry.sizes {
            if n == 0 || m == 0 {
                return Err(CliError::User(format!("size ({n}, {m}) must be positive")));
            }
            for seed in entry.seed_start..entry.seed_start + entry.seeds {
                for &variant in &entry.variants {
                    jobs.push(Job {
                        family,
                        n,
                        m,
                        seed,
                        cfg: SolverConfig {
                            variant,
                            mode: entry.mode,
                            swap: entry.swap,
                            k: entry.k,
                            epsilon: epsilon.clone(),
                        },
                        oracle: entry.oracle,
                    });
                }
            }
        }
    }
    jobs.sort_by_key(|j| (j.family, j.n, j.m, j.seed, j.cfg.variant));
    jobs.par_iter()
        .map(|job| {
            let inst = job.family.instance(job.n, job.m, job.seed);
            let id = format!("{}-{}x{}-{}", job.family, job.n, job.m, job.seed);
            let opts = RunOptions {
                with_oracle: job.oracle,
                wall_time,
                seed: Some(job.seed),
            };
            run(&id, &inst, &job.cfg, &opts).map(|(report, _)| report)
        })
        .collect()
}

pub fn summarize(reports: &[RunReport]) -> Vec<Summary> {
    let mut by_variant: BTreeMap<&str, (usize, usize, Option<Rational>, bool)> = BTreeMap::new();
    for r in reports {
        let entry = by_variant.entry(&r.variant).or_insert((0, 0, None, false));
        entry.0 += 1;
        if r.error.is_some() {
            entry.1 += 1;
        }
        match r.ratio.as_deref() {
            Some("inf") => entry.3 = true,
            Some(text) => {
                let ratio = parse_rational(text).expect("ratios are written as p/q");
                if entry.2.as_ref().is_none_or(|best| ratio > *best) {
                    entry.2 = Some(ratio);
                }
            }
            None => {}
        }
    }
    by_variant
        .into_iter()
        .map(|(variant, (rows, errors, max, infinite))| Summary {
            variant: variant.to_string(),
            rows,
            errors,
            max_ratio: if infinite { Some("inf".into()) } else { max.as_ref().map(format_rational) },
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(reports: &[RunReport], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let io = |e: csv::Error| CliError::User(format!("writing CSV: {e}"));
    w.write_record([
        "instance",
        "variant",
        "algorithm",
        "cost",
        "oracle_cost",
        "ratio",
        "wall_time_us",
        "epsilon",
        "swap",
        "k",
        "seed",
        "error",
    ])
    .map_err(io)?;
    for r in reports {
        w.serialize(CsvRow {
            instance: &r.instance,
            variant: &r.variant,
            algorithm: &r.algorithm,
            cost: r.cost.as_deref(),
            oracle_cost: r.oracle_cost.as_deref(),
            ratio: r.ratio.as_deref(),
            wall_time_us: r.wall_time_us,
            epsilon: r.params.epsilon.as_deref(),
            swap: r.params.swap,
            k: r.params.k,
            seed: r.params.seed,
            error: r.error.as_deref(),
        })
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::User(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::Params;

    fn report(variant: &str, ratio: Option<&str>, error: Option<&str>) -> RunReport {
        RunReport {
            instance: "x".into(),
            variant: variant.into(),
            algorithm: "a".into(),
            cost: None,
            oracle_cost: ratio.map(|_| "1".into()),
            ratio: ratio.map(Into::into),
            wall_time_us: None,
            params: Params::default(),
            error: error.map(Into::into),
        }
    }

    #[test]
    fn summary_takes_exact_maximum() {
        let rows = [
            report("pfct-s", Some("7/5"), None),
            report("pfct-s", Some("3/2"), None),
            report("pfct-s", None, Some("too large")),
            report("fct-u", Some("1"), None),
        ];
        let s = summarize(&rows);
        assert_eq!(s[0].variant, "fct-u");
        assert_eq!(s[1].max_ratio.as_deref(), Some("3/2"));
        assert_eq!((s[1].rows, s[1].errors), (3, 1));
    }

    #[test]
    fn config_defaults() {
        let cfg: BenchConfig =
            toml::from_str("[[run]]\nfamily = \"fct\"\nsizes = [[1, 2]]\nseeds = 2\nvariants = [\"fct-bicriteria\"]\n").unwrap();
        let entry = &cfg.run[0];
        assert_eq!((entry.swap, entry.k, entry.oracle, entry.mode), (2, 5, true, Mode::Exact));
        assert_eq!(run_bench(&cfg, false).unwrap().len(), 2);
    }
}

//! `fct`: solve, verify, generate and benchmark fixed charge
//! transportation instances.

mod bench;
mod run;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fct_core::balanced::LpCertificate;
use fct_core::format::{parse_instance, parse_solution, serialize_instance, serialize_solution};
use fct_core::random::{random_dst, random_setcover, random_threedm_matching, Family};
use fct_core::rational::{format_rational, ratio};
use fct_core::reductions::{
    default_delta, dst_to_pfct_digraph, normalize_digraph, parse_dst, parse_setcover, parse_threedm,
    serialize_dst, serialize_setcover, serialize_threedm, setcover_to_fct_s, split_digraph_to_bipartite,
    threedm_to_pfct_u_with_delta, INDEPENDENCE_ORDER,
};
use fct_core::{evaluate_cost, Instance, Rational};

use bench::{run_bench, summarize, write_csv, BenchConfig};
use run::{oracle, parse_epsilon, CliError, Mode, RunOptions, RunReport, SolverConfig, Variant};

#[derive(Parser)]
#[command(name = "fct", version, about = "Fixed charge transportation solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print a JSON report.
    Solve(SolveArgs),
    /// Check a solution against an instance and recompute its cost.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Check a built-in certificate.
    Certify {
        #[command(subcommand)]
        which: Certificate,
    },
    /// Solve exactly by support enumeration.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random instance, or reduce a DST / set cover / 3DM instance.
    Generate(GenerateArgs),
    /// Run a TOML-configured benchmark; JSON lines go to stdout.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// CSV table destination.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        wall_time: bool,
    },
}

#[derive(Subcommand)]
enum Certificate {
    /// The 6/5 factor-revealing LP for uniform instances.
    Lp65 {
        #[arg(long, hide = true)]
        perturb_primal: bool,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    variant: Variant,
    #[arg(long)]
    input: PathBuf,
    /// Solution file destination.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 2)]
    swap: usize,
    /// Largest balanced set size for pfct-u.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: Option<Rational>,
    /// Recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Also compute the exact optimum and the ratio.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    wall_time: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Dst,
    Setcover,
    #[value(name = "3dm")]
    ThreeDm,
}

#[derive(Args)]
struct GenerateArgs {
    /// Reduce from this problem instead of drawing an FCT instance.
    #[arg(long, value_enum, conflicts_with = "family")]
    from: Option<Source>,
    /// Source instance for `--from`; drawn from the seed when absent.
    #[arg(long, requires = "from")]
    input: Option<PathBuf>,
    /// Where to save a drawn source instance.
    #[arg(long, requires = "from")]
    source_out: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Demand spread for `--from 3dm`.
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn emit(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string(value).expect("reports serialize"));
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.input)?;
    let cfg = SolverConfig {
        variant: args.variant,
        mode: args.mode,
        swap: args.swap,
        k: args.k,
        epsilon: args.epsilon,
    };
    let opts = RunOptions {
        with_oracle: args.oracle,
        wall_time: args.wall_time,
        seed: args.seed,
    };
    let id = args.input.display().to_string();
    let (report, solved) = run::run(&id, &inst, &cfg, &opts)?;
    let Some(solved) = solved else {
        return Err(CliError::User(report.error.unwrap_or_default()));
    };
    if let Some(out) = &args.out {
        write(out, &serialize_solution(&solved.flow))?;
    }
    emit(&report);
    Ok(())
}

fn cmd_verify(input: &Path, solution: &Path) -> Result<(), CliError> {
    let inst = read_instance(input)?;
    let x = parse_solution(&read(solution)?).map_err(|e| CliError::User(format!("{}: {e}", solution.display())))?;
    let outcome = x.check_marginals(&inst).map_err(|v| v.to_string()).and_then(|()| {
        evaluate_cost(&inst, &x).map_err(|e| e.to_string())
    });
    match outcome {
        Ok(cost) => {
            emit(&serde_json::json!({"status": "ok", "cost": format_rational(&cost)}));
            Ok(())
        }
        Err(detail) => {
            emit(&serde_json::json!({"status": "violation", "detail": detail}));
            Err(CliError::Internal(format!("solution violates the instance: {detail}")))
        }
    }
}

fn cmd_certify(perturb_primal: bool) -> Result<(), CliError> {
    let mut cert = LpCertificate::nominal();
    if perturb_primal {
        cert.primal.x3 += ratio(1, 100);
    }
    let p = &cert.primal;
    let d = &cert.dual;
    let f = format_rational;
    println!(
        "primal x3={} x4={} x5={} x6={} z={} r={}",
        f(&p.x3),
        f(&p.x4),
        f(&p.x5),
        f(&p.x6),
        f(&p.z),
        f(&p.r)
    );
    println!(
        "dual alpha={} beta={} y3={} y4={} y5={}",
        f(&d.alpha),
        f(&d.beta),
        f(&d.y3),
        f(&d.y4),
        f(&d.y5)
    );
    println!("value {}", f(&cert.value));
    cert.verify()?;
    println!("verified");
    Ok(())
}

fn cmd_oracle(input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let inst = read_instance(input)?;
    let (cost, flow) = oracle(&inst)?;
    if let Some(out) = out {
        let flow = flow.ok_or_else(|| CliError::User("this oracle gives the cost only".into()))?;
        write(out, &serialize_solution(&flow))?;
    }
    emit(&RunReport {
        instance: input.display().to_string(),
        variant: "fct".into(),
        algorithm: "exact".into(),
        cost: Some(format_rational(&cost)),
        oracle_cost: None,
        ratio: None,
        wall_time_us: None,
        params: Default::default(),
        error: None,
    });
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let user = |e: fct_core::Error| CliError::User(e.to_string());
    let source_text = |path: &Option<PathBuf>| path.as_deref().map(read).transpose();
    let (inst, source) = match args.from {
        None => {
            let family: Family = args.family.as_deref().unwrap_or("fct").parse().map_err(user)?;
            if args.n == 0 || args.m == 0 {
                return Err(CliError::User("n and m must be positive".into()));
            }
            (family.instance(args.n, args.m, args.seed), None)
        }
        Some(Source::Dst) => {
            let dst = match source_text(&args.input)? {
                Some(text) => parse_dst(&text).map_err(user)?,
                None => random_dst(6, args.seed),
            };
            let dg = normalize_digraph(&dst_to_pfct_digraph(&dst).map_err(user)?).map_err(user)?;
            (split_digraph_to_bipartite(&dg).map_err(user)?, Some(serialize_dst(&dst)))
        }
        Some(Source::Setcover) => {
            let sc = match source_text(&args.input)? {
                Some(text) => parse_setcover(&text).map_err(user)?,
                None => random_setcover(3, 4, args.seed),
            };
            (setcover_to_fct_s(&sc).map_err(user)?, Some(serialize_setcover(&sc)))
        }
        Some(Source::ThreeDm) => {
            let tdm = match source_text(&args.input)? {
                Some(text) => parse_threedm(&text).map_err(user)?,
                None => random_threedm_matching(2, 1, args.seed),
            };
            let delta = match args.delta {
                Some(d) => d,
                None => default_delta(tdm.size, INDEPENDENCE_ORDER).map_err(user)?,
            };
            let red = threedm_to_pfct_u_with_delta(&tdm, delta, args.seed).map_err(user)?;
            (red.instance, Some(serialize_threedm(&tdm)))
        }
    };
    if let (Some(path), Some(text)) = (&args.source_out, &source) {
        write(path, text)?;
    }
    let text = serialize_instance(&inst);
    match &args.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_bench(config: &Path, out: Option<&Path>, wall_time: bool) -> Result<(), CliError> {
    let text = read(config)?;
    let cfg: BenchConfig =
        toml::from_str(&text).map_err(|e| CliError::User(format!("{}: {e}", config.display())))?;
    let reports = run_bench(&cfg, wall_time)?;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for r in &reports {
        writeln!(lock, "{}", serde_json::to_string(r).expect("reports serialize"))
            .map_err(|e| CliError::User(e.to_string()))?;
    }
    for s in summarize(&reports) {
        writeln!(lock, "{}", serde_json::json!({ "summary": s }))
            .map_err(|e| CliError::User(e.to_string()))?;
    }
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
            write_csv(&reports, file)
        }
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify { input, solution } => cmd_verify(&input, &solution),
        Command::Certify {
            which: Certificate::Lp65 { perturb_primal },
        } => cmd_certify(perturb_primal),
        Command::Oracle { input, out } => cmd_oracle(&input, out.as_deref()),
        Command::Generate(args) => cmd_generate(args),
        Command::Bench { config, out, wall_time } => cmd_bench(&config, out.as_deref(), wall_time),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

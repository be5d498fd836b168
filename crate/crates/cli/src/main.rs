//! `cran`: capacity bounds for symmetric C-RAN downlinks from the command line.

mod channel;
mod config;
mod error;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cran_core::verify::Suite;
use cran_core::{
    optimize_thm1, regimes, run_suite, run_trials, sweep, thm2_upper, AuxConfig, MartonRates,
    SearchConfig, SimConfig, SolverConfig, SymmetricPmf,
};

use config::Params;
use error::CliError;
use output::{emit, num, rate_col};

#[derive(Parser)]
#[command(name = "cran", version, about = "Capacity bounds for symmetric C-RAN downlinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with default flag values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Gaussian lower and upper bounds over a grid of fronthaul capacities.
    Sweep,
    /// Fronthaul thresholds where the Gaussian bounds are known to meet.
    Regimes,
    /// Randomized self-checks.
    Verify,
    /// Monte Carlo run of the coding scheme on a discrete channel.
    Simulate,
    /// Lower bound on a discrete channel, maximized over symmetric pmfs.
    DiscreteLb,
    /// Auxiliary-variable upper bound on a discrete channel.
    DiscreteUb,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                CliError::Parse(String::new()).exit_code()
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cran: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let params = match &cli.config {
        Some(path) => cli.params.merge(config::load(path)?),
        None => cli.params,
    };
    match cli.command {
        Command::Sweep => cmd_sweep(&params),
        Command::Regimes => cmd_regimes(&params),
        Command::Verify => cmd_verify(&params),
        Command::Simulate => cmd_simulate(&params),
        Command::DiscreteLb => cmd_discrete(&params, false),
        Command::DiscreteUb => cmd_discrete(&params, true),
    }
}

fn cmd_sweep(params: &Params) -> Result<(), CliError> {
    let (m, p) = (params.relays(), params.power());
    let grid = params.fronthaul_grid()?;
    let rows = sweep(m, p, &grid, &SolverConfig::default())?;
    let mut csv = format!(
        "{},{},{},lb_rho,ub_rho,ub_N,regime",
        rate_col("C"),
        rate_col("lb"),
        rate_col("ub")
    );
    if params.reference_curves {
        write!(csv, ",{},{}", rate_col("MC"), rate_col("coop")).unwrap();
    }
    csv.push('\n');
    let mut crossed = Vec::new();
    for row in &rows {
        write!(
            csv,
            "{},{},{},{},{},{},{}",
            num(row.fronthaul),
            num(row.lower.rate),
            num(row.upper.rate),
            num(row.lower.rho_l),
            num(row.upper.rho_star),
            num(row.upper.n_star),
            row.regime
        )
        .unwrap();
        if params.reference_curves {
            let mc = m as f64 * row.fronthaul;
            let coop = 0.5 * (1.0 + (m * m) as f64 * p).log2();
            write!(csv, ",{},{}", num(mc), num(coop)).unwrap();
        }
        csv.push('\n');
        if row.lower.rate > row.upper.rate + 1e-6 {
            crossed.push(row.fronthaul);
        }
    }
    emit(params.out.as_deref(), &csv)?;
    if crossed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!("lower bound above upper bound at C = {crossed:?}")))
    }
}

fn cmd_regimes(params: &Params) -> Result<(), CliError> {
    let r = regimes(params.relays(), params.power())?;
    let mut text = String::new();
    writeln!(text, "M = {}, P = {}", r.relays, r.power).unwrap();
    writeln!(text, "C_C     {:.6}", r.c_c).unwrap();
    writeln!(text, "C_L     {:.6}", r.c_l).unwrap();
    writeln!(text, "C_U     {:.6}", r.c_u).unwrap();
    writeln!(text, "rho2    {:.6}", r.rho2).unwrap();
    writeln!(text, "C_coop  {:.6}", r.c_coop).unwrap();
    writeln!(text, "regimes of C [bits/channel-use]:").unwrap();
    writeln!(text, "  [0, {:.6}]  cutset-tight", r.c_c).unwrap();
    if r.has_window() {
        if r.c_l > r.c_c {
            writeln!(text, "  ({:.6}, {:.6})  gap-unknown-low", r.c_c, r.c_l).unwrap();
        }
        writeln!(text, "  [{:.6}, {:.6}]  thm5-tight", r.c_l.max(r.c_c), r.c_u).unwrap();
        if r.c_coop > r.c_u {
            writeln!(text, "  ({:.6}, {:.6})  gap-unknown-high", r.c_u, r.c_coop).unwrap();
        }
    } else {
        writeln!(text, "  ({:.6}, {:.6})  gap-unknown (empty tight window)", r.c_c, r.c_coop)
            .unwrap();
    }
    writeln!(text, "  [{:.6}, inf)  full-coop-tight", r.c_coop).unwrap();
    emit(params.out.as_deref(), &text)
}

fn cmd_verify(params: &Params) -> Result<(), CliError> {
    let suites = match params.suite.as_deref() {
        None | Some("all") => Suite::ALL.to_vec(),
        Some(name) => vec![Suite::from_name(name).ok_or_else(|| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::Parse(format!("unknown suite `{name}`; known: all, {}", known.join(", ")))
        })?],
    };
    let seed = params.seed();
    let mut text = String::new();
    let mut failed = Vec::new();
    for suite in suites {
        let instances = params.trials.unwrap_or_else(|| suite.default_instances());
        let report = run_suite(suite, instances, seed);
        writeln!(
            text,
            "{:<17} {}  instances={} checks={} failures={} worst={:e}",
            suite.name(),
            if report.passed() { "PASS" } else { "FAIL" },
            report.instances,
            report.checks,
            report.failures.len(),
            report.worst
        )
        .unwrap();
        for f in report.failures.iter().take(20) {
            writeln!(text, "  seed={} index={}: {}", seed, f.index, f.detail).unwrap();
        }
        if !report.passed() {
            failed.push(suite.name());
        }
    }
    emit(params.out.as_deref(), &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}

fn load_channel(params: &Params) -> Result<channel::ChannelFile, CliError> {
    Ok(channel::read(params.channel_path()?)?)
}

fn cmd_simulate(params: &Params) -> Result<(), CliError> {
    let file = load_channel(params)?;
    let m = file.mac.relays();
    let pmf = match file.pmf {
        Some(p) => p,
        None => {
            let nx = file.mac.input_alphabet();
            SymmetricPmf::iid(m, &vec![1.0 / nx as f64; nx])?
        }
    };
    let rate = params
        .rate
        .ok_or_else(|| CliError::Parse("simulate needs --rate".into()))?;
    let rates = MartonRates::new(rate / m as f64, params.r_prime.unwrap_or(0.0))?;
    let trials = params.trials.unwrap_or(2000);
    let configs: Vec<SimConfig> = params
        .n
        .clone()
        .unwrap_or_else(|| vec![16])
        .into_iter()
        .map(|n| SimConfig {
            n,
            epsilon: params.epsilon.unwrap_or(1.5),
            rates: vec![rates; m],
            trials,
            seed: params.seed(),
            noise: true,
        })
        .collect();
    // surface every guard violation before any trial runs
    for cfg in &configs {
        run_trials(&file.mac, &pmf, &SimConfig { trials: 0, ..cfg.clone() })?;
    }
    let mut csv = format!(
        "n,{},{},trials,encode_fail_rate,error_rate\n",
        rate_col("rate"),
        rate_col("r_prime")
    );
    for cfg in &configs {
        let out = run_trials(&file.mac, &pmf, cfg)?;
        if out.trials == 0 {
            eprintln!("cran: n = {}: no trials run, rates undefined", cfg.n);
        }
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            cfg.n,
            num(rate),
            num(rates.r_prime),
            out.trials,
            num(out.encode_failure_rate().unwrap_or(f64::NAN)),
            num(out.error_rate().unwrap_or(f64::NAN))
        )
        .unwrap();
    }
    emit(params.out.as_deref(), &csv)
}

fn cmd_discrete(params: &Params, upper: bool) -> Result<(), CliError> {
    let file = load_channel(params)?;
    let grid = params.fronthaul_grid()?;
    let name = if upper { "ub" } else { "lb" };
    let mut csv = format!("{},{},status,pmf\n", rate_col("C"), rate_col(name));
    for c in grid {
        let result = if upper {
            thm2_upper(
                &file.mac,
                c,
                &AuxConfig {
                    seed: params.seed(),
                    ..AuxConfig::default()
                },
            )?
        } else {
            optimize_thm1(
                &file.mac,
                c,
                &SearchConfig {
                    seed: params.seed(),
                    ..SearchConfig::default()
                },
            )?
        };
        let pmf: Vec<String> = result.achieving_pmf.probs().iter().map(|&p| num(p)).collect();
        writeln!(
            csv,
            "{},{},{},{}",
            num(c),
            num(result.value),
            result.status.as_str(),
            pmf.join(" ")
        )
        .unwrap();
    }
    emit(params.out.as_deref(), &csv)
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use telewig_cli::{
    render, run, CliError, CommandKind, Format, GainMode, NoiseAxis, Range, RegionSel, RunConfig, SqueezeAxis,
    StateSel, Table,
};

/// Single-photon teleportation through Gaussian channels: origin Wigner values,
/// thresholds and oracle checks.
#[derive(Parser, Debug)]
#[command(name = "telewig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Origin value versus squeezing for unconditional (and optionally conditional) teleportation.
    Sweep(CommonArgs),
    /// Squeezing thresholds: a single report or table1 | table2 | fig6.
    Threshold(CommonArgs),
    /// Conditional teleportation with a pure resource: success probability and origin value.
    Conditional(CommonArgs),
    /// Noisy shared resource: point or square acceptance region.
    Noisy(CommonArgs),
    /// Cross-check closed forms against quadrature, Fock and Monte Carlo oracles.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// csv | json
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// fock1 | sqfock1:<t> | attenuated:<eta>
    #[arg(long, default_value = "fock1")]
    state: StateSel,
    /// Squeezed variance in dB: a:b:step or a single value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "r")]
    vsq_db: Option<Range>,
    /// Squeezing parameter r: a:b:step or a single value.
    #[arg(long)]
    r: Option<Range>,
    /// unity | optimal | G=<x> | ralph; repeatable.
    #[arg(long)]
    gain: Vec<GainMode>,
    /// disk:<K> | point | square:<a>
    #[arg(long)]
    region: Option<RegionSel>,
    /// Input efficiency: a single value, or a:b:step for fig6.
    #[arg(long)]
    eta: Option<Range>,
    /// Noise excess 10 log10(2N) in dB: a:b:step or a single value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "noise")]
    noise_db: Option<Range>,
    /// Noise excess N = 2 V_sq V_an: a:b:step or a single value.
    #[arg(long)]
    noise: Option<Range>,
    /// table1 | table2 | fig6
    #[arg(long)]
    table: Option<Table>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2010)]
    seed: u64,
    /// Monte Carlo samples per case.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    /// Absolute tolerance for quadrature comparisons.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Include the 4-D square-region quadrature.
    #[arg(long)]
    slow: bool,
    /// Offset added to the closed form under test; checks that the harness catches errors.
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    perturb: f64,
    #[command(flatten)]
    output: Output,
}

fn resolve(cli: Cli) -> (RunConfig, Option<PathBuf>) {
    match cli.command {
        Command::Verify(v) => {
            let mut cfg = RunConfig::defaults(CommandKind::Verify);
            cfg.seed = v.seed;
            cfg.samples = v.samples;
            cfg.tolerance = v.tolerance;
            cfg.slow = v.slow;
            cfg.perturb = v.perturb;
            cfg.format = v.output.format;
            (cfg, v.output.out)
        }
        Command::Sweep(a) => common(CommandKind::Sweep, a),
        Command::Threshold(a) => common(CommandKind::Threshold, a),
        Command::Conditional(a) => common(CommandKind::Conditional, a),
        Command::Noisy(a) => common(CommandKind::Noisy, a),
    }
}

fn common(kind: CommandKind, a: CommonArgs) -> (RunConfig, Option<PathBuf>) {
    let mut cfg = RunConfig::defaults(kind);
    cfg.state = a.state;
    if let Some(rg) = a.vsq_db {
        cfg.squeeze = SqueezeAxis::Db(rg);
    } else if let Some(rg) = a.r {
        cfg.squeeze = SqueezeAxis::R(rg);
    }
    if !a.gain.is_empty() {
        cfg.gains = a.gain;
    }
    if let Some(region) = a.region {
        cfg.region = region;
    }
    if let Some(eta) = a.eta {
        cfg.eta = eta;
    } else if let StateSel::Attenuated { eta } = cfg.state {
        cfg.eta = Range::single(eta);
    } else if a.table == Some(Table::Fig6) {
        cfg.eta = Range {
            start: 0.55,
            stop: 1.0,
            step: 0.05,
        };
    }
    if let Some(rg) = a.noise_db {
        cfg.noise = NoiseAxis::Db(rg);
    } else if let Some(rg) = a.noise {
        cfg.noise = NoiseAxis::N(rg);
    }
    cfg.table = a.table;
    cfg.format = a.output.format;
    (cfg, a.output.out)
}

fn execute(cfg: &RunConfig, out: Option<PathBuf>) -> Result<bool, CliError> {
    let table = run(cfg)?;
    let text = render(cfg, &table)?;
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(!table.failed)
}

fn main() -> ExitCode {
    let (cfg, out) = resolve(Cli::parse());
    match execute(&cfg, out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("telewig: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

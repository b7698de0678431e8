mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use qfisher_core::campaign::{self, Table2Options};
use qfisher_core::criteria::{ReportOptions, WitnessMode, DEFAULT_WITNESS_RESTARTS};
use qfisher_core::statezoo::{AngleSampler, GhzDiagonalMode};
use qfisher_core::Error;

use config::{Campaign, ConfigFile, Flags, Format, Settings};

#[derive(Debug, Parser)]
#[command(name = "qfisher", version, about = "Entanglement criteria from the quantum Fisher information")]
struct Cli {
    /// Campaign to run; may instead come from --config.
    #[arg(value_enum)]
    campaign: Option<Campaign>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Core(Error),
    Output(std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Invariant(_)) => 3,
            Failure::Input(_) | Failure::Core(_) => 2,
            Failure::Output(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "{msg}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfisher: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.flags.config {
        Some(path) => ConfigFile::load(path).map_err(Failure::Input)?,
        None => ConfigFile::default(),
    };
    let s = Settings::resolve(cli.campaign, cli.flags, file).map_err(Failure::Input)?;
    check_applicable(&s)?;
    let workers = s.workers;
    let text = campaign::with_workers(workers, || render(&s))??;
    match &s.out {
        Some(path) => std::fs::write(path, text).map_err(Failure::Output),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(Failure::Output),
    }
}

fn check_applicable(s: &Settings) -> Result<(), Failure> {
    let three_qubit = matches!(s.campaign, Campaign::Table2 | Campaign::Table3 | Campaign::BoundEntangledScan);
    if three_qubit && s.n.is_some_and(|n| n != 3) {
        return Err(Failure::Input(format!("{:?} campaigns are three-qubit only", s.campaign)));
    }
    if s.mode.is_some() && s.campaign != Campaign::Table3 {
        return Err(Failure::Input("--mode applies to table3 only".into()));
    }
    if s.sampler.is_some() && s.campaign != Campaign::Table2 {
        return Err(Failure::Input("--sampler applies to table2 only".into()));
    }
    Ok(())
}

fn state_spec(s: &Settings) -> String {
    s.state.clone().unwrap_or_else(|| format!("ghz:{}", s.n.unwrap_or(4)))
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    Ok(text)
}

fn render(s: &Settings) -> Result<String, Failure> {
    let restarts = s.restarts.unwrap_or(DEFAULT_WITNESS_RESTARTS);
    match s.campaign {
        Campaign::Table2 => {
            let sampler = match &s.sampler {
                Some(name) => name.parse::<AngleSampler>()?,
                None => Table2Options::default().sampler,
            };
            let opts = Table2Options {
                sampler,
                local_directions: s.local,
                witness_optimized: s.witness_optimized,
                witness_restarts: restarts,
            };
            let table = campaign::table2(s.samples, s.seed, &opts)?;
            detection_output(s, &table)
        }
        Campaign::Table3 => {
            let mode = s.mode.as_deref().unwrap_or("dme").parse::<GhzDiagonalMode>()?;
            let table = campaign::table3(s.samples, s.seed, mode, s.witness_optimized)?;
            detection_output(s, &table)
        }
        Campaign::BoundEntangledScan => {
            let table = campaign::bound_entangled_scan(s.samples, s.seed)?;
            detection_output(s, &table)
        }
        Campaign::BoundsCurve => {
            let mut rows = campaign::bounds_curve(s.n.unwrap_or(100))?;
            if let Some(k) = s.k {
                rows.retain(|r| r.k == k);
                if rows.is_empty() {
                    return Err(Failure::Input(format!("k = {k} is outside 1..=N")));
                }
            }
            match s.format_or(Format::Csv) {
                Format::Csv => Ok(campaign::bounds_curve_csv(&rows)),
                Format::Json => json(&rows),
            }
        }
        Campaign::SweepP => {
            let psi = campaign::pure_state(&state_spec(s))?;
            let mut rows = campaign::sweep_p(&psi, s.resolution)?;
            if let Some(k) = s.k {
                rows.retain(|r| r.k == k);
                if rows.is_empty() {
                    return Err(Failure::Input(format!("k = {k} is outside 1..N")));
                }
            }
            match s.format_or(Format::Csv) {
                Format::Csv => Ok(campaign::sweep_p_csv(&rows)),
                Format::Json => json(&rows),
            }
        }
        Campaign::Analyze => {
            let opts = ReportOptions {
                witness: if s.witness_optimized { WitnessMode::Optimized { restarts } } else { WitnessMode::Fixed },
                local_directions: true,
                seed: s.seed,
            };
            let report = campaign::analyze(&state_spec(s), &opts)?;
            match s.format_or(Format::Json) {
                Format::Json => json(&report),
                Format::Csv => Err(Failure::Input("analyze reports are JSON only".into())),
            }
        }
        Campaign::PhaseSim => {
            let (run, report) = campaign::phase_sim(&state_spec(s), s.m, s.trials, s.seed)?;
            match s.format_or(Format::Json) {
                Format::Json => json(&report),
                Format::Csv => Ok(run.to_csv()),
            }
        }
    }
}

fn detection_output(s: &Settings, table: &campaign::DetectionTable) -> Result<String, Failure> {
    if table.failures > 0 {
        eprintln!("qfisher: {} of {} samples exhausted the rejection budget", table.failures, table.samples);
    }
    match s.format_or(Format::Csv) {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => json(table),
    }
}

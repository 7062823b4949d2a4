//! `srlab` command-line front end.
//!
//! Each subcommand resolves its flags into a parameter record, computes its
//! data, and writes either CSV or a JSON report. With `--out`, a
//! `<out>.manifest.json` sidecar records the resolved flags so the run can be
//! replayed with [`RunManifest::to_args`].

pub mod commands;
pub mod output;
pub mod verify;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::meanfield::ModelParams;
pub use commands::{AxisRange, Quantity, SweepSpec};
pub use output::{JsonReport, RunManifest, Table, SCHEMA_VERSION};
pub use verify::{VerifyReport, VerifyRequest};

/// Environment variable capping sweep parallelism (0 or unset = automatic).
pub const THREADS_ENV: &str = "SRLAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "srlab",
    version,
    about = "Mean-field superradiance: coherence, intensity, speed limits and exact-oracle checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean-field population, coherence and intensity on a time grid.
    Timeseries(TimeseriesArgs),
    /// Coherence, intensity or QSL ratio over (ω(t − t_D), Nγ0/(2ω)).
    Sweep(SweepArgs),
    /// Quantum speed limit report for one evolution time.
    Qsl(QslArgs),
    /// Exact Dicke-ladder oracle compared against the mean-field burst.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent (no manifest is written then).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct TimeseriesArgs {
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub n_atoms: u64,
    #[arg(long, default_value_t = 2e-5)]
    pub gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Defaults to max(0, t_D − 5/ω).
    #[arg(long, allow_negative_numbers = true)]
    pub t_start: Option<f64>,
    /// Defaults to t_D + 5/ω.
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub n_atoms: u64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = Quantity::Coherence)]
    pub quantity: Quantity,
    /// Lower end of the x = ω(t − t_D) axis.
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub t_start: f64,
    /// Upper end of the x = ω(t − t_D) axis.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 1e2)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 81)]
    pub alpha_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QslArgs {
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub n_atoms: u64,
    #[arg(long, default_value_t = 2e-5)]
    pub gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated ensemble sizes, run in order.
    #[arg(long, default_value = "100", value_parser = parse_count_list)]
    pub n_atoms: CountList,
    #[arg(long, default_value_t = 1.0)]
    pub gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Defaults to 2 t_D + 10/(Nγ0) for each N.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Defaults to 0.02 / (γ0 max⟨J⁺J⁻⟩).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub local_decay: f64,
    #[arg(long, default_value_t = 0.0)]
    pub local_dephasing: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountList(pub Vec<u64>);

/// Accepts plain integers and integral floats such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got '{s}'")),
    }
}

fn parse_count_list(s: &str) -> std::result::Result<CountList, String> {
    let counts = s
        .split(',')
        .map(|part| parse_count(part.trim()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if counts.is_empty() {
        return Err("expected at least one ensemble size".into());
    }
    Ok(CountList(counts))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status. Failures print a JSON error record on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = Error::InvalidParameter(e.to_string().trim().to_string());
            report_error(&err);
            return err.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(err) => {
            report_error(&err);
            err.exit_code()
        }
    }
}

fn report_error(err: &Error) {
    let record = json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "exit_code": err.exit_code(),
        }
    });
    eprintln!("{record}");
}

fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "{THREADS_ENV} must be a non-negative integer, got '{v}'"
            ))
        }),
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Timeseries(a) => {
            let params = ModelParams::new(a.n_atoms, a.gamma0, a.omega)?;
            let td = params.t_delay();
            let t_start = a.t_start.unwrap_or((td - 5.0 / a.omega).max(0.0));
            let t_end = a.t_end.unwrap_or(td + 5.0 / a.omega);
            let grid = AxisRange::linear(t_start, t_end, a.points)?;
            let format = a.output.format.unwrap_or(Format::Csv);
            let mut p = BTreeMap::new();
            p.insert("n-atoms".into(), json!(a.n_atoms));
            p.insert("gamma0".into(), json!(a.gamma0));
            p.insert("omega".into(), json!(a.omega));
            p.insert("t-start".into(), json!(t_start));
            p.insert("t-end".into(), json!(t_end));
            p.insert("points".into(), json!(a.points));
            p.insert("format".into(), json!(format.name()));
            let rows = commands::timeseries(&params, &grid);
            let table = commands::timeseries_table(&rows);
            emit("timeseries", p, &a.output, format, &table, &rows)
        }
        Command::Sweep(a) => {
            let spec = SweepSpec {
                x_axis: AxisRange::linear(a.t_start, a.t_end, a.points)?,
                y_axis: AxisRange::log(a.alpha_min, a.alpha_max, a.alpha_points)?,
                n_atoms: a.n_atoms,
                omega: a.omega,
                quantity: a.quantity,
            };
            let format = a.output.format.unwrap_or(Format::Csv);
            let mut p = BTreeMap::new();
            p.insert("n-atoms".into(), json!(a.n_atoms));
            p.insert("omega".into(), json!(a.omega));
            p.insert("quantity".into(), json!(a.quantity.name()));
            p.insert("t-start".into(), json!(a.t_start));
            p.insert("t-end".into(), json!(a.t_end));
            p.insert("points".into(), json!(a.points));
            p.insert("alpha-min".into(), json!(a.alpha_min));
            p.insert("alpha-max".into(), json!(a.alpha_max));
            p.insert("alpha-points".into(), json!(a.alpha_points));
            p.insert("format".into(), json!(format.name()));
            let rows = commands::sweep(&spec, threads_from_env()?)?;
            let table = commands::sweep_table(&rows);
            emit("sweep", p, &a.output, format, &table, &rows)
        }
        Command::Qsl(a) => {
            let params = ModelParams::new(a.n_atoms, a.gamma0, a.omega)?;
            let format = a.output.format.unwrap_or(Format::Json);
            let mut p = BTreeMap::new();
            p.insert("n-atoms".into(), json!(a.n_atoms));
            p.insert("gamma0".into(), json!(a.gamma0));
            p.insert("omega".into(), json!(a.omega));
            p.insert("tau".into(), json!(a.tau));
            p.insert("format".into(), json!(format.name()));
            let summary = commands::qsl_summary(&params, a.tau)?;
            let table = commands::qsl_table(&summary);
            emit("qsl", p, &a.output, format, &table, &summary)
        }
        Command::Verify(a) => {
            let request = VerifyRequest {
                n_atoms: a.n_atoms.0.clone(),
                gamma0: a.gamma0,
                omega: a.omega,
                t_end: a.t_end,
                step: a.step,
                local_decay: a.local_decay,
                local_dephasing: a.local_dephasing,
            };
            for &n in &request.n_atoms {
                request.config_for(n)?.validate()?;
            }
            let format = a.output.format.unwrap_or(Format::Json);
            let list: Vec<String> = request.n_atoms.iter().map(u64::to_string).collect();
            let mut p = BTreeMap::new();
            p.insert("n-atoms".into(), json!(list.join(",")));
            p.insert("gamma0".into(), json!(a.gamma0));
            p.insert("omega".into(), json!(a.omega));
            if let Some(t) = a.t_end {
                p.insert("t-end".into(), json!(t));
            }
            if let Some(s) = a.step {
                p.insert("step".into(), json!(s));
            }
            p.insert("local-decay".into(), json!(a.local_decay));
            p.insert("local-dephasing".into(), json!(a.local_dephasing));
            p.insert("format".into(), json!(format.name()));
            let report = verify::verify(&request)?;
            let table = verify::verify_table(&report);
            emit("verify", p, &a.output, format, &table, &report)
        }
    }
}

fn emit<T: Serialize>(
    command: &str,
    parameters: BTreeMap<String, Value>,
    output: &OutputArgs,
    format: Format,
    table: &Table,
    data: &T,
) -> Result<()> {
    let manifest = RunManifest::new(command, parameters);
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => table.write_csv(&mut sink)?,
        Format::Json => {
            let report = JsonReport {
                schema_version: SCHEMA_VERSION,
                manifest: manifest.clone(),
                data,
            };
            serde_json::to_writer_pretty(&mut sink, &report)?;
            sink.write_all(b"\n")?;
        }
    }
    sink.flush()?;
    if let Some(path) = &output.out {
        manifest.write_beside(path)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_scientific_integers() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert_eq!(parse_count_list("20, 50,100").unwrap().0, vec![20, 50, 100]);
        assert!(parse_count_list("20,x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn bad_flags_map_to_validation_status() {
        assert_eq!(run(["srlab", "sweep", "--points", "1"]), 2);
        assert_eq!(run(["srlab", "qsl", "--tau", "-1"]), 2);
        assert_eq!(run(["srlab", "nonsense"]), 2);
        assert_eq!(run(["srlab", "verify", "--n-atoms", "600"]), 2);
        assert_eq!(
            run(["srlab", "verify", "--n-atoms", "10", "--step", "0.5"]),
            2
        );
    }
}

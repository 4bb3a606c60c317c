//! Command-line front end for the secret-sharing simulator.
//!
//! Subcommands:
//! - `run`: one protocol configuration, analytic and (optionally) Monte
//!   Carlo figures as a JSON or text report.
//! - `sweep`: a (p, α) grid as CSV or JSON rows, with `fig1`/`fig2`
//!   presets for the bits-vs-parameters surfaces.
//! - `channels`: the noise-channel catalogue with Kraus operators and
//!   structure classification.
//! - `pure`: the deterministic noiseless protocol, branch by branch.
//!
//! Exit codes: 0 on success, 2 on usage errors, 3 on I/O errors.

mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qss_core::channels::{classify_channel_structure, standard_channel, ChannelKind};
use qss_core::protocol::{enumerate_pure_branches, run_campaign, ProtocolConfig, ProtocolReport};
use qss_core::states::Encoding;

use output::{fmt_f64, write_output};
use sweep::{parse_range, rows_to_csv, rows_to_json, Range, SweepSpec};

/// Errors surfaced to the shell: usage problems exit 2, I/O problems 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

#[derive(Parser)]
#[command(
    name = "qss",
    about = "Simulator for three-party secret sharing over noisy qubit channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// 21 p-values × 19 α-values: the bits surface over both parameters.
    Fig1,
    /// 11 p-values at the Hadamard basis α = 1/√2: bits against noise.
    Fig2,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration: analytic figures plus an optional
    /// seeded Monte Carlo campaign.
    Run {
        /// Channel parameter in [0, 1].
        #[arg(long)]
        p: f64,
        /// Charlie's basis parameter in (0, 1).
        #[arg(long)]
        alpha: f64,
        /// Catalogue channel for the noisy passes.
        #[arg(long, default_value = "phase_damping")]
        channel: ChannelKind,
        /// Monte Carlo trials; 0 emits the analytic report only.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Base RNG seed; required whenever --trials > 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate a (p, α) grid, ordered by (p, alpha).
    Sweep {
        /// p grid as start,stop,steps over [0, 1].
        #[arg(long, default_value = "0,1,21")]
        p_range: String,
        /// α grid as start,stop,steps over the open interval (0, 1).
        #[arg(long, default_value = "0.05,0.95,19")]
        alpha_range: String,
        /// Named grid preset; overrides the ranges.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, default_value = "phase_damping")]
        channel: ChannelKind,
        /// Monte Carlo trials per grid point; 0 keeps the sweep analytic.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Base RNG seed; grid point k uses seed + k. Required when
        /// --trials > 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Write the table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the channel catalogue, or inspect one channel.
    Channels {
        /// Channel name (all channels when omitted).
        name: Option<String>,
        /// Parameter at which the Kraus operators are shown.
        #[arg(long, default_value_t = 0.5)]
        parameter: f64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Run the noiseless protocol and show its deterministic decoding.
    Pure {
        /// Two-bit secret (00, 01, 10 or 11); all four when omitted.
        secret: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            p,
            alpha,
            channel,
            trials,
            seed,
            format,
            output,
        } => cmd_run(p, alpha, channel, trials, seed, format, output.as_deref()),
        Command::Sweep {
            p_range,
            alpha_range,
            preset,
            channel,
            trials,
            seed,
            format,
            output,
        } => cmd_sweep(
            &p_range,
            &alpha_range,
            preset,
            channel,
            trials,
            seed,
            format,
            output.as_deref(),
        ),
        Command::Channels {
            name,
            parameter,
            format,
        } => cmd_channels(name.as_deref(), parameter, format),
        Command::Pure { secret } => cmd_pure(secret.as_deref()),
    }
}

fn check_flag_range(flag: &str, value: f64, lo: f64, hi: f64, open: bool) -> Result<(), CliError> {
    let ok = if open {
        value > lo && value < hi
    } else {
        (lo..=hi).contains(&value)
    };
    if ok {
        Ok(())
    } else {
        let bracket = if open {
            format!("({lo}, {hi})")
        } else {
            format!("[{lo}, {hi}]")
        };
        Err(CliError::Usage(format!(
            "{flag} must lie in {bracket}, got {value}"
        )))
    }
}

fn require_seed(trials: u64, seed: Option<u64>) -> Result<u64, CliError> {
    match (trials, seed) {
        (0, _) => Ok(seed.unwrap_or(0)),
        (_, Some(seed)) => Ok(seed),
        (_, None) => Err(CliError::Usage(
            "--seed is required when --trials > 0".to_string(),
        )),
    }
}

fn cmd_run(
    p: f64,
    alpha: f64,
    channel: ChannelKind,
    trials: u64,
    seed: Option<u64>,
    format: ReportFormat,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    check_flag_range("--p", p, 0.0, 1.0, false)?;
    check_flag_range("--alpha", alpha, 0.0, 1.0, true)?;
    let seed = require_seed(trials, seed)?;

    let report = if trials == 0 {
        ProtocolReport::analytic(p, alpha)
            .map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?
    } else {
        let config = ProtocolConfig::new(p, alpha, channel, trials, seed)
            .map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?;
        run_campaign(&config).map_err(|e| CliError::Usage(format!("campaign failed: {e}")))?
    };

    let content = match format {
        ReportFormat::Json => {
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            json
        }
        ReportFormat::Text => render_report_text(p, alpha, channel, trials, &report),
    };
    write_output(output, &content)
}

fn render_report_text(
    p: f64,
    alpha: f64,
    channel: ChannelKind,
    trials: u64,
    report: &ProtocolReport,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("p               {}\n", fmt_f64(p)));
    out.push_str(&format!("alpha           {}\n", fmt_f64(alpha)));
    out.push_str(&format!("channel         {}\n", channel.name()));
    out.push_str(&format!(
        "error_rate      {}\n",
        fmt_f64(report.analytic_error_rate)
    ));
    out.push_str(&format!(
        "success         {}\n",
        fmt_f64(report.analytic_success)
    ));
    out.push_str(&format!(
        "bits            {}\n",
        fmt_f64(report.analytic_bits)
    ));
    if let (Some(empirical), Some(stderr)) = (report.empirical_success, report.stderr) {
        out.push_str(&format!("trials          {trials}\n"));
        out.push_str(&format!(
            "empirical       {} ± {}\n",
            fmt_f64(empirical),
            fmt_f64(stderr)
        ));
    }
    if let Some(freqs) = report.charlie_outcome_frequencies {
        out.push_str(&format!(
            "charlie +/-     {} / {}\n",
            fmt_f64(freqs[0]),
            fmt_f64(freqs[1])
        ));
    }
    if let Some(confusion) = report.confusion_matrix {
        out.push_str("confusion (true × decoded, order 00 01 10 11):\n");
        for (i, row) in confusion.iter().enumerate() {
            let label = Encoding::from_index(i).expect("four encodings").bit_str();
            out.push_str(&format!(
                "  {label}  {:>8} {:>8} {:>8} {:>8}\n",
                row[0], row[1], row[2], row[3]
            ));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    p_range: &str,
    alpha_range: &str,
    preset: Option<Preset>,
    channel: ChannelKind,
    trials: u64,
    seed: Option<u64>,
    format: TableFormat,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let seed = require_seed(trials, seed)?;

    let (p_values, alpha_values) = match preset {
        Some(Preset::Fig1) => (
            Range {
                start: 0.0,
                stop: 1.0,
                steps: 21,
            }
            .values(),
            Range {
                start: 0.05,
                stop: 0.95,
                steps: 19,
            }
            .values(),
        ),
        Some(Preset::Fig2) => (
            Range {
                start: 0.0,
                stop: 1.0,
                steps: 11,
            }
            .values(),
            vec![std::f64::consts::FRAC_1_SQRT_2],
        ),
        None => {
            let p = parse_range("--p-range", p_range)?;
            check_flag_range("--p-range start", p.start, 0.0, 1.0, false)?;
            check_flag_range("--p-range stop", p.stop, 0.0, 1.0, false)?;
            let alpha = parse_range("--alpha-range", alpha_range)?;
            check_flag_range("--alpha-range start", alpha.start, 0.0, 1.0, true)?;
            check_flag_range("--alpha-range stop", alpha.stop, 0.0, 1.0, true)?;
            (p.values(), alpha.values())
        }
    };

    let spec = SweepSpec {
        p_values,
        alpha_values,
        channel,
        trials,
        seed,
    };
    let rows = spec.rows()?;
    let content = match format {
        TableFormat::Csv => rows_to_csv(&rows),
        TableFormat::Json => rows_to_json(&rows),
    };
    write_output(output, &content)
}

#[derive(serde::Serialize)]
struct ChannelListing {
    name: &'static str,
    parameter: f64,
    operators: Vec<Vec<Vec<[f64; 2]>>>,
    cptp_deviation: f64,
    all_kraus_diagonal: bool,
    ghz_form_preserved: bool,
    coherence_factor: f64,
}

fn channel_listing(kind: ChannelKind, parameter: f64) -> Result<ChannelListing, CliError> {
    let ch = standard_channel(kind, parameter)
        .map_err(|e| CliError::Usage(format!("cannot build {kind}: {e}")))?;
    let structure = classify_channel_structure(&ch)
        .map_err(|e| CliError::Usage(format!("cannot classify {kind}: {e}")))?;
    Ok(ChannelListing {
        name: ch.name(),
        parameter: ch.parameter(),
        operators: ch.record().operators,
        cptp_deviation: ch.completeness_deviation(),
        all_kraus_diagonal: structure.all_kraus_diagonal,
        ghz_form_preserved: structure.ghz_form_preserved,
        coherence_factor: structure.coherence_factor,
    })
}

fn render_channel_text(listing: &ChannelListing) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} (parameter {})\n",
        listing.name,
        fmt_f64(listing.parameter)
    ));
    for (i, op) in listing.operators.iter().enumerate() {
        out.push_str(&format!("  E{i} = "));
        for (r, row) in op.iter().enumerate() {
            if r > 0 {
                out.push_str("       ");
            }
            let cells: Vec<String> = row
                .iter()
                .map(|[re, im]| {
                    if im.abs() < 1e-15 {
                        format!("{re:>9.6}")
                    } else {
                        format!("{re:>9.6}{im:+.6}i")
                    }
                })
                .collect();
            out.push_str(&format!("[{}]\n", cells.join("  ")));
        }
    }
    out.push_str(&format!(
        "  cptp deviation     {:.3e}\n",
        listing.cptp_deviation
    ));
    out.push_str(&format!(
        "  kraus diagonal     {}\n",
        listing.all_kraus_diagonal
    ));
    out.push_str(&format!(
        "  ghz form preserved {}\n",
        listing.ghz_form_preserved
    ));
    out.push_str(&format!(
        "  coherence factor   {}\n",
        fmt_f64(listing.coherence_factor)
    ));
    out
}

fn cmd_channels(name: Option<&str>, parameter: f64, format: ReportFormat) -> Result<(), CliError> {
    check_flag_range("--parameter", parameter, 0.0, 1.0, false)?;
    let kinds: Vec<ChannelKind> = match name {
        Some(name) => vec![name
            .parse()
            .map_err(|e: qss_core::Error| CliError::Usage(e.to_string()))?],
        None => ChannelKind::ALL.to_vec(),
    };
    let listings = kinds
        .into_iter()
        .map(|kind| channel_listing(kind, parameter))
        .collect::<Result<Vec<_>, _>>()?;

    let content = match format {
        ReportFormat::Json => {
            let mut json = serde_json::to_string_pretty(&listings).expect("listings serialize");
            json.push('\n');
            json
        }
        ReportFormat::Text => listings
            .iter()
            .map(render_channel_text)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    write_output(None, &content)
}

fn cmd_pure(secret: Option<&str>) -> Result<(), CliError> {
    let secrets: Vec<Encoding> = match secret {
        Some(raw) => vec![Encoding::from_bit_str(raw).ok_or_else(|| {
            CliError::Usage(format!("secret must be one of 00, 01, 10, 11, got '{raw}'"))
        })?],
        None => Encoding::ALL.to_vec(),
    };

    let mut correct = 0;
    let total = secrets.len();
    let mut out = String::new();
    for secret in secrets {
        let branches = enumerate_pure_branches(secret)
            .map_err(|e| CliError::Usage(format!("protocol failed: {e}")))?;
        out.push_str(&format!(
            "secret {} ({})\n",
            secret.bit_str(),
            secret.label()
        ));
        let mut all_match = true;
        for branch in &branches {
            out.push_str(&format!(
                "  charlie {}  ->  bell {:<4}  ->  decoded {} ({})\n",
                branch.charlie.label(),
                branch.bell.label(),
                branch.decoded.bit_str(),
                branch.decoded.label()
            ));
            all_match &= branch.decoded == secret;
        }
        if all_match {
            correct += 1;
        }
    }
    out.push_str(&format!("{correct}/{total} decoded correctly\n"));
    write_output(None, &out)
}

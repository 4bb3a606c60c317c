//! Parameter-sweep grids and their CSV/JSON serialization.

use serde::Serialize;

use qss_core::channels::ChannelKind;
use qss_core::protocol::{analytic_error_rate, analytic_success, run_campaign, ProtocolConfig};

use crate::output::fmt_f64;
use crate::CliError;

/// An inclusive linear range with a fixed number of steps.
#[derive(Debug, Clone, Copy)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let width = self.stop - self.start;
        (0..self.steps)
            .map(|k| self.start + width * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Parses "start,stop,steps" for the given flag; user ranges need at least
/// two steps.
pub fn parse_range(flag: &str, raw: &str) -> Result<Range, CliError> {
    let parts: Vec<&str> = raw.split(',').collect();
    let usage = || {
        CliError::Usage(format!(
            "{flag} expects start,stop,steps (e.g. 0,1,21), got '{raw}'"
        ))
    };
    if parts.len() != 3 {
        return Err(usage());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| usage())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| usage())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| usage())?;
    if steps < 2 {
        return Err(CliError::Usage(format!("{flag} needs at least 2 steps")));
    }
    if stop < start {
        return Err(CliError::Usage(format!("{flag} range must be ascending")));
    }
    Ok(Range { start, stop, steps })
}

/// A fully resolved sweep: the grid values plus channel, trial and output
/// settings.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub p_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub channel: ChannelKind,
    pub trials: u64,
    pub seed: u64,
}

/// One output row of a sweep, ordered by (p, alpha).
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub alpha: f64,
    pub error_rate: f64,
    pub success: f64,
    pub bits: f64,
    pub empirical_success: Option<f64>,
    pub stderr: Option<f64>,
}

pub const CSV_HEADER: &str = "p,alpha,error_rate,success,bits,empirical_success,stderr";

impl SweepSpec {
    /// Computes every grid row. With trials > 0 each point runs a seeded
    /// campaign; point k uses the stream family seed + k so the whole sweep
    /// is reproducible from the base seed.
    pub fn rows(&self) -> Result<Vec<SweepRow>, CliError> {
        let mut rows = Vec::with_capacity(self.p_values.len() * self.alpha_values.len());
        let mut point_index = 0u64;
        for &p in &self.p_values {
            for &alpha in &self.alpha_values {
                let map_err =
                    |e: qss_core::Error| CliError::Usage(format!("invalid sweep point: {e}"));
                let error_rate = analytic_error_rate(p, alpha).map_err(map_err)?;
                let success = analytic_success(p, alpha).map_err(map_err)?;
                let bits = 1.0 + success;

                let (empirical_success, stderr) = if self.trials > 0 {
                    let config = ProtocolConfig::new(
                        p,
                        alpha,
                        self.channel,
                        self.trials,
                        self.seed.wrapping_add(point_index),
                    )
                    .map_err(map_err)?;
                    let report = run_campaign(&config)
                        .map_err(|e| CliError::Usage(format!("campaign failed: {e}")))?;
                    (report.empirical_success, report.stderr)
                } else {
                    (None, None)
                };

                rows.push(SweepRow {
                    p,
                    alpha,
                    error_rate,
                    success,
                    bits,
                    empirical_success,
                    stderr,
                });
                point_index += 1;
            }
        }
        Ok(rows)
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let empirical = row.empirical_success.map(fmt_f64).unwrap_or_default();
        let stderr = row.stderr.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(row.p),
            fmt_f64(row.alpha),
            fmt_f64(row.error_rate),
            fmt_f64(row.success),
            fmt_f64(row.bits),
            empirical,
            stderr,
        ));
    }
    out
}

pub fn rows_to_json(rows: &[SweepRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
    out.push('\n');
    out
}

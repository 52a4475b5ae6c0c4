//! Alpha sweeps written as CSV.

use std::io::Write;
use std::path::PathBuf;

use entcopy::cloner::{optimal_params, EntanglementClass};
use entcopy::measures::MeasureReport;
use rayon::prelude::*;

use crate::format::sig;
use crate::{CliError, Result};

pub const HEADER: &str =
    "alpha,f_max,a6,a16,a11,c_in,c12,c13,i_in,i12,i13,i_pair,negativity,f1_prime";
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
    pub tolerance: f64,
    /// Written to `out`, or standard output when `None`.
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alpha_min: 0.0,
            alpha_max: std::f64::consts::FRAC_1_SQRT_2,
            steps: 101,
            tolerance: 1e-10,
            out: None,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for a in [self.alpha_min, self.alpha_max] {
            crate::parse_class(a)?;
        }
        if self.alpha_min >= self.alpha_max {
            return Err(CliError::Usage(format!(
                "alpha-min ({}) must be below alpha-max ({})",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.steps < 2 {
            return Err(CliError::Usage(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    /// Inclusive uniform grid; the last point is exactly `alpha_max`.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.alpha_max
                } else {
                    self.alpha_min + (self.alpha_max - self.alpha_min) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub alpha: f64,
    pub f_max: f64,
    pub a6: f64,
    pub a16: f64,
    pub a11: f64,
    pub c_in: f64,
    pub c12: f64,
    pub c13: f64,
    pub i_in: f64,
    pub i12: f64,
    pub i13: f64,
    pub i_pair: f64,
    pub negativity: f64,
    pub f1_prime: f64,
}

impl SweepRecord {
    pub fn compute(class: EntanglementClass) -> Result<Self> {
        let m = MeasureReport::for_class(class)?;
        let p = optimal_params(class);
        Ok(Self {
            alpha: m.alpha,
            f_max: m.f_max,
            a6: p.re(6),
            a16: p.re(16),
            a11: p.re(11),
            c_in: m.c_in,
            c12: m.c12,
            c13: m.c13,
            i_in: m.i_in,
            i12: m.i12,
            i13: m.i13,
            i_pair: m.i_pair,
            negativity: m.negativity,
            f1_prime: m.f1_prime,
        })
    }

    pub fn fields(&self) -> [f64; 14] {
        [
            self.alpha,
            self.f_max,
            self.a6,
            self.a16,
            self.a11,
            self.c_in,
            self.c12,
            self.c13,
            self.i_in,
            self.i12,
            self.i13,
            self.i_pair,
            self.negativity,
            self.f1_prime,
        ]
    }

    pub fn csv_row(&self) -> String {
        self.fields()
            .iter()
            .map(|&x| sig(x, SIGNIFICANT_DIGITS))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl SweepRecord {
    /// Names of fields that are not finite or leave the fidelity band
    /// `[0.4, 0.5]` by more than `tolerance`.
    pub fn violations(&self, tolerance: f64) -> Vec<&'static str> {
        let names: Vec<&'static str> = HEADER.split(',').collect();
        let mut bad: Vec<&'static str> = names
            .iter()
            .zip(self.fields())
            .filter(|(_, x)| !x.is_finite())
            .map(|(n, _)| *n)
            .collect();
        if !(0.4 - tolerance..=0.5 + tolerance).contains(&self.f_max) {
            bad.push("f_max");
        }
        bad
    }
}

/// Rows in grid order; points are evaluated in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    config
        .grid()
        .into_par_iter()
        .map(|a| SweepRecord::compute(crate::parse_class(a)?))
        .collect()
}

pub fn write_csv(mut w: impl Write, records: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    w.flush()
}

/// Runs the sweep and writes it to the configured destination.
pub fn cmd_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let records = run_sweep(config)?;
    match &config.out {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            let file = std::fs::File::create(path).map_err(io_err)?;
            write_csv(std::io::BufWriter::new(file), &records).map_err(io_err)?;
        }
        None => {
            write_csv(std::io::stdout().lock(), &records).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    Ok(records)
}

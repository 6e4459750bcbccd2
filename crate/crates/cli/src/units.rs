//! Flag parsing shared by the subcommands: microsecond time flags, exact
//! rationals and the radio model.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use ndlab::rational::{parse_rational, to_f64, Rational};
use ndlab::{RadioModel, Semantics, Ticks, TimeBase};

use crate::error::{CliError, CliResult};

pub fn rational(flag: &str, text: &str) -> CliResult<Rational> {
    parse_rational(text).map_err(|_| CliError::usage(format!("--{flag}: not a number: {text:?}")))
}

/// Converts a microsecond value to whole ticks, rejecting values that do
/// not land on the tick grid.
pub fn us_to_ticks(flag: &str, text: &str, time_base: TimeBase) -> CliResult<Ticks> {
    let us = rational(flag, text)?;
    if us < Rational::from_integer(0) {
        return Err(CliError::usage(format!("--{flag}: must not be negative")));
    }
    let ticks = us * Rational::from_integer(1000) / Rational::from_integer(time_base.tick_ns() as i128);
    if !ticks.is_integer() {
        return Err(CliError::usage(format!(
            "--{flag}: {text} us is not a whole number of {} ns ticks",
            time_base.tick_ns()
        )));
    }
    u64::try_from(ticks.to_integer()).map_err(|_| CliError::usage(format!("--{flag}: {text} us is too large")))
}

pub fn ticks_to_us(ticks: f64, time_base: TimeBase) -> f64 {
    ticks * time_base.tick_ns() as f64 / 1000.0
}

pub fn rational_us(r: Rational, time_base: TimeBase) -> f64 {
    ticks_to_us(to_f64(r), time_base)
}

#[derive(Debug, Clone, Args)]
pub struct RadioArgs {
    /// Tick length in nanoseconds.
    #[arg(long, default_value_t = 1000)]
    pub tick_ns: u64,
    /// Beacon transmission time in microseconds.
    #[arg(long, default_value = "32")]
    pub omega_us: String,
    /// Ratio of transmit to receive power, e.g. `1` or `3/2`.
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long = "doTx-us", default_value = "0")]
    pub d_o_tx_us: String,
    #[arg(long = "doRx-us", default_value = "0")]
    pub d_o_rx_us: String,
    #[arg(long = "doTxRx-us", default_value = "0")]
    pub d_o_tx_rx_us: String,
    #[arg(long = "doRxTx-us", default_value = "0")]
    pub d_o_rx_tx_us: String,
    /// Beacons must lie entirely inside a reception window.
    #[arg(long)]
    pub contained: bool,
}

impl RadioArgs {
    pub fn time_base(&self) -> CliResult<TimeBase> {
        TimeBase::from_nanos(self.tick_ns).map_err(|e| CliError::usage(format!("--tick-ns: {e}")))
    }

    pub fn radio(&self) -> CliResult<RadioModel> {
        let tb = self.time_base()?;
        let omega = us_to_ticks("omega-us", &self.omega_us, tb)?;
        let alpha = rational("alpha", &self.alpha)?;
        let radio = RadioModel::ideal(omega)
            .with_alpha(alpha)
            .with_switching(us_to_ticks("doTx-us", &self.d_o_tx_us, tb)?, us_to_ticks("doRx-us", &self.d_o_rx_us, tb)?)
            .with_turnarounds(
                us_to_ticks("doTxRx-us", &self.d_o_tx_rx_us, tb)?,
                us_to_ticks("doRxTx-us", &self.d_o_rx_tx_us, tb)?,
            )
            .with_semantics(if self.contained { Semantics::Contained } else { Semantics::Ideal });
        radio.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(radio)
    }
}

/// Output target: a file when `path` is given, stdout otherwise.
pub fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn read_to_string(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

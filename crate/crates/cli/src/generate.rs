use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use ndlab::format::protocol_to_json;
use ndlab::protocols::{
    gen_diffcode, gen_disco, gen_optimal_unidirectional, gen_pi0m_with_delta, gen_searchlight_striped, gen_uconnect,
    DifferenceSet,
};
use ndlab::ProtocolSpec;

use crate::error::CliResult;
use crate::units::{output, rational, us_to_ticks, RadioArgs};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: Kind,
}

#[derive(Debug, Subcommand)]
pub enum Kind {
    /// Single-window schedule with `k` evenly spaced beacons that reaches
    /// the unidirectional bound.
    Optimal {
        /// Inverse reception duty cycle, gamma = 1/k.
        #[arg(long)]
        k: u64,
        /// Transmission duty cycle.
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        common: Common,
    },
    /// One beacon and one window of length d per cycle, windows every
    /// (M+1)·d − delta.
    Pi0m {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d_us: String,
        /// Shortening of the reception period; one tick if omitted.
        #[arg(long)]
        delta_us: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    Disco {
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        p2: u64,
        #[arg(long)]
        slot_us: String,
        #[command(flatten)]
        common: Common,
    },
    /// Striped Searchlight.
    Searchlight {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        slot_us: String,
        #[command(flatten)]
        common: Common,
    },
    Uconnect {
        /// Odd prime.
        #[arg(long)]
        p: u64,
        #[arg(long)]
        slot_us: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cyclic difference set schedule.
    Diffcode {
        #[arg(long)]
        modulus: u64,
        /// Comma-separated residues; a built-in set is used if omitted.
        #[arg(long, value_delimiter = ',')]
        elements: Option<Vec<u64>>,
        #[arg(long)]
        slot_us: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub radio: RadioArgs,
    /// Write the protocol JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn build(kind: &Kind) -> CliResult<(ProtocolSpec, &Common)> {
    let slot = |c: &Common, text: &str| -> CliResult<u64> { us_to_ticks("slot-us", text, c.radio.time_base()?) };
    let (spec, common) = match kind {
        Kind::Optimal { k, beta, common } => {
            (gen_optimal_unidirectional(*k, rational("beta", beta)?, &common.radio.radio()?)?, common)
        }
        Kind::Pi0m { m, d_us, delta_us, common } => {
            let tb = common.radio.time_base()?;
            let d = us_to_ticks("d-us", d_us, tb)?;
            let delta = match delta_us {
                Some(text) => us_to_ticks("delta-us", text, tb)?,
                None => 1,
            };
            (gen_pi0m_with_delta(*m, d, delta, &common.radio.radio()?)?, common)
        }
        Kind::Disco { p1, p2, slot_us, common } => {
            (gen_disco(*p1, *p2, slot(common, slot_us)?, &common.radio.radio()?)?.spec, common)
        }
        Kind::Searchlight { t, slot_us, common } => {
            (gen_searchlight_striped(*t, slot(common, slot_us)?, &common.radio.radio()?)?.spec, common)
        }
        Kind::Uconnect { p, slot_us, common } => {
            (gen_uconnect(*p, slot(common, slot_us)?, &common.radio.radio()?)?.spec, common)
        }
        Kind::Diffcode { modulus, elements, slot_us, common } => {
            let ds = match elements {
                Some(el) => DifferenceSet::new(*modulus, el)?,
                None => DifferenceSet::builtin(*modulus)?,
            };
            (gen_diffcode(&ds, slot(common, slot_us)?, &common.radio.radio()?)?.spec, common)
        }
    };
    let tb = common.radio.time_base()?;
    Ok((spec.with_time_base(tb), common))
}

pub fn run(args: &GenerateArgs) -> CliResult<()> {
    let (spec, common) = build(&args.kind)?;
    let mut out = output(common.out.as_deref())?;
    writeln!(out, "{}", protocol_to_json(&spec))?;
    out.flush()?;
    Ok(())
}

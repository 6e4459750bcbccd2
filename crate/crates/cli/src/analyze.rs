use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ndlab::bounds::bound_coverage;
use ndlab::coverage::{worst_case_latency, worst_case_latency_endpoints, worst_case_latency_on_grid};
use ndlab::format::protocol_from_json;
use ndlab::rational::{int, to_f64};
use ndlab::{analyze, CoverageMap, Latency, OracleConfig, ProtocolSpec, Semantics, Ticks};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::units::{output, read_to_string, ticks_to_us, us_to_ticks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Every phase and in-range instant, tick by tick.
    Full,
    /// Only phases where a beacon crosses a window edge.
    Endpoints,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Transmitting device E.
    pub protocol_e: PathBuf,
    /// Receiving device F.
    pub protocol_f: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Endpoints)]
    pub method: Method,
    /// Restrict phases to multiples of this many microseconds (full sweep).
    #[arg(long)]
    pub grid_step_us: Option<String>,
    /// Largest hyper-period the oracle may sweep, in ticks.
    #[arg(long, default_value_t = 1 << 32)]
    pub max_hyperperiod: u128,
    /// Also write the per-beacon coverage intervals as CSV.
    #[arg(long)]
    pub coverage_csv: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct OracleJson {
    method: Method,
    bounded: bool,
    latency_ticks: Option<Ticks>,
    latency_us: Option<f64>,
    phase: Ticks,
    in_range: Ticks,
    hyperperiod: Ticks,
}

#[derive(Serialize)]
struct BoundJson {
    /// `⌈T_C / Σd⌉ · ω/β` with E's beacon duty cycle and F's effective windows.
    latency_ticks: f64,
    latency_us: f64,
    exact: String,
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    tick_ns: u64,
    deterministic: bool,
    redundant: bool,
    uncovered: Vec<(Ticks, Ticks)>,
    coverage_lambda: Ticks,
    min_beacons: u64,
    oracle: OracleJson,
    bound: Option<BoundJson>,
    /// Oracle latency minus the bound, in ticks.
    gap_ticks: Option<f64>,
}

fn load(path: &PathBuf) -> CliResult<ProtocolSpec> {
    protocol_from_json(&read_to_string(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn run(args: &AnalyzeArgs) -> CliResult<()> {
    let e = load(&args.protocol_e)?;
    let f = load(&args.protocol_f)?;
    let tb = e.time_base;
    if f.time_base != tb {
        return Err(CliError::usage(format!(
            "tick lengths differ: {} ns vs {} ns",
            tb.tick_ns(),
            f.time_base.tick_ns()
        )));
    }
    let map = CoverageMap::for_protocols(&e, &f)?;
    let report = analyze(&map);
    if let Some(path) = &args.coverage_csv {
        map.write_csv(output(Some(path))?)?;
    }

    let cfg = OracleConfig { max_hyperperiod: args.max_hyperperiod, ..OracleConfig::default() };
    let oracle = match (args.method, &args.grid_step_us) {
        (Method::Full, None) => worst_case_latency(&e, &f, &cfg)?,
        (Method::Full, Some(step)) => {
            let step = us_to_ticks("grid-step-us", step, tb)?;
            if step == 0 {
                return Err(CliError::usage("--grid-step-us must be positive"));
            }
            worst_case_latency_on_grid(&e, &f, step, &cfg)?
        }
        (Method::Endpoints, None) => worst_case_latency_endpoints(&e, &f, &cfg)?,
        (Method::Endpoints, Some(_)) => return Err(CliError::usage("--grid-step-us needs --method full")),
    };
    let latency = oracle.latency.ticks();

    let omega = e.beacons.omega();
    let listen: Ticks = f
        .receptions
        .windows()
        .iter()
        .map(|w| match f.radio.semantics {
            Semantics::Ideal => w.duration,
            Semantics::Contained => w.duration.saturating_sub(omega),
        })
        .sum();
    let bound = bound_coverage(f.receptions.period(), listen, e.beacons.duty_cycle(), omega).ok();

    let out = Report {
        schema: "ndlab.analyze/1",
        tick_ns: tb.tick_ns(),
        deterministic: report.deterministic,
        redundant: report.redundant,
        uncovered: report.uncovered.spans().to_vec(),
        coverage_lambda: report.coverage_lambda,
        min_beacons: report.min_beacons,
        oracle: OracleJson {
            method: args.method,
            bounded: oracle.latency != Latency::Unbounded,
            latency_ticks: latency,
            latency_us: latency.map(|l| ticks_to_us(l as f64, tb)),
            phase: oracle.phase,
            in_range: oracle.in_range,
            hyperperiod: oracle.hyperperiod,
        },
        bound: bound.map(|b| BoundJson {
            latency_ticks: to_f64(b),
            latency_us: ticks_to_us(to_f64(b), tb),
            exact: b.to_string(),
        }),
        gap_ticks: latency.zip(bound).map(|(l, b)| to_f64(int(l as i128) - b)),
    };
    let mut w = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &out).map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

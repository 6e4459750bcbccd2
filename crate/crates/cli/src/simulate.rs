use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use ndlab::bounds::collision_probability;
use ndlab::format::{protocol_from_json, ProtocolJson};
use ndlab::rational::to_f64;
use ndlab::simulator::{simulate_multi, OffsetSampling, SimConfig, SimOutcome};
use ndlab::{Exec, Latency, ProtocolSpec, TimeBase};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::units::{output, read_to_string, ticks_to_us, us_to_ticks};

pub const CONFIG_SCHEMA: &str = "ndlab.simulate/1";

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation config (JSON).
    pub config: PathBuf,
    /// Directory for trials.csv, summary.json and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the config's trial count.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
}

/// A device is either a path to a protocol file (relative to the config)
/// or an inline protocol document.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DeviceJson {
    Path { path: PathBuf },
    Inline(Box<ProtocolJson>),
}

/// Microsecond values may be given as JSON integers or as decimal strings.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Micros {
    Int(u64),
    Text(String),
}

impl Micros {
    fn ticks(&self, field: &str, tb: TimeBase) -> CliResult<u64> {
        match self {
            Micros::Int(v) => us_to_ticks(field, &v.to_string(), tb),
            Micros::Text(s) => us_to_ticks(field, s, tb),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigJson {
    schema: String,
    devices: Vec<DeviceJson>,
    #[serde(default = "one")]
    trials: u64,
    #[serde(default)]
    seed: u64,
    horizon_us: Micros,
    #[serde(default)]
    deadline_us: Option<Micros>,
    #[serde(default)]
    offset_sampling: OffsetSampling,
}

fn one() -> u64 {
    1
}

#[derive(Serialize)]
struct Summary {
    schema: &'static str,
    tick_ns: u64,
    seed: u64,
    trials: u64,
    senders: u64,
    offset_sampling: OffsetSampling,
    failures: u64,
    failure_rate: f64,
    failure_rate_ci95: (f64, f64),
    first_collisions: u64,
    first_collision_rate: f64,
    first_collision_rate_ci95: (f64, f64),
    /// Pure-ALOHA prediction for the joiner's first beacon.
    aloha_collision_probability: Option<f64>,
    aloha_z_score: Option<f64>,
    conditional_collision_rate: Option<f64>,
    worst_latency_ticks: Option<u64>,
    worst_latency_us: Option<f64>,
}

#[derive(Serialize)]
struct Manifest {
    schema: &'static str,
    subcommand: &'static str,
    config: String,
    out_dir: String,
    seed: u64,
    trials: u64,
    tick_ns: u64,
}

fn load_devices(cfg: &ConfigJson, base: &Path) -> CliResult<Vec<ProtocolSpec>> {
    cfg.devices
        .iter()
        .enumerate()
        .map(|(i, d)| match d {
            DeviceJson::Path { path } => {
                let full = base.join(path);
                protocol_from_json(&read_to_string(&full)?)
                    .map_err(|e| CliError::usage(format!("device {i} ({}): {e}", full.display())))
            }
            DeviceJson::Inline(j) => {
                ProtocolSpec::try_from((**j).clone()).map_err(|e| CliError::usage(format!("device {i}: {e}")))
            }
        })
        .collect()
}

fn summarize(out: &SimOutcome, cfg: &SimConfig, tb: TimeBase) -> Summary {
    let joiner = &cfg.devices[1];
    let beta = to_f64(joiner.beacons.duty_cycle());
    let aloha = collision_probability(out.senders, beta).ok();
    let n = out.trials.len() as f64;
    let z = aloha.and_then(|p| {
        let sigma = (p * (1.0 - p) / n).sqrt();
        (sigma > 0.0).then(|| (out.first_collision_rate - p) / sigma)
    });
    let worst = match out.worst_latency() {
        Latency::Bounded(t) => Some(t),
        Latency::Unbounded => None,
    };
    Summary {
        schema: "ndlab.simulate-summary/1",
        tick_ns: tb.tick_ns(),
        seed: cfg.seed,
        trials: out.trials.len() as u64,
        senders: out.senders,
        offset_sampling: cfg.offset_sampling,
        failures: out.failures,
        failure_rate: out.failure_rate,
        failure_rate_ci95: out.confidence_interval(out.failure_rate),
        first_collisions: out.first_collisions,
        first_collision_rate: out.first_collision_rate,
        first_collision_rate_ci95: out.confidence_interval(out.first_collision_rate),
        aloha_collision_probability: aloha,
        aloha_z_score: z,
        conditional_collision_rate: out.conditional_collision_rate,
        worst_latency_ticks: worst,
        worst_latency_us: worst.map(|t| ticks_to_us(t as f64, tb)),
    }
}

fn write_trials(path: &Path, out: &SimOutcome) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(output(Some(path))?);
    w.write_record([
        "trial_id",
        "phases",
        "latency_ticks",
        "collided_first",
        "collided_second",
        "covering_collided",
        "failed",
    ])?;
    for t in &out.trials {
        let phases: Vec<String> = t.phases.iter().map(u64::to_string).collect();
        w.write_record([
            t.trial_id.to_string(),
            phases.join(";"),
            t.latency.map_or_else(|| "FAILED".to_string(), |l| l.to_string()),
            t.collided_first.to_string(),
            t.collided_second.to_string(),
            t.covering_collided.to_string(),
            t.failed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = output(Some(path))?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let text = read_to_string(&args.config)?;
    let cfg: ConfigJson =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.config.display())))?;
    if cfg.schema != CONFIG_SCHEMA {
        return Err(CliError::usage(format!("unsupported config schema {:?}, expected {CONFIG_SCHEMA:?}", cfg.schema)));
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    let devices = load_devices(&cfg, base)?;
    let tb = devices.first().map(|d| d.time_base).ok_or_else(|| CliError::usage("config lists no devices"))?;
    if let Some(d) = devices.iter().find(|d| d.time_base != tb) {
        return Err(CliError::usage(format!(
            "devices use different tick lengths ({} ns and {} ns)",
            tb.tick_ns(),
            d.time_base.tick_ns()
        )));
    }
    let sim = SimConfig {
        horizon: cfg.horizon_us.ticks("horizon_us", tb)?,
        deadline: cfg.deadline_us.as_ref().map(|d| d.ticks("deadline_us", tb)).transpose()?,
        devices,
        trials: args.trials.unwrap_or(cfg.trials),
        seed: args.seed.unwrap_or(cfg.seed),
        offset_sampling: cfg.offset_sampling,
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
    };

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let out = simulate_multi(&sim).map_err(|e| match e {
        ndlab::NdError::HorizonOverflow(_) => CliError::from(e),
        e => CliError::usage(e.to_string()),
    })?;
    write_trials(&args.out_dir.join("trials.csv"), &out)?;
    write_json(&args.out_dir.join("summary.json"), &summarize(&out, &sim, tb))?;
    write_json(
        &args.out_dir.join("manifest.json"),
        &Manifest {
            schema: "ndlab.manifest/1",
            subcommand: "simulate",
            config: args.config.display().to_string(),
            out_dir: args.out_dir.display().to_string(),
            seed: sim.seed,
            trials: out.trials.len() as u64,
            tick_ns: tb.tick_ns(),
        },
    )?;
    Ok(())
}

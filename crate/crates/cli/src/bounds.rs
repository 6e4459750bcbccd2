use std::path::PathBuf;

use clap::Args;
use ndlab::bounds::{
    bound_channel_constrained, bound_mutual_exclusive, bound_relaxed, bound_slotted_full_duplex,
    bound_slotted_two_beacon, bound_symmetric, bound_symmetric_approx, bound_unidirectional, pi0m_relaxed_latency,
    slotted_protocol_latency, Branch, Relaxations, SlottedProtocol,
};
use ndlab::rational::{int, ratio, to_f64, Rational};
use ndlab::{RadioModel, TimeBase};

use crate::error::{CliError, CliResult};
use crate::units::{output, rational, rational_us, RadioArgs};

const MAX_POINTS: i128 = 10_000_000;

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Grid to sweep, `VAR=LO:HI:STEP` or `VAR=VALUE` with VAR one of
    /// eta, beta, gamma. The deviation table accepts a beta grid.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Fixed reception duty cycle for a beta sweep.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Fixed transmission duty cycle for a gamma sweep, or the channel
    /// utilization of the slotted-protocol columns in an eta sweep.
    #[arg(long)]
    pub beta: Option<String>,
    /// Channel-utilization cap; adds the constrained symmetric bound.
    #[arg(long)]
    pub beta_m: Option<String>,
    /// Ideal versus relaxed unidirectional bound over beta and gamma = 1/k.
    #[arg(long)]
    pub deviation: bool,
    /// Range of k for the deviation table, `LO:HI`.
    #[arg(long, default_value = "19:1818")]
    pub k_range: String,
    #[command(flatten)]
    pub radio: RadioArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Eta,
    Beta,
    Gamma,
}

struct Sweep {
    var: Var,
    points: Vec<Rational>,
}

fn parse_sweep(text: &str) -> CliResult<Sweep> {
    let bad = |why: &str| CliError::usage(format!("--sweep {text:?}: {why}"));
    let (name, grid) = text.split_once('=').ok_or_else(|| bad("expected VAR=LO:HI:STEP"))?;
    let var = match name.trim() {
        "eta" => Var::Eta,
        "beta" => Var::Beta,
        "gamma" => Var::Gamma,
        other => return Err(bad(&format!("unknown variable {other:?}"))),
    };
    let parts: Vec<&str> = grid.split(':').collect();
    let points = match parts.as_slice() {
        [v] => vec![rational("sweep", v)?],
        [lo, hi, step] => {
            let (lo, hi, step) = (rational("sweep", lo)?, rational("sweep", hi)?, rational("sweep", step)?);
            if step <= int(0) {
                return Err(bad("step must be positive"));
            }
            if lo > hi {
                return Err(bad("LO exceeds HI"));
            }
            let n = ((hi - lo) / step).floor().to_integer();
            if n >= MAX_POINTS {
                return Err(bad("grid has too many points"));
            }
            (0..=n).map(|i| lo + step * int(i)).collect()
        }
        _ => return Err(bad("expected VAR=LO:HI:STEP or VAR=VALUE")),
    };
    if points.iter().any(|&p| p <= int(0)) {
        return Err(bad("values must be positive"));
    }
    if var != Var::Eta && points.iter().any(|&p| p > int(1)) {
        return Err(bad("duty cycles must not exceed 1"));
    }
    Ok(Sweep { var, points })
}

fn parse_k_range(text: &str) -> CliResult<(i128, i128)> {
    let bad = || CliError::usage(format!("--k-range {text:?}: expected LO:HI with 1 <= LO <= HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: i128 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i128 = hi.trim().parse().map_err(|_| bad())?;
    if lo < 1 || lo > hi || hi - lo >= MAX_POINTS {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Empty cell for grid points outside a bound's domain.
fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn us(r: ndlab::Result<Rational>, tb: TimeBase) -> String {
    cell(r.ok().map(|r| rational_us(r, tb)))
}

pub fn run(args: &BoundsArgs) -> CliResult<()> {
    let radio = args.radio.radio()?;
    let tb = args.radio.time_base()?;
    let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    if args.deviation {
        let betas = match sweep {
            Some(Sweep { var: Var::Beta, points }) => points,
            Some(_) => return Err(CliError::usage("--deviation only sweeps beta")),
            None => {
                // 0.055 % steps up to 5.5 %, plus 5.55 %
                let mut b: Vec<Rational> = (1..=100).map(|j| ratio(55 * j, 100_000)).collect();
                b.push(ratio(555, 10_000));
                b
            }
        };
        deviation(&mut w, &betas, parse_k_range(&args.k_range)?, &radio, tb)?;
    } else {
        let sweep = sweep.ok_or_else(|| CliError::usage("one of --sweep or --deviation is required"))?;
        match sweep.var {
            Var::Eta => eta_sweep(&mut w, args, &sweep.points, &radio, tb)?,
            Var::Beta => {
                let gamma = args.gamma.as_deref().ok_or_else(|| CliError::usage("--sweep beta=... needs --gamma"))?;
                let gamma = rational("gamma", gamma)?;
                let rows: Vec<_> = sweep.points.iter().map(|&b| (b, gamma)).collect();
                unidirectional(&mut w, &rows, &radio, tb)?;
            }
            Var::Gamma => {
                let beta = args.beta.as_deref().ok_or_else(|| CliError::usage("--sweep gamma=... needs --beta"))?;
                let beta = rational("beta", beta)?;
                let rows: Vec<_> = sweep.points.iter().map(|&g| (beta, g)).collect();
                unidirectional(&mut w, &rows, &radio, tb)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn eta_sweep<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    args: &BoundsArgs,
    etas: &[Rational],
    radio: &RadioModel,
    tb: TimeBase,
) -> CliResult<()> {
    let (omega, alpha) = (radio.omega, radio.alpha);
    let beta_m = args.beta_m.as_deref().map(|b| rational("beta-m", b)).transpose()?;
    let beta = args.beta.as_deref().map(|b| rational("beta", b)).transpose()?;
    let mut header = vec![
        "eta",
        "symmetric_us",
        "branch",
        "k",
        "symmetric_approx_us",
        "mutual_exclusive_us",
        "pi0m_relaxed_us",
        "slotted_full_duplex_us",
        "slotted_two_beacon_us",
    ];
    if beta_m.is_some() {
        header.extend(["channel_constrained_us", "channel_unconstrained"]);
    }
    if beta.is_some() {
        header.extend(["slotted_channel_us", "diffcodes_us", "disco_us", "searchlight_s_us", "uconnect_us"]);
    }
    w.write_record(&header)?;
    for &eta in etas {
        let sym = bound_symmetric(eta, omega, alpha).ok();
        let mut row = vec![
            to_f64(eta).to_string(),
            cell(sym.map(|s| rational_us(s.latency, tb))),
            sym.map(|s| match s.branch {
                Branch::A => "A",
                Branch::B => "B",
            })
            .unwrap_or_default()
            .to_string(),
            sym.map(|s| s.k.to_string()).unwrap_or_default(),
            us(bound_symmetric_approx(eta, omega, alpha), tb),
            us(bound_mutual_exclusive(eta, omega, alpha), tb),
            us(pi0m_relaxed_latency(eta, omega, alpha), tb),
            us(bound_slotted_full_duplex(eta, omega, alpha), tb),
            us(bound_slotted_two_beacon(eta, omega, alpha), tb),
        ];
        if let Some(bm) = beta_m {
            let ch = bound_channel_constrained(eta, bm, omega, alpha).ok();
            row.push(cell(ch.map(|c| rational_us(c.latency, tb))));
            row.push(ch.map(|c| c.unconstrained.to_string()).unwrap_or_default());
        }
        if let Some(b) = beta {
            row.push(us(ndlab::bounds::bound_slotted_channel(eta, b, omega, alpha), tb));
            for p in SlottedProtocol::ALL {
                let l = slotted_protocol_latency(p, eta, b, omega, alpha).ok();
                row.push(cell(l.map(|t| crate::units::ticks_to_us(t, tb))));
            }
        }
        w.write_record(&row)?;
    }
    Ok(())
}

fn unidirectional<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    rows: &[(Rational, Rational)],
    radio: &RadioModel,
    tb: TimeBase,
) -> CliResult<()> {
    w.write_record(["beta", "gamma", "unidirectional_us", "relaxed_us"])?;
    for &(beta, gamma) in rows {
        w.write_record([
            to_f64(beta).to_string(),
            to_f64(gamma).to_string(),
            us(bound_unidirectional(gamma, beta, radio.omega), tb),
            us(bound_relaxed(gamma, beta, radio, Relaxations::ALL), tb),
        ])?;
    }
    Ok(())
}

fn deviation<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    betas: &[Rational],
    (k_lo, k_hi): (i128, i128),
    radio: &RadioModel,
    tb: TimeBase,
) -> CliResult<()> {
    w.write_record(["beta", "gamma", "ideal_us", "relaxed_us", "deviation_pct"])?;
    for &beta in betas {
        for k in k_lo..=k_hi {
            let gamma = ratio(1, k);
            let li = bound_unidirectional(gamma, beta, radio.omega)?;
            let lr = bound_relaxed(gamma, beta, radio, Relaxations::ALL)?;
            w.write_record([
                to_f64(beta).to_string(),
                to_f64(gamma).to_string(),
                rational_us(li, tb).to_string(),
                rational_us(lr, tb).to_string(),
                (to_f64((lr - li) / li) * 100.0).to_string(),
            ])?;
        }
    }
    Ok(())
}

//! Event-driven replay of beacon and window schedules with a pure-ALOHA
//! collision model and radio self-blocking.
//!
//! Each device is placed by an origin: absolute time at which its local
//! schedule time 0 occurs. Periodic schedules extend to negative times, so a
//! device may already be mid-cycle when the devices come into range.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{effective_windows, Latency};
use crate::error::{NdError, Result};
use crate::exec::{map_collect, Exec};
use crate::interval::IntervalSet;
use crate::rational::{int, lcm_u64, ratio, Rational};
use crate::schedule::{BeaconSchedule, ProtocolSpec, Semantics, Ticks};

/// Cursor over the emissions of a placed beacon schedule.
struct Emissions<'a> {
    b: &'a BeaconSchedule,
    origin: i64,
    n: i64,
}

impl<'a> Emissions<'a> {
    /// Positioned at the first emission strictly after `t`.
    fn after(b: &'a BeaconSchedule, origin: i64, t: i64) -> Self {
        let mut cur = Emissions { b, origin, n: 0 };
        if let Some(p) = b.period() {
            let m = b.len() as i64;
            cur.n = ((t - origin).div_euclid(p as i64) - 1) * m;
        }
        while cur.peek().is_some_and(|x| x <= t) {
            cur.n += 1;
        }
        cur
    }

    fn peek(&self) -> Option<i64> {
        let m = self.b.len() as i64;
        if m == 0 {
            return None;
        }
        match self.b.period() {
            Some(p) => {
                let (cycle, idx) = (self.n.div_euclid(m), self.n.rem_euclid(m));
                Some(self.origin + self.b.times()[idx as usize] as i64 + cycle * p as i64)
            }
            None => usize::try_from(self.n).ok().and_then(|i| self.b.times().get(i)).map(|&t| self.origin + t as i64),
        }
    }

    fn advance(&mut self) {
        self.n += 1;
    }
}

struct Placed<'a> {
    spec: &'a ProtocolSpec,
    origin: i64,
}

impl Placed<'_> {
    fn omega(&self) -> Ticks {
        self.spec.beacons.omega()
    }

    fn transmits_during(&self, start: i64, len: Ticks) -> bool {
        let lo = start - self.omega() as i64 + 1;
        !self.spec.beacons.emissions_in(self.origin, lo, start + len as i64).is_empty()
    }

    /// Own transmissions (including turnarounds) keep the receiver off at `t`.
    fn self_blocked(&self, t: i64) -> bool {
        if self.spec.beacons.is_silent() {
            return false;
        }
        let r = &self.spec.radio;
        let lo = t - (r.omega + r.d_o_tx_rx) as i64 + 1;
        let hi = t + r.d_o_rx_tx as i64 + 1;
        !self.spec.beacons.emissions_in(self.origin, lo, hi).is_empty()
    }

    /// A beacon of length `omega_tx` starting at `t` meets a window under
    /// this device's reception semantics.
    fn in_window(&self, t: i64, omega_tx: Ticks) -> bool {
        let c = &self.spec.receptions;
        let p = c.period() as i64;
        let local = t - self.origin;
        let local = if c.is_repetitive() {
            local.rem_euclid(p)
        } else if (0..p).contains(&local) {
            local
        } else {
            return false;
        };
        let local = local as Ticks;
        c.windows().iter().any(|w| {
            let d = match self.spec.radio.semantics {
                Semantics::Ideal => w.duration,
                Semantics::Contained => w.duration.saturating_sub(omega_tx),
            };
            w.start <= local && local < w.start + d
        })
    }

    fn receives(&self, t: i64, omega_tx: Ticks) -> bool {
        self.in_window(t, omega_tx) && !self.self_blocked(t)
    }
}

/// Relative placement of two devices: `F`'s schedule origin lies `shift`
/// ticks after `E`'s, and they come into range at `in_range`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairPhase {
    pub shift: Ticks,
    pub in_range: Ticks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairOutcome {
    /// Ticks from the in-range instant until `F` receives a beacon of `E`.
    pub e_to_f: Option<Ticks>,
    pub f_to_e: Option<Ticks>,
}

/// Replays both devices from the in-range instant until each has received
/// the other or `horizon` ticks have passed. Overlapping transmissions of
/// the two devices destroy each other.
pub fn simulate_pair(e: &ProtocolSpec, f: &ProtocolSpec, phase: PairPhase, horizon: Ticks) -> PairOutcome {
    let t0 = phase.in_range as i64;
    let end = t0.saturating_add(horizon as i64);
    let dev = [Placed { spec: e, origin: 0 }, Placed { spec: f, origin: phase.shift as i64 }];
    let mut cursors = [Emissions::after(&e.beacons, 0, t0), Emissions::after(&f.beacons, phase.shift as i64, t0)];
    let mut heap = BinaryHeap::new();
    for (i, c) in cursors.iter().enumerate() {
        if let Some(t) = c.peek() {
            heap.push(Reverse((t, i)));
        }
    }
    let mut found: [Option<Ticks>; 2] = [None, None];
    while let Some(Reverse((t, i))) = heap.pop() {
        if t > end {
            break;
        }
        let (tx, rx) = (&dev[i], &dev[1 - i]);
        if found[i].is_none() && rx.receives(t, tx.omega()) && !rx.transmits_during(t, tx.omega()) {
            found[i] = Some((t - t0) as Ticks);
            if found.iter().all(Option::is_some) {
                break;
            }
        }
        cursors[i].advance();
        if let Some(next) = cursors[i].peek() {
            heap.push(Reverse((next, i)));
        }
    }
    PairOutcome { e_to_f: found[0], f_to_e: found[1] }
}

/// Worst `E → F` latency of [`simulate_pair`] over every shift in
/// `[0, T_C(F))` and every in-range instant in `[0, T_B(E))`.
pub fn pair_worst_case_exhaustive(e: &ProtocolSpec, f: &ProtocolSpec, horizon: Ticks, exec: Exec) -> Result<Latency> {
    let tb = e
        .beacons
        .period()
        .ok_or_else(|| NdError::InvalidSchedule("exhaustive replay needs a periodic beacon schedule".into()))?;
    let tc = f.receptions.period();
    let per_shift = map_collect(exec, tc, |shift| {
        (0..tb)
            .map(|t0| {
                let o = simulate_pair(e, f, PairPhase { shift, in_range: t0 }, horizon);
                o.e_to_f.map_or(Latency::Unbounded, Latency::Bounded)
            })
            .max()
            .unwrap_or(Latency::Bounded(0))
    });
    Ok(per_shift.into_iter().max().unwrap_or(Latency::Bounded(0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetSampling {
    #[default]
    UniformRandom,
    /// Receiver shift and joiner in-range offset enumerated tick by tick;
    /// background devices stay at origin 0. `trials` is ignored.
    ExhaustiveTicks,
}

/// `devices[0]` is the receiver, `devices[1]` the joining sender and the
/// rest are background senders, so there are `S = devices.len() − 1`
/// senders.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub devices: Vec<ProtocolSpec>,
    pub trials: u64,
    pub seed: u64,
    pub horizon: Ticks,
    /// A trial fails unless discovery happens within this many ticks
    /// (defaults to `horizon`).
    pub deadline: Option<Ticks>,
    pub offset_sampling: OffsetSampling,
    pub exec: Exec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub trial_id: u64,
    /// Origin shift of each device, `phases[i]` ticks before the in-range
    /// instant (uniform mode) or the enumerated shifts (exhaustive mode).
    pub phases: Vec<Ticks>,
    pub latency: Option<Ticks>,
    pub collided_first: bool,
    /// Second beacon of the joiner collided as well.
    pub collided_second: bool,
    /// The first joiner beacon that lands in a receiver window collided.
    pub covering_collided: bool,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutcome {
    pub trials: Vec<TrialOutcome>,
    pub senders: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub first_collisions: u64,
    pub first_collision_rate: f64,
    /// `P(second beacon collides | first collided)`, if any first beacon collided.
    pub conditional_collision_rate: Option<f64>,
}

impl SimOutcome {
    /// Normal-approximation 95 % interval of a rate over all trials.
    pub fn confidence_interval(&self, rate: f64) -> (f64, f64) {
        let n = self.trials.len().max(1) as f64;
        let half = 1.96 * (rate * (1.0 - rate) / n).sqrt();
        ((rate - half).max(0.0), (rate + half).min(1.0))
    }

    /// Worst discovery latency over all trials; unbounded if any failed.
    pub fn worst_latency(&self) -> Latency {
        self.trials
            .iter()
            .map(|t| t.latency.map_or(Latency::Unbounded, Latency::Bounded))
            .max()
            .unwrap_or(Latency::Bounded(0))
    }
}

fn own_hyperperiod(p: &ProtocolSpec) -> Ticks {
    match p.beacons.period() {
        Some(tb) => lcm_u64(tb, p.receptions.period()).unwrap_or(Ticks::MAX),
        None => p.receptions.period(),
    }
}

fn validate(cfg: &SimConfig) -> Result<()> {
    if cfg.devices.len() < 2 {
        return Err(NdError::Domain("simulation needs a receiver and at least one sender".into()));
    }
    if cfg.trials == 0 && cfg.offset_sampling == OffsetSampling::UniformRandom {
        return Err(NdError::Domain("trials must be at least 1".into()));
    }
    if cfg.devices[1].beacons.is_silent() {
        return Err(NdError::Domain("the joining device (index 1) never transmits".into()));
    }
    let max_h = cfg.devices.iter().map(own_hyperperiod).max().unwrap_or(0);
    if cfg.horizon == 0 || cfg.horizon < max_h {
        return Err(NdError::Domain(format!(
            "horizon {} is shorter than the largest hyper-period {max_h}",
            cfg.horizon
        )));
    }
    if cfg.horizon > i64::MAX as u64 / 4 {
        return Err(NdError::HorizonOverflow("simulation horizon".into()));
    }
    Ok(())
}

fn run_trial(cfg: &SimConfig, trial_id: u64, origins: &[i64], phases: Vec<Ticks>) -> TrialOutcome {
    let placed: Vec<Placed> = cfg.devices.iter().zip(origins).map(|(spec, &origin)| Placed { spec, origin }).collect();
    let (rx, joiner) = (&placed[0], &placed[1]);
    let omega = joiner.omega();
    let collides = |t: i64| placed.iter().enumerate().any(|(i, d)| i != 1 && d.transmits_during(t, omega));
    let deadline = cfg.deadline.unwrap_or(cfg.horizon) as i64;
    let end = cfg.horizon as i64;
    let mut cur = Emissions::after(&joiner.spec.beacons, joiner.origin, 0);
    let mut out = TrialOutcome {
        trial_id,
        phases,
        latency: None,
        collided_first: false,
        collided_second: false,
        covering_collided: false,
        failed: true,
    };
    let mut index = 0;
    let mut covering_seen = false;
    while let Some(t) = cur.peek() {
        if t > end {
            break;
        }
        let collided = collides(t);
        match index {
            0 => out.collided_first = collided,
            1 => out.collided_second = collided,
            _ => {}
        }
        let lands = rx.in_window(t, omega);
        if lands && !covering_seen {
            covering_seen = true;
            out.covering_collided = collided;
        }
        if lands && !collided && !rx.self_blocked(t) {
            out.latency = Some(t as Ticks);
            out.failed = t > deadline;
            break;
        }
        index += 1;
        cur.advance();
    }
    out
}

/// Runs all trials. Each trial draws device phases from its own
/// `ChaCha8` stream, so results do not depend on scheduling.
pub fn simulate_multi(cfg: &SimConfig) -> Result<SimOutcome> {
    validate(cfg)?;
    let n_dev = cfg.devices.len();
    let trials: Vec<TrialOutcome> = match cfg.offset_sampling {
        OffsetSampling::UniformRandom => {
            let periods: Vec<Ticks> = cfg.devices.iter().map(own_hyperperiod).collect();
            map_collect(cfg.exec, cfg.trials, |id| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(id);
                let phases: Vec<Ticks> = periods.iter().map(|&p| rng.random_range(0..p)).collect();
                let origins: Vec<i64> = phases.iter().map(|&p| -(p as i64)).collect();
                run_trial(cfg, id, &origins, phases)
            })
        }
        OffsetSampling::ExhaustiveTicks => {
            let tc = cfg.devices[0].receptions.period();
            let tb = cfg.devices[1]
                .beacons
                .period()
                .ok_or_else(|| NdError::InvalidSchedule("exhaustive sampling needs a periodic joiner".into()))?;
            let total = tc.checked_mul(tb).ok_or_else(|| NdError::HorizonOverflow("T_C * T_B trials".into()))?;
            map_collect(cfg.exec, total, |id| {
                let (shift, t0) = (id / tb, id % tb);
                let mut origins = vec![0i64; n_dev];
                origins[0] = shift as i64;
                origins[1] = -(t0 as i64);
                let mut phases = vec![0; n_dev];
                phases[0] = shift;
                phases[1] = t0;
                run_trial(cfg, id, &origins, phases)
            })
        }
    };
    let n = trials.len() as f64;
    let failures = trials.iter().filter(|t| t.failed).count() as u64;
    let first = trials.iter().filter(|t| t.collided_first).count() as u64;
    let both = trials.iter().filter(|t| t.collided_first && t.collided_second).count() as u64;
    Ok(SimOutcome {
        senders: (n_dev - 1) as u64,
        failures,
        failure_rate: failures as f64 / n,
        first_collisions: first,
        first_collision_rate: first as f64 / n,
        conditional_collision_rate: (first > 0).then(|| both as f64 / first as f64),
        trials,
    })
}

/// Analytic probability that a received beacon is lost to the receiver's
/// own transmissions: `β/ω · (d_oTxRx + d_oRxTx + ω)`.
pub fn self_blocking_probability(p: &ProtocolSpec) -> Rational {
    if p.beacons.is_silent() {
        return int(0);
    }
    let r = &p.radio;
    let beta = p.beacons.duty_cycle();
    beta / int(r.omega as i128) * int((r.d_o_tx_rx + r.d_o_rx_tx + r.omega) as i128)
}

/// Fraction of reception-window ticks during which the device's own
/// beacons block reception, measured by replaying one hyper-period tick by
/// tick with the simulator's blocking rule.
pub fn measured_blocked_fraction(p: &ProtocolSpec) -> Result<Rational> {
    let h = own_hyperperiod(p);
    if h > 1 << 32 {
        return Err(NdError::HyperperiodTooLarge { hyperperiod: h as u128, budget: 1 << 32 });
    }
    let dev = Placed { spec: p, origin: 0 };
    let windows = effective_windows(&p.receptions, Semantics::Ideal, 0);
    let tc = p.receptions.period();
    let (mut open, mut blocked) = (0u64, 0u64);
    for t in 0..h {
        if windows.contains(t % tc) {
            open += 1;
            if dev.self_blocked(t as i64) {
                blocked += 1;
            }
        }
    }
    Ok(ratio(blocked as i128, open as i128))
}

/// The same fraction computed by interval algebra over one hyper-period.
pub fn blocked_fraction_by_intervals(p: &ProtocolSpec) -> Result<Rational> {
    let h = own_hyperperiod(p);
    let tc = p.receptions.period();
    let windows = IntervalSet::from_spans(
        (0..h / tc).flat_map(|n| p.receptions.windows().iter().map(move |w| (n * tc + w.start, n * tc + w.end()))),
    );
    let r = &p.radio;
    let span = r.omega + r.d_o_tx_rx + r.d_o_rx_tx;
    let mut blocked = IntervalSet::new();
    for s in p.beacons.emissions_in(0, 0, h as i64) {
        blocked = blocked.union(&IntervalSet::wrapped(s - r.d_o_rx_tx as i64, span, h));
    }
    Ok(ratio(windows.intersection(&blocked).measure() as i128, windows.measure() as i128))
}

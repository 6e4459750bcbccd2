//! Brute-force worst-case latency for one-way discovery of a transmitter
//! `E` by a receiver `F`.
//!
//! The relative phase `φ` places `F`'s reception period origin at absolute
//! time `φ` while `E`'s beacon schedule starts at 0. For an in-range instant
//! `t0`, the latency is `τ − t0` for the first emission `τ > t0` that starts
//! inside an effective reception window. A beacon starting exactly at `t0`
//! is already in flight and does not count.

use serde::Serialize;

use super::effective_windows;
use crate::error::{NdError, Result};
use crate::exec::{map_collect, Exec};
use crate::interval::IntervalSet;
use crate::rational::lcm_u64;
use crate::schedule::{ProtocolSpec, Ticks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Latency {
    Bounded(Ticks),
    /// Some phase never leads to a reception.
    Unbounded,
}

impl Latency {
    pub fn ticks(self) -> Option<Ticks> {
        match self {
            Latency::Bounded(t) => Some(t),
            Latency::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest admissible `lcm(T_B, T_C)`.
    pub max_hyperperiod: u128,
    pub exec: Exec,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_hyperperiod: 1 << 32, exec: Exec::default() }
    }
}

impl OracleConfig {
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub latency: Latency,
    /// Phase `φ` attaining the maximum (smallest such phase for the full
    /// sweep).
    pub phase: Ticks,
    /// In-range instant attaining the maximum at that phase.
    pub in_range: Ticks,
    pub hyperperiod: Ticks,
}

struct Setup {
    tb: Ticks,
    tc: Ticks,
    h: Ticks,
    listen: IntervalSet,
}

fn setup(e: &ProtocolSpec, f: &ProtocolSpec, cfg: &OracleConfig) -> Result<Setup> {
    let tb = e
        .beacons
        .period()
        .ok_or_else(|| NdError::InvalidSchedule("the oracle needs a periodic beacon schedule".into()))?;
    if !f.receptions.is_repetitive() {
        return Err(NdError::InvalidSchedule("the oracle needs a repetitive reception schedule".into()));
    }
    let tc = f.receptions.period();
    let h = lcm_u64(tb, tc).ok_or_else(|| NdError::HorizonOverflow("lcm(T_B, T_C)".into()))?;
    if h as u128 > cfg.max_hyperperiod {
        return Err(NdError::HyperperiodTooLarge { hyperperiod: h as u128, budget: cfg.max_hyperperiod });
    }
    if (tb + h).checked_mul(2).is_none_or(|x| x > i64::MAX as u64) {
        return Err(NdError::HorizonOverflow("sweep horizon".into()));
    }
    let listen = effective_windows(&f.receptions, f.radio.semantics, e.beacons.omega());
    Ok(Setup { tb, tc, h, listen })
}

fn hits(s: &Setup, emissions: &[i64], phi: Ticks) -> Vec<i64> {
    let tc = s.tc as i64;
    emissions.iter().copied().filter(|&t| s.listen.contains((t - phi as i64).rem_euclid(tc) as Ticks)).collect()
}

/// Per-phase result of the tick sweep: worst latency and the `t0` attaining it.
fn sweep_phase(s: &Setup, emissions: &[i64], phi: Ticks) -> (Latency, Ticks) {
    let hits = hits(s, emissions, phi);
    let mut worst = (Latency::Bounded(0), 0);
    let mut p = 0;
    for t0 in 0..s.tb {
        let t = t0 as i64;
        while p < hits.len() && hits[p] <= t {
            p += 1;
        }
        let lat = match hits.get(p) {
            Some(&next) if ((next - t) as u64) <= s.h => Latency::Bounded((next - t) as u64),
            _ => return (Latency::Unbounded, t0),
        };
        if lat > worst.0 {
            worst = (lat, t0);
        }
    }
    worst
}

fn reduce(results: Vec<(Ticks, (Latency, Ticks))>, h: Ticks) -> OracleReport {
    // max latency, ties resolved towards the smallest phase
    let mut best: Option<(Ticks, (Latency, Ticks))> = None;
    for r in results {
        match best {
            Some((_, (lat, _))) if r.1 .0 <= lat => {}
            _ => best = Some(r),
        }
    }
    let (phase, (latency, in_range)) = best.expect("at least one phase");
    OracleReport { latency, phase, in_range, hyperperiod: h }
}

/// Full tick sweep over every phase `φ ∈ [0, T_C)` and every in-range
/// instant `t0 ∈ [0, T_B)`.
pub fn worst_case_latency(e: &ProtocolSpec, f: &ProtocolSpec, cfg: &OracleConfig) -> Result<OracleReport> {
    worst_case_latency_on_grid(e, f, 1, cfg)
}

/// Full tick sweep restricted to phases that are multiples of `step`
/// (e.g. slot-aligned phases of a slotted protocol). In-range instants are
/// still swept at tick resolution.
pub fn worst_case_latency_on_grid(
    e: &ProtocolSpec,
    f: &ProtocolSpec,
    step: Ticks,
    cfg: &OracleConfig,
) -> Result<OracleReport> {
    if step == 0 {
        return Err(NdError::Domain("phase step must be positive".into()));
    }
    let s = setup(e, f, cfg)?;
    let emissions = e.beacons.emissions_in(0, 1, (s.tb + s.h) as i64 + 1);
    let phases = s.tc.div_ceil(step);
    let results = map_collect(cfg.exec, phases, |i| {
        let phi = i * step;
        (phi, sweep_phase(&s, &emissions, phi))
    });
    Ok(reduce(results, s.h))
}

/// Same result as [`worst_case_latency`], evaluating only phases at which
/// some beacon crosses a window boundary. For each such phase the worst
/// in-range instant is the largest cyclic gap between successful beacons.
pub fn worst_case_latency_endpoints(e: &ProtocolSpec, f: &ProtocolSpec, cfg: &OracleConfig) -> Result<OracleReport> {
    let s = setup(e, f, cfg)?;
    let emissions = e.beacons.emissions_in(0, 0, s.h as i64);
    let tc = s.tc as i64;
    let mut residues: Vec<i64> = emissions.iter().map(|t| t.rem_euclid(tc)).collect();
    residues.sort_unstable();
    residues.dedup();
    let mut candidates = vec![0u64];
    for &r in &residues {
        for &(a, b) in s.listen.spans() {
            candidates.push((r - a as i64 + 1).rem_euclid(tc) as Ticks);
            candidates.push((r - b as i64 + 1).rem_euclid(tc) as Ticks);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let h = s.h as i64;
    let results = map_collect(cfg.exec, candidates.len() as u64, |i| {
        let phi = candidates[i as usize];
        let hits = hits(&s, &emissions, phi);
        let Some((&first, &last)) = hits.first().zip(hits.last()) else {
            return (phi, (Latency::Unbounded, 0));
        };
        let mut worst = (first + h - last, last.rem_euclid(h));
        for w in hits.windows(2) {
            if w[1] - w[0] > worst.0 {
                worst = (w[1] - w[0], w[0]);
            }
        }
        (phi, (Latency::Bounded(worst.0 as Ticks), worst.1 as Ticks))
    });
    Ok(reduce(results, s.h))
}

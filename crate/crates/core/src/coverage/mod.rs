//! Coverage maps: for every beacon of a finite sequence `B′`, the set of
//! initial offsets `Φ₁ ∈ [0, T_C)` for which that beacon lands in a
//! reception window.

mod oracle;
mod quadruple;

use std::io::Write;

use serde::Serialize;

use crate::error::{NdError, Result};
use crate::interval::IntervalSet;
use crate::rational::{ceil, ratio};
use crate::schedule::{BeaconSchedule, ProtocolSpec, RadioModel, ReceptionSchedule, Semantics, Ticks};

pub use oracle::{
    worst_case_latency, worst_case_latency_endpoints, worst_case_latency_on_grid, Latency, OracleConfig, OracleReport,
};
pub use quadruple::{check_correlated_quadruple, QuadrupleReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMap {
    period: Ticks,
    repetitive: bool,
    /// `τ_i − τ_1` for each beacon.
    offsets: Vec<Ticks>,
    per_beacon: Vec<IntervalSet>,
    /// Windows shortened per the reception semantics, relative to the
    /// period origin.
    effective: IntervalSet,
}

/// Intervals during which a beacon of length `omega` may start and still be
/// received, within one reception period.
pub(crate) fn effective_windows(c: &ReceptionSchedule, semantics: Semantics, omega: Ticks) -> IntervalSet {
    IntervalSet::from_spans(c.windows().iter().map(|w| {
        let d = match semantics {
            Semantics::Ideal => w.duration,
            Semantics::Contained => w.duration.saturating_sub(omega),
        };
        (w.start, w.start + d)
    }))
}

impl CoverageMap {
    /// Map of the finite sequence `beacons.times()` against the infinite
    /// (or, when not repetitive, one-shot) reception sequence.
    pub fn build(beacons: &BeaconSchedule, receptions: &ReceptionSchedule, radio: &RadioModel) -> Result<Self> {
        if beacons.is_empty() {
            return Err(NdError::InvalidSchedule("coverage map needs at least one beacon".into()));
        }
        let first = beacons.times()[0];
        let offsets: Vec<Ticks> = beacons.times().iter().map(|t| t - first).collect();
        Self::from_offsets(offsets, receptions, radio.semantics, beacons.omega())
    }

    /// Map of one full hyper-period of `e`'s beacons against `f`'s windows.
    /// Together these decide whether the protocol pair is deterministic.
    pub fn for_protocols(e: &ProtocolSpec, f: &ProtocolSpec) -> Result<Self> {
        let b = &e.beacons;
        let tb = b
            .period()
            .ok_or_else(|| NdError::InvalidSchedule("the transmitter needs a periodic beacon schedule".into()))?;
        let tc = f.receptions.period();
        let h = crate::rational::lcm_u64(tb, tc).ok_or_else(|| NdError::HorizonOverflow("lcm(T_B, T_C)".into()))?;
        let count = (h / tb) * b.len() as u64;
        let first = b.times()[0];
        let offsets = (0..count).map(|n| b.emission(n).expect("periodic") - first).collect();
        Self::from_offsets(offsets, &f.receptions, f.radio.semantics, b.omega())
    }

    fn from_offsets(
        offsets: Vec<Ticks>,
        receptions: &ReceptionSchedule,
        semantics: Semantics,
        omega: Ticks,
    ) -> Result<Self> {
        let period = receptions.period();
        let effective = effective_windows(receptions, semantics, omega);
        let per_beacon = offsets
            .iter()
            .map(|&delta| {
                if receptions.is_repetitive() {
                    effective.shift_left_mod(delta % period, period)
                } else {
                    // one-shot pattern: shift without wrap-around, clip at 0
                    IntervalSet::from_spans(
                        effective
                            .spans()
                            .iter()
                            .filter(|&&(_, b)| b > delta)
                            .map(|&(a, b)| (a.saturating_sub(delta), b - delta)),
                    )
                }
            })
            .collect();
        Ok(CoverageMap { period, repetitive: receptions.is_repetitive(), offsets, per_beacon, effective })
    }

    pub fn period(&self) -> Ticks {
        self.period
    }

    pub fn offsets(&self) -> &[Ticks] {
        &self.offsets
    }

    /// `Ω_i` for every beacon, in emission order.
    pub fn per_beacon(&self) -> &[IntervalSet] {
        &self.per_beacon
    }

    pub fn union(&self) -> IntervalSet {
        IntervalSet::from_spans(self.per_beacon.iter().flat_map(|s| s.spans().iter().copied()))
    }

    /// `l*(Φ₁)`: time from the first beacon to the first received one, or
    /// `None` if no beacon of the sequence covers `phi1`.
    pub fn beacon_to_beacon_latency(&self, phi1: Ticks) -> Option<Ticks> {
        let phi = if self.repetitive { phi1 % self.period } else { phi1 };
        self.per_beacon.iter().zip(&self.offsets).find(|(omega, _)| omega.contains(phi)).map(|(_, &delta)| delta)
    }

    /// `l*` evaluated directly on the unreduced reception sequence: beacon
    /// `i` is received iff `phi1 + δ_i` falls into some window instance.
    pub fn beacon_to_beacon_latency_unreduced(&self, phi1: i64) -> Option<Ticks> {
        let p = self.period as i64;
        self.offsets.iter().copied().find(|&delta| {
            let t = phi1 + delta as i64;
            let local = if self.repetitive {
                t.rem_euclid(p)
            } else if (0..p).contains(&t) {
                t
            } else {
                return false;
            };
            self.effective.contains(local as Ticks)
        })
    }

    /// Writes `beacon_index,interval_start,interval_end` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let fmt = |e: csv::Error| NdError::Format(e.to_string());
        w.write_record(["beacon_index", "interval_start", "interval_end"]).map_err(fmt)?;
        for (i, set) in self.per_beacon.iter().enumerate() {
            for &(a, b) in set.spans() {
                w.serialize((i + 1, a, b)).map_err(fmt)?;
            }
        }
        w.flush().map_err(|e| NdError::Format(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminismReport {
    pub deterministic: bool,
    /// Offsets in `[0, T_C)` covered by no beacon.
    pub uncovered: IntervalSet,
    pub redundant: bool,
    /// `Λ`: integral of the per-offset multiplicity over `[0, T_C)`.
    pub coverage_lambda: Ticks,
    /// Minimum beacon count `M` for the reception sequence.
    pub min_beacons: u64,
}

impl DeterminismReport {
    /// Builds the report from any family of covering sets over `[0, period)`.
    pub(crate) fn from_sets<'a, I>(sets: I, period: Ticks, min_beacons: u64) -> Self
    where
        I: IntoIterator<Item = &'a IntervalSet>,
    {
        let mut events: Vec<(Ticks, i64)> = Vec::new();
        let mut lambda = 0;
        for s in sets {
            lambda += s.measure();
            for &(a, b) in s.spans() {
                events.push((a.min(period), 1));
                events.push((b.min(period), -1));
            }
        }
        events.sort_unstable();
        let mut depth = 0i64;
        let mut redundant = false;
        let mut covered = Vec::new();
        let mut open_at = 0;
        let mut i = 0;
        while i < events.len() {
            let t = events[i].0;
            let before = depth;
            while i < events.len() && events[i].0 == t {
                depth += events[i].1;
                i += 1;
            }
            if before == 0 && depth > 0 {
                open_at = t;
            } else if before > 0 && depth == 0 {
                covered.push((open_at, t));
            }
            if depth >= 2 {
                redundant = true;
            }
        }
        let uncovered = IntervalSet::from_spans(covered).complement(period);
        DeterminismReport {
            deterministic: uncovered.is_empty(),
            uncovered,
            redundant,
            coverage_lambda: lambda,
            min_beacons,
        }
    }
}

/// Determinism, redundancy, coverage `Λ` and `M` of a coverage map.
pub fn analyze(map: &CoverageMap) -> DeterminismReport {
    let listen = map.effective.measure();
    let m = if listen == 0 { 0 } else { map.period.div_ceil(listen) };
    DeterminismReport::from_sets(&map.per_beacon, map.period, m)
}

/// Minimum beacon count `M = ⌈T_C / Σ d_k⌉`, with `d_k − ω` in place of
/// `d_k` when beacons must be fully contained.
pub fn min_beacons(receptions: &ReceptionSchedule, radio: &RadioModel) -> Result<u64> {
    let listen = effective_windows(receptions, radio.semantics, radio.omega).measure();
    if listen == 0 {
        return Err(NdError::Infeasible(format!("no window is longer than the beacon duration {}", radio.omega)));
    }
    Ok(ceil(ratio(receptions.period() as i128, listen as i128)) as u64)
}

//! Mutual-exclusive one-way discovery between two devices whose beacons
//! sit at a fixed offset `ζ` after the start of their reception period.
//!
//! Placing `F`'s period origin `s` ticks after `E`'s, `F`'s first beacon has
//! offset `Φ_F = s + ζ` from `E`'s windows and `E`'s first beacon has
//! offset `Φ_E = ζ − s` from `F`'s windows, so `Φ_E = 2ζ − Φ_F`. Discovery
//! in either direction counts.

use serde::Serialize;

use super::{CoverageMap, DeterminismReport};
use crate::error::{NdError, Result};
use crate::interval::IntervalSet;
use crate::schedule::{ProtocolSpec, Ticks};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadrupleReport {
    /// Offsets `Φ_F` at which one of `F`'s beacons reaches `E`.
    pub omega_f: IntervalSet,
    /// Offsets `Φ_F` at which one of `E`'s beacons reaches `F`.
    pub omega_e: IntervalSet,
    pub report: DeterminismReport,
}

fn one_period_map(tx: &ProtocolSpec, rx: &ProtocolSpec, zeta: Ticks) -> Result<CoverageMap> {
    let tc = rx.receptions.period();
    match tx.beacons.period() {
        Some(tb) if tb == tc => {}
        Some(tb) => return Err(NdError::MisalignedPeriods { left: tb, right: tc }),
        None => return Err(NdError::InvalidSchedule("correlated beacons must repeat every T_C".into())),
    }
    if tx.beacons.times().first() != Some(&zeta) {
        return Err(NdError::Domain(format!("the first beacon must be sent at zeta = {zeta}")));
    }
    CoverageMap::build(&tx.beacons, &rx.receptions, &rx.radio)
}

/// Coverage of both directions expressed over `F`'s offset `Φ_F ∈ [0, T_C)`.
pub fn check_correlated_quadruple(e: &ProtocolSpec, f: &ProtocolSpec, zeta: Ticks) -> Result<QuadrupleReport> {
    let (tc_e, tc_f) = (e.receptions.period(), f.receptions.period());
    if tc_e != tc_f {
        return Err(NdError::MisalignedPeriods { left: tc_e, right: tc_f });
    }
    if !e.receptions.is_repetitive() || !f.receptions.is_repetitive() {
        return Err(NdError::InvalidSchedule("correlated quadruples need repetitive windows".into()));
    }
    let tc = tc_e;
    let map_f = one_period_map(f, e, zeta)?;
    let map_e = one_period_map(e, f, zeta)?;
    let c = 2 * (zeta % tc) as i64;
    let mapped: Vec<IntervalSet> = map_e.per_beacon().iter().map(|s| s.reflect_mod(c, tc)).collect();
    let omega_f = map_f.union();
    let omega_e = IntervalSet::from_spans(mapped.iter().flat_map(|s| s.spans().iter().copied()));
    let listen = super::effective_windows(&e.receptions, e.radio.semantics, f.beacons.omega()).measure();
    let m = if listen == 0 { 0 } else { tc.div_ceil(listen) };
    let report = DeterminismReport::from_sets(map_f.per_beacon().iter().chain(mapped.iter()), tc, m);
    Ok(QuadrupleReport { omega_f, omega_e, report })
}

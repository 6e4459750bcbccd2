//! Generators for optimal slotless schedules and classic slotted protocols.
//!
//! Every generator returns a [`ProtocolSpec`] on the default 1 µs time base;
//! use [`ProtocolSpec::with_time_base`] to relabel ticks.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{NdError, Result};
use crate::rational::Rational;
use crate::schedule::{
    BeaconSchedule, ProtocolSpec, RadioModel, ReceptionSchedule, ReceptionWindow, Semantics, Ticks, TimeBase,
};

/// Beacon gap `ω/β` in ticks, if integral.
pub fn beacon_gap(beta: Rational, omega: Ticks) -> Result<Ticks> {
    if beta <= Rational::zero() || beta > Rational::from_integer(1) {
        return Err(NdError::Domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    let gap = Rational::from_integer(omega as i128) / beta;
    if !gap.is_integer() {
        return Err(NdError::NeedsFinerTicks { omega, beta: beta.to_string() });
    }
    Ok(gap.to_integer() as Ticks)
}

/// One window per period `T_C = k·λ` and `k` beacons spaced `λ = ω/β`
/// apart, so that the beacons' coverage tiles `[0, T_C)` exactly once.
/// The window has length `λ` (or `λ + ω` when beacons must be contained).
pub fn gen_optimal_unidirectional(k: u64, beta: Rational, radio: &RadioModel) -> Result<ProtocolSpec> {
    gen_optimal_unidirectional_at(k, beta, radio, 0)
}

/// As [`gen_optimal_unidirectional`], with the window opening
/// `window_start` ticks into the period instead of at 0.
pub fn gen_optimal_unidirectional_at(
    k: u64,
    beta: Rational,
    radio: &RadioModel,
    window_start: Ticks,
) -> Result<ProtocolSpec> {
    radio.validate()?;
    if k == 0 {
        return Err(NdError::Domain("k = 1/gamma must be at least 1".into()));
    }
    let lambda = beacon_gap(beta, radio.omega)?;
    let d = match radio.semantics {
        Semantics::Ideal => lambda,
        Semantics::Contained => lambda + radio.omega,
    };
    let tc = k.checked_mul(lambda).ok_or_else(|| NdError::HorizonOverflow("k * lambda".into()))?;
    if d + window_start > tc {
        return Err(NdError::Domain(format!("window of {d} ticks at {window_start} does not fit into T_C = {tc}")));
    }
    let beacons = BeaconSchedule::periodic(0, lambda, k as usize, radio.omega)?;
    let receptions = ReceptionSchedule::single(window_start, d, tc)?;
    ProtocolSpec::new(TimeBase::default(), beacons, receptions, radio.clone())
}

/// PI-0M: one beacon every `T_B = d`, one window of length `d` every
/// `T_C = (M+1)·d − 1`.
pub fn gen_pi0m(m: u64, d: Ticks, radio: &RadioModel) -> Result<ProtocolSpec> {
    gen_pi0m_with_delta(m, d, 1, radio)
}

/// PI-0M with `T_C = (M+1)·d − Δ`.
pub fn gen_pi0m_with_delta(m: u64, d: Ticks, delta: Ticks, radio: &RadioModel) -> Result<ProtocolSpec> {
    radio.validate()?;
    if m == 0 {
        return Err(NdError::Domain("M must be at least 1".into()));
    }
    if d <= radio.omega {
        return Err(NdError::Domain(format!("d = {d} must exceed omega = {}", radio.omega)));
    }
    let full = (m + 1).checked_mul(d).ok_or_else(|| NdError::HorizonOverflow("(M+1) * d".into()))?;
    if delta >= full - d {
        return Err(NdError::Domain(format!("delta = {delta} too large for M = {m}, d = {d}")));
    }
    let beacons = BeaconSchedule::periodic(0, d, 1, radio.omega)?;
    let receptions = ReceptionSchedule::single(0, d, full - delta)?;
    ProtocolSpec::new(TimeBase::default(), beacons, receptions, radio.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlottedParams {
    /// Slot length `I` in ticks.
    pub slot_length: Ticks,
    /// Slots per repetition of the activity pattern.
    pub period_slots: u64,
    /// Active slots per repetition.
    pub active_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlottedProtocolSpec {
    pub spec: ProtocolSpec,
    pub params: SlottedParams,
    pub active_slots: Vec<u64>,
}

/// Every active slot is a reception window spanning the whole slot, with
/// one beacon in its first and one in its last `ω` ticks.
pub fn slotted_schedule(
    active: &[u64],
    period_slots: u64,
    slot: Ticks,
    radio: &RadioModel,
) -> Result<SlottedProtocolSpec> {
    radio.validate()?;
    let omega = radio.omega;
    if slot < 2 * omega {
        return Err(NdError::Domain(format!("slot length {slot} cannot hold two beacons of {omega} ticks")));
    }
    let mut slots: Vec<u64> = active.to_vec();
    slots.sort_unstable();
    slots.dedup();
    if slots.is_empty() || slots[slots.len() - 1] >= period_slots {
        return Err(NdError::Domain("active slots must be non-empty and lie inside the period".into()));
    }
    let period = period_slots.checked_mul(slot).ok_or_else(|| NdError::HorizonOverflow("slots * I".into()))?;
    let mut times = Vec::with_capacity(2 * slots.len());
    for &j in &slots {
        times.push(j * slot);
        times.push((j + 1) * slot - omega);
    }
    let windows = slots.iter().map(|&j| ReceptionWindow::new(j * slot, slot)).collect();
    let beacons = BeaconSchedule::new(times, omega, Some(period))?;
    let receptions = ReceptionSchedule::new(windows, period, true)?;
    let spec = ProtocolSpec::new(TimeBase::default(), beacons, receptions, radio.clone())?;
    Ok(SlottedProtocolSpec {
        spec,
        params: SlottedParams { slot_length: slot, period_slots, active_count: slots.len() as u64 },
        active_slots: slots,
    })
}

/// Disco: slot `j` of the `p1·p2` hyper-period is active if `p1 | j` or
/// `p2 | j`.
pub fn gen_disco(p1: u64, p2: u64, slot: Ticks, radio: &RadioModel) -> Result<SlottedProtocolSpec> {
    if p1 < 2 || p2 < 2 {
        return Err(NdError::Domain("Disco primes must be at least 2".into()));
    }
    if p1.gcd(&p2) != 1 {
        return Err(NdError::NotCoprime { p1, p2 });
    }
    let n = p1 * p2;
    let active: Vec<u64> = (0..n).filter(|j| j % p1 == 0 || j % p2 == 0).collect();
    slotted_schedule(&active, n, slot, radio)
}

/// Striped Searchlight: `⌈T/2⌉` periods of `T` slots. Slot 0 of each period
/// is the anchor; the probe slot visits positions `1..=⌈T/2⌉`, one per period.
pub fn gen_searchlight_striped(t: u64, slot: Ticks, radio: &RadioModel) -> Result<SlottedProtocolSpec> {
    if t < 2 {
        return Err(NdError::Domain("Searchlight period T must be at least 2".into()));
    }
    let h = t.div_ceil(2);
    let mut active = Vec::with_capacity(2 * h as usize);
    for n in 0..h {
        active.push(n * t);
        active.push(n * t + 1 + n % h);
    }
    slotted_schedule(&active, t * h, slot, radio)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| !p.is_multiple_of(i))
}

/// U-Connect: over `p²` slots, every `p`-th slot is active, plus a block of
/// `(p+1)/2` consecutive slots starting at slot 1.
pub fn gen_uconnect(p: u64, slot: Ticks, radio: &RadioModel) -> Result<SlottedProtocolSpec> {
    if p < 3 || !is_prime(p) {
        return Err(NdError::Domain(format!("U-Connect needs an odd prime, got {p}")));
    }
    let n = p * p;
    let block = 1..1 + p.div_ceil(2);
    let active: Vec<u64> = (0..n).filter(|j| j % p == 0 || block.contains(j)).collect();
    slotted_schedule(&active, n, slot, radio)
}

/// A perfect `(T, k, 1)` cyclic difference set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceSet {
    modulus: u64,
    elements: Vec<u64>,
}

impl DifferenceSet {
    /// Validates that every nonzero residue modulo `modulus` is the
    /// difference of exactly one ordered pair of elements.
    pub fn new(modulus: u64, elements: &[u64]) -> Result<Self> {
        if modulus < 2 {
            return Err(NdError::InvalidDifferenceSet("modulus must be at least 2".into()));
        }
        let mut el: Vec<u64> = elements.iter().map(|e| e % modulus).collect();
        el.sort_unstable();
        el.dedup();
        if el.len() != elements.len() {
            return Err(NdError::InvalidDifferenceSet("elements are not distinct residues".into()));
        }
        let mut count = vec![0u32; modulus as usize];
        for &a in &el {
            for &b in &el {
                if a != b {
                    count[((a + modulus - b) % modulus) as usize] += 1;
                }
            }
        }
        if let Some(r) = (1..modulus).find(|&r| count[r as usize] != 1) {
            return Err(NdError::InvalidDifferenceSet(format!(
                "residue {r} occurs {} times as a difference",
                count[r as usize]
            )));
        }
        Ok(DifferenceSet { modulus, elements: el })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// Built-in sets `(7,3,1)`, `(13,4,1)`, `(21,5,1)` and `(31,6,1)`.
    pub fn builtin(modulus: u64) -> Result<Self> {
        let el: &[u64] = match modulus {
            7 => &[1, 2, 4],
            13 => &[0, 1, 3, 9],
            21 => &[3, 6, 7, 12, 14],
            31 => &[1, 5, 11, 24, 25, 27],
            _ => {
                return Err(NdError::InvalidDifferenceSet(format!(
                    "no built-in set with modulus {modulus} (have 7, 13, 21, 31)"
                )))
            }
        };
        Self::new(modulus, el)
    }
}

/// Slots listed in the difference set are active in every period of
/// `T` slots.
pub fn gen_diffcode(ds: &DifferenceSet, slot: Ticks, radio: &RadioModel) -> Result<SlottedProtocolSpec> {
    slotted_schedule(&ds.elements, ds.modulus, slot, radio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{analyze, CoverageMap};
    use crate::rational::{int, ratio};

    #[test]
    fn optimal_layout() {
        let p = gen_optimal_unidirectional(4, ratio(1, 100), &RadioModel::ideal(1)).unwrap();
        assert_eq!(p.receptions.period(), 400);
        assert_eq!(p.receptions.duty_cycle(), ratio(1, 4));
        assert_eq!(p.beacons.duty_cycle(), ratio(1, 100));
        assert_eq!(p.beacons.len(), 4);
        let r = analyze(&CoverageMap::for_protocols(&p, &p).unwrap());
        assert!(r.deterministic && !r.redundant);
        assert_eq!(r.min_beacons, 4);
    }

    #[test]
    fn optimal_single_window() {
        let p = gen_optimal_unidirectional(1, ratio(1, 10), &RadioModel::ideal(2)).unwrap();
        assert_eq!(p.receptions.duty_cycle(), int(1));
        assert_eq!(p.beacons.len(), 1);
        let contained = RadioModel::ideal(2).with_semantics(Semantics::Contained);
        assert!(gen_optimal_unidirectional(1, ratio(1, 10), &contained).is_err());
    }

    #[test]
    fn optimal_needs_integral_gap() {
        let err = gen_optimal_unidirectional(4, ratio(3, 100), &RadioModel::ideal(1)).unwrap_err();
        assert!(matches!(err, NdError::NeedsFinerTicks { .. }));
    }

    #[test]
    fn pi0m_layout() {
        let p = gen_pi0m(3, 10, &RadioModel::ideal(1)).unwrap();
        assert_eq!(p.receptions.period(), 39);
        assert_eq!(p.beacons.period(), Some(10));
        assert!(gen_pi0m(3, 1, &RadioModel::ideal(1)).is_err());
    }

    #[test]
    fn disco_duty_and_coprimality() {
        let d = gen_disco(3, 5, 10, &RadioModel::ideal(1)).unwrap();
        assert_eq!(d.active_slots, vec![0, 3, 5, 6, 9, 10, 12]);
        assert_eq!(d.spec.receptions.duty_cycle(), ratio(7, 15));
        assert_eq!(gen_disco(4, 6, 10, &RadioModel::ideal(1)).unwrap_err(), NdError::NotCoprime { p1: 4, p2: 6 });
    }

    #[test]
    fn searchlight_probes() {
        let s = gen_searchlight_striped(4, 10, &RadioModel::ideal(1)).unwrap();
        assert_eq!(s.active_slots, vec![0, 1, 4, 6]);
        assert_eq!(s.params.period_slots, 8);
        assert_eq!(s.spec.receptions.duty_cycle(), ratio(2, 4));
    }

    #[test]
    fn uconnect_slots() {
        let u = gen_uconnect(3, 10, &RadioModel::ideal(1)).unwrap();
        assert_eq!(u.active_slots, vec![0, 1, 2, 3, 6]);
        assert_eq!(u.spec.receptions.duty_cycle(), ratio(1, 3) + ratio(2, 9));
        assert!(gen_uconnect(9, 10, &RadioModel::ideal(1)).is_err());
    }

    #[test]
    fn difference_sets() {
        for t in [7, 13, 21, 31] {
            let ds = DifferenceSet::builtin(t).unwrap();
            assert_eq!(ds.modulus(), t);
        }
        assert!(DifferenceSet::new(7, &[0, 1, 2]).is_err());
        assert!(DifferenceSet::new(7, &[1, 8, 4]).is_err());
    }

    #[test]
    fn slots_must_hold_two_beacons() {
        assert!(gen_disco(3, 5, 1, &RadioModel::ideal(1)).is_err());
        assert!(gen_disco(3, 5, 2, &RadioModel::ideal(1)).is_ok());
    }
}

//! Random schedule generators shared by the integration tests.
#![allow(dead_code)]

use ndlab::{BeaconSchedule, Latency, ProtocolSpec, RadioModel, ReceptionSchedule, ReceptionWindow, Ticks, TimeBase};
use rand::seq::index::sample;
use rand::Rng;

/// Up to `max_windows` non-overlapping windows in a period of `period` ticks.
pub fn random_receptions<R: Rng>(rng: &mut R, period: Ticks, max_windows: usize) -> ReceptionSchedule {
    let n = rng.random_range(1..=max_windows.min(period as usize / 2).max(1));
    let mut cuts: Vec<u64> = sample(rng, period as usize + 1, 2 * n).into_iter().map(|c| c as u64).collect();
    cuts.sort_unstable();
    let windows = cuts.chunks(2).map(|c| ReceptionWindow::new(c[0], c[1] - c[0])).collect();
    ReceptionSchedule::new(windows, period, true).unwrap()
}

/// A finite beacon list with gaps in `[omega, max_gap]`.
pub fn random_beacons<R: Rng>(rng: &mut R, count: usize, omega: Ticks, max_gap: Ticks) -> BeaconSchedule {
    let mut t = rng.random_range(0..max_gap);
    let mut times = Vec::with_capacity(count);
    for _ in 0..count {
        times.push(t);
        t += rng.random_range(omega..=max_gap.max(omega));
    }
    BeaconSchedule::new(times, omega, None).unwrap()
}

/// A periodic beacon schedule with `count` beacons per period.
pub fn random_periodic_beacons<R: Rng>(rng: &mut R, count: usize, omega: Ticks, max_gap: Ticks) -> BeaconSchedule {
    let finite = random_beacons(rng, count + 1, omega, max_gap);
    let times = finite.times();
    let first = times[0];
    let period = times[count] - first;
    let shifted: Vec<Ticks> = times[..count].iter().map(|t| t - first).collect();
    BeaconSchedule::new(shifted, omega, Some(period)).unwrap()
}

pub fn spec(beacons: BeaconSchedule, receptions: ReceptionSchedule) -> ProtocolSpec {
    let omega = beacons.omega();
    ProtocolSpec::new(TimeBase::default(), beacons, receptions, RadioModel::ideal(omega)).unwrap()
}

/// Transmitter with the given beacons and a token reception window.
pub fn transmitter(beacons: BeaconSchedule) -> ProtocolSpec {
    let period = beacons.period().unwrap_or(1).max(1);
    spec(beacons, ReceptionSchedule::single(0, 1, period).unwrap())
}

/// Silent receiver with the given windows.
pub fn receiver(receptions: ReceptionSchedule, omega: Ticks) -> ProtocolSpec {
    spec(BeaconSchedule::silent(omega).unwrap(), receptions)
}

/// `(φ + δ) mod T_C` falls into a window, checked window by window.
pub fn lands(c: &ReceptionSchedule, phi: i64, delta: Ticks) -> bool {
    let local = (phi + delta as i64).rem_euclid(c.period() as i64) as u64;
    c.windows().iter().any(|w| w.start <= local && local < w.start + w.duration)
}

/// Tick-by-tick latency replay, independent of the library's sweep: for
/// every phase and in-range instant, walk forward until a beacon starts in
/// a window.
pub fn naive_latency_at(e: &ProtocolSpec, f: &ProtocolSpec, phi: Ticks, t0: Ticks) -> Latency {
    let tb = e.beacons.period().unwrap() as i64;
    let h = num_integer::lcm(tb as u64, f.receptions.period()) as i64;
    let t0 = t0 as i64;
    (t0 + 1..=t0 + h)
        .find(|&t| e.beacons.times().contains(&(t.rem_euclid(tb) as Ticks)) && lands(&f.receptions, t - phi as i64, 0))
        .map_or(Latency::Unbounded, |t| Latency::Bounded((t - t0) as Ticks))
}

pub fn naive_worst_case(e: &ProtocolSpec, f: &ProtocolSpec) -> Latency {
    let tb = e.beacons.period().unwrap();
    let tc = f.receptions.period();
    (0..tc)
        .flat_map(|phi| (0..tb).map(move |t0| (phi, t0)))
        .map(|(phi, t0)| naive_latency_at(e, f, phi, t0))
        .max()
        .unwrap()
}

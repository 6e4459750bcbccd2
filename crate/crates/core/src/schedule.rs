//! Time base, beacon and reception-window schedules, radio parameters and
//! the duty-cycle arithmetic shared by every other module.
//!
//! All quantities are integer tick counts. Windows and beacons are half-open
//! intervals `[start, start + duration)`.

use num_traits::Zero;

use crate::error::{NdError, Result};
use crate::rational::{int, ratio, Rational};

/// Integer tick count.
pub type Ticks = u64;

/// Physical length of one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeBase {
    tick_ns: u64,
}

impl TimeBase {
    pub const MICROSECOND: TimeBase = TimeBase { tick_ns: 1_000 };

    pub fn from_nanos(tick_ns: u64) -> Result<Self> {
        if tick_ns == 0 {
            return Err(NdError::InvalidSchedule("tick duration must be positive".into()));
        }
        Ok(TimeBase { tick_ns })
    }

    pub fn tick_ns(&self) -> u64 {
        self.tick_ns
    }

    /// Converts microseconds to ticks; fails unless the conversion is exact.
    pub fn ticks_from_us(&self, us: u64) -> Result<Ticks> {
        let ns = us.checked_mul(1_000).ok_or_else(|| NdError::HorizonOverflow(format!("{us} us")))?;
        if ns % self.tick_ns != 0 {
            return Err(NdError::Domain(format!("{us} us is not a whole number of {} ns ticks", self.tick_ns)));
        }
        Ok(ns / self.tick_ns)
    }

    pub fn seconds(&self, ticks: Ticks) -> f64 {
        ticks as f64 * self.tick_ns as f64 * 1e-9
    }
}

impl Default for TimeBase {
    fn default() -> Self {
        TimeBase::MICROSECOND
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReceptionWindow {
    pub start: Ticks,
    pub duration: Ticks,
}

impl ReceptionWindow {
    pub fn new(start: Ticks, duration: Ticks) -> Self {
        ReceptionWindow { start, duration }
    }

    pub fn end(&self) -> Ticks {
        self.start + self.duration
    }
}

/// A finite window sequence `C` and its period `T_C`.
///
/// When `repetitive` is false the sequence is a one-shot pattern and
/// `period` is the analysis horizon instead of a repetition period.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReceptionSchedule {
    windows: Vec<ReceptionWindow>,
    period: Ticks,
    repetitive: bool,
}

impl ReceptionSchedule {
    pub fn new(windows: Vec<ReceptionWindow>, period: Ticks, repetitive: bool) -> Result<Self> {
        if windows.is_empty() {
            return Err(NdError::InvalidSchedule("at least one reception window is required".into()));
        }
        if period == 0 {
            return Err(NdError::InvalidSchedule("reception period must be positive".into()));
        }
        let mut prev_end = 0;
        for (i, w) in windows.iter().enumerate() {
            if w.duration == 0 {
                return Err(NdError::InvalidSchedule(format!("window {i} has zero duration")));
            }
            if i > 0 && w.start < prev_end {
                return Err(NdError::InvalidSchedule(format!(
                    "window {i} starts at {} before the previous window ends at {prev_end}",
                    w.start
                )));
            }
            let end = w.start.checked_add(w.duration).ok_or_else(|| NdError::HorizonOverflow(format!("window {i}")))?;
            if end > period {
                return Err(NdError::InvalidSchedule(format!("window {i} ends at {end}, beyond the period {period}")));
            }
            prev_end = end;
        }
        Ok(ReceptionSchedule { windows, period, repetitive })
    }

    /// One window of length `duration` at `start` per `period`.
    pub fn single(start: Ticks, duration: Ticks, period: Ticks) -> Result<Self> {
        Self::new(vec![ReceptionWindow::new(start, duration)], period, true)
    }

    pub fn windows(&self) -> &[ReceptionWindow] {
        &self.windows
    }

    pub fn period(&self) -> Ticks {
        self.period
    }

    pub fn is_repetitive(&self) -> bool {
        self.repetitive
    }

    /// `Σ d_i`.
    pub fn total_listen(&self) -> Ticks {
        self.windows.iter().map(|w| w.duration).sum()
    }

    /// `γ = Σ d_i / T_C` (horizon average for one-shot patterns).
    pub fn duty_cycle(&self) -> Rational {
        ratio(self.total_listen() as i128, self.period as i128)
    }

    /// True if absolute time `t` lies inside a window instance.
    pub fn is_listening(&self, t: i64) -> bool {
        let p = self.period as i64;
        let local = if self.repetitive {
            t.rem_euclid(p)
        } else if t < 0 || t >= p {
            return false;
        } else {
            t
        };
        let local = local as u64;
        self.windows.iter().any(|w| w.start <= local && local < w.end())
    }
}

/// A beacon sequence with uniform transmission duration `ω`.
///
/// With `period = Some(T_B)` the emission times repeat every `T_B` ticks
/// (a repetitive `B∞`). Without a period the list is a finite sequence.
/// An empty list describes a device that never transmits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeaconSchedule {
    times: Vec<Ticks>,
    omega: Ticks,
    period: Option<Ticks>,
}

impl BeaconSchedule {
    pub fn new(times: Vec<Ticks>, omega: Ticks, period: Option<Ticks>) -> Result<Self> {
        if omega == 0 {
            return Err(NdError::InvalidSchedule("beacon duration omega must be at least one tick".into()));
        }
        for (i, pair) in times.windows(2).enumerate() {
            let gap = pair[1].checked_sub(pair[0]).filter(|g| *g > 0).ok_or_else(|| {
                NdError::InvalidSchedule(format!("emission times must be strictly increasing at index {}", i + 1))
            })?;
            if gap < omega {
                return Err(NdError::InvalidSchedule(format!(
                    "beacons {i} and {} overlap (gap {gap} < omega {omega})",
                    i + 1
                )));
            }
        }
        if let Some(p) = period {
            if times.is_empty() {
                return Err(NdError::InvalidSchedule("a periodic beacon schedule needs at least one beacon".into()));
            }
            let span = times[times.len() - 1] - times[0];
            if span >= p || p - span < omega {
                return Err(NdError::InvalidSchedule(format!(
                    "period {p} leaves a wrap-around gap shorter than omega (span {span})"
                )));
            }
        }
        Ok(BeaconSchedule { times, omega, period })
    }

    /// `count` beacons spaced `gap` apart, repeating every `count * gap`.
    pub fn periodic(first: Ticks, gap: Ticks, count: usize, omega: Ticks) -> Result<Self> {
        if count == 0 || gap == 0 {
            return Err(NdError::InvalidSchedule("periodic beacons need count >= 1 and gap >= 1".into()));
        }
        let times = (0..count as u64).map(|i| first + i * gap).collect();
        Self::new(times, omega, Some(gap * count as u64))
    }

    /// A device that never transmits.
    pub fn silent(omega: Ticks) -> Result<Self> {
        Self::new(Vec::new(), omega, None)
    }

    pub fn times(&self) -> &[Ticks] {
        &self.times
    }

    pub fn omega(&self) -> Ticks {
        self.omega
    }

    pub fn period(&self) -> Option<Ticks> {
        self.period
    }

    pub fn is_silent(&self) -> bool {
        self.times.is_empty()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Beacon gaps `λ_i`. For a periodic schedule the wrap-around gap into
    /// the next instance is included, so the gaps sum to `T_B`.
    pub fn gaps(&self) -> Vec<Ticks> {
        let mut gaps: Vec<Ticks> = self.times.windows(2).map(|p| p[1] - p[0]).collect();
        if let (Some(p), Some(first), Some(last)) = (self.period, self.times.first(), self.times.last()) {
            gaps.push(first + p - last);
        }
        gaps
    }

    /// Emission time of the `n`-th beacon of `B∞` (0-based). `None` past the
    /// end of a finite sequence.
    pub fn emission(&self, n: u64) -> Option<Ticks> {
        let m = self.times.len() as u64;
        if m == 0 {
            return None;
        }
        match self.period {
            Some(p) => Some(self.times[(n % m) as usize] + (n / m) * p),
            None => self.times.get(n as usize).copied(),
        }
    }

    /// Emission times in `[lo, hi)` for a schedule whose local origin sits
    /// at absolute time `origin`. Periodic schedules extend to negative time.
    pub fn emissions_in(&self, origin: i64, lo: i64, hi: i64) -> Vec<i64> {
        let mut out = Vec::new();
        if hi <= lo || self.times.is_empty() {
            return out;
        }
        match self.period {
            Some(p) => {
                let p = p as i64;
                for &t in &self.times {
                    let base = origin + t as i64;
                    let mut n = (lo - base).div_euclid(p);
                    if base + n * p < lo {
                        n += 1;
                    }
                    let mut x = base + n * p;
                    while x < hi {
                        out.push(x);
                        x += p;
                    }
                }
                out.sort_unstable();
            }
            None => {
                out.extend(self.times.iter().map(|&t| origin + t as i64).filter(|&x| lo <= x && x < hi));
            }
        }
        out
    }

    /// `β = Σ ω_i / T_B`. For a finite sequence the truncated limit
    /// `(m−1)·ω / (τ_m − τ_1)` is used; fewer than two beacons give zero.
    pub fn duty_cycle(&self) -> Rational {
        let m = self.times.len() as i128;
        match self.period {
            Some(p) => ratio(m * self.omega as i128, p as i128),
            None if m >= 2 => {
                let span = (self.times[self.times.len() - 1] - self.times[0]) as i128;
                ratio((m - 1) * self.omega as i128, span)
            }
            None => Rational::zero(),
        }
    }
}

/// How a beacon has to meet a reception window to count as received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Semantics {
    /// The beacon is received if it starts inside a window; its own
    /// duration is neglected.
    #[default]
    Ideal,
    /// The beacon must start at least `ω` ticks before the window closes.
    Contained,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadioModel {
    /// `P_Tx / P_Rx`.
    pub alpha: Rational,
    pub omega: Ticks,
    /// Sleep ↔ Tx overhead.
    pub d_o_tx: Ticks,
    /// Sleep ↔ Rx overhead.
    pub d_o_rx: Ticks,
    /// Tx → Rx turnaround.
    pub d_o_tx_rx: Ticks,
    /// Rx → Tx turnaround.
    pub d_o_rx_tx: Ticks,
    pub semantics: Semantics,
}

impl RadioModel {
    /// Ideal radio with `α = 1` and no overheads.
    pub fn ideal(omega: Ticks) -> Self {
        RadioModel {
            alpha: int(1),
            omega,
            d_o_tx: 0,
            d_o_rx: 0,
            d_o_tx_rx: 0,
            d_o_rx_tx: 0,
            semantics: Semantics::Ideal,
        }
    }

    pub fn with_alpha(mut self, alpha: Rational) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn with_switching(mut self, d_o_tx: Ticks, d_o_rx: Ticks) -> Self {
        self.d_o_tx = d_o_tx;
        self.d_o_rx = d_o_rx;
        self
    }

    pub fn with_turnarounds(mut self, d_o_tx_rx: Ticks, d_o_rx_tx: Ticks) -> Self {
        self.d_o_tx_rx = d_o_tx_rx;
        self.d_o_rx_tx = d_o_rx_tx;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha <= Rational::zero() {
            return Err(NdError::InvalidRadio(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.omega == 0 {
            return Err(NdError::InvalidRadio("omega must be at least one tick".into()));
        }
        Ok(())
    }

    /// Portion of a window of length `d` during which a beacon may start
    /// and still be received.
    pub fn effective_window(&self, d: Ticks) -> Ticks {
        match self.semantics {
            Semantics::Ideal => d,
            Semantics::Contained => d.saturating_sub(self.omega),
        }
    }

    /// Ticks during which a device's own transmission starting at `s`
    /// blocks its receiver: `[s − d_oRxTx, s + ω + d_oTxRx)`.
    pub fn blocking_span(&self, s: i64) -> (i64, i64) {
        (s - self.d_o_rx_tx as i64, s + (self.omega + self.d_o_tx_rx) as i64)
    }
}

/// An ND protocol: a beacon sequence and a reception window sequence run
/// by the same device.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtocolSpec {
    pub time_base: TimeBase,
    pub beacons: BeaconSchedule,
    pub receptions: ReceptionSchedule,
    pub radio: RadioModel,
}

impl ProtocolSpec {
    pub fn new(
        time_base: TimeBase,
        beacons: BeaconSchedule,
        receptions: ReceptionSchedule,
        radio: RadioModel,
    ) -> Result<Self> {
        radio.validate()?;
        if beacons.omega() != radio.omega {
            return Err(NdError::InvalidRadio(format!(
                "beacon omega {} differs from radio omega {}",
                beacons.omega(),
                radio.omega
            )));
        }
        Ok(ProtocolSpec { time_base, beacons, receptions, radio })
    }

    pub fn with_time_base(mut self, time_base: TimeBase) -> Self {
        self.time_base = time_base;
        self
    }

    /// Same device with its transmitter switched off.
    pub fn receiver_only(&self) -> Self {
        ProtocolSpec { beacons: BeaconSchedule::silent(self.radio.omega).expect("omega validated"), ..self.clone() }
    }

    pub fn transmission_duty_cycle(&self) -> Rational {
        transmission_duty_cycle(&self.beacons)
    }

    pub fn reception_duty_cycle(&self) -> Rational {
        reception_duty_cycle(&self.receptions)
    }

    pub fn total_duty_cycle(&self) -> Rational {
        total_duty_cycle(self)
    }

    /// `lcm(T_B, T_C)`, if the beacon schedule is periodic.
    pub fn hyperperiod(&self) -> Option<Ticks> {
        let tb = self.beacons.period()?;
        crate::rational::lcm_u64(tb, self.receptions.period())
    }
}

pub fn transmission_duty_cycle(b: &BeaconSchedule) -> Rational {
    b.duty_cycle()
}

pub fn reception_duty_cycle(c: &ReceptionSchedule) -> Rational {
    c.duty_cycle()
}

/// `η = γ + α·β`, where switching overheads (if any) extend every beacon by
/// `d_oTx` and every window by `d_oRx`.
pub fn total_duty_cycle(p: &ProtocolSpec) -> Rational {
    let r = &p.radio;
    let m = p.beacons.len() as i128;
    let beta = match p.beacons.period() {
        Some(tb) => ratio(m * (r.omega + r.d_o_tx) as i128, tb as i128),
        None if r.d_o_tx == 0 => p.beacons.duty_cycle(),
        None => {
            let base = p.beacons.duty_cycle();
            base * ratio((r.omega + r.d_o_tx) as i128, r.omega as i128)
        }
    };
    let n = p.receptions.windows().len() as i128;
    let gamma = ratio(p.receptions.total_listen() as i128 + n * r.d_o_rx as i128, p.receptions.period() as i128);
    gamma + r.alpha * beta
}

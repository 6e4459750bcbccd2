//! Closed-form worst-case latency bounds, evaluated over exact rationals.
//!
//! Latencies are in ticks; `omega` is the beacon duration in ticks. Rates
//! (`eta`, `beta`, `gamma`) are dimensionless.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{NdError, Result};
use crate::rational::{ceil, floor, int, ratio, require_positive, to_f64, Rational};
use crate::schedule::{RadioModel, Ticks};

fn om(omega: Ticks) -> Result<Rational> {
    if omega == 0 {
        return Err(NdError::Domain("omega must be at least one tick".into()));
    }
    Ok(int(omega as i128))
}

fn unit_interval(name: &str, r: Rational) -> Result<()> {
    require_positive(name, r)?;
    if r > Rational::one() {
        return Err(NdError::Domain(format!("{name} must not exceed 1, got {r}")));
    }
    Ok(())
}

/// Fewest ticks within which `F` is guaranteed to receive one of `E`'s
/// beacons: `⌈1/γ⌉ · ω/β`.
pub fn bound_unidirectional(gamma: Rational, beta: Rational, omega: Ticks) -> Result<Rational> {
    unit_interval("gamma", gamma)?;
    unit_interval("beta", beta)?;
    Ok(int(ceil(gamma.recip())) * om(omega)? / beta)
}

/// Coverage bound for a concrete window layout: `⌈T_C / Σd⌉ · ω/β`, where
/// `listen` is the (effective) total window length per period.
pub fn bound_coverage(period: Ticks, listen: Ticks, beta: Rational, omega: Ticks) -> Result<Rational> {
    if listen == 0 || listen > period {
        return Err(NdError::Domain(format!("listen time {listen} outside (0, {period}]")));
    }
    unit_interval("beta", beta)?;
    Ok(int(ceil(ratio(period as i128, listen as i128))) * om(omega)? / beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `k = ⌈2/η⌉`.
    A,
    /// `k = ⌊2/η⌋`.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetricBound {
    pub latency: Rational,
    pub branch: Branch,
    pub k: i128,
    /// Reception duty cycle `1/k` of the winning branch.
    pub gamma_o: Rational,
}

/// `L(k) = k²·ω·α / (k·η − 1)`, the symmetric latency for `γ = 1/k`.
pub fn symmetric_latency_at(k: i128, eta: Rational, omega: Ticks, alpha: Rational) -> Option<Rational> {
    let denom = int(k) * eta - Rational::one();
    if k < 1 || denom <= Rational::zero() {
        return None;
    }
    Some(int(k * k) * int(omega as i128) * alpha / denom)
}

/// Lowest worst-case latency of a symmetric two-way protocol at total duty
/// cycle `η`: the smaller of `L(⌈2/η⌉)` and `L(⌊2/η⌋)`. Ties go to branch A.
pub fn bound_symmetric(eta: Rational, omega: Ticks, alpha: Rational) -> Result<SymmetricBound> {
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    om(omega)?;
    let two_over = int(2) / eta;
    let (ka, kb) = (ceil(two_over), floor(two_over));
    if kb < 1 {
        return Err(NdError::Domain(format!("floor(2/eta) = 0 for eta = {eta}")));
    }
    let a = symmetric_latency_at(ka, eta, omega, alpha);
    let b = symmetric_latency_at(kb, eta, omega, alpha);
    let (latency, branch, k) = match (a, b) {
        (Some(a), Some(b)) if b < a => (b, Branch::B, kb),
        (Some(a), _) => (a, Branch::A, ka),
        (None, Some(b)) => (b, Branch::B, kb),
        (None, None) => return Err(NdError::Domain(format!("no admissible k for eta = {eta}"))),
    };
    Ok(SymmetricBound { latency, branch, k, gamma_o: ratio(1, k) })
}

/// `4αω/η²`.
pub fn bound_symmetric_approx(eta: Rational, omega: Ticks, alpha: Rational) -> Result<Rational> {
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    Ok(int(4) * alpha * om(omega)? / (eta * eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelBound {
    pub latency: Rational,
    /// True when the channel limit is inactive and the symmetric bound applies.
    pub unconstrained: bool,
    pub gamma_o: Rational,
}

/// Symmetric bound under a channel-utilization cap `β_m`.
pub fn bound_channel_constrained(
    eta: Rational,
    beta_m: Rational,
    omega: Ticks,
    alpha: Rational,
) -> Result<ChannelBound> {
    require_positive("beta_m", beta_m)?;
    require_positive("alpha", alpha)?;
    let spare = eta - alpha * beta_m;
    if spare <= Rational::zero() {
        return Err(NdError::Infeasible(format!(
            "eta = {eta} leaves no reception budget at alpha * beta_m = {}",
            alpha * beta_m
        )));
    }
    let sym = bound_symmetric(eta, omega, alpha)?;
    if eta <= sym.gamma_o + alpha * beta_m {
        return Ok(ChannelBound { latency: sym.latency, unconstrained: true, gamma_o: sym.gamma_o });
    }
    let k = ceil(spare.recip());
    Ok(ChannelBound { latency: int(k) * om(omega)? / beta_m, unconstrained: false, gamma_o: ratio(1, k) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DutySplit {
    pub beta: Rational,
    pub gamma: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AsymmetricBound {
    pub latency: Rational,
    /// False unless both `2/η_E` and `2/η_F` are integers; otherwise the
    /// value is not attainable exactly.
    pub tight: bool,
    pub split_e: DutySplit,
    pub split_f: DutySplit,
}

/// Two-way bound for devices with different duty cycles: `4αω/(η_E·η_F)`.
pub fn bound_asymmetric(eta_e: Rational, eta_f: Rational, omega: Ticks, alpha: Rational) -> Result<AsymmetricBound> {
    require_positive("eta_E", eta_e)?;
    require_positive("eta_F", eta_f)?;
    require_positive("alpha", alpha)?;
    let split = |eta: Rational| DutySplit { beta: eta / (int(2) * alpha), gamma: eta / int(2) };
    Ok(AsymmetricBound {
        latency: int(4) * alpha * om(omega)? / (eta_e * eta_f),
        tight: (int(2) / eta_e).is_integer() && (int(2) / eta_f).is_integer(),
        split_e: split(eta_e),
        split_f: split(eta_f),
    })
}

/// One-way discovery between two correlated devices where either
/// direction suffices: minimum over `k ∈ {⌈1/η⌉, ⌊1/η⌋}` of
/// `k²·ω·α / (η·k − 1/2)`.
pub fn bound_mutual_exclusive(eta: Rational, omega: Ticks, alpha: Rational) -> Result<Rational> {
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    let w = om(omega)?;
    let inv = eta.recip();
    let half = ratio(1, 2);
    [ceil(inv), floor(inv)]
        .into_iter()
        .filter(|&k| k >= 1 && eta * int(k) > half)
        .map(|k| int(k * k) * w * alpha / (eta * int(k) - half))
        .min()
        .ok_or_else(|| NdError::Domain(format!("floor(1/eta) = 0 for eta = {eta}")))
}

/// Probability that a beacon collides with one of `S − 1` independent
/// senders of channel utilization `β` under pure ALOHA.
pub fn collision_probability(senders: u64, beta: f64) -> Result<f64> {
    if senders == 0 {
        return Err(NdError::Domain("at least one sender is required".into()));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(NdError::Domain(format!("beta = {beta} outside [0, 1]")));
    }
    Ok(1.0 - (-2.0 * (senders - 1) as f64 * beta).exp())
}

/// Which idealizations of the unidirectional bound to drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Relaxations {
    /// Beacons must fit entirely into a window.
    pub contained: bool,
    /// The duration of the first received beacon counts towards `L`.
    pub count_first_beacon: bool,
    /// Sleep/Tx and sleep/Rx switching overheads of the radio.
    pub overheads: bool,
}

impl Relaxations {
    pub const NONE: Relaxations = Relaxations { contained: false, count_first_beacon: false, overheads: false };
    pub const ALL: Relaxations = Relaxations { contained: true, count_first_beacon: true, overheads: true };
}

/// Unidirectional bound at optimal `γ` with the selected relaxations:
/// `(ω + d_oTx + β·d_oRx + β·ω) / (β·γ) (+ ω)`, dropping the terms whose
/// relaxation is off.
pub fn bound_relaxed(gamma: Rational, beta: Rational, radio: &RadioModel, relax: Relaxations) -> Result<Rational> {
    unit_interval("gamma", gamma)?;
    unit_interval("beta", beta)?;
    let w = om(radio.omega)?;
    let mut numer = w;
    if relax.overheads {
        numer += int(radio.d_o_tx as i128) + beta * int(radio.d_o_rx as i128);
    }
    if relax.contained {
        numer += beta * w;
    }
    let mut l = numer / (beta * gamma);
    if relax.count_first_beacon {
        l += w;
    }
    Ok(l)
}

/// Slotted schedules on a full-duplex radio with `I = ω`:
/// `ω(1 + α)²/η²`.
pub fn bound_slotted_full_duplex(eta: Rational, omega: Ticks, alpha: Rational) -> Result<Rational> {
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    let one_plus = Rational::one() + alpha;
    Ok(om(omega)? * one_plus * one_plus / (eta * eta))
}

/// Slotted schedules with two beacons per active slot:
/// `ω(1/2 + 2α + 2α²)/η²`.
pub fn bound_slotted_two_beacon(eta: Rational, omega: Ticks, alpha: Rational) -> Result<Rational> {
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    let c = ratio(1, 2) + int(2) * alpha + int(2) * alpha * alpha;
    Ok(om(omega)? * c / (eta * eta))
}

/// Slotted schedules at channel utilization `β`: `ω / (ηβ − αβ²)`.
pub fn bound_slotted_channel(eta: Rational, beta: Rational, omega: Ticks, alpha: Rational) -> Result<Rational> {
    require_positive("eta", eta)?;
    require_positive("beta", beta)?;
    require_positive("alpha", alpha)?;
    let denom = eta * beta - alpha * beta * beta;
    if denom <= Rational::zero() {
        return Err(NdError::Infeasible(format!(
            "eta*beta - alpha*beta^2 = {denom} is not positive (beta >= eta/alpha)"
        )));
    }
    Ok(om(omega)? / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlottedProtocol {
    Diffcodes,
    Disco,
    SearchlightS,
    Uconnect,
}

impl SlottedProtocol {
    pub const ALL: [SlottedProtocol; 4] =
        [SlottedProtocol::Diffcodes, SlottedProtocol::Disco, SlottedProtocol::SearchlightS, SlottedProtocol::Uconnect];

    pub fn name(self) -> &'static str {
        match self {
            SlottedProtocol::Diffcodes => "diffcodes",
            SlottedProtocol::Disco => "disco",
            SlottedProtocol::SearchlightS => "searchlight_s",
            SlottedProtocol::Uconnect => "uconnect",
        }
    }
}

/// Worst-case latency of a known slotted protocol at large slot lengths,
/// as a function of `η` and `β`. U-Connect involves a square root, so all
/// rows are returned as `f64`.
pub fn slotted_protocol_latency(
    protocol: SlottedProtocol,
    eta: Rational,
    beta: Rational,
    omega: Ticks,
    alpha: Rational,
) -> Result<f64> {
    let base = bound_slotted_channel(eta, beta, omega, alpha)?;
    Ok(match protocol {
        SlottedProtocol::Diffcodes => to_f64(base),
        SlottedProtocol::Disco => to_f64(int(8) * base),
        SlottedProtocol::SearchlightS => to_f64(int(2) * base),
        SlottedProtocol::Uconnect => {
            let (w, e, b, a) = (omega as f64, to_f64(eta), to_f64(beta), to_f64(alpha));
            let root = (w * w * (8.0 * e - 8.0 * a * b + 9.0)).sqrt();
            (3.0 * w + root).powi(2) / (8.0 * w * b * e - 8.0 * w * a * b * b)
        }
    })
}

/// PI-0M latency with `T_B = d`, `T_C → (M+1)·d`:
/// `αω(M+1)² / (η(M+1) − 1)`.
pub fn pi0m_latency(m: Rational, omega: Ticks, eta: Rational, alpha: Rational) -> Result<Rational> {
    require_positive("M", m)?;
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    let k = m + Rational::one();
    let denom = eta * k - Rational::one();
    if denom <= Rational::zero() {
        return Err(NdError::Domain(format!("eta*(M+1) = {} must exceed 1", eta * k)));
    }
    Ok(alpha * om(omega)? * k * k / denom)
}

/// PI-0M worst case without the idealizations: `T_B = d`, `T_C = k·d`,
/// `η = 1/k + αω/d`, latency `(⌈(T_C − d + ω)/T_B⌉ + 1)·T_B + ω`,
/// minimized over integer `k ≥ 2`.
pub fn pi0m_relaxed_latency(eta: Rational, omega: Ticks, alpha: Rational) -> Result<Rational> {
    require_positive("eta", eta)?;
    require_positive("alpha", alpha)?;
    let w = om(omega)?;
    let k_max = ceil(int(4) / eta) + 2;
    let mut best: Option<Rational> = None;
    for k in 2..=k_max {
        let spare = eta - ratio(1, k);
        if spare <= Rational::zero() {
            continue;
        }
        let d = alpha * w / spare;
        let tc = int(k) * d;
        let l = (int(ceil((tc - d + w) / d)) + Rational::one()) * d + w;
        if best.is_none_or(|b| l < b) {
            best = Some(l);
        }
    }
    best.ok_or_else(|| NdError::Domain(format!("no admissible PI-0M parametrization for eta = {eta}")))
}

/// Root-mean-square difference between the relaxed PI-0M latency and the
/// symmetric bound over `etas`, normalized by the mean symmetric bound.
pub fn pi0m_nrmse(etas: &[Rational], omega: Ticks, alpha: Rational) -> Result<f64> {
    if etas.is_empty() {
        return Err(NdError::Domain("empty duty-cycle grid".into()));
    }
    let mut sq = 0.0;
    let mut sum = 0.0;
    for &eta in etas {
        let reference = to_f64(bound_symmetric(eta, omega, alpha)?.latency);
        let pi0m = to_f64(pi0m_relaxed_latency(eta, omega, alpha)?);
        sq += (pi0m - reference).powi(2);
        sum += reference;
    }
    let n = etas.len() as f64;
    Ok((sq / n).sqrt() / (sum / n))
}

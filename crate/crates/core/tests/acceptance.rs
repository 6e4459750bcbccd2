//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are evaluated exactly like the
//! others and reported as FAIL; they only do not abort the run. A criterion
//! on that list that starts passing aborts the run as well, so the list
//! cannot go stale silently.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndlab::bounds::{
    bound_asymmetric, bound_mutual_exclusive, bound_relaxed, bound_symmetric, bound_unidirectional,
    collision_probability, pi0m_nrmse, Relaxations,
};
use ndlab::coverage::{
    check_correlated_quadruple, worst_case_latency, worst_case_latency_endpoints, worst_case_latency_on_grid,
};
use ndlab::protocols::{
    gen_diffcode, gen_disco, gen_optimal_unidirectional, gen_optimal_unidirectional_at, gen_pi0m, DifferenceSet,
};
use ndlab::rational::{int, ratio, to_f64, Rational};
use ndlab::simulator::{
    measured_blocked_fraction, self_blocking_probability, simulate_multi, OffsetSampling, SimConfig,
};
use ndlab::{
    analyze, BeaconSchedule, CoverageMap, Exec, Latency, OracleConfig, ProtocolSpec, RadioModel, ReceptionSchedule,
    TimeBase,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The no-cost-of-asymmetry claim does not hold for the asymmetric bound;
/// see the criterion's detail line.
const EXPECTED_FAILURES: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn c1_optimal_unidirectional() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (k, inv_beta) in [(2u64, 50u64), (4, 100), (10, 200)] {
        let start = Instant::now();
        let p = gen_optimal_unidirectional(k, ratio(1, inv_beta as i128), &RadioModel::ideal(1)).unwrap();
        let report = worst_case_latency(&p, &p.receiver_only(), &OracleConfig::default()).unwrap();
        let elapsed = start.elapsed();
        // ⌈1/γ⌉·ω/β with γ = 1/k, ω = 1
        let expected = k * inv_beta;
        let ok = report.latency == Latency::Bounded(expected) && within(elapsed, 5);
        pass &= ok;
        details.push(format!("k={k} L={:?} expected={expected} t={:.2}s", report.latency, elapsed.as_secs_f64()));
    }
    outcome(pass, details.join("; "))
}

fn c2_symmetric_pi0m() -> Outcome {
    let eta = ratio(2, 100);
    let bound = bound_symmetric(eta, 1, int(1)).unwrap().latency;
    let approx = int(4) / (eta * eta);
    // η = 2/(M+1) with β = ω/d = 1/100
    let p = gen_pi0m(99, 100, &RadioModel::ideal(1)).unwrap();
    let start = Instant::now();
    let l = worst_case_latency(&p, &p.receiver_only(), &OracleConfig::default()).unwrap().latency;
    let elapsed = start.elapsed();
    let rel = l.ticks().map(|t| (t as f64 - 10_000.0).abs() / 10_000.0);
    let pass = bound == int(10_000) && approx == bound && rel.is_some_and(|r| r <= 0.01);
    outcome(
        pass,
        format!(
            "bound={bound} oracle={l:?} eta_pi0m={:.6} rel_gap={:?} t={:.2}s",
            to_f64(p.total_duty_cycle()),
            rel,
            elapsed.as_secs_f64()
        ),
    )
}

fn c3_pi0m_nrmse() -> Outcome {
    let etas: Vec<Rational> = (1..=1000).map(|i| ratio(i, 1000)).collect();
    let nrmse = pi0m_nrmse(&etas, 32, int(1)).unwrap() * 100.0;
    outcome((nrmse - 1.24).abs() <= 0.2, format!("nrmse={nrmse:.4}% target=1.24±0.2"))
}

fn deviation_range(radio: &RadioModel) -> (f64, f64) {
    // β ∈ [0.055 %, 5.55 %]; optimal γ = 1/k within the same range
    let mut betas: Vec<Rational> = (1..=100).map(|j| ratio(55 * j, 100_000)).collect();
    betas.push(ratio(555, 10_000));
    let (k_lo, k_hi) = (19i128, 1818i128);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &beta in &betas {
        for k in k_lo..=k_hi {
            let gamma = ratio(1, k);
            let li = bound_unidirectional(gamma, beta, radio.omega).unwrap();
            let lr = bound_relaxed(gamma, beta, radio, Relaxations::ALL).unwrap();
            let dev = to_f64((lr - li) / li) * 100.0;
            lo = lo.min(dev);
            hi = hi.max(dev);
        }
    }
    (lo, hi)
}

fn c4_deviation() -> Outcome {
    let (z_lo, z_hi) = deviation_range(&RadioModel::ideal(32));
    let (o_lo, o_hi) = deviation_range(&RadioModel::ideal(32).with_switching(140, 140));
    let pass =
        z_lo.abs() <= 1.0 && (z_hi - 6.0).abs() <= 1.0 && (o_lo - 438.0).abs() <= 1.0 && (o_hi - 467.0).abs() <= 1.0;
    outcome(pass, format!("no overhead [{z_lo:.3}%, {z_hi:.3}%]; 140us overhead [{o_lo:.3}%, {o_hi:.3}%]"))
}

fn c5_difference_sets() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for t in [7u64, 13] {
        let ds = DifferenceSet::builtin(t).unwrap();
        let slot = 10;
        let proto = gen_diffcode(&ds, slot, &RadioModel::ideal(1)).unwrap();
        let active: Vec<u64> = proto.spec.receptions.windows().iter().map(|w| w.start / slot).collect();
        let failures = (0..t).filter(|r| !active.iter().any(|a| active.contains(&((a + r) % t)))).count();
        let k = active.len() as u64;
        let latency =
            worst_case_latency_on_grid(&proto.spec, &proto.spec, slot, &OracleConfig::default()).unwrap().latency;
        let ok = failures == 0 && k * k >= t && latency.ticks().is_some_and(|l| l <= t * slot);
        pass &= ok;
        details.push(format!("T={t} k={k} rotation_failures={failures} oracle={latency:?}"));
    }
    outcome(pass, details.join("; "))
}

fn c6_disco() -> Outcome {
    let slot = 10;
    let d = gen_disco(3, 5, slot, &RadioModel::ideal(1)).unwrap();
    let active: Vec<u64> = d.spec.receptions.windows().iter().map(|w| w.start / slot).collect();
    // slot-level: for every rotation some slot in any 15 consecutive ones is active on both
    let slot_ok = (0..15u64).all(|r| (0..15u64).any(|j| active.contains(&j) && active.contains(&((j + r) % 15))));
    let report = worst_case_latency_on_grid(&d.spec, &d.spec, slot, &OracleConfig::default()).unwrap();
    let pass = slot_ok && report.latency.ticks().is_some_and(|l| l <= 15 * slot);
    outcome(pass, format!("slot_check={slot_ok} oracle={:?} limit={}", report.latency, 15 * slot))
}

fn c7_collisions() -> Outcome {
    let tb: u64 = 6_400_000;
    let omega: u64 = 32_000;
    let beta = omega as f64 / tb as f64;
    let tick = TimeBase::from_nanos(1).unwrap();
    let sender = ProtocolSpec::new(
        tick,
        BeaconSchedule::periodic(0, tb, 1, omega).unwrap(),
        ReceptionSchedule::single(0, 1, tb).unwrap(),
        RadioModel::ideal(omega),
    )
    .unwrap();
    let receiver = ProtocolSpec::new(
        tick,
        BeaconSchedule::silent(omega).unwrap(),
        ReceptionSchedule::single(0, tb, tb).unwrap(),
        RadioModel::ideal(omega),
    )
    .unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for s in [2usize, 5, 10] {
        let mut devices = vec![receiver.clone()];
        devices.extend(std::iter::repeat_n(sender.clone(), s));
        let cfg = SimConfig {
            devices,
            trials: 100_000,
            seed: 0x5eed_0000 + s as u64,
            horizon: 4 * tb,
            deadline: None,
            offset_sampling: OffsetSampling::UniformRandom,
            exec: Exec::Parallel,
        };
        let start = Instant::now();
        let out = simulate_multi(&cfg).unwrap();
        let elapsed = start.elapsed();
        let p = collision_probability(s as u64, beta).unwrap();
        let sigma = (p * (1.0 - p) / cfg.trials as f64).sqrt();
        let z = if sigma > 0.0 { (out.first_collision_rate - p) / sigma } else { 0.0 };
        let ok = (out.first_collision_rate - p).abs() <= 3.0 * sigma && within(elapsed, 60);
        pass &= ok;
        details.push(format!(
            "S={s} rate={:.5} eq={p:.5} z={z:.2} t={:.1}s",
            out.first_collision_rate,
            elapsed.as_secs_f64()
        ));
    }
    outcome(pass, details.join("; "))
}

fn c8_asymmetry() -> Outcome {
    // η = 2/a with 2/a + 2/b = 6/100
    let sum = ratio(6, 100);
    let mut products = Vec::new();
    for a in 1i128..=10_000 {
        let eta_e = ratio(2, a);
        let eta_f = sum - eta_e;
        if eta_f <= int(0) || !(int(2) / eta_f).is_integer() {
            continue;
        }
        let l = bound_asymmetric(eta_e, eta_f, 1, int(1)).unwrap().latency;
        products.push((a, (int(2) / eta_f).to_integer(), l * sum));
    }
    let first = products[0].2;
    let constant = products.iter().all(|p| p.2 == first);
    let lo = products.iter().map(|p| p.2).min().unwrap();
    let hi = products.iter().map(|p| p.2).max().unwrap();
    outcome(
        constant,
        format!(
            "{} grid points (2/eta_E, 2/eta_F) from {:?} to {:?}; L*(eta_E+eta_F) ranges {} .. {}",
            products.len(),
            (products[0].0, products[0].1),
            (products[products.len() - 1].0, products[products.len() - 1].1),
            to_f64(lo),
            to_f64(hi)
        ),
    )
}

fn c9_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let radio = RadioModel::ideal(1);

    let mut per_beacon_violations = 0;
    for _ in 0..1000 {
        let period = rng.random_range(2..200);
        let c = common::random_receptions(&mut rng, period, 4);
        let omega = rng.random_range(1..4);
        let count = rng.random_range(1..12);
        let b = common::random_beacons(&mut rng, count, omega, 3 * period);
        let map = CoverageMap::build(&b, &c, &RadioModel::ideal(omega)).unwrap();
        for (omega_i, &delta) in map.per_beacon().iter().zip(map.offsets()) {
            let by_tick = (0..period).filter(|&phi| common::lands(&c, phi as i64, delta)).count() as u64;
            if omega_i.measure() != c.total_listen() || by_tick != c.total_listen() {
                per_beacon_violations += 1;
            }
        }
    }

    let mut periodicity_violations = 0;
    for _ in 0..1000 {
        let period = rng.random_range(2..200);
        let c = common::random_receptions(&mut rng, period, 4);
        let count = rng.random_range(1..12);
        let b = common::random_beacons(&mut rng, count, 1, 2 * period);
        let map = CoverageMap::build(&b, &c, &radio).unwrap();
        let phi = rng.random_range(0..period);
        let k = rng.random_range(-5i64..=5);
        let reduced = map.beacon_to_beacon_latency(phi);
        let unreduced = map.beacon_to_beacon_latency_unreduced(phi as i64 + k * period as i64);
        let direct = map.offsets().iter().copied().find(|&d| common::lands(&c, phi as i64, d));
        if reduced != unreduced || reduced != direct {
            periodicity_violations += 1;
        }
    }

    let cfg = OracleConfig::default().with_exec(Exec::Sequential);
    let mut corpus = 0;
    let mut dominance_violations = 0;
    let mut attempts = 0;
    while corpus < 200 && attempts < 200_000 {
        attempts += 1;
        let tc = rng.random_range(4..60);
        let c = common::random_receptions(&mut rng, tc, 3);
        let omega = rng.random_range(1..3);
        let m = rng.random_range(1..4);
        let b = common::random_periodic_beacons(&mut rng, m, omega, 40);
        let e = common::transmitter(b);
        let f = common::receiver(c, omega);
        let full = worst_case_latency(&e, &f, &cfg).unwrap();
        let Latency::Bounded(l) = full.latency else { continue };
        corpus += 1;
        let endpoints = worst_case_latency_endpoints(&e, &f, &cfg).unwrap();
        let bound = bound_unidirectional(f.receptions.duty_cycle(), e.beacons.duty_cycle(), omega).unwrap();
        if int(l as i128) < bound || endpoints.latency != full.latency {
            dominance_violations += 1;
        }
    }

    let pass = per_beacon_violations == 0 && periodicity_violations == 0 && dominance_violations == 0 && corpus == 200;
    outcome(
        pass,
        format!(
            "per-beacon coverage violations={per_beacon_violations}/1000 schedules; periodicity violations={periodicity_violations}/1000; dominance violations={dominance_violations}/{corpus} protocols"
        ),
    )
}

fn c10_self_blocking() -> Outcome {
    let beta = ratio(1, 100);
    let zero = gen_optimal_unidirectional(4, beta, &RadioModel::ideal(32)).unwrap();
    let zero_ok = self_blocking_probability(&zero) == beta && measured_blocked_fraction(&zero).unwrap() == beta;

    let radio = RadioModel::ideal(32).with_turnarounds(140, 140);
    let analytic = self_blocking_probability(&gen_optimal_unidirectional(4, beta, &radio).unwrap());
    let mut details = vec![format!("zero-turnaround==beta: {zero_ok}"), format!("analytic={}", to_f64(analytic))];
    let mut pass = zero_ok && analytic == ratio(975, 10_000);
    // beacon at the leading edge, in the middle, and near the trailing edge of the window
    for start in [0u64, 1600, 3150] {
        let p = gen_optimal_unidirectional_at(4, beta, &radio, start).unwrap();
        let measured = measured_blocked_fraction(&p).unwrap();
        let rel = to_f64((measured - analytic) / analytic).abs();
        pass &= rel <= 0.02;
        details.push(format!("window@{start}: measured={:.5}", to_f64(measured)));
    }
    outcome(pass, details.join("; "))
}

fn c11_correlated() -> Outcome {
    // T_C = 8, unit windows, four beacons at ζ + {0,1,2,3} on each device
    let zeta = 1;
    let dev = |window: u64| {
        ProtocolSpec::new(
            TimeBase::default(),
            BeaconSchedule::new(vec![zeta, zeta + 1, zeta + 2, zeta + 3], 1, Some(8)).unwrap(),
            ReceptionSchedule::single(window, 1, 8).unwrap(),
            RadioModel::ideal(1),
        )
        .unwrap()
    };
    let (e, f) = (dev(0), dev(1));
    let q = check_correlated_quadruple(&e, &f, zeta).unwrap();
    let m = analyze(&CoverageMap::build(&f.beacons, &e.receptions, &f.radio).unwrap()).min_beacons;
    // brute force over the shift s of F's origin relative to E's
    let brute = (0..8u64).all(|s| {
        let g = [0u64, 1, 2, 3];
        g.iter().any(|&g| (s + zeta + g) % 8 == 0) || g.iter().any(|&g| (zeta + g + 8 - s) % 8 == 1)
    });
    let beacons = e.beacons.len() as u64;
    let quad_ok = q.report.deterministic && brute && 2 * beacons == m;

    let halves = (1..=200i128).all(|n| {
        let eta = ratio(1, n);
        let me = bound_mutual_exclusive(eta, 1, int(1)).unwrap();
        let sym = bound_symmetric(eta, 1, int(1)).unwrap().latency;
        int(2) * me == sym
    });
    outcome(
        quad_ok && halves,
        format!(
            "deterministic={} brute_force={brute} beacons/device={beacons} M={m} redundant={}; mutual-exclusive = symmetric/2 at 1/eta=1..200: {halves}",
            q.report.deterministic, q.report.redundant
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "oracle equals unidirectional bound", c1_optimal_unidirectional),
        (2, "symmetric optimum and PI-0M oracle", c2_symmetric_pi0m),
        (3, "PI-0M normalized RMSE", c3_pi0m_nrmse),
        (4, "relaxed-bound deviation ranges", c4_deviation),
        (5, "difference-set rotations", c5_difference_sets),
        (6, "Disco worst case", c6_disco),
        (7, "first-beacon collision rate", c7_collisions),
        (8, "asymmetry has no cost", c8_asymmetry),
        (9, "coverage property suites", c9_properties),
        (10, "self-blocking fraction", c10_self_blocking),
        (11, "correlated quadruple and mutual-exclusive bound", c11_correlated),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, expected_fail) {
            (false, true) => " (known failure)",
            (true, true) => " (expected to fail)",
            _ => "",
        };
        println!("criterion {id:>2} {verdict}{note}: {name} [{:.2}s] {}", start.elapsed().as_secs_f64(), o.detail);
        if o.pass == expected_fail {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

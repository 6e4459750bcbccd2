mod common;

use common::{
    lands, naive_latency_at, naive_worst_case, random_periodic_beacons, random_receptions, receiver, spec, transmitter,
};
use ndlab::bounds::bound_coverage;
use ndlab::coverage::{worst_case_latency, worst_case_latency_endpoints, worst_case_latency_on_grid};
use ndlab::{
    analyze, min_beacons, BeaconSchedule, CoverageMap, Exec, Latency, OracleConfig, RadioModel, ReceptionSchedule,
    ReceptionWindow, Semantics, Ticks,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn per_beacon_sets_match_tick_replay(seed in any::<u64>(), period in 4u64..60, count in 1usize..8) {
        let mut r = rng(seed);
        let c = random_receptions(&mut r, period, 4);
        let b = common::random_beacons(&mut r, count, 1, 2 * period);
        let map = CoverageMap::build(&b, &c, &RadioModel::ideal(1)).unwrap();
        for (i, omega_i) in map.per_beacon().iter().enumerate() {
            let delta = map.offsets()[i];
            for phi in 0..period {
                prop_assert_eq!(omega_i.contains(phi), lands(&c, phi as i64, delta));
            }
            prop_assert_eq!(omega_i.measure(), c.total_listen());
        }
    }

    #[test]
    fn reduced_latency_equals_unreduced(seed in any::<u64>(), period in 4u64..40, count in 1usize..8) {
        let mut r = rng(seed);
        let c = random_receptions(&mut r, period, 3);
        let b = common::random_beacons(&mut r, count, 1, 3 * period);
        let map = CoverageMap::build(&b, &c, &RadioModel::ideal(1)).unwrap();
        for phi in -(3 * period as i64)..(3 * period as i64) {
            let reduced = map.beacon_to_beacon_latency(phi.rem_euclid(period as i64) as Ticks);
            prop_assert_eq!(reduced, map.beacon_to_beacon_latency_unreduced(phi));
        }
    }

    #[test]
    fn oracle_paths_agree_with_naive_replay(
        seed in any::<u64>(),
        tc in 3u64..24,
        count in 1usize..4,
    ) {
        let mut r = rng(seed);
        let e = transmitter(random_periodic_beacons(&mut r, count, 1, 9));
        let f = receiver(random_receptions(&mut r, tc, 3), 1);
        let cfg = OracleConfig::default();
        let full = worst_case_latency(&e, &f, &cfg).unwrap();
        let ends = worst_case_latency_endpoints(&e, &f, &cfg).unwrap();
        prop_assert_eq!(full.latency, naive_worst_case(&e, &f));
        prop_assert_eq!(full.latency, ends.latency);
        // the two paths may report different witnesses; both must replay
        if full.latency != Latency::Unbounded {
            prop_assert_eq!(naive_latency_at(&e, &f, full.phase, full.in_range), full.latency);
            prop_assert_eq!(naive_latency_at(&e, &f, ends.phase, ends.in_range), ends.latency);
        }
    }

    #[test]
    fn determinism_iff_bounded(seed in any::<u64>(), tc in 3u64..40, count in 1usize..6) {
        let mut r = rng(seed);
        let e = transmitter(random_periodic_beacons(&mut r, count, 1, 12));
        let f = receiver(random_receptions(&mut r, tc, 3), 1);
        let report = analyze(&CoverageMap::for_protocols(&e, &f).unwrap());
        let oracle = worst_case_latency_endpoints(&e, &f, &OracleConfig::default()).unwrap();
        prop_assert_eq!(report.deterministic, oracle.latency != Latency::Unbounded);
        prop_assert_eq!(report.deterministic, report.uncovered.is_empty());
    }

    #[test]
    fn coverage_bound_dominates_every_deterministic_pair(
        seed in any::<u64>(),
        tc in 3u64..40,
        count in 1usize..6,
    ) {
        let mut r = rng(seed);
        let b = random_periodic_beacons(&mut r, count, 1, 12);
        let beta = b.duty_cycle();
        let e = transmitter(b);
        let c = random_receptions(&mut r, tc, 3);
        let listen = c.total_listen();
        let f = receiver(c, 1);
        if let Latency::Bounded(l) = worst_case_latency_endpoints(&e, &f, &OracleConfig::default()).unwrap().latency {
            let bound = bound_coverage(tc, listen, beta, 1).unwrap();
            prop_assert!(ndlab::rational::int(l as i128) >= bound, "L = {l} < bound {bound}");
        }
    }

    #[test]
    fn coverage_scales_with_ticks(seed in any::<u64>(), tc in 3u64..20, count in 1usize..5, scale in 2u64..5) {
        // refining the tick grid by an integer factor scales L exactly
        let mut r = rng(seed);
        let b = random_periodic_beacons(&mut r, count, 1, 8);
        let c = random_receptions(&mut r, tc, 3);
        let scaled_b = BeaconSchedule::new(
            b.times().iter().map(|t| t * scale).collect(),
            scale,
            b.period().map(|p| p * scale),
        ).unwrap();
        let scaled_c = ReceptionSchedule::new(
            c.windows().iter().map(|w| ReceptionWindow::new(w.start * scale, w.duration * scale)).collect(),
            tc * scale,
            true,
        ).unwrap();
        let cfg = OracleConfig::default();
        let base = worst_case_latency_endpoints(&transmitter(b), &receiver(c, 1), &cfg).unwrap().latency;
        let fine = worst_case_latency_endpoints(&transmitter(scaled_b), &receiver(scaled_c, scale), &cfg)
            .unwrap()
            .latency;
        match base {
            Latency::Bounded(l) => {
                // on the fine grid the worst in-range instant can fall up to
                // scale-1 ticks earlier
                let fine = fine.ticks().expect("still deterministic");
                prop_assert!(fine >= l * scale && fine < (l + 1) * scale, "{l} vs {fine}");
            }
            Latency::Unbounded => prop_assert_eq!(fine, Latency::Unbounded),
        }
    }
}

#[test]
fn contained_window_shrinks_by_omega() {
    let c = ReceptionSchedule::single(2, 3, 10).unwrap();
    let radio = RadioModel::ideal(1).with_semantics(Semantics::Contained);
    let b = BeaconSchedule::new(vec![0], 1, None).unwrap();
    let map = CoverageMap::build(&b, &c, &radio).unwrap();
    assert_eq!(map.per_beacon()[0].spans(), &[(2, 4)]);
}

#[test]
fn redundant_cover_with_lambda_fourteen() {
    // two unit windows half a period apart and seven consecutive beacons:
    // every offset is covered, some twice
    let c = ReceptionSchedule::new(vec![ReceptionWindow::new(0, 1), ReceptionWindow::new(4, 1)], 8, true).unwrap();
    let b = BeaconSchedule::new((0..7).collect(), 1, None).unwrap();
    let radio = RadioModel::ideal(1);
    let report = analyze(&CoverageMap::build(&b, &c, &radio).unwrap());
    assert!(report.deterministic);
    assert!(report.redundant);
    assert_eq!(report.coverage_lambda, 14);
    assert_eq!(report.min_beacons, 4);
    assert_eq!(min_beacons(&c, &radio).unwrap(), 4);
    // four beacons suffice and are disjoint
    let four = BeaconSchedule::new((0..4).collect(), 1, None).unwrap();
    let report = analyze(&CoverageMap::build(&four, &c, &radio).unwrap());
    assert!(report.deterministic && !report.redundant);
    assert_eq!(report.coverage_lambda, 8);
}

#[test]
fn one_shot_pattern_does_not_wrap() {
    let c = ReceptionSchedule::new(vec![ReceptionWindow::new(3, 4)], 20, false).unwrap();
    let b = BeaconSchedule::new(vec![0, 5], 1, None).unwrap();
    let map = CoverageMap::build(&b, &c, &RadioModel::ideal(1)).unwrap();
    assert_eq!(map.per_beacon()[0].spans(), &[(3, 7)]);
    assert_eq!(map.per_beacon()[1].spans(), &[(0, 2)]);
    assert_eq!(map.beacon_to_beacon_latency(1), Some(5));
    assert_eq!(map.beacon_to_beacon_latency(8), None);
}

#[test]
fn grid_sweep_is_bounded_by_full_sweep() {
    let e = spec(BeaconSchedule::new(vec![0, 7], 1, Some(19)).unwrap(), ReceptionSchedule::single(0, 1, 19).unwrap());
    let f = receiver(ReceptionSchedule::single(3, 5, 24).unwrap(), 1);
    let cfg = OracleConfig::default().with_exec(Exec::Sequential);
    let full = worst_case_latency(&e, &f, &cfg).unwrap();
    for step in [1, 2, 3, 4, 6] {
        let grid = worst_case_latency_on_grid(&e, &f, step, &cfg).unwrap();
        assert!(grid.latency <= full.latency);
        assert_eq!(grid.phase % step, 0);
    }
    assert_eq!(worst_case_latency_on_grid(&e, &f, 1, &cfg).unwrap(), full);
}

#[test]
fn csv_lists_every_interval() {
    let c = ReceptionSchedule::single(0, 3, 10).unwrap();
    let b = BeaconSchedule::new(vec![0, 8], 1, None).unwrap();
    let map = CoverageMap::build(&b, &c, &RadioModel::ideal(1)).unwrap();
    let mut out = Vec::new();
    map.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text, "beacon_index,interval_start,interval_end\n1,0,3\n2,2,5\n");
}

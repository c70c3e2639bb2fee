mod common;

use proptest::prelude::*;
use rand::Rng;

use resource_engine::athermality::{
    check_upper_bound, qubit_reachable_set, simulate, top_ratio, EngineParams, Start,
};
use resource_engine::hull::hull_distance;
use resource_engine::thermo::EnergyLevels;

fn random_params<R: Rng>(rng: &mut R, d: usize) -> EngineParams {
    let levels = common::random_levels(rng, d);
    let alpha = rng.random_range(0.2..2.5);
    let beta = rng.random_range(0.0..alpha * 0.9);
    EngineParams::new(levels, alpha, beta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reachable_sets_grow(seed in any::<u64>(), d in 2usize..=3, n in 2usize..=8) {
        let mut r = common::rng(seed);
        let params = random_params(&mut r, d);
        let start = Start::Custom(common::random_pv(&mut r, d));
        let sets = simulate(&params, &start, n, 0.0).unwrap();
        for w in sets.windows(2) {
            let outer = common::refs(&w[1].vertices);
            for v in &w[0].vertices {
                let dist = hull_distance(&outer, v.as_slice());
                prop_assert!(dist <= 1e-9, "stroke {} vertex outside next hull by {:e}", w[0].stroke_index, dist);
            }
        }
    }

    #[test]
    fn top_weight_never_exceeds_bound(seed in any::<u64>(), d in 2usize..=4, n in 2usize..=8) {
        let mut r = common::rng(seed);
        let params = random_params(&mut r, d);
        let p = common::random_pv(&mut r, d);
        let bound = p[d - 1].max(top_ratio(&params)) + 1e-10;
        let sets = simulate(&params, &Start::Custom(p), n, 0.0).unwrap();
        for s in &sets {
            for v in &s.vertices {
                prop_assert!(v[d - 1] <= bound, "top weight {} above {}", v[d - 1], bound);
            }
        }
    }

    #[test]
    fn qubit_simulation_matches_closed_form(seed in any::<u64>(), n in 1usize..=14) {
        let mut r = common::rng(seed);
        let params = random_params(&mut r, 2);
        let e = params.levels().values();
        prop_assume!(params.alpha() - params.beta() > 1e-3 && e[1] - e[0] > 1e-3);
        let p = common::random_pv(&mut r, 2);
        let sets = simulate(&params, &Start::Custom(p.clone()), n, 0.0).unwrap();
        let last = sets.last().unwrap();
        let exact = qubit_reachable_set(&p, &params, Some(n - 1)).unwrap();
        let hi = last.vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        let lo = last.vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        prop_assert!((hi - exact.upper[0]).abs() < 1e-10, "upper {} vs {}", hi, exact.upper[0]);
        prop_assert!((lo - exact.lower[0]).abs() < 1e-10, "lower {} vs {}", lo, exact.lower[0]);
    }
}

#[test]
fn cold_start_respects_bound_at_equal_spacing() {
    let params = EngineParams::new(
        EnergyLevels::new(vec![1.0, 2.0, 3.0]).unwrap(),
        1.0 / 3.0,
        0.2,
    )
    .unwrap();
    let sets = simulate(&params, &Start::FromCold, 20, 1e-8).unwrap();
    assert!(sets.iter().all(|s| check_upper_bound(s, &params)));
}

#[test]
fn equal_temperatures_are_trivial() {
    let params = EngineParams::new(EnergyLevels::ladder(3).unwrap(), 0.7, 0.7).unwrap();
    let sets = simulate(&params, &Start::FromCold, 6, 0.0).unwrap();
    for s in &sets {
        assert_eq!(s.vertices.len(), 1);
        assert!(s.vertices[0].max_abs_diff(params.cold()) < 1e-12);
    }
}

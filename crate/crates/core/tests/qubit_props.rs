mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::FRAC_PI_2;

use resource_engine::coherence::UnitaryMatrix;
use resource_engine::qubit::{
    bloch_vector, constructive_stroke_bound, fidelity, max_mutual_qubit, plan_error,
    state_from_bloch, state_stroke_bound, synthesize_state, synthesize_unitary,
};

fn random_state<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    let u = UnitaryMatrix::haar_random(2, rng);
    [u.matrix()[(0, 0)], u.matrix()[(1, 0)]]
}

fn unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    bloch_vector(random_state(rng))
}

fn polar(psi: [Complex64; 2]) -> f64 {
    bloch_vector(psi)[2].clamp(-1.0, 1.0).acos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn plans_reproduce_targets(seed in any::<u64>(), alpha in 0.05f64..=FRAC_PI_2) {
        let mut r = common::rng(seed);
        let v = UnitaryMatrix::haar_random(2, &mut r);
        let plan = synthesize_unitary(&v, alpha).unwrap();
        prop_assert!(plan.len() <= constructive_stroke_bound(alpha));
        prop_assert!(plan.is_alternating());
        prop_assert!(plan_error(&plan, &v) < 1e-9);
    }

    #[test]
    fn tilted_strokes_move_the_pole_at_most_twice_the_tilt(seed in any::<u64>(), alpha in 0.05f64..=FRAC_PI_2) {
        let mut r = common::rng(seed);
        let v = UnitaryMatrix::haar_random(2, &mut r);
        let plan = synthesize_unitary(&v, alpha).unwrap();
        for rot in plan.rotations.iter().filter(|x| !x.is_z()) {
            // image of the z pole
            let m = rot.matrix();
            let out = [m[(0, 0)], m[(1, 0)]];
            prop_assert!(polar(out) <= 2.0 * alpha + 1e-9);
        }
    }

    #[test]
    fn states_reach_targets(seed in any::<u64>(), alpha in 0.05f64..=FRAC_PI_2) {
        let mut r = common::rng(seed);
        let target = random_state(&mut r);
        let s = synthesize_state(target, alpha).unwrap();
        prop_assert!(s.plan.len() <= state_stroke_bound(alpha));
        prop_assert!(s.plan.is_alternating());
        prop_assert!(fidelity(s.final_state(), target) >= 1.0 - 1e-12);
    }

    #[test]
    fn max_mutual_state_is_unbiased(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let m = unit(&mut r);
        let n = unit(&mut r);
        let b = max_mutual_qubit(m, n).unwrap();
        let psi = state_from_bloch(b);
        for axis in [m, n] {
            for sign in [1.0, -1.0] {
                let e = state_from_bloch(axis.map(|x| sign * x));
                prop_assert!((fidelity(e, psi) - 0.5).abs() < 1e-12);
            }
        }
    }
}

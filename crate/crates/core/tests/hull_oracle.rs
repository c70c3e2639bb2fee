// Cross-checks hull_distance against an independent LP solver.
mod common;

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, SolveOutcome};
use rand::Rng;

use resource_engine::athermality::{simulate, EngineParams, Start};
use resource_engine::hull::hull_distance;
use resource_engine::thermo::{extremal_achievable, EnergyLevels, ProbabilityVector};

fn oracle(vs: &[&[f64]], x: &[f64]) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let free = (0.0, f64::INFINITY);
    let lambda: Vec<_> = vs.iter().map(|_| lp.add_var(0.0, free)).collect();
    for i in 0..x.len() {
        let mut row = LinearExpr::empty();
        for (k, v) in vs.iter().enumerate() {
            row.add(lambda[k], v[i]);
        }
        row.add(lp.add_var(1.0, free), 1.0);
        row.add(lp.add_var(1.0, free), -1.0);
        lp.add_constraint(row, ComparisonOp::Eq, x[i]);
    }
    let mut sum = LinearExpr::empty();
    for &l in &lambda {
        sum.add(l, 1.0);
    }
    lp.add_constraint(sum, ComparisonOp::Eq, 1.0);
    match lp.solve().unwrap() {
        SolveOutcome::Solution(s) => s.objective(),
        _ => panic!("oracle interrupted"),
    }
}

fn agree(points: &[ProbabilityVector], label: &str) {
    for i in 0..points.len() {
        let others: Vec<&[f64]> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.as_slice())
            .collect();
        let x = points[i].as_slice();
        let ours = hull_distance(&others, x);
        let theirs = oracle(&others, x);
        assert!(
            (ours - theirs).abs() < 1e-8 || (ours > 1e-9) == (theirs > 1e-9),
            "{label} point {i}: ours {ours:e}, oracle {theirs:e}"
        );
        // our value comes from explicit weights, so it never undercuts
        assert!(
            ours >= theirs - 1e-9,
            "{label} point {i}: {ours:e} < {theirs:e}"
        );
    }
}

#[test]
fn random_clouds() {
    let mut r = common::rng(41);
    for case in 0..60 {
        let d = r.random_range(2..=5);
        let n = r.random_range(2..30);
        let pts: Vec<_> = (0..n).map(|_| common::random_pv(&mut r, d)).collect();
        agree(&pts, &format!("cloud {case}"));
    }
}

#[test]
fn tiny_coordinates() {
    let mut r = common::rng(42);
    for case in 0..40 {
        let d = r.random_range(3..=5);
        let pts: Vec<_> = (0..d + 3)
            .map(|_| {
                let k = r.random_range(0..d);
                let mut v: Vec<f64> = (0..d).map(|_| r.random_range(0.0..1e-10)).collect();
                v[k] = 0.0;
                let rest: f64 = v.iter().sum();
                v[k] = 1.0 - rest;
                ProbabilityVector::new(v).unwrap()
            })
            .collect();
        agree(&pts, &format!("corners {case}"));
    }
}

#[test]
fn engine_expansion() {
    let p = EngineParams::new(
        EnergyLevels::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
        1.0,
        0.25,
    )
    .unwrap();
    let sets = simulate(&p, &Start::FromCold, 6, 0.0).unwrap();
    let last = &sets.last().unwrap().vertices;
    let g = if sets.len() % 2 == 0 {
        p.hot()
    } else {
        p.cold()
    };
    let raw: Vec<ProbabilityVector> = last
        .iter()
        .flat_map(|v| extremal_achievable(v, g).unwrap())
        .collect();
    agree(&raw[..raw.len().min(300)], "stroke 7");
}

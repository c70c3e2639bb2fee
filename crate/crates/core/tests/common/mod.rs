// Shared generators and checks for the integration tests.
#![allow(dead_code)]

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use resource_engine::coherence::{CMatrix, UnitaryMatrix};
use resource_engine::hull::{hull_distance, prune};
use resource_engine::thermo::{
    apply_two_level_block, bar_state, extremal_achievable, gibbs_state, thermalise_subset,
    thermomajorises, EnergyLevels, InverseTemperature, ProbabilityVector,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    resource_engine::rng::rng_for(seed, &[])
}

/// Uniform on the simplex, with a chance of zeroing some entries so that
/// boundary cases show up.
pub fn random_pv<R: Rng>(rng: &mut R, d: usize) -> ProbabilityVector {
    let mut v: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    if rng.random_bool(0.2) {
        let k = rng.random_range(0..d);
        v[k] = 0.0;
    }
    let s: f64 = v.iter().sum();
    if s == 0.0 {
        return ProbabilityVector::basis(d, 0);
    }
    ProbabilityVector::new(v.iter().map(|x| x / s).collect()).unwrap()
}

/// Ascending energies in `[0, 3)`, sometimes degenerate.
pub fn random_levels<R: Rng>(rng: &mut R, d: usize) -> EnergyLevels {
    let mut e: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..3.0)).collect();
    if rng.random_bool(0.1) && d > 1 {
        e[1] = e[0];
    }
    e.sort_by(f64::total_cmp);
    EnergyLevels::new(e).unwrap()
}

pub fn random_gibbs<R: Rng>(rng: &mut R, d: usize) -> ProbabilityVector {
    let levels = random_levels(rng, d);
    let beta = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.0..2.0)
    };
    gibbs_state(&levels, InverseTemperature::new(beta).unwrap())
}

/// A random composition of two-level Gibbs-preserving blocks and partial
/// thermalisations. `g` must be non-increasing.
pub fn random_channel_image<R: Rng>(
    rng: &mut R,
    p: &ProbabilityVector,
    g: &ProbabilityVector,
) -> ProbabilityVector {
    let d = p.dim();
    let mut q = p.clone();
    for _ in 0..rng.random_range(1..6) {
        if d >= 2 && rng.random_bool(0.7) {
            let pair = sample(rng, d, 2);
            let (i, j) = (
                pair.index(0).min(pair.index(1)),
                pair.index(0).max(pair.index(1)),
            );
            let t = rng.random_range(0.0..=1.0);
            q = apply_two_level_block(&q, g, i, j, t).unwrap();
        } else {
            let k = rng.random_range(1..=d);
            let subset: Vec<usize> = sample(rng, d, k).into_vec();
            q = thermalise_subset(&q, g, &subset).unwrap();
        }
    }
    q
}

/// Convex mixture of a few channel images, which is again a Gibbs-stochastic
/// image of `p`.
pub fn random_gibbs_stochastic_image<R: Rng>(
    rng: &mut R,
    p: &ProbabilityVector,
    g: &ProbabilityVector,
) -> ProbabilityVector {
    let k = rng.random_range(1..4);
    let w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    let mut acc = vec![0.0; p.dim()];
    for wi in w {
        let img = random_channel_image(rng, p, g);
        for (a, b) in acc.iter_mut().zip(img.as_slice()) {
            *a += wi / total * b;
        }
    }
    ProbabilityVector::new(acc).unwrap()
}

/// `P1 * blockdiag(Haar blocks) * P2`, so that the zero pattern is non-trivial.
pub fn sparse_unitary<R: Rng>(rng: &mut R, d: usize) -> UnitaryMatrix {
    let mut m = CMatrix::zeros(d, d);
    let mut at = 0;
    while at < d {
        let k = rng.random_range(1..=(d - at).min(3));
        let b = UnitaryMatrix::haar_random(k, rng);
        m.view_mut((at, at), (k, k)).copy_from(b.matrix());
        at += k;
    }
    let mut p1: Vec<usize> = (0..d).collect();
    let mut p2: Vec<usize> = (0..d).collect();
    p1.shuffle(rng);
    p2.shuffle(rng);
    let a = UnitaryMatrix::permutation(&p1).unwrap();
    let c = UnitaryMatrix::permutation(&p2).unwrap();
    let u = UnitaryMatrix::new(a.matrix() * m * c.matrix()).unwrap();
    if rng.random_bool(0.5) {
        // products of two sparse factors give richer patterns
        let v = sparse_unitary_once(rng, d);
        return u.mul(&v);
    }
    u
}

fn sparse_unitary_once<R: Rng>(rng: &mut R, d: usize) -> UnitaryMatrix {
    let mut m = CMatrix::zeros(d, d);
    let mut at = 0;
    while at < d {
        let k = rng.random_range(1..=(d - at).min(2));
        let b = UnitaryMatrix::haar_random(k, rng);
        m.view_mut((at, at), (k, k)).copy_from(b.matrix());
        at += k;
    }
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    UnitaryMatrix::new(UnitaryMatrix::permutation(&p).unwrap().matrix() * m).unwrap()
}

pub fn refs(points: &[ProbabilityVector]) -> Vec<&[f64]> {
    points.iter().map(|p| p.as_slice()).collect()
}

// Each check draws one instance from `seed` and reports what went wrong.

pub fn check_reflexive(seed: u64, d: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_gibbs(&mut r, d);
    let p = random_pv(&mut r, d);
    if !thermomajorises(&p, &p, &g).unwrap() {
        return Err(format!("p = {:?} does not dominate itself", p.as_slice()));
    }
    Ok(())
}

pub fn check_gibbs_minimal(seed: u64, d: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_gibbs(&mut r, d);
    let p = random_pv(&mut r, d);
    if !thermomajorises(&p, &g, &g).unwrap() {
        return Err(format!(
            "p = {:?} does not dominate g = {:?}",
            p.as_slice(),
            g.as_slice()
        ));
    }
    Ok(())
}

pub fn check_transitive(seed: u64, d: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_gibbs(&mut r, d);
    let p = random_pv(&mut r, d);
    let q = random_gibbs_stochastic_image(&mut r, &p, &g);
    let s = random_gibbs_stochastic_image(&mut r, &q, &g);
    let pq = thermomajorises(&p, &q, &g).unwrap();
    let qs = thermomajorises(&q, &s, &g).unwrap();
    if !(pq && qs) {
        return Err(format!("channel image not dominated (p>q {pq}, q>s {qs})"));
    }
    if !thermomajorises(&p, &s, &g).unwrap() {
        return Err("p > q and q > s but not p > s".into());
    }
    // unrelated triples: the implication must still hold
    let a = random_pv(&mut r, d);
    let b = random_pv(&mut r, d);
    let c = random_pv(&mut r, d);
    if thermomajorises(&a, &b, &g).unwrap()
        && thermomajorises(&b, &c, &g).unwrap()
        && !thermomajorises(&a, &c, &g).unwrap()
    {
        return Err("transitivity fails on a random triple".into());
    }
    Ok(())
}

pub fn check_bar_state(seed: u64, d: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_gibbs(&mut r, d);
    let p = random_pv(&mut r, d);
    let q = random_gibbs_stochastic_image(&mut r, &p, &g);
    if !thermomajorises(&bar_state(&p), &q, &g).unwrap() {
        return Err(format!(
            "bar state of {:?} misses {:?}",
            p.as_slice(),
            q.as_slice()
        ));
    }
    Ok(())
}

/// Every one of `images` random images of a random `p` lies in the hull of
/// the extremal points.
pub fn check_extremal_hull(seed: u64, d: usize, images: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_gibbs(&mut r, d);
    let p = random_pv(&mut r, d);
    let ext = extremal_achievable(&p, &g).unwrap();
    for e in &ext {
        if !thermomajorises(&p, e, &g).unwrap() {
            return Err(format!("extremal point {:?} not dominated", e.as_slice()));
        }
    }
    let ext = prune(&ext);
    let vs = refs(&ext);
    for k in 0..images {
        let q = random_gibbs_stochastic_image(&mut r, &p, &g);
        let dist = hull_distance(&vs, q.as_slice());
        if dist > 1e-9 {
            return Err(format!("image {k} at L1 distance {dist:e} from the hull"));
        }
    }
    Ok(())
}

/// Pruning keeps every input within tolerance of the output hull, keeps every
/// certified vertex and is idempotent.
pub fn check_prune(seed: u64, d: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let g = random_gibbs(&mut r, d);
    let mut pts = Vec::new();
    for _ in 0..r.random_range(1..4) {
        let p = random_pv(&mut r, d);
        pts.extend(extremal_achievable(&p, &g).unwrap());
        for _ in 0..5 {
            pts.push(random_gibbs_stochastic_image(&mut r, &p, &g));
        }
    }
    let once = prune(&pts);
    let twice = prune(&once);
    if once != twice {
        return Err(format!(
            "{} points after one pass, {} after two",
            once.len(),
            twice.len()
        ));
    }
    let kept = refs(&once);
    for p in &pts {
        let dist = hull_distance(&kept, p.as_slice());
        if dist > 1e-8 {
            return Err(format!(
                "input point at distance {dist:e} from the pruned hull"
            ));
        }
    }
    for (i, p) in once.iter().enumerate() {
        let others: Vec<&[f64]> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| *v)
            .collect();
        if !others.is_empty() && hull_distance(&others, p.as_slice()) <= 1e-9 {
            return Err("a kept point is redundant".into());
        }
    }
    Ok(())
}

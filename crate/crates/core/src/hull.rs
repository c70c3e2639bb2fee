//! Convex-hull membership and redundancy removal.
//!
//! Membership is decided by a small linear program in barycentric
//! coordinates: find convex weights `lambda` minimising the L1 distance
//! `|V lambda - x|_1`. The optimum is zero iff `x` lies in the hull.

use rand::Rng;
use rayon::prelude::*;

use crate::rng::rng_for;
use crate::thermo::ProbabilityVector;
use crate::tol::{TOL_DUP, TOL_LP};

/// Penalty on the artificial variable of the weight-sum row. Each unit of
/// weight moves `V lambda` by at most 1 in L1, so any value above 1 drives the
/// artificial to zero at the optimum.
const SUM_PENALTY: f64 = 4.0;
// Reduced costs above -COST_EPS count as optimal. Entries below PIVOT_EPS are
// never pivoted on, and basic values may dip to -FEAS_EPS in the ratio test.
const COST_EPS: f64 = 1e-12;
const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-12;
// Smallest pivot accepted for a degenerate Bland step.
const BLAND_PIVOT: f64 = 1e-9;

/// Dense tableau for `min c.x` s.t. `A x = b`, `x >= 0`, started from a
/// feasible basis. Bland's rule picks the entering column; the leaving row
/// comes from a two-pass (Harris) ratio test that prefers large pivots.
struct Tableau {
    rows: usize,
    cols: usize,
    // rows x (cols + 1); last column is the right-hand side
    a: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let piv = self.a[pr * w + pc];
        for c in 0..w {
            self.a[pr * w + c] /= piv;
        }
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.a[r * w + c] -= f * self.a[pr * w + c];
                }
            }
        }
        self.basis[pr] = pc;
        for r in 0..self.rows {
            let v = &mut self.a[r * w + self.cols];
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }

    fn reduced_cost(&self, c: usize) -> f64 {
        let mut z = self.cost[c];
        for r in 0..self.rows {
            z -= self.cost[self.basis[r]] * self.at(r, c);
        }
        z
    }

    fn solve(&mut self) {
        let max_iter = 50 * (self.rows + self.cols);
        for _ in 0..max_iter {
            // Bland's rule, skipping columns with nothing safe to pivot on
            let pivotable = |c: usize| (0..self.rows).any(|r| self.at(r, c) > PIVOT_EPS);
            let Some(enter) = (0..self.cols)
                .filter(|c| !self.basis.contains(c))
                .find(|&c| self.reduced_cost(c) < -COST_EPS && pivotable(c))
            else {
                return;
            };
            // pass 1: largest step keeping every basic value above -FEAS_EPS
            let mut step = f64::INFINITY;
            for r in 0..self.rows {
                let coef = self.at(r, enter);
                if coef > PIVOT_EPS {
                    step = step.min((self.rhs(r).max(0.0) + FEAS_EPS) / coef);
                }
            }
            // pass 2: among rows blocking within that step, the largest pivot.
            // A zero step (degenerate pivot) falls back to Bland's choice, the
            // smallest basic index, which is what rules out cycling.
            let blocking: Vec<usize> = (0..self.rows)
                .filter(|&r| {
                    let coef = self.at(r, enter);
                    coef > PIVOT_EPS && self.rhs(r).max(0.0) / coef <= step
                })
                .collect();
            let degenerate: Vec<usize> = blocking
                .iter()
                .copied()
                .filter(|&r| self.rhs(r) <= 0.0 && self.at(r, enter) > BLAND_PIVOT)
                .collect();
            let leave = if let Some(&r) = degenerate.iter().min_by_key(|&&r| self.basis[r]) {
                r
            } else {
                *blocking
                    .iter()
                    .max_by(|&&a, &&b| self.at(a, enter).total_cmp(&self.at(b, enter)))
                    .unwrap()
            };
            self.pivot(leave, enter);
        }
    }
}

/// L1 distance from `x` to the convex hull of `vertices`.
///
/// Returns `f64::INFINITY` for an empty vertex list.
pub fn hull_distance(vertices: &[&[f64]], x: &[f64]) -> f64 {
    let n = vertices.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let d = x.len();
    // columns: lambda (n) | s+ (d) | s- (d) | artificial (1)
    let cols = n + 2 * d + 1;
    let rows = d + 1;
    let w = cols + 1;
    let mut a = vec![0.0; rows * w];
    let mut basis = vec![0; rows];
    for i in 0..d {
        let sign = if x[i] < 0.0 { -1.0 } else { 1.0 };
        for (k, v) in vertices.iter().enumerate() {
            a[i * w + k] = sign * v[i];
        }
        a[i * w + n + i] = sign;
        a[i * w + n + d + i] = -sign;
        a[i * w + cols] = sign * x[i];
        basis[i] = if sign > 0.0 { n + i } else { n + d + i };
    }
    for k in 0..n {
        a[d * w + k] = 1.0;
    }
    a[d * w + cols - 1] = 1.0;
    a[d * w + cols] = 1.0;
    basis[d] = cols - 1;

    let mut cost = vec![0.0; cols];
    cost[n..n + 2 * d].iter_mut().for_each(|c| *c = 1.0);
    cost[cols - 1] = SUM_PENALTY;

    let mut t = Tableau {
        rows,
        cols,
        a,
        cost,
        basis,
    };
    t.solve();
    // Read the weights back and measure the residual directly. The value is
    // attained by a genuine convex combination, so rounding in the tableau can
    // only overstate the distance.
    let mut lambda = vec![0.0; n];
    for r in 0..rows {
        if t.basis[r] < n {
            lambda[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let total: f64 = lambda.iter().sum();
    if total <= 0.0 {
        return f64::INFINITY;
    }
    (0..d)
        .map(|i| {
            let y: f64 = vertices.iter().zip(&lambda).map(|(v, l)| v[i] * l).sum();
            (y / total - x[i]).abs()
        })
        .sum()
}

pub fn in_hull(vertices: &[&[f64]], x: &[f64], tol: f64) -> bool {
    hull_distance(vertices, x) <= tol
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Sorts lexicographically and drops points within [`TOL_DUP`] (max norm) of
/// an earlier kept point.
pub fn canonical_dedup(mut points: Vec<ProbabilityVector>) -> Vec<ProbabilityVector> {
    points.sort_by(|a, b| lex_cmp(a.as_slice(), b.as_slice()));
    let mut kept: Vec<ProbabilityVector> = Vec::with_capacity(points.len());
    for p in points {
        let x0 = p[0];
        // kept is sorted by first coordinate, so only a short tail can match
        let dup = kept
            .iter()
            .rev()
            .take_while(|q| x0 - q[0] <= TOL_DUP)
            .any(|q| max_abs_diff(q.as_slice(), p.as_slice()) < TOL_DUP);
        if !dup {
            kept.push(p);
        }
    }
    kept
}

/// Indices of points that are the unique maximiser of some linear functional.
/// Such points are vertices of the hull.
fn certain_extremes(points: &[ProbabilityVector]) -> Vec<bool> {
    let n = points.len();
    let d = points[0].dim();
    let mut marked = vec![false; n];
    let mut rng = rng_for(0x5eed, &[d as u64]);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for k in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[k] = s;
            dirs.push(v);
        }
    }
    for _ in 0..16 * d {
        dirs.push((0..d).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    for dir in &dirs {
        let score = |p: &ProbabilityVector| -> f64 {
            p.as_slice().iter().zip(dir).map(|(a, b)| a * b).sum()
        };
        let mut best = f64::NEG_INFINITY;
        let mut second = f64::NEG_INFINITY;
        let mut arg = 0;
        for (i, p) in points.iter().enumerate() {
            let s = score(p);
            if s > best {
                second = best;
                best = s;
                arg = i;
            } else if s > second {
                second = s;
            }
        }
        if best - second > 1e-12 {
            marked[arg] = true;
        }
    }
    marked
}

/// Keeps exactly the points that are not within `tol` (L1) of the convex hull
/// of the other kept points.
///
/// After deduplication, points are visited in lexicographic order and each is
/// dropped if it lies in the hull of the points still kept. A point kept in
/// this pass was tested against a superset of the final set, so running the
/// function again removes nothing.
pub fn prune_hull(points: &[ProbabilityVector], tol: f64) -> Vec<ProbabilityVector> {
    if points.is_empty() {
        return Vec::new();
    }
    let pts = canonical_dedup(points.to_vec());
    if pts.len() <= 2 {
        return pts;
    }

    // Cheap prefilter: drop points already inside the hull of certain vertices.
    let certain = certain_extremes(&pts);
    let extreme_refs: Vec<&[f64]> = pts
        .iter()
        .zip(&certain)
        .filter(|(_, &c)| c)
        .map(|(p, _)| p.as_slice())
        .collect();
    let survive: Vec<bool> = pts
        .par_iter()
        .zip(certain.par_iter())
        .map(|(p, &c)| c || !in_hull(&extreme_refs, p.as_slice(), tol))
        .collect();
    let mut kept: Vec<ProbabilityVector> = pts
        .into_iter()
        .zip(survive)
        .filter(|(_, s)| *s)
        .map(|(p, _)| p)
        .collect();

    let mut i = 0;
    while i < kept.len() {
        let others: Vec<&[f64]> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.as_slice())
            .collect();
        if !others.is_empty() && in_hull(&others, kept[i].as_slice(), tol) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// Default-tolerance wrapper around [`prune_hull`].
pub fn prune(points: &[ProbabilityVector]) -> Vec<ProbabilityVector> {
    prune_hull(points, TOL_LP)
}

/// Hausdorff distance between two finite point sets (Euclidean metric).
pub fn hausdorff(a: &[ProbabilityVector], b: &[ProbabilityVector]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let dist = |p: &ProbabilityVector, q: &ProbabilityVector| -> f64 {
        p.as_slice()
            .iter()
            .zip(q.as_slice())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let directed = |from: &[ProbabilityVector], to: &[ProbabilityVector]| -> f64 {
        from.iter()
            .map(|p| to.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

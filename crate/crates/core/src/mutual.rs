//! States unbiased in both bases, and whether three strokes can prepare one.
//!
//! With agent A starting, the strokes are: prepare `|l>`, apply
//! `U^dagger D_1 U`, apply `D_2`. The middle matrix must have a flat column
//! `l` (all moduli `1/sqrt(d)`); `D_2` then moves the column onto a state
//! `psi*` unbiased in both bases. With agent B starting the roles of `U` and
//! `U^dagger` swap.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::coherence::{CMatrix, DiagonalUnitary, UnitaryMatrix};
use crate::rng::rng_for;

fn flat(d: usize) -> f64 {
    1.0 / (d as f64).sqrt()
}

/// `sqrt((1 + 1/sqrt(d)) / 2)`.
fn blocker_threshold(d: usize) -> f64 {
    ((1.0 + flat(d)) / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditions {
    pub holds: bool,
    pub best_l: usize,
    /// `max_l min_m (sum_j r_j / 2 - max_i r_i) + 1 / (2 sqrt d)` with
    /// `r_j = |u_jm u_jl|`; non-negative when the conditions hold.
    pub margin: f64,
}

fn column_value(x: &nalgebra::DMatrix<f64>, l: usize) -> f64 {
    let d = x.nrows();
    (0..d)
        .map(|m| {
            let r: Vec<f64> = (0..d).map(|j| x[(j, m)] * x[(j, l)]).collect();
            r.iter().sum::<f64>() / 2.0 - r.iter().cloned().fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn column_margins(u: &UnitaryMatrix) -> Vec<f64> {
    let x = u.amplitudes();
    let d = u.dim();
    (0..d)
        .map(|l| column_value(&x, l) + flat(d) / 2.0)
        .collect()
}

const MARGIN_SLACK: f64 = 1e-12;

pub fn necessary_conditions(u: &UnitaryMatrix) -> NecessaryConditions {
    let margins = column_margins(u);
    let (best_l, &margin) = margins
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    NecessaryConditions {
        holds: margin >= -MARGIN_SLACK,
        best_l,
        margin,
    }
}

/// `min_i max_j |u_ij|^2 > sqrt((1 + 1/sqrt d) / 2)`.
pub fn row_maximum_blocker(u: &UnitaryMatrix) -> bool {
    let x = u.amplitudes();
    let v = x
        .row_iter()
        .map(|r| r.iter().map(|a| a * a).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    v > blocker_threshold(u.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityBlocker {
    pub blocked: bool,
    /// `2d - 2 sum_k max_j |u_kj|`.
    pub distance_sq: f64,
}

pub fn permutation_proximity_blocker(u: &UnitaryMatrix) -> ProximityBlocker {
    let d = u.dim();
    let x = u.amplitudes();
    let s: f64 = x
        .row_iter()
        .map(|r| r.iter().cloned().fold(0.0, f64::max))
        .sum();
    let distance_sq = 2.0 * d as f64 - 2.0 * s;
    ProximityBlocker {
        blocked: distance_sq < 2.0 - 2.0 * blocker_threshold(d),
        distance_sq,
    }
}

/// `|<j|psi>|` and `|<j|U psi>|` all equal `1/sqrt(d)` within `tol`.
pub fn verify_mutually_coherent(u: &UnitaryMatrix, psi: &[Complex64], tol: f64) -> bool {
    let d = u.dim();
    if psi.len() != d {
        return false;
    }
    let v = nalgebra::DVector::from_column_slice(psi);
    let w = u.matrix() * &v;
    let f = flat(d);
    v.iter()
        .chain(w.iter())
        .all(|z| (z.norm() - f).abs() <= tol)
}

/// Which agent prepares the initial basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// A prepares `|l>`; B's stroke is `U^dagger D U`.
    AFirst,
    /// B prepares `U^dagger |l>`; A's stroke is `D`, giving the column of
    /// `U D U^dagger`.
    BFirst,
}

impl Convention {
    fn index(self) -> u64 {
        match self {
            Convention::AFirst => 0,
            Convention::BFirst => 1,
        }
    }

    /// `W` with the middle matrix equal to `W^dagger D W`.
    fn frame(self, u: &UnitaryMatrix) -> CMatrix {
        match self {
            Convention::AFirst => u.matrix().clone(),
            Convention::BFirst => u.matrix().adjoint(),
        }
    }
}

fn phasors(free: &[f64]) -> Vec<Complex64> {
    std::iter::once(Complex64::new(1.0, 0.0))
        .chain(free.iter().map(|&t| Complex64::from_polar(1.0, t)))
        .collect()
}

/// Column `l` of `W^dagger diag(e^{i xi}) W`.
fn middle_column(w: &CMatrix, xi: &[Complex64], l: usize) -> Vec<Complex64> {
    let d = w.nrows();
    (0..d)
        .map(|m| (0..d).map(|j| w[(j, m)].conj() * xi[j] * w[(j, l)]).sum())
        .collect()
}

/// `W x` for `x_j = e^{i a_j} / sqrt(d)`.
fn image_of_flat(w: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let d = w.nrows();
    let f = flat(d);
    (0..d)
        .map(|m| (0..d).map(|j| w[(m, j)] * x[j] * f).sum())
        .collect()
}

fn flat_cost(v: &[Complex64]) -> f64 {
    let f = flat(v.len());
    v.iter().map(|z| (z.norm() - f).powi(2)).sum()
}

fn flat_residual(v: &[Complex64]) -> f64 {
    let f = flat(v.len());
    v.iter().map(|z| (z.norm() - f).abs()).fold(0.0, f64::max)
}

struct Objective<'a> {
    w: &'a CMatrix,
    /// `Some(l)`: flatten column `l` of the middle matrix. `None`: flatten
    /// `W x` over flat `x`.
    column: Option<usize>,
}

impl Objective<'_> {
    fn vector(&self, p: &[f64]) -> Vec<Complex64> {
        let z = phasors(p);
        match self.column {
            Some(l) => middle_column(self.w, &z, l),
            None => image_of_flat(self.w, &z),
        }
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok(flat_cost(&self.vector(p)))
    }
}

fn nelder_mead(obj: &Objective, start: Vec<f64>, step: f64, iters: u64) -> Vec<f64> {
    let mut simplex = vec![start.clone()];
    for i in 0..start.len() {
        let mut v = start.clone();
        v[i] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-30)
        .expect("valid tolerance");
    let res = Executor::new(Objective { ..*obj }, solver)
        .configure(|s| s.max_iters(iters).target_cost(1e-28))
        .run();
    match res {
        Ok(r) => r.state.best_param.unwrap_or(start),
        Err(_) => start,
    }
}

/// One local search from a random start, polished with shrinking simplices.
fn local_search(obj: &Objective, n: usize, seed: u64, coords: &[u64], tol: f64) -> (Vec<f64>, f64) {
    let mut rng = rng_for(seed, coords);
    let start: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    if n == 0 {
        return (start, flat_residual(&obj.vector(&[])));
    }
    let iters = 400 * n as u64 + 400;
    let mut p = nelder_mead(obj, start, 0.5, iters);
    let mut res = flat_residual(&obj.vector(&p));
    for step in [1e-2, 1e-4, 1e-6] {
        if res < tol * 1e-2 {
            break;
        }
        let q = nelder_mead(obj, p.clone(), step, iters);
        let r = flat_residual(&obj.vector(&q));
        if r < res {
            p = q;
            res = r;
        }
    }
    (p, res)
}

fn search(
    obj: &Objective,
    n: usize,
    budget: usize,
    seed: u64,
    coords: &[u64],
    tol: f64,
) -> std::result::Result<(Vec<f64>, f64), f64> {
    let runs: Vec<(Vec<f64>, f64)> = (0..budget)
        .into_par_iter()
        .map(|r| {
            let mut c = coords.to_vec();
            c.push(r as u64);
            local_search(obj, n, seed, &c, tol)
        })
        .collect();
    if let Some(hit) = runs.iter().find(|(_, r)| *r < tol) {
        return Ok(hit.clone());
    }
    Err(runs.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min))
}

/// Searches for `psi` with `psi` and `U psi` both flat.
pub fn search_unbiased_state(
    u: &UnitaryMatrix,
    budget: usize,
    seed: u64,
    tol: f64,
) -> Option<(Vec<Complex64>, f64)> {
    let d = u.dim();
    let obj = Objective {
        w: u.matrix(),
        column: None,
    };
    search(&obj, d - 1, budget, seed, &[u64::MAX], tol)
        .ok()
        .map(|(p, r)| {
            let f = flat(d);
            (phasors(&p).into_iter().map(|z| z * f).collect(), r)
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatColumnSolution {
    pub convention: Convention,
    pub column_index: usize,
    /// `D_1`.
    pub phases: DiagonalUnitary,
    /// Max deviation of the column's moduli from `1/sqrt(d)`.
    pub residual: f64,
    /// `D_2`, steering the flat column onto `state`.
    pub final_phases: DiagonalUnitary,
    /// State after the three strokes.
    pub state: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FlatColumnOutcome {
    Found(FlatColumnSolution),
    /// Nothing within budget; the best residual seen.
    NotFound {
        best_residual: f64,
    },
    /// Every column fails the necessary conditions in both conventions.
    Blocked {
        reason: String,
    },
}

impl FlatColumnOutcome {
    pub fn solution(&self) -> Option<&FlatColumnSolution> {
        match self {
            FlatColumnOutcome::Found(s) => Some(s),
            _ => None,
        }
    }
}

/// Multi-start Nelder–Mead over `d - 1` free phases (the first is fixed at 0)
/// for each column that passes the necessary conditions, in both
/// conventions. Restart `r` of column `l` in convention `c` uses the
/// generator derived from `(seed, c, l, r)`.
pub fn search_flat_column(
    u: &UnitaryMatrix,
    budget: usize,
    seed: u64,
    tol_flat: f64,
) -> FlatColumnOutcome {
    let d = u.dim();
    let mut best = f64::INFINITY;
    let mut any_candidate = false;
    for conv in [Convention::AFirst, Convention::BFirst] {
        let w = conv.frame(u);
        let wu = UnitaryMatrix::from_trusted(w.clone());
        let margins = column_margins(&wu);
        for (l, &margin) in margins.iter().enumerate() {
            if margin < -MARGIN_SLACK {
                continue;
            }
            any_candidate = true;
            let obj = Objective {
                w: &w,
                column: Some(l),
            };
            match search(
                &obj,
                d - 1,
                budget,
                seed,
                &[conv.index(), l as u64],
                tol_flat,
            ) {
                Ok((p, residual)) => {
                    let col = middle_column(&w, &phasors(&p), l);
                    let Some(sol) = finish(conv, &w, l, p, residual, &col, budget, seed, tol_flat)
                    else {
                        continue;
                    };
                    return FlatColumnOutcome::Found(sol);
                }
                Err(r) => best = best.min(r),
            }
        }
    }
    if !any_candidate {
        return FlatColumnOutcome::Blocked {
            reason: "necessary conditions fail for every column in both conventions".into(),
        };
    }
    FlatColumnOutcome::NotFound {
        best_residual: best,
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    conv: Convention,
    w: &CMatrix,
    l: usize,
    p: Vec<f64>,
    residual: f64,
    col: &[Complex64],
    budget: usize,
    seed: u64,
    tol_flat: f64,
) -> Option<FlatColumnSolution> {
    // target x: flat with W x flat
    let wu = UnitaryMatrix::from_trusted(w.clone());
    let (x, _) = search_unbiased_state(&wu, budget, seed ^ conv.index(), tol_flat)?;
    let d2: Vec<f64> = x.iter().zip(col).map(|(a, b)| a.arg() - b.arg()).collect();
    let d2 = DiagonalUnitary::new(d2).ok()?;
    let y: Vec<Complex64> = d2.entries().iter().zip(col).map(|(e, z)| e * z).collect();
    let state = match conv {
        Convention::AFirst => y,
        Convention::BFirst => {
            let v = w * nalgebra::DVector::from_vec(y);
            v.iter().cloned().collect()
        }
    };
    let mut xi = vec![0.0];
    xi.extend(p);
    Some(FlatColumnSolution {
        convention: conv,
        column_index: l,
        phases: DiagonalUnitary::new(xi).ok()?,
        residual,
        final_phases: d2,
        state,
    })
}

/// Replays the three strokes of a solution and returns the final state.
pub fn replay(u: &UnitaryMatrix, sol: &FlatColumnSolution) -> Vec<Complex64> {
    let d = u.dim();
    let um = u.matrix();
    let mut e = nalgebra::DVector::zeros(d);
    e[sol.column_index] = Complex64::new(1.0, 0.0);
    let d1 = sol.phases.matrix();
    let d2 = sol.final_phases.matrix();
    let out = match sol.convention {
        Convention::AFirst => d2 * um.adjoint() * d1 * um * e,
        Convention::BFirst => um.adjoint() * d2 * um * d1 * um.adjoint() * e,
    };
    out.iter().cloned().collect()
}

//! Two-temperature athermality engine.
//!
//! Agent A may apply any thermal operation at the cold inverse temperature
//! `alpha` (Gibbs state `gamma`), agent B any thermal operation at the hot
//! inverse temperature `beta` (Gibbs state `Gamma`). Strokes alternate.

mod qubit;
mod simulate;

pub use qubit::{
    pi_map, qubit_contraction, qubit_orbit, qubit_reachable_set, QubitReach, QubitRegime,
};
pub use simulate::{simulate, ReachableSet, Start};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::{gibbs_state, EnergyLevels, InverseTemperature, ProbabilityVector};
use crate::tol::TOL_CURVE;

/// Slack on the range preconditions of the iteration maps.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    levels: EnergyLevels,
    alpha: InverseTemperature,
    beta: InverseTemperature,
    gamma: ProbabilityVector,
    big_gamma: ProbabilityVector,
}

impl EngineParams {
    /// `alpha` is the cold inverse temperature, `beta <= alpha` the hot one.
    ///
    /// `alpha == beta` is accepted (the engine is then trivial); quantities
    /// that need two distinct temperatures return [`Error::DegenerateEngine`].
    pub fn new(levels: EnergyLevels, alpha: f64, beta: f64) -> Result<Self> {
        let alpha = InverseTemperature::new(alpha)?;
        let beta = InverseTemperature::new(beta)?;
        if beta > alpha {
            return Err(Error::InvalidInput(format!(
                "hot inverse temperature {} exceeds cold {}",
                beta.value(),
                alpha.value()
            )));
        }
        let gamma = gibbs_state(&levels, alpha);
        let big_gamma = gibbs_state(&levels, beta);
        Ok(EngineParams {
            levels,
            alpha,
            beta,
            gamma,
            big_gamma,
        })
    }

    pub fn levels(&self) -> &EnergyLevels {
        &self.levels
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.value()
    }

    pub fn beta(&self) -> f64 {
        self.beta.value()
    }

    /// Cold Gibbs state `gamma`.
    pub fn cold(&self) -> &ProbabilityVector {
        &self.gamma
    }

    /// Hot Gibbs state `Gamma`.
    pub fn hot(&self) -> &ProbabilityVector {
        &self.big_gamma
    }

    pub fn dim(&self) -> usize {
        self.levels.dim()
    }

    fn require_distinct(&self) -> Result<()> {
        if self.alpha == self.beta {
            return Err(Error::DegenerateEngine("alpha == beta".into()));
        }
        Ok(())
    }

    /// `Gamma_0 (1 - gamma_k) - Gamma_k (1 - gamma_0)`, shared denominator of
    /// the tilde states and the polytope weights.
    fn denom(&self, k: usize) -> f64 {
        let (g, h) = (self.gamma.as_slice(), self.big_gamma.as_slice());
        h[0] * (1.0 - g[k]) - h[k] * (1.0 - g[0])
    }

    fn checked_denom(&self, k: usize) -> Result<f64> {
        let den = self.denom(k);
        if den.abs() < 1e-300 || !den.is_finite() {
            return Err(Error::DegenerateEngine(format!(
                "vanishing denominator at level {k}"
            )));
        }
        Ok(den)
    }
}

/// `max{p_top, Gamma_top / Gamma_{top-1}}`: no reachable state puts more
/// weight on the top level.
pub fn monotone_m(p: &ProbabilityVector, params: &EngineParams) -> f64 {
    let d = params.dim();
    p[d - 1].max(top_ratio(params))
}

/// `Gamma_{d-1} / Gamma_{d-2}`, the bound on the top-level weight of any
/// state reachable from a thermal state.
pub fn top_ratio(params: &EngineParams) -> f64 {
    let h = params.hot().as_slice();
    let d = h.len();
    h[d - 1] / h[d - 2]
}

/// Every vertex has top-level weight at most [`top_ratio`] (plus
/// [`TOL_CURVE`]).
pub fn check_upper_bound(set: &ReachableSet, params: &EngineParams) -> bool {
    let d = params.dim();
    let bound = top_ratio(params) + TOL_CURVE;
    set.vertices.iter().all(|q| q[d - 1] <= bound)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TildeStates {
    /// Fixed point approached by cold-last strokes; extra ground weight.
    pub gamma_tilde: ProbabilityVector,
    /// Fixed point approached by hot-last strokes; extra top weight.
    pub big_gamma_tilde: ProbabilityVector,
}

pub fn tilde_states(params: &EngineParams) -> Result<TildeStates> {
    params.require_distinct()?;
    let d = params.dim();
    let den = params.checked_denom(d - 1)?;
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    let spread = g[0] - g[d - 1];

    let gt0 = h[0] * spread / den;
    let mut gt = vec![0.0; d];
    gt[0] = gt0;
    for k in 1..d {
        gt[k] = (1.0 - gt0) / (1.0 - g[0]) * g[k];
    }

    let htd = h[d - 1] * spread / den;
    let mut ht = vec![0.0; d];
    ht[d - 1] = htd;
    for k in 0..d - 1 {
        ht[k] = (1.0 - htd) / (1.0 - h[d - 1]) * h[k];
    }
    Ok(TildeStates {
        gamma_tilde: ProbabilityVector::from_computed(gt),
        big_gamma_tilde: ProbabilityVector::from_computed(ht),
    })
}

/// The `2^(d-1)` vertices of the inner polytope, indexed by bit strings
/// `b_1..b_{d-1}` (bit `k - 1` of the index is `b_k`).
pub fn lower_bound_polytope(params: &EngineParams) -> Result<Vec<ProbabilityVector>> {
    params.require_distinct()?;
    let d = params.dim();
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    let mut weights = vec![[0.0f64; 2]; d];
    for k in 1..d {
        let den = params.checked_denom(k)?;
        weights[k][0] = g[k] * (h[0] - h[k]) / den;
        weights[k][1] = h[k] * (g[0] - g[k]) / den;
    }
    let mut out = Vec::with_capacity(1 << (d - 1));
    for mask in 0usize..(1 << (d - 1)) {
        let mut f = vec![0.0; d];
        let mut above = 0.0;
        for k in (1..d).rev() {
            let bit = (mask >> (k - 1)) & 1;
            f[k] = (1.0 - above) * weights[k][bit];
            above += f[k];
        }
        f[0] = 1.0 - above;
        out.push(ProbabilityVector::from_computed(f));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroundState {
    YesByCriterion,
    CriterionInconclusive,
}

/// Sufficient condition for the ground state to be reachable in the limit:
/// `gamma_0 > 1/2` and `Gamma_0 < Gamma_{d-1} + Gamma_{d-2}`.
pub fn ground_state_reachable(params: &EngineParams) -> GroundState {
    let d = params.dim();
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    if g[0] > 0.5 && h[0] < h[d - 1] + h[d - 2] {
        GroundState::YesByCriterion
    } else {
        GroundState::CriterionInconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TildeSide {
    /// Cold then hot stroke; raises the top-level weight towards `Gamma~`.
    RaiseTop,
    /// Hot then cold stroke; raises the ground weight towards `gamma~`.
    RaiseGround,
}

/// Contraction factor `(1 - gamma_0) Gamma_top / ((1 - gamma_top) Gamma_0)`
/// of the two-stroke maps in [`tilde_step`].
pub fn tilde_step_factor(params: &EngineParams) -> f64 {
    let d = params.dim();
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    (1.0 - g[0]) * h[d - 1] / ((1.0 - g[d - 1]) * h[0])
}

/// One cold+hot (or hot+cold) round along the affine recursion towards a
/// tilde state. The remaining components are proportional to the Gibbs state
/// of the bath that acted last.
pub fn tilde_step(
    x: &ProbabilityVector,
    params: &EngineParams,
    side: TildeSide,
) -> Result<ProbabilityVector> {
    let d = params.dim();
    if x.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.dim(),
        });
    }
    let tilde = tilde_states(params)?;
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    let c = tilde_step_factor(params);
    match side {
        TildeSide::RaiseTop => {
            let (lo, hi) = (h[d - 1], tilde.big_gamma_tilde[d - 1]);
            let xd = x[d - 1];
            if xd < lo - RANGE_SLACK || xd > hi + RANGE_SLACK {
                return Err(Error::precondition(
                    "x_top",
                    format!("{xd} outside [Gamma_top, Gamma~_top] = [{lo}, {hi}]"),
                ));
            }
            let top = c * xd + (g[0] - g[d - 1]) * h[d - 1] / ((1.0 - g[d - 1]) * h[0]);
            let mut out: Vec<f64> = (0..d)
                .map(|k| (1.0 - top) / (1.0 - h[d - 1]) * h[k])
                .collect();
            out[d - 1] = top;
            Ok(ProbabilityVector::from_computed(out))
        }
        TildeSide::RaiseGround => {
            let (lo, hi) = (g[0], tilde.gamma_tilde[0]);
            let x0 = x[0];
            if x0 < lo - RANGE_SLACK || x0 > hi + RANGE_SLACK {
                return Err(Error::precondition(
                    "x_ground",
                    format!("{x0} outside [gamma_0, gamma~_0] = [{lo}, {hi}]"),
                ));
            }
            let ground = c * x0 + (g[0] - g[d - 1]) / (1.0 - g[d - 1]);
            let mut out: Vec<f64> = (0..d)
                .map(|k| (1.0 - ground) / (1.0 - g[0]) * g[k])
                .collect();
            out[0] = ground;
            Ok(ProbabilityVector::from_computed(out))
        }
    }
}

/// One hot+cold round of the ground-state construction.
///
/// Requires the ground-state criterion and `p_k / gamma_k` non-increasing in
/// `k`; the output satisfies the same ordering.
pub fn ground_iteration(p: &ProbabilityVector, params: &EngineParams) -> Result<ProbabilityVector> {
    let d = params.dim();
    if p.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    if ground_state_reachable(params) != GroundState::YesByCriterion {
        return Err(Error::precondition(
            "params",
            "needs gamma_0 > 1/2 and Gamma_0 < Gamma_top + Gamma_{top-1}",
        ));
    }
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    for k in 0..d - 1 {
        let (a, b) = (p[k] / g[k], p[k + 1] / g[k + 1]);
        if a < b * (1.0 - 1e-12) - 1e-15 {
            return Err(Error::precondition(
                "p",
                format!("p_k / gamma_k increases at level {k}"),
            ));
        }
    }
    let q0 = p[d - 1] + (h[0] - h[d - 1]) / h[d - 2] * p[d - 2];
    let mut r = vec![0.0; d];
    r[0] = 1.0 - (1.0 - g[0]) / g[0] * q0;
    for k in 1..d {
        r[k] = g[k] / g[0] * q0;
    }
    Ok(ProbabilityVector::from_computed(r))
}

/// The per-round factor by which `p_top + p_{top-1}` shrinks in
/// [`ground_iteration`]: `(gamma_top + c gamma_{top-1}) / gamma_0` with
/// `c = (Gamma_0 - Gamma_top) / Gamma_{top-1}`. It never exceeds
/// `(gamma_top + gamma_{top-1}) / gamma_0`.
pub fn ground_iteration_rate(params: &EngineParams) -> f64 {
    let d = params.dim();
    let (g, h) = (params.cold().as_slice(), params.hot().as_slice());
    let c = (h[0] - h[d - 1]) / h[d - 2];
    (g[d - 1] + c * g[d - 2]) / g[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, alpha: f64, beta: f64) -> EngineParams {
        EngineParams::new(EnergyLevels::ladder(d).unwrap(), alpha, beta).unwrap()
    }

    /// Qubit engine with gamma = (0.8, 0.2), Gamma = (0.6, 0.4).
    pub(crate) fn qubit_params() -> EngineParams {
        let alpha = 4f64.ln();
        let beta = 1.5f64.ln();
        EngineParams::new(EnergyLevels::new(vec![0.0, 1.0]).unwrap(), alpha, beta).unwrap()
    }

    #[test]
    fn qubit_gibbs_states() {
        let p = qubit_params();
        assert!((p.cold()[0] - 0.8).abs() < 1e-15);
        assert!((p.hot()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_hot_colder_than_cold() {
        assert!(EngineParams::new(EnergyLevels::ladder(3).unwrap(), 0.1, 0.2).is_err());
    }

    #[test]
    fn monotone_m_examples() {
        let prm = params(3, 1.0, 0.25);
        let high = ProbabilityVector::new(vec![0.05, 0.05, 0.9]).unwrap();
        assert_eq!(monotone_m(&high, &prm), 0.9);
        let low = ProbabilityVector::new(vec![0.5, 0.4, 0.1]).unwrap();
        assert!((monotone_m(&low, &prm) - (-0.25f64).exp()).abs() < 1e-15);
        let flat = params(2, 1.0, 0.0);
        assert_eq!(top_ratio(&flat), 1.0);
    }

    #[test]
    fn upper_bound_check() {
        let prm = params(3, 1.0 / 3.0, 0.2);
        let bound = top_ratio(&prm);
        let mk = |v: Vec<ProbabilityVector>| ReachableSet {
            vertices: v,
            stroke_index: 1,
            converged: false,
            hausdorff_delta: f64::INFINITY,
        };
        assert!(!check_upper_bound(
            &mk(vec![ProbabilityVector::basis(3, 2)]),
            &prm
        ));
        let edge = ProbabilityVector::new(vec![1.0 - bound, 0.0, bound]).unwrap();
        assert!(check_upper_bound(&mk(vec![edge]), &prm));
    }

    #[test]
    fn tilde_qubit_values() {
        let t = tilde_states(&qubit_params()).unwrap();
        assert!((t.gamma_tilde[0] - 0.9).abs() < 1e-14);
        assert!((t.big_gamma_tilde[0] - 0.4).abs() < 1e-14);
        // closed forms (2g - 1) G / (G + g - 1) and (2G - 1) g / (G + g - 1)
        let (g, h) = (0.8, 0.6);
        assert!((t.gamma_tilde[0] - (2.0 * g - 1.0) * h / (h + g - 1.0)).abs() < 1e-14);
        assert!((t.big_gamma_tilde[0] - (2.0 * h - 1.0) * g / (h + g - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn tilde_infinite_temperature() {
        let t = tilde_states(&params(4, 0.7, 0.0)).unwrap();
        assert!((t.gamma_tilde[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tilde_degenerate() {
        assert!(matches!(
            tilde_states(&params(3, 0.5, 0.5)),
            Err(Error::DegenerateEngine(_))
        ));
        assert!(lower_bound_polytope(&params(3, 0.5, 0.5)).is_err());
    }

    #[test]
    fn polytope_qubit_is_tilde_pair() {
        let prm = qubit_params();
        let t = tilde_states(&prm).unwrap();
        let poly = lower_bound_polytope(&prm).unwrap();
        assert_eq!(poly.len(), 2);
        assert!(poly[0].max_abs_diff(&t.gamma_tilde) < 1e-14);
        assert!(poly[1].max_abs_diff(&t.big_gamma_tilde) < 1e-14);
    }

    #[test]
    fn polytope_sizes() {
        assert_eq!(
            lower_bound_polytope(&params(4, 1.0, 0.25)).unwrap().len(),
            8
        );
        assert_eq!(
            lower_bound_polytope(&params(5, 1.0, 0.25)).unwrap().len(),
            16
        );
    }

    #[test]
    fn ground_criterion_examples() {
        let yes = params(4, 1.0, 0.25);
        assert!((yes.cold()[0] - 0.6439).abs() < 1e-4);
        assert_eq!(ground_state_reachable(&yes), GroundState::YesByCriterion);
        assert_eq!(
            ground_state_reachable(&params(3, 1.0 / 3.0, 0.2)),
            GroundState::CriterionInconclusive
        );
        assert_eq!(
            ground_state_reachable(&params(3, 3.0, 0.0)),
            GroundState::YesByCriterion
        );
    }

    #[test]
    fn tilde_step_from_hot_state() {
        let prm = params(3, 1.0 / 3.0, 0.2);
        let (g, h) = (prm.cold().clone(), prm.hot().clone());
        let out = tilde_step(&h, &prm, TildeSide::RaiseTop).unwrap();
        let expect = (1.0 - g[0]) * h[2] / ((1.0 - g[2]) * h[0]) * h[2]
            + (g[0] - g[2]) * h[2] / ((1.0 - g[2]) * h[0]);
        assert!((out[2] - expect).abs() < 1e-15);
        assert!(out[2] >= h[2]);
    }

    #[test]
    fn tilde_step_fixed_points() {
        let prm = params(3, 1.0 / 3.0, 0.2);
        let t = tilde_states(&prm).unwrap();
        let a = tilde_step(&t.big_gamma_tilde, &prm, TildeSide::RaiseTop).unwrap();
        assert!(a.max_abs_diff(&t.big_gamma_tilde) < 1e-14);
        let b = tilde_step(&t.gamma_tilde, &prm, TildeSide::RaiseGround).unwrap();
        assert!(b.max_abs_diff(&t.gamma_tilde) < 1e-14);
        let out = tilde_step(&ProbabilityVector::basis(3, 2), &prm, TildeSide::RaiseTop);
        assert!(matches!(
            out,
            Err(Error::Precondition { field: "x_top", .. })
        ));
    }

    #[test]
    fn tilde_step_iterates_match_closed_form() {
        let prm = params(3, 1.0 / 3.0, 0.2);
        let t = tilde_states(&prm).unwrap();
        let c = tilde_step_factor(&prm);
        let h = prm.hot().clone();
        let mut x = h.clone();
        for m in 1..=30 {
            x = tilde_step(&x, &prm, TildeSide::RaiseTop).unwrap();
            let closed = c.powi(m) * (h[2] - t.big_gamma_tilde[2]) + t.big_gamma_tilde[2];
            assert!((x[2] - closed).abs() < 1e-14, "m = {m}");
        }
    }

    #[test]
    fn tilde_step_lies_in_three_stroke_set() {
        // preparation of Gamma, one cold stroke, one hot stroke
        let prm = params(3, 1.0 / 3.0, 0.2);
        let up = tilde_step(prm.hot(), &prm, TildeSide::RaiseTop).unwrap();
        let sets = simulate(&prm, &Start::FromHot, 3, 0.0).unwrap();
        let refs: Vec<&[f64]> = sets[2].vertices.iter().map(|v| v.as_slice()).collect();
        assert!(crate::hull::hull_distance(&refs, up.as_slice()) < 1e-9);
    }

    #[test]
    fn ground_iteration_two_levels_is_pi_composition() {
        let prm = qubit_params();
        let p = prm.cold().clone();
        // at d = 2 the hot-side condition always holds
        let r = ground_iteration(&p, &prm).unwrap();
        let expect = pi_map(&pi_map(&p, prm.hot()), prm.cold());
        assert!(r.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn ground_iteration_fixed_point_and_decay() {
        let prm = params(4, 1.0, 0.25);
        let e0 = ProbabilityVector::basis(4, 0);
        assert!(ground_iteration(&e0, &prm).unwrap().max_abs_diff(&e0) < 1e-15);

        let rate = ground_iteration_rate(&prm);
        let g = prm.cold().as_slice();
        assert!(rate <= (g[3] + g[2]) / g[0] + 1e-15);
        let mut p = prm.cold().clone();
        let mut prev = p[3] + p[2];
        for n in 0..40 {
            p = ground_iteration(&p, &prm).unwrap();
            let tail = p[3] + p[2];
            if n > 0 {
                assert!((tail / prev - rate).abs() < 1e-9, "step {n}");
            }
            prev = tail;
        }
        assert!(p.tv_distance(&e0) < 1e-10);
    }

    #[test]
    fn ground_iteration_rejects_bad_order() {
        let prm = params(4, 1.0, 0.25);
        let p = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(ground_iteration(&p, &prm).is_err());
        let warm = params(3, 1.0 / 3.0, 0.2);
        assert!(ground_iteration(warm.cold(), &warm).is_err());
    }
}

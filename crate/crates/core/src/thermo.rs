//! Thermomajorisation primitives.
//!
//! A state `p` thermomajorises `q` with respect to a Gibbs state `g` when the
//! piecewise-linear curve built from `p` (ordered by `p_i / g_i`) lies above
//! that of `q` everywhere on `[0, 1]`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{TOL_CURVE, TOL_DUP, TOL_NEG, TOL_SUM};

/// Energies `E_0 <= E_1 <= ... <= E_{d-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevels(Vec<f64>);

impl EnergyLevels {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 energy levels, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("energy {v} is not finite")));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput(
                "energies must be sorted non-decreasing".into(),
            ));
        }
        Ok(EnergyLevels(values))
    }

    /// Equally spaced levels `1, 2, ..., d`.
    pub fn ladder(d: usize) -> Result<Self> {
        Self::new((1..=d).map(|k| k as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Inverse temperature; zero is infinite temperature.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Domain {
                what: "inverse temperature",
                value: beta,
                domain: "[0, inf)",
            });
        }
        Ok(InverseTemperature(beta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Occupation probabilities over `d` levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates and renormalises. Entries in `[-TOL_NEG, 0)` are clamped.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, TOL_SUM)
    }

    /// Like [`ProbabilityVector::new`] with a custom sum tolerance, for user
    /// input given to a few decimals.
    pub fn with_tolerance(mut probs: Vec<f64>, tol_sum: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidInput(format!("entry {i} is not finite")));
            }
            if *p < -TOL_NEG {
                return Err(Error::InvalidInput(format!("entry {i} = {p} is negative")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > tol_sum {
            return Err(Error::InvalidInput(format!(
                "entries sum to {s}, not 1 (tolerance {tol_sum:e})"
            )));
        }
        probs.iter_mut().for_each(|p| *p /= s);
        Ok(ProbabilityVector(probs))
    }

    /// For vectors produced by our own arithmetic: clamp and renormalise
    /// without validation.
    pub(crate) fn from_computed(mut probs: Vec<f64>) -> Self {
        probs.iter_mut().for_each(|p| *p = p.max(0.0));
        let s: f64 = probs.iter().sum();
        if s > 0.0 {
            probs.iter_mut().for_each(|p| *p /= s);
        }
        ProbabilityVector(probs)
    }

    pub fn uniform(d: usize) -> Self {
        ProbabilityVector(vec![1.0 / d as f64; d])
    }

    /// The sharp state with all weight on `level`.
    pub fn basis(d: usize, level: usize) -> Self {
        let mut v = vec![0.0; d];
        v[level] = 1.0;
        ProbabilityVector(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Total variation distance, `0.5 * sum |p_i - q_i|`.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        0.5 * self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Permutation sorting levels by `p_i / g_i`, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaOrder(pub Vec<usize>);

/// Elbow points of a thermomajorisation curve, `d + 1` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoCurve {
    pub elbows: Vec<(f64, f64)>,
}

impl ThermoCurve {
    /// Slopes of consecutive segments. Zero-width segments are skipped.
    pub fn slopes(&self) -> Vec<f64> {
        self.elbows
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }
}

fn check_dims(p: &ProbabilityVector, g: &ProbabilityVector) -> Result<()> {
    if p.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: p.dim(),
        });
    }
    Ok(())
}

fn check_gibbs(g: &ProbabilityVector) -> Result<()> {
    match g.0.iter().position(|&x| x <= 0.0) {
        Some(index) => Err(Error::DegenerateGibbsWeight { index }),
        None => Ok(()),
    }
}

pub fn gibbs_state(levels: &EnergyLevels, beta: InverseTemperature) -> ProbabilityVector {
    let d = levels.dim();
    if beta.0 == 0.0 {
        return ProbabilityVector::uniform(d);
    }
    // E is sorted, so -beta * E_0 is the largest exponent.
    let e0 = levels.0[0];
    let w: Vec<f64> = levels
        .0
        .iter()
        .map(|e| (-beta.0 * (e - e0)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    ProbabilityVector(w.into_iter().map(|x| x / z).collect())
}

pub fn beta_order(p: &ProbabilityVector, g: &ProbabilityVector) -> Result<BetaOrder> {
    check_dims(p, g)?;
    check_gibbs(g)?;
    let ratios: Vec<f64> = p.0.iter().zip(&g.0).map(|(a, b)| a / b).collect();
    let mut perm: Vec<usize> = (0..p.dim()).collect();
    // sort_by is stable, so ties keep ascending index order
    perm.sort_by(|&i, &j| ratios[j].total_cmp(&ratios[i]));
    Ok(BetaOrder(perm))
}

pub fn thermo_curve(p: &ProbabilityVector, g: &ProbabilityVector) -> Result<ThermoCurve> {
    let order = beta_order(p, g)?;
    let d = p.dim();
    let mut elbows = Vec::with_capacity(d + 1);
    elbows.push((0.0, 0.0));
    let (mut x, mut y) = (0.0, 0.0);
    for &i in &order.0 {
        x += g.0[i];
        y += p.0[i];
        elbows.push((x, y));
    }
    elbows[d] = (1.0, 1.0);
    Ok(ThermoCurve { elbows })
}

/// Linear interpolation of the curve at `x`.
///
/// `x` may exceed `[0, 1]` by 1e-12 to absorb rounding in cumulative sums.
pub fn curve_value(curve: &ThermoCurve, x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Domain {
            what: "curve abscissa",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(eval_curve(&curve.elbows, x.clamp(0.0, 1.0)))
}

fn eval_curve(elbows: &[(f64, f64)], x: f64) -> f64 {
    // first elbow with abscissa >= x
    let k = elbows.partition_point(|e| e.0 < x);
    if k == 0 {
        return elbows[0].1;
    }
    if k >= elbows.len() {
        return 1.0;
    }
    let (x1, y1) = elbows[k];
    if x1 == x {
        return y1;
    }
    let (x0, y0) = elbows[k - 1];
    let t = (x - x0) / (x1 - x0);
    (y0 + t * (y1 - y0)).clamp(0.0, 1.0)
}

/// `p` thermomajorises `q` with respect to `g`, within [`TOL_CURVE`].
pub fn thermomajorises(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    g: &ProbabilityVector,
) -> Result<bool> {
    check_dims(q, g)?;
    let cp = thermo_curve(p, g)?;
    let cq = thermo_curve(q, g)?;
    Ok(cq
        .elbows
        .iter()
        .all(|&(x, y)| eval_curve(&cp.elbows, x) >= y - TOL_CURVE))
}

/// Extreme points of the set of states thermomajorised by `p`.
///
/// One candidate per permutation of levels; near-duplicates (max norm below
/// [`TOL_DUP`]) are dropped, keeping the first in lexicographic permutation
/// order.
pub fn extremal_achievable(
    p: &ProbabilityVector,
    g: &ProbabilityVector,
) -> Result<Vec<ProbabilityVector>> {
    let curve = thermo_curve(p, g)?;
    let d = p.dim();
    let mut out: Vec<ProbabilityVector> = Vec::new();
    for sigma in (0..d).permutations(d) {
        let mut q = vec![0.0; d];
        let mut x_prev = 0.0;
        let mut l_prev = 0.0;
        for (j, &level) in sigma.iter().enumerate() {
            let x = if j + 1 == d { 1.0 } else { x_prev + g.0[level] };
            let l = eval_curve(&curve.elbows, x);
            q[level] = l - l_prev;
            x_prev = x;
            l_prev = l;
        }
        let q = ProbabilityVector::from_computed(q);
        if !out.iter().any(|v| v.max_abs_diff(&q) < TOL_DUP) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Replaces the entries in `subset` by their thermal redistribution.
pub fn thermalise_subset(
    p: &ProbabilityVector,
    g: &ProbabilityVector,
    subset: &[usize],
) -> Result<ProbabilityVector> {
    check_dims(p, g)?;
    let d = p.dim();
    if let Some(&i) = subset.iter().find(|&&i| i >= d) {
        return Err(Error::precondition(
            "subset",
            format!("index {i} >= d = {d}"),
        ));
    }
    let mut s: Vec<usize> = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Ok(p.clone());
    }
    let mass: f64 = s.iter().map(|&i| p.0[i]).sum();
    let weight: f64 = s.iter().map(|&i| g.0[i]).sum();
    if weight <= 0.0 {
        return Err(Error::DegenerateGibbsWeight { index: s[0] });
    }
    let mut q = p.0.clone();
    for &i in &s {
        q[i] = mass * g.0[i] / weight;
    }
    Ok(ProbabilityVector::from_computed(q))
}

/// Fills the empty level `i` with weight `a` taken from level `j`, where
/// `g_i >= g_j`.
///
/// This is the Gibbs-stochastic two-level map applied to `(p_i, p_j) = (0, p_j)`.
pub fn two_level_transfer(
    p: &ProbabilityVector,
    g: &ProbabilityVector,
    i: usize,
    j: usize,
    a: f64,
) -> Result<ProbabilityVector> {
    check_dims(p, g)?;
    check_gibbs(g)?;
    let d = p.dim();
    if i >= d || j >= d || i == j {
        return Err(Error::precondition(
            "i, j",
            format!("need distinct levels below {d}, got ({i}, {j})"),
        ));
    }
    if p.0[i].abs() > TOL_NEG {
        return Err(Error::precondition(
            "p_i",
            format!("must be 0, got {}", p.0[i]),
        ));
    }
    if p.0[j] <= 0.0 {
        return Err(Error::precondition(
            "p_j",
            format!("must be positive, got {}", p.0[j]),
        ));
    }
    if !(0.0..=p.0[j]).contains(&a) {
        return Err(Error::precondition(
            "a",
            format!("must lie in [0, p_j = {}], got {a}", p.0[j]),
        ));
    }
    if g.0[i] < g.0[j] {
        return Err(Error::precondition(
            "levels",
            format!("level {i} must not lie above level {j}"),
        ));
    }
    let t = a / p.0[j];
    apply_two_level_block(p, g, i, j, t)
}

/// General two-level Gibbs-stochastic move on levels `(i, j)` with `g_i >= g_j`:
/// a fraction `t` of the weight on `j` moves to `i`, and the fraction
/// `t * g_j / g_i` of the weight on `i` moves back.
pub fn apply_two_level_block(
    p: &ProbabilityVector,
    g: &ProbabilityVector,
    i: usize,
    j: usize,
    t: f64,
) -> Result<ProbabilityVector> {
    check_dims(p, g)?;
    check_gibbs(g)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain {
            what: "transfer fraction",
            value: t,
            domain: "[0, 1]",
        });
    }
    if g.0[i] < g.0[j] {
        return Err(Error::precondition(
            "levels",
            format!("level {i} must not lie above level {j}"),
        ));
    }
    let back = t * g.0[j] / g.0[i];
    let (pi, pj) = (p.0[i], p.0[j]);
    let mut q = p.0.clone();
    q[i] = (1.0 - back) * pi + t * pj;
    q[j] = back * pi + (1.0 - t) * pj;
    Ok(ProbabilityVector::from_computed(q))
}

/// All weight moved to the top two levels, keeping `p_{d-1}` in place.
pub fn bar_state(p: &ProbabilityVector) -> ProbabilityVector {
    let d = p.dim();
    let mut q = vec![0.0; d];
    q[d - 1] = p.0[d - 1];
    q[d - 2] = 1.0 - p.0[d - 1];
    ProbabilityVector::from_computed(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gibbs_examples() {
        let g = gibbs_state(
            &EnergyLevels::new(vec![5.0, 5.0, 5.0]).unwrap(),
            InverseTemperature::new(1.0).unwrap(),
        );
        for x in g.as_slice() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        let g = gibbs_state(
            &EnergyLevels::ladder(2).unwrap(),
            InverseTemperature::new(0.0).unwrap(),
        );
        assert_eq!(g.as_slice(), &[0.5, 0.5]);

        // log-sum-exp evaluation done independently
        let g = gibbs_state(
            &EnergyLevels::ladder(3).unwrap(),
            InverseTemperature::new(0.2).unwrap(),
        );
        let expect = [
            0.401_759_578_533_355_4,
            0.328_932_922_288_906_7,
            0.269_307_499_177_737_9,
        ];
        for (a, b) in g.as_slice().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn gibbs_survives_large_exponents() {
        let levels = EnergyLevels::new(vec![1000.0, 1001.0]).unwrap();
        let g = gibbs_state(&levels, InverseTemperature::new(5.0).unwrap());
        assert!(g.as_slice().iter().all(|x| x.is_finite()));
        assert!((g[1] / g[0] - (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn beta_order_examples() {
        let g = pv(&[0.6, 0.4]);
        assert_eq!(beta_order(&g, &g).unwrap().0, vec![0, 1]);
        assert_eq!(beta_order(&pv(&[0.5, 0.5]), &g).unwrap().0, vec![1, 0]);
        let g3 = pv(&[0.5, 0.3, 0.2]);
        assert_eq!(beta_order(&pv(&[1.0, 0.0, 0.0]), &g3).unwrap().0[0], 0);
        let bad = ProbabilityVector::from_computed(vec![1.0, 0.0]);
        assert_eq!(
            beta_order(&pv(&[0.5, 0.5]), &bad),
            Err(Error::DegenerateGibbsWeight { index: 1 })
        );
    }

    #[test]
    fn curve_examples() {
        let g = pv(&[0.6, 0.4]);
        let c = thermo_curve(&pv(&[0.5, 0.5]), &g).unwrap();
        assert_eq!(c.elbows, vec![(0.0, 0.0), (0.4, 0.5), (1.0, 1.0)]);

        let sharp = thermo_curve(&pv(&[1.0, 0.0]), &g).unwrap();
        assert_eq!(sharp.elbows, vec![(0.0, 0.0), (0.6, 1.0), (1.0, 1.0)]);
        assert!((curve_value(&sharp, 0.3).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(curve_value(&sharp, 1.0).unwrap(), 1.0);

        let diag = thermo_curve(&g, &g).unwrap();
        assert!((curve_value(&diag, 0.37).unwrap() - 0.37).abs() < 1e-15);
        assert!(curve_value(&diag, 1.5).is_err());
        assert!(curve_value(&diag, -0.1).is_err());
    }

    #[test]
    fn gibbs_dominated_only_by_itself() {
        let g = pv(&[0.5, 0.3, 0.2]);
        assert!(thermomajorises(&g, &g, &g).unwrap());
        assert!(!thermomajorises(&g, &pv(&[0.4, 0.4, 0.2]), &g).unwrap());
        let q = pv(&[0.1, 0.2, 0.7]);
        // the top sharp state dominates everything for any g
        assert!(thermomajorises(&pv(&[0.0, 0.0, 1.0]), &q, &g).unwrap());
        // the ground state only does so at infinite temperature
        assert!(!thermomajorises(&pv(&[1.0, 0.0, 0.0]), &q, &g).unwrap());
        let flat = ProbabilityVector::uniform(3);
        assert!(thermomajorises(&pv(&[1.0, 0.0, 0.0]), &q, &flat).unwrap());
    }

    #[test]
    fn extremal_two_levels() {
        let g = pv(&[0.8, 0.2]);
        let p = pv(&[0.3, 0.7]);
        let ext = extremal_achievable(&p, &g).unwrap();
        assert_eq!(ext.len(), 2);
        // the swapped state: 1 - p (1 - g) / g
        let other = 1.0 - 0.3 * 0.2 / 0.8;
        assert!(ext.iter().any(|q| (q[0] - 0.3).abs() < 1e-14));
        assert!(ext.iter().any(|q| (q[0] - other).abs() < 1e-14));

        let only = extremal_achievable(&g, &g).unwrap();
        assert_eq!(only.len(), 1);
        assert!(only[0].max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn thermalise_examples() {
        let g = pv(&[0.5, 0.3, 0.2]);
        let p = pv(&[0.1, 0.1, 0.8]);
        assert!(
            thermalise_subset(&p, &g, &[0, 1, 2])
                .unwrap()
                .max_abs_diff(&g)
                < 1e-15
        );
        assert_eq!(thermalise_subset(&p, &g, &[]).unwrap(), p);
        let q = thermalise_subset(&p, &g, &[1, 2]).unwrap();
        assert!((q[1] - 0.9 * 0.6).abs() < 1e-15);
        assert!(thermomajorises(&p, &q, &g).unwrap());
        assert!(thermalise_subset(&p, &g, &[3]).is_err());
    }

    #[test]
    fn transfer_examples() {
        let g = pv(&[0.5, 0.3, 0.2]);
        let p = pv(&[0.0, 0.5, 0.5]);
        let q = two_level_transfer(&p, &g, 0, 2, 0.5).unwrap();
        assert!(q.max_abs_diff(&pv(&[0.5, 0.5, 0.0])) < 1e-15);
        assert_eq!(two_level_transfer(&p, &g, 0, 2, 0.0).unwrap(), p);
        assert!(matches!(
            two_level_transfer(&p, &g, 1, 2, 0.1),
            Err(Error::Precondition { field: "p_i", .. })
        ));
        assert!(matches!(
            two_level_transfer(&pv(&[0.5, 0.5, 0.0]), &g, 2, 0, 0.1),
            Err(Error::Precondition {
                field: "levels",
                ..
            })
        ));
        assert!(matches!(
            two_level_transfer(&p, &g, 0, 2, 0.7),
            Err(Error::Precondition { field: "a", .. })
        ));
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.0, -0.1]).is_err());
        let p = ProbabilityVector::new(vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p[1], 0.0);
        assert!(EnergyLevels::new(vec![2.0, 1.0]).is_err());
        assert!(EnergyLevels::new(vec![1.0]).is_err());
        assert!(InverseTemperature::new(-1.0).is_err());
    }
}

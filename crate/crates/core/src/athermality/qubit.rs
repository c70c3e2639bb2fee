//! Closed-form reachability for the two-level engine.
//!
//! For `d = 2` each stroke has exactly two extreme outcomes: the identity and
//! the swap-like map `x -> 1 - x (1 - g) / g` on the ground weight. Composing
//! a cold and a hot swap is an affine contraction with ratio
//! `(1 - gamma)(1 - Gamma) / (gamma Gamma)`.

use serde::{Deserialize, Serialize};

use super::{tilde_states, EngineParams};
use crate::error::{Error, Result};
use crate::thermo::ProbabilityVector;

/// The non-trivial extreme map of a single stroke at Gibbs state `g`.
///
/// Panics if `p` or `g` is not two-dimensional.
pub fn pi_map(p: &ProbabilityVector, g: &ProbabilityVector) -> ProbabilityVector {
    assert!(p.dim() == 2 && g.dim() == 2, "pi_map needs two levels");
    let x = 1.0 - p[0] * (1.0 - g[0]) / g[0];
    ProbabilityVector::from_computed(vec![x, 1.0 - x])
}

pub fn qubit_contraction(params: &EngineParams) -> f64 {
    let (g, h) = (params.cold()[0], params.hot()[0]);
    (1.0 - g) * (1.0 - h) / (g * h)
}

fn ground(x: f64) -> ProbabilityVector {
    ProbabilityVector::from_computed(vec![x, 1.0 - x])
}

fn require_qubit(params: &EngineParams) -> Result<()> {
    if params.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: params.dim(),
        });
    }
    Ok(())
}

/// `m` rounds of (hot swap, then cold swap) and of (cold swap, then hot
/// swap) applied to `p`, in closed form.
pub fn qubit_orbit(
    p: &ProbabilityVector,
    params: &EngineParams,
    m: u32,
) -> Result<(ProbabilityVector, ProbabilityVector)> {
    require_qubit(params)?;
    let t = tilde_states(params)?;
    let rho = qubit_contraction(params).powi(m as i32);
    let (gt, ht) = (t.gamma_tilde[0], t.big_gamma_tilde[0]);
    let q = rho * (p[0] - gt) + gt;
    let r = rho * (p[0] - ht) + ht;
    Ok((ground(q), ground(r)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitRegime {
    /// `p` lies between the two fixed points; everything between them is
    /// reachable in the limit.
    Free,
    /// `p` is outside, nearer the cold fixed point; reachable set is the
    /// segment from `p` to its hot swap.
    ResourceHotSwap,
    /// `p` is outside, nearer the hot fixed point; reachable set is the
    /// segment from `p` to its cold swap.
    ResourceColdSwap,
    /// Finite number of strokes.
    Finite(usize),
}

/// A segment of two-level states, `upper` carrying more ground weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitReach {
    pub upper: ProbabilityVector,
    pub lower: ProbabilityVector,
    pub regime: QubitRegime,
}

/// Reachable segment from `p` after `strokes` further strokes (either agent
/// may start), or in the limit when `strokes` is `None`.
pub fn qubit_reachable_set(
    p: &ProbabilityVector,
    params: &EngineParams,
    strokes: Option<usize>,
) -> Result<QubitReach> {
    require_qubit(params)?;
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    let t = tilde_states(params)?;
    let (gt, ht) = (&t.gamma_tilde, &t.big_gamma_tilde);
    match strokes {
        None => {
            let x = p[0];
            if x <= gt[0] + 1e-15 && x >= ht[0] - 1e-15 {
                return Ok(QubitReach {
                    upper: gt.clone(),
                    lower: ht.clone(),
                    regime: QubitRegime::Free,
                });
            }
            let (other, regime) = if p.tv_distance(gt) < p.tv_distance(ht) {
                (pi_map(p, params.hot()), QubitRegime::ResourceHotSwap)
            } else {
                (pi_map(p, params.cold()), QubitRegime::ResourceColdSwap)
            };
            let (upper, lower) = if p[0] >= other[0] {
                (p.clone(), other)
            } else {
                (other, p.clone())
            };
            Ok(QubitReach {
                upper,
                lower,
                regime,
            })
        }
        Some(n) => {
            let mut xs = vec![p[0]];
            for len in 1..=n {
                let m = (len / 2) as u32;
                let (q, r) = qubit_orbit(p, params, m)?;
                if len % 2 == 0 {
                    xs.push(q[0]);
                    xs.push(r[0]);
                } else {
                    xs.push(pi_map(&q, params.hot())[0]);
                    xs.push(pi_map(&r, params.cold())[0]);
                }
            }
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(QubitReach {
                upper: ground(hi),
                lower: ground(lo),
                regime: QubitRegime::Finite(n),
            })
        }
    }
}

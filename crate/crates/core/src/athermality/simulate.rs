use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EngineParams;
use crate::error::{Error, Result};
use crate::hull::{hausdorff, prune};
use crate::thermo::{extremal_achievable, ProbabilityVector};

/// Vertex description of the states reachable after a number of strokes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachableSet {
    /// Extreme points, lexicographically sorted.
    pub vertices: Vec<ProbabilityVector>,
    /// Strokes used so far; the preparation of the starting state is stroke 1.
    pub stroke_index: usize,
    /// Set once the Hausdorff change stayed below the threshold for two
    /// consecutive strokes.
    pub converged: bool,
    /// Hausdorff distance to the previous stroke's vertex set.
    pub hausdorff_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Start {
    /// Cold agent prepares `gamma`; the hot agent acts next.
    FromCold,
    /// Hot agent prepares `Gamma`; the cold agent acts next.
    FromHot,
    /// An arbitrary initial state. Either agent may act first, so both
    /// alternations are tracked and their union reported.
    Custom(ProbabilityVector),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bath {
    Cold,
    Hot,
}

struct Chain {
    vertices: Vec<ProbabilityVector>,
    next: Bath,
}

fn expand(vertices: &[ProbabilityVector], g: &ProbabilityVector) -> Result<Vec<ProbabilityVector>> {
    let images: Vec<Vec<ProbabilityVector>> = vertices
        .par_iter()
        .map(|v| extremal_achievable(v, g))
        .collect::<Result<_>>()?;
    // prune sorts canonically, so the merged order does not depend on threads
    Ok(prune(&images.concat()))
}

/// Runs the alternating engine for up to `max_strokes` strokes.
///
/// Element `i` of the result holds the vertices after `i + 1` strokes, the
/// first being the starting state alone. Stops early once the vertex set moved
/// by less than `conv_tol` (Hausdorff) on two consecutive strokes.
pub fn simulate(
    params: &EngineParams,
    start: &Start,
    max_strokes: usize,
    conv_tol: f64,
) -> Result<Vec<ReachableSet>> {
    if max_strokes < 1 {
        return Err(Error::InvalidInput("max_strokes must be at least 1".into()));
    }
    let d = params.dim();
    for g in [params.cold(), params.hot()] {
        if let Some(index) = g.as_slice().iter().position(|&x| x <= 0.0) {
            return Err(Error::DegenerateGibbsWeight { index });
        }
    }
    let mut chains = match start {
        Start::FromCold => vec![Chain {
            vertices: vec![params.cold().clone()],
            next: Bath::Hot,
        }],
        Start::FromHot => vec![Chain {
            vertices: vec![params.hot().clone()],
            next: Bath::Cold,
        }],
        Start::Custom(p) => {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
            vec![
                Chain {
                    vertices: vec![p.clone()],
                    next: Bath::Cold,
                },
                Chain {
                    vertices: vec![p.clone()],
                    next: Bath::Hot,
                },
            ]
        }
    };

    let mut out = vec![ReachableSet {
        vertices: chains[0].vertices.clone(),
        stroke_index: 1,
        converged: false,
        hausdorff_delta: f64::INFINITY,
    }];
    let mut quiet = 0;
    for stroke in 2..=max_strokes {
        for chain in chains.iter_mut() {
            let g = match chain.next {
                Bath::Cold => params.cold(),
                Bath::Hot => params.hot(),
            };
            chain.vertices = expand(&chain.vertices, g)?;
            chain.next = match chain.next {
                Bath::Cold => Bath::Hot,
                Bath::Hot => Bath::Cold,
            };
        }
        let vertices = if chains.len() == 1 {
            chains[0].vertices.clone()
        } else {
            let all: Vec<ProbabilityVector> = chains
                .iter()
                .flat_map(|c| c.vertices.iter().cloned())
                .collect();
            prune(&all)
        };
        let delta = hausdorff(&out.last().unwrap().vertices, &vertices);
        quiet = if delta < conv_tol { quiet + 1 } else { 0 };
        let converged = quiet >= 2;
        out.push(ReachableSet {
            vertices,
            stroke_index: stroke,
            converged,
            hausdorff_delta: delta,
        });
        if converged {
            break;
        }
    }
    Ok(out)
}

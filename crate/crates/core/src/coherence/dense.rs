//! Randomized search for diagonal phases giving an entrywise non-zero product.

use nalgebra::DMatrix;

use super::{check_h2, CMatrix, DiagonalUnitary, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::tol::TOL_DENSE;

pub const RETRY_MAX: usize = 64;

/// `D_1 U^dagger D_2 U D_3 U^dagger D_4 U ...` for an even number of
/// diagonals.
///
/// Panics on an odd count or a dimension mismatch.
pub fn alternating_product(u: &UnitaryMatrix, diags: &[DiagonalUnitary]) -> CMatrix {
    assert!(diags.len() % 2 == 0, "need an even number of diagonals");
    let d = u.dim();
    let ud = u.matrix().adjoint();
    let mut out = CMatrix::identity(d, d);
    for pair in diags.chunks(2) {
        assert!(
            pair[0].dim() == d && pair[1].dim() == d,
            "diagonal has wrong size"
        );
        out = out * pair[0].matrix() * &ud * pair[1].matrix() * u.matrix();
    }
    out
}

/// `(X^T X)^m` with `X = |U|` entrywise; bounds `|product|` entrywise for any
/// choice of `2m` diagonals.
pub fn amplitude_bound_matrix(u: &UnitaryMatrix, m: usize) -> DMatrix<f64> {
    let x = u.amplitudes();
    let g = x.transpose() * &x;
    let d = u.dim();
    let mut out = DMatrix::identity(d, d);
    for _ in 0..m {
        out *= &g;
    }
    out
}

fn min_modulus(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// Draws uniform phases for `2m` diagonals until the alternating product has
/// every entry above [`TOL_DENSE`] in modulus. Attempt `k` uses the generator
/// derived from `(seed, k)`.
pub fn synthesize_dense_product(
    u: &UnitaryMatrix,
    m: usize,
    seed: u64,
) -> Result<Vec<DiagonalUnitary>> {
    let verdict = check_h2(u);
    let Some(min_m) = verdict.minimal_m else {
        return Err(Error::StructuralImpossibility(
            "no Boolean power of the Gram pattern is all non-zero".into(),
        ));
    };
    if m < min_m {
        return Err(Error::precondition(
            "m",
            format!("m = {m} is below the minimal power {min_m}"),
        ));
    }
    let d = u.dim();
    for attempt in 0..RETRY_MAX {
        let mut rng = rng_for(seed, &[attempt as u64]);
        let diags: Vec<_> = (0..2 * m)
            .map(|_| DiagonalUnitary::random(d, &mut rng))
            .collect();
        if min_modulus(&alternating_product(u, &diags)) > TOL_DENSE {
            return Ok(diags);
        }
    }
    Err(Error::RetryExhausted {
        seed,
        attempts: RETRY_MAX,
    })
}

//! Stroke-count bounds and the Fourier family.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{CMatrix, UnitaryMatrix};
use crate::error::{Error, Result};

fn require_d3(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::Domain {
            what: "dimension",
            value: d as f64,
            domain: "d >= 3",
        });
    }
    Ok(())
}

/// Largest off-diagonal entry of `X^T X` with `X = |U|` entrywise.
pub fn c_u(u: &UnitaryMatrix) -> Result<f64> {
    let d = u.dim();
    require_d3(d)?;
    let x = u.amplitudes();
    let g = x.transpose() * &x;
    let mut best = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            if a != b {
                best = best.max(g[(a, b)]);
            }
        }
    }
    Ok(best)
}

/// `2 log(d - 1) / log((d - 2) c_U + 1)`, infinite when `c_U = 0`.
///
/// `c_U` is clamped to `[0, 1]` first; values above 1 can only come from
/// rounding.
pub fn lower_bound_strokes(u: &UnitaryMatrix) -> Result<f64> {
    let d = u.dim();
    let c = c_u(u)?.clamp(0.0, 1.0);
    if c == 0.0 {
        return Ok(f64::INFINITY);
    }
    let n = (d - 1) as f64;
    Ok(2.0 * n.ln() / ((d - 2) as f64 * c).ln_1p())
}

/// `6 d (n_f + 1) + 1` for even `d >= 4`.
pub fn upper_bound_strokes(d: usize, n_f: usize) -> Result<usize> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::Domain {
            what: "dimension",
            value: d as f64,
            domain: "even d >= 4",
        });
    }
    if n_f < 1 {
        return Err(Error::Domain {
            what: "n_f",
            value: n_f as f64,
            domain: "n_f >= 1",
        });
    }
    Ok(6 * d * (n_f + 1) + 1)
}

/// `F_jk = w^{jk} / sqrt(d)` with `w = e^{2 pi i / d}`.
pub fn fourier(d: usize) -> UnitaryMatrix {
    let s = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |j, k| {
        Complex64::from_polar(s, TAU * ((j * k) % d) as f64 / d as f64)
    });
    UnitaryMatrix::from_trusted(m)
}

/// `F_d^alpha` from the spectral projectors of `F_d`, whose eigenvalues lie in
/// `{1, i, -1, -i}`. Eigenphases use the principal branch `(-pi, pi]`.
pub fn fractional_fourier(d: usize, alpha: f64) -> Result<UnitaryMatrix> {
    if d < 2 {
        return Err(Error::Domain {
            what: "dimension",
            value: d as f64,
            domain: "d >= 2",
        });
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("alpha {alpha} is not finite")));
    }
    let f = fourier(d);
    if alpha == 1.0 {
        return Ok(f);
    }
    let f = f.into_matrix();
    let id = CMatrix::identity(d, d);
    let mut out = CMatrix::zeros(d, d);
    for phase in [0.0, FRAC_PI_2, PI, -FRAC_PI_2] {
        // P = (1/4) sum_j (F / lambda)^j
        let g = &f * Complex64::from_polar(1.0, -phase);
        let mut term = id.clone();
        let mut proj = id.clone();
        for _ in 1..4 {
            term = &term * &g;
            proj += &term;
        }
        out += proj * Complex64::from_polar(0.25, alpha * phase);
    }
    UnitaryMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::phase_invariant_distance;
    use crate::rng::rng_for;

    #[test]
    fn c_u_values() {
        assert_eq!(c_u(&UnitaryMatrix::identity(4)).unwrap(), 0.0);
        for d in 3..11 {
            assert!((c_u(&fourier(d)).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(c_u(&fourier(2)).is_err());
        let mut rng = rng_for(11, &[]);
        for _ in 0..50 {
            let c = c_u(&UnitaryMatrix::haar_random(5, &mut rng)).unwrap();
            assert!((0.0..=1.0 + 1e-14).contains(&c));
        }
    }

    #[test]
    fn lower_bound_values() {
        for d in 3..11 {
            assert!((lower_bound_strokes(&fourier(d)).unwrap() - 2.0).abs() < 1e-12);
        }
        assert_eq!(
            lower_bound_strokes(&UnitaryMatrix::identity(3)).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn upper_bound_values() {
        assert_eq!(upper_bound_strokes(4, 3).unwrap(), 97);
        assert_eq!(upper_bound_strokes(6, 1).unwrap(), 73);
        assert!(upper_bound_strokes(5, 2).is_err());
        assert!(upper_bound_strokes(2, 2).is_err());
        assert!(upper_bound_strokes(4, 0).is_err());
    }

    #[test]
    fn fractional_endpoints_and_square_root() {
        for d in 2..8 {
            assert_eq!(fractional_fourier(d, 1.0).unwrap(), fourier(d));
            let z = fractional_fourier(d, 0.0).unwrap();
            assert!((z.matrix() - CMatrix::identity(d, d)).norm() < 1e-10);
            let h = fractional_fourier(d, 0.5).unwrap();
            let sq = h.matrix() * h.matrix();
            assert!((sq - fourier(d).matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn fourier_fourth_power_is_identity() {
        let f = fourier(5).into_matrix();
        let f4 = &f * &f * &f * &f;
        assert!(phase_invariant_distance(&f4, &CMatrix::identity(5, 5)) < 1e-12);
    }
}

//! Coherence engine for general `d`.
//!
//! Agent A applies diagonal unitaries `D`; agent B applies `U^dagger D U` for
//! a fixed unitary `U` relating the two distinguished bases.

mod bounds;
mod dense;
pub mod examples;
mod pattern;

pub use bounds::{c_u, fourier, fractional_fourier, lower_bound_strokes, upper_bound_strokes};
pub use dense::{alternating_product, amplitude_bound_matrix, synthesize_dense_product, RETRY_MAX};
pub use pattern::{
    check_h2, check_h2_pattern, gram_pattern, graph_diagnosis, pattern_matrix, GraphDiagnosis,
    H2Verdict, PatternMatrix,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::tol::TOL_UNITARY;

pub type CMatrix = DMatrix<Complex64>;

/// A square matrix with `U^dagger U = I` up to [`TOL_UNITARY`] (Frobenius).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, TOL_UNITARY)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let defect = unitarity_defect(&m);
        if !(defect <= tol) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(UnitaryMatrix(m))
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        UnitaryMatrix(m)
    }

    pub fn identity(d: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(d, d))
    }

    /// Haar-random unitary via QR of a complex Gaussian matrix, with the
    /// phases of `R`'s diagonal absorbed so the distribution is uniform.
    pub fn haar_random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let g = CMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for j in 0..d {
            let rjj = r[(j, j)];
            let ph = if rjj.norm() > 0.0 {
                rjj / rjj.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            for i in 0..d {
                q[(i, j)] *= ph;
            }
        }
        UnitaryMatrix(q)
    }

    /// Real permutation matrix with `U[(perm[j], j)] = 1`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidInput(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        let mut m = CMatrix::zeros(d, d);
        for (j, &p) in perm.iter().enumerate() {
            m[(p, j)] = Complex64::new(1.0, 0.0);
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(&self.0 * &other.0)
    }

    /// Entrywise moduli `x_ij = |u_ij|`.
    pub fn amplitudes(&self) -> DMatrix<f64> {
        self.0.map(|z| z.norm())
    }

    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }
}

/// `||M^dagger M - I||_F`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let d = m.nrows();
    (m.adjoint() * m - CMatrix::identity(d, d)).norm()
}

/// `min_phi ||a - e^{i phi} b||_F`, with the optimal phase taken from
/// `tr(b^dagger a)` and the norm evaluated directly.
pub fn phase_invariant_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let tr = (b.adjoint() * a).trace();
    let ph = if tr.norm() > 0.0 {
        tr / tr.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (a - b * ph).norm()
}

/// `diag(e^{i theta_1}, ..., e^{i theta_d})`, phases stored in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalUnitary {
    phases: Vec<f64>,
}

impl DiagonalUnitary {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(p) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("phase {p} is not finite")));
        }
        Ok(DiagonalUnitary {
            phases: phases.into_iter().map(|p| p.rem_euclid(TAU)).collect(),
        })
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        DiagonalUnitary {
            phases: (0..d).map(|_| rng.random_range(0.0..TAU)).collect(),
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn entries(&self) -> Vec<Complex64> {
        self.phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect()
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.entries()))
    }
}

//! Fixed matrices used in tests and by the CLI's built-in sources.

use num_complex::Complex64;

use super::{CMatrix, PatternMatrix, UnitaryMatrix};

fn real(d: usize, scale: f64, rows: &[&[f64]]) -> UnitaryMatrix {
    let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(scale * rows[i][j], 0.0));
    UnitaryMatrix::new(m).expect("built-in matrix is unitary")
}

/// 6x6 real orthogonal matrix whose Gram pattern `P^T P` becomes all-true
/// after squaring.
pub fn two_step_dense_6() -> UnitaryMatrix {
    let r = std::f64::consts::SQRT_2;
    real(
        6,
        0.5,
        &[
            &[0.0, 0.0, -1.0, 1.0, 1.0, 1.0],
            &[1.0, 1.0, -1.0, -1.0, 0.0, 0.0],
            &[-r, r, 0.0, 0.0, 0.0, 0.0],
            &[-1.0, -1.0, -1.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, r, -r],
            &[0.0, 0.0, 1.0, -1.0, 1.0, 1.0],
        ],
    )
}

/// Zero pattern of a 6-state irreducible, aperiodic transition matrix; it
/// coincides with the Gram pattern of [`two_step_dense_6`].
pub fn transition_pattern_6() -> PatternMatrix {
    let t = [
        [5, 2, 2, 1, 0, 0],
        [2, 5, 2, 1, 0, 0],
        [1, 1, 1, 1, 2, 4],
        [2, 2, 1, 1, 1, 3],
        [0, 0, 3, 4, 1, 2],
        [0, 0, 1, 2, 6, 1],
    ];
    PatternMatrix::from_bits(
        t.iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect(),
    )
}

/// `diag(1, 1, R)` with `R` a rotation by 45 degrees.
pub fn block_diagonal_4() -> UnitaryMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real(
        4,
        1.0,
        &[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, s, -s],
            &[0.0, 0.0, s, s],
        ],
    )
}

/// Two interleaved 2x2 Hadamard-like blocks on levels `{0, 3}` and `{1, 2}`.
pub fn interleaved_blocks_4() -> UnitaryMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real(
        4,
        1.0,
        &[
            &[-s, 0.0, 0.0, s],
            &[0.0, -s, s, 0.0],
            &[0.0, s, s, 0.0],
            &[s, 0.0, 0.0, s],
        ],
    )
}

/// The cyclic shift on four levels.
pub fn cyclic_shift_4() -> UnitaryMatrix {
    real(
        4,
        1.0,
        &[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
        ],
    )
}

/// Blocks on `{0, 3}` and `{1, 2}` with rows permuted.
pub fn permuted_blocks_4() -> UnitaryMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real(
        4,
        1.0,
        &[
            &[0.0, -s, s, 0.0],
            &[-s, 0.0, 0.0, s],
            &[s, 0.0, 0.0, s],
            &[0.0, s, s, 0.0],
        ],
    )
}

/// Qubit family `[[e^{i a} cos phi, -e^{-i b} sin phi], [e^{i b} sin phi, e^{-i a} cos phi]]`.
pub fn qubit_family(phi: f64, a: f64, b: f64) -> UnitaryMatrix {
    let (c, s) = (phi.cos(), phi.sin());
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(c, a),
            -Complex64::from_polar(s, -b),
            Complex64::from_polar(s, b),
            Complex64::from_polar(c, -a),
        ],
    );
    UnitaryMatrix::new(m).expect("qubit family is unitary")
}

//! Two-axis qubit coherence engine.
//!
//! Agent A rotates about `z`; agent B rotates about `n = (sin a, 0, cos a)`,
//! where `a` is the axis tilt. Rotations follow `R_n(theta) = exp(i theta n.sigma)`,
//! so a rotation by `theta` turns the Bloch sphere by `2 theta`.
//!
//! The unitary family `[[cos phi, -sin phi], [sin phi, cos phi]]` (up to
//! phases) relates to the axis tilt by `a = 2 phi`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, TAU};

use crate::coherence::{phase_invariant_distance, CMatrix, UnitaryMatrix};
use crate::error::{Error, Result};

const Z: [f64; 3] = [0.0, 0.0, 1.0];
const ANGLE_EPS: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tilted axis `(sin a, 0, cos a)`.
pub fn tilted_axis(alpha_axis: f64) -> [f64; 3] {
    [alpha_axis.sin(), 0.0, alpha_axis.cos()]
}

pub fn axis_tilt_from_phi(phi: f64) -> f64 {
    2.0 * phi
}

pub fn phi_from_axis_tilt(alpha_axis: f64) -> f64 {
    alpha_axis / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    axis: [f64; 3],
    angle: f64,
}

impl Rotation {
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("axis norm {norm} is not 1")));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidInput(format!("angle {angle} is not finite")));
        }
        Ok(Rotation { axis, angle })
    }

    pub fn z(angle: f64) -> Self {
        Rotation { axis: Z, angle }
    }

    pub fn tilted(alpha_axis: f64, angle: f64) -> Self {
        Rotation {
            axis: tilted_axis(alpha_axis),
            angle,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn is_z(&self) -> bool {
        self.axis == Z
    }

    pub fn matrix(&self) -> CMatrix {
        let (s, co) = self.angle.sin_cos();
        let [x, y, z] = self.axis;
        // cos t I + i sin t (x sx + y sy + z sz)
        CMatrix::from_row_slice(
            2,
            2,
            &[
                c(co, s * z),
                c(s * y, s * x),
                c(-s * y, s * x),
                c(co, -s * z),
            ],
        )
    }
}

pub fn rotation_matrix(r: &Rotation) -> UnitaryMatrix {
    UnitaryMatrix::from_trusted(r.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub beta: f64,
    /// In `[0, pi/2]`, which covers all of `SU(2)` in this angle convention.
    pub gamma: f64,
    pub delta: f64,
    pub global_phase: f64,
}

impl EulerAngles {
    /// `e^{i phase} R_z(beta) R_x(gamma) R_z(delta)`.
    pub fn matrix(&self) -> CMatrix {
        Rotation::z(self.beta).matrix()
            * Rotation::new([1.0, 0.0, 0.0], self.gamma).unwrap().matrix()
            * Rotation::z(self.delta).matrix()
            * Complex64::from_polar(1.0, self.global_phase)
    }
}

fn require_qubit(v: &UnitaryMatrix) -> Result<()> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: v.dim(),
        });
    }
    Ok(())
}

/// Decomposes `V = e^{i phase} R_z(beta) R_x(gamma) R_z(delta)` with `beta`,
/// `delta` in `[0, 2 pi)`.
pub fn euler_zxz(v: &UnitaryMatrix) -> Result<EulerAngles> {
    require_qubit(v)?;
    let m = v.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let w = m * Complex64::from_polar(1.0, -det.arg() / 2.0);
    let (a, b) = (w[(0, 0)], w[(0, 1)]);
    // W = [[e^{i(beta+delta)} cos g, i e^{i(beta-delta)} sin g], ...]
    let gamma = b.norm().atan2(a.norm());
    let (beta, delta) = if b.norm() < 1e-15 {
        (a.arg(), 0.0)
    } else if a.norm() < 1e-15 {
        (b.arg() - FRAC_PI_2, 0.0)
    } else {
        (
            (a.arg() + b.arg() - FRAC_PI_2) / 2.0,
            (a.arg() - b.arg() + FRAC_PI_2) / 2.0,
        )
    };
    let mut e = EulerAngles {
        beta: beta.rem_euclid(TAU),
        gamma,
        delta: delta.rem_euclid(TAU),
        global_phase: 0.0,
    };
    let tr = (e.matrix().adjoint() * m).trace();
    e.global_phase = tr.arg();
    Ok(e)
}

/// Alternating rotations in time order: `rotations[0]` acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokePlan {
    pub alpha_axis: f64,
    pub rotations: Vec<Rotation>,
}

impl StrokePlan {
    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    /// No two consecutive rotations share an axis.
    pub fn is_alternating(&self) -> bool {
        self.rotations.windows(2).all(|w| w[0].axis != w[1].axis)
    }

    /// Product `R_last ... R_first`.
    pub fn unitary(&self) -> CMatrix {
        self.rotations
            .iter()
            .fold(CMatrix::identity(2, 2), |acc, r| r.matrix() * acc)
    }
}

fn trivial_angle(t: f64) -> bool {
    let r = t.rem_euclid(PI);
    r < ANGLE_EPS || PI - r < ANGLE_EPS
}

/// Drops rotations equal to `+-I` and merges neighbours that share an axis.
fn simplify(mut rs: Vec<Rotation>) -> Vec<Rotation> {
    loop {
        let before = rs.len();
        rs.retain(|r| !trivial_angle(r.angle));
        let mut out: Vec<Rotation> = Vec::with_capacity(rs.len());
        for r in rs {
            match out.last_mut() {
                Some(last) if last.axis == r.axis => last.angle += r.angle,
                _ => out.push(r),
            }
        }
        rs = out;
        if rs.len() == before {
            return rs;
        }
    }
}

fn wrap(rs: Vec<Rotation>) -> Vec<Rotation> {
    rs.into_iter()
        .map(|r| Rotation {
            angle: r.angle.rem_euclid(TAU),
            ..r
        })
        .collect()
}

fn check_alpha(alpha_axis: f64) -> Result<()> {
    if !(alpha_axis > 0.0 && alpha_axis <= FRAC_PI_2 + ANGLE_EPS) {
        return Err(Error::Domain {
            what: "alpha_axis",
            value: alpha_axis,
            domain: "(0, pi/2]",
        });
    }
    Ok(())
}

fn ceil_tol(x: f64) -> usize {
    (x - 1e-12).ceil().max(0.0) as usize
}

/// `2 ceil(pi / (2a)) + 1`, the length the construction guarantees.
pub fn constructive_stroke_bound(alpha_axis: f64) -> usize {
    2 * ceil_tol(PI / (2.0 * alpha_axis)) + 1
}

/// `ceil(pi / a) + 1`.
pub fn sharp_stroke_bound(alpha_axis: f64) -> usize {
    ceil_tol(PI / alpha_axis) + 1
}

/// `ceil(pi / (2a)) + 1`, for reaching a state from a pole.
pub fn state_stroke_bound(alpha_axis: f64) -> usize {
    ceil_tol(PI / (2.0 * alpha_axis)) + 1
}

/// Time-ordered rotations realising `R_z(beta) R_x(gamma) R_z(delta)` up to
/// phase, before simplification.
fn raw_plan(e: &EulerAngles, alpha_axis: f64) -> Vec<Rotation> {
    if e.gamma < ANGLE_EPS {
        return vec![Rotation::z(e.beta + e.delta)];
    }
    let k = ceil_tol(e.gamma / alpha_axis).max(1);
    // full pieces first, remainder last
    let pieces: Vec<f64> = (0..k)
        .map(|i| {
            if i + 1 < k {
                alpha_axis
            } else {
                e.gamma - (k - 1) as f64 * alpha_axis
            }
        })
        .collect();
    let sin_a = alpha_axis.sin();

    // R_x(g) = R_z(-bt) R_n(theta) R_z(-dt), with bt = dt read off the Euler
    // angles of R_n(theta).
    let mut rs = vec![Rotation::z(e.delta)];
    for &g in &pieces {
        let theta = (g.sin() / sin_a).clamp(-1.0, 1.0).asin();
        let rn = Rotation::tilted(alpha_axis, theta);
        let en = euler_zxz(&rotation_matrix(&rn)).expect("2x2");
        rs.push(Rotation::z(-en.delta));
        rs.push(rn);
        rs.push(Rotation::z(-en.beta));
    }
    rs.push(Rotation::z(e.beta));
    rs
}

/// Alternating plan realising `v` up to global phase.
pub fn synthesize_unitary(v: &UnitaryMatrix, alpha_axis: f64) -> Result<StrokePlan> {
    check_alpha(alpha_axis)?;
    let e = euler_zxz(v)?;
    Ok(StrokePlan {
        alpha_axis,
        rotations: wrap(simplify(raw_plan(&e, alpha_axis))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSynthesis {
    /// Starting basis state, 0 or 1.
    pub pole: usize,
    pub plan: StrokePlan,
}

impl StateSynthesis {
    pub fn final_state(&self) -> [Complex64; 2] {
        let u = self.plan.unitary();
        [u[(0, self.pole)], u[(1, self.pole)]]
    }
}

/// Starts from the pole nearer `target` and drops the leading `z` rotation,
/// which only changes the pole's phase.
pub fn synthesize_state(target: [Complex64; 2], alpha_axis: f64) -> Result<StateSynthesis> {
    check_alpha(alpha_axis)?;
    let norm = (target[0].norm_sqr() + target[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("target norm {norm} is not 1")));
    }
    let [p0, p1] = target;
    let (pole, entries) = if p0.norm() >= p1.norm() {
        (0, [p0, -p1.conj(), p1, p0.conj()])
    } else {
        (1, [p1.conj(), p0, -p0.conj(), p1])
    };
    let v = UnitaryMatrix::from_trusted(CMatrix::from_row_slice(2, 2, &entries));
    let e = euler_zxz(&v)?;
    let mut rs = raw_plan(&e, alpha_axis);
    rs.remove(0);
    let mut rs = simplify(rs);
    if rs.first().is_some_and(|r| r.is_z()) {
        rs.remove(0);
    }
    Ok(StateSynthesis {
        pole,
        plan: StrokePlan {
            alpha_axis,
            rotations: wrap(rs),
        },
    })
}

pub fn fidelity(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Phase-invariant distance between a plan's product and `v`.
pub fn plan_error(plan: &StrokePlan, v: &UnitaryMatrix) -> f64 {
    phase_invariant_distance(&plan.unitary(), v.matrix())
}

/// Whether three strokes can prepare a state unbiased in both bases, for the
/// family parameter `phi`.
///
/// Only `|cos phi|` matters, so `phi` is folded into `[0, pi/2]` first. The
/// closed interval `[pi/8, 3 pi/8]` is tested with a `1e-12` slack.
pub fn three_stroke_feasible(phi: f64) -> bool {
    let mut f = phi.rem_euclid(PI);
    if f > FRAC_PI_2 {
        f = PI - f;
    }
    f >= FRAC_PI_8 - ANGLE_EPS && f <= 3.0 * FRAC_PI_8 + ANGLE_EPS
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Bloch vector of the state unbiased in the eigenbases of `m.sigma` and
/// `n.sigma`: the normalised `m x n`.
pub fn max_mutual_qubit(m: [f64; 3], n: [f64; 3]) -> Result<[f64; 3]> {
    let r = cross(m, n);
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::InvalidInput("axes are parallel".into()));
    }
    Ok(r.map(|x| x / norm))
}

pub fn bloch_vector(psi: [Complex64; 2]) -> [f64; 3] {
    let z = psi[0].conj() * psi[1];
    [
        2.0 * z.re,
        2.0 * z.im,
        psi[0].norm_sqr() - psi[1].norm_sqr(),
    ]
}

/// A state with the given Bloch vector; the first amplitude is real.
pub fn state_from_bloch(r: [f64; 3]) -> [Complex64; 2] {
    let theta = r[2].clamp(-1.0, 1.0).acos();
    let phi = r[1].atan2(r[0]);
    [
        c((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// `U` with rows equal to the eigenvectors of `n.sigma`, so that agent B's
/// basis is `{U^dagger |j>}`.
pub fn axis_basis_unitary(alpha_axis: f64) -> UnitaryMatrix {
    let (s, co) = (alpha_axis / 2.0).sin_cos();
    UnitaryMatrix::from_trusted(CMatrix::from_row_slice(
        2,
        2,
        &[c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0)],
    ))
}

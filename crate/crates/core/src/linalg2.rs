//! Real 2x2 matrix algebra: commutators, the functionally commutative
//! structured form, and closed-form matrix exponentials.
//!
//! A matrix function with entries `[[a11, a12], [c1*a12, a11 + c2*a12]]`
//! commutes with itself across times, because every value is a polynomial
//! in the one companion generator `N = [[0, 1], [c1, c2]]`. Its fundamental
//! matrix is therefore the exponential of the entrywise integral, which
//! splits into a scalar factor and `exp(q * N)`.

use crate::error::Error;
use crate::expr::{integrate, EvalError, Expr};
use std::ops::{Add, Mul, Sub};

/// Discriminant magnitudes below this use the repeated-root formula; the
/// split avoids catastrophic cancellation in `sinh(w*tau)/w` as `w -> 0`.
pub const DEGENERATE_DELTA: f64 = 1e-12;

/// Relative tolerance of the commutativity verdict. Commutator entries are
/// bilinear in the matrix entries, so the scale is the squared entry bound.
const COMMUTATIVITY_TOL: f64 = 1e-10;

/// Real 2x2 matrix, row-major fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

/// State of the linearized system: `u` and its derivative `z = u'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub u: f64,
    pub z: f64,
}

impl Vec2 {
    pub fn new(u: f64, z: f64) -> Vec2 {
        Vec2 { u, z }
    }

    pub fn norm(self) -> f64 {
        self.u.hypot(self.z)
    }
}

impl Mat2 {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Mat2 {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Mat2 {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Companion generator `[[0, 1], [c1, c2]]` of `u'' = c1 u + c2 u'`.
    pub fn companion(c1: f64, c2: f64) -> Mat2 {
        Mat2::new(0.0, 1.0, c1, c2)
    }

    pub fn det(self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn frobenius_norm(self) -> f64 {
        (self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22)
            .sqrt()
    }

    pub fn max_abs_entry(self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2 {
            u: self.a11 * v.u + self.a12 * v.z,
            z: self.a21 * v.u + self.a22 * v.z,
        }
    }

    pub fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2 {
            a11: self.a11 * rhs.a11 + self.a12 * rhs.a21,
            a12: self.a11 * rhs.a12 + self.a12 * rhs.a22,
            a21: self.a21 * rhs.a11 + self.a22 * rhs.a21,
            a22: self.a21 * rhs.a12 + self.a22 * rhs.a22,
        }
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;

    fn mul(self, k: f64) -> Mat2 {
        Mat2::new(self.a11 * k, self.a12 * k, self.a21 * k, self.a22 * k)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

/// `M N - N M`.
pub fn commutator(m: Mat2, n: Mat2) -> Mat2 {
    m * n - n * m
}

/// Matrix function `[[a11, a12], [c1*a12, a11 + c2*a12]]` with the two
/// structure constants fixed. Functional commutativity holds by
/// construction for every choice of `a11`, `a12`, `c1`, `c2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form5 {
    pub a11: Expr,
    pub a12: Expr,
    pub c1: f64,
    pub c2: f64,
}

impl Form5 {
    pub fn new(a11: Expr, a12: Expr, c1: f64, c2: f64) -> Form5 {
        Form5 { a11, a12, c1, c2 }
    }

    /// The matrix value at `t`. The structured entries are derived from the
    /// evaluated `a11(t)`, `a12(t)`, so the defining relations hold exactly.
    pub fn at(&self, t: f64) -> Result<Mat2, EvalError> {
        let a11 = self.a11.eval(t)?;
        let a12 = self.a12.eval(t)?;
        Ok(Mat2::new(a11, a12, self.c1 * a12, a11 + self.c2 * a12))
    }
}

/// Result of sampling the functional commutativity condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutativityReport {
    /// Largest Frobenius norm of `A(t')A(t'') - A(t'')A(t')` over all
    /// sample pairs.
    pub max_commutator_norm: f64,
    pub pass: bool,
}

/// Sample the commutativity condition `A(t')A(t'') = A(t'')A(t')` on every
/// pair of the given sample points.
///
/// Passes when the largest commutator norm stays below a tolerance scaled
/// by the squared entry magnitude. At least two sample points are required.
pub fn funcomm_check<F>(matrix_fn: F, samples: &[f64]) -> Result<CommutativityReport, Error>
where
    F: Fn(f64) -> Result<Mat2, EvalError>,
{
    if samples.len() < 2 {
        return Err(Error::invalid_input(
            "commutativity check needs at least two sample points",
        ));
    }
    let mut mats = Vec::with_capacity(samples.len());
    for &t in samples {
        mats.push(matrix_fn(t)?);
    }
    let scale = mats
        .iter()
        .map(|m| m.max_abs_entry())
        .fold(0.0_f64, f64::max);
    let mut max_norm = 0.0_f64;
    for i in 0..mats.len() {
        for j in (i + 1)..mats.len() {
            max_norm = max_norm.max(commutator(mats[i], mats[j]).frobenius_norm());
        }
    }
    Ok(CommutativityReport {
        max_commutator_norm: max_norm,
        pass: max_norm <= COMMUTATIVITY_TOL * (1.0 + scale * scale),
    })
}

/// `exp(tau * N)` for the companion generator `N = [[0, 1], [c1, c2]]`.
///
/// With `lambda = c2/2` the shifted generator `N - lambda*I` squares to
/// `(delta/4) * I`, `delta = c2^2 + 4 c1`, so the series collapses into one
/// of three closed forms selected by the sign of the discriminant:
/// hyperbolic (`delta > 0`), repeated-root (`|delta| <= 1e-12`) and
/// trigonometric (`delta < 0`).
pub fn expm_companion(c1: f64, c2: f64, tau: f64) -> Result<Mat2, Error> {
    let lambda = 0.5 * c2;
    let delta = c2 * c2 + 4.0 * c1;
    let shifted = Mat2::companion(c1, c2) - Mat2::identity() * lambda;
    let scale = (lambda * tau).exp();
    let m = if delta.abs() <= DEGENERATE_DELTA {
        (Mat2::identity() + shifted * tau) * scale
    } else if delta > 0.0 {
        let omega = 0.5 * delta.sqrt();
        let arg = omega * tau;
        (Mat2::identity() * arg.cosh() + shifted * (arg.sinh() / omega)) * scale
    } else {
        let omega = 0.5 * (-delta).sqrt();
        let arg = omega * tau;
        (Mat2::identity() * arg.cos() + shifted * (arg.sin() / omega)) * scale
    };
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Overflow {
            context: format!("exp(tau*N) with c1 = {c1}, c2 = {c2}, tau = {tau}"),
        })
    }
}

/// `exp(p*I + q*N) = e^p * exp(q*N)` for the companion generator `N`.
pub fn expm_structured(p: f64, q: f64, c1: f64, c2: f64) -> Result<Mat2, Error> {
    let m = expm_companion(c1, c2, q)? * p.exp();
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Overflow {
            context: format!("exp(p*I + q*N) with p = {p}, q = {q}, c1 = {c1}, c2 = {c2}"),
        })
    }
}

/// Fundamental matrix `X(t) = exp(int_0^t A)` of the structured system,
/// with both entry integrals evaluated by adaptive quadrature to `tol`.
///
/// `X(0)` is the identity exactly.
pub fn fundamental_matrix(form: &Form5, t: f64, tol: f64) -> Result<Mat2, Error> {
    let p = integrate(&|x| form.a11.eval(x), 0.0, t, tol)?;
    let q = integrate(&|x| form.a12.eval(x), 0.0, t, tol)?;
    expm_structured(p, q, form.c1, form.c2)
}

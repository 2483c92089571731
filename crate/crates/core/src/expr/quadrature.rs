//! Adaptive Simpson quadrature with an absolute error target.

use super::{EvalError, Expr};

/// Maximum subdivision depth before giving up on an interval.
const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("integrand not finite at t = {t}: {source}")]
    NonFinite { t: f64, source: EvalError },
    #[error("quadrature subdivision limit reached on [{a}, {b}]")]
    DepthLimit { a: f64, b: f64 },
}

/// Adaptive Simpson estimate of the integral of `f` over `[a, b]`.
///
/// The target is an absolute error of `tol`; swapping the endpoints negates
/// the result. Each accepted panel applies one Richardson extrapolation, so
/// the realized error is usually well below the target.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    assert!(tol > 0.0, "quadrature tolerance must be positive");
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let fa = sample(f, a)?;
    let m = 0.5 * (a + b);
    let fm = sample(f, m)?;
    let fb = sample(f, b)?;
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, m, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integral of the expression `f` from `a` to `b` with absolute tolerance `tol`.
pub fn antiderivative(f: &Expr, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    integrate(&|t| f.eval(t), a, b, tol)
}

fn sample<F>(f: &F, t: f64) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    match f(t) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(QuadratureError::NonFinite {
            t,
            source: EvalError {
                kind: super::EvalErrorKind::NonFinite,
                node: String::from("integrand"),
                t,
            },
        }),
        Err(source) => Err(QuadratureError::NonFinite { t, source }),
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = sample(f, lm)?;
    let frm = sample(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(QuadratureError::DepthLimit { a, b });
    }
    let half = 0.5 * tol;
    let l = refine(f, a, lm, m, fa, flm, fm, left, half, depth - 1)?;
    let r = refine(f, m, rm, b, fm, frm, fb, right, half, depth - 1)?;
    Ok(l + r)
}

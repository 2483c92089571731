//! The three quadrature-integrable coefficient families of the Riccati
//! equation `y' = P(t) y^2 + Q(t) y + F(t)`, family detection, and
//! closed-form solutions through the companion-matrix propagator.
//!
//! Substituting `y = -(1/P) u'/u` linearizes the equation; for the three
//! families the companion matrix of the linear system is the constant
//! `[[0, 1], [c1, c2]]`, so `(u, z)` propagates by a closed-form matrix
//! exponential and `y` is the Moebius quotient `-z / (P u)`.

mod paper;

pub use paper::{
    crosscheck_paper_formula, paper_solution_f, paper_solution_p, paper_solution_q,
    CrosscheckReport,
};

use crate::error::Error;
use crate::expr::{integrate, EvalError, EvalErrorKind, Expr};
use crate::linalg2::{expm_companion, Mat2, Vec2};
use crate::DEFAULT_QUAD_TOL;

/// `|u|` below this fraction of the state norm counts as a pole of the
/// Moebius quotient; smaller quotients carry no double-precision meaning.
pub const POLE_STATE_TOL: f64 = 1e-13;

/// Which coefficient of the family is the arbitrary function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    FArbitrary,
    PArbitrary,
    QArbitrary,
}

/// A fully specified integrable family instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub c1: f64,
    pub c2: f64,
    /// The scale constant `C` of the Q-arbitrary family; ignored by the
    /// other two kinds.
    pub scale: f64,
    /// The arbitrary coefficient function.
    pub g: Expr,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, g: Expr, c1: f64, c2: f64, scale: f64) -> FamilySpec {
        FamilySpec {
            kind,
            c1,
            c2,
            scale,
            g,
        }
    }

    /// Materialize the coefficient triple, integrating with `quad_tol`
    /// where the construction needs an antiderivative.
    pub fn coefficients(&self, quad_tol: f64) -> Result<Coefficients, Error> {
        match self.kind {
            FamilyKind::FArbitrary => make_family_f(self.g.clone(), self.c1, self.c2),
            FamilyKind::PArbitrary => make_family_p(self.g.clone(), self.c1, self.c2),
            FamilyKind::QArbitrary => {
                make_family_q(self.g.clone(), self.c1, self.c2, self.scale, quad_tol)
            }
        }
    }
}

/// A coefficient with its precomputed symbolic derivative.
#[derive(Debug, Clone, PartialEq)]
struct SymCoef {
    expr: Expr,
    deriv: Expr,
}

impl SymCoef {
    fn new(expr: Expr) -> SymCoef {
        let deriv = expr.differentiate();
        SymCoef { expr, deriv }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    /// All three coefficients are closed expressions.
    Symbolic { p: SymCoef, q: SymCoef, f: SymCoef },
    /// The Q-arbitrary family: `P` and `F` are evaluator-backed functions
    /// `P = C e^{c2 t} e^{-int_0^t gen_q}`, `F = -(c1/C) e^{-c2 t} e^{+int}`.
    /// `q` is the Q coefficient actually reported (normally `gen_q` itself).
    QuadratureBacked {
        gen_q: Expr,
        q: SymCoef,
        c1: f64,
        c2: f64,
        scale: f64,
        quad_tol: f64,
    },
}

/// The coefficient triple `(P, Q, F)` of the Riccati equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    inner: Inner,
}

impl Coefficients {
    /// Coefficients given directly as expressions.
    pub fn from_exprs(p: Expr, q: Expr, f: Expr) -> Coefficients {
        Coefficients {
            inner: Inner::Symbolic {
                p: SymCoef::new(p),
                q: SymCoef::new(q),
                f: SymCoef::new(f),
            },
        }
    }

    pub fn p(&self, t: f64) -> Result<f64, Error> {
        match &self.inner {
            Inner::Symbolic { p, .. } => Ok(p.expr.eval(t)?),
            Inner::QuadratureBacked {
                gen_q,
                c2,
                scale,
                quad_tol,
                ..
            } => {
                let integral = integrate(&|x| gen_q.eval(x), 0.0, t, *quad_tol)?;
                Ok(scale * (c2 * t - integral).exp())
            }
        }
    }

    pub fn q(&self, t: f64) -> Result<f64, Error> {
        match &self.inner {
            Inner::Symbolic { q, .. } => Ok(q.expr.eval(t)?),
            Inner::QuadratureBacked { q, .. } => Ok(q.expr.eval(t)?),
        }
    }

    pub fn f(&self, t: f64) -> Result<f64, Error> {
        match &self.inner {
            Inner::Symbolic { f, .. } => Ok(f.expr.eval(t)?),
            Inner::QuadratureBacked {
                gen_q,
                c1,
                c2,
                scale,
                quad_tol,
                ..
            } => {
                let integral = integrate(&|x| gen_q.eval(x), 0.0, t, *quad_tol)?;
                Ok(-(c1 / scale) * (-(c2 * t - integral)).exp())
            }
        }
    }

    /// The logarithmic derivative `P'(t)/P(t)`.
    ///
    /// For symbolic coefficients `P'` comes from [`Expr::differentiate`];
    /// for the quadrature-backed family it is `c2 - gen_q(t)` by
    /// construction of the exponent.
    pub fn p_log_deriv(&self, t: f64) -> Result<f64, Error> {
        match &self.inner {
            Inner::Symbolic { p, .. } => {
                let value = p.expr.eval(t)?;
                if value == 0.0 {
                    return Err(EvalError {
                        kind: EvalErrorKind::DivisionByZero,
                        node: format!("P'/P for P = {}", p.expr),
                        t,
                    }
                    .into());
                }
                Ok(p.deriv.eval(t)? / value)
            }
            Inner::QuadratureBacked { gen_q, c2, .. } => Ok(c2 - gen_q.eval(t)?),
        }
    }

    /// Right-hand side `P(t) y^2 + Q(t) y + F(t)`.
    pub fn rhs(&self, t: f64, y: f64) -> Result<f64, Error> {
        match &self.inner {
            Inner::Symbolic { p, q, f } => {
                Ok(p.expr.eval(t)? * y * y + q.expr.eval(t)? * y + f.expr.eval(t)?)
            }
            Inner::QuadratureBacked {
                gen_q,
                q,
                c1,
                c2,
                scale,
                quad_tol,
            } => {
                // One quadrature serves both exponential coefficients.
                let integral = integrate(&|x| gen_q.eval(x), 0.0, t, *quad_tol)?;
                let expo = c2 * t - integral;
                let p = scale * expo.exp();
                let f = -(c1 / scale) * (-expo).exp();
                Ok(p * y * y + q.expr.eval(t)? * y + f)
            }
        }
    }

    /// The same coefficients with `addend` added to the `Q` entry.
    ///
    /// For the quadrature-backed family only the reported `Q` changes; `P`
    /// and `F` keep the generating function they were built from.
    pub fn with_q_perturbation(&self, addend: Expr) -> Coefficients {
        let perturb = |q: &SymCoef| SymCoef::new(Expr::add(q.expr.clone(), addend.clone()));
        let inner = match &self.inner {
            Inner::Symbolic { p, q, f } => Inner::Symbolic {
                p: p.clone(),
                q: perturb(q),
                f: f.clone(),
            },
            Inner::QuadratureBacked {
                gen_q,
                q,
                c1,
                c2,
                scale,
                quad_tol,
            } => Inner::QuadratureBacked {
                gen_q: gen_q.clone(),
                q: perturb(q),
                c1: *c1,
                c2: *c2,
                scale: *scale,
                quad_tol: *quad_tol,
            },
        };
        Coefficients { inner }
    }
}

/// Family with `F` arbitrary: `P = -c1/F`, `Q = c2 + F'/F`, `F = g`.
pub fn make_family_f(g: Expr, c1: f64, c2: f64) -> Result<Coefficients, Error> {
    if c1 == 0.0 {
        return Err(Error::InvalidConstant { name: "c1" });
    }
    let dg = g.differentiate();
    let p = Expr::div(Expr::constant(-c1), g.clone());
    let q = Expr::add(Expr::constant(c2), Expr::div(dg, g.clone()));
    Ok(Coefficients::from_exprs(p, q, g))
}

/// Family with `P` arbitrary: `P = g`, `Q = c2 - P'/P`, `F = -c1/P`.
pub fn make_family_p(g: Expr, c1: f64, c2: f64) -> Result<Coefficients, Error> {
    if c1 == 0.0 {
        return Err(Error::InvalidConstant { name: "c1" });
    }
    let dg = g.differentiate();
    let q = Expr::sub(Expr::constant(c2), Expr::div(dg, g.clone()));
    let f = Expr::div(Expr::constant(-c1), g.clone());
    Ok(Coefficients::from_exprs(g, q, f))
}

/// Family with `Q` arbitrary: `P = C e^{c2 t} e^{-int_0^t g}`, `Q = g`,
/// `F = -(c1/C) e^{-c2 t} e^{+int_0^t g}`.
///
/// The antiderivative is fixed to base point 0; any other choice is
/// absorbed into `C`. `P` and `F` are evaluator-backed functions, and the
/// product `P(t) F(t)` equals `-c1` for every `t` because the exponents
/// cancel exactly.
pub fn make_family_q(
    g: Expr,
    c1: f64,
    c2: f64,
    scale: f64,
    quad_tol: f64,
) -> Result<Coefficients, Error> {
    if c1 == 0.0 {
        return Err(Error::InvalidConstant { name: "c1" });
    }
    if scale == 0.0 {
        return Err(Error::InvalidConstant { name: "C" });
    }
    Ok(Coefficients {
        inner: Inner::QuadratureBacked {
            gen_q: g.clone(),
            q: SymCoef::new(g),
            c1,
            c2,
            scale,
            quad_tol,
        },
    })
}

/// Companion matrix `[[0, 1], [-P F, P'/P + Q]]` of the linearized system
/// at `t`.
pub fn riccati_to_linear(coeffs: &Coefficients, t: f64) -> Result<Mat2, Error> {
    let p = coeffs.p(t)?;
    let f = coeffs.f(t)?;
    let lower = coeffs.p_log_deriv(t)? + coeffs.q(t)?;
    Ok(Mat2::new(0.0, 1.0, -p * f, lower))
}

/// Outcome of sampling the coefficient-determination system on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    /// Both `c1(t) = -P F` and `c2(t) = P'/P + Q` are constant on the grid;
    /// the values are the grid means.
    Family { c1: f64, c2: f64 },
    /// At least one of the two sampled functions deviates from its mean by
    /// more than the tolerance; the equation is outside the three families.
    /// The means are still reported so callers can demonstrate the failure.
    NotIntegrableForm {
        c1_mean: f64,
        c2_mean: f64,
        c1_deviation: f64,
        c2_deviation: f64,
    },
}

/// Decide family membership by sampling `c1(t) = -P(t) F(t)` and
/// `c2(t) = P'(t)/P(t) + Q(t)` on the grid.
///
/// Accepts when the largest deviation of each sample set from its mean is
/// at most `tol * (1 + |mean|)`. Needs at least three grid points and `P`
/// nonzero on the grid.
pub fn detect_family(coeffs: &Coefficients, grid: &[f64], tol: f64) -> Result<Detection, Error> {
    if grid.len() < 3 {
        return Err(Error::invalid_input(
            "family detection needs at least three grid points",
        ));
    }
    let mut c1_samples = Vec::with_capacity(grid.len());
    let mut c2_samples = Vec::with_capacity(grid.len());
    for &t in grid {
        c1_samples.push(-coeffs.p(t)? * coeffs.f(t)?);
        c2_samples.push(coeffs.p_log_deriv(t)? + coeffs.q(t)?);
    }
    let stats = |samples: &[f64]| {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let dev = samples
            .iter()
            .map(|s| (s - mean).abs())
            .fold(0.0_f64, f64::max);
        (mean, dev)
    };
    let (c1_mean, c1_dev) = stats(&c1_samples);
    let (c2_mean, c2_dev) = stats(&c2_samples);
    if c1_dev <= tol * (1.0 + c1_mean.abs()) && c2_dev <= tol * (1.0 + c2_mean.abs()) {
        Ok(Detection::Family {
            c1: c1_mean,
            c2: c2_mean,
        })
    } else {
        Ok(Detection::NotIntegrableForm {
            c1_mean,
            c2_mean,
            c1_deviation: c1_dev,
            c2_deviation: c2_dev,
        })
    }
}

/// Closed-form solution `y(t) = -z(t) / (P(t) u(t))` with
/// `(u, z)(t) = exp((t - t0) N) (u0, z0)` and `N = [[0, 1], [c1, c2]]`.
///
/// The initial state is projective: `u0 = 1`, `z0 = -P(t0) y0` covers every
/// initial value uniformly, including solutions the one-constant printed
/// formulas miss.
#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    coeffs: Coefficients,
    c1: f64,
    c2: f64,
    t0: f64,
    u0: f64,
    z0: f64,
}

impl ClosedFormSolution {
    /// Solution through `y(t0) = y0`. `P(t0)` must be evaluable and nonzero.
    pub fn new(
        coeffs: Coefficients,
        c1: f64,
        c2: f64,
        t0: f64,
        y0: f64,
    ) -> Result<ClosedFormSolution, Error> {
        let p0 = coeffs.p(t0)?;
        if p0 == 0.0 {
            return Err(Error::invalid_input(format!(
                "P(t0) must be nonzero at t0 = {t0}"
            )));
        }
        Ok(ClosedFormSolution {
            coeffs,
            c1,
            c2,
            t0,
            u0: 1.0,
            z0: -p0 * y0,
        })
    }

    /// Solution with an explicit projective initial state `(u0, z0)`.
    pub fn with_state(
        coeffs: Coefficients,
        c1: f64,
        c2: f64,
        t0: f64,
        u0: f64,
        z0: f64,
    ) -> Result<ClosedFormSolution, Error> {
        if u0 == 0.0 && z0 == 0.0 {
            return Err(Error::invalid_input(
                "the initial linear state (u0, z0) must be nonzero",
            ));
        }
        Ok(ClosedFormSolution {
            coeffs,
            c1,
            c2,
            t0,
            u0,
            z0,
        })
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn initial_state(&self) -> Vec2 {
        Vec2::new(self.u0, self.z0)
    }

    /// The linear state `(u, z)` at `t`.
    pub fn state(&self, t: f64) -> Result<Vec2, Error> {
        let propagator = expm_companion(self.c1, self.c2, t - self.t0)?;
        Ok(propagator.apply(Vec2::new(self.u0, self.z0)))
    }

    /// The solution value at `t`.
    ///
    /// Reports a pole when `|u(t)|` falls below [`POLE_STATE_TOL`] times the
    /// state norm; poles of `y` are exactly the zeros of `u` wherever `P` is
    /// finite and nonzero.
    pub fn eval(&self, t: f64) -> Result<f64, Error> {
        let state = self.state(t)?;
        if state.u.abs() <= POLE_STATE_TOL * state.norm() {
            return Err(Error::Pole { t });
        }
        let p = self.coeffs.p(t)?;
        if p == 0.0 {
            return Err(EvalError {
                kind: EvalErrorKind::DivisionByZero,
                node: String::from("-z/(P*u) with P(t) = 0"),
                t,
            }
            .into());
        }
        let y = -state.z / (p * state.u);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Overflow {
                context: format!("closed-form quotient at t = {t}"),
            })
        }
    }
}

/// Build the family coefficients and the closed-form solution through
/// `y(t0) = y0`, integrating with the default quadrature tolerance.
pub fn solve_closed_form(spec: &FamilySpec, t0: f64, y0: f64) -> Result<ClosedFormSolution, Error> {
    solve_closed_form_with_tol(spec, t0, y0, DEFAULT_QUAD_TOL)
}

/// As [`solve_closed_form`] with an explicit quadrature tolerance for the
/// Q-arbitrary family's coefficient integrals.
pub fn solve_closed_form_with_tol(
    spec: &FamilySpec,
    t0: f64,
    y0: f64,
    quad_tol: f64,
) -> Result<ClosedFormSolution, Error> {
    let coeffs = spec.coefficients(quad_tol)?;
    ClosedFormSolution::new(coeffs, spec.c1, spec.c2, t0, y0)
}

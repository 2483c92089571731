//! Closed-form solutions of Riccati equations `y' = P(t) y^2 + Q(t) y + F(t)`
//! whose linearized companion system has a functionally commutative matrix.
//!
//! Three coefficient families — one of `F`, `P` or `Q` arbitrary, the other
//! two expressed through it and two constants `c1`, `c2` — reduce the
//! companion matrix of the linearized second-order equation to a constant
//! matrix, so the solution is a Moebius quotient of a matrix exponential.
//! The crate builds those families, detects membership from arbitrary
//! coefficients, evaluates the closed forms, and independently verifies
//! every solution against an adaptive Runge–Kutta oracle.
//!
//! Modules:
//! - [`expr`]: expression parsing, evaluation, symbolic differentiation and
//!   adaptive quadrature for the coefficient functions;
//! - [`linalg2`]: 2x2 matrix algebra, commutativity checks and closed-form
//!   matrix exponentials;
//! - [`riccati`]: the three families, detection, closed-form solutions and
//!   the printed solution formulas;
//! - [`verify`]: the numerical oracle (embedded Runge–Kutta, residuals,
//!   pole localization).

pub mod error;
pub mod expr;
pub mod linalg2;
pub mod riccati;
pub mod verify;

pub use error::Error;
pub use expr::{antiderivative, parse, EvalError, Expr, QuadratureError, SyntaxError};
pub use linalg2::{
    commutator, expm_companion, expm_structured, funcomm_check, fundamental_matrix,
    CommutativityReport, Form5, Mat2, Vec2,
};
pub use riccati::{
    crosscheck_paper_formula, detect_family, make_family_f, make_family_p, make_family_q,
    paper_solution_f, paper_solution_p, paper_solution_q, riccati_to_linear, solve_closed_form,
    ClosedFormSolution, Coefficients, CrosscheckReport, Detection, FamilyKind, FamilySpec,
};
pub use verify::{
    compare, find_poles, residual, rk_integrate, CompareReport, Grid, Termination, Trajectory,
};

/// Default absolute tolerance for coefficient quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Radius of the neighborhood excluded around each movable pole when
/// comparing or evaluating residuals.
pub const POLE_EXCLUSION_RADIUS: f64 = 0.05;

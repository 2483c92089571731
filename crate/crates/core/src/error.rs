//! Crate-wide error type for the solver, matrix and oracle modules.

use crate::expr::{EvalError, QuadratureError, SyntaxError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    /// A matrix exponential or solution value left the finite range.
    #[error("overflow in {context}")]
    Overflow { context: String },

    /// A family constructor was given a constant the construction forbids.
    #[error("family constant {name} must be nonzero")]
    InvalidConstant { name: &'static str },

    /// The closed-form solution has a movable pole at (or next to) `t`.
    #[error("solution has a pole at t = {t}")]
    Pole { t: f64 },

    /// The printed solution formulas only exist in the hyperbolic regime
    /// `c2^2 + 4*c1 > 0`.
    #[error("discriminant {delta:e} is outside the hyperbolic regime")]
    Regime { delta: f64 },

    /// Fitting the formula constant to an initial value is impossible when
    /// the target sits on the excluded point of the Moebius map.
    #[error("cannot fit the formula constant at t0 = {t0}")]
    DegenerateFit { t0: f64 },

    /// Every grid point fell inside an excluded pole neighborhood.
    #[error("no usable grid points outside pole neighborhoods")]
    EmptyGrid,

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Error {
        Error::InvalidInput(msg.into())
    }
}

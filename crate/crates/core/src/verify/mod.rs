//! Independent numerical oracle: adaptive Runge–Kutta integration of the
//! Riccati equation, residual evaluation against the equation itself, and
//! localization of movable poles as zeros of the linearizing function `u`.

mod rk;

pub use rk::{rk_integrate, BLOW_UP_THRESHOLD, MIN_STEP};

use crate::error::Error;
use crate::riccati::ClosedFormSolution;
use crate::POLE_EXCLUSION_RADIUS;

/// Central-difference step of the residual derivative.
const RESIDUAL_FD_STEP: f64 = 1e-4;

/// Bisection width target when refining pole abscissae.
const POLE_REFINE_TOL: f64 = 1e-12;

/// Subintervals scanned for sign changes of `u`.
const POLE_SCAN_CELLS: usize = 1000;

/// How far past the grid end the comparison scans for an upcoming pole,
/// as a fraction of the grid span.
const POLE_LOOKAHEAD: f64 = 0.25;

/// Uniform sampling grid `start < end` with at least two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    start: f64,
    end: f64,
    points: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Grid, Error> {
        if !start.is_finite() || !end.is_finite() || start >= end {
            return Err(Error::invalid_input(format!(
                "grid requires finite start < end, got [{start}, {end}]"
            )));
        }
        if points < 2 {
            return Err(Error::invalid_input("grid needs at least two points"));
        }
        Ok(Grid { start, end, points })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The i-th point; the last one is exactly `end`.
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.points);
        if i + 1 == self.points {
            self.end
        } else {
            self.start + (self.end - self.start) * (i as f64 / (self.points - 1) as f64)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.point(i))
    }
}

/// Reason an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// `|y|` exceeded the blow-up threshold or the step size underflowed
    /// near `t`.
    BlowUp {
        t: f64,
    },
    /// A coefficient could not be evaluated near `t`.
    EvalError {
        t: f64,
        message: String,
    },
}

/// Numerical trajectory sampled at grid points, in increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, f64)>,
    pub termination: Termination,
}

/// Result of comparing a closed form against the numerical oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    /// Largest `|y_closed - y_numeric|` over comparable grid points.
    pub max_abs_err: f64,
    /// First zero of `u` at or after the grid start, if one was found in
    /// the scanned window (which extends somewhat past the grid end).
    pub first_pole: Option<f64>,
    pub compared: usize,
    pub skipped: usize,
}

/// Integrate the solution's equation numerically and report the largest
/// pointwise deviation over the grid.
///
/// Grid points inside pole neighborhoods of radius
/// [`POLE_EXCLUSION_RADIUS`], points the integrator never reached, and
/// points where either representation fails are skipped and counted.
pub fn compare(
    solution: &ClosedFormSolution,
    grid: &Grid,
    rel_tol: f64,
    abs_tol: f64,
) -> CompareReport {
    let span = grid.end() - grid.start();
    let poles = find_poles(
        solution,
        grid.start(),
        grid.end() + POLE_LOOKAHEAD * span + POLE_EXCLUSION_RADIUS,
    );
    let first_pole = poles.first().copied();

    let mut compared = 0;
    let mut max_abs_err = 0.0_f64;

    if let Ok(y0) = solution.eval(grid.start()) {
        let trajectory = rk_integrate(
            solution.coefficients(),
            grid.start(),
            y0,
            grid,
            rel_tol,
            abs_tol,
        );
        for &(t, y_numeric) in &trajectory.samples {
            if poles.iter().any(|p| (t - p).abs() <= POLE_EXCLUSION_RADIUS) {
                continue;
            }
            match solution.eval(t) {
                Ok(y_closed) => {
                    max_abs_err = max_abs_err.max((y_closed - y_numeric).abs());
                    compared += 1;
                }
                Err(_) => continue,
            }
        }
    }

    CompareReport {
        max_abs_err,
        first_pole,
        compared,
        skipped: grid.len() - compared,
    }
}

/// Largest normalized residual `|y' - (P y^2 + Q y + F)| / (1 + |y'|)` over
/// the grid, `y'` by Richardson-extrapolated central differences.
///
/// Pole neighborhoods of radius [`POLE_EXCLUSION_RADIUS`] are excluded
/// automatically; failing points are skipped. Errors with
/// [`Error::EmptyGrid`] when nothing remains.
pub fn residual(solution: &ClosedFormSolution, grid: &Grid) -> Result<f64, Error> {
    let poles = find_poles(
        solution,
        grid.start() - POLE_EXCLUSION_RADIUS,
        grid.end() + POLE_EXCLUSION_RADIUS,
    );
    let h = RESIDUAL_FD_STEP;
    let mut max_residual: Option<f64> = None;

    for t in grid.iter() {
        if poles.iter().any(|p| (t - p).abs() <= POLE_EXCLUSION_RADIUS) {
            continue;
        }
        let value = (|| -> Result<f64, Error> {
            let y = solution.eval(t)?;
            let wide = (solution.eval(t + h)? - solution.eval(t - h)?) / (2.0 * h);
            let narrow = (solution.eval(t + 0.5 * h)? - solution.eval(t - 0.5 * h)?) / h;
            let dy = (4.0 * narrow - wide) / 3.0;
            let rhs = solution.coefficients().rhs(t, y)?;
            Ok((dy - rhs).abs() / (1.0 + dy.abs()))
        })();
        if let Ok(r) = value {
            max_residual = Some(max_residual.map_or(r, |m| m.max(r)));
        }
    }
    max_residual.ok_or(Error::EmptyGrid)
}

/// Zeros of the linearizing function `u` on `[a, b]`: scan for sign changes
/// over a fine partition, then refine each bracket by bisection.
///
/// Wherever `P` is finite and nonzero these are exactly the movable poles
/// of the solution.
pub fn find_poles(solution: &ClosedFormSolution, a: f64, b: f64) -> Vec<f64> {
    assert!(a < b, "find_poles requires a < b");
    let u_at = |t: f64| solution.state(t).ok().map(|s| s.u);

    let mut poles = Vec::new();
    let step = (b - a) / POLE_SCAN_CELLS as f64;
    let mut prev_t = a;
    let mut prev_u = u_at(a);
    for i in 1..=POLE_SCAN_CELLS {
        let t = if i == POLE_SCAN_CELLS {
            b
        } else {
            a + step * i as f64
        };
        let u = u_at(t);
        if let (Some(u0), Some(u1)) = (prev_u, u) {
            if u0 == 0.0 {
                push_pole(&mut poles, prev_t);
            } else if u0 * u1 < 0.0 {
                push_pole(&mut poles, bisect(&u_at, prev_t, t, u0));
            }
        }
        prev_t = t;
        prev_u = u;
    }
    if prev_u == Some(0.0) {
        push_pole(&mut poles, b);
    }
    poles
}

fn push_pole(poles: &mut Vec<f64>, t: f64) {
    if poles
        .last()
        .is_none_or(|last| (t - last).abs() > 2.0 * POLE_REFINE_TOL)
    {
        poles.push(t);
    }
}

fn bisect(u_at: &impl Fn(f64) -> Option<f64>, mut lo: f64, mut hi: f64, u_lo: f64) -> f64 {
    let sign_lo = u_lo.signum();
    while hi - lo > POLE_REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        // Intervals too narrow to split in f64.
        if mid == lo || mid == hi {
            break;
        }
        match u_at(mid) {
            Some(0.0) => return mid,
            Some(u_mid) if u_mid.signum() == sign_lo => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    0.5 * (lo + hi)
}

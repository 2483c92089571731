//! Embedded Dormand–Prince 5(4) stepper for the scalar Riccati equation,
//! with fifth-order dense output for sampling at grid points.

use super::{Grid, Termination, Trajectory};
use crate::riccati::Coefficients;

/// `|y|` beyond this is treated as a movable-pole blow-up.
pub const BLOW_UP_THRESHOLD: f64 = 1e8;

/// Step sizes below this floor terminate the integration as a blow-up.
pub const MIN_STEP: f64 = 1e-12;

const MAX_STEPS: usize = 10_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

// Butcher tableau of the Dormand–Prince 5(4) pair.
const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

// Embedded error coefficients (5th minus 4th order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Stages {
    k3: f64,
    k4: f64,
    k5: f64,
    k6: f64,
    k7: f64,
    y_next: f64,
}

/// Fifth-order interpolant over one accepted step.
struct DenseOutput {
    t_old: f64,
    h: f64,
    cont: [f64; 5],
}

impl DenseOutput {
    fn eval(&self, t: f64) -> f64 {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        self.cont[0]
            + s * (self.cont[1] + s1 * (self.cont[2] + s * (self.cont[3] + s1 * self.cont[4])))
    }
}

/// Integrate `y' = P y^2 + Q y + F` from `(t0, y0)` with an embedded 4/5
/// pair under proportional step control, sampling the solution at the grid
/// points through dense output.
///
/// Coefficient evaluation failures and blow-ups end the trajectory through
/// its termination reason; they are not returned as errors. Blow-up means
/// `|y|` exceeded [`BLOW_UP_THRESHOLD`] or the step size underflowed
/// [`MIN_STEP`].
pub fn rk_integrate(
    coeffs: &Coefficients,
    t0: f64,
    y0: f64,
    grid: &Grid,
    rel_tol: f64,
    abs_tol: f64,
) -> Trajectory {
    assert!(
        grid.start() == t0,
        "the grid must start at the initial time"
    );
    assert!(
        rel_tol > 0.0 && abs_tol > 0.0,
        "tolerances must be positive"
    );

    let span = grid.end() - grid.start();
    let sample_slack = 1e-14 * span.abs().max(1.0);
    let mut samples = Vec::with_capacity(grid.len());
    let mut next_idx = 0;

    let rhs = |t: f64, y: f64| coeffs.rhs(t, y);

    let mut t = t0;
    let mut y = y0;
    samples.push((t0, y0));
    next_idx += 1;

    let mut k1 = match rhs(t, y) {
        Ok(v) => v,
        Err(e) => {
            return Trajectory {
                samples,
                termination: Termination::EvalError {
                    t,
                    message: e.to_string(),
                },
            }
        }
    };

    let mut h = span / 100.0;
    let mut rejected = false;
    let mut steps = 0;

    loop {
        if t >= grid.end() - sample_slack {
            return Trajectory {
                samples,
                termination: Termination::Completed,
            };
        }
        if h < MIN_STEP {
            return Trajectory {
                samples,
                termination: Termination::BlowUp { t },
            };
        }
        if steps >= MAX_STEPS {
            // A stuck controller is indistinguishable from a blow-up here.
            return Trajectory {
                samples,
                termination: Termination::BlowUp { t },
            };
        }
        steps += 1;

        // Land exactly on the grid end.
        if t + 1.05 * h >= grid.end() {
            h = grid.end() - t;
        }

        let stages = (|| -> Result<Stages, crate::Error> {
            let k2 = rhs(t + C2 * h, y + h * (A21 * k1))?;
            let k3 = rhs(t + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
            let k4 = rhs(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
            let k5 = rhs(
                t + C5 * h,
                y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
            )?;
            let k6 = rhs(
                t + h,
                y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            )?;
            let y_next = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            let k7 = rhs(t + h, y_next)?;
            Ok(Stages {
                k3,
                k4,
                k5,
                k6,
                k7,
                y_next,
            })
        })();
        let Stages {
            k3,
            k4,
            k5,
            k6,
            k7,
            y_next,
        } = match stages {
            Ok(v) => v,
            Err(e) => {
                return Trajectory {
                    samples,
                    termination: Termination::EvalError {
                        t,
                        message: e.to_string(),
                    },
                }
            }
        };

        let err_estimate = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let sk = abs_tol + rel_tol * y.abs().max(y_next.abs());
        let err = (err_estimate / sk).abs();

        if !err.is_finite() || err > 1.0 {
            rejected = true;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac.min(1.0);
            continue;
        }

        // Accepted: build the interpolant and emit grid samples in (t, t+h].
        let t_next = t + h;
        let ydiff = y_next - y;
        let bspl = h * k1 - ydiff;
        let dense = DenseOutput {
            t_old: t,
            h,
            cont: [
                y,
                ydiff,
                bspl,
                ydiff - h * k7 - bspl,
                h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
            ],
        };

        if y_next.abs() > BLOW_UP_THRESHOLD {
            return Trajectory {
                samples,
                termination: Termination::BlowUp { t: t_next },
            };
        }

        while next_idx < grid.len() && grid.point(next_idx) <= t_next + sample_slack {
            let tg = grid.point(next_idx);
            samples.push((tg, dense.eval(tg)));
            next_idx += 1;
        }

        t = t_next;
        y = y_next;
        k1 = k7;

        let mut fac = SAFETY * err.max(1e-10).powf(-0.2);
        fac = fac.clamp(FAC_MIN, FAC_MAX);
        if rejected {
            fac = fac.min(1.0);
            rejected = false;
        }
        h *= fac;
    }
}

//! Problem-file loading and validation.
//!
//! A problem is a JSON document selecting either a coefficient family
//! (`"mode": "family"`) or explicit coefficient expressions
//! (`"mode": "explicit"`), plus the initial value, the output grid and
//! optional tolerances.

use riccati_core::expr::{parse, Expr};
use riccati_core::riccati::{FamilyKind, FamilySpec};
use riccati_core::verify::Grid;
use riccati_core::DEFAULT_QUAD_TOL;
use serde::Deserialize;
use std::path::Path;

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    mode: String,
    kind: Option<String>,
    c1: Option<f64>,
    c2: Option<f64>,
    #[serde(rename = "C")]
    scale: Option<f64>,
    g: Option<String>,
    #[serde(rename = "P")]
    p: Option<String>,
    #[serde(rename = "Q")]
    q: Option<String>,
    #[serde(rename = "F")]
    f: Option<String>,
    initial: Initial,
    grid: GridSpec,
    #[serde(default)]
    tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Initial {
    t0: f64,
    y0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    start: f64,
    end: f64,
    points: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Tolerances {
    quad: Option<f64>,
    #[serde(rename = "relTol")]
    rel_tol: Option<f64>,
    #[serde(rename = "absTol")]
    abs_tol: Option<f64>,
}

/// Command-line tolerance overrides; flags win over file values.
#[derive(Debug, Default, Clone, Copy)]
pub struct ToleranceOverrides {
    pub quad: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum ProblemKind {
    Family(FamilySpec),
    Explicit { p: Expr, q: Expr, f: Expr },
}

/// A validated problem ready for the commands.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: ProblemKind,
    pub t0: f64,
    pub y0: f64,
    pub grid: Grid,
    pub quad_tol: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

fn parse_expr(field: &str, source: &str) -> Result<Expr, String> {
    parse(source).map_err(|e| format!("in member \"{field}\": {e}"))
}

fn require<T>(value: Option<T>, field: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("missing member \"{field}\""))
}

fn positive(value: f64, what: &str) -> Result<f64, String> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{what} must be a positive finite number"))
    }
}

/// Load and validate a problem file. Every failure here is an input error
/// (exit code 2 at the command level).
pub fn load_problem(path: &Path, overrides: ToleranceOverrides) -> Result<Problem, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: ProblemFile =
        serde_json::from_str(&text).map_err(|e| format!("malformed problem file: {e}"))?;

    let kind = match file.mode.as_str() {
        "family" => {
            let kind = match require(file.kind.as_deref(), "kind")? {
                "F" => FamilyKind::FArbitrary,
                "P" => FamilyKind::PArbitrary,
                "Q" => FamilyKind::QArbitrary,
                other => return Err(format!("unknown family kind \"{other}\"")),
            };
            let c1 = require(file.c1, "c1")?;
            let c2 = require(file.c2, "c2")?;
            if c1 == 0.0 {
                return Err(String::from("family constant c1 must be nonzero"));
            }
            let scale = file.scale.unwrap_or(1.0);
            if kind == FamilyKind::QArbitrary && scale == 0.0 {
                return Err(String::from("family scale C must be nonzero"));
            }
            let g_source = require(file.g.as_deref(), "g")?;
            let g = parse_expr("g", g_source)?;
            ProblemKind::Family(FamilySpec::new(kind, g, c1, c2, scale))
        }
        "explicit" => ProblemKind::Explicit {
            p: parse_expr("P", require(file.p.as_deref(), "P")?)?,
            q: parse_expr("Q", require(file.q.as_deref(), "Q")?)?,
            f: parse_expr("F", require(file.f.as_deref(), "F")?)?,
        },
        other => return Err(format!("unknown mode \"{other}\"")),
    };

    let grid =
        Grid::new(file.grid.start, file.grid.end, file.grid.points).map_err(|e| e.to_string())?;

    let quad_tol = positive(
        overrides
            .quad
            .or(file.tolerances.quad)
            .unwrap_or(DEFAULT_QUAD_TOL),
        "quadrature tolerance",
    )?;
    let rel_tol = positive(
        overrides
            .rel_tol
            .or(file.tolerances.rel_tol)
            .unwrap_or(DEFAULT_REL_TOL),
        "relative tolerance",
    )?;
    let abs_tol = positive(
        overrides
            .abs_tol
            .or(file.tolerances.abs_tol)
            .unwrap_or(DEFAULT_ABS_TOL),
        "absolute tolerance",
    )?;

    Ok(Problem {
        kind,
        t0: file.initial.t0,
        y0: file.initial.y0,
        grid,
        quad_tol,
        rel_tol,
        abs_tol,
    })
}

/// Matrix-function input for the commute-check command: either the
/// structured form or four explicit entries.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixFile {
    Form5 {
        a11: String,
        a12: String,
        c1: f64,
        c2: f64,
    },
    Entries {
        entries: [String; 4],
    },
}

pub fn load_matrix(path: &Path) -> Result<MatrixFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed matrix file: {e}"))
}

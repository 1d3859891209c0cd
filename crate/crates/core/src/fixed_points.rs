//! Closed-form equilibria of the operator.
//!
//! Every solution of `V(x) = x` on the simplex falls into one of seven
//! families, distinguished by which compartments are present:
//!
//! | family  | present compartments            | free parameter   |
//! |---------|---------------------------------|------------------|
//! | λ1      | O, I (segment)                  | `λ = x5`         |
//! | λ2      | B, I                            | none             |
//! | λ3      | M, B, O, I                      | `λ = x4`         |
//! | λ4      | P, B, O, I                      | `λ = x4`         |
//! | λ5      | P, M, B, O, I                   | `λ = x6` (root)  |
//! | λ6      | P, Z, B, O, I                   | `λ = x6` (root)  |
//! | λ7      | all six                         | `λ = x3`         |
//!
//! λ1 is a continuum and is sampled on a grid; [`crate::is_on_matter_segment`]
//! tests membership instead.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::operator::Qso;
use crate::quadratic::{solve_quadratic, QuadraticCoefficients};
use crate::simplex::{SimplexPoint, DIM, TOL_NONNEG};

/// Feasible fixed points must satisfy `V(x) = x` to this ∞-norm.
pub const RESIDUAL_LIMIT: f64 = 1e-10;
/// Coordinate-sum tolerance for a feasible fixed point.
pub const FIXED_SUM_TOL: f64 = 1e-10;

pub const DEFAULT_SEGMENT_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lambda1,
    Lambda2,
    Lambda3,
    Lambda4,
    Lambda5,
    Lambda6,
    Lambda7,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Lambda1,
        Family::Lambda2,
        Family::Lambda3,
        Family::Lambda4,
        Family::Lambda5,
        Family::Lambda6,
        Family::Lambda7,
    ];

    pub fn index(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda{}", self.index())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    /// The inequality holds with equality (up to relative round-off).
    pub boundary: bool,
}

impl Condition {
    /// `lhs ≥ rhs`, non-strict.
    fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let holds = lhs >= rhs;
        let scale = 1.0_f64.max(lhs.abs()).max(rhs.abs());
        Self {
            name: name.into(),
            holds,
            boundary: holds && (lhs - rhs).abs() <= 1e-12 * scale,
        }
    }

    /// `lhs > rhs`, strict.
    fn greater(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            holds: lhs > rhs,
            boundary: false,
        }
    }

    fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            holds,
            boundary: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub family: Family,
    pub coordinates: [f64; DIM],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_parameter: Option<f64>,
    pub feasible: bool,
    pub residual: f64,
    pub conditions: Vec<Condition>,
}

impl FixedPoint {
    pub fn point(&self) -> Result<SimplexPoint> {
        SimplexPoint::new(self.coordinates)
    }

    pub fn is_boundary(&self) -> bool {
        self.conditions.iter().any(|c| c.boundary)
    }
}

/// Every feasible fixed point; the λ1 segment is sampled on `segment_grid`
/// (defaults to `{0, 0.25, 0.5, 0.75, 1}`).
pub fn enumerate_fixed_points(qso: &Qso, segment_grid: Option<&[f64]>) -> Vec<FixedPoint> {
    candidates(qso, segment_grid)
        .into_iter()
        .filter(|fp| fp.feasible)
        .collect()
}

/// All evaluable candidates, feasible or not, with their condition lists.
pub fn candidates(qso: &Qso, segment_grid: Option<&[f64]>) -> Vec<FixedPoint> {
    let grid = segment_grid.unwrap_or(&DEFAULT_SEGMENT_GRID);
    let mut out = Vec::new();
    for &lambda in grid {
        out.extend(finish(
            qso,
            Family::Lambda1,
            [0.0, 0.0, 0.0, 0.0, lambda, 1.0 - lambda],
            Some(lambda),
            vec![Condition::flag("0≤λ≤1", (0.0..=1.0).contains(&lambda))],
        ));
    }
    out.extend(bacteria_dim(qso));
    out.extend(mixo_bacteria(qso));
    out.extend(phyto_bacteria(qso));
    out.extend(root_branch(qso, Family::Lambda5));
    out.extend(root_branch(qso, Family::Lambda6));
    out.extend(all_present(qso));
    out
}

fn bacteria_dim(qso: &Qso) -> Option<FixedPoint> {
    let (a11, a12) = (qso.a(11), qso.a(12));
    let x6 = a12 / a11;
    finish(
        qso,
        Family::Lambda2,
        [0.0, 0.0, 0.0, 1.0 - x6, 0.0, x6],
        None,
        vec![Condition::at_least("a12≤a11", a11, a12)],
    )
}

fn mixo_bacteria(qso: &Qso) -> Option<FixedPoint> {
    let [_, _, _, _, _, _, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
    let death = a8 + a9;
    // D = a7 a12 − a11 (a8 + a9) fixes the DOM level
    let d = a7 * a12 - a11 * death;
    let conditions = vec![
        Condition::at_least("a12a7−a11(a8+a9)≥0", a7 * a12, a11 * death),
        Condition::at_least(
            "a7(a10−a12)−(a8+a9)(a10−a11)≥0",
            a7 * a10 + death * a11,
            a7 * a12 + death * a10,
        ),
    ];
    let e = a7 * (a10 - a12) - death * (a10 - a11);
    let lambda = a9 * e / (a10 * (a7 * a9 + d));
    let coords = [
        0.0,
        0.0,
        d / (a7 * a9) * lambda,
        lambda,
        d / (a7 * a10),
        death / a7,
    ];
    finish(qso, Family::Lambda3, coords, Some(lambda), conditions)
}

fn phyto_bacteria(qso: &Qso) -> Option<FixedPoint> {
    let [a1, _, _, a4, _, _, _, _, _, a10, a11, a12] = *qso.params().rates();
    let f = a1 * a12 - a4 * a11;
    let g = a10 * a1 - a10 * a4 - a12 * a1 + a11 * a4;
    let conditions = vec![
        Condition::at_least("a12a1−a11a4≥0", a1 * a12, a4 * a11),
        Condition::at_least(
            "a10a1−a10a4−a12a1+a11a4≥0",
            a10 * a1 + a11 * a4,
            a10 * a4 + a12 * a1,
        ),
    ];
    let lambda = a4 * g / (a10 * (f + a4 * a1));
    let coords = [
        f / (a1 * a4) * lambda,
        0.0,
        0.0,
        lambda,
        f / (a1 * a10),
        a4 / a1,
    ];
    finish(qso, Family::Lambda4, coords, Some(lambda), conditions)
}

/// Families λ5 and λ6: `λ = x6` solves a quadratic; each real root is a
/// candidate, feasible when it lies strictly inside the positivity window.
fn root_branch(qso: &Qso, family: Family) -> Vec<FixedPoint> {
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
    let coeffs = match family {
        Family::Lambda5 => QuadraticCoefficients::mixoplankton_branch(qso),
        Family::Lambda6 => QuadraticCoefficients::zooplankton_branch(qso),
        _ => unreachable!("only the quadratic families"),
    };
    let Ok(roots) = solve_quadratic(&coeffs) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for lambda in roots {
        let mut conditions = vec![
            Condition::greater("a4<a1", a1, a4),
            Condition::greater("a4/a1<λ", lambda, a4 / a1),
            Condition::greater("λ<a12/a11", a12 / a11, lambda),
        ];
        let bacteria_room = a12 - a11 * lambda;
        let coords = if family == Family::Lambda5 {
            conditions.push(Condition::greater("λ<(a8+a9)/a7", (a8 + a9) / a7, lambda));
            if a1 * a9 < a4 * a7 {
                conditions.push(Condition::greater(
                    "λ<a4a8/(a4a7−a1a9)",
                    a4 * a8 / (a4 * a7 - a1 * a9),
                    lambda,
                ));
            }
            [
                (a8 + a9 - a7 * lambda) / a3,
                0.0,
                (a1 * lambda - a4) / a3,
                (a4 * a8 + (a1 * a9 - a4 * a7) * lambda) / (a3 * bacteria_room),
                bacteria_room / a10,
                lambda,
            ]
        } else {
            [
                (a5 + a6) / a2,
                (a1 * lambda - a4) / a2,
                0.0,
                (a4 * a6 + a1 * a5 * lambda) / (a2 * bacteria_room),
                bacteria_room / a10,
                lambda,
            ]
        };
        out.extend(finish(qso, family, coords, Some(lambda), conditions));
    }
    out
}

/// Family λ7. `x1` and `x6` are fixed by the zooplankton and mixoplankton
/// balances; `x2`, `x4` are affine in `λ = x3`, and the unit total then
/// fixes `λ`.
fn all_present(qso: &Qso) -> Option<FixedPoint> {
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
    // N = a2(a8 + a9) − a3(a5 + a6)
    let n = a2 * (a8 + a9) - a3 * (a5 + a6);
    let m = a2 * a7 * a12 - a11 * n;
    let x1 = (a5 + a6) / a2;
    let x6 = n / (a2 * a7);
    let x5 = m / (a2 * a7 * a10);
    let x2 = |lambda: f64| (a1 * n - a2 * a4 * a7 - a2 * a3 * a7 * lambda) / (a2 * a2 * a7);
    let x4 = |lambda: f64| a7 * (a4 * a5 + a4 * a6 + a2 * a5 * x2(lambda) + a2 * a9 * lambda) / m;

    let total_at_zero = x1 + x2(0.0) + x4(0.0) + x5 + x6;
    let slope = 1.0 - a3 / a2 + a7 * (a2 * a9 - a3 * a5) / m;
    if !slope.is_finite() || slope.abs() < 1e-14 {
        return None;
    }
    let lambda = (1.0 - total_at_zero) / slope;
    let x2_bound = (a1 * n - a2 * a4 * a7) / (a2 * a3 * a7);
    let conditions = vec![
        Condition::greater("a2a4a7/a1<a2a8+a2a9−a3a5−a3a6", n, a2 * a4 * a7 / a1),
        Condition::greater("a2a8+a2a9−a3a5−a3a6<a2a7a12/a11", a2 * a7 * a12 / a11, n),
        Condition::greater(
            "λ<(a1(a2a8+a2a9−a3a5−a3a6)−a2a4a7)/(a2a3a7)",
            x2_bound,
            lambda,
        ),
    ];
    let coords = [x1, x2(lambda), lambda, x4(lambda), x5, x6];
    finish(qso, Family::Lambda7, coords, Some(lambda), conditions)
}

/// Adds the simplex-membership conditions and the residual. Candidates with
/// non-finite coordinates are dropped.
fn finish(
    qso: &Qso,
    family: Family,
    mut coords: [f64; DIM],
    free_parameter: Option<f64>,
    mut conditions: Vec<Condition>,
) -> Option<FixedPoint> {
    if coords.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let nonneg = coords.iter().all(|&v| v >= -TOL_NONNEG);
    if nonneg {
        coords.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    let sum: f64 = coords.iter().sum();
    conditions.push(Condition::flag("coordinates≥0", nonneg));
    conditions.push(Condition::flag("Σx=1", (sum - 1.0).abs() <= FIXED_SUM_TOL));
    let feasible = conditions.iter().all(|c| c.holds);
    Some(FixedPoint {
        family,
        coordinates: coords,
        free_parameter,
        feasible,
        residual: qso.residual_raw(&coords),
        conditions,
    })
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::Qso;

/// Coefficients below this magnitude are treated as zero.
pub const COEFF_EPS: f64 = 1e-14;

/// `a x² + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticCoefficients {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Equation for the DIM level `λ = x6` of an equilibrium with
    /// phytoplankton, mixoplankton, bacteria and both matter pools present
    /// and no zooplankton.
    pub fn mixoplankton_branch(qso: &Qso) -> Self {
        let [a1, _, a3, a4, _, _, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
        Self {
            a: a3 * a11 * a11 + a10 * a11 * (a7 - a1 - a3),
            b: a10 * a11 * (a3 + a4 - a8 - a9)
                + a10 * a12 * (a3 + a1 - a7)
                + a10 * (a1 * a9 - a4 * a7)
                - 2.0 * a3 * a11 * a12,
            c: a10 * a12 * (a8 + a9 - a3 - a4) + a3 * a12 * a12 + a4 * a8 * a10,
        }
    }

    /// Same for the equilibrium with zooplankton instead of mixoplankton.
    pub fn zooplankton_branch(qso: &Qso) -> Self {
        let [a1, a2, _, a4, a5, a6, _, _, _, a10, a11, a12] = *qso.params().rates();
        Self {
            a: a2 * a11 * a11 - a10 * a11 * (a1 + a2),
            b: a10 * a11 * (a2 + a4 - a5 - a6) + a10 * a12 * (a1 + a2) + a1 * a5 * a10
                - 2.0 * a2 * a11 * a12,
            c: a10 * a12 * (a5 + a6 - a2 - a4) + a2 * a12 * a12 + a4 * a6 * a10,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Real roots in increasing order, repeated roots reported once.
///
/// A vanishing leading coefficient falls back to the linear equation.
pub fn solve_quadratic(q: &QuadraticCoefficients) -> Result<Vec<f64>> {
    let QuadraticCoefficients { a, b, c } = *q;
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::DegenerateEquation);
    }
    if a.abs() <= COEFF_EPS && b.abs() <= COEFF_EPS && c.abs() <= COEFF_EPS {
        return Err(Error::DegenerateEquation);
    }
    if a.abs() <= COEFF_EPS {
        if b.abs() <= COEFF_EPS {
            return Ok(Vec::new());
        }
        return Ok(vec![-c / b]);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    if disc == 0.0 {
        return Ok(vec![-b / (2.0 * a)]);
    }
    // q = −(b + sign(b)√disc)/2 avoids cancellation in the smaller root.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![q / a, c / q];
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_roots() {
        let r = solve_quadratic(&QuadraticCoefficients::new(1.0, -3.0, 2.0)).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn linear_fallback() {
        let r = solve_quadratic(&QuadraticCoefficients::new(0.0, 2.0, -1.0)).unwrap();
        assert_eq!(r, vec![0.5]);
    }

    #[test]
    fn complex_pair_gives_nothing() {
        assert!(solve_quadratic(&QuadraticCoefficients::new(1.0, 0.0, 1.0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn double_root_once() {
        let r = solve_quadratic(&QuadraticCoefficients::new(1.0, -2.0, 1.0)).unwrap();
        assert_eq!(r, vec![1.0]);
    }

    #[test]
    fn symmetric_roots_without_linear_term() {
        let r = solve_quadratic(&QuadraticCoefficients::new(2.0, 0.0, -8.0)).unwrap();
        assert_eq!(r, vec![-2.0, 2.0]);
    }

    #[test]
    fn degenerate_is_signalled() {
        assert!(matches!(
            solve_quadratic(&QuadraticCoefficients::new(0.0, 0.0, 1e-16)),
            Err(Error::DegenerateEquation)
        ));
        assert!(solve_quadratic(&QuadraticCoefficients::new(0.0, 0.0, 1.0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn small_root_keeps_precision() {
        // roots 1e-9 and 1e9
        let r = solve_quadratic(&QuadraticCoefficients::new(1.0, -(1e9 + 1e-9), 1.0)).unwrap();
        assert!((r[0] - 1e-9).abs() / 1e-9 < 1e-12, "{r:?}");
    }
}

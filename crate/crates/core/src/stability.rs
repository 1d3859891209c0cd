//! Linearisation of the operator and hyperbolicity classification of fixed
//! points.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::linalg::Schur;
use nalgebra::Matrix6;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fixed_points::FixedPoint;
use crate::operator::Qso;
use crate::simplex::{SimplexPoint, DIM};

pub type Matrix = [[f64; DIM]; DIM];

pub const DEFAULT_UNIT_CIRCLE_TOL: f64 = 1e-9;
/// Points with a larger residual are not classified.
pub const CLASSIFY_RESIDUAL_LIMIT: f64 = 1e-8;
const MAX_SWEEPS: usize = 10_000;

/// `∂x'_i / ∂x_j` at `x`.
pub fn jacobian(qso: &Qso, x: &[f64; DIM]) -> Matrix {
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
    let [x1, x2, x3, x4, x5, x6] = *x;
    [
        [
            1.0 - a4 + a1 * x6 - a2 * x2 - a3 * x3,
            -a2 * x1,
            -a3 * x1,
            0.0,
            0.0,
            a1 * x1,
        ],
        [a2 * x2, 1.0 - a5 - a6 + a2 * x1, 0.0, 0.0, 0.0, 0.0],
        [
            a3 * x3,
            0.0,
            1.0 - a8 - a9 + a3 * x1 + a7 * x6,
            0.0,
            0.0,
            a7 * x3,
        ],
        [
            0.0,
            0.0,
            0.0,
            1.0 - a12 + a10 * x5 + a11 * x6,
            a10 * x4,
            a11 * x4,
        ],
        [a4, a5, a9, -a10 * x5, 1.0 - a10 * x4, 0.0],
        [
            -a1 * x6,
            a6,
            a8 - a7 * x6,
            a12 - a11 * x6,
            0.0,
            1.0 - a1 * x1 - a7 * x3 - a11 * x4,
        ],
    ]
}

/// Eigenvalues of a real 6×6 matrix via the real Schur form, sorted by
/// descending modulus, then descending real and imaginary part.
pub fn eigenvalues(m: &Matrix) -> Result<[Complex64; DIM]> {
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure { sweeps: 0 });
    }
    let matrix = Matrix6::from_fn(|i, j| m[i][j]);
    let schur = Schur::try_new(matrix, f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::EigenFailure { sweeps: MAX_SWEEPS })?;
    let values = schur.complex_eigenvalues();
    let mut out = [Complex64::new(0.0, 0.0); DIM];
    for (slot, v) in out.iter_mut().zip(values.iter()) {
        *slot = Complex64::new(v.re, v.im);
    }
    out.sort_by(spectral_order);
    Ok(out)
}

fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Attracting,
    Repelling,
    Saddle,
    NonHyperbolic,
}

impl Classification {
    /// Hyperbolicity type from eigenvalue moduli, with a band of half-width
    /// `tol` around the unit circle counted as "on" it.
    pub fn from_moduli(moduli: impl IntoIterator<Item = f64>, tol: f64) -> Self {
        let moduli: Vec<f64> = moduli.into_iter().collect();
        if moduli.iter().any(|&r| (r - 1.0).abs() <= tol) {
            Classification::NonHyperbolic
        } else if moduli.iter().all(|&r| r < 1.0 - tol) {
            Classification::Attracting
        } else if moduli.iter().all(|&r| r > 1.0 + tol) {
            Classification::Repelling
        } else {
            Classification::Saddle
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Attracting => "attracting",
            Classification::Repelling => "repelling",
            Classification::Saddle => "saddle",
            Classification::NonHyperbolic => "non-hyperbolic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub point: SimplexPoint,
    pub jacobian: Matrix,
    pub eigenvalues: [Complex64; DIM],
    pub classification: Classification,
    pub unit_circle_tolerance: f64,
}

impl Serialize for StabilityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.eigenvalues.iter().map(|z| [z.re, z.im]).collect();
        let mut s = serializer.serialize_struct("StabilityReport", 5)?;
        s.serialize_field("point", &self.point)?;
        s.serialize_field("eigenvalues", &pairs)?;
        s.serialize_field("classification", &self.classification)?;
        s.serialize_field("tolerance", &self.unit_circle_tolerance)?;
        s.serialize_field("jacobian", &self.jacobian)?;
        s.end()
    }
}

/// Classifies an enumerated fixed point.
pub fn classify(qso: &Qso, fp: &FixedPoint, tol: f64) -> Result<StabilityReport> {
    if !(fp.residual <= CLASSIFY_RESIDUAL_LIMIT) {
        return Err(Error::NotAFixedPoint {
            residual: fp.residual,
            limit: CLASSIFY_RESIDUAL_LIMIT,
        });
    }
    report_at(qso, fp.point()?, tol)
}

/// Classifies an arbitrary point after checking that it is fixed.
pub fn classify_point(qso: &Qso, x: &SimplexPoint, tol: f64) -> Result<StabilityReport> {
    let residual = qso.residual(x);
    if !(residual <= CLASSIFY_RESIDUAL_LIMIT) {
        return Err(Error::NotAFixedPoint {
            residual,
            limit: CLASSIFY_RESIDUAL_LIMIT,
        });
    }
    report_at(qso, *x, tol)
}

fn report_at(qso: &Qso, point: SimplexPoint, tol: f64) -> Result<StabilityReport> {
    let jacobian = jacobian(qso, point.coords());
    let eigenvalues = eigenvalues(&jacobian)?;
    let classification = Classification::from_moduli(eigenvalues.iter().map(|z| z.norm()), tol);
    Ok(StabilityReport {
        point,
        jacobian,
        eigenvalues,
        classification,
        unit_circle_tolerance: tol,
    })
}

/// Closed-form spectrum of the Jacobian at the bacteria/DIM equilibrium
/// `(0, 0, 0, 1 − a12/a11, 0, a12/a11)`; the characteristic polynomial
/// factors into six linear terms.
pub fn bacteria_dim_spectrum(qso: &Qso) -> [f64; DIM] {
    let [a1, _, _, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
    let r = a12 / a11;
    [
        1.0,
        1.0 - a4 + a1 * r,
        1.0 - a8 - a9 + a7 * r,
        1.0 - a5 - a6,
        1.0 - a10 + a10 * r,
        1.0 - a11 + a12,
    ]
}

/// Vertex checks: `e1..e4` are not fixed, `e5` and `e6` are, and they do not
/// form a 2-cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexAudit {
    pub residuals: [f64; DIM],
    pub issues: Vec<String>,
}

impl VertexAudit {
    pub fn is_consistent(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn vertex_audit(qso: &Qso) -> Result<VertexAudit> {
    let mut residuals = [0.0; DIM];
    let mut issues = Vec::new();
    for (i, slot) in residuals.iter_mut().enumerate() {
        *slot = qso.residual(&SimplexPoint::vertex(i + 1));
    }
    for i in 0..4 {
        if !(residuals[i] > 0.0) {
            issues.push(format!("e{} is fixed (residual {})", i + 1, residuals[i]));
        }
    }
    for i in 4..6 {
        if residuals[i] != 0.0 {
            issues.push(format!(
                "e{} is not fixed (residual {:e})",
                i + 1,
                residuals[i]
            ));
        }
    }
    let (e5, e6) = (SimplexPoint::vertex(5), SimplexPoint::vertex(6));
    if qso.apply(&e5)? == e6 || qso.apply(&e6)? == e5 {
        issues.push("e5 and e6 form a 2-cycle".to_string());
    }
    Ok(VertexAudit { residuals, issues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_points::{enumerate_fixed_points, Family};
    use crate::params::Parameters;

    fn qso(changes: &[(usize, f64)], base: f64) -> Qso {
        let mut p = Parameters::uniform(base).unwrap();
        for &(i, v) in changes {
            p = p.with(i, v).unwrap();
        }
        Qso::new(p).unwrap()
    }

    fn real_parts(values: &[Complex64; DIM]) -> Vec<f64> {
        values.iter().map(|z| z.re).collect()
    }

    #[test]
    fn identity_spectrum() {
        let mut m = [[0.0; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let ev = eigenvalues(&m).unwrap();
        assert!(ev.iter().all(|z| (z.re - 1.0).abs() < 1e-14 && z.im == 0.0));
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let mut m = [[0.0; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = (i + 1) as f64;
        }
        let ev = real_parts(&eigenvalues(&m).unwrap());
        for (got, want) in ev.iter().zip([6.0, 5.0, 4.0, 3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn companion_block() {
        // companion matrix of x² − 3x + 2 next to four unit diagonals
        let mut m = [[0.0; DIM]; DIM];
        m[0][0] = 3.0;
        m[0][1] = -2.0;
        m[1][0] = 1.0;
        for i in 2..DIM {
            m[i][i] = 1.0;
        }
        let ev = real_parts(&eigenvalues(&m).unwrap());
        assert!((ev[0] - 2.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|v| (v - 1.0).abs() < 1e-8), "{ev:?}");
    }

    #[test]
    fn rotation_has_complex_pair() {
        let mut m = [[0.0; DIM]; DIM];
        m[0][1] = -2.0;
        m[1][0] = 2.0;
        for i in 2..DIM {
            m[i][i] = 0.5;
        }
        let ev = eigenvalues(&m).unwrap();
        assert!((ev[0].norm() - 2.0).abs() < 1e-12);
        assert!((ev[0].im - 2.0).abs() < 1e-12 && (ev[1].im + 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_matrix_fails() {
        let mut m = [[0.0; DIM]; DIM];
        m[2][3] = f64::NAN;
        assert!(matches!(eigenvalues(&m), Err(Error::EigenFailure { .. })));
    }

    #[test]
    fn classification_bands() {
        use Classification::*;
        assert_eq!(Classification::from_moduli([0.5, 0.9], 1e-9), Attracting);
        assert_eq!(Classification::from_moduli([1.5, 1.1], 1e-9), Repelling);
        assert_eq!(Classification::from_moduli([0.5, 1.1], 1e-9), Saddle);
        assert_eq!(
            Classification::from_moduli([0.5, 1.0 + 5e-10], 1e-9),
            NonHyperbolic
        );
    }

    #[test]
    fn dom_vertex_bacteria_entry() {
        let q = qso(&[(10, 0.3), (12, 0.45)], 0.1);
        let j = jacobian(&q, SimplexPoint::vertex(5).coords());
        assert!((j[3][3] - (1.0 - 0.45 + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn bacteria_dim_point_matches_factorisation() {
        let q = qso(&[(11, 0.4), (12, 0.2)], 0.1);
        let fps = enumerate_fixed_points(&q, None);
        let fp = fps.iter().find(|fp| fp.family == Family::Lambda2).unwrap();
        let report = classify(&q, fp, DEFAULT_UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(report.classification, Classification::NonHyperbolic);
        let mut analytic = bacteria_dim_spectrum(&q).to_vec();
        analytic.sort_by(|a, b| b.total_cmp(a));
        let numeric = real_parts(&report.eigenvalues);
        for (n, a) in numeric.iter().zip(&analytic) {
            assert!((n - a).abs() < 1e-8, "{numeric:?} vs {analytic:?}");
        }
    }

    #[test]
    fn matter_segment_is_non_hyperbolic() {
        let q = qso(&[], 0.1);
        for lambda in [0.0, 0.5, 1.0] {
            let x = SimplexPoint::matter_only(lambda).unwrap();
            let report = classify_point(&q, &x, DEFAULT_UNIT_CIRCLE_TOL).unwrap();
            assert_eq!(report.classification, Classification::NonHyperbolic);
        }
    }

    #[test]
    fn non_fixed_point_is_refused() {
        let q = qso(&[], 0.1);
        assert!(matches!(
            classify_point(&q, &SimplexPoint::vertex(1), DEFAULT_UNIT_CIRCLE_TOL),
            Err(Error::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn vertex_audit_holds() {
        let q = qso(&[(4, 0.3), (5, 0.2), (6, 0.1)], 0.1);
        let audit = vertex_audit(&q).unwrap();
        assert!(audit.is_consistent(), "{:?}", audit.issues);
        assert!((audit.residuals[0] - 0.3).abs() < 1e-15);
        assert!((audit.residuals[1] - 0.3).abs() < 1e-15);
        assert_eq!(audit.residuals[4], 0.0);
        assert_eq!(audit.residuals[5], 0.0);
    }
}

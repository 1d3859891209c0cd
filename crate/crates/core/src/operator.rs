//! The discrete-time evolution operator on the 5-simplex.

use crate::error::{Error, Result};
use crate::params::Parameters;
use crate::simplex::{linf_distance, SimplexPoint, DIM, TOL_NONNEG};

/// Sum drift tolerated before an image is rescaled back onto the simplex.
const SUM_DRIFT: f64 = 1e-13;

/// The plankton operator for a parameter set that passed validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qso {
    params: Parameters,
}

impl Qso {
    pub fn new(params: Parameters) -> Result<Self> {
        let report = params.validate();
        if !report.is_valid() {
            return Err(Error::InvalidParameters(report));
        }
        Ok(Self { params })
    }

    #[inline]
    pub fn params(&self) -> &Parameters {
        &self.params
    }

    /// Rate `a{index}`, 1-based.
    #[inline]
    pub fn a(&self, index: usize) -> f64 {
        self.params.a(index)
    }

    /// The six update equations evaluated at an arbitrary vector, no checks.
    pub fn image(&self, x: &[f64; DIM]) -> [f64; DIM] {
        let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *self.params.rates();
        let [x1, x2, x3, x4, x5, x6] = *x;
        [
            x1 * (1.0 - a4 + a1 * x6 - a2 * x2 - a3 * x3),
            x2 * (1.0 - a5 - a6 + a2 * x1),
            x3 * (1.0 - a8 - a9 + a3 * x1 + a7 * x6),
            x4 * (1.0 - a12 + a10 * x5 + a11 * x6),
            x5 + a4 * x1 + a5 * x2 + a9 * x3 - a10 * x4 * x5,
            x6 * (1.0 - a1 * x1 - a7 * x3 - a11 * x4) + a6 * x2 + a8 * x3 + a12 * x4,
        ]
    }

    /// `V(x)`, projected back onto the simplex when round-off pushes a
    /// coordinate marginally below zero.
    pub fn apply(&self, x: &SimplexPoint) -> Result<SimplexPoint> {
        settle(self.image(x.coords()))
    }

    /// ∞-norm of `V(x) − x`.
    pub fn residual(&self, x: &SimplexPoint) -> f64 {
        self.residual_raw(x.coords())
    }

    pub fn residual_raw(&self, x: &[f64; DIM]) -> f64 {
        linf_distance(&self.image(x), x)
    }
}

/// Clamps round-off negatives and rescales, or reports a genuine exit from
/// the simplex.
pub(crate) fn settle(mut coords: [f64; DIM]) -> Result<SimplexPoint> {
    let mut clamped = false;
    for (i, v) in coords.iter_mut().enumerate() {
        if !v.is_finite() || *v < -TOL_NONNEG {
            return Err(Error::LeftSimplex {
                coordinate: i + 1,
                value: *v,
            });
        }
        if *v < 0.0 {
            log::debug!("clamping x{} = {:e} to zero", i + 1, *v);
            *v = 0.0;
            clamped = true;
        }
    }
    let sum: f64 = coords.iter().sum();
    if clamped || (sum - 1.0).abs() > SUM_DRIFT {
        log::debug!("rescaling image with coordinate sum {sum}");
        coords.iter_mut().for_each(|v| *v /= sum);
    }
    SimplexPoint::new(coords)
}

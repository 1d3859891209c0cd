use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIM: usize = 6;

/// Allowed negative excursion of a coordinate.
pub const TOL_NONNEG: f64 = 1e-12;
/// Allowed deviation of the coordinate sum from one.
pub const TOL_SUM: f64 = 1e-12;

/// Compartment names in coordinate order.
pub const COMPARTMENTS: [&str; DIM] = [
    "phytoplankton",
    "zooplankton",
    "mixoplankton",
    "bacteria",
    "dissolved organic matter",
    "dissolved inorganic matter",
];

/// A state of the system: concentrations `(P, Z, M, B, O, I)`, nonnegative and
/// summing to one within [`TOL_NONNEG`] / [`TOL_SUM`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexPoint([f64; DIM]);

impl SimplexPoint {
    pub fn new(coords: [f64; DIM]) -> Result<Self> {
        check_membership(&coords).map_err(Error::NotOnSimplex)?;
        Ok(Self(coords))
    }

    /// Vertex `e_i`, 1-based.
    pub fn vertex(i: usize) -> Self {
        assert!((1..=DIM).contains(&i), "vertex index {i} out of 1..=6");
        let mut coords = [0.0; DIM];
        coords[i - 1] = 1.0;
        Self(coords)
    }

    /// Point `(0, 0, 0, 0, λ, 1 − λ)` of the matter-only segment.
    pub fn matter_only(lambda: f64) -> Result<Self> {
        Self::new([0.0, 0.0, 0.0, 0.0, lambda, 1.0 - lambda])
    }

    #[inline]
    pub fn coords(&self) -> &[f64; DIM] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        linf_distance(&self.0, &other.0)
    }
}

impl Index<usize> for SimplexPoint {
    type Output = f64;

    /// Zero-based coordinate access.
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{v}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl<'de> Deserialize<'de> for SimplexPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coords = <[f64; DIM]>::deserialize(deserializer)?;
        SimplexPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_membership(coords: &[f64; DIM]) -> std::result::Result<(), String> {
    if let Some((i, v)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(format!("x{} is not finite ({v})", i + 1));
    }
    if let Some((i, v)) = coords.iter().enumerate().find(|(_, &v)| v < -TOL_NONNEG) {
        return Err(format!("x{} = {v:e} is negative", i + 1));
    }
    let sum: f64 = coords.iter().sum();
    if (sum - 1.0).abs() > TOL_SUM {
        return Err(format!("coordinates sum to {sum}, not 1"));
    }
    Ok(())
}

pub fn linf_distance(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// ∞-distance from `x` to the segment `{(0, 0, 0, 0, λ, 1 − λ) : λ ∈ [0, 1]}`
/// together with the closest `λ`.
pub fn distance_to_matter_segment(x: &[f64; DIM]) -> (f64, f64) {
    // For the last two coordinates the best λ is the midpoint of x5 and 1 − x6.
    let lambda = (0.5 * (x[4] + 1.0 - x[5])).clamp(0.0, 1.0);
    let tail = (x[4] - lambda).abs().max((x[5] - (1.0 - lambda)).abs());
    let head = x[..4].iter().map(|v| v.abs()).fold(0.0, f64::max);
    (head.max(tail), lambda)
}

pub fn is_on_matter_segment(x: &[f64; DIM], tol: f64) -> bool {
    distance_to_matter_segment(x).0 <= tol
}

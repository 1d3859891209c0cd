//! Cubic stochastic matrix form `x'_k = Σ_ij P_{ij,k} x_i x_j` of the operator,
//! the simplex-invariance criterion for real cubic matrices, and the
//! ℓ-Volterra zero-pattern test.

use crate::error::{Error, Result};
use crate::operator::{settle, Qso};
use crate::simplex::{SimplexPoint, DIM};

/// Row sums and symmetry are checked to this tolerance.
pub const TENSOR_TOL: f64 = 1e-12;

/// Real cubic matrix `γ_{ij,k}` of arbitrary dimension. Indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CubicMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(
            i >= 1 && j >= 1 && k >= 1 && i <= self.dim && j <= self.dim && k <= self.dim
        );
        ((i - 1) * self.dim + (j - 1)) * self.dim + (k - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[self.offset(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let o = self.offset(i, j, k);
        self.entries[o] = value;
    }

    /// Stores `value` at both `(i, j, k)` and `(j, i, k)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.set(i, j, k, value);
        self.set(j, i, k, value);
    }

    /// Largest `|γ_{ij,k} − γ_{ji,k}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest `|Σ_k γ_{ij,k} − 1|`.
    pub fn row_sum_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                let s: f64 = (1..=n).map(|k| self.get(i, j, k)).sum();
                worst = worst.max((s - 1.0).abs());
            }
        }
        worst
    }
}

/// Decides whether the quadratic operator with real coefficients `gamma`
/// maps the simplex into itself.
///
/// Requires symmetry and unit row sums; a matrix without them is refused.
/// Then the answer is true iff `0 ≤ γ_{ii,k} ≤ 1` and
/// `−√(γ_{ii,k} γ_{jj,k}) ≤ γ_{ij,k} ≤ 1 + √((1 − γ_{ii,k})(1 − γ_{jj,k}))`
/// for every `i, j, k`.
pub fn check_simplex_criterion(gamma: &CubicMatrix) -> Result<bool> {
    let sym = gamma.symmetry_defect();
    if sym > TENSOR_TOL {
        return Err(Error::TensorInvariant(format!(
            "not symmetric (defect {sym:e})"
        )));
    }
    let rows = gamma.row_sum_defect();
    if rows > TENSOR_TOL {
        return Err(Error::TensorInvariant(format!(
            "row sums differ from 1 by up to {rows:e}"
        )));
    }
    let n = gamma.dim();
    for i in 1..=n {
        for k in 1..=n {
            let d = gamma.get(i, i, k);
            if !(-TENSOR_TOL..=1.0 + TENSOR_TOL).contains(&d) {
                return Ok(false);
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let gi = gamma.get(i, i, k).clamp(0.0, 1.0);
                let gj = gamma.get(j, j, k).clamp(0.0, 1.0);
                let g = gamma.get(i, j, k);
                let lower = -(gi * gj).sqrt() - TENSOR_TOL;
                let upper = 1.0 + ((1.0 - gi) * (1.0 - gj)).sqrt() + TENSOR_TOL;
                if g < lower || g > upper {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The 6×6×6 cubic stochastic matrix of the plankton operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QsoTensor {
    inner: CubicMatrix,
}

impl QsoTensor {
    /// Wraps a cubic matrix after checking nonnegativity, symmetry and unit
    /// row sums.
    pub fn from_cubic(inner: CubicMatrix) -> Result<Self> {
        if inner.dim() != DIM {
            return Err(Error::TensorInvariant(format!(
                "dimension {} instead of {DIM}",
                inner.dim()
            )));
        }
        let t = Self { inner };
        t.check_invariants()?;
        Ok(t)
    }

    /// Builds the coefficient table of the operator. Entries recorded as a
    /// symmetric-pair total `2P_{ij,k} = v` are stored as `v/2` in both slots.
    pub fn build(qso: &Qso) -> Self {
        let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
        let mut m = CubicMatrix::zeros(DIM);
        let mut diag = |i: usize, k: usize, v: f64| m.set(i, i, k, v);
        // target compartment 1
        diag(1, 1, 1.0 - a4);
        let mut pairs: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(64);
        pairs.extend([
            (1, 2, 1, 1.0 - a2 - a4),
            (1, 3, 1, 1.0 - a3 - a4),
            (1, 4, 1, 1.0 - a4),
            (1, 5, 1, 1.0 - a4),
            (1, 6, 1, 1.0 + a1 - a4),
        ]);
        // 2
        diag(2, 2, 1.0 - a5 - a6);
        pairs.extend([
            (1, 2, 2, 1.0 + a2 - a5 - a6),
            (2, 3, 2, 1.0 - a5 - a6),
            (2, 4, 2, 1.0 - a5 - a6),
            (2, 5, 2, 1.0 - a5 - a6),
            (2, 6, 2, 1.0 - a5 - a6),
        ]);
        // 3
        diag(3, 3, 1.0 - a8 - a9);
        pairs.extend([
            (1, 3, 3, 1.0 + a3 - a8 - a9),
            (2, 3, 3, 1.0 - a8 - a9),
            (3, 4, 3, 1.0 - a8 - a9),
            (3, 5, 3, 1.0 - a8 - a9),
            (3, 6, 3, 1.0 + a7 - a8 - a9),
        ]);
        // 4
        diag(4, 4, 1.0 - a12);
        pairs.extend([
            (1, 4, 4, 1.0 - a12),
            (2, 4, 4, 1.0 - a12),
            (3, 4, 4, 1.0 - a12),
            (4, 5, 4, 1.0 + a10 - a12),
            (4, 6, 4, 1.0 + a11 - a12),
        ]);
        // 5
        diag(1, 5, a4);
        diag(2, 5, a5);
        diag(3, 5, a9);
        diag(5, 5, 1.0);
        pairs.extend([
            (1, 2, 5, a4 + a5),
            (1, 3, 5, a4 + a9),
            (1, 4, 5, a4),
            (1, 5, 5, 1.0 + a4),
            (1, 6, 5, a4),
            (2, 3, 5, a5 + a9),
            (2, 4, 5, a5),
            (2, 5, 5, 1.0 + a5),
            (2, 6, 5, a5),
            (3, 4, 5, a9),
            (3, 5, 5, 1.0 + a9),
            (3, 6, 5, a9),
            (4, 5, 5, 1.0 - a10),
            (5, 6, 5, 1.0),
        ]);
        // 6
        diag(2, 6, a6);
        diag(3, 6, a8);
        diag(4, 6, a12);
        diag(6, 6, 1.0);
        pairs.extend([
            (1, 2, 6, a6),
            (1, 3, 6, a8),
            (1, 4, 6, a12),
            (1, 6, 6, 1.0 - a1),
            (2, 3, 6, a6 + a8),
            (2, 4, 6, a6 + a12),
            (2, 5, 6, a6),
            (2, 6, 6, 1.0 + a6),
            (3, 4, 6, a8 + a12),
            (3, 5, 6, a8),
            (3, 6, 6, 1.0 - a7 + a8),
            (4, 5, 6, a12),
            (4, 6, 6, 1.0 - a11 + a12),
            (5, 6, 6, 1.0),
        ]);
        for (i, j, k, twice) in pairs {
            m.set_symmetric(i, j, k, 0.5 * twice);
        }
        Self { inner: m }
    }

    /// `P_{ij,k}`, 1-based.
    #[inline]
    pub fn entry(&self, i: usize, j: usize, k: usize) -> f64 {
        self.inner.get(i, j, k)
    }

    pub fn as_cubic(&self) -> &CubicMatrix {
        &self.inner
    }

    pub fn check_invariants(&self) -> Result<()> {
        let m = &self.inner;
        for i in 1..=DIM {
            for j in 1..=DIM {
                for k in 1..=DIM {
                    let v = m.get(i, j, k);
                    // 1 − a8 − a9 and friends round to −1e-16 on the boundary.
                    if !(-TENSOR_TOL..=1.0 + TENSOR_TOL).contains(&v) {
                        return Err(Error::TensorInvariant(format!(
                            "P_{{{i}{j},{k}}} = {v} outside [0, 1]"
                        )));
                    }
                }
            }
        }
        let sym = m.symmetry_defect();
        if sym > 0.0 {
            return Err(Error::TensorInvariant(format!(
                "not symmetric (defect {sym:e})"
            )));
        }
        let rows = m.row_sum_defect();
        if rows > TENSOR_TOL {
            return Err(Error::TensorInvariant(format!(
                "row sums differ from 1 by up to {rows:e}"
            )));
        }
        Ok(())
    }

    /// `x'_k = Σ_i Σ_j P_{ij,k} x_i x_j`.
    pub fn apply(&self, x: &SimplexPoint) -> Result<SimplexPoint> {
        let x = x.coords();
        let mut out = [0.0; DIM];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..DIM {
                if x[i] == 0.0 {
                    continue;
                }
                let mut row = 0.0;
                for j in 0..DIM {
                    row += self.inner.get(i + 1, j + 1, k + 1) * x[j];
                }
                acc += x[i] * row;
            }
            *slot = acc;
        }
        settle(out)
    }

    /// Whether the matrix obeys the ℓ-Volterra pattern: `P_{ij,k} = 0` for
    /// `k ∉ {i, j}` whenever `k ≤ ℓ`, and for every `k > ℓ` some
    /// `P_{ij,k} > 0` with `i ≠ k`, `j ≠ k`.
    ///
    /// # Panics
    /// If `l` is outside `1..=6`.
    pub fn is_l_volterra(&self, l: usize) -> bool {
        assert!((1..=DIM).contains(&l), "ℓ = {l} outside 1..=6");
        let m = &self.inner;
        let off_pattern = |k: usize| {
            (1..=DIM)
                .flat_map(move |i| (1..=DIM).map(move |j| (i, j)))
                .filter(move |&(i, j)| i != k && j != k)
                .map(move |(i, j)| m.get(i, j, k))
        };
        let volterra_part = (1..=l).all(|k| off_pattern(k).all(|v| v == 0.0));
        let rest = (l + 1..=DIM).all(|k| off_pattern(k).any(|v| v > 0.0));
        volterra_part && rest
    }
}

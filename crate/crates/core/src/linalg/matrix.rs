use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Absolute tolerance under which an asymmetric input is silently symmetrized.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric real matrix.
///
/// Construction checks that every entry is finite and that the input is
/// symmetric up to a tolerance; inputs within tolerance are replaced by
/// `(M + Mᵀ)/2` so that the stored matrix is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds a symmetric matrix, rejecting asymmetry above [`SYMMETRY_TOL`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(m, SYMMETRY_TOL)
    }

    /// Builds a symmetric matrix, symmetrizing entries whose mirror differs by at
    /// most `tol` (relative to `max(1, max |M_ij|)`).
    pub fn with_tolerance(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let d = m.nrows();
        let mut scale = 1.0_f64;
        for j in 0..d {
            for i in 0..d {
                let x = m[(i, j)];
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                scale = scale.max(x.abs());
            }
        }
        let mut inner = m;
        for i in 0..d {
            for j in (i + 1)..d {
                let (a, b) = (inner[(i, j)], inner[(j, i)]);
                let diff = (a - b).abs();
                if diff > tol * scale {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        diff,
                    });
                }
                let avg = 0.5 * (a + b);
                inner[(i, j)] = avg;
                inner[(j, i)] = avg;
            }
        }
        Ok(Self { inner })
    }

    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    /// Builds from the lower triangle produced by `f(i, j)` with `i >= j`.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let x = f(i, j);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// The rank-one matrix `v vᵀ`.
    pub fn outer(v: &DVector<f64>) -> Result<Self> {
        Self::new(v * v.transpose())
    }

    /// `Xᵀ X` for an arbitrary `n × d` matrix `X`.
    pub fn gram(x: &DMatrix<f64>) -> Result<Self> {
        let mut g = x.tr_mul(x);
        let d = g.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                let avg = 0.5 * (g[(i, j)] + g[(j, i)]);
                g[(i, j)] = avg;
                g[(j, i)] = avg;
            }
        }
        Self::new(g)
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.inner * x))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.inner * x
    }

    /// `tr(M N)` for symmetric `M`, `N`, i.e. the entrywise inner product.
    pub fn frobenius_dot(&self, other: &SymmetricMatrix) -> f64 {
        self.inner.dot(&other.inner)
    }

    pub fn scaled(&self, s: f64) -> SymmetricMatrix {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn neg(&self) -> SymmetricMatrix {
        self.scaled(-1.0)
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: f64) -> SymmetricMatrix {
        let mut inner = self.inner.clone();
        for i in 0..self.dim() {
            inner[(i, i)] += s;
        }
        Self { inner }
    }

    pub fn add(&self, other: &SymmetricMatrix) -> SymmetricMatrix {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> SymmetricMatrix {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    /// Wraps a matrix already known to be exactly symmetric and finite.
    pub(crate) fn from_symmetric_unchecked(inner: DMatrix<f64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self { inner }
    }
}

impl serde::Serialize for SymmetricMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self
            .inner
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for SymmetricMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(serde::de::Error::custom(format!(
                "row of length {} in a {d}x{d} matrix",
                bad.len()
            )));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_row_slice(d, &flat).map_err(serde::de::Error::custom)
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.inner[idx]
    }
}

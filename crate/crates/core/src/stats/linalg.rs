use std::cmp::Ordering;
use std::ops::Deref;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated when constructing an [`SpdMatrix`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A finite real vector of measurement dimension k >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanVector(DVector<f64>);

impl MeanVector {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("vector"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(MeanVector(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(values))
    }

    pub fn zeros(k: usize) -> Self {
        MeanVector(DVector::zeros(k.max(1)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    /// Lexicographic total order on the raw values; used to put exchangeable
    /// fragments in a canonical order so results do not depend on input order.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl Deref for MeanVector {
    type Target = DVector<f64>;

    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Symmetric strictly positive definite matrix with its Cholesky factor cached.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl SpdMatrix {
    /// Validates symmetry (to [`SYMMETRY_TOLERANCE`] relative) and positive
    /// definiteness. The stored matrix is the exact symmetrization of the input.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::EmptyInput("matrix"));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        let asymmetry = (&matrix - matrix.transpose()).amax();
        if asymmetry > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Self::from_symmetric_unchecked(symmetrize(matrix), "cholesky")
    }

    /// For matrices that are symmetric up to floating-point noise by
    /// construction (products, inverses). Symmetrizes, then factorizes.
    pub fn symmetrized(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Self::from_symmetric_unchecked(symmetrize(matrix), "cholesky")
    }

    fn from_symmetric_unchecked(matrix: DMatrix<f64>, context: &str) -> Result<Self> {
        let chol = Cholesky::new(matrix.clone()).ok_or_else(|| Error::NotPositiveDefinite {
            context: context.to_string(),
        })?;
        // nalgebra only rejects non-positive pivots; also reject pivots that
        // underflowed to a value that cannot be inverted.
        if chol.l_dirty().diagonal().iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::NotPositiveDefinite {
                context: context.to_string(),
            });
        }
        Ok(SpdMatrix { matrix, chol })
    }

    pub fn identity(k: usize) -> Self {
        Self::scaled_identity(k, 1.0)
    }

    pub fn scaled_identity(k: usize, scale: f64) -> Self {
        Self::from_diagonal(&vec![scale; k]).expect("positive scaled identity")
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::NotPositiveDefinite {
                context: "non-positive diagonal entry".into(),
            });
        }
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Lower-triangular factor L with L Lᵀ = Σ.
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        symmetrize(self.chol.inverse())
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    /// Squared Mahalanobis norm xᵀ Σ⁻¹ x via one triangular solve.
    pub fn mahalanobis_sq(&self, x: &DVector<f64>) -> f64 {
        let z = self
            .chol
            .l_dirty()
            .solve_lower_triangular(x)
            .expect("cholesky diagonal is positive");
        z.norm_squared()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn add(&self, other: &SpdMatrix) -> Result<SpdMatrix> {
        check_dim(self.dim(), other.dim())?;
        SpdMatrix::symmetrized(&self.matrix + &other.matrix)
    }

    pub fn scale(&self, factor: f64) -> Result<SpdMatrix> {
        SpdMatrix::symmetrized(&self.matrix * factor)
    }
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(m.clone()))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalue repair: raise every eigenvalue below `floor` to `floor`.
/// Returns the repaired matrix and the minimum eigenvalue before repair.
pub fn clamp_eigenvalues(m: &DMatrix<f64>, floor: f64) -> (DMatrix<f64>, f64) {
    let eig = SymmetricEigen::new(symmetrize(m.clone()));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let clamped = eig.eigenvalues.map(|v| v.max(floor));
    let q = &eig.eigenvectors;
    let repaired = q * DMatrix::from_diagonal(&clamped) * q.transpose();
    (symmetrize(repaired), min)
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Row-major lower triangle: (1,1), (2,1), (2,2), (3,1), ...
pub fn lower_triangle(m: &DMatrix<f64>) -> Vec<f64> {
    let k = m.nrows();
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in 0..=i {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn from_lower_triangle(values: &[f64], k: usize) -> Result<DMatrix<f64>> {
    if values.len() != k * (k + 1) / 2 {
        return Err(Error::DimensionMismatch {
            expected: k * (k + 1) / 2,
            found: values.len(),
        });
    }
    let mut m = DMatrix::zeros(k, k);
    let mut idx = 0;
    for i in 0..k {
        for j in 0..=i {
            m[(i, j)] = values[idx];
            m[(j, i)] = values[idx];
            idx += 1;
        }
    }
    Ok(m)
}

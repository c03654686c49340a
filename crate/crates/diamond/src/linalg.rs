//! Dense complex matrix arithmetic and inversion sized for the doubled-space
//! (8x8) problem, generic over N for coupling-graph generalizations.
//!
//! LU with partial (row) pivoting is plenty for these small, well-scaled
//! systems; no sparse or banded specialization is attempted.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot tolerance below which a matrix is declared singular.
pub const SINGULARITY_TOL: f64 = 1e-14;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Row-major entry slice (hot loops index this directly).
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest entry magnitude (max norm).
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest row sum of entry magnitudes; cheap upper bound on the
    /// spectral radius, used to pick stable integrator steps.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams(
                "vector entries must be finite".into(),
            ));
        }
        Ok(Self { data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

/// Inverts a square matrix via LU decomposition with partial pivoting.
///
/// A pivot whose magnitude falls below `SINGULARITY_TOL` times the largest
/// entry of the input signals degenerate parameters (for example zero
/// linewidths at exact resonance) and is reported as `SingularMatrix`.
pub fn invert(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let tol = SINGULARITY_TOL * m.max_norm();

    // In-place LU factorization of a working copy, recording row swaps.
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty pivot candidates");
        if pivot_mag < tol || pivot_mag == 0.0 {
            return Err(Error::SingularMatrix {
                pivot: pivot_mag,
                tolerance: tol,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(col, pivot_row);
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            lu[(r, col)] = factor;
            for j in col + 1..n {
                let sub = factor * lu[(col, j)];
                lu[(r, j)] -= sub;
            }
        }
    }

    // Solve LU x = P e_k for each unit vector to assemble the inverse.
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if perm[i] == k {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        // Forward substitution with unit-diagonal L.
        for i in 1..n {
            for j in 0..i {
                let sub = lu[(i, j)] * x[j];
                x[i] -= sub;
            }
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = lu[(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, k)] = x[i];
        }
    }
    Ok(inv)
}

/// Matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut c = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..b.cols {
                let add = aik * b[(k, j)];
                c[(i, j)] += add;
            }
        }
    }
    Ok(c)
}

/// Matrix-vector product.
pub fn matvec(a: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector> {
    if a.cols != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot apply {}x{} matrix to length-{} vector",
            a.rows,
            a.cols,
            v.len()
        )));
    }
    let mut out = ComplexVector::zeros(a.rows);
    for i in 0..a.rows {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..a.cols {
            acc += a[(i, j)] * v[j];
        }
        out[i] = acc;
    }
    Ok(out)
}

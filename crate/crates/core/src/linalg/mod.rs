//! Small dense linear algebra for real symmetric Hamiltonians and their eigenframes.
//!
//! Everything here works on matrices of dimension at most [`MAX_DIM`], stored
//! row-major in a flat `Vec<f64>`.

mod jacobi;
mod rotation;

pub use jacobi::eig_sym;
pub use rotation::{axis_angle, quat_to_so3, so3_to_quat, AxisAngle, UnitQuaternion};

use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Tolerance used to accept externally supplied matrices as rotations.
pub const ROTATION_TOL: f64 = 1e-8;

/// A real symmetric matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major data, rejecting asymmetric or non-finite input.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite matrix entry {bad}")));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Asymmetry { row: i + 1, col: j + 1 });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from a function of the upper triangle (`i <= j`); the lower
    /// triangle mirrors it.
    pub fn from_upper(n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j);
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "non-finite matrix entry {v} at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_upper(n, |_, _| 0.0)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_upper(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// Upper-triangle entries in row-major order (`n(n+1)/2` values).
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `F diag(values) F^T`, symmetrized exactly.
    pub fn from_spectrum(frame: &Frame, values: &[f64]) -> Result<Self> {
        let n = frame.dim();
        if values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} eigenvalues for a {n}-dimensional frame",
                values.len()
            )));
        }
        Self::from_upper(n, |i, j| {
            (0..n)
                .map(|k| frame.get(i, k) * values[k] * frame.get(j, k))
                .sum()
        })
    }
}

/// An ordered orthonormal basis with determinant +1, stored as the columns of a
/// rotation matrix.
///
/// Column `j` is the `j`-th basis vector; entry `(i, j)` is its `i`-th component.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    n: usize,
    data: Vec<f64>,
}

impl Frame {
    /// Accepts row-major data that is a rotation within [`ROTATION_TOL`].
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} frame, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite frame entry".into()));
        }
        let frame = Self { n, data };
        let defect = frame.orthogonality_defect();
        let det = frame.det();
        if defect > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotARotation { defect, det });
        }
        Ok(frame)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    /// Builds a frame from its columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("frame columns must have length n".into()));
        }
        let mut data = vec![0.0; n * n];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                data[i * n + j] = *v;
            }
        }
        Self::new(n, data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Inner product of column `j` of `self` with column `j` of `other`.
    pub fn column_overlap(&self, other: &Frame, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j) * other.get(i, j)).sum()
    }

    pub fn transpose(&self) -> Frame {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Frame { n, data }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Frame) -> Frame {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Frame {
            n: self.n,
            data: mat_mul(self.n, &self.data, &rhs.data),
        }
    }

    /// Multiplies column `j` by `signs[j]`.
    pub(crate) fn with_column_signs(&self, signs: &[f64]) -> Frame {
        let n = self.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] *= signs[j];
            }
        }
        Frame { n, data }
    }

    pub fn det(&self) -> f64 {
        determinant(self.n, &self.data)
    }

    /// `max |F^T F - I|` over all entries.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| self.get(i, a) * self.get(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Frame) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        frobenius_diff(&self.data, &other.data)
    }

    /// Angle of the relative rotation `self^T other` for n = 2, 3; for larger n the
    /// largest angle between corresponding columns.
    pub fn rotation_distance(&self, other: &Frame) -> f64 {
        let rel = self.transpose().compose(other);
        match self.n {
            2 => rel.get(1, 0).atan2(rel.get(0, 0)).abs(),
            3 => {
                let tr = rel.get(0, 0) + rel.get(1, 1) + rel.get(2, 2);
                let a = [
                    rel.get(2, 1) - rel.get(1, 2),
                    rel.get(0, 2) - rel.get(2, 0),
                    rel.get(1, 0) - rel.get(0, 1),
                ];
                (norm(&a) / 2.0).atan2((tr - 1.0) / 2.0)
            }
            _ => {
                let worst = (0..self.n)
                    .map(|j| {
                        let d: f64 = (0..self.n)
                            .map(|i| (self.get(i, j) - other.get(i, j)).powi(2))
                            .sum();
                        d.sqrt()
                    })
                    .fold(0.0, f64::max);
                2.0 * (worst / 2.0).min(1.0).asin()
            }
        }
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "matrix dimension {n} outside supported range 2..={MAX_DIM}"
        )));
    }
    Ok(())
}

pub(crate) fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(n: usize, data: &[f64]) -> f64 {
    let mut a = data.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / p;
            if factor != 0.0 {
                for j in col..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
            }
        }
    }
    det
}

pub(crate) fn frobenius(data: &[f64]) -> f64 {
    data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn frobenius_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the entry of largest magnitude; entries within `1e-12` of the
/// current best do not displace it, so ties go to the lowest index.
pub(crate) fn dominant_index(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    best
}

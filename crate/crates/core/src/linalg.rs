//! Small dense matrices: determinants, one-sided Jacobi singular values and
//! the hyperplane-restricted (n-1)-Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::param("rows", "ragged matrix"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Frobenius norm, `|grad f|` when the matrix is a Jacobian.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[pivot * n + k] == 0.0 {
                return Ok(0.0);
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for i in k + 1..n {
                let factor = a[i * n + k] / p;
                for j in k..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
        Ok(det)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

/// Singular values of a square matrix in ascending order, by one-sided
/// (Hestenes) Jacobi rotations.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.cols;
    let rows = m.rows;
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect();
    const TOL: f64 = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|v| v * v).sum();
                let beta: f64 = cols[q].iter().map(|v| v * v).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a * b).sum();
                if gamma == 0.0 || gamma.abs() <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for i in 0..rows {
                    let a = cp[i];
                    let b = cq[i];
                    cp[i] = c * a - s * b;
                    cq[i] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

/// `(n-1)`-dimensional Jacobian of the linear map `m` restricted to the
/// hyperplane orthogonal to `normal`: the square root of the Gram
/// determinant of `m` applied to an orthonormal basis of that hyperplane.
pub fn hyperplane_jacobian(m: &Matrix, normal: &[f64]) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.cols;
    if normal.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: normal.len(),
        });
    }
    let basis = orthonormal_complement(normal);
    let images: Vec<Vec<f64>> = basis.iter().map(|b| m.apply(b)).collect();
    let k = n - 1;
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = images[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum();
        }
    }
    Ok(gram.determinant()?.max(0.0).sqrt())
}

fn orthonormal_complement(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nu: Vec<f64> = normal.iter().map(|v| v / len).collect();
    let mut basis: Vec<Vec<f64>> = vec![nu];
    for e in 0..n {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if l > 1e-8 {
            basis.push(v.iter().map(|x| x / l).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

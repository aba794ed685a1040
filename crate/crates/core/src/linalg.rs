//! Small dense linear algebra: column-major matrices and Householder QR.

use crate::scalar::Scalar;

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Panics if the columns differ in length.
    pub fn from_columns(columns: Vec<Vec<T>>) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            assert_eq!(c.len(), rows, "ragged columns");
            data.extend(c);
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix<T> {
        Matrix::from_columns(idx.iter().map(|&j| self.col(j).to_vec()).collect())
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.col(j)) {
                *o += a * xj;
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let col = self.mul_vec(other.col(j));
            out.col_mut(j).copy_from_slice(&col);
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.rows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.rows + i]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let mut acc = T::zero();
    for &x in a {
        let s = x / scale;
        acc += s * s;
    }
    scale * acc.sqrt()
}

/// Householder QR of a tall matrix (`rows >= cols`), without pivoting.
///
/// `|R[j][j]|` equals the norm of column `j` after removing its projection on
/// the earlier columns, which the callers use for rank detection.
#[derive(Clone, Debug)]
pub struct Qr<T> {
    /// Reflector `j` occupies rows `j..` of column `j`; strict upper part is R.
    packed: Matrix<T>,
    beta: Vec<T>,
    diag: Vec<T>,
}

impl<T: Scalar> Qr<T> {
    pub fn new(mut a: Matrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        assert!(m >= n, "QR needs rows >= cols");
        let mut beta = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        for j in 0..n {
            let norm = norm2(&a.col(j)[j..]);
            if norm == T::zero() {
                continue;
            }
            let x0 = a[(j, j)];
            let alpha = if x0 >= T::zero() { -norm } else { norm };
            let v0 = x0 - alpha;
            a[(j, j)] = v0;
            let vtv = v0 * v0 + (norm * norm - x0 * x0);
            if vtv <= T::zero() {
                a[(j, j)] = x0;
                diag[j] = x0;
                continue;
            }
            let b = T::lit(2.0) / vtv;
            beta[j] = b;
            diag[j] = alpha;
            let (left, right) = a.data.split_at_mut((j + 1) * m);
            let v = &left[j * m + j..(j + 1) * m];
            for k in 0..(n - j - 1) {
                let col = &mut right[k * m + j..(k + 1) * m];
                let s = dot(v, col) * b;
                for (c, &vi) in col.iter_mut().zip(v) {
                    *c -= s * vi;
                }
            }
        }
        Qr {
            packed: a,
            beta,
            diag,
        }
    }

    pub fn ncols(&self) -> usize {
        self.packed.cols
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn r(&self, i: usize, j: usize) -> T {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.packed[(i, j)],
            std::cmp::Ordering::Equal => self.diag[i],
            std::cmp::Ordering::Greater => T::zero(),
        }
    }

    /// Overwrites `b` with `Q^T b`.
    pub fn apply_qt(&self, b: &mut [T]) {
        let m = self.packed.rows;
        assert_eq!(b.len(), m);
        for j in 0..self.packed.cols {
            if self.beta[j] == T::zero() {
                continue;
            }
            let v = &self.packed.col(j)[j..];
            let s = dot(v, &b[j..]) * self.beta[j];
            for (bi, &vi) in b[j..].iter_mut().zip(v) {
                *bi -= s * vi;
            }
        }
    }

    /// Solves `R x = b` using the leading `n` entries of `b`.
    pub fn solve_r(&self, b: &[T]) -> Vec<T> {
        let n = self.packed.cols;
        let mut x = b[..n].to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.r(i, k) * x[k];
            }
            x[i] = s / self.diag[i];
        }
        x
    }

    /// Solves `R^T x = b`.
    pub fn solve_rt(&self, b: &[T]) -> Vec<T> {
        let n = self.packed.cols;
        let mut x = b[..n].to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.r(k, i) * x[k];
            }
            x[i] = s / self.diag[i];
        }
        x
    }

    /// Least-squares solution of `A x ~= b`. Assumes full column rank.
    pub fn solve_least_squares(&self, b: &[T]) -> Vec<T> {
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        self.solve_r(&qtb)
    }
}

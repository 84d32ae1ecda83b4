//! Small dense kernels for the modal solver: a row-major matrix, Cholesky,
//! and a symmetric eigensolver (Householder tridiagonalization followed by
//! implicit QL with Wilkinson shifts).

use std::ops::{Index, IndexMut};

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Submatrix picking `rows` x `cols` by index.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(T::min_positive_value());
        for i in 0..self.rows {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Returns the index of the first non-positive pivot on failure. Pivots
    /// below `rel_tol` times the largest diagonal entry count as singular.
    pub fn new(a: &Matrix<T>, rel_tol: T) -> Result<Self, usize> {
        let n = a.rows();
        let diag_max = a
            .diagonal()
            .into_iter()
            .fold(T::zero(), |m, v| m.max(v.abs()));
        let floor = rel_tol * diag_max;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > floor) {
                return Err(j);
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(b.rows(), b.cols());
        let mut col = vec![T::zero(); b.rows()];
        for j in 0..b.cols() {
            for i in 0..b.rows() {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..b.rows() {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
/// `vectors` holds the unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoConvergence {
    pub index: usize,
}

impl<T: Scalar> SymmetricEigen<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self, NoConvergence> {
        let n = a.rows();
        assert_eq!(n, a.cols(), "square matrix required");
        let mut z = a.clone();
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        if n == 0 {
            return Ok(Self {
                values: d,
                vectors: z,
            });
        }
        householder_reduce(&mut z, &mut d, &mut e);
        accumulate_transform(&mut z, &mut d);
        implicit_ql(&mut d, &mut e, Some(&mut z))?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| d[i]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for r in 0..n {
                vectors[(r, dst)] = z[(r, src)];
            }
        }
        Ok(Self { values, vectors })
    }

    /// The `count` smallest eigenpairs only: eigenvalues of the tridiagonal
    /// form without vector accumulation, then inverse iteration and
    /// back-transformation for the requested vectors. Vectors of clustered
    /// eigenvalues are not re-orthogonalized.
    pub fn lowest(a: &Matrix<T>, count: usize) -> Result<Self, NoConvergence> {
        let n = a.rows();
        assert_eq!(n, a.cols(), "square matrix required");
        assert!(count <= n, "more eigenpairs requested than the matrix has");
        let mut z = a.clone();
        let mut h = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        if n == 0 || count == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: Matrix::zeros(n, 0),
            });
        }
        householder_reduce(&mut z, &mut h, &mut e);
        let diag: Vec<T> = (0..n).map(|i| z[(i, i)]).collect();
        let off = e.clone();
        let mut d = diag.clone();
        implicit_ql(&mut d, &mut e, None)?;
        d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        d.truncate(count);

        let mut vectors = Matrix::zeros(n, count);
        for (k, &lambda) in d.iter().enumerate() {
            let mut y = tridiagonal_inverse_iteration(&diag, &off, lambda);
            // x = P_{n-1} ⋯ P_1 y with P_i = I − u uᵀ / h_i stored in row i
            for i in 1..n {
                if h[i] == T::zero() {
                    continue;
                }
                let mut dot = T::zero();
                for j in 0..i {
                    dot += z[(i, j)] * y[j];
                }
                let f = dot / h[i];
                for j in 0..i {
                    y[j] -= f * z[(i, j)];
                }
            }
            for r in 0..n {
                vectors[(r, k)] = y[r];
            }
        }
        Ok(Self { values: d, vectors })
    }

    pub fn vector(&self, k: usize) -> Vec<T> {
        (0..self.vectors.rows())
            .map(|r| self.vectors[(r, k)])
            .collect()
    }
}

// Householder reduction to tridiagonal form. On exit row i of `a` holds the
// reflector u_i (entries 0..i), `d[i]` its h_i, `e[1..]` the sub-diagonal
// and the diagonal of `a` the tridiagonal diagonal.
fn householder_reduce<T: Scalar>(a: &mut Matrix<T>, d: &mut [T], e: &mut [T]) {
    let n = a.rows();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let mut scale = T::zero();
            for k in 0..=l {
                scale += a[(i, k)].abs();
            }
            if scale == T::zero() {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let mut f = a[(i, l)];
                let mut g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                f = T::zero();
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    g = T::zero();
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let upd = f * e[k] + g * a[(i, k)];
                        a[(j, k)] -= upd;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
}

// Overwrite `a` with the orthogonal transform of `householder_reduce` and
// `d` with the tridiagonal diagonal.
fn accumulate_transform<T: Scalar>(a: &mut Matrix<T>, d: &mut [T]) {
    let n = a.rows();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 0..i {
                    let upd = g * a[(k, i)];
                    a[(k, j)] -= upd;
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = T::one();
        for j in 0..i {
            a[(j, i)] = T::zero();
            a[(i, j)] = T::zero();
        }
    }
}

// Solve (T − λI) y = b repeatedly for the symmetric tridiagonal T with
// diagonal `diag` and sub-diagonal `off[1..]`, using partial pivoting.
fn tridiagonal_inverse_iteration<T: Scalar>(diag: &[T], off: &[T], lambda: T) -> Vec<T> {
    let n = diag.len();
    let norm = (0..n).fold(T::zero(), |acc, i| acc.max(diag[i].abs() + off[i].abs()));
    let tiny = T::epsilon() * norm.max(T::min_positive_value());
    let mut b: Vec<T> = (0..n)
        .map(|i| T::one() + lit::<T>(1.0 / (i as f64 + 2.0)))
        .collect();
    if n == 1 {
        return vec![T::one()];
    }

    // LU of T − λI: d main, du first and du2 second super-diagonal, dl multipliers
    let mut d: Vec<T> = diag.iter().map(|&v| v - lambda).collect();
    let mut dl: Vec<T> = off[1..].to_vec();
    let mut du: Vec<T> = off[1..].to_vec();
    let mut du2 = vec![T::zero(); n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < tiny {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if d[n - 1].abs() < tiny {
        d[n - 1] = tiny;
    }

    for _ in 0..3 {
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            } else {
                let v = b[i];
                b[i + 1] -= dl[i] * v;
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
        let scale = b.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        for v in &mut b {
            *v /= scale;
        }
    }
    b
}

fn implicit_ql<T: Scalar>(
    d: &mut [T],
    e: &mut [T],
    mut z: Option<&mut Matrix<T>>,
) -> Result<(), NoConvergence> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = lit::<T>(2.0);
    let eps = T::epsilon();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

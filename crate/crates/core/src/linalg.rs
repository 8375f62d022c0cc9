//! Dense small-matrix linear algebra: Gram matrices, determinants, Cholesky
//! positive-definiteness, Sturm-sequence eigenvalue bisection for symmetric
//! tridiagonal matrices, and a cyclic Jacobi eigensolver for the dense case.
//!
//! Matrices here are tiny (dimension rarely above ten), so everything is a
//! straightforward `O(n^3)` routine over a row-major `Vec`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `a - c * b`.
#[inline]
pub fn sub_scaled<T: Scalar>(a: &[T], c: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - c * y).collect()
}

#[inline]
pub fn scaled<T: Scalar>(a: &[T], c: T) -> Vec<T> {
    a.iter().map(|&x| x * c).collect()
}

/// Unit vector along `a`, or `None` when `a` is numerically zero.
pub fn normalized<T: Scalar>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if !(n > T::tiny_norm()) {
        return None;
    }
    Some(scaled(a, T::one() / n))
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
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

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, &x) in c.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite);
                }
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
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

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Largest `|m_ij - m_ji|`.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows.min(self.cols) {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    fn require_symmetric(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let asym = self.max_asymmetry();
        if asym > T::symmetry_tol() {
            return Err(Error::NotSymmetric {
                asymmetry: asym.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)))
            .finish()
    }
}

/// `V^T V` for a matrix with `n` rows and at most `n` columns, symmetrized.
pub fn gram<T: Scalar>(v: &Mat<T>) -> Result<Mat<T>> {
    if v.cols() > v.rows() {
        return Err(Error::DimensionMismatch {
            expected: v.rows(),
            found: v.cols(),
        });
    }
    let cols = v.columns();
    Ok(gram_of(&cols))
}

/// Gram matrix of a list of vectors.
pub fn gram_of<T: Scalar>(vectors: &[Vec<T>]) -> Mat<T> {
    let k = vectors.len();
    let mut g = Mat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let d = dot(&vectors[i], &vectors[j]);
            g[(i, j)] = d;
            g[(j, i)] = d;
        }
    }
    g
}

/// LU factorization with partial pivoting, stored compactly.
struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

fn lu<T: Scalar>(m: &Mat<T>) -> Result<Lu<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = T::one();
    let mut singular = false;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[(i, k)].abs()))
            .fold(
                (k, -T::one()),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pmax == T::zero() {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let piv = a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / piv;
            a[(i, k)] = f;
            if f != T::zero() {
                for j in (k + 1)..n {
                    a[(i, j)] = a[(i, j)] - f * a[(k, j)];
                }
            }
        }
    }
    Ok(Lu {
        lu: a,
        perm,
        sign,
        singular,
    })
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Scalar>(m: &Mat<T>) -> Result<T> {
    let f = lu(m)?;
    if f.singular {
        return Ok(T::zero());
    }
    let n = m.rows();
    Ok((0..n).fold(f.sign, |acc, i| acc * f.lu[(i, i)]))
}

/// Solves `m x = b`.
pub fn solve<T: Scalar>(m: &Mat<T>, b: &[T]) -> Result<Vec<T>> {
    let n = m.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let f = lu(m)?;
    let scale = (0..n).map(|i| f.lu[(i, i)].abs()).fold(T::zero(), T::max);
    if f.singular || (0..n).any(|i| f.lu[(i, i)].abs() <= T::epsilon() * scale) {
        return Err(Error::RankDeficient { abs_det: 0.0 });
    }
    let mut y: Vec<T> = f.perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - f.lu[(i, k)] * y[k];
        }
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] = y[i] - f.lu[(i, k)] * y[k];
        }
        y[i] = y[i] / f.lu[(i, i)];
    }
    Ok(y)
}

pub fn inverse<T: Scalar>(m: &Mat<T>) -> Result<Mat<T>> {
    let n = m.rows();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        cols.push(solve(m, &e)?);
    }
    Mat::from_columns(&cols)
}

/// Lower-triangular Cholesky factor, or `None` when some pivot is `<= tol`.
pub fn cholesky<T: Scalar>(m: &Mat<T>, tol: T) -> Result<Option<Mat<T>>> {
    m.require_symmetric()?;
    let n = m.rows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Ok(None);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(Some(l))
}

/// True iff Cholesky succeeds with every pivot above `tol` (default `1e-10`).
pub fn is_positive_definite<T: Scalar>(m: &Mat<T>, tol: T) -> Result<bool> {
    Ok(cholesky(m, tol)?.is_some())
}

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<T> {
    diag: Vec<T>,
    offdiag: Vec<T>,
}

impl<T: Scalar> SymTridiag<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len().saturating_sub(1),
                found: offdiag.len(),
            });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { diag, offdiag })
    }

    /// Unit diagonal with the given couplings `β_i`.
    pub fn unit(beta: &[T]) -> Result<Self> {
        Self::new(vec![T::one(); beta.len() + 1], beta.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[T] {
        &self.offdiag
    }

    /// Extracts the tridiagonal part of a dense symmetric matrix.
    pub fn from_dense(m: &Mat<T>) -> Result<Self> {
        m.require_symmetric()?;
        let n = m.rows();
        Self::new(
            (0..n).map(|i| m[(i, i)]).collect(),
            (1..n).map(|i| m[(i - 1, i)]).collect(),
        )
    }

    pub fn to_dense(&self) -> Mat<T> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &b) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = b;
            m[(i + 1, i)] = b;
        }
        m
    }

    /// Number of eigenvalues strictly below `x` (Sturm sign count via the
    /// `LDL^T` pivots of `T - xI`).
    pub fn sturm_count(&self, x: T) -> usize {
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.dim() {
            let coupling = if i == 0 {
                T::zero()
            } else {
                self.offdiag[i - 1] * self.offdiag[i - 1]
            };
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - coupling / q
            };
            if q == T::zero() {
                q = -T::epsilon() * (T::one() + x.abs());
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// `det(T - λI)` through the three-term recurrence
    /// `P_j = (d_j - λ) P_{j-1} - β_{j-1}^2 P_{j-2}`.
    pub fn char_poly(&self, lambda: T) -> T {
        let mut prev = T::one();
        let mut cur = self.diag[0] - lambda;
        for j in 1..self.dim() {
            let b = self.offdiag[j - 1];
            let next = (self.diag[j] - lambda) * cur - b * b * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    pub fn determinant(&self) -> T {
        self.char_poly(T::zero())
    }

    /// Gershgorin interval containing the spectrum.
    fn gershgorin(&self) -> (T, T) {
        let n = self.dim();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut r = T::zero();
            if i > 0 {
                r = r + self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                r = r + self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (zero based) by bisection to accuracy `tol`.
    pub fn eigenvalue(&self, k: usize, tol: T) -> T {
        assert!(k < self.dim());
        let (lo0, hi0) = self.gershgorin();
        let pad = T::epsilon() * (T::one() + lo0.abs().max(hi0.abs()));
        let mut lo = lo0 - pad;
        let mut hi = hi0 + pad;
        let two = T::lit(2.0);
        while hi - lo > tol {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / two
    }

    pub fn eigenvalues(&self, tol: T) -> Vec<T> {
        (0..self.dim()).map(|k| self.eigenvalue(k, tol)).collect()
    }
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
///
/// For unit diagonals built from unit generators the result is `1` when all
/// couplings vanish and strictly below `1` otherwise.
pub fn tridiag_lambda_min<T: Scalar>(t: &SymTridiag<T>, tol: T) -> T {
    let lam = t.eigenvalue(0, tol);
    let unit_diag = t
        .diag
        .iter()
        .all(|&d| (d - T::one()).abs() <= T::symmetry_tol());
    if unit_diag && t.offdiag.iter().any(|&b| b != T::zero()) {
        debug_assert!(lam < T::one(), "interlacing bound violated: {lam}");
    }
    lam
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(m: &Mat<T>) -> Result<Vec<T>> {
    m.require_symmetric()?;
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)]) / T::lit(2.0);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let frob = a.data.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let target = T::epsilon() * frob;
    for _sweep in 0..100 {
        let off = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + a[(i, j)] * a[(i, j)])
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(ev)
}

/// Smallest eigenvalue of a dense symmetric matrix.
///
/// Jacobi converges to machine precision, so `tol` only has to be positive.
pub fn smallest_eigenvalue_dense<T: Scalar>(m: &Mat<T>, tol: T) -> Result<T> {
    debug_assert!(tol > T::zero());
    Ok(symmetric_eigenvalues(m)?
        .first()
        .copied()
        .unwrap_or_else(T::one))
}

/// Orthonormal basis of the span of `vectors` by modified Gram-Schmidt with
/// one re-orthogonalization pass. Vectors whose residual falls below
/// `rel_tol` times their norm are skipped, so input order decides the basis.
pub fn orthonormal_basis<T: Scalar>(vectors: &[Vec<T>], rel_tol: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if !(n0 > T::tiny_norm()) {
            continue;
        }
        let mut r = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let c = dot(&r, q);
                r = sub_scaled(&r, c, q);
            }
        }
        let nr = norm(&r);
        if nr > rel_tol * n0 {
            basis.push(scaled(&r, T::one() / nr));
        }
    }
    basis
}

/// Numerical rank of a set of vectors.
pub fn rank<T: Scalar>(vectors: &[Vec<T>], rel_tol: T) -> usize {
    orthonormal_basis(vectors, rel_tol).len()
}

/// Least squares `min |A x - b|` for a column list `A`, via modified
/// Gram-Schmidt QR. Columns numerically dependent on earlier ones get a zero
/// coefficient.
pub fn least_squares<T: Scalar>(columns: &[Vec<T>], b: &[T]) -> Vec<T> {
    let k = columns.len();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut r = Mat::zeros(k, k);
    let mut keep = vec![false; k];
    for (j, col) in columns.iter().enumerate() {
        let n0 = norm(col);
        let mut v = col.clone();
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                if qi.is_empty() {
                    continue;
                }
                let c = dot(&v, qi);
                r[(i, j)] = r[(i, j)] + c;
                v = sub_scaled(&v, c, qi);
            }
        }
        let nv = norm(&v);
        if nv > T::lit(1e-12).max(T::epsilon() * T::lit(100.0)) * n0.max(T::one()) {
            r[(j, j)] = nv;
            q.push(scaled(&v, T::one() / nv));
            keep[j] = true;
        } else {
            q.push(Vec::new());
        }
    }
    let mut x = vec![T::zero(); k];
    for j in (0..k).rev() {
        if !keep[j] {
            continue;
        }
        let mut s = dot(&q[j], b);
        for i in (j + 1)..k {
            if keep[i] {
                s = s - r[(j, i)] * x[i];
            }
        }
        x[j] = s / r[(j, j)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn gram_examples() {
        assert_eq!(gram(&Mat::<f64>::identity(3)).unwrap(), Mat::identity(3));
        let v = m(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(gram(&v).unwrap(), Mat::identity(2));
        let s = 0.5f64.sqrt();
        let v = Mat::from_columns(&[vec![1.0, 0.0], vec![s, s]]).unwrap();
        let g = gram(&v).unwrap();
        assert_abs_diff_eq!(g[(0, 1)], s, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(1, 1)], 1.0, epsilon = 1e-15);
        assert_eq!(g.max_asymmetry(), 0.0);
        let wide = Mat::<f64>::zeros(2, 3);
        assert!(matches!(gram(&wide), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&Mat::<f64>::identity(4)).unwrap(), 1.0);
        assert_eq!(determinant(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap(), -1.0);
        let sing = m(&[&[1.0, 1.0, 2.0], &[3.0, 3.0, -1.0], &[0.5, 0.5, 4.0]]);
        assert!(determinant(&sing).unwrap().abs() < 1e-12);
        assert!(matches!(
            determinant(&Mat::<f64>::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn positive_definite_examples() {
        assert!(is_positive_definite(&Mat::<f64>::identity(5), 1e-10).unwrap());
        assert!(!is_positive_definite(&m(&[&[1.0, -1.0], &[-1.0, 1.0]]), 1e-10).unwrap());
        // eigenvalues 1 -+ 0.5
        assert!(is_positive_definite(&m(&[&[1.0, -0.5], &[-0.5, 1.0]]), 1e-10).unwrap());
        let asym = m(&[&[1.0, 0.1], &[0.0, 1.0]]);
        assert!(matches!(
            is_positive_definite(&asym, 1e-10),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn tridiagonal_lambda_min_examples() {
        let t = SymTridiag::unit(&[0.0f64, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(tridiag_lambda_min(&t, 1e-12), 1.0, epsilon = 1e-11);
        let t = SymTridiag::unit(&[0.5f64]).unwrap();
        assert_abs_diff_eq!(tridiag_lambda_min(&t, 1e-12), 0.5, epsilon = 1e-11);
        // closed form 1 - beta * sqrt(2), checked against the dense Jacobi solver too
        let t = SymTridiag::unit(&[0.5f64, 0.5]).unwrap();
        let expected = 1.0 - 0.5 * 2f64.sqrt();
        assert_abs_diff_eq!(tridiag_lambda_min(&t, 1e-12), expected, epsilon = 1e-11);
        let dense = smallest_eigenvalue_dense(&t.to_dense(), 1e-12).unwrap();
        assert_abs_diff_eq!(dense, expected, epsilon = 1e-12);
    }

    #[test]
    fn dense_smallest_eigenvalue_examples() {
        assert_abs_diff_eq!(
            smallest_eigenvalue_dense(&Mat::<f64>::identity(3), 1e-12).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let a = m(&[&[1.0, -0.5], &[-0.5, 1.0]]);
        assert_abs_diff_eq!(
            smallest_eigenvalue_dense(&a, 1e-12).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        assert!(smallest_eigenvalue_dense(&m(&[&[1.0, 2.0], &[0.0, 1.0]]), 1e-12).is_err());
    }

    #[test]
    fn char_poly_matches_dense_determinant() {
        let t = SymTridiag::unit(&[0.3f64, -0.7, 0.2]).unwrap();
        let d = determinant(&t.to_dense()).unwrap();
        assert_abs_diff_eq!(t.determinant(), d, epsilon = 1e-14);
    }

    #[test]
    fn solve_and_least_squares() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.4, epsilon = 1e-14);
        let inv = inverse(&a).unwrap();
        let id = a.mul(&inv).unwrap();
        assert_abs_diff_eq!(id[(0, 1)], 0.0, epsilon = 1e-14);
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![2.0, 1.0, 0.0],
        ];
        let z = least_squares(&cols, &[3.0, 1.0, 5.0]);
        assert_abs_diff_eq!(z[0] + z[1] + 2.0 * z[2], 3.0, epsilon = 1e-12);
        assert_eq!(z[2], 0.0);
    }

    fn sym_strategy(n: usize) -> impl Strategy<Value = Mat<f64>> {
        proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
            let mut a = Mat::from_row_major(n, n, v).unwrap();
            for i in 0..n {
                for j in 0..i {
                    a[(i, j)] = a[(j, i)];
                }
            }
            a
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn pd_verdict_agrees_with_spectrum(a in (1usize..6).prop_flat_map(sym_strategy)) {
            let lmin = smallest_eigenvalue_dense(&a, 1e-12).unwrap();
            // Skip the sliver where the two tests legitimately use different scales.
            prop_assume!((lmin - 1e-10).abs() > 1e-8);
            prop_assert_eq!(is_positive_definite(&a, 1e-10).unwrap(), lmin > 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn gram_is_psd(cols in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 4), 1..5)) {
            let g = gram_of(&cols);
            prop_assert!(smallest_eigenvalue_dense(&g, 1e-12).unwrap() >= -1e-9);
            prop_assert_eq!(g.max_asymmetry(), 0.0);
        }

        #[test]
        fn tridiag_bisection_matches_jacobi(beta in proptest::collection::vec(-1.0f64..1.0, 1..6)) {
            let t = SymTridiag::unit(&beta).unwrap();
            let tol = 1e-12;
            let r = tridiag_lambda_min(&t, tol);
            let dense = smallest_eigenvalue_dense(&t.to_dense(), tol).unwrap();
            prop_assert!((r - dense).abs() < 1e-10);
            prop_assert_eq!(t.sturm_count(r - 2.0 * tol), 0);
            prop_assert!(t.sturm_count(r + 2.0 * tol) >= 1);
            let all = t.eigenvalues(tol);
            let jac = symmetric_eigenvalues(&t.to_dense()).unwrap();
            for (x, y) in all.iter().zip(&jac) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

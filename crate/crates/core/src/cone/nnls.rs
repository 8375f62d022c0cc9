//! Lawson-Hanson nonnegative least squares, used for generator-wise cone
//! membership tests (redundancy and lineality detection).

use crate::linalg::{dot, least_squares, norm};
use crate::scalar::Scalar;

/// Solution of `min |A x - b|` subject to `x >= 0`, with `A` given by columns.
#[derive(Debug, Clone)]
pub struct Nnls<T> {
    pub x: Vec<T>,
    pub residual: T,
}

pub fn nnls<T: Scalar>(columns: &[Vec<T>], b: &[T]) -> Nnls<T> {
    let k = columns.len();
    let mut x = vec![T::zero(); k];
    let mut passive = vec![false; k];
    let scale = columns.iter().map(|c| norm(c)).fold(T::zero(), T::max) * norm(b);
    let wtol = T::lit(1e-13).max(T::epsilon() * T::lit(100.0)) * scale.max(T::min_positive_value());

    let residual_of = |x: &[T]| -> Vec<T> {
        let mut r = b.to_vec();
        for (c, &xi) in columns.iter().zip(x) {
            if xi != T::zero() {
                for (ri, &ci) in r.iter_mut().zip(c) {
                    *ri = *ri - xi * ci;
                }
            }
        }
        r
    };

    for _outer in 0..(3 * k + 3) {
        let r = residual_of(&x);
        let w: Vec<T> = columns.iter().map(|c| dot(c, &r)).collect();
        let Some(j) = (0..k)
            .filter(|&j| !passive[j] && w[j] > wtol)
            .max_by(|&a, &b| w[a].partial_cmp(&w[b]).expect("finite gradient"))
        else {
            break;
        };
        passive[j] = true;

        for _inner in 0..(3 * k + 3) {
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let sub: Vec<Vec<T>> = idx.iter().map(|&i| columns[i].clone()).collect();
            let zs = least_squares(&sub, b);
            let mut z = vec![T::zero(); k];
            for (&i, &zi) in idx.iter().zip(&zs) {
                z[i] = zi;
            }
            if idx.iter().all(|&i| z[i] > T::zero()) {
                x = z;
                break;
            }
            let mut alpha = T::one();
            for &i in &idx {
                if z[i] <= T::zero() {
                    let denom = x[i] - z[i];
                    if denom > T::zero() {
                        alpha = alpha.min(x[i] / denom);
                    }
                }
            }
            for &i in &idx {
                x[i] = x[i] + alpha * (z[i] - x[i]);
                if x[i] <= T::epsilon() * T::lit(10.0) {
                    x[i] = T::zero();
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    let residual = norm(&residual_of(&x));
    Nnls { x, residual }
}

/// Whether `b` lies in the cone spanned by `columns`, up to a residual of
/// `rel_tol * |b|`.
pub fn in_cone<T: Scalar>(columns: &[Vec<T>], b: &[T], rel_tol: T) -> bool {
    let nb = norm(b);
    if !(nb > T::tiny_norm()) {
        return true;
    }
    if columns.is_empty() {
        return false;
    }
    nnls(columns, b).residual <= rel_tol * nb
}

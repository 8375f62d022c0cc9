//! Decomposition with respect to a line, taken through the dual cone.
//!
//! With `δ_i` the sign of `w_i · w_n` (`δ_n = 0`), the cone is the signed sum
//! over `δ_i != 0` of the cones generated by
//! `u_{i,k} = ε_{i,k} (w_k - (w_k·w_n)/(w_i·w_n) w_i)` (and `u_{i,k} = w_k`
//! when `δ_k = 0` or `k = i`), modulo cones of lower dimension.

use super::{unit, Decomposition, Method, SignedCone, Term};
use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{dot, scaled, sub_scaled};
use crate::scalar::Scalar;

/// Signs `δ_i`, `s_i` and `ε_{i,k}` of the line decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    pub delta: Vec<i8>,
    /// `s_i`; set to `1` where `δ_i = 0`, where it is never used.
    pub s: Vec<i8>,
    pub eps: Vec<Vec<i8>>,
}

impl SignTable {
    pub fn from_delta(delta: Vec<i8>) -> Self {
        let n = delta.len();
        let parity = |count: usize| if count.is_multiple_of(2) { 1 } else { -1 };
        let s = (0..n)
            .map(|i| match delta[i] {
                1 => parity((0..i).filter(|&j| delta[j] == 1).count()),
                -1 => parity(((i + 1)..n).filter(|&j| delta[j] == -1).count()),
                _ => 1,
            })
            .collect();
        let eps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let flip = (delta[i] == 1 && delta[k] == 1 && k < i)
                            || (delta[i] == -1 && delta[k] == -1 && k > i);
                        if flip {
                            -1
                        } else {
                            1
                        }
                    })
                    .collect()
            })
            .collect();
        Self { delta, s, eps }
    }

    pub fn all_zero(&self) -> bool {
        self.delta.iter().all(|&d| d == 0)
    }
}

fn deltas<T: Scalar>(w: &[Vec<T>]) -> Vec<i8> {
    let n = w.len();
    (0..n)
        .map(|i| {
            if i + 1 == n {
                return 0;
            }
            let c = dot(&w[i], &w[n - 1]);
            if c.abs() <= T::zero_tol() {
                0
            } else if c > T::zero() {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Sign table of `K` in its generator order.
pub fn sign_table<T: Scalar>(k: &SimplicialCone<T>) -> SignTable {
    SignTable::from_delta(deltas(k.generators()))
}

/// `(i, s_i, [u_{i,1}, ..., u_{i,n}])` for every `δ_i != 0`.
fn line_terms<T: Scalar>(w: &[Vec<T>]) -> Vec<(usize, i8, Vec<Vec<T>>)> {
    let n = w.len();
    let table = SignTable::from_delta(deltas(w));
    let wn = &w[n - 1];
    (0..n)
        .filter(|&i| table.delta[i] != 0)
        .map(|i| {
            let wi_wn = dot(&w[i], wn);
            let u = (0..n)
                .map(|k| {
                    if table.delta[k] == 0 || k == i {
                        w[k].clone()
                    } else {
                        let r = sub_scaled(&w[k], dot(&w[k], wn) / wi_wn, &w[i]);
                        if table.eps[i][k] < 0 {
                            scaled(&r, -T::one())
                        } else {
                            r
                        }
                    }
                })
                .collect();
            (i, table.s[i], u)
        })
        .collect()
}

/// Brion-Vergne decomposition modulo lower-dimensional cones: one signed
/// cone per `δ_i != 0`, generators `u_{i,k}` in index order, unit-normalized.
pub fn bv_mod_lower_dim<T: Scalar>(k: &SimplicialCone<T>) -> Result<Vec<SignedCone<T>>> {
    let terms = line_terms(k.generators());
    if terms.is_empty() {
        return Err(Error::AllOrthogonal);
    }
    terms
        .into_iter()
        .map(|(_, s, u)| SignedCone::from_basis(s, u.iter().map(|v| unit(v)).collect()))
        .collect()
}

/// Case 2 of the line route for `w` with the pivot at position `n-2`: each
/// term is rewritten as `c(u_{i,k}/|u_{i,k}|..., w_i, w_n)`.
pub(crate) fn case2_terms<T: Scalar>(w: &[Vec<T>]) -> Vec<Term<T>> {
    let n = w.len();
    line_terms(w)
        .into_iter()
        .map(|(i, sign, u)| {
            let mut sub: Vec<Vec<T>> = (0..n - 1)
                .filter(|&k| k != i)
                .map(|k| unit(&u[k]))
                .collect();
            sub.push(w[i].clone());
            Term { sign, sub }
        })
        .collect()
}

/// Second decomposition: pieces are simplicial with positive definite
/// associated matrix (tridiagonal Gram matrix when `tridiagonal` is set) or
/// lower dimensional.
pub fn decomp2<T: Scalar>(k: &SimplicialCone<T>, tridiagonal: bool) -> Result<Decomposition<T>> {
    let method = if tridiagonal {
        Method::Decomp2Tridiag
    } else {
        Method::Decomp2
    };
    let pieces = super::decompose_simplicial(k, method)?;
    Ok(Decomposition::of_simplicial(k, method, pieces))
}

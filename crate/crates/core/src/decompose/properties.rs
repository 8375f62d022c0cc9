//! Structural checks on decomposition pieces.

use std::collections::VecDeque;

use crate::cone::SimplicialCone;
use crate::linalg::{dot, least_squares, norm, sub_scaled, Mat};
use crate::scalar::Scalar;

/// Signs `ε` with `ε_i ε_j g_ij <= 0` for every pair, so that the associated
/// matrix equals `diag(ε) G diag(ε)`. Entries with `|g_ij| <= tol` impose no
/// constraint. `None` when the sign graph has an odd frustrated cycle.
pub fn balanced_signs<T: Scalar>(g: &Mat<T>, tol: T) -> Option<Vec<i8>> {
    let n = g.rows();
    let mut eps = vec![0i8; n];
    for root in 0..n {
        if eps[root] != 0 {
            continue;
        }
        eps[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                let gij = g[(i, j)];
                if j == i || gij.abs() <= tol {
                    continue;
                }
                let want = if gij > T::zero() { -eps[i] } else { eps[i] };
                if eps[j] == 0 {
                    eps[j] = want;
                    queue.push_back(j);
                } else if eps[j] != want {
                    return None;
                }
            }
        }
    }
    Some(eps)
}

/// Outcome of the per-piece property checks. `iid_prime` is only meaningful
/// for the tridiagonal variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PieceCheck {
    /// Unit generators.
    pub iia: bool,
    /// Last generator equals the parent's.
    pub iib: bool,
    /// Leading generators span the same subspace as the parent's.
    pub iic: bool,
    /// `v_i · v_n = 0` for `i <= n-2`.
    pub iid: bool,
    /// `x^T M x = |Σ ε_i x_i v_i|^2` for a sign vector `ε`.
    pub iie: bool,
    /// Gram matrix tridiagonal.
    pub iid_prime: bool,
    pub pd: bool,
}

impl PieceCheck {
    pub fn passed(&self, tridiagonal: bool) -> bool {
        let base = self.iia && self.iib && self.iic && self.iie && self.pd;
        if tridiagonal {
            base && self.iid_prime
        } else {
            base && self.iid
        }
    }
}

const CHECK_TOL: f64 = 1e-8;

fn in_span<T: Scalar>(basis: &[Vec<T>], v: &[T], tol: T) -> bool {
    let c = least_squares(basis, v);
    let mut r = v.to_vec();
    for (b, &ci) in basis.iter().zip(&c) {
        r = sub_scaled(&r, ci, b);
    }
    norm(&r) <= tol * norm(v).max(T::one())
}

/// Checks one piece against its parent. IIb and IIc are compared against the
/// parent generator that served as the line and the remaining ones.
pub fn check_piece<T: Scalar>(parent: &SimplicialCone<T>, piece: &SimplicialCone<T>) -> PieceCheck {
    let tol = T::lit(CHECK_TOL);
    let n = piece.dim();
    let v = piece.generators();
    let w = parent.generators();
    let g = piece.gram();
    let iia = v.iter().all(|x| (norm(x) - T::one()).abs() <= tol);
    // any parent generator may have served as the line
    let line = (n == parent.dim())
        .then(|| {
            w.iter()
                .position(|x| x.iter().zip(&v[n - 1]).all(|(a, b)| (*a - *b).abs() <= tol))
        })
        .flatten();
    let iib = line.is_some();
    let iic = line.is_some_and(|p| {
        let rest: Vec<Vec<T>> = (0..n).filter(|&i| i != p).map(|i| w[i].clone()).collect();
        v[..n - 1].iter().all(|x| in_span(&rest, x, tol))
            && rest.iter().all(|x| in_span(&v[..n - 1], x, tol))
    });
    let iid = (0..n.saturating_sub(2)).all(|i| dot(&v[i], &v[n - 1]).abs() <= tol);
    let iid_prime = (0..n).all(|i| (i + 2..n).all(|j| g[(i, j)].abs() <= T::lit(1e-9)));
    let iie = match balanced_signs(g, T::zero_tol()) {
        None => false,
        Some(eps) => {
            let m = piece.associated_matrix();
            (0..n).all(|i| {
                (0..n).all(|j| {
                    (m[(i, j)] - T::from_i8(eps[i] * eps[j]).unwrap() * g[(i, j)]).abs() <= tol
                })
            })
        }
    };
    PieceCheck {
        iia,
        iib,
        iic,
        iid,
        iie,
        iid_prime,
        pd: piece.is_pd(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::make_simplicial;
    use crate::linalg::gram_of;

    #[test]
    fn balanced_signs_on_path_and_triangle() {
        let g = Mat::from_rows(&[
            vec![1.0, 0.5, 0.0],
            vec![0.5, 1.0, -0.3],
            vec![0.0, -0.3, 1.0],
        ])
        .unwrap();
        assert_eq!(balanced_signs(&g, 1e-10), Some(vec![1, -1, -1]));
        let g = Mat::from_rows(&[
            vec![1.0, 0.2, 0.2],
            vec![0.2, 1.0, 0.2],
            vec![0.2, 0.2, 1.0],
        ])
        .unwrap();
        assert_eq!(balanced_signs(&g, 1e-10), None);
        let g = gram_of(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(balanced_signs(&g, 1e-10), Some(vec![1, 1]));
    }

    #[test]
    fn a_piece_is_checked_against_itself() {
        let k = make_simplicial(&[
            vec![1.0, 0.0, 0.0],
            vec![0.6, 0.8, 0.0],
            vec![0.0, 0.6, 0.8],
        ])
        .unwrap();
        let c = check_piece(&k, &k);
        assert!(c.passed(true));
        assert!(c.passed(false));
    }
}

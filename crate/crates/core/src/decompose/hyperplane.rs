//! Decomposition with respect to a hyperplane.
//!
//! For a hyperplane `L` with normal functional `h` and a basis `w_1..w_n`,
//! let `P` and `N` be the indices with `h(w_i) > 0` and `h(w_i) < 0`, and let
//! `ρ_i` project parallel to `w_i` onto `L`. The cones
//! `E_i = R_+(±w_i) + ρ_i(C)` (sign `+` on `P`, `-` on `N`) are exactly
//! `{λ_j >= 0 for j != i} ∩ {h >= 0}` in the coordinates `λ` of the basis,
//! and inclusion-exclusion over the free coordinates gives the exact identity
//!
//! ```text
//! [C] = Σ_P [E_i] - Σ_N [E_i] + Σ_N [A_k]
//!     + Σ_{T ⊆ P, |T| >= 2} (-1)^{|T|+1} [G_T ∩ {h >= 0}]
//!     + Σ_{T ⊆ N, |T| >= 2} (-1)^{|T|+1} [G_T ∩ {h <= 0}]
//! ```
//!
//! up to measure zero, where `A_k = c(w_j : j != k) + span(w_k)` and
//! `G_T = {λ_j >= 0 for j ∉ T}`. Every correction term contains a line.

use super::{unit, ConeForm, Decomposition, Method, SignedCone, Term};
use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, orthonormal_basis, scaled, solve, sub_scaled};
use crate::scalar::Scalar;

/// Hyperplane given by a spanning set and a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneSpec<T> {
    pub basis: Vec<Vec<T>>,
    pub normal: Vec<T>,
}

impl<T: Scalar> HyperplaneSpec<T> {
    /// Hyperplane spanned by `n - 1` independent vectors of `R^n`.
    pub fn from_basis(basis: Vec<Vec<T>>) -> Result<Self> {
        let n = basis.len() + 1;
        if let Some(b) = basis.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let q = orthonormal_basis(&basis, T::rank_tol());
        if q.len() + 1 != n {
            return Err(Error::RankDeficient { abs_det: 0.0 });
        }
        let normal = (0..n)
            .map(|j| {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                for qi in &q {
                    let c = dot(&e, qi);
                    e = sub_scaled(&e, c, qi);
                }
                e
            })
            .max_by(|a, b| norm(a).partial_cmp(&norm(b)).expect("finite"))
            .expect("n >= 1");
        let normal = scaled(&normal, T::one() / norm(&normal));
        let spec = Self { basis, normal };
        spec.check()?;
        Ok(spec)
    }

    /// The hyperplane `⟨ℓ_1, ..., ℓ_{n-2}, w_n⟩` with
    /// `ℓ_i = w_i - (w_i·w_n)/(w_{n-1}·w_n) w_{n-1}`, oriented so that
    /// `w_{n-1}` lies on the positive side.
    pub fn through_last(k: &SimplicialCone<T>) -> Result<Self> {
        let n = k.dim();
        if n < 2 {
            return Err(Error::InvalidArgument(
                "hyperplane needs dimension at least 2".into(),
            ));
        }
        let w = k.generators();
        let pivot = dot(&w[n - 2], &w[n - 1]);
        if pivot.abs() <= T::zero_tol() {
            return Err(Error::ZeroDenominator);
        }
        let mut basis: Vec<Vec<T>> = (0..n - 2)
            .map(|i| sub_scaled(&w[i], dot(&w[i], &w[n - 1]) / pivot, &w[n - 2]))
            .collect();
        basis.push(w[n - 1].clone());
        // h(w_k) = (w_k·w_n)/(w_{n-1}·w_n) vanishes on every ℓ_i and on w_n
        let h: Vec<T> = (0..n)
            .map(|k| {
                if k + 1 == n {
                    T::zero()
                } else {
                    dot(&w[k], &w[n - 1]) / pivot
                }
            })
            .collect();
        let normal = solve(&k.matrix().transpose(), &h)?;
        let normal = scaled(&normal, T::one() / norm(&normal));
        let spec = Self { basis, normal };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(1e4));
        for b in &self.basis {
            let c = dot(b, &self.normal) / norm(b);
            if c.abs() > tol {
                return Err(Error::NotOrthogonal {
                    overlap: c.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

/// Output of [`bv_hyperplane`]: the simplicial terms `±[E_i]` and the
/// line-containing correction terms that make the identity exact.
#[derive(Debug, Clone, PartialEq)]
pub struct BvHyperplane<T> {
    pub terms: Vec<SignedCone<T>>,
    pub corrections: Vec<SignedCone<T>>,
}

impl<T: Scalar> BvHyperplane<T> {
    pub fn all(&self) -> impl Iterator<Item = &SignedCone<T>> {
        self.terms.iter().chain(&self.corrections)
    }
}

/// Main term `±[E_i]` before normalization; `gens[i]` is `±w_i`.
struct MainTerm<T> {
    index: usize,
    sign: i8,
    gens: Vec<Vec<T>>,
}

fn snap<T: Scalar>(h: &[T]) -> Vec<T> {
    h.iter()
        .map(|&x| {
            if x.abs() <= T::zero_tol() {
                T::zero()
            } else {
                x
            }
        })
        .collect()
}

/// `ρ_i(w_k) = w_k - h_k/h_i w_i`.
fn rho<T: Scalar>(w: &[Vec<T>], h: &[T], i: usize, k: usize) -> Vec<T> {
    if h[k] == T::zero() {
        w[k].clone()
    } else {
        sub_scaled(&w[k], h[k] / h[i], &w[i])
    }
}

/// Main terms and line-containing corrections.
type Split<M, T> = (Vec<M>, Vec<SignedCone<T>>);

fn split<T: Scalar>(w: &[Vec<T>], h: &[T]) -> Result<Split<MainTerm<T>, T>> {
    let n = w.len();
    let pos: Vec<usize> = (0..n).filter(|&i| h[i] > T::zero()).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| h[i] < T::zero()).collect();
    if pos.is_empty() && neg.is_empty() {
        return Err(Error::DegenerateHyperplane);
    }

    let main = (0..n)
        .filter(|&i| h[i] != T::zero())
        .map(|i| {
            let sign: i8 = if h[i] > T::zero() { 1 } else { -1 };
            let gens = (0..n)
                .map(|k| {
                    if k == i {
                        scaled(&w[i], T::lit(f64::from(sign)))
                    } else {
                        rho(w, h, i, k)
                    }
                })
                .collect();
            MainTerm {
                index: i,
                sign,
                gens,
            }
        })
        .collect();

    let mut corrections = Vec::new();
    for &k in &neg {
        let mut gens: Vec<Vec<T>> = (0..n).filter(|&j| j != k).map(|j| w[j].clone()).collect();
        gens.push(w[k].clone());
        gens.push(scaled(&w[k], -T::one()));
        corrections.push(SignedCone::general(1, ConeForm::ContainsLine, n, gens)?);
    }
    for side in [&pos, &neg] {
        let m = side.len();
        for mask in 1u64..(1u64 << m) {
            if mask.count_ones() < 2 {
                continue;
            }
            let t: Vec<usize> = (0..m)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| side[b])
                .collect();
            let t0 = t[0];
            let mut gens: Vec<Vec<T>> = (0..n)
                .filter(|j| !t.contains(j))
                .map(|j| rho(w, h, t0, j))
                .collect();
            gens.push(w[t0].clone());
            for &tt in &t[1..] {
                let r = rho(w, h, t0, tt);
                gens.push(scaled(&r, -T::one()));
                gens.push(r);
            }
            let sign = if t.len().is_multiple_of(2) { -1 } else { 1 };
            corrections.push(SignedCone::general(sign, ConeForm::ContainsLine, n, gens)?);
        }
    }
    Ok((main, corrections))
}

/// Brion-Vergne decomposition of `K` with respect to the hyperplane `L`.
///
/// Generators with `|w_i · normal| <= ε_0` are treated as lying in `L` and
/// contribute no main term.
pub fn bv_hyperplane<T: Scalar>(
    k: &SimplicialCone<T>,
    l: &HyperplaneSpec<T>,
) -> Result<BvHyperplane<T>> {
    let n = k.dim();
    if l.normal.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: l.normal.len(),
        });
    }
    let nn = norm(&l.normal);
    if !(nn > T::tiny_norm()) {
        return Err(Error::DegenerateHyperplane);
    }
    let h: Vec<T> = k
        .generators()
        .iter()
        .map(|w| dot(w, &l.normal) / nn)
        .collect();
    let (main, corrections) = split(k.generators(), &snap(&h))?;
    let terms = main
        .into_iter()
        .map(|m| SignedCone::from_basis(m.sign, m.gens))
        .collect::<Result<Vec<_>>>()?;
    Ok(BvHyperplane { terms, corrections })
}

/// Case 2 of the hyperplane route for `w` with the pivot at position `n-2`:
/// each main term is rewritten as `c(ρ_i(w_k)/|ρ_i(w_k)|..., ±w_i, w_n)`.
pub(crate) fn case2_terms<T: Scalar>(w: &[Vec<T>]) -> Result<Split<Term<T>, T>> {
    let n = w.len();
    let pivot = dot(&w[n - 2], &w[n - 1]);
    let h: Vec<T> = (0..n)
        .map(|k| {
            if k + 1 == n {
                T::zero()
            } else {
                dot(&w[k], &w[n - 1]) / pivot
            }
        })
        .collect();
    let h: Vec<T> = h
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if k + 1 < n && dot(&w[k], &w[n - 1]).abs() <= T::zero_tol() {
                T::zero()
            } else {
                x
            }
        })
        .collect();
    let (main, corrections) = split(w, &h)?;
    let terms = main
        .into_iter()
        .map(|m| {
            let mut sub: Vec<Vec<T>> = (0..n - 1)
                .filter(|&k| k != m.index)
                .map(|k| unit(&m.gens[k]))
                .collect();
            sub.push(m.gens[m.index].clone());
            Term { sign: m.sign, sub }
        })
        .collect();
    Ok((terms, corrections))
}

/// First decomposition: pieces are either simplicial with positive definite
/// associated matrix or contain lines.
pub fn decomp1<T: Scalar>(k: &SimplicialCone<T>) -> Result<Decomposition<T>> {
    let pieces = super::decompose_simplicial(k, Method::Decomp1)?;
    Ok(Decomposition::of_simplicial(k, Method::Decomp1, pieces))
}

//! General series `T_α` in the pair couplings.
//!
//! Raising `a_ij` by one multiplies the coefficient by
//! `-2/(a_ij + 1) · Γ((2+s_i)/2)/Γ((1+s_i)/2) · Γ((2+s_j)/2)/Γ((1+s_j)/2)`,
//! where `s_i` is the current degree at vertex `i`, so a depth-first walk over
//! the multi-indices carries the log magnitude along incrementally.

use super::{
    check_finite, decay_ratio, ln_prefactor, orthant_value, ErrorModel, SeriesValue,
    TruncationSpec, COUPLING_EPS,
};
use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::gamma::HalfGammaTable;
use crate::linalg::{smallest_eigenvalue_dense, Mat};
use crate::scalar::Scalar;

const START_DEGREE: usize = 16;
const GROWTH: f64 = 1.5;

struct Coupling<T> {
    i: usize,
    j: usize,
    ln_two_alpha: T,
    negates: bool,
}

enum Limit<'a> {
    /// Total degree at most this.
    Total(usize),
    /// Per-coupling caps.
    Box(&'a [usize]),
}

struct Walk<'a, T> {
    couplings: &'a [Coupling<T>],
    half: &'a HalfGammaTable<T>,
    limit: Limit<'a>,
    degree: Vec<usize>,
    /// Signed and absolute sums indexed by total degree.
    shells: Vec<T>,
    abs_shells: Vec<T>,
    /// Absolute sum over multi-indices with some coupling at its cap.
    edge: T,
    count: u64,
}

impl<T: Scalar> Walk<'_, T> {
    fn step(&self, k: usize, a: usize) -> T {
        let c = &self.couplings[k];
        let (si, sj) = (self.degree[c.i], self.degree[c.j]);
        c.ln_two_alpha - T::lit(((a + 1) as f64).ln()) + self.half.ln_half(2 + si)
            - self.half.ln_half(1 + si)
            + self.half.ln_half(2 + sj)
            - self.half.ln_half(1 + sj)
    }

    fn visit(&mut self, k: usize, total: usize, ln: T, sign: T, at_cap: bool) {
        if k == self.couplings.len() {
            let x = ln.exp();
            self.shells[total] = self.shells[total] + sign * x;
            self.abs_shells[total] = self.abs_shells[total] + x;
            if at_cap {
                self.edge = self.edge + x;
            }
            self.count += 1;
            return;
        }
        let max = match self.limit {
            Limit::Total(d) => d - total,
            Limit::Box(caps) => caps[k],
        };
        let is_box = matches!(self.limit, Limit::Box(_));
        let cap_hit = move |a: usize| is_box && a == max;
        self.visit(k + 1, total, ln, sign, at_cap || cap_hit(0));
        let (i, j, negates) = (
            self.couplings[k].i,
            self.couplings[k].j,
            self.couplings[k].negates,
        );
        let (mut ln, mut sign) = (ln, sign);
        for a in 0..max {
            ln = ln + self.step(k, a);
            if negates {
                sign = -sign;
            }
            self.degree[i] += 1;
            self.degree[j] += 1;
            self.visit(k + 1, total + a + 1, ln, sign, at_cap || cap_hit(a + 1));
        }
        self.degree[i] -= max;
        self.degree[j] -= max;
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1u64, |acc, i| acc.saturating_mul(n - k + i) / i)
}

/// Evaluates `T_α` for a simplicial cone.
pub fn t_alpha<T: Scalar>(k: &SimplicialCone<T>, spec: &TruncationSpec) -> Result<SeriesValue<T>> {
    t_alpha_gram(k.gram(), k.abs_det(), spec)
}

/// Evaluates `T_α` from a unit-diagonal Gram matrix and `|det V|`. With fixed
/// caps, `spec.caps` lists one cap per pair `(i, j)`, `i < j`, in
/// lexicographic order.
pub fn t_alpha_gram<T: Scalar>(
    gram: &Mat<T>,
    abs_det: T,
    spec: &TruncationSpec,
) -> Result<SeriesValue<T>> {
    spec.validate()?;
    let n = gram.rows();
    if !gram.is_square() {
        return Err(Error::NotSquare {
            rows: n,
            cols: gram.cols(),
        });
    }
    let mut assoc = Mat::identity(n);
    let mut couplings = Vec::new();
    let mut pair_caps = Vec::new();
    let mut pair = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let alpha = gram[(i, j)];
            check_finite(&[alpha])?;
            assoc[(i, j)] = -alpha.abs();
            assoc[(j, i)] = -alpha.abs();
            if alpha.abs() > T::lit(COUPLING_EPS) {
                couplings.push(Coupling {
                    i,
                    j,
                    ln_two_alpha: (T::lit(2.0) * alpha.abs()).ln(),
                    negates: alpha > T::zero(),
                });
                if let Some(caps) = &spec.caps {
                    pair_caps.push(*caps.get(pair).ok_or(Error::DimensionMismatch {
                        expected: n * (n - 1) / 2,
                        found: caps.len(),
                    })?);
                }
            }
            pair += 1;
        }
    }
    if let Some(caps) = &spec.caps {
        if caps.len() != pair {
            return Err(Error::DimensionMismatch {
                expected: pair,
                found: caps.len(),
            });
        }
    }
    let lam = smallest_eigenvalue_dense(&assoc, T::lit(1e-12))?;
    if !(lam > T::zero_tol()) {
        return Err(Error::NotPositiveDefinite);
    }
    if couplings.is_empty() {
        return Ok(orthant_value(abs_det, n, lam));
    }
    let rho = decay_ratio(lam);
    let ln_pre = ln_prefactor(abs_det, n);
    let ln_a0 = T::lit(n as f64) * T::lit(0.5 * std::f64::consts::PI.ln());
    let p = couplings.len() as u64;

    let mut degree = START_DEGREE;
    loop {
        let (limit, max_total) = match &spec.caps {
            Some(_) => (Limit::Box(&pair_caps), pair_caps.iter().sum::<usize>()),
            None => (Limit::Total(degree), degree),
        };
        let predicted = match limit {
            Limit::Total(d) => binomial(d as u64 + p, p),
            Limit::Box(c) => c
                .iter()
                .fold(1u64, |acc, &x| acc.saturating_mul(x as u64 + 1)),
        };
        if predicted > spec.max_terms {
            return Err(Error::BudgetExceeded {
                terms: predicted,
                tail: f64::INFINITY,
            });
        }
        let half = HalfGammaTable::new(2 * max_total + 2);
        let mut walk = Walk {
            couplings: &couplings,
            half: &half,
            limit,
            degree: vec![0; n],
            shells: vec![T::zero(); max_total + 1],
            abs_shells: vec![T::zero(); max_total + 1],
            edge: T::zero(),
            count: 0,
        };
        walk.visit(0, 0, ln_a0 + ln_pre, T::one(), false);
        let value: T = walk.shells.iter().copied().sum();
        if !value.is_finite() {
            return Err(Error::NonFiniteTerm);
        }
        let outer = if spec.caps.is_some() {
            walk.edge
        } else {
            walk.abs_shells[max_total]
        };
        let tail = outer * rho / (T::one() - rho);
        if spec.caps.is_some() || tail.to_f64_lossy() <= spec.target_tol {
            let caps = spec.caps.clone().unwrap_or_else(|| vec![degree]);
            return Ok(SeriesValue {
                value,
                error: ErrorModel {
                    lambda_min: lam,
                    rho,
                    tail_estimate: tail,
                    terms_used: walk.count,
                },
                caps,
            });
        }
        let next = ((degree as f64) * GROWTH).ceil() as usize;
        if binomial(next as u64 + p, p) > spec.max_terms {
            return Err(Error::BudgetExceeded {
                terms: walk.count,
                tail: tail.to_f64_lossy(),
            });
        }
        degree = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::make_simplicial;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn orthant_is_one_term() {
        for n in 1..=8 {
            let r = t_alpha(
                &SimplicialCone::<f64>::orthant(n),
                &TruncationSpec::default(),
            )
            .unwrap();
            assert_eq!(r.value, 0.5f64.powi(n as i32));
            assert_eq!(r.error.terms_used, 1);
        }
    }

    #[test]
    fn planar_angles_with_fixed_caps() {
        for theta in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
            let k = make_simplicial(&[vec![1.0, 0.0], vec![theta.cos(), theta.sin()]]).unwrap();
            let r = t_alpha(&k, &TruncationSpec::fixed(vec![60])).unwrap();
            assert_abs_diff_eq!(r.value, theta / (2.0 * PI), epsilon = 1e-8);
        }
    }

    #[test]
    fn adaptive_reaches_tolerance() {
        let k = make_simplicial::<f64>(&[
            vec![1.0, 0.0, 0.0],
            vec![0.3, 1.0, 0.0],
            vec![-0.2, 0.4, 1.0],
        ])
        .unwrap();
        let r = t_alpha(&k, &TruncationSpec::with_tol(1e-10)).unwrap();
        assert!(r.error.tail_estimate <= 1e-10);
        let h = crate::linalg::dot;
        let w = k.generators();
        let triple = w[0][0] * (w[1][1] * w[2][2] - w[1][2] * w[2][1])
            - w[0][1] * (w[1][0] * w[2][2] - w[1][2] * w[2][0])
            + w[0][2] * (w[1][0] * w[2][1] - w[1][1] * w[2][0]);
        let e = 2.0
            * triple
                .abs()
                .atan2(1.0 + h(&w[1], &w[2]) + h(&w[0], &w[1]) + h(&w[0], &w[2]));
        assert_abs_diff_eq!(r.value, e / (4.0 * PI), epsilon = 1e-9);
    }

    #[test]
    fn rejects_non_pd() {
        let k = make_simplicial(&[
            vec![1.0, 0.0, 0.0],
            vec![0.8, 0.6, 0.0],
            vec![0.8, 0.0, 0.6],
        ])
        .unwrap();
        assert_eq!(
            t_alpha(&k, &TruncationSpec::default()),
            Err(Error::NotPositiveDefinite)
        );
    }
}

//! Convergence domain of the tridiagonal series and empirical tail decay.

use super::beta::{lambda_min, Chain};
use super::check_finite;
use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::linalg::SymTridiag;
use crate::scalar::Scalar;

/// `f_i(b) = A_{b+e_i} / A_b` for the tridiagonal coefficients, `i`
/// zero-based, with `b` allowed to be real.
pub fn coefficient_ratio<T: Scalar>(b: &[T], i: usize) -> T {
    let b: Vec<f64> = b.iter().map(|x| x.to_f64_lossy()).collect();
    let prev = if i == 0 { 0.0 } else { b[i - 1] };
    let next = b.get(i + 1).copied().unwrap_or(0.0);
    let step = |s: f64| ln_gamma((2.0 + s) / 2.0) - ln_gamma((1.0 + s) / 2.0);
    let r = -2.0 / (b[i] + 1.0) * (step(prev + b[i]) + step(b[i] + next)).exp();
    T::lit(r)
}

/// `Ψ_i(b) = lim f_i(t b) = -sqrt((b_{i-1} + b_i)(b_i + b_{i+1})) / b_i`.
pub fn psi<T: Scalar>(b: &[T], i: usize) -> Result<T> {
    if !(b[i] > T::zero()) {
        return Err(Error::ZeroDenominator);
    }
    let prev = if i == 0 { T::zero() } else { b[i - 1] };
    let next = b.get(i + 1).copied().unwrap_or(T::zero());
    Ok(-((prev + b[i]) * (b[i] + next)).sqrt() / b[i])
}

/// Determinant of the unit tridiagonal matrix with off-diagonal `-|x_i|`;
/// `x` lies on the boundary of the convergence domain where it vanishes.
pub fn on_convergence_boundary<T: Scalar>(x: &[T]) -> T {
    let off: Vec<T> = x.iter().map(|v| -v.abs()).collect();
    SymTridiag::unit(&off)
        .expect("unit diagonal has matching length")
        .determinant()
}

/// Truncation errors `E(N + ℓ)` for `ℓ = 0..=L` and their ratios to `E(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProbe<T> {
    pub lambda_min: T,
    /// Horizon used for the far summation.
    pub horizon: usize,
    /// `ln E(N + ℓ)`, without the `|det V| / (4π)^{n/2}` prefactor;
    /// `-inf` when the error vanishes.
    pub ln_errors: Vec<T>,
    /// `E(N + ℓ) / E(N)`; zero when `E(N)` vanishes.
    pub ratios: Vec<T>,
}

const HORIZON_PAD: usize = 80;
const MAX_HORIZON: usize = 6000;

/// Sums `|A_b β^b|` over `b_i >= N_i + ℓ` for some `i`, out to a horizon
/// extended until the furthest error stops changing.
pub fn truncation_decay_probe<T: Scalar>(
    beta: &[T],
    caps: &[usize],
    l: usize,
) -> Result<DecayProbe<T>> {
    check_finite(beta)?;
    if caps.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: beta.len(),
            found: caps.len(),
        });
    }
    let lam = lambda_min(beta)?;
    if !(lam > T::zero_tol()) {
        return Err(Error::NotPositiveDefinite);
    }
    let errors_at = |h: usize| -> Vec<T> {
        let chain = Chain::new(beta, h);
        let bound = vec![h; beta.len()];
        (0..=l)
            .map(|shift| {
                let n: Vec<usize> = caps.iter().map(|&c| c + shift).collect();
                chain.sum(&bound, false, Some(&n)).ln_abs()
            })
            .collect()
    };
    let mut horizon = caps.iter().copied().max().unwrap_or(0) + l + HORIZON_PAD;
    let mut ln_errors = errors_at(horizon);
    loop {
        let next = horizon + horizon / 2;
        if next > MAX_HORIZON {
            return Err(Error::BudgetExceeded {
                terms: Chain::<T>::work(&vec![next; beta.len()]),
                tail: f64::NAN,
            });
        }
        let wider = errors_at(next);
        let settled = ln_errors.iter().zip(&wider).all(|(a, b)| {
            (!a.is_finite() && !b.is_finite())
                || (*a - *b).abs() <= T::lit(1e-10).max(T::epsilon() * T::lit(64.0))
        });
        horizon = next;
        ln_errors = wider;
        if settled {
            break;
        }
    }
    let ratios = ln_errors
        .iter()
        .map(|&e| {
            if ln_errors[0].is_finite() && e.is_finite() {
                (e - ln_errors[0]).exp()
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(DecayProbe {
        lambda_min: lam,
        horizon,
        ln_errors,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn ratio_examples() {
        assert_abs_diff_eq!(coefficient_ratio(&[0.0], 0), -2.0 / PI, epsilon = 1e-13);
        assert!(
            coefficient_ratio(&[0.0f64, 1.0], 0).abs()
                >= coefficient_ratio(&[0.0f64, 0.0], 0).abs()
        );
        let b = [0.7f64, 1.3, 0.4];
        let t = 1e6;
        let scaled: Vec<f64> = b.iter().map(|x| x * t).collect();
        for i in 0..3 {
            assert_abs_diff_eq!(
                coefficient_ratio(&scaled, i),
                psi(&b, i).unwrap(),
                epsilon = 1e-4
            );
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&[3.0], 0).unwrap(), -1.0);
        assert_abs_diff_eq!(psi(&[1.0, 1.0], 0).unwrap(), -2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(psi(&[1.0, 1.0], 1).unwrap(), -2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(
            psi(&[7.0, 14.0, 3.5], 1).unwrap(),
            psi(&[1.0, 2.0, 0.5], 1).unwrap()
        );
        assert_eq!(psi(&[1.0, 0.0], 1), Err(Error::ZeroDenominator));
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(on_convergence_boundary(&[0.0, 0.0]), 1.0);
        assert_abs_diff_eq!(on_convergence_boundary(&[1.0]), 0.0, epsilon = 1e-15);
        let beta = [0.5, 0.5];
        let lam = lambda_min(&beta).unwrap();
        let x: Vec<f64> = beta.iter().map(|b| b / (1.0 - lam)).collect();
        assert!(on_convergence_boundary(&x).abs() < 1e-8);
    }

    #[test]
    fn zero_coupling_has_no_tail() {
        let p = truncation_decay_probe(&[0.0f64, 0.0], &[1, 1], 3).unwrap();
        assert!(p.ln_errors.iter().all(|e| !e.is_finite()));
        assert!(p.ratios.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn ratios_shrink() {
        let p = truncation_decay_probe(&[0.5, 0.5], &[20, 20], 10).unwrap();
        assert_eq!(p.ratios[0], 1.0);
        assert!(p.ratios.windows(2).all(|w| w[1] <= w[0]));
        assert!(p.ratios[10] < 1.0);
    }
}

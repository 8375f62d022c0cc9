//! Hypergeometric series for the measure of a simplicial cone with positive
//! definite associated matrix.
//!
//! [`t_alpha`] sums the general series in the `C(n,2)` pair couplings by total
//! degree shells. [`t_beta`] handles tridiagonal Gram matrices, where only the
//! `n - 1` consecutive couplings survive and the coefficients factor along a
//! chain; it is summed over a box of per-coordinate degree caps with a
//! transfer recursion, so the cost grows with the cap squared rather than with
//! the number of lattice points in the box.

mod alpha;
mod beta;
mod convergence;

pub use alpha::{t_alpha, t_alpha_gram};
pub use beta::{t_beta, tridiagonal_abs_det};
pub use convergence::{
    coefficient_ratio, on_convergence_boundary, psi, truncation_decay_probe, DecayProbe,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Truncation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSpec {
    /// Fixed per-coordinate caps. `None` grows the truncation until the tail
    /// estimate drops below `target_tol`.
    pub caps: Option<Vec<usize>>,
    pub target_tol: f64,
    pub max_terms: u64,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            caps: None,
            target_tol: 1e-8,
            max_terms: 50_000_000,
        }
    }
}

impl TruncationSpec {
    pub fn with_tol(target_tol: f64) -> Self {
        Self {
            target_tol,
            ..Self::default()
        }
    }

    pub fn fixed(caps: Vec<usize>) -> Self {
        Self {
            caps: Some(caps),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_terms < 1 || !(self.target_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "max_terms must be positive and target_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Heuristic error bookkeeping of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel<T> {
    pub lambda_min: T,
    /// Assumed geometric decay ratio of the tail.
    pub rho: T,
    /// `(absolute sum of the outermost layer) * rho / (1 - rho)`, in measure
    /// units.
    pub tail_estimate: T,
    /// Number of multi-indices covered by the truncation, saturating.
    pub terms_used: u64,
}

/// Partial sum of a series together with its error model.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub error: ErrorModel<T>,
    /// Final caps: per coordinate for `t_beta`, a single total degree for
    /// adaptive `t_alpha`.
    pub caps: Vec<usize>,
}

/// Couplings below this magnitude are structurally zero.
pub(crate) const COUPLING_EPS: f64 = 1e-14;

pub(crate) fn decay_ratio<T: Scalar>(lambda_min: T) -> T {
    (T::one() - lambda_min / T::lit(2.0)).min(T::lit(0.999))
}

/// `ln(|det V| / (4π)^{n/2})`.
pub(crate) fn ln_prefactor<T: Scalar>(abs_det: T, n: usize) -> T {
    abs_det.ln() - T::lit(n as f64 / 2.0) * (T::lit(4.0) * T::PI()).ln()
}

/// Single-term series: every coupling vanishes and the measure is
/// `|det V| Γ(1/2)^n / (4π)^{n/2} = |det V| / 2^n`.
pub(crate) fn orthant_value<T: Scalar>(abs_det: T, n: usize, lambda_min: T) -> SeriesValue<T> {
    let value = abs_det / T::lit(2f64.powi(n as i32));
    SeriesValue {
        value,
        error: ErrorModel {
            lambda_min,
            rho: decay_ratio(lambda_min),
            tail_estimate: T::zero(),
            terms_used: 1,
        },
        caps: vec![0; n.saturating_sub(1)],
    }
}

pub(crate) fn check_finite<T: Scalar>(xs: &[T]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// A positive number as `mantissa * exp(ln_scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled<T> {
    pub mant: T,
    pub ln_scale: T,
}

impl<T: Scalar> Scaled<T> {
    pub fn ln_abs(self) -> T {
        self.mant.abs().ln() + self.ln_scale
    }

    pub fn times_exp(self, ln_factor: T) -> T {
        if self.mant == T::zero() {
            return T::zero();
        }
        self.mant.signum() * (self.ln_abs() + ln_factor).exp()
    }
}

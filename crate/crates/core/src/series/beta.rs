//! Tridiagonal series `T_β`.
//!
//! With `b_0 = b_n = 0` the coefficient of `β^b` is
//! `Π_i (-2)^{b_i}/b_i! · Π_{j=0}^{n-1} Γ((1 + b_j + b_{j+1})/2)`, a product of
//! per-coordinate factors `c_i(b_i) = (-2β_i)^{b_i}/b_i!` and nearest-neighbour
//! factors `G(b_j, b_{j+1})`. The box sum is therefore a chain of
//! matrix-vector products. Both sides are rescaled by `h(b) = Γ(b + 1/2)^{1/2}`
//! so that the interior kernel `G(a,b)/(h(a)h(b))` is at most one (log
//! convexity of Γ), and every layer is renormalized with its log scale kept
//! aside.

use super::{
    check_finite, decay_ratio, ln_prefactor, orthant_value, ErrorModel, Scaled, SeriesValue,
    TruncationSpec, COUPLING_EPS,
};
use crate::error::{Error, Result};
use crate::gamma::{HalfGammaTable, LnFactorial};
use crate::linalg::{tridiag_lambda_min, SymTridiag};
use crate::scalar::Scalar;

const START_CAP: usize = 32;
const GROWTH: f64 = 1.5;

pub(crate) struct Chain<T> {
    beta: Vec<T>,
    k: usize,
    lnfact: LnFactorial<T>,
    lnh: Vec<T>,
    /// `ln(G(0,b)/h(b))`.
    ln_end: Vec<T>,
    /// `ln Γ(j/2)` for `j <= 2k + 2`.
    half: HalfGammaTable<T>,
    /// `Γ((2+j)/2) / Γ((1+j)/2)`, the step of `G(a, b)` in `a` at `a + b = j`.
    step_g: Vec<T>,
    /// `h(a) / h(a+1) = (a + 1/2)^{-1/2}`.
    step_h: Vec<T>,
}

impl<T: Scalar> Chain<T> {
    /// Tables for caps up to `k`.
    pub fn new(beta: &[T], k: usize) -> Self {
        let half = HalfGammaTable::<T>::new(2 * k + 2);
        let lnfact = LnFactorial::new(k);
        let lnh: Vec<T> = (0..=k)
            .map(|b| half.ln_half(2 * b + 1) / T::lit(2.0))
            .collect();
        let ln_end = (0..=k).map(|b| half.ln_half(1 + b) - lnh[b]).collect();
        let step_g = (0..=2 * k)
            .map(|j| (half.ln_half(j + 2) - half.ln_half(j + 1)).exp())
            .collect();
        let step_h = (0..=k)
            .map(|a| T::one() / (T::lit(a as f64) + T::lit(0.5)).sqrt())
            .collect();
        Self {
            beta: beta.to_vec(),
            k,
            lnfact,
            lnh,
            ln_end,
            half,
            step_g,
            step_h,
        }
    }

    /// Per-block terms `(ln|p_j|, sign p_j)` of `Σ_a x_a G(a, b)/(h(a)h(b))`.
    /// Within a block the kernel is advanced by its ratio in `a` from an
    /// exactly computed first entry, which stays in log form.
    fn apply(&self, x: &Blocked<T>, b: usize, out: &mut Vec<(T, T)>) {
        out.clear();
        for (j, &scale) in x.ln.iter().enumerate() {
            if !scale.is_finite() {
                continue;
            }
            let lo = j * BLOCK;
            let hi = (lo + BLOCK).min(x.m.len());
            let ln_g0 = self.half.ln_half(1 + lo + b) - self.lnh[lo] - self.lnh[b];
            let mut g = T::one();
            let mut p = T::zero();
            for a in lo..hi {
                p = p + x.m[a] * g;
                g = g * self.step_g[a + b] * self.step_h[a];
            }
            if p != T::zero() {
                out.push((scale + ln_g0 + p.abs().ln(), p.signum()));
            }
        }
    }

    /// `ln |c_i(b)| + 2 ln h(b)` and the sign of `c_i(b)`.
    fn ln_coef(&self, i: usize, b: usize) -> (T, T) {
        if b == 0 {
            return (T::lit(2.0) * self.lnh[0], T::one());
        }
        let beta = self.beta[i];
        if beta.abs() <= T::lit(COUPLING_EPS) {
            return (T::neg_infinity(), T::one());
        }
        let ln = T::lit(b as f64) * (T::lit(2.0) * beta.abs()).ln() + T::lit(2.0) * self.lnh[b]
            - self.lnfact.get(b);
        let sign = if b % 2 == 1 && beta > T::zero() {
            -T::one()
        } else {
            T::one()
        };
        (ln, sign)
    }

    /// Sum of `A_b β^b` (or of `|A_b β^b|` when `!signed`) over the box
    /// `b_i <= caps[i]`, restricted to `b_i >= beyond[i]` for at least one
    /// `i` when `beyond` is given. Excludes the prefactor.
    pub fn sum(&self, caps: &[usize], signed: bool, beyond: Option<&[usize]>) -> Scaled<T> {
        let m = self.beta.len();
        debug_assert_eq!(caps.len(), m);
        debug_assert!(caps.iter().all(|&c| c <= self.k));
        let over = |i: usize, b: usize| beyond.is_some_and(|n| b >= n[i]);
        let coef = |i: usize, b: usize| {
            let (ln, s) = self.ln_coef(i, b);
            // the right end factor joins the last layer
            let ln = if i + 1 == m { ln + self.ln_end[b] } else { ln };
            (ln, if signed { s } else { T::one() })
        };
        let none = (T::neg_infinity(), T::one());

        // layer 0: G(0, b) c_1(b)
        let (mut e0, mut e1) = (Vec::new(), Vec::new());
        for b in 0..=caps[0] {
            let (ln, s) = coef(0, b);
            let x = (ln + self.ln_end[b], s);
            let (x0, x1) = if over(0, b) { (none, x) } else { (x, none) };
            e0.push(x0);
            e1.push(x1);
        }
        let (mut v0, mut v1) = (Blocked::from_logs(&e0), Blocked::from_logs(&e1));

        let (mut t0, mut t1) = (Vec::new(), Vec::new());
        for i in 1..m {
            e0.clear();
            e1.clear();
            for b in 0..=caps[i] {
                self.apply(&v0, b, &mut t0);
                self.apply(&v1, b, &mut t1);
                let (ln, s) = coef(i, b);
                let (x0, x1) = (log_sum(&t0), log_sum(&t1));
                let (x0, x1) = if over(i, b) {
                    (none, log_sum(&[x0, x1]))
                } else {
                    (x0, x1)
                };
                e0.push((ln + x0.0, s * x0.1));
                e1.push((ln + x1.0, s * x1.1));
            }
            v0 = Blocked::from_logs(&e0);
            v1 = Blocked::from_logs(&e1);
        }

        let total = if beyond.is_some() {
            v1.total()
        } else {
            log_sum(&[v0.total(), v1.total()])
        };
        if total.0.is_finite() {
            Scaled {
                mant: total.1,
                ln_scale: total.0,
            }
        } else {
            Scaled {
                mant: T::zero(),
                ln_scale: T::zero(),
            }
        }
    }

    /// Transfer products needed for one sum over `caps`.
    pub fn work(caps: &[usize]) -> u64 {
        caps.windows(2)
            .map(|w| ((w[0] + 1) * (w[1] + 1)) as u64)
            .sum::<u64>()
            + caps.first().map_or(0, |&c| c as u64 + 1)
    }
}

fn lattice_points(caps: &[usize]) -> u64 {
    caps.iter()
        .fold(1u64, |acc, &c| acc.saturating_mul(c as u64 + 1))
}

/// Entries per block of a [`Blocked`] vector.
const BLOCK: usize = 32;

/// Vector with one log scale per block, so that entries many orders of
/// magnitude apart survive the renormalization.
struct Blocked<T> {
    m: Vec<T>,
    /// `-inf` for all-zero blocks.
    ln: Vec<T>,
}

impl<T: Scalar> Blocked<T> {
    /// From `(ln|x|, sign)` entries.
    fn from_logs(entries: &[(T, T)]) -> Self {
        let mut m = Vec::with_capacity(entries.len());
        let mut ln = Vec::with_capacity(entries.len().div_ceil(BLOCK));
        for chunk in entries.chunks(BLOCK) {
            let max = chunk.iter().map(|e| e.0).fold(T::neg_infinity(), T::max);
            ln.push(max);
            for &(l, s) in chunk {
                m.push(if max.is_finite() && l.is_finite() {
                    s * (l - max).exp()
                } else {
                    T::zero()
                });
            }
        }
        Self { m, ln }
    }

    fn total(&self) -> (T, T) {
        let terms: Vec<(T, T)> = self
            .ln
            .iter()
            .zip(self.m.chunks(BLOCK))
            .filter(|(l, _)| l.is_finite())
            .map(|(&l, chunk)| {
                let p: T = chunk.iter().copied().sum();
                (l + p.abs().ln(), p.signum())
            })
            .collect();
        log_sum(&terms)
    }
}

/// `(ln|Σ x|, sign)` of a sum of `(ln|x|, sign)` terms.
fn log_sum<T: Scalar>(terms: &[(T, T)]) -> (T, T) {
    let max = terms.iter().map(|t| t.0).fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return (T::neg_infinity(), T::one());
    }
    let s = terms
        .iter()
        .filter(|t| t.0.is_finite())
        .fold(T::zero(), |acc, &(l, sg)| acc + sg * (l - max).exp());
    if s == T::zero() {
        (T::neg_infinity(), T::one())
    } else {
        (max + s.abs().ln(), s.signum())
    }
}

/// `|det V| = sqrt(det V^T V)` for the unit tridiagonal Gram matrix with
/// off-diagonal `beta`.
pub fn tridiagonal_abs_det<T: Scalar>(beta: &[T]) -> Result<T> {
    let d = SymTridiag::unit(beta)?.determinant();
    if !(d > T::zero()) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(d.sqrt())
}

pub(crate) fn lambda_min<T: Scalar>(beta: &[T]) -> Result<T> {
    Ok(tridiag_lambda_min(
        &SymTridiag::unit(beta)?,
        T::lit(1e-12).max(T::epsilon() * T::lit(8.0)),
    ))
}

/// Evaluates `T_β` for the couplings `β_i = v_i · v_{i+1}` of a cone with
/// tridiagonal Gram matrix. `abs_det` defaults to `sqrt(det V^T V)`.
pub fn t_beta<T: Scalar>(
    beta: &[T],
    abs_det: Option<T>,
    spec: &TruncationSpec,
) -> Result<SeriesValue<T>> {
    spec.validate()?;
    check_finite(beta)?;
    let n = beta.len() + 1;
    if beta.iter().any(|b| b.abs() > T::one()) {
        return Err(Error::InvalidArgument(
            "couplings of unit vectors lie in [-1, 1]".into(),
        ));
    }
    let lam = lambda_min(beta)?;
    if !(lam > T::zero_tol()) {
        return Err(Error::NotPositiveDefinite);
    }
    let abs_det = match abs_det {
        Some(d) => d,
        None => tridiagonal_abs_det(beta)?,
    };
    if beta.iter().all(|b| b.abs() <= T::lit(COUPLING_EPS)) {
        return Ok(orthant_value(abs_det, n, lam));
    }
    let rho = decay_ratio(lam);
    let ln_pre = ln_prefactor(abs_det, n);
    let m = beta.len();
    let mut caps = spec.caps.clone().unwrap_or_else(|| vec![START_CAP; m]);
    if caps.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: caps.len(),
        });
    }
    loop {
        let work = Chain::<T>::work(&caps);
        if work > spec.max_terms {
            return Err(Error::BudgetExceeded {
                terms: work,
                tail: f64::INFINITY,
            });
        }
        let chain = Chain::new(beta, caps.iter().copied().max().unwrap_or(0));
        let value = chain.sum(&caps, true, None).times_exp(ln_pre);
        let edge = chain.sum(&caps, false, Some(&caps)).times_exp(ln_pre);
        if !value.is_finite() || !edge.is_finite() {
            return Err(Error::NonFiniteTerm);
        }
        let tail = edge * rho / (T::one() - rho);
        let done = spec.caps.is_some() || tail.to_f64_lossy() <= spec.target_tol;
        if done {
            return Ok(SeriesValue {
                value,
                error: ErrorModel {
                    lambda_min: lam,
                    rho,
                    tail_estimate: tail,
                    terms_used: lattice_points(&caps),
                },
                caps,
            });
        }
        let next: Vec<usize> = caps
            .iter()
            .map(|&c| ((c as f64) * GROWTH).ceil() as usize)
            .collect();
        if Chain::<T>::work(&next) > spec.max_terms {
            return Err(Error::BudgetExceeded {
                terms: work,
                tail: tail.to_f64_lossy(),
            });
        }
        caps = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Brute-force box sum of the coefficients, straight from the definition.
    fn brute(beta: &[f64], caps: &[usize], signed: bool) -> f64 {
        let m = beta.len();
        let mut b = vec![0usize; m];
        let mut total = 0.0;
        loop {
            let mut ln = 0.0;
            let mut sign = 1.0;
            let mut prev = 0;
            for i in 0..m {
                ln += crate::gamma::ln_gamma((1 + prev + b[i]) as f64 / 2.0);
                ln -= crate::gamma::ln_gamma(b[i] as f64 + 1.0);
                if b[i] > 0 {
                    ln += b[i] as f64 * (2.0 * beta[i].abs()).ln();
                }
                if b[i] % 2 == 1 && beta[i] > 0.0 {
                    sign = -sign;
                }
                prev = b[i];
            }
            ln += crate::gamma::ln_gamma((1 + prev) as f64 / 2.0);
            total += if signed { sign * ln.exp() } else { ln.exp() };
            let mut i = 0;
            loop {
                if i == m {
                    return total;
                }
                if b[i] < caps[i] {
                    b[i] += 1;
                    break;
                }
                b[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn chain_matches_brute_force() {
        let beta = [0.4, -0.3, 0.25];
        let caps = [6, 4, 5];
        let chain = Chain::new(&beta, 6);
        for signed in [true, false] {
            let got = chain.sum(&caps, signed, None);
            let want = brute(&beta, &caps, signed);
            assert!(
                (got.times_exp(0.0) - want).abs() <= 1e-12 * want.abs().max(1.0),
                "{signed}"
            );
        }
        let inner = brute(&beta, &[5, 3, 4], false);
        let all = brute(&beta, &caps, false);
        let edge = chain.sum(&caps, false, Some(&caps)).times_exp(0.0);
        assert!((edge - (all - inner)).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_is_exact() {
        for n in 2..=8 {
            let beta = vec![0.0; n - 1];
            let r = t_beta(&beta, None, &TruncationSpec::default()).unwrap();
            assert_eq!(r.value, 0.5f64.powi(n as i32));
            assert_eq!(r.error.terms_used, 1);
        }
    }

    #[test]
    fn planar_angles() {
        for theta in [
            std::f64::consts::FRAC_PI_3,
            1.0,
            2.0 * std::f64::consts::FRAC_PI_3,
            2.9,
        ] {
            let beta = [theta.cos()];
            let r = t_beta(&beta, None, &TruncationSpec::with_tol(1e-11)).unwrap();
            assert_abs_diff_eq!(
                r.value,
                theta / (2.0 * std::f64::consts::PI),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn rejects_outside_domain() {
        assert_eq!(
            t_beta(&[0.8, 0.8], None, &TruncationSpec::default()),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn fixed_caps_are_respected() {
        let r = t_beta(&[0.5, 0.5], None, &TruncationSpec::fixed(vec![10, 12])).unwrap();
        assert_eq!(r.caps, vec![10, 12]);
        assert_eq!(r.error.terms_used, 11 * 13);
    }
}

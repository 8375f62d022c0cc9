//! The composed pipeline: lineality split, triangulation, signed
//! decomposition, series evaluation of every piece.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cone::{Cone, SimplicialCone};
use crate::decompose::{decompose_any, ConeForm, Decomposition, Method, PieceCone};
use crate::error::{Error, Result};
use crate::linalg::{orthonormal_basis, Mat};
use crate::oracle::{mc_estimate, measure_dim2, measure_dim3, McConfig};
use crate::scalar::Scalar;
use crate::series::{
    orthant_value, t_alpha_gram, t_beta, tridiagonal_abs_det, ErrorModel, SeriesValue,
    TruncationSpec, COUPLING_EPS,
};

/// How a measure is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeasureMethod {
    Decomp1,
    Decomp2,
    #[default]
    Decomp2Tridiag,
    /// Triangulation plus closed forms; reduced dimension at most 3.
    ClosedForm,
    MonteCarlo,
}

impl MeasureMethod {
    pub const ALL: [MeasureMethod; 5] = [
        MeasureMethod::Decomp1,
        MeasureMethod::Decomp2,
        MeasureMethod::Decomp2Tridiag,
        MeasureMethod::ClosedForm,
        MeasureMethod::MonteCarlo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureMethod::Decomp1 => "decomp1",
            MeasureMethod::Decomp2 => "decomp2",
            MeasureMethod::Decomp2Tridiag => "decomp2-tridiag",
            MeasureMethod::ClosedForm => "closed-form",
            MeasureMethod::MonteCarlo => "mc",
        }
    }

    fn decomposition(self) -> Method {
        match self {
            MeasureMethod::Decomp1 => Method::Decomp1,
            MeasureMethod::Decomp2 => Method::Decomp2,
            MeasureMethod::Decomp2Tridiag => Method::Decomp2Tridiag,
            MeasureMethod::ClosedForm | MeasureMethod::MonteCarlo => Method::Triangulation,
        }
    }
}

impl fmt::Display for MeasureMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOptions {
    pub method: MeasureMethod,
    /// Target absolute error of the whole measure.
    pub tol: f64,
    pub max_terms: u64,
    /// Measure relative to the linear span instead of the ambient space.
    pub span_relative: bool,
    pub mc: McConfig,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            method: MeasureMethod::default(),
            tol: 1e-8,
            max_terms: 50_000_000,
            span_relative: false,
            mc: McConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult<T> {
    /// Measure, clamped to `[0, 1]`.
    pub value: T,
    /// Sum of the series tail estimates, or the Monte Carlo standard error.
    pub abs_error_estimate: T,
    pub method: MeasureMethod,
    /// Pieces in the signed decomposition, lower-dimensional ones included.
    pub pieces: usize,
    pub terms_used: u64,
    /// The unclamped sum left `[0, 1]` by more than the error estimate.
    pub clamped: bool,
}

impl<T: Scalar> MeasureResult<T> {
    fn exact(value: T, method: MeasureMethod, pieces: usize) -> Self {
        Self {
            value,
            abs_error_estimate: T::zero(),
            method,
            pieces,
            terms_used: 0,
            clamped: false,
        }
    }
}

/// Normalized solid angle measure of `c`.
pub fn measure<T: Scalar>(c: &Cone<T>, opts: &MeasureOptions) -> Result<MeasureResult<T>> {
    if opts.method == MeasureMethod::MonteCarlo {
        return monte_carlo(c, opts);
    }
    let d = decompose_any(c, opts.method.decomposition())?;
    measure_decomposition(&d, opts)
}

/// Measure of a simplicial cone.
pub fn measure_simplicial<T: Scalar>(
    k: &SimplicialCone<T>,
    opts: &MeasureOptions,
) -> Result<MeasureResult<T>> {
    measure(&Cone::from(k), opts)
}

/// Signed sum of piece measures of a decomposition produced by
/// [`decompose_any`].
pub fn measure_decomposition<T: Scalar>(
    d: &Decomposition<T>,
    opts: &MeasureOptions,
) -> Result<MeasureResult<T>> {
    let method = opts.method;
    if !opts.span_relative && !d.is_full_dimensional() {
        return Ok(MeasureResult::exact(T::zero(), method, d.pieces.len()));
    }
    if d.whole_subspace {
        return Ok(MeasureResult::exact(T::one(), method, 0));
    }
    let measured: Vec<_> = d.measured_pieces().collect();
    let share = opts.tol / measured.len().max(1) as f64;
    let parts = measured
        .par_iter()
        .map(|p| {
            let r = piece_measure(&p.cone, p.form, share, opts)?;
            Ok((T::lit(f64::from(p.sign)), r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut value = T::zero();
    let mut err = T::zero();
    let mut terms = 0u64;
    for (s, r) in parts {
        value = value + s * r.value;
        err = err + r.abs_error_estimate;
        terms = terms.saturating_add(r.terms_used);
    }
    let clamped = value < -err || value > T::one() + err;
    Ok(MeasureResult {
        value: value.max(T::zero()).min(T::one()),
        abs_error_estimate: err,
        method,
        pieces: d.pieces.len(),
        terms_used: terms,
        clamped,
    })
}

/// Measure of one piece in its own ambient dimension.
fn piece_measure<T: Scalar>(
    cone: &PieceCone<T>,
    form: ConeForm,
    tol: f64,
    opts: &MeasureOptions,
) -> Result<MeasureResult<T>> {
    match (form, cone) {
        (ConeForm::LowerDim, _) => Ok(MeasureResult::exact(T::zero(), opts.method, 1)),
        (ConeForm::ContainsLine, c) => {
            let general = match c {
                PieceCone::General(g) => g.clone(),
                PieceCone::Simplicial(k) => Cone::from(k),
            };
            let sub = MeasureOptions {
                tol,
                span_relative: false,
                ..opts.clone()
            };
            measure(&general, &sub)
        }
        (_, PieceCone::General(_)) => Err(Error::InvalidArgument(
            "full-dimensional piece is not simplicial".into(),
        )),
        (form, PieceCone::Simplicial(k)) => {
            if opts.method == MeasureMethod::ClosedForm {
                return closed_form(k, opts.method);
            }
            if form == ConeForm::NotPd {
                return Err(Error::NotPositiveDefinite);
            }
            let spec = TruncationSpec {
                caps: None,
                target_tol: tol,
                max_terms: opts.max_terms,
            };
            let v = series(k, &spec)?;
            Ok(MeasureResult {
                value: v.value,
                abs_error_estimate: v.error.tail_estimate,
                method: opts.method,
                pieces: 1,
                terms_used: v.error.terms_used,
                clamped: false,
            })
        }
    }
}

fn closed_form<T: Scalar>(
    k: &SimplicialCone<T>,
    method: MeasureMethod,
) -> Result<MeasureResult<T>> {
    let value = match k.dim() {
        1 => T::lit(0.5),
        2 => measure_dim2(k)?,
        3 => measure_dim3(k)?,
        n => {
            return Err(Error::InvalidArgument(format!(
                "closed forms cover dimensions up to 3, got {n}"
            )))
        }
    };
    Ok(MeasureResult::exact(value, method, 1))
}

/// Series value of a simplicial cone with positive definite associated
/// matrix. The coupling graph is split into connected components, whose
/// measures multiply; path components go through `T_β`, the rest through
/// `T_α`.
pub fn series<T: Scalar>(k: &SimplicialCone<T>, spec: &TruncationSpec) -> Result<SeriesValue<T>> {
    let g = k.gram();
    let n = k.dim();
    let eps = T::lit(COUPLING_EPS);
    let linked = |i: usize, j: usize| i != j && g[(i, j)].abs() > eps;
    if (0..n).all(|i| (0..n).all(|j| !linked(i, j))) {
        return Ok(orthant_value(k.abs_det(), n, T::one()));
    }
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut comp = vec![root];
        let mut next = 0;
        while next < comp.len() {
            let i = comp[next];
            next += 1;
            for j in 0..n {
                if !seen[j] && linked(i, j) {
                    seen[j] = true;
                    comp.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    let sub_spec = TruncationSpec {
        target_tol: spec.target_tol / components.len() as f64,
        ..spec.clone()
    };
    let mut value = T::one();
    let mut tail = T::zero();
    let mut terms = 1u64;
    let mut lambda_min = T::one();
    let mut rho = T::zero();
    let mut caps = Vec::new();
    for comp in &components {
        let v = match path_order(comp, &linked) {
            Some(order) => {
                let beta: Vec<T> = order.windows(2).map(|w| g[(w[0], w[1])]).collect();
                let det = if beta.is_empty() {
                    T::one()
                } else {
                    tridiagonal_abs_det(&beta)?
                };
                t_beta(&beta, Some(det), &sub_spec)?
            }
            None => {
                let rows: Vec<Vec<T>> = comp
                    .iter()
                    .map(|&i| comp.iter().map(|&j| g[(i, j)]).collect())
                    .collect();
                let sub = Mat::from_rows(&rows)?;
                let det = crate::linalg::determinant(&sub)?;
                if !(det > T::zero()) {
                    return Err(Error::NotPositiveDefinite);
                }
                t_alpha_gram(&sub, det.sqrt(), &sub_spec)?
            }
        };
        // (v + e)(w + f) - vw <= e w + f v + e f, and measures are at most one
        tail = tail * v.value.abs()
            + v.error.tail_estimate * value.abs()
            + tail * v.error.tail_estimate;
        value = value * v.value;
        terms = terms.saturating_mul(v.error.terms_used.max(1));
        lambda_min = lambda_min.min(v.error.lambda_min);
        rho = rho.max(v.error.rho);
        caps.extend(v.caps);
    }
    // the components' dets multiply to sqrt(det G); rescale to the cone's own
    // |det V| so that rounding in the sub-determinants does not leak in
    let parts_det: T = components
        .iter()
        .map(|c| {
            let rows: Vec<Vec<T>> = c
                .iter()
                .map(|&i| c.iter().map(|&j| g[(i, j)]).collect())
                .collect();
            Mat::from_rows(&rows)
                .and_then(|m| crate::linalg::determinant(&m))
                .map(|d| d.sqrt())
        })
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::one(), |a, b| a * b);
    let scale = k.abs_det() / parts_det;
    Ok(SeriesValue {
        value: value * scale,
        error: ErrorModel {
            lambda_min,
            rho,
            tail_estimate: tail * scale,
            terms_used: terms,
        },
        caps,
    })
}

/// Vertex order along a path, starting from its lowest-index end, or `None`
/// when the component is not a path.
fn path_order(comp: &[usize], linked: &impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    if comp.len() == 1 {
        return Some(comp.to_vec());
    }
    let degree = |i: usize| comp.iter().filter(|&&j| linked(i, j)).count();
    if comp.iter().any(|&i| degree(i) > 2) {
        return None;
    }
    let start = *comp.iter().find(|&&i| degree(i) == 1)?;
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&nx) = comp.iter().find(|&&j| j != prev && linked(cur, j)) {
        prev = cur;
        cur = nx;
        order.push(cur);
    }
    (order.len() == comp.len()).then_some(order)
}

fn monte_carlo<T: Scalar>(c: &Cone<T>, opts: &MeasureOptions) -> Result<MeasureResult<T>> {
    let target = if opts.span_relative {
        let basis = orthonormal_basis(c.generators(), T::rank_tol());
        let gens = c
            .generators()
            .iter()
            .map(|g| crate::decompose::coords(&basis, g))
            .collect();
        Cone::new(basis.len(), gens)?
    } else {
        c.clone()
    };
    let r = mc_estimate(&target, &opts.mc)?;
    Ok(MeasureResult {
        value: T::lit(r.estimate),
        abs_error_estimate: T::lit(r.std_error),
        method: MeasureMethod::MonteCarlo,
        pieces: 0,
        terms_used: r.samples,
        clamped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cone(gens: &[&[f64]]) -> Cone<f64> {
        Cone::from_generators(gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn orthants_are_exact() {
        for n in 1..=8 {
            let r = measure_simplicial(
                &SimplicialCone::<f64>::orthant(n),
                &MeasureOptions::default(),
            )
            .unwrap();
            assert_eq!(r.value, 0.5f64.powi(n as i32));
            assert_eq!(r.terms_used, 1);
            assert_eq!(r.abs_error_estimate, 0.0);
        }
    }

    #[test]
    fn planar_example() {
        let c = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0]]);
        let mut opts = MeasureOptions::default();
        assert_eq!(measure(&c, &opts).unwrap().value, 0.0);
        opts.span_relative = true;
        assert_abs_diff_eq!(measure(&c, &opts).unwrap().value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn whole_space_and_half_space() {
        let opts = MeasureOptions::default();
        let full = cone(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert_eq!(measure(&full, &opts).unwrap().value, 1.0);
        let half = cone(&[
            &[1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        assert_eq!(measure(&half, &opts).unwrap().value, 0.5);
    }

    #[test]
    fn methods_agree_on_a_wide_cone() {
        let c = cone(&[&[1.0, 0.1, 0.2], &[-0.9, 0.4, 0.1], &[0.1, -0.8, 0.5]]);
        let reference = measure(
            &c,
            &MeasureOptions {
                method: MeasureMethod::ClosedForm,
                ..Default::default()
            },
        )
        .unwrap()
        .value;
        for method in [
            MeasureMethod::Decomp1,
            MeasureMethod::Decomp2,
            MeasureMethod::Decomp2Tridiag,
        ] {
            let r = measure(
                &c,
                &MeasureOptions {
                    method,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_abs_diff_eq!(r.value, reference, epsilon = 1e-7);
        }
    }

    #[test]
    fn path_detection() {
        let links = [(0, 2), (2, 1)];
        let linked = |i: usize, j: usize| {
            links
                .iter()
                .any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j))
        };
        assert_eq!(path_order(&[0, 1, 2], &linked), Some(vec![0, 2, 1]));
        let triangle = |i: usize, j: usize| i != j;
        assert_eq!(path_order(&[0, 1, 2], &triangle), None);
    }

    #[test]
    fn method_names_round_trip() {
        for m in MeasureMethod::ALL {
            assert_eq!(m.name().parse::<MeasureMethod>().unwrap(), m);
        }
        assert!("simplex".parse::<MeasureMethod>().is_err());
    }
}

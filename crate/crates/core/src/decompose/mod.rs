//! Signed decompositions of simplicial cones into cones whose associated
//! matrices are positive definite.
//!
//! Two routes are provided. The hyperplane route ([`decomp1`]) produces,
//! besides simplicial pieces, cones containing lines that have to be measured
//! in lower dimension. The line route ([`decomp2`]) only discards cones of
//! lower dimension, which have measure zero; its tridiagonal variant keeps
//! recursing until every piece has a tridiagonal Gram matrix.

mod any;
mod flat;
mod hyperplane;
mod indicator;
mod line;
mod properties;

pub use any::{decompose_any, decompose_unsplit};
pub use flat::thin_split;
pub use hyperplane::{bv_hyperplane, decomp1, BvHyperplane, HyperplaneSpec};
pub use indicator::SignedIndicator;
pub use line::{bv_mod_lower_dim, decomp2, sign_table, SignTable};
pub use properties::{balanced_signs, check_piece, PieceCheck};

use std::fmt;

use crate::cone::{Cone, SimplicialCone};
use crate::error::{Error, Result};
use crate::linalg::{dot, normalized, orthonormal_basis, smallest_eigenvalue_dense};
use crate::scalar::Scalar;

/// Decomposition route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Hyperplane route; pieces may contain lines.
    Decomp1,
    /// Line route; stops once a piece has a positive definite associated
    /// matrix of the required shape.
    Decomp2,
    /// Line route continued until every Gram matrix is tridiagonal.
    Decomp2Tridiag,
    /// Plain triangulation, no signed rewriting.
    Triangulation,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Decomp1 => "DECOMP1",
            Method::Decomp2 => "DECOMP2",
            Method::Decomp2Tridiag => "DECOMP2_TRIDIAG",
            Method::Triangulation => "TRIANGULATION",
        })
    }
}

/// Shape of a piece in a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeForm {
    /// Full-dimensional simplicial with positive definite associated matrix.
    PdFull,
    /// Full-dimensional simplicial, associated matrix not positive definite.
    NotPd,
    /// Contains a line; measured after splitting off its lineality space.
    ContainsLine,
    /// Affine dimension below the ambient one; measure zero.
    LowerDim,
}

impl fmt::Display for ConeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeForm::PdFull => "PD_FULL",
            ConeForm::NotPd => "NOT_PD",
            ConeForm::ContainsLine => "CONTAINS_LINE",
            ConeForm::LowerDim => "LOWER_DIM",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceCone<T> {
    Simplicial(SimplicialCone<T>),
    General(Cone<T>),
}

impl<T: Scalar> PieceCone<T> {
    pub fn generators(&self) -> &[Vec<T>] {
        match self {
            PieceCone::Simplicial(k) => k.generators(),
            PieceCone::General(c) => c.generators(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PieceCone::Simplicial(k) => k.dim(),
            PieceCone::General(c) => c.ambient_dim(),
        }
    }
}

/// One signed term `s [C_i]` of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedCone<T> {
    pub sign: i8,
    pub form: ConeForm,
    pub cone: PieceCone<T>,
}

impl<T: Scalar> SignedCone<T> {
    /// Simplicial piece tagged by its associated matrix.
    pub fn simplicial(sign: i8, k: SimplicialCone<T>) -> Self {
        let form = if k.is_pd() {
            ConeForm::PdFull
        } else {
            ConeForm::NotPd
        };
        Self {
            sign,
            form,
            cone: PieceCone::Simplicial(k),
        }
    }

    /// Piece from raw generators: simplicial when they form a basis, tagged
    /// lower dimensional otherwise.
    pub(crate) fn from_basis(sign: i8, gens: Vec<Vec<T>>) -> Result<Self> {
        match SimplicialCone::new(&gens) {
            Ok(k) => Ok(Self::simplicial(sign, k)),
            Err(Error::RankDeficient { .. }) => {
                let dim = gens.len();
                Ok(Self {
                    sign,
                    form: ConeForm::LowerDim,
                    cone: PieceCone::General(Cone::new(dim, gens)?),
                })
            }
            Err(e) => Err(e),
        }
    }

    pub(crate) fn general(sign: i8, form: ConeForm, dim: usize, gens: Vec<Vec<T>>) -> Result<Self> {
        Ok(Self {
            sign,
            form,
            cone: PieceCone::General(Cone::new(dim, gens)?),
        })
    }

    pub fn generators(&self) -> &[Vec<T>] {
        self.cone.generators()
    }

    pub fn as_simplicial(&self) -> Option<&SimplicialCone<T>> {
        match &self.cone {
            PieceCone::Simplicial(k) => Some(k),
            PieceCone::General(_) => None,
        }
    }
}

/// Signed decomposition `[C] = Σ s_i [C_i]` up to measure-zero sets.
///
/// Pieces live in the coordinates given by `basis` (an orthonormal basis of
/// the span of the pointed part of the source), or in ambient coordinates
/// when `basis` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub pieces: Vec<SignedCone<T>>,
    pub method: Method,
    pub source: String,
    pub ambient_dim: usize,
    /// Orthonormal basis of the lineality space that was split off.
    pub lineality: Vec<Vec<T>>,
    pub basis: Option<Vec<Vec<T>>>,
    /// The source cone is a linear subspace; `pieces` is empty.
    pub whole_subspace: bool,
    /// Number of simplicial cones the source was triangulated into.
    pub simplices: usize,
    /// Simplicial cones the decomposition method was applied to: the
    /// simplices, or the parts of a flat simplex after splitting it.
    pub parents: Vec<SimplicialCone<T>>,
    /// Index into `parents` for every piece.
    pub parent_of: Vec<usize>,
}

impl<T: Scalar> Decomposition<T> {
    fn of_simplicial(k: &SimplicialCone<T>, method: Method, pieces: Vec<SignedCone<T>>) -> Self {
        Self {
            parent_of: vec![0; pieces.len()],
            pieces,
            method,
            source: format!("simplicial cone in R^{}", k.dim()),
            ambient_dim: k.dim(),
            lineality: Vec::new(),
            basis: None,
            whole_subspace: false,
            simplices: 1,
            parents: vec![k.clone()],
        }
    }

    /// Dimension of the space the pieces live in.
    pub fn piece_dim(&self) -> usize {
        self.basis.as_ref().map_or(self.ambient_dim, Vec::len)
    }

    /// Whether the source cone spans the ambient space.
    pub fn is_full_dimensional(&self) -> bool {
        self.lineality.len() + self.piece_dim() == self.ambient_dim
    }

    /// Maps piece coordinates back to ambient coordinates.
    pub fn lift(&self, y: &[T]) -> Vec<T> {
        match &self.basis {
            None => y.to_vec(),
            Some(b) => lift(b, y, self.ambient_dim),
        }
    }

    /// Pieces that contribute to the measure.
    pub fn measured_pieces(&self) -> impl Iterator<Item = &SignedCone<T>> {
        self.pieces.iter().filter(|p| p.form != ConeForm::LowerDim)
    }
}

pub(crate) fn coords<T: Scalar>(basis: &[Vec<T>], x: &[T]) -> Vec<T> {
    basis.iter().map(|q| dot(q, x)).collect()
}

pub(crate) fn lift<T: Scalar>(basis: &[Vec<T>], y: &[T], n: usize) -> Vec<T> {
    let mut x = vec![T::zero(); n];
    for (q, &c) in basis.iter().zip(y) {
        for (xi, &qi) in x.iter_mut().zip(q) {
            *xi = *xi + c * qi;
        }
    }
    x
}

const MAX_DEPTH: usize = 64;

/// A term of a top-level split: the signed cone `c(sub..., w_n)`.
pub(crate) struct Term<T> {
    pub sign: i8,
    pub sub: Vec<Vec<T>>,
}

/// Whether `k` is already in final form for `method`.
pub(crate) fn is_terminal<T: Scalar>(k: &SimplicialCone<T>, method: Method) -> bool {
    let tol = T::zero_tol();
    match method {
        Method::Triangulation => true,
        Method::Decomp2Tridiag => k.is_tridiagonal(tol) && k.is_pd(),
        Method::Decomp1 | Method::Decomp2 => {
            let n = k.dim();
            if n <= 2 {
                return true;
            }
            let g = k.gram();
            (0..n - 2).all(|i| g[(i, n - 1)].abs() <= tol)
                && balanced_signs(g, tol).is_some()
                && k.is_pd()
        }
    }
}

/// Moves the index with the largest `|c_i|` to the end, keeping the others
/// in order.
pub(crate) fn pivot_last<T: Scalar>(c: &[T]) -> Vec<usize> {
    let p = (0..c.len())
        .max_by(|&a, &b| {
            c[a].abs()
                .partial_cmp(&c[b].abs())
                .expect("finite couplings")
                .then(b.cmp(&a))
        })
        .expect("nonempty");
    let mut order: Vec<usize> = (0..c.len()).filter(|&i| i != p).collect();
    order.push(p);
    order
}

pub(crate) fn unit<T: Scalar>(v: &[T]) -> Vec<T> {
    normalized(v).unwrap_or_else(|| v.to_vec())
}

/// Every generator can play `w_n` at the top level (deeper levels must keep
/// the last generator of their parent term); the choice with the best
/// conditioned pieces wins, ties going to the given order.
pub(crate) fn decompose_simplicial<T: Scalar>(
    k: &SimplicialCone<T>,
    method: Method,
) -> Result<Vec<SignedCone<T>>> {
    let n = k.dim();
    if method == Method::Triangulation || is_terminal(k, method) {
        return rec(k, method, 0);
    }
    let mut best: Option<(T, Vec<SignedCone<T>>)> = None;
    for last in (0..n).rev() {
        let mut gens = k.generators().to_vec();
        let wn = gens.remove(last);
        gens.push(wn);
        let pieces = rec(&SimplicialCone::new(&gens)?, method, 0)?;
        let score = conditioning(&pieces);
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, pieces));
        }
    }
    Ok(best.expect("nonempty cone").1)
}

fn rec<T: Scalar>(
    k: &SimplicialCone<T>,
    method: Method,
    depth: usize,
) -> Result<Vec<SignedCone<T>>> {
    if depth > MAX_DEPTH {
        return Err(Error::RecursionDepth);
    }
    if is_terminal(k, method) {
        return Ok(vec![SignedCone::simplicial(1, k.clone())]);
    }
    let n = k.dim();
    let (w, split) = split_along_last(k.generators(), method)?;
    let wn = &w[n - 1];
    let (terms, mut out) = match split {
        Split::Orthogonal => return extend_by(&w[..n - 1], wn, 1, method, depth),
        Split::Terms(terms, corrections) => (terms, corrections),
    };
    for term in terms {
        let mut full = term.sub.clone();
        full.push(wn.clone());
        let piece = SignedCone::from_basis(term.sign, full)?;
        match &piece.cone {
            PieceCone::Simplicial(kc) if !is_terminal(kc, method) => {
                out.extend(extend_by(&term.sub, wn, term.sign, method, depth)?);
            }
            _ => out.push(piece),
        }
    }
    Ok(out)
}

enum Split<T> {
    /// `w_n` is orthogonal to every other generator.
    Orthogonal,
    Terms(Vec<Term<T>>, Vec<SignedCone<T>>),
}

/// Splits along the last generator, with the pivot moved to `n-2`.
fn split_along_last<T: Scalar>(gens: &[Vec<T>], method: Method) -> Result<(Vec<Vec<T>>, Split<T>)> {
    let n = gens.len();
    let wn = &gens[n - 1];
    let c: Vec<T> = gens[..n - 1].iter().map(|w| dot(w, wn)).collect();
    if c.iter().all(|x| x.abs() <= T::zero_tol()) {
        return Ok((gens.to_vec(), Split::Orthogonal));
    }
    let mut w: Vec<Vec<T>> = pivot_last(&c)
        .into_iter()
        .map(|i| gens[i].clone())
        .collect();
    w.push(wn.clone());
    let (terms, corrections) = match method {
        Method::Decomp1 => hyperplane::case2_terms(&w)?,
        _ => (line::case2_terms(&w), Vec::new()),
    };
    Ok((w, Split::Terms(terms, corrections)))
}

/// Smallest Gram eigenvalue over the simplicial pieces; the series cost of
/// a piece grows like a power of its inverse.
pub(crate) fn conditioning<T: Scalar>(pieces: &[SignedCone<T>]) -> T {
    pieces
        .iter()
        .filter_map(SignedCone::as_simplicial)
        .map(|k| {
            smallest_eigenvalue_dense(k.gram(), T::lit(1e-3) * T::zero_tol()).unwrap_or(T::zero())
        })
        .fold(T::infinity(), T::min)
}

/// Decomposes `c(sub)` inside its own span and appends `w_n` to every piece.
fn extend_by<T: Scalar>(
    sub: &[Vec<T>],
    wn: &[T],
    sign: i8,
    method: Method,
    depth: usize,
) -> Result<Vec<SignedCone<T>>> {
    let n = wn.len();
    let basis = orthonormal_basis(sub, T::rank_tol());
    let with_last = |mut g: Vec<Vec<T>>| {
        g.push(wn.to_vec());
        g
    };
    if basis.len() < sub.len() {
        return Ok(vec![SignedCone::general(
            sign,
            ConeForm::LowerDim,
            n,
            with_last(sub.to_vec()),
        )?]);
    }
    let local: Vec<Vec<T>> = sub.iter().map(|g| coords(&basis, g)).collect();
    let kc = match SimplicialCone::new(&local) {
        Ok(kc) => kc,
        Err(Error::RankDeficient { .. }) => {
            return Ok(vec![SignedCone::general(
                sign,
                ConeForm::LowerDim,
                n,
                with_last(sub.to_vec()),
            )?]);
        }
        Err(e) => return Err(e),
    };
    rec(&kc, method, depth + 1)?
        .into_iter()
        .map(|p| {
            let s = p.sign * sign;
            let gens = with_last(p.generators().iter().map(|y| lift(&basis, y, n)).collect());
            match p.form {
                ConeForm::PdFull | ConeForm::NotPd => SignedCone::from_basis(s, gens),
                form => SignedCone::general(s, form, n, gens),
            }
        })
        .collect()
}

//! Cone data model: general cones given by generators, full-dimensional
//! simplicial cones with cached Gram data, duals, membership, lineality
//! splitting and triangulation.

mod nnls;
mod region;
mod triangulate;

pub use nnls::{in_cone, nnls, Nnls};
pub use region::ConeRegion;
pub(crate) use triangulate::triangulate_indices;
pub use triangulate::{lineality_split, triangulate, LinealitySplit};

use crate::error::{Error, Result};
use crate::linalg::{
    determinant, dot, gram_of, inverse, is_positive_definite, norm, scaled, solve, Mat,
};
use crate::scalar::Scalar;

/// Result of a point classification against a closed cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    /// Contribution of the point to a hit count: boundary points count half.
    pub fn weight(self) -> f64 {
        match self {
            Membership::Inside => 1.0,
            Membership::Boundary => 0.5,
            Membership::Outside => 0.0,
        }
    }
}

/// Cone generated by an arbitrary finite list of vectors.
///
/// Zero generators are dropped on construction; at least one nonzero
/// generator must remain.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone<T> {
    generators: Vec<Vec<T>>,
    dim: usize,
}

impl<T: Scalar> Cone<T> {
    pub fn new(dim: usize, generators: Vec<Vec<T>>) -> Result<Self> {
        let mut kept = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
            if norm(&g) > T::tiny_norm() {
                kept.push(g);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyCone);
        }
        Ok(Self {
            generators: kept,
            dim,
        })
    }

    /// Infers the ambient dimension from the first generator.
    pub fn from_generators(generators: Vec<Vec<T>>) -> Result<Self> {
        let dim = generators.first().map(Vec::len).ok_or(Error::EmptyCone)?;
        Self::new(dim, generators)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.generators
    }

    pub fn into_generators(self) -> Vec<Vec<T>> {
        self.generators
    }

    /// Dimension of the linear span.
    pub fn rank(&self) -> usize {
        crate::linalg::rank(&self.generators, T::rank_tol())
    }

    /// Classifies `x`; builds a [`ConeRegion`] on every call, so prefer
    /// [`ConeRegion::new`] when testing many points.
    pub fn contains_point(&self, x: &[T], tol: T) -> Result<Membership> {
        ConeRegion::new(self)?.classify(x, tol)
    }
}

impl<T: Scalar> From<&SimplicialCone<T>> for Cone<T> {
    fn from(k: &SimplicialCone<T>) -> Self {
        Self {
            generators: k.gens.clone(),
            dim: k.dim(),
        }
    }
}

/// Full-dimensional simplicial cone with unit generators.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialCone<T> {
    gens: Vec<Vec<T>>,
    gram: Mat<T>,
    abs_det: T,
}

/// Normalizes `n` generators of `R^n` into a [`SimplicialCone`].
pub fn make_simplicial<T: Scalar>(generators: &[Vec<T>]) -> Result<SimplicialCone<T>> {
    SimplicialCone::new(generators)
}

impl<T: Scalar> SimplicialCone<T> {
    pub fn new(generators: &[Vec<T>]) -> Result<Self> {
        let n = generators.len();
        let mut gens = Vec::with_capacity(n);
        for (index, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
            let len = norm(g);
            if !(len >= T::tiny_norm()) {
                return Err(Error::ZeroVector { index });
            }
            gens.push(scaled(g, T::one() / len));
        }
        if n == 0 {
            return Err(Error::EmptyCone);
        }
        let v = Mat::from_columns(&gens)?;
        let abs_det = determinant(&v)?.abs();
        if !(abs_det > T::rank_tol()) {
            return Err(Error::RankDeficient {
                abs_det: abs_det.to_f64_lossy(),
            });
        }
        let gram = gram_of(&gens);
        Ok(Self {
            gens,
            gram,
            abs_det,
        })
    }

    /// Positive orthant of `R^n`.
    pub fn orthant(n: usize) -> Self {
        let gens: Vec<Vec<T>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        Self {
            gram: Mat::identity(n),
            gens,
            abs_det: T::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &[T] {
        &self.gens[i]
    }

    /// Matrix `V` whose columns are the unit generators.
    pub fn matrix(&self) -> Mat<T> {
        Mat::from_columns(&self.gens).expect("validated generators")
    }

    pub fn gram(&self) -> &Mat<T> {
        &self.gram
    }

    pub fn abs_det(&self) -> T {
        self.abs_det
    }

    /// Pair couplings `v_i . v_j` for `i < j` in lexicographic order.
    pub fn alpha(&self) -> Vec<T> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.gram[(i, j)]);
            }
        }
        out
    }

    /// Unit diagonal, `-|v_i . v_j|` elsewhere.
    pub fn associated_matrix(&self) -> Mat<T> {
        let n = self.dim();
        let mut m = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m[(i, j)] = -self.gram[(i, j)].abs();
                }
            }
        }
        m
    }

    pub fn is_pd(&self) -> bool {
        is_positive_definite(&self.associated_matrix(), T::zero_tol())
            .expect("symmetric by construction")
    }

    /// True when generators more than one position apart are orthogonal.
    pub fn is_tridiagonal(&self, tol: T) -> bool {
        let n = self.dim();
        (0..n).all(|i| ((i + 2)..n).all(|j| self.gram[(i, j)].abs() <= tol))
    }

    /// Couplings `β_i = v_i . v_{i+1}`.
    pub fn beta(&self) -> Vec<T> {
        (1..self.dim()).map(|i| self.gram[(i - 1, i)]).collect()
    }

    /// Dual basis `w*_i` with `w*_i . w_i > 0` and `w*_i . w_j = 0` for
    /// `j != i`: the columns of `(V^{-1})^T`, left unnormalized.
    pub fn dual_generators(&self) -> Result<Vec<Vec<T>>> {
        let inv = inverse(&self.matrix())?;
        let n = self.dim();
        let mut duals: Vec<Vec<T>> = (0..n).map(|i| inv.row(i).to_vec()).collect();
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(1e4));
        for (i, d) in duals.iter_mut().enumerate() {
            if dot(d, &self.gens[i]) < T::zero() {
                *d = scaled(d, -T::one());
            }
            let self_dot = dot(d, &self.gens[i]);
            let scale = norm(d);
            for (j, g) in self.gens.iter().enumerate() {
                let v = dot(d, g) / scale;
                let ok = if i == j {
                    self_dot > T::zero()
                } else {
                    v.abs() <= tol
                };
                if !ok {
                    return Err(Error::RankDeficient {
                        abs_det: self.abs_det.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(duals)
    }

    /// Dual cone `{y : y . x >= 0 for all x in K}` with unit generators.
    pub fn dual(&self) -> Result<SimplicialCone<T>> {
        SimplicialCone::new(&self.dual_generators()?)
    }

    /// Classifies `x` by its coordinates `λ = V^{-1} x`; `tol` is relative
    /// to `|x|`.
    pub fn contains_point(&self, x: &[T], tol: T) -> Result<Membership> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let lambda = solve(&self.matrix(), x)?;
        Ok(classify_coords(&lambda, tol * norm(x)))
    }
}

/// Sign pattern of cone coordinates against an absolute threshold.
pub(crate) fn classify_coords<T: Scalar>(lambda: &[T], tol: T) -> Membership {
    if lambda.iter().any(|&l| l < -tol) {
        Membership::Outside
    } else if lambda.iter().any(|&l| l <= tol) {
        Membership::Boundary
    } else {
        Membership::Inside
    }
}

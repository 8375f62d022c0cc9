//! Prepared point classifier for general cones.

use super::triangulate::triangulate_indices;
use super::{Cone, Membership};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, orthonormal_basis, sub_scaled};
use crate::scalar::Scalar;

/// Facet description of a cone inside its linear span, built once from a
/// triangulation and then used to classify many points.
#[derive(Debug, Clone)]
pub struct ConeRegion<T> {
    dim: usize,
    span: Vec<Vec<T>>,
    normals: Vec<Vec<T>>,
}

impl<T: Scalar> ConeRegion<T> {
    pub fn new(c: &Cone<T>) -> Result<Self> {
        let span = orthonormal_basis(c.generators(), T::rank_tol());
        let coords: Vec<Vec<T>> = c
            .generators()
            .iter()
            .map(|g| span.iter().map(|q| dot(q, g)).collect())
            .collect();
        let t = triangulate_indices(&coords, span.len())?;
        let normals = t
            .facets
            .iter()
            .map(|f| {
                let mut v = vec![T::zero(); c.ambient_dim()];
                for (q, &nk) in span.iter().zip(&f.normal) {
                    for (vi, &qi) in v.iter_mut().zip(q) {
                        *vi = *vi + nk * qi;
                    }
                }
                v
            })
            .collect();
        Ok(Self {
            dim: c.ambient_dim(),
            span,
            normals,
        })
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span.len() == self.dim
    }

    /// Classifies `x`; `tol` is relative to `|x|`. Points of a
    /// lower-dimensional cone are never interior.
    pub fn classify(&self, x: &[T], tol: T) -> Result<Membership> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let full = self.is_full_dimensional();
        let nx = norm(x);
        if !(nx > T::tiny_norm()) {
            return Ok(if full && self.normals.is_empty() {
                Membership::Inside
            } else {
                Membership::Boundary
            });
        }
        if !full {
            let mut r = x.to_vec();
            for q in &self.span {
                let c = dot(q, &r);
                r = sub_scaled(&r, c, q);
            }
            if norm(&r) > tol * nx {
                return Ok(Membership::Outside);
            }
        }
        let worst = self
            .normals
            .iter()
            .map(|n| dot(n, x) / nx)
            .fold(T::neg_infinity(), T::max);
        Ok(if worst > tol {
            Membership::Outside
        } else if worst >= -tol || !full {
            Membership::Boundary
        } else {
            Membership::Inside
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(gens: &[&[f64]]) -> ConeRegion<f64> {
        ConeRegion::new(&Cone::from_generators(gens.iter().map(|g| g.to_vec()).collect()).unwrap())
            .unwrap()
    }

    #[test]
    fn orthant_classification() {
        let r = region(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(
            r.classify(&[1.0, 1.0, 1.0], 1e-9).unwrap(),
            Membership::Inside
        );
        assert_eq!(
            r.classify(&[1.0, -1.0, 0.0], 1e-9).unwrap(),
            Membership::Outside
        );
        assert_eq!(
            r.classify(&[1.0, 0.0, 1.0], 1e-9).unwrap(),
            Membership::Boundary
        );
    }

    #[test]
    fn whole_plane_and_half_plane() {
        let r = region(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert_eq!(r.classify(&[-0.3, -2.0], 1e-9).unwrap(), Membership::Inside);
        let r = region(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(r.classify(&[-0.3, 2.0], 1e-9).unwrap(), Membership::Inside);
        assert_eq!(
            r.classify(&[-0.3, -2.0], 1e-9).unwrap(),
            Membership::Outside
        );
        assert_eq!(
            r.classify(&[-5.0, 0.0], 1e-9).unwrap(),
            Membership::Boundary
        );
    }

    #[test]
    fn lower_dimensional_cone_has_no_interior() {
        let r = region(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(!r.is_full_dimensional());
        assert_eq!(
            r.classify(&[1.0, 1.0, 0.0], 1e-9).unwrap(),
            Membership::Boundary
        );
        assert_eq!(
            r.classify(&[1.0, 1.0, 0.1], 1e-9).unwrap(),
            Membership::Outside
        );
        assert_eq!(
            r.classify(&[-1.0, 1.0, 0.0], 1e-9).unwrap(),
            Membership::Outside
        );
    }
}

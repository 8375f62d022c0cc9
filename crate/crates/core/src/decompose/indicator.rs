//! Pointwise evaluation of a signed decomposition.

use super::Decomposition;
use crate::cone::{Cone, ConeRegion, Membership};
use crate::error::Result;
use crate::linalg::scaled;
use crate::scalar::Scalar;

/// `x ↦ Σ s_i [x ∈ C_i]` over every piece, lower-dimensional and
/// line-containing ones included, with piece regions prepared once.
#[derive(Debug, Clone)]
pub struct SignedIndicator<T> {
    pieces: Vec<(i8, ConeRegion<T>)>,
}

impl<T: Scalar> SignedIndicator<T> {
    pub fn new(d: &Decomposition<T>) -> Result<Self> {
        let pieces = d
            .pieces
            .iter()
            .map(|p| {
                let mut gens: Vec<Vec<T>> = p.generators().iter().map(|g| d.lift(g)).collect();
                for l in &d.lineality {
                    gens.push(l.clone());
                    gens.push(scaled(l, -T::one()));
                }
                Ok((p.sign, ConeRegion::new(&Cone::new(d.ambient_dim, gens)?)?))
            })
            .collect::<Result<_>>()?;
        Ok(Self { pieces })
    }

    /// Signed count at `x`, or `None` when `x` is within `tol` of some piece's
    /// boundary and the count is not meaningful.
    pub fn evaluate(&self, x: &[T], tol: T) -> Result<Option<i32>> {
        let mut total = 0i32;
        for (sign, region) in &self.pieces {
            match region.classify(x, tol)? {
                Membership::Inside => total += i32::from(*sign),
                Membership::Boundary => return Ok(None),
                Membership::Outside => {}
            }
        }
        Ok(Some(total))
    }
}

//! Decomposition of arbitrary cones: split off the lineality space,
//! triangulate the pointed part in its span, decompose every simplex
//! (nearly flat ones after splitting them along their thinnest direction).

use super::flat::{decompose_conditioned, MAX_SPLITS};
use super::{coords, Decomposition, Method};
use crate::cone::{lineality_split, triangulate_indices, Cone, SimplicialCone};
use crate::error::Result;
use crate::linalg::orthonormal_basis;
use crate::scalar::Scalar;

/// Decomposition used for measuring: simplices with a badly conditioned
/// decomposition are split first, so a simplex may be the parent of more
/// than the usual number of pieces.
pub fn decompose_any<T: Scalar>(c: &Cone<T>, method: Method) -> Result<Decomposition<T>> {
    decompose_with(c, method, MAX_SPLITS)
}

/// Plain decomposition: every simplex of the triangulation is decomposed
/// as it is.
pub fn decompose_unsplit<T: Scalar>(c: &Cone<T>, method: Method) -> Result<Decomposition<T>> {
    decompose_with(c, method, 0)
}

fn decompose_with<T: Scalar>(
    c: &Cone<T>,
    method: Method,
    max_splits: usize,
) -> Result<Decomposition<T>> {
    let n = c.ambient_dim();
    let split = lineality_split(c);
    let source = format!("cone with {} generators in R^{}", c.generators().len(), n);
    let Some(reduced) = split.reduced else {
        return Ok(Decomposition {
            pieces: Vec::new(),
            method,
            source,
            ambient_dim: n,
            lineality: split.lineality,
            basis: Some(Vec::new()),
            whole_subspace: true,
            simplices: 0,
            parents: Vec::new(),
            parent_of: Vec::new(),
        });
    };
    let basis = orthonormal_basis(reduced.generators(), T::rank_tol());
    let local: Vec<Vec<T>> = reduced
        .generators()
        .iter()
        .map(|g| coords(&basis, g))
        .collect();
    let t = triangulate_indices(&local, basis.len())?;
    let mut pieces = Vec::new();
    let mut parents = Vec::new();
    let mut parent_of = Vec::new();
    for simplex in &t.simplices {
        let gens: Vec<Vec<T>> = simplex.iter().map(|&i| local[i].clone()).collect();
        let k = SimplicialCone::new(&gens)?;
        for g in decompose_conditioned(&k, method, max_splits)? {
            parent_of.extend(std::iter::repeat_n(parents.len(), g.pieces.len()));
            pieces.extend(g.pieces);
            parents.push(g.parent);
        }
    }
    Ok(Decomposition {
        pieces,
        method,
        source,
        ambient_dim: n,
        lineality: split.lineality,
        basis: Some(basis),
        whole_subspace: false,
        simplices: t.simplices.len(),
        parents,
        parent_of,
    })
}

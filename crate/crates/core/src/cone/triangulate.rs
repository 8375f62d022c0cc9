//! Lineality splitting and placing triangulations.

use std::collections::BTreeMap;

use super::nnls::in_cone;
use super::{Cone, SimplicialCone};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, orthonormal_basis, rank, scaled, sub_scaled};
use crate::scalar::Scalar;

/// `C = C_reduced ⊕ L` with `L` the lineality space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinealitySplit<T> {
    /// Orthonormal basis of the lineality space (empty for pointed cones).
    pub lineality: Vec<Vec<T>>,
    /// Generators projected onto `L^⊥`; `None` when the cone is a subspace.
    pub reduced: Option<Cone<T>>,
}

impl<T: Scalar> LinealitySplit<T> {
    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }
}

/// Splits off the lineality space, spanned by the generators whose negatives
/// also lie in the cone.
pub fn lineality_split<T: Scalar>(c: &Cone<T>) -> LinealitySplit<T> {
    let gens = c.generators();
    let tol = T::rank_tol();
    let in_lineality: Vec<Vec<T>> = gens
        .iter()
        .filter(|g| {
            let neg: Vec<T> = g.iter().map(|&x| -x).collect();
            in_cone(gens, &neg, tol)
        })
        .cloned()
        .collect();
    let lineality = orthonormal_basis(&in_lineality, tol);
    if lineality.is_empty() {
        return LinealitySplit {
            lineality,
            reduced: Some(c.clone()),
        };
    }
    let projected: Vec<Vec<T>> = gens
        .iter()
        .filter_map(|g| {
            let mut r = g.clone();
            for q in &lineality {
                let d = dot(&r, q);
                r = sub_scaled(&r, d, q);
            }
            (norm(&r) > tol * norm(g)).then_some(r)
        })
        .collect();
    let reduced = if projected.is_empty() {
        None
    } else {
        Cone::new(c.ambient_dim(), projected).ok()
    };
    LinealitySplit { lineality, reduced }
}

/// Boundary facet of a triangulated cone.
#[derive(Debug, Clone)]
pub(crate) struct Facet<T> {
    pub vertices: Vec<usize>,
    /// Unit outward normal.
    pub normal: Vec<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct Triangulation<T> {
    /// Each simplex lists generator indices in increasing order.
    pub simplices: Vec<Vec<usize>>,
    pub facets: Vec<Facet<T>>,
}

fn outward_normal<T: Scalar>(gens: &[Vec<T>], facet: &[usize], opposite: usize) -> Option<Vec<T>> {
    let vecs: Vec<Vec<T>> = facet.iter().map(|&i| gens[i].clone()).collect();
    let basis = orthonormal_basis(&vecs, T::rank_tol());
    let mut r = gens[opposite].clone();
    for _pass in 0..2 {
        for b in &basis {
            let d = dot(&r, b);
            r = sub_scaled(&r, d, b);
        }
    }
    let nr = norm(&r);
    (nr > T::rank_tol() * norm(&gens[opposite])).then(|| scaled(&r, -T::one() / nr))
}

/// Placing triangulation of the full-dimensional cone spanned by `gens` in
/// `R^d`. Redundant generators are removed from the highest index down (so
/// the lowest index survives among duplicates); the first `d` independent
/// survivors form the initial simplex and the rest are placed in input order.
pub(crate) fn triangulate_indices<T: Scalar>(
    gens: &[Vec<T>],
    d: usize,
) -> Result<Triangulation<T>> {
    let tol = T::rank_tol();
    let r = rank(gens, tol);
    if r < d {
        return Err(Error::NotFullDim { rank: r, dim: d });
    }

    let mut kept: Vec<usize> = (0..gens.len()).collect();
    for i in (0..gens.len()).rev() {
        let others: Vec<Vec<T>> = kept
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| gens[j].clone())
            .collect();
        if in_cone(&others, &gens[i], tol) {
            kept.retain(|&j| j != i);
        }
    }

    let mut initial = Vec::with_capacity(d);
    let mut basis: Vec<Vec<T>> = Vec::new();
    for &i in &kept {
        let mut cand = basis.clone();
        cand.push(gens[i].clone());
        let b = orthonormal_basis(&cand, tol);
        if b.len() > basis.len() {
            basis = b;
            initial.push(i);
            if initial.len() == d {
                break;
            }
        }
    }
    if initial.len() < d {
        return Err(Error::NotFullDim {
            rank: initial.len(),
            dim: d,
        });
    }

    let mut simplices = vec![initial.clone()];
    let mut facets: Vec<Facet<T>> = Vec::with_capacity(d);
    for (pos, &opp) in initial.iter().enumerate() {
        let vertices: Vec<usize> = initial
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != pos)
            .map(|(_, &v)| v)
            .collect();
        let normal = outward_normal(gens, &vertices, opp).ok_or(Error::NotFullDim {
            rank: d - 1,
            dim: d,
        })?;
        facets.push(Facet { vertices, normal });
    }

    for &g in kept.iter().filter(|i| !initial.contains(i)) {
        let gn = norm(&gens[g]);
        let (visible, hidden): (Vec<Facet<T>>, Vec<Facet<T>>) = facets
            .into_iter()
            .partition(|f| dot(&f.normal, &gens[g]) > tol * gn);
        facets = hidden;
        if visible.is_empty() {
            // numerically inside the current cone
            continue;
        }
        let mut ridges: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        for f in &visible {
            let mut s = f.vertices.clone();
            s.push(g);
            s.sort_unstable();
            simplices.push(s);
            for (pos, &dropped) in f.vertices.iter().enumerate() {
                let ridge: Vec<usize> = f
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pos)
                    .map(|(_, &v)| v)
                    .collect();
                ridges
                    .entry(ridge)
                    .and_modify(|e| e.0 += 1)
                    .or_insert((1, dropped));
            }
        }
        for (ridge, (count, dropped)) in ridges {
            if count != 1 {
                continue;
            }
            let mut vertices = ridge;
            vertices.push(g);
            vertices.sort_unstable();
            if let Some(normal) = outward_normal(gens, &vertices, dropped) {
                facets.push(Facet { vertices, normal });
            }
        }
    }
    Ok(Triangulation { simplices, facets })
}

/// Triangulates a full-dimensional cone into simplicial cones with disjoint
/// interiors. Works for cones containing lines as well.
pub fn triangulate<T: Scalar>(c: &Cone<T>) -> Result<Vec<SimplicialCone<T>>> {
    let gens = c.generators();
    let t = triangulate_indices(gens, c.ambient_dim())?;
    t.simplices
        .iter()
        .map(|s| SimplicialCone::new(&s.iter().map(|&i| gens[i].clone()).collect::<Vec<_>>()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{ConeRegion, Membership};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn cone(gens: &[&[f64]]) -> Cone<f64> {
        Cone::from_generators(gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn simplicial_input_is_kept() {
        let c = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let t = triangulate(&c).unwrap();
        assert_eq!(t, vec![SimplicialCone::orthant(3)]);
    }

    #[test]
    fn upper_half_plane_splits_in_two() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]]);
        let t = triangulate(&c).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].generators(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(t[1].generators(), &[vec![0.0, 1.0], vec![-1.0, 0.0]]);
    }

    #[test]
    fn square_cone_has_two_pieces() {
        let s = 1.0 / 3f64.sqrt();
        let c = cone(&[&[s, s, s], &[-s, s, s], &[-s, -s, s], &[s, -s, s]]);
        assert_eq!(triangulate(&c).unwrap().len(), 2);
    }

    #[test]
    fn redundant_generators_are_removed() {
        let c = cone(&[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let t = triangulate(&c).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].generators(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn lower_dimensional_input_is_rejected() {
        let c = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(matches!(
            triangulate(&c),
            Err(Error::NotFullDim { rank: 2, dim: 3 })
        ));
    }

    #[test]
    fn lineality_examples() {
        let s = lineality_split(&cone(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(s.lineality.len(), 1);
        assert!((s.lineality[0][0].abs() - 1.0).abs() < 1e-12);
        let red = s.reduced.unwrap();
        assert_eq!(red.generators().len(), 1);
        assert!((red.generators()[0][1] - 1.0).abs() < 1e-12);

        let orth = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let s = lineality_split(&orth);
        assert!(s.is_pointed());
        assert_eq!(s.reduced.unwrap(), orth);

        let s = lineality_split(&cone(&[
            &[1.0, 0.0],
            &[-1.0, 0.0],
            &[0.0, 1.0],
            &[0.0, -1.0],
        ]));
        assert_eq!(s.lineality.len(), 2);
        assert!(s.reduced.is_none());
    }

    fn random_cone(n: usize, k: usize, seed: u64) -> Cone<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = (0..k)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        Cone::new(n, gens).unwrap()
    }

    #[test]
    fn pieces_tile_the_cone() {
        for seed in 0..100u64 {
            let n = 2 + (seed as usize % 4);
            let k = n + (seed as usize % (n + 1));
            let c = random_cone(n, k, seed);
            if c.rank() < n {
                continue;
            }
            let pieces = triangulate(&c).unwrap();
            let region = ConeRegion::new(&c).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let mut tested = 0;
            while tested < 1000 {
                let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let whole = region.classify(&x, 1e-7).unwrap();
                let parts: Vec<Membership> = pieces
                    .iter()
                    .map(|p| p.contains_point(&x, 1e-7).unwrap())
                    .collect();
                if whole == Membership::Boundary || parts.contains(&Membership::Boundary) {
                    continue;
                }
                tested += 1;
                let hits = parts.iter().filter(|&&m| m == Membership::Inside).count();
                assert_eq!(
                    hits,
                    usize::from(whole == Membership::Inside),
                    "seed {seed}, x {x:?}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn lineality_vectors_are_two_sided(
            gens in proptest::collection::vec(proptest::collection::vec(-2i32..3, 3), 1..7)
        ) {
            let gens: Vec<Vec<f64>> = gens.into_iter().map(|g| g.into_iter().map(f64::from).collect()).collect();
            let Ok(c) = Cone::new(3, gens) else { return Ok(()) };
            let split = lineality_split(&c);
            let region = ConeRegion::new(&c).unwrap();
            for b in &split.lineality {
                let neg: Vec<f64> = b.iter().map(|x| -x).collect();
                prop_assert_ne!(region.classify(b, 1e-9).unwrap(), Membership::Outside);
                prop_assert_ne!(region.classify(&neg, 1e-9).unwrap(), Membership::Outside);
            }
        }
    }
}

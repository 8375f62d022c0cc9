//! Splitting nearly flat simplicial cones.
//!
//! For any nonzero `x = Σ λ_i v_i`,
//! `[c(V)] = Σ_{λ_i ≠ 0} sign(λ_i) [c(v_1, ..., x, ..., v_n)]` modulo lower
//! dimensional cones, with `x` in slot `i`. Taking `x` across the direction in
//! which the cone is thinnest turns one flat cone into cones that are not,
//! which the series converge on much faster.

use super::{conditioning, decompose_simplicial, Method, SignedCone};
use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{normalized, scaled, smallest_eigenvalue_dense, solve};
use crate::scalar::Scalar;

/// Gram eigenvalue below which a split is attempted.
const FLAT: f64 = 0.05;
pub(crate) const MAX_SPLITS: usize = 3;
const INVERSE_ITERATIONS: usize = 40;
/// Fractions of the largest coefficient below which a generator is left out
/// of the split.
const CUTOFFS: [f64; 3] = [0.0, 0.2, 0.5];

type Parts<T> = Vec<(i8, SimplicialCone<T>)>;

/// Right singular vector of `V` for its smallest singular value, by inverse
/// iteration on the Gram matrix.
fn thinnest_combination<T: Scalar>(k: &SimplicialCone<T>) -> Result<Vec<T>> {
    let g = k.gram();
    let n = k.dim();
    let mut u: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.1 * i as f64)).collect();
    for _ in 0..INVERSE_ITERATIONS {
        let z = solve(g, &u)?;
        u = normalized(&z).unwrap_or(z);
    }
    Ok(u)
}

/// The signed cones `sign(λ_i) c(v_1, ..., x, ..., v_n)` for `x = Σ λ_i v_i`
/// across the thin direction of the cone. Coefficients below a cutoff are
/// set to zero first, so that a near dependence among a few generators is
/// split without dragging the rest along; terms with `λ_i = 0` are lower
/// dimensional. Of the cutoffs tried, the one whose worst part has the
/// largest Gram eigenvalue wins.
pub fn thin_split<T: Scalar>(k: &SimplicialCone<T>) -> Result<Parts<T>> {
    let u = thinnest_combination(k)?;
    let mut best: Option<(T, Parts<T>)> = None;
    for cutoff in CUTOFFS {
        let Some(parts) = split_with(k, &u, T::lit(cutoff)) else {
            continue;
        };
        let worst = parts
            .iter()
            .map(|(_, p)| smallest_eigenvalue_dense(p.gram(), T::lit(1e-12)).unwrap_or(T::zero()))
            .fold(T::infinity(), T::min);
        if best.as_ref().is_none_or(|(w, _)| worst > *w) {
            best = Some((worst, parts));
        }
    }
    best.map(|(_, parts)| parts)
        .ok_or(Error::RankDeficient { abs_det: 0.0 })
}

fn split_with<T: Scalar>(k: &SimplicialCone<T>, u: &[T], cutoff: T) -> Option<Parts<T>> {
    let top = u.iter().fold(T::zero(), |m, l| m.max(l.abs()));
    let floor = (cutoff * top).max(T::zero_tol() * top);
    let mut lambda: Vec<T> = u
        .iter()
        .map(|&l| if l.abs() <= floor { T::zero() } else { l })
        .collect();
    // of x and -x, take the one with more positive coordinates
    let positive = lambda.iter().filter(|l| **l > T::zero()).count();
    let negative = lambda.iter().filter(|l| **l < T::zero()).count();
    if negative > positive {
        lambda = scaled(&lambda, -T::one());
    }
    let mut x = vec![T::zero(); k.dim()];
    for (v, &l) in k.generators().iter().zip(&lambda) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = *xi + l * *vi;
        }
    }
    let x = normalized(&x)?;
    let mut out = Vec::new();
    for (i, &l) in lambda.iter().enumerate() {
        if l == T::zero() {
            continue;
        }
        let mut gens = k.generators().to_vec();
        gens[i] = x.clone();
        out.push((
            if l > T::zero() { 1 } else { -1 },
            SimplicialCone::new(&gens).ok()?,
        ));
    }
    Some(out)
}

/// Pieces of one simplicial cone handed to the decomposition, signs
/// already folded in.
pub(crate) struct Group<T> {
    pub parent: SimplicialCone<T>,
    pub pieces: Vec<SignedCone<T>>,
}

/// Decomposes `k`, first splitting it across its thinnest direction (up
/// to `max_splits` times) when that leaves better conditioned pieces.
pub(crate) fn decompose_conditioned<T: Scalar>(
    k: &SimplicialCone<T>,
    method: Method,
    max_splits: usize,
) -> Result<Vec<Group<T>>> {
    conditioned(k, method, max_splits)
}

fn worst<T: Scalar>(groups: &[Group<T>]) -> T {
    groups
        .iter()
        .map(|g| conditioning(&g.pieces))
        .fold(T::infinity(), T::min)
}

fn conditioned<T: Scalar>(
    k: &SimplicialCone<T>,
    method: Method,
    splits_left: usize,
) -> Result<Vec<Group<T>>> {
    let direct = vec![Group {
        parent: k.clone(),
        pieces: decompose_simplicial(k, method)?,
    }];
    let flat = T::lit(FLAT);
    if method == Method::Triangulation || splits_left == 0 || worst(&direct) >= flat {
        return Ok(direct);
    }
    let Ok(parts) = thin_split(k) else {
        return Ok(direct);
    };
    let mut split = Vec::new();
    for (sign, part) in parts {
        for mut g in conditioned(&part, method, splits_left - 1)? {
            for p in &mut g.pieces {
                p.sign *= sign;
            }
            split.push(g);
        }
    }
    Ok(if worst(&split) > worst(&direct) {
        split
    } else {
        direct
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{make_simplicial, Membership};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gram_min(k: &SimplicialCone<f64>) -> f64 {
        crate::linalg::smallest_eigenvalue_dense(k.gram(), 1e-12).unwrap()
    }

    fn flat_cone(rng: &mut ChaCha8Rng, n: usize, thickness: f64) -> SimplicialCone<f64> {
        let gens: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                g[n - 1] *= thickness;
                g
            })
            .collect();
        make_simplicial(&gens).unwrap()
    }

    #[test]
    fn split_reproduces_the_indicator() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=5 {
            for _ in 0..10 {
                let k = flat_cone(&mut rng, n, 0.01);
                let parts = thin_split(&k).unwrap();
                let mut checked = 0;
                for _ in 0..2000 {
                    let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                    let truth = match k.contains_point(&x, 1e-9).unwrap() {
                        Membership::Boundary => continue,
                        m => i32::from(m == Membership::Inside),
                    };
                    let mut sum = 0;
                    let mut boundary = false;
                    for (s, p) in &parts {
                        match p.contains_point(&x, 1e-9).unwrap() {
                            Membership::Inside => sum += i32::from(*s),
                            Membership::Boundary => boundary = true,
                            Membership::Outside => {}
                        }
                    }
                    if !boundary {
                        assert_eq!(sum, truth);
                        checked += 1;
                    }
                }
                assert!(checked > 1500);
            }
        }
    }

    #[test]
    fn split_pieces_are_better_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in 3..=5 {
            let k = flat_cone(&mut rng, n, 0.001);
            let before = gram_min(&k);
            for (_, p) in thin_split(&k).unwrap() {
                assert!(gram_min(&p) > 10.0 * before);
            }
        }
    }
}

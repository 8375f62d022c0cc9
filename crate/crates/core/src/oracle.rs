//! Independent references: closed forms in dimensions 2 and 3, Gaussian Monte
//! Carlo in any dimension, and the product law for orthogonal sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cone::{Cone, ConeRegion, Membership, SimplicialCone};
use crate::error::{Error, Result};
use crate::linalg::{dot, normalized};
use crate::scalar::Scalar;

/// Plane angle over `2π`.
pub fn measure_dim2<T: Scalar>(k: &SimplicialCone<T>) -> Result<T> {
    if k.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: k.dim(),
        });
    }
    let c = k.gram()[(0, 1)].max(-T::one()).min(T::one());
    Ok(c.acos() / (T::lit(2.0) * T::PI()))
}

/// Euler-Lagrange formula for the spherical triangle, with `atan2` so that
/// wide cones (non-positive denominator) land on the right branch.
pub fn measure_dim3<T: Scalar>(k: &SimplicialCone<T>) -> Result<T> {
    if k.dim() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: k.dim(),
        });
    }
    let w = k.generators();
    let (a, b, c) = (&w[0], &w[1], &w[2]);
    let triple = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]);
    let den = T::one() + dot(b, c) + dot(a, b) + dot(a, c);
    let e = T::lit(2.0) * triple.abs().atan2(den);
    Ok(e / (T::lit(4.0) * T::PI()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Samples per independent stream.
    pub batch: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            batch: 65_536,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Hit fraction of standard Gaussian samples, boundary hits counting one
/// half. Batch `i` draws from stream `i` of a ChaCha generator keyed by the
/// seed, and hits are summed as integers, so the result does not depend on
/// scheduling.
pub fn mc_estimate<T: Scalar>(c: &Cone<T>, cfg: &McConfig) -> Result<McEstimate> {
    if cfg.samples == 0 || cfg.batch == 0 {
        return Err(Error::InvalidArgument(
            "samples and batch must be positive".into(),
        ));
    }
    let region = ConeRegion::new(c)?;
    let n = c.ambient_dim();
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
    let batches = cfg.samples.div_ceil(cfg.batch);
    let half_hits = (0..batches)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let count = cfg.batch.min(cfg.samples - i * cfg.batch);
            let mut x = vec![T::zero(); n];
            let mut hits = 0u64;
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = T::lit(rng.sample::<f64, _>(StandardNormal));
                }
                hits += match region.classify(&x, tol)? {
                    Membership::Inside => 2,
                    Membership::Boundary => 1,
                    Membership::Outside => 0,
                };
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    let p = half_hits as f64 / (2.0 * cfg.samples as f64);
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / cfg.samples as f64).sqrt(),
        samples: cfg.samples,
    })
}

const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Measure of an orthogonal sum: the product of the parts' measures, after
/// checking that generators of different parts are orthogonal.
pub fn orthogonal_product_measure<T: Scalar>(parts: &[(Cone<T>, T)]) -> Result<T> {
    let units: Vec<Vec<Vec<T>>> = parts
        .iter()
        .map(|(c, _)| {
            c.generators()
                .iter()
                .filter_map(|g| normalized(g))
                .collect()
        })
        .collect();
    for (i, a) in units.iter().enumerate() {
        for b in &units[i + 1..] {
            for u in a {
                for v in b {
                    let overlap = dot(u, v).abs();
                    if overlap >= T::lit(ORTHOGONALITY_TOL) {
                        return Err(Error::NotOrthogonal {
                            overlap: overlap.to_f64_lossy(),
                        });
                    }
                }
            }
        }
    }
    Ok(parts
        .iter()
        .map(|(_, m)| *m)
        .fold(T::one(), |acc, m| acc * m))
}

//! Normalized solid angle measure of polyhedral cones.
//!
//! A cone is split off its lineality space, triangulated, and every simplicial
//! piece is rewritten as a signed sum of simplicial cones whose associated
//! matrices are positive definite. Those pieces are evaluated with a
//! convergent multivariate hypergeometric series; the tridiagonal variant
//! needs only `n - 1` series variables.

// `!(x > tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cone;
pub mod decompose;
pub mod error;
pub mod gamma;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod scalar;
pub mod series;

pub use cone::{
    lineality_split, make_simplicial, triangulate, Cone, ConeRegion, LinealitySplit, Membership,
    SimplicialCone,
};
pub use decompose::{
    decomp1, decomp2, decompose_any, decompose_unsplit, ConeForm, Decomposition, Method, SignedCone,
};
pub use error::{Error, Result};
pub use linalg::{Mat, SymTridiag};
pub use measure::{measure, measure_simplicial, MeasureMethod, MeasureOptions, MeasureResult};
pub use oracle::{
    mc_estimate, measure_dim2, measure_dim3, orthogonal_product_measure, McConfig, McEstimate,
};
pub use scalar::Scalar;
pub use series::{t_alpha, t_beta, ErrorModel, SeriesValue, TruncationSpec};

pub type Cone64 = Cone<f64>;
pub type Cone32 = Cone<f32>;
pub type SimplicialCone64 = SimplicialCone<f64>;
pub type SimplicialCone32 = SimplicialCone<f32>;
pub type Mat64 = Mat<f64>;
pub type Mat32 = Mat<f32>;
pub type MeasureResult64 = MeasureResult<f64>;
pub type MeasureResult32 = MeasureResult<f32>;

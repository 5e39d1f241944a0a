//! Numerical differential geometry on coordinate charts: curvature tensors,
//! extrinsic boundary and corner operators, regularized volume expansions,
//! and executable verifications of the corner Gauss-Bonnet identity for
//! renormalized volume and its first variation, on closed-form model
//! geometries.

pub mod corner;
pub mod curv;
pub mod error;
pub mod exec;
pub mod fields;
pub mod gb;
pub mod jet;
pub mod identities;
pub mod jacobi;
pub mod kernel;
pub mod linalg;
pub mod metric;
pub mod models;
pub mod quad;
pub mod report;
pub mod sampling;
pub mod series;
pub mod shape;
pub mod surface;
pub mod variation;

pub use error::{Error, Result};

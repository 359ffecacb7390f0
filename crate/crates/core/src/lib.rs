//! Numerical differential geometry for a curvature-ensemble model of
//! topological particles.
//!
//! The crate computes curvature tensors of a catalog of 4-metrics
//! (Schwarzschild exteriors, wormhole handles, rotating handles), integrates
//! quadratic curvature actions `I = ∫ R² dV` with tensor-product
//! Gauss-Legendre rules, estimates partition-function scaling exponents of
//! the metric-perturbation ensemble by seeded Monte Carlo, and carries the
//! analytic machinery of the mass model (exterior profile, exponent system,
//! Ξ minimization) and the discrete variational mechanics that yields
//! energy conservation.
//!
//! All operations are pure functions of immutable inputs and are safe to
//! call concurrently. Monte Carlo paths are deterministic for a fixed seed
//! and sample count, independent of thread count.

// Index loops mirror the tensor contractions they implement; published
// rational-approximation constants are kept verbatim.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::excessive_precision)]

pub mod catalog;
pub mod curvature;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod mass;
pub mod metric;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod verify;
pub mod xi;

pub use catalog::CatalogEntry;
pub use curvature::{Cell, CurvatureBundle, Perturbation};
pub use error::{Error, Result};
pub use linalg::Sym4;
pub use metric::{DerivativeMode, MetricField, MetricValue, Signature};
pub use quadrature::{ActionResult, Normalization, QuadratureSpec, VolumeMode};
pub use xi::XiExpansion;

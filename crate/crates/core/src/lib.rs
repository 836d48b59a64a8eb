//! Covering and polarization quantities for antipodal point configurations
//! on the unit sphere S^{d-1}.
//!
//! The central objects are antipodal 2d-point configurations {±y_1, ..., ±y_d}.
//! For those in general position the boundary of the convex hull splits into
//! 2^d simplices indexed by sign vectors, which makes the covering measure
//! η = min_x max_i x·x_i computable exactly as the smallest facet offset.
//! The crate verifies numerically that the regular cross-polytope attains
//! the extremal values η = 1/sqrt(d) and P^g = d(g(1/sqrt(d)) + g(-1/sqrt(d)))
//! and that both bounds hold for every antipodal configuration.
//!
//! Modules:
//! - [`geom`]: unit vectors, antipodal configurations, generators.
//! - [`hull`]: exact facet enumeration via sign-orbit linear solves.
//! - [`covering`]: η and the mesh norm, exact and sampled paths.
//! - [`solid_angle`]: spherical measures of simplicial cones; cap-simplex optimizer.
//! - [`polarization`]: potentials, polarization values, Hermite quadratic bound.
//! - [`search`]: optimization over configurations reproducing the extremal cases.
//! - [`io`]: point-set text format.

pub mod covering;
pub mod error;
pub mod geom;
pub mod hull;
pub mod io;
pub mod polarization;
pub mod search;
pub mod solid_angle;

pub use error::{CrossError, Result};
pub use geom::{AntipodalConfig, GenericConfig, UnitVector};

//! Exact computation with bounded analytic functions on the open unit disk
//! of a nonarchimedean field.
//!
//! The coefficient field is modelled by truncated generalized power series
//! in an indeterminate `t` with rational exponents and rational coefficients,
//! with absolute value `|x| = 2^(-v(x))` where `v` is the least exponent.
//! Its value group `2^Q` is dense in the positive reals and every magnitude
//! is carried as an exact rational exponent.
//!
//! Modules:
//!
//! - [`valfield`]: field elements ([`Scalar`]) and magnitudes ([`Mag`]).
//! - [`magsum`]: exact sign decisions for sums of magnitudes.
//! - [`series`]: power series, Gauss norms, Newton polygons, disk
//!   sup-norms and the local zero factor `xi`.
//! - [`prescribe`]: interpolation and the staged construction of series with
//!   a single simple zero in each of a family of prescribed disks.
//! - [`semlab`]: finite-stage tables for the disk seminorm families.
//! - [`json`]: the exact JSON wire formats.

pub mod error;
pub mod json;
pub mod magsum;
pub mod prescribe;
pub mod rational;
pub mod semlab;
pub mod series;
pub mod valfield;

pub use error::{Error, Result};
pub use rational::Q;
pub use series::{NewtonData, PowerSeries, Recentered, Region, ZeroProfile};
pub use valfield::{Mag, Scalar};

//! Attitude estimation on SO(3) with matrix Fisher beliefs.
//!
//! The crate provides rotation primitives, matrix Fisher distributions,
//! one-dimensional fusion on geodesic subsets, filters driven by gyro and
//! direction measurements, the single-axis stability certificate and a
//! Monte-Carlo harness that writes CSV summaries.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod filters;
pub mod harness;
pub mod mechanism;
pub mod uniaxial;
pub mod mfd;
pub mod so3;

pub use error::{Error, Result};

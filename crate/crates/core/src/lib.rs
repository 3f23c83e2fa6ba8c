//! Weighted Reilly-type integral identities on manifolds with density,
//! discretised on coordinate charts, with spectral solvers, inequality audits
//! and hypersurface geometry.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod calculus;
pub mod audits;
pub mod boundary;
pub mod chart;
pub mod cli;
pub mod error;
pub mod hypersurface;
pub mod integrate;
pub mod reilly;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};

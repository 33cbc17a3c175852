//! Dynamic mirror descent (DMD) and dynamic fixed share (DFS) for online
//! convex optimization when the target moves according to a known or
//! candidate dynamical model.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dfs;
pub mod dmd;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry;
pub mod losses;
pub mod point;
pub mod regret;

pub use error::{Error, Result};
pub use exec::Execution;
pub use point::{ParameterPoint, Shape};

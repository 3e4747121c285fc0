//! Topological pressure of subsets for non-autonomous dynamical systems on
//! finite metric spaces.
//!
//! Every quantity is computed exactly over a finite space: dynamical balls,
//! cover sums and their critical exponents, fractional (weighted) covers
//! through a packing LP, pointwise measure pressure, Frostman-type measures
//! and the covering lemmas used to compare them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod cli;
pub mod config;
pub mod cover;
pub mod covering;
pub mod error;
pub mod family;
pub mod frostman;
pub mod instances;
pub mod logsum;
pub mod lp;
pub mod measure;
pub mod opencover;
pub mod output;
pub mod pointset;
pub mod pressure;
pub mod setcover;
pub mod space;
pub mod varprin;
pub mod weighted;

pub use error::{Error, Result};
pub use pointset::{PointSet, TargetSet};
pub use space::{FiniteSpace, NdsModel, Potential, System};

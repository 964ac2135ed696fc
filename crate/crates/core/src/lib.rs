//! Covering radii of randomly distributed points on manifolds and measures.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`spaces`]: the catalog of metric-measure spaces, their dimensions,
//!   Hausdorff masses, regularity witnesses and sharp limit constants.
//! * [`sampler`]: reproducible i.i.d. sampling from each normalized measure.
//! * [`nets`]: probe nets with certified mesh bounds, greedy separated nets
//!   and an exact grid nearest-neighbor index.
//! * [`covering`]: exact one-dimensional covering radii, certified sandwich
//!   bounds elsewhere, ball measures and ε-net verdicts.
//! * [`auxfn`]: the occupancy probability `f(N, n, m)`, its lower bound and
//!   the scaling regimes under which it tends to one.
//! * [`experiments`]: Monte Carlo study orchestration and CSV output.

// `!(x > 0.0)` style checks deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auxfn;
pub mod covering;
pub mod error;
pub mod experiments;
pub mod nets;
pub mod point;
pub mod sampler;
pub mod spaces;

pub use error::{Error, Result};
pub use point::{Point, PointSet};
pub use spaces::DomainModel;

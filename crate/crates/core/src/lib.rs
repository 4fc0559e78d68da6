//! Heavy-tailed productivity distributions across aggregation levels.
//!
//! * [`gb2`]: the GB2 distribution and its Pareto tail.
//! * [`fit`]: GB2 maximum likelihood, Hill tail index, outlier cuts.
//! * [`equilibrium`]: Boltzmann allocation of workers over firm productivities
//!   and the demand–temperature relation.
//! * [`superstat`]: averaging over fluctuating demand and the Pareto-index
//!   transfer between aggregation levels.
//! * [`pipeline`]: CSV ingestion, aggregation, per-year analysis, synthetic
//!   panels and rank-size output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod fit;
pub mod gb2;
pub mod optim;
pub mod pipeline;
pub mod quad;
pub mod record;
pub mod special;
pub mod superstat;

pub use error::{Error, Result};
pub use gb2::{Gb2Params, LogNormalApprox};
pub use record::ProductivityRecord;

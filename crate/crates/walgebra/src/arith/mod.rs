//! Exact arithmetic kernel: rationals, the multivariate parameter field,
//! truncated Laurent series, and factored one-variable rational functions.

pub mod mpoly;
pub mod param;
pub mod ratfn;
pub mod series;

pub use mpoly::{rat_int, Exps, MPoly, Rat, NVARS};
pub use param::{Mono, ParamElem};
pub use ratfn::{ratfn_reconstruct, reconstruct_from_log, FactoredRat, RatFn, Region, WPoly, RECONSTRUCT_GUARD};
pub use series::{LSeries, LogSeries, ORDER_EXACT};

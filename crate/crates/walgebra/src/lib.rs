//! Exact symbolic verification workbench for deformed W-algebra currents.
//!
//! The crate constructs the dressed free-field currents of two families of
//! deformed W-algebras over generic parameter fields, computes all their
//! normal-ordering contractions in exact arithmetic, and machine-checks the
//! closed-form identities they satisfy: the normal-ordering lemma, fusion,
//! duality, vanishing, and the closed sets of quadratic relations. A
//! truncated-Fock-module oracle provides an independent brute-force check.

pub mod arith;
pub mod current;
pub mod error;
pub mod fock;
pub mod report;
pub mod structfn;
pub mod vertex;

pub use arith::{LSeries, MPoly, Mono, ParamElem, Rat, RatFn, Region};
pub use error::WError;
pub use structfn::{AlgebraSpec, XPow};

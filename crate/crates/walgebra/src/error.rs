//! Error type shared across the workbench.

use thiserror::Error;

#[derive(Error, Debug, Clone)]
pub enum WError {
    #[error("no rational reconstruction: {detail}")]
    NoReconstruction { detail: String },

    #[error("repeated pole in partial fraction decomposition")]
    RepeatedPole,

    #[error("evaluation at a pole")]
    EvalAtPole,

    #[error("higher-order pole at fusion point for monomial {monomial}")]
    HigherOrderPole { monomial: String },

    #[error("contraction table entry ({i}, {j}) does not match the closed form: got {got}, expected {expected}")]
    LemmaMismatch {
        i: String,
        j: String,
        got: String,
        expected: String,
    },

    #[error("degenerate dressing: 1 - mu^(-r) vanishes identically")]
    DegenerateDressing,

    #[error("exponent {0} is not resolvable in the active symbol basis")]
    UnresolvableExponent(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

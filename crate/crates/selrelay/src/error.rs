//! Crate-wide error type.

use thiserror::Error;

/// Errors from analysis, sampling, and integration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside a routine's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Binomial coefficients are computed in exact integer arithmetic only
    /// up to n = 64; larger n is refused rather than silently rounded.
    #[error("binomial coefficient cap exceeded: n = {n} > 64 cannot be represented exactly")]
    BinomialCap { n: u64 },

    /// Alternating binomial sums lose roughly `N_R log2(N_R)` bits to
    /// cancellation; beyond 30 relays the closed forms are refused.
    /// Quadrature over the product-form density remains available.
    #[error(
        "refusing n_relays = {n_relays}: closed-form alternating sums are numerically \
         unstable beyond N_R = 30; integrate the product-form density instead"
    )]
    RelayCap { n_relays: u32 },

    /// A series or continued fraction hit its iteration cap.
    #[error("{what} did not converge within the iteration budget")]
    IterationLimit { what: &'static str },

    /// Adaptive quadrature exhausted its subdivision budget. Carries the
    /// partial value and the tolerance actually achieved.
    #[error(
        "quadrature did not converge: partial value {value:e}, achieved relative error \
         {achieved:e} (requested {requested:e})"
    )]
    NonConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

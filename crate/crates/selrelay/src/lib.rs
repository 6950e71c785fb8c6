//! Performance analysis of two-hop selection relaying in Rayleigh block fading.
//!
//! Three schemes are covered, all using max-min relay selection
//! (`γ₁ = max_r min(γ_{s,r}, γ_{r,d})`):
//!
//! - **SR** — selection relaying: the destination decodes from the best
//!   relay path only; effective SNR `γ₁`.
//! - **SCR** — selection cooperative relaying: the best relay path is
//!   maximal-ratio-combined with the direct path; effective SNR `γ₀ + γ₁`.
//! - **ASR** — all-path selection relaying: the destination picks the single
//!   best of the direct and relay paths; effective SNR `max(γ₀, γ₁)`.
//!
//! The crate provides, for each scheme, closed-form BER / outage / ergodic
//! capacity ([`analytic`]), the underlying densities and a reproducible
//! block-fading sampler ([`chanmodel`]), an adaptive-quadrature oracle that
//! validates every closed form from its defining integral ([`quadrature`]),
//! a seeded parallel Monte Carlo link simulator ([`montecarlo`]), and the
//! special functions the formulas need ([`specfun`]).
//!
//! All numeric routines are generic over the scalar type via [`Real`]
//! (`f32` or `f64`); the accuracy contracts in the documentation are stated
//! for `f64`. Concrete `f64` aliases for the main domain types live at the
//! crate root.

pub mod analytic;
pub mod chanmodel;
pub mod error;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type for all analysis routines: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn cast<T: Real>(x: f64) -> T {
    T::from(x).expect("f64 constant must be representable in the scalar type")
}

/// Double-precision network configuration.
pub type NetworkConfig64 = chanmodel::NetworkConfig<f64>;
/// Double-precision outage specification.
pub type OutageSpec64 = chanmodel::OutageSpec<f64>;
/// Double-precision block-fading realization.
pub type ChannelDraw64 = chanmodel::ChannelDraw<f64>;
/// Double-precision Monte Carlo estimate.
pub type MonteCarloResult64 = montecarlo::MonteCarloResult<f64>;

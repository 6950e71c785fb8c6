//! Closed-form BER, outage probability, and ergodic capacity for the SR and
//! SCR schemes, a numerically integrated ASR BER, and diversity-order slope
//! fitting.
//!
//! Every expression is an alternating binomial sum over the expanded
//! best-relay density, accumulated with compensated summation. Terms whose
//! `2iγ̄₀ − γ̄₁` denominator (the SCR cross-rate difference) nearly vanishes
//! are evaluated by their analytic limits; the BER sum is rearranged so the
//! denominator cancels algebraically and needs no guard at all.
//!
//! Capacity carries an explicit pre-log convention: the half-duplex two-hop
//! protocol motivates ½·log₂(1+β), while the printed closed forms integrate
//! log₂(1+β) itself. [`CapacityConvention`] makes the choice explicit and
//! `FULL` is exactly twice `HALF`.

use std::fmt;
use std::str::FromStr;

use crate::chanmodel::{NetworkConfig, OutageSpec, SINGULAR_REL_TOL};
use crate::quadrature::{self, DensityKind, IntegralSpec, Kernel};
use crate::specfun::{alternating_sum, binom, exp1_scaled, inc_beta_unit_half};
use crate::{cast, Error, Real, Result};

/// Pre-log factor applied to capacity results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CapacityConvention {
    /// ½·log₂(1+β): two-hop half-duplex accounting (the reporting default).
    Half,
    /// log₂(1+β): matches the printed closed-form sums.
    Full,
}

impl CapacityConvention {
    pub fn prelog<T: Real>(self) -> T {
        match self {
            CapacityConvention::Half => cast(0.5),
            CapacityConvention::Full => T::one(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CapacityConvention::Half => "half",
            CapacityConvention::Full => "full",
        }
    }
}

impl fmt::Display for CapacityConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CapacityConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "half" => Ok(CapacityConvention::Half),
            "full" => Ok(CapacityConvention::Full),
            other => Err(Error::Domain(format!(
                "unknown capacity convention '{other}' (expected half|full)"
            ))),
        }
    }
}

/// Whether any term of the SCR sums at this configuration falls inside the
/// singular-denominator guard band `|2iγ̄₀ − γ̄₁| < 1e-9·γ̄₁`.
pub fn uses_singular_guard<T: Real>(cfg: &NetworkConfig<T>) -> bool {
    let guard = cast::<T>(SINGULAR_REL_TOL) * cfg.gbar1();
    (1..=cfg.n_relays() as u64).any(|i| {
        (cast::<T>(2.0 * i as f64) * cfg.gbar0() - cfg.gbar1()).abs() < guard
    })
}

#[inline]
fn signed<T: Real>(i: u64, magnitude: T) -> T {
    if i % 2 == 1 {
        magnitude
    } else {
        -magnitude
    }
}

#[inline]
fn binom_t<T: Real>(n: u64, i: u64) -> T {
    cast(binom(n, i).expect("n_relays <= 30 enforced by NetworkConfig") as f64)
}

// ---------------------------------------------------------------------------
// bit error rate
// ---------------------------------------------------------------------------

/// BPSK BER of selection cooperative relaying (MRC of best relay path and
/// direct path).
///
/// Equivalent to
/// `Σᵢ (−1)^(i−1) C(N_R,i) · i/(2(2iγ̄₀−γ̄₁)) · [γ̄₀·B_{z₀}[1,½] − (γ̄₁/2i)·B_{z₁}[1,½]]`
/// with `z₀ = 1/(γ̄₀+1)`, `z₁ = 2i/(γ̄₁+2i)`, but evaluated in a rationalized
/// form in which the `2iγ̄₀ − γ̄₁` denominator cancels exactly:
/// with `u = γ̄₀`, `v = γ̄₁/2i`, `D(s) = s+1+√(s(s+1))`,
///
/// `term_i = C(N_R,i) · (1 + uv/(u√(v(v+1)) + v√(u(u+1)))) / (2·D(u)·D(v))`.
///
/// This removes both the singular point and the bracket cancellation.
pub fn ber_scr<T: Real>(cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.require_direct_path()?;
    let n = cfg.n_relays() as u64;
    let u = cfg.gbar0();
    let du = u + T::one() + (u * (u + T::one())).sqrt();
    let terms = (1..=n).map(|i| {
        let v = cfg.gbar1() / cast::<T>(2.0 * i as f64);
        let dv = v + T::one() + (v * (v + T::one())).sqrt();
        let mixed = u * (v * (v + T::one())).sqrt() + v * (u * (u + T::one())).sqrt();
        let magnitude = binom_t::<T>(n, i) * (T::one() + u * v / mixed)
            / (cast::<T>(2.0) * du * dv);
        signed(i, magnitude)
    });
    Ok(alternating_sum(terms))
}

/// BPSK BER of selection relaying (best relay path only):
/// `¼ Σᵢ (−1)^(i−1) C(N_R,i) B_{z₁}[1,½]`, `z₁ = 2i/(γ̄₁+2i)`.
pub fn ber_sr<T: Real>(cfg: &NetworkConfig<T>) -> Result<T> {
    let n = cfg.n_relays() as u64;
    let gbar1 = cfg.gbar1();
    let mut failure = None;
    let terms = (1..=n).map(|i| {
        let two_i = cast::<T>(2.0 * i as f64);
        let z1 = two_i / (gbar1 + two_i);
        let beta = match inc_beta_unit_half(z1) {
            Ok(b) => b,
            Err(e) => {
                failure = Some(e);
                T::zero()
            }
        };
        signed(i, binom_t::<T>(n, i) * beta)
    });
    let sum = alternating_sum(terms) / cast(4.0);
    match failure {
        Some(e) => Err(e),
        None => Ok(sum),
    }
}

/// BPSK BER of all-path selection relaying, by adaptive quadrature of
/// ½·erfc(√x) against the density of max(γ₀, γ₁). No closed form is used;
/// the max-distribution density comes from the product-form CDFs.
pub fn ber_asr_numeric<T: Real>(cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.require_direct_path()?;
    let spec = IntegralSpec {
        kernel: Kernel::Ber,
        density: DensityKind::Max,
    };
    Ok(quadrature::integrate(&spec, cfg, 1e-10)?.value)
}

// ---------------------------------------------------------------------------
// outage probability
// ---------------------------------------------------------------------------

/// 1 − e⁻ˣ(1+x), the equal-rate outage term, with a series branch that
/// avoids cancellation for small x.
fn one_minus_exp_linear<T: Real>(x: T) -> T {
    if x < cast(0.1) {
        // Σ_{j≥2} (−1)^j (j−1)/j! · x^j = x²/2 − x³/3 + x⁴/8 − …
        let mut sum = T::zero();
        let mut power = x;
        let mut factorial = T::one();
        for j in 2..=30u32 {
            let jf = cast::<T>(j as f64);
            power = power * x; // x^j
            factorial = factorial * jf; // j!
            let term = power / factorial * (jf - T::one());
            sum = if j % 2 == 0 { sum + term } else { sum - term };
            if term.abs() <= T::epsilon() * sum.abs() {
                break;
            }
        }
        sum
    } else {
        T::one() - (-x).exp() * (T::one() + x)
    }
}

/// Outage probability of SCR at threshold a = 2^(2R) − 1:
/// `Σᵢ (−1)^(i−1) C(N_R,i) (1 + [γ̄₁e^(−2ia/γ̄₁) − 2iγ̄₀e^(−a/γ̄₀)]/(2iγ̄₀−γ̄₁))`.
///
/// Each term is rewritten through expm1 so the a → 0 limit is exact; when
/// both exponents are small the O(a) parts of the two expm1 expansions
/// cancel exactly, so the term switches to the series in which that
/// cancellation is performed algebraically. Near-singular terms use the
/// limit `1 − e^(−2ia/γ̄₁)(1 + 2ia/γ̄₁)`.
pub fn outage_scr<T: Real>(cfg: &NetworkConfig<T>, spec: &OutageSpec<T>) -> Result<T> {
    cfg.require_direct_path()?;
    let n = cfg.n_relays() as u64;
    let a = spec.threshold();
    let gbar0 = cfg.gbar0();
    let gbar1 = cfg.gbar1();
    let guard = cast::<T>(SINGULAR_REL_TOL) * gbar1;
    let terms = (1..=n).map(|i| {
        let two_i = cast::<T>(2.0 * i as f64);
        let delta = two_i * gbar0 - gbar1;
        let rate0 = gbar0.recip();
        let rate1 = two_i / gbar1;
        let magnitude = if delta.abs() < guard {
            one_minus_exp_linear(rate1 * a)
        } else if (rate0 * a).max(rate1 * a) < cast(0.1) {
            // numerator = Σ_{k≥2} (−1)^k 2i·aᵏ/k! · (rate1^(k−1) − rate0^(k−1))
            let mut sum = T::zero();
            let mut power = a; // aᵏ in the loop
            let mut factorial = T::one(); // k!
            let mut pow0 = T::one(); // rate0^(k−1)
            let mut pow1 = T::one();
            for k in 2..=26u32 {
                power = power * a;
                factorial = factorial * cast(k as f64);
                pow0 = pow0 * rate0;
                pow1 = pow1 * rate1;
                let term = two_i * power / factorial * (pow1 - pow0);
                sum = if k % 2 == 0 { sum + term } else { sum - term };
                if term.abs() <= T::epsilon() * sum.abs() {
                    break;
                }
            }
            sum / delta
        } else {
            // 1 + [γ̄₁e^(−2ia/γ̄₁) − 2iγ̄₀e^(−a/γ̄₀)]/δ
            //   = [γ̄₁·expm1(−2ia/γ̄₁) − 2iγ̄₀·expm1(−a/γ̄₀)]/δ
            (gbar1 * (-rate1 * a).exp_m1() - two_i * gbar0 * (-rate0 * a).exp_m1()) / delta
        };
        signed(i, binom_t::<T>(n, i) * magnitude)
    });
    Ok(alternating_sum(terms).max(T::zero()).min(T::one()))
}

/// Outage probability of SR:
/// `Σᵢ (−1)^(i−1) C(N_R,i)(1 − e^(−2ia/γ̄₁))`, identically the CDF of γ₁
/// at the threshold.
pub fn outage_sr<T: Real>(cfg: &NetworkConfig<T>, spec: &OutageSpec<T>) -> Result<T> {
    let n = cfg.n_relays() as u64;
    let a = spec.threshold();
    let gbar1 = cfg.gbar1();
    let terms = (1..=n).map(|i| {
        let two_i = cast::<T>(2.0 * i as f64);
        signed(i, binom_t::<T>(n, i) * -(-two_i * a / gbar1).exp_m1())
    });
    Ok(alternating_sum(terms).max(T::zero()).min(T::one()))
}

// ---------------------------------------------------------------------------
// ergodic capacity
// ---------------------------------------------------------------------------

/// Ergodic capacity of SCR in bits/s/Hz:
/// `prelog · Σᵢ (−1)^(i−1) C(N_R,i) [2iγ̄₀·e^(1/γ̄₀)E₁(1/γ̄₀) − γ̄₁·e^(2i/γ̄₁)E₁(2i/γ̄₁)] / ((2iγ̄₀−γ̄₁)·ln 2)`,
/// where `prelog` follows the convention. Near-singular terms use the limit
/// `[(1−p)eᵖE₁(p) + 1]/ln 2` with `p = 2i/γ̄₁`.
pub fn capacity_scr<T: Real>(cfg: &NetworkConfig<T>, conv: CapacityConvention) -> Result<T> {
    cfg.require_direct_path()?;
    let n = cfg.n_relays() as u64;
    let gbar0 = cfg.gbar0();
    let gbar1 = cfg.gbar1();
    let ln2 = cast::<T>(std::f64::consts::LN_2);
    let guard = cast::<T>(SINGULAR_REL_TOL) * gbar1;
    let scaled0 = exp1_scaled(gbar0.recip())?;
    let mut failure = None;
    let terms = (1..=n).map(|i| {
        let two_i = cast::<T>(2.0 * i as f64);
        let p = two_i / gbar1;
        let scaled1 = match exp1_scaled(p) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                T::zero()
            }
        };
        let delta = two_i * gbar0 - gbar1;
        let magnitude = if delta.abs() < guard {
            ((T::one() - p) * scaled1 + T::one()) / ln2
        } else {
            (two_i * gbar0 * scaled0 - gbar1 * scaled1) / (delta * ln2)
        };
        signed(i, binom_t::<T>(n, i) * magnitude)
    });
    let full = alternating_sum(terms);
    match failure {
        Some(e) => Err(e),
        None => Ok(conv.prelog::<T>() * full),
    }
}

/// Ergodic capacity of SR in bits/s/Hz:
/// `prelog · Σᵢ (−1)^(i−1) C(N_R,i) e^(2i/γ̄₁)E₁(2i/γ̄₁) / ln 2`.
pub fn capacity_sr<T: Real>(cfg: &NetworkConfig<T>, conv: CapacityConvention) -> Result<T> {
    let n = cfg.n_relays() as u64;
    let gbar1 = cfg.gbar1();
    let ln2 = cast::<T>(std::f64::consts::LN_2);
    let mut failure = None;
    let terms = (1..=n).map(|i| {
        let p = cast::<T>(2.0 * i as f64) / gbar1;
        let scaled = match exp1_scaled(p) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                T::zero()
            }
        };
        signed(i, binom_t::<T>(n, i) * scaled / ln2)
    });
    let full = alternating_sum(terms);
    match failure {
        Some(e) => Err(e),
        None => Ok(conv.prelog::<T>() * full),
    }
}

// ---------------------------------------------------------------------------
// diversity order
// ---------------------------------------------------------------------------

/// Default slope-fit window: the top decade of the curve.
pub const DEFAULT_SLOPE_WINDOW_DB: f64 = 10.0;

/// Diversity order from an error-rate curve: the least-squares slope of
/// log₁₀(value) against SNR in dB over the top [`DEFAULT_SLOPE_WINDOW_DB`],
/// returned as −10·slope.
pub fn diversity_order_estimate<T: Real>(curve: &[(T, T)]) -> Result<T> {
    diversity_order_estimate_window(curve, DEFAULT_SLOPE_WINDOW_DB)
}

/// [`diversity_order_estimate`] with an explicit fit window in dB, measured
/// back from the highest-SNR point.
pub fn diversity_order_estimate_window<T: Real>(curve: &[(T, T)], window_db: f64) -> Result<T> {
    if curve.len() < 2 {
        return Err(Error::Domain(
            "diversity order fit needs at least 2 points".into(),
        ));
    }
    if !(window_db > 0.0) {
        return Err(Error::Domain(format!(
            "fit window must be > 0 dB, got {window_db}"
        )));
    }
    for pair in curve.windows(2) {
        if !(pair[1].0 > pair[0].0) {
            return Err(Error::Domain(
                "curve SNRs must be strictly increasing".into(),
            ));
        }
    }
    if curve.iter().any(|&(_, v)| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::Domain(
            "curve values must be positive and finite".into(),
        ));
    }
    let top = curve.last().unwrap().0;
    let cutoff = top - cast(window_db);
    let points: Vec<(T, T)> = curve
        .iter()
        .filter(|&&(snr, _)| snr >= cutoff)
        .map(|&(snr, v)| (snr, v.log10()))
        .collect();
    if points.len() < 2 {
        return Err(Error::Domain(format!(
            "fewer than 2 curve points fall in the top {window_db} dB window"
        )));
    }
    let count = cast::<T>(points.len() as f64);
    let mean_x = points.iter().fold(T::zero(), |acc, &(x, _)| acc + x) / count;
    let mean_y = points.iter().fold(T::zero(), |acc, &(_, y)| acc + y) / count;
    let mut cov = T::zero();
    let mut var = T::zero();
    for &(x, y) in &points {
        cov = cov + (x - mean_x) * (y - mean_y);
        var = var + (x - mean_x) * (x - mean_x);
    }
    Ok(-cast::<T>(10.0) * cov / var)
}

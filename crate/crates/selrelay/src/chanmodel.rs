//! Domain types, analytic densities of the scheme random variables, and
//! reproducible sampling of block-fading realizations.
//!
//! Per-link instantaneous SNRs are exponential (Rayleigh fading): the direct
//! path γ₀ has mean γ̄₀, and every S-R / R-D hop has mean γ̄₁. The selected
//! relay maximizes the per-relay minimum hop SNR, so the best-relay SNR
//! γ₁ = max_r min(γ_{s,r}, γ_{r,d}) is the maximum of N_R i.i.d.
//! exponentials of mean γ̄₁/2.

use arrayvec::ArrayVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fmt;
use std::str::FromStr;

use crate::specfun::{alternating_sum, binom};
use crate::{cast, Error, Real, Result};

/// Hard cap on the relay count; beyond this the closed-form alternating
/// sums are numerically untrustworthy.
pub const MAX_RELAYS: u32 = 30;

/// Terms whose `2iγ̄₀ − γ̄₁` denominator is below this relative threshold
/// are evaluated by their analytic limit instead of the generic formula.
pub(crate) const SINGULAR_REL_TOL: f64 = 1e-9;

/// Relay count and mean link SNRs (linear power ratios).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig<T> {
    n_relays: u32,
    gbar0: T,
    gbar1: T,
}

impl<T: Real> NetworkConfig<T> {
    /// `gbar0` is the mean S-D SNR (may be 0 when no scheme in use reads the
    /// direct path), `gbar1` the mean SNR common to all S-R and R-D links.
    pub fn new(n_relays: u32, gbar0: T, gbar1: T) -> Result<Self> {
        if n_relays == 0 {
            return Err(Error::Domain("n_relays must be >= 1".into()));
        }
        if n_relays > MAX_RELAYS {
            return Err(Error::RelayCap { n_relays });
        }
        if !gbar0.is_finite() || gbar0 < T::zero() {
            return Err(Error::Domain(format!(
                "gbar0 must be finite and >= 0, got {gbar0}"
            )));
        }
        if !gbar1.is_finite() || !(gbar1 > T::zero()) {
            return Err(Error::Domain(format!(
                "gbar1 must be finite and > 0, got {gbar1}"
            )));
        }
        Ok(Self {
            n_relays,
            gbar0,
            gbar1,
        })
    }

    pub fn n_relays(&self) -> u32 {
        self.n_relays
    }

    /// Mean S-D SNR γ̄₀ (linear).
    pub fn gbar0(&self) -> T {
        self.gbar0
    }

    /// Mean S-R / R-D SNR γ̄₁ (linear).
    pub fn gbar1(&self) -> T {
        self.gbar1
    }

    pub(crate) fn require_direct_path(&self) -> Result<()> {
        if self.gbar0 > T::zero() {
            Ok(())
        } else {
            Err(Error::Domain(
                "scheme reads the direct path but gbar0 is 0".into(),
            ))
        }
    }
}

/// Relaying scheme at the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Selection relaying: best relay path only, direct path unusable.
    Sr,
    /// Selection cooperative relaying: best relay path MRC-combined with
    /// the direct path.
    Scr,
    /// All-path selection relaying: single best of direct and relay paths.
    Asr,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Sr, Scheme::Scr, Scheme::Asr];

    /// Whether the destination reads γ₀ at all (selection or combining).
    pub fn uses_direct_path(self) -> bool {
        !matches!(self, Scheme::Sr)
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Sr => "sr",
            Scheme::Scr => "scr",
            Scheme::Asr => "asr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sr" => Ok(Scheme::Sr),
            "scr" => Ok(Scheme::Scr),
            "asr" => Ok(Scheme::Asr),
            other => Err(Error::Domain(format!(
                "unknown scheme '{other}' (expected sr|scr|asr)"
            ))),
        }
    }
}

/// Target rate R (bits/s/Hz) and the derived SNR threshold a = 2^(2R) − 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSpec<T> {
    rate: T,
    threshold: T,
}

impl<T: Real> OutageSpec<T> {
    pub fn new(rate: T) -> Result<Self> {
        if !rate.is_finite() || rate < T::zero() {
            return Err(Error::Domain(format!(
                "rate must be finite and >= 0, got {rate}"
            )));
        }
        Ok(Self {
            rate,
            threshold: (rate + rate).exp2() - T::one(),
        })
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    /// Outage SNR threshold a = 2^(2R) − 1 (linear).
    pub fn threshold(&self) -> T {
        self.threshold
    }
}

/// One block-fading realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw<T> {
    /// Instantaneous S-D SNR γ₀.
    pub g0: T,
    /// Per-relay (γ_{s,r}, γ_{r,d}) pairs.
    pub hops: ArrayVec<(T, T), { MAX_RELAYS as usize }>,
    /// 0-based index of the selected relay.
    pub best_relay: usize,
    /// Selected effective relay-path SNR γ₁ = max_r min(γ_{s,r}, γ_{r,d}).
    pub g1: T,
}

/// Combined destination SNR β for some scheme.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectiveSnr<T>(T);

impl<T: Real> EffectiveSnr<T> {
    pub fn value(self) -> T {
        self.0
    }
}

// ---------------------------------------------------------------------------
// densities and distributions
// ---------------------------------------------------------------------------

/// PDF of γ₁ in product form:
/// `N_R (2/γ̄₁) e^(−2g/γ̄₁) (1 − e^(−2g/γ̄₁))^(N_R−1)`.
pub fn pdf_gamma1<T: Real>(g: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if !g.is_finite() || g < T::zero() {
        return Err(Error::Domain(format!("pdf_gamma1 requires g >= 0, got {g}")));
    }
    let rate = cast::<T>(2.0) / cfg.gbar1;
    let expo = (-rate * g).exp();
    let cdf_min = -(-rate * g).exp_m1();
    Ok(cast::<T>(cfg.n_relays as f64) * rate * expo * cdf_min.powi(cfg.n_relays as i32 - 1))
}

/// PDF of γ₁ after binomial expansion:
/// `Σᵢ (−1)^(i−1) C(N_R,i) (2i/γ̄₁) e^(−2ig/γ̄₁)`.
///
/// Same value as [`pdf_gamma1`] up to summation round-off; the closed-form
/// metrics integrate this representation term by term.
pub fn pdf_gamma1_expanded<T: Real>(g: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if !g.is_finite() || g < T::zero() {
        return Err(Error::Domain(format!(
            "pdf_gamma1_expanded requires g >= 0, got {g}"
        )));
    }
    let n = cfg.n_relays as u64;
    let terms = (1..=n).map(|i| {
        let sign = if i % 2 == 1 { T::one() } else { -T::one() };
        let c = cast::<T>(binom(n, i).expect("n <= 30") as f64);
        let rate = cast::<T>(2.0 * i as f64) / cfg.gbar1;
        sign * c * rate * (-rate * g).exp()
    });
    Ok(alternating_sum(terms).max(T::zero()))
}

/// CDF of γ₁: `(1 − e^(−2g/γ̄₁))^(N_R)`.
pub fn cdf_gamma1<T: Real>(g: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if !g.is_finite() || g < T::zero() {
        return Err(Error::Domain(format!("cdf_gamma1 requires g >= 0, got {g}")));
    }
    let cdf_min = -(-cast::<T>(2.0) * g / cfg.gbar1).exp_m1();
    Ok(cdf_min.powi(cfg.n_relays as i32))
}

/// PDF of β = γ₀ + γ₁ (the SCR combiner output), from the convolution of
/// the expanded γ₁ density with the exponential γ₀ density:
/// `Σᵢ (−1)^(i−1) C(N_R,i) (2i/(2iγ̄₀ − γ̄₁)) (e^(−b/γ̄₀) − e^(−2ib/γ̄₁))`.
///
/// Terms with `|2iγ̄₀ − γ̄₁|` below [`SINGULAR_REL_TOL`]·γ̄₁ are replaced by
/// their analytic limit `(2i/γ̄₁)² b e^(−2ib/γ̄₁)`, so exact inputs such as
/// γ̄₀ = γ̄₁/2 stay finite. Requires γ̄₀ > 0.
pub fn pdf_beta<T: Real>(b: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if !b.is_finite() || b < T::zero() {
        return Err(Error::Domain(format!("pdf_beta requires b >= 0, got {b}")));
    }
    cfg.require_direct_path()?;
    let n = cfg.n_relays as u64;
    let gbar0 = cfg.gbar0;
    let gbar1 = cfg.gbar1;
    let guard = cast::<T>(SINGULAR_REL_TOL) * gbar1;
    let terms = (1..=n).map(|i| {
        let sign = if i % 2 == 1 { T::one() } else { -T::one() };
        let c = cast::<T>(binom(n, i).expect("n <= 30") as f64);
        let two_i = cast::<T>(2.0 * i as f64);
        let delta = two_i * gbar0 - gbar1;
        if delta.abs() < guard {
            // equal-rate convolution limit of the bracketed difference
            let rate = two_i / gbar1;
            return sign * c * rate * rate * b * (-rate * b).exp();
        }
        // Factor out the slower-decaying exponential so expm1 never sees a
        // positive argument that could overflow.
        let rate_diff = delta / (gbar1 * gbar0); // 2i/γ̄₁ − 1/γ̄₀
        let diff = if rate_diff >= T::zero() {
            -(-b / gbar0).exp() * (-b * rate_diff).exp_m1()
        } else {
            (-two_i * b / gbar1).exp() * (b * rate_diff).exp_m1()
        };
        sign * c * two_i / (gbar1 * gbar0) * diff / rate_diff
    });
    // provably nonnegative; clamp summation round-off
    Ok(alternating_sum(terms).max(T::zero()))
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

/// Independent random stream derived from `(master_seed, stream_index)`.
///
/// Streams are reproducible regardless of scheduling: the same pair always
/// yields the same byte sequence.
pub fn stream_rng(master_seed: u64, stream_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_index);
    rng
}

/// Exponential draw by inversion, γ = −γ̄ ln U with U in (0, 1].
///
/// The uniform is always drawn in `f64` so RNG consumption does not depend
/// on the scalar type.
fn sample_exponential<T: Real, R: Rng + ?Sized>(rng: &mut R, mean: T) -> T {
    let u: f64 = 1.0 - rng.random::<f64>();
    -mean * cast::<T>(u.ln())
}

/// Draw one block-fading realization: γ₀ plus per-relay hop pairs, with the
/// best relay selected by the max-min rule.
pub fn sample_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig<T>,
) -> ChannelDraw<T> {
    let g0 = sample_exponential(rng, cfg.gbar0);
    let mut hops = ArrayVec::new();
    for _ in 0..cfg.n_relays {
        let sr = sample_exponential(rng, cfg.gbar1);
        let rd = sample_exponential(rng, cfg.gbar1);
        hops.push((sr, rd));
    }
    let (best_relay, g1) = select_best_relay(&hops).expect("n_relays >= 1");
    ChannelDraw {
        g0,
        hops,
        best_relay,
        g1,
    }
}

/// Max-min relay selection: returns the 0-based index maximizing
/// `min(γ_{s,r}, γ_{r,d})` and that minimum. Ties go to the lowest index.
pub fn select_best_relay<T: Real>(hops: &[(T, T)]) -> Result<(usize, T)> {
    if hops.is_empty() {
        return Err(Error::Domain("select_best_relay needs at least one relay".into()));
    }
    let mut best = 0usize;
    let mut best_min = hops[0].0.min(hops[0].1);
    for (idx, &(sr, rd)) in hops.iter().enumerate().skip(1) {
        let m = sr.min(rd);
        if m > best_min {
            best = idx;
            best_min = m;
        }
    }
    Ok((best, best_min))
}

/// Combined destination SNR for the given scheme.
pub fn effective_snr<T: Real>(draw: &ChannelDraw<T>, scheme: Scheme) -> EffectiveSnr<T> {
    EffectiveSnr(match scheme {
        Scheme::Scr => draw.g0 + draw.g1,
        Scheme::Sr => draw.g1,
        Scheme::Asr => draw.g0.max(draw.g1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(n: u32, gbar0: f64, gbar1: f64) -> NetworkConfig<f64> {
        NetworkConfig::new(n, gbar0, gbar1).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(0, 10.0, 10.0).is_err());
        assert!(matches!(
            NetworkConfig::new(31, 10.0, 10.0),
            Err(Error::RelayCap { n_relays: 31 })
        ));
        assert!(NetworkConfig::new(1, -1.0, 10.0).is_err());
        assert!(NetworkConfig::new(1, 10.0, 0.0).is_err());
        assert!(NetworkConfig::new(30, 0.0, 10.0).is_ok());
    }

    #[test]
    fn outage_spec_threshold() {
        let spec = OutageSpec::new(0.5f64).unwrap();
        assert_eq!(spec.threshold(), 1.0);
        let spec = OutageSpec::new(1.0f64).unwrap();
        assert_eq!(spec.threshold(), 3.0);
        assert_eq!(OutageSpec::new(0.0f64).unwrap().threshold(), 0.0);
        assert!(OutageSpec::new(-0.5f64).is_err());
    }

    #[test]
    fn pdf_gamma1_edge_values() {
        // (1 − e⁰) factor vanishes for N_R ≥ 2
        assert_eq!(pdf_gamma1(0.0, &cfg(2, 10.0, 10.0)).unwrap(), 0.0);
        // N_R = 1: exponential of mean γ̄/2
        let c = cfg(1, 10.0, 10.0);
        for &g in &[0.0f64, 1.0, 5.0] {
            let want = (2.0 / 10.0) * (-2.0 * g / 10.0).exp();
            assert_relative_eq!(pdf_gamma1(g, &c).unwrap(), want, max_relative = 1e-14);
        }
        assert!(pdf_gamma1(-1.0, &c).is_err());
    }

    #[test]
    fn pdf_gamma1_expanded_edges() {
        let c = cfg(1, 10.0, 10.0);
        assert_relative_eq!(
            pdf_gamma1_expanded(0.0, &c).unwrap(),
            2.0 / 10.0,
            max_relative = 1e-14
        );
        for n in 1..=4 {
            let c = cfg(n, 10.0, 10.0);
            assert!(pdf_gamma1_expanded(1e6, &c).unwrap() < 1e-300);
        }
    }

    #[test]
    fn expanded_pdf_matches_product_form() {
        // 200-point grid, N_R up to 8, agreement to 1e-10
        for n in 1..=8u32 {
            let c = cfg(n, 10.0, 10.0);
            for k in 0..200 {
                let g = k as f64 * 0.25;
                let product = pdf_gamma1(g, &c).unwrap();
                let expanded = pdf_gamma1_expanded(g, &c).unwrap();
                assert!(
                    (product - expanded).abs() <= 1e-10 * product.max(1.0),
                    "mismatch at n={n}, g={g}: {product} vs {expanded}"
                );
            }
        }
    }

    #[test]
    fn cdf_gamma1_values() {
        let c = cfg(1, 10.0, 10.0);
        assert_eq!(cdf_gamma1(0.0, &c).unwrap(), 0.0);
        assert_relative_eq!(
            cdf_gamma1(1.0, &c).unwrap(),
            0.18126924692201814,
            max_relative = 1e-14
        );
        assert_relative_eq!(cdf_gamma1(1e9, &c).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn cdf_gamma1_binomial_expansion_identity() {
        // (1−u)^N == Σᵢ (−1)^(i−1) C(N,i)(1 − u^i): exactly Eq. form used by
        // the SR outage formula.
        for n in 1..=10u32 {
            let c = cfg(n, 10.0, 10.0);
            for k in 1..=20 {
                let a = k as f64 * 0.5;
                let direct = cdf_gamma1(a, &c).unwrap();
                let terms = (1..=n as u64).map(|i| {
                    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                    sign * binom(n as u64, i).unwrap() as f64
                        * -(-2.0 * i as f64 * a / 10.0).exp_m1()
                });
                let expanded = alternating_sum(terms);
                // absolute 1e-12: the expanded sum cancels to O(u^N), so a
                // relative bound is unattainable for tiny CDF values
                assert!(
                    (direct - expanded).abs() <= 1e-12,
                    "identity failed at n={n}, a={a}"
                );
            }
        }
    }

    #[test]
    fn pdf_beta_vanishes_at_origin() {
        for n in 1..=4 {
            assert_eq!(pdf_beta(0.0, &cfg(n, 10.0, 10.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn pdf_beta_requires_direct_path() {
        assert!(pdf_beta(1.0, &cfg(2, 0.0, 10.0)).is_err());
    }

    #[test]
    fn pdf_beta_matches_numerical_convolution() {
        // Gauss-Legendre convolution of the expanded γ₁ pdf with the γ₀
        // exponential, independent of the closed-form cross terms.
        let (nodes, weights) = gl32();
        for &n in &[1u32, 2, 4] {
            let c = cfg(n, 10.0, 10.0);
            for &b in &[0.5f64, 2.0, 5.0, 12.0, 30.0] {
                let mut conv = 0.0;
                for (&x, &w) in nodes.iter().zip(weights.iter()) {
                    let tau = 0.5 * b * (x + 1.0);
                    let f0 = (1.0 / 10.0) * (-tau / 10.0).exp();
                    conv += w * f0 * pdf_gamma1_expanded(b - tau, &c).unwrap();
                }
                conv *= 0.5 * b;
                let direct = pdf_beta(b, &c).unwrap();
                assert!(
                    (conv - direct).abs() <= 1e-6 * direct.max(1e-12),
                    "convolution mismatch at n={n}, b={b}: {conv} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn pdf_beta_normalizes() {
        use crate::quadrature::{integrate_fn_to_infinity, QuadratureOptions};
        for &n in &[1u32, 2, 4] {
            let c = cfg(n, 10.0, 10.0);
            // β = γ₀ + γ₁ > u implies γ₀ > u/2 or γ₁ > u/2
            let tail = move |u: f64| (-u / 20.0).exp() + n as f64 * (-u / 10.0).exp();
            let integral = integrate_fn_to_infinity(
                |b| pdf_beta(b, &c).unwrap(),
                tail,
                100.0,
                1e-10,
                &QuadratureOptions::default(),
            )
            .unwrap();
            assert!(
                (integral.value - 1.0).abs() <= 1e-8,
                "pdf_beta mass {} at n={n}",
                integral.value
            );
        }
    }

    #[test]
    fn pdf_beta_singular_guard_matches_perturbed_parameters() {
        // γ̄₀ = γ̄₁/2 makes the i = 1 denominator vanish exactly
        let singular = cfg(2, 5.0, 10.0);
        for &b in &[0.5f64, 3.0, 10.0] {
            let at_limit = pdf_beta(b, &singular).unwrap();
            assert!(at_limit.is_finite());
            for eps in [1e-6, -1e-6] {
                let perturbed = pdf_beta(b, &cfg(2, 5.0 * (1.0 + eps), 10.0)).unwrap();
                assert_relative_eq!(at_limit, perturbed, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn pdf_beta_avoids_overflow_for_tiny_gbar0() {
        let c = cfg(2, 1e-6, 10.0);
        for &b in &[0.1f64, 1.0, 40.0] {
            let v = pdf_beta(b, &c).unwrap();
            assert!(v.is_finite() && v >= 0.0);
        }
    }

    #[test]
    fn select_best_relay_examples() {
        // mins are {3, 2, 6} -> third relay wins
        let hops = [(3.0f64, 5.0), (4.0, 2.0), (6.0, 6.0)];
        assert_eq!(select_best_relay(&hops).unwrap(), (2, 6.0));
        assert_eq!(select_best_relay(&[(5.0f64, 5.0)]).unwrap(), (0, 5.0));
        // tie on min value 2: lowest index wins
        assert_eq!(
            select_best_relay(&[(2.0f64, 7.0), (7.0, 2.0)]).unwrap(),
            (0, 2.0)
        );
        assert!(select_best_relay::<f64>(&[]).is_err());
    }

    #[test]
    fn effective_snr_per_scheme() {
        let mut hops = ArrayVec::new();
        hops.push((3.0f64, 4.0));
        let draw = ChannelDraw {
            g0: 2.0,
            hops,
            best_relay: 0,
            g1: 3.0,
        };
        assert_eq!(effective_snr(&draw, Scheme::Scr).value(), 5.0);
        assert_eq!(effective_snr(&draw, Scheme::Sr).value(), 3.0);
        assert_eq!(effective_snr(&draw, Scheme::Asr).value(), 3.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = cfg(3, 10.0, 10.0);
        let mut a = stream_rng(42, 7);
        let mut b = stream_rng(42, 7);
        for _ in 0..100 {
            assert_eq!(sample_channel::<f64, _>(&mut a, &c), sample_channel(&mut b, &c));
        }
        let mut other_stream = stream_rng(42, 8);
        assert_ne!(
            sample_channel::<f64, _>(&mut a, &c),
            sample_channel(&mut other_stream, &c)
        );
    }

    #[test]
    fn sampled_mean_matches_configured_mean() {
        let c = cfg(1, 10.0, 10.0);
        let mut rng = stream_rng(1, 0);
        let n = 1_000_000usize;
        let mut sum = 0.0f64;
        for _ in 0..n {
            sum += sample_channel(&mut rng, &c).g0;
        }
        let mean = sum / n as f64;
        // Exp(10) has std 10, so the sample-mean std error is 10/sqrt(n)
        let se = 10.0 / (n as f64).sqrt();
        assert!(
            (mean - 10.0).abs() < 3.0 * se,
            "mean {mean} off by more than 3 standard errors"
        );
    }

    #[test]
    fn sampled_g1_matches_analytic_cdf() {
        // Kolmogorov-Smirnov distance below 0.002 at one million draws
        let c = cfg(3, 10.0, 10.0);
        let mut rng = stream_rng(2, 0);
        let n = 1_000_000usize;
        let mut samples: Vec<f64> = (0..n).map(|_| sample_channel(&mut rng, &c).g1).collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (idx, &g) in samples.iter().enumerate() {
            let model = cdf_gamma1(g, &c).unwrap();
            let lo = idx as f64 / n as f64;
            let hi = (idx + 1) as f64 / n as f64;
            ks = ks.max((model - lo).abs()).max((model - hi).abs());
        }
        assert!(ks < 0.002, "KS distance {ks} too large");
    }

    #[test]
    fn per_draw_scheme_ordering() {
        // γ₁ ≤ max(γ₀, γ₁) ≤ γ₀ + γ₁ on coupled draws
        let c = cfg(2, 10.0, 10.0);
        let mut rng = stream_rng(3, 0);
        for _ in 0..1_000_000 {
            let draw = sample_channel::<f64, _>(&mut rng, &c);
            let sr = effective_snr(&draw, Scheme::Sr).value();
            let asr = effective_snr(&draw, Scheme::Asr).value();
            let scr = effective_snr(&draw, Scheme::Scr).value();
            assert!(sr <= asr && asr <= scr);
        }
    }

    // 32-point Gauss-Legendre rule for the convolution oracle.
    fn gl32() -> (Vec<f64>, Vec<f64>) {
        // nodes/weights for [-1, 1] generated from the three-term recurrence
        // via Newton iteration on the Legendre polynomial
        let n = 32usize;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = -x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    }

    fn legendre(n: usize, x: f64) -> (f64, f64) {
        let mut p0 = 1.0f64;
        let mut p1 = x;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    }

    proptest! {
        #[test]
        fn pdf_beta_nonnegative(
            b in 0.0f64..200.0,
            n in 1u32..=8,
            gbar0 in 0.1f64..100.0,
            gbar1 in 0.1f64..100.0,
        ) {
            let c = cfg(n, gbar0, gbar1);
            let v = pdf_beta(b, &c).unwrap();
            prop_assert!(v >= 0.0 && v.is_finite());
        }

        #[test]
        fn effective_snr_dominance(
            g0 in 0.0f64..1e6,
            sr_snr in 0.0f64..1e6,
            rd_snr in 0.0f64..1e6,
        ) {
            let mut hops = ArrayVec::new();
            hops.push((sr_snr, rd_snr));
            let g1 = sr_snr.min(rd_snr);
            let draw = ChannelDraw { g0, hops, best_relay: 0, g1 };
            let sr = effective_snr(&draw, Scheme::Sr).value();
            let asr = effective_snr(&draw, Scheme::Asr).value();
            let scr = effective_snr(&draw, Scheme::Scr).value();
            prop_assert!(sr <= asr && asr <= scr);
        }
    }
}

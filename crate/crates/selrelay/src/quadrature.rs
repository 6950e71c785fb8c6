//! Adaptive-quadrature oracle for the closed-form metrics.
//!
//! Every metric is the integral of a kernel against a density of the
//! effective SNR. This module evaluates those integrals numerically from the
//! *product-form* densities only — never the binomial expansions — so the
//! oracle shares no algebra with the closed forms it validates:
//!
//! - `PDF_GAMMA1` integrals use the product-form best-relay density;
//! - `PDF_BETA` integrals nest an exact exponential inner integral inside an
//!   outer product-form integral (numerical convolution, no expansion);
//! - `PDF_MAX` uses `F₀'F₁ + F₀F₁'` assembled from the closed CDFs.
//!
//! The scheme is Gauss–Kronrod 15 with interval halving; semi-infinite
//! domains are truncated where an analytic envelope bounds the discarded
//! tail below a tenth of the requested tolerance.

use std::cell::Cell;

use crate::chanmodel::{cdf_gamma1, pdf_gamma1, NetworkConfig};
use crate::specfun::erfc;
use crate::{cast, Error, Real, Result};

/// Metric kernel integrated against a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel<T> {
    /// ½·erfc(√x) — conditional BPSK bit error probability.
    Ber,
    /// prelog·log₂(1+x) — instantaneous capacity.
    Capacity { prelog: T },
    /// 1 for x < threshold — outage event.
    OutageIndicator { threshold: T },
    /// 1 — density normalization.
    Unit,
}

/// Distribution of the effective SNR being integrated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// Best-relay SNR γ₁ (SR schemes).
    Gamma1,
    /// MRC output β = γ₀ + γ₁ (SCR).
    Beta,
    /// Selection output max(γ₀, γ₁) (ASR).
    Max,
}

/// A kernel–density pairing defining one metric integral over `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralSpec<T> {
    pub kernel: Kernel<T>,
    pub density: DensityKind,
}

/// Converged integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    /// Bound on the absolute error (subdivision estimates plus the analytic
    /// tail bound at the truncation point).
    pub error_estimate: T,
}

/// Tuning knobs; the defaults satisfy every contract in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Subdivision budget for the (outer) adaptive pass.
    pub max_intervals: usize,
    /// Subdivision budget for each nested inner integral (Beta density).
    pub inner_max_intervals: usize,
    /// Multiplies the chosen truncation point; > 1 probes tail conservatism.
    pub tail_stretch: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            max_intervals: 4000,
            inner_max_intervals: 600,
            tail_stretch: 1.0,
        }
    }
}

/// Evaluate a metric integral to the requested relative tolerance.
pub fn integrate<T: Real>(
    spec: &IntegralSpec<T>,
    cfg: &NetworkConfig<T>,
    rel_tol: f64,
) -> Result<Integral<T>> {
    integrate_with(spec, cfg, rel_tol, &QuadratureOptions::default())
}

/// [`integrate`] with explicit options.
pub fn integrate_with<T: Real>(
    spec: &IntegralSpec<T>,
    cfg: &NetworkConfig<T>,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<T>> {
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::Domain(format!(
            "rel_tol must lie in [1e-12, 1e-3], got {rel_tol}"
        )));
    }
    match spec.density {
        DensityKind::Gamma1 => integrate_gamma1(&spec.kernel, cfg, rel_tol, opts),
        DensityKind::Max => {
            cfg.require_direct_path()?;
            integrate_max(&spec.kernel, cfg, rel_tol, opts)
        }
        DensityKind::Beta => {
            cfg.require_direct_path()?;
            integrate_beta(&spec.kernel, cfg, rel_tol, opts)
        }
    }
}

// ---------------------------------------------------------------------------
// generic drivers
// ---------------------------------------------------------------------------

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate_fn<T, F>(
    f: F,
    a: T,
    b: T,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let mut budget = opts.max_intervals;
    let (value, error_estimate) =
        adaptive(&f, a, b, cast(rel_tol), T::zero(), &mut budget)?;
    Ok(Integral {
        value,
        error_estimate,
    })
}

/// Adaptive integral of `f` over `[0, ∞)`.
///
/// `tail_bound(u)` must bound `∫ᵤ^∞ |f|`. A cheap low-accuracy pass over
/// `[0, initial_upper]` sizes the integral; the truncation point is then
/// pushed out by doubling until the analytic tail bound falls below a tenth
/// of the requested tolerance, and one full adaptive pass covers `[0, U]`.
/// The final tail bound is folded into the reported error estimate.
pub fn integrate_fn_to_infinity<T, F, B>(
    f: F,
    tail_bound: B,
    initial_upper: T,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> T,
    B: Fn(T) -> T,
{
    let mut budget = opts.max_intervals;
    let rel = cast::<T>(rel_tol);
    let start = initial_upper.max(T::one());
    let (rough, _) = adaptive(&f, T::zero(), start, cast(1e-3), T::zero(), &mut budget)
        .map_err(|e| requested_as(e, rel_tol))?;
    let scale = rough.abs().max(T::min_positive_value().sqrt());
    let tail_target = rel * scale / cast(10.0);
    let mut upper = start;
    while tail_bound(upper) > tail_target {
        upper = upper + upper;
        if !upper.is_finite() {
            return Err(non_convergence(rough, T::infinity(), rel_tol));
        }
    }
    if opts.tail_stretch > 1.0 {
        upper = upper * cast(opts.tail_stretch);
    }
    let (value, mut error) =
        adaptive(&f, T::zero(), upper, rel * cast(0.8), T::zero(), &mut budget)
            .map_err(|e| requested_as(e, rel_tol))?;
    error = error + tail_bound(upper);
    if error > rel * value.abs() && value != T::zero() {
        return Err(non_convergence(value, error, rel_tol));
    }
    Ok(Integral {
        value,
        error_estimate: error,
    })
}

/// Rewrite the `requested` field so budget errors report the caller's
/// tolerance, not an internal derating of it.
fn requested_as(error: Error, rel_tol: f64) -> Error {
    match error {
        Error::NonConvergence {
            value, achieved, ..
        } => Error::NonConvergence {
            value,
            achieved,
            requested: rel_tol,
        },
        other => other,
    }
}

fn non_convergence<T: Real>(value: T, error: T, rel_tol: f64) -> Error {
    let v = value.to_f64().unwrap_or(f64::NAN);
    let achieved = if v == 0.0 {
        f64::INFINITY
    } else {
        (error.to_f64().unwrap_or(f64::NAN) / v).abs()
    };
    Error::NonConvergence {
        value: v,
        achieved,
        requested: rel_tol,
    }
}

// Gauss–Kronrod 15 / Gauss 7 nodes and weights (positive half, descending;
// odd indices are the embedded Gauss nodes, the last entry is the center).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 15 panel: returns (integral, |K15 − G7| error estimate).
fn gk15<T, F>(f: &F, a: T, b: T) -> (T, T)
where
    T: Real,
    F: Fn(T) -> T,
{
    let half = cast::<T>(0.5) * (b - a);
    let center = cast::<T>(0.5) * (a + b);
    let f_center = f(center);
    let mut kronrod = f_center * cast(WGK[7]);
    let mut gauss = f_center * cast(WG[3]);
    for (j, (&node, &weight)) in XGK[..7].iter().zip(WGK[..7].iter()).enumerate() {
        let offset = half * cast(node);
        let pair = f(center - offset) + f(center + offset);
        kronrod = kronrod + pair * cast(weight);
        if j % 2 == 1 {
            gauss = gauss + pair * cast(WG[j / 2]);
        }
    }
    ((kronrod * half), ((kronrod - gauss) * half).abs())
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Interval-halving adaptive pass over `[a, b]`; converges when the summed
/// error estimate drops below `max(rel_tol·|Σ|, abs_tol)`.
fn adaptive<T, F>(
    f: &F,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    budget: &mut usize,
) -> Result<(T, T)>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok((T::zero(), T::zero()));
    }
    let consume = |budget: &mut usize| -> bool {
        if *budget == 0 {
            false
        } else {
            *budget -= 1;
            true
        }
    };
    if !consume(budget) {
        return Err(non_convergence(T::zero(), T::infinity(), rel_tol.to_f64().unwrap()));
    }
    let (value, error) = gk15(f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    loop {
        let mut total = T::zero();
        let mut total_err = T::zero();
        for seg in &segments {
            total = total + seg.value;
            total_err = total_err + seg.error;
        }
        if total_err <= (rel_tol * total.abs()).max(abs_tol) {
            return Ok((total, total_err));
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .map(|(idx, _)| idx)
            .unwrap();
        if !consume(budget) {
            return Err(non_convergence(total, total_err, rel_tol.to_f64().unwrap()));
        }
        let Segment { a, b, .. } = segments[worst];
        let mid = cast::<T>(0.5) * (a + b);
        if mid <= a || mid >= b {
            // interval no longer splittable at this precision; accept it
            return Ok((total, total_err));
        }
        let (lv, le) = gk15(f, a, mid);
        let (rv, re) = gk15(f, mid, b);
        segments[worst] = Segment {
            a,
            b: mid,
            value: lv,
            error: le,
        };
        segments.push(Segment {
            a: mid,
            b,
            value: rv,
            error: re,
        });
    }
}

// ---------------------------------------------------------------------------
// metric wiring
// ---------------------------------------------------------------------------

fn ln2<T: Real>() -> T {
    cast(std::f64::consts::LN_2)
}

fn kernel_value<T: Real>(kernel: &Kernel<T>, x: T) -> T {
    match kernel {
        Kernel::Ber => cast::<T>(0.5) * erfc(x.sqrt()).expect("x >= 0"),
        Kernel::Capacity { prelog } => *prelog * x.ln_1p() / ln2(),
        Kernel::Unit => T::one(),
        Kernel::OutageIndicator { threshold } => {
            if x < *threshold {
                T::one()
            } else {
                T::zero()
            }
        }
    }
}

/// Bound on `∫ᵤ^∞ kernel·m·λ·e^(−λx) dx` for a single-rate density envelope.
/// The BER kernel contributes its own decay through erfc(√x) ≤ e^(−x);
/// `log_shift` widens the capacity bound for shifted arguments.
fn kernel_tail_bound<T: Real>(kernel: &Kernel<T>, m: T, lambda: T, log_shift: T, u: T) -> T {
    let mass = m * (-lambda * u).exp();
    match kernel {
        Kernel::Unit | Kernel::OutageIndicator { .. } => mass,
        Kernel::Ber => cast::<T>(0.5) * mass * (-u).exp().min(T::one()),
        Kernel::Capacity { prelog } => {
            let log_term = (u + log_shift).ln_1p() / ln2();
            let slope_term = (lambda * (T::one() + u) * ln2()).recip();
            *prelog * mass * (log_term + slope_term + log_shift / ln2())
        }
    }
}

fn initial_upper<T: Real>(cfg: &NetworkConfig<T>) -> T {
    cast::<T>(8.0) * cfg.gbar0().max(cfg.gbar1()) + cast(8.0)
}

fn integrate_gamma1<T: Real>(
    kernel: &Kernel<T>,
    cfg: &NetworkConfig<T>,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<T>> {
    let density = |g: T| pdf_gamma1(g, cfg).expect("g >= 0");
    if let Kernel::OutageIndicator { threshold } = kernel {
        return integrate_fn(density, T::zero(), (*threshold).max(T::zero()), rel_tol, opts);
    }
    let n = cast::<T>(cfg.n_relays() as f64);
    let lambda = cast::<T>(2.0) / cfg.gbar1();
    let f = move |g: T| kernel_value(kernel, g) * density(g);
    let tail = move |u: T| kernel_tail_bound(kernel, n, lambda, T::zero(), u);
    integrate_fn_to_infinity(f, tail, initial_upper(cfg), rel_tol, opts)
}

fn integrate_max<T: Real>(
    kernel: &Kernel<T>,
    cfg: &NetworkConfig<T>,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<T>> {
    // density of max(γ₀, γ₁) as F₀'F₁ + F₀F₁' from the closed CDFs
    let gbar0 = cfg.gbar0();
    let density = move |x: T| {
        let f0 = (-x / gbar0).exp() / gbar0;
        let cdf0 = -(-x / gbar0).exp_m1();
        f0 * cdf_gamma1(x, cfg).expect("x >= 0") + cdf0 * pdf_gamma1(x, cfg).expect("x >= 0")
    };
    if let Kernel::OutageIndicator { threshold } = kernel {
        return integrate_fn(density, T::zero(), (*threshold).max(T::zero()), rel_tol, opts);
    }
    let n = cast::<T>(cfg.n_relays() as f64);
    let lambda0 = cfg.gbar0().recip();
    let lambda1 = cast::<T>(2.0) / cfg.gbar1();
    let f = move |x: T| kernel_value(kernel, x) * density(x);
    let tail = move |u: T| {
        kernel_tail_bound(kernel, T::one(), lambda0, T::zero(), u)
            + kernel_tail_bound(kernel, n, lambda1, T::zero(), u)
    };
    integrate_fn_to_infinity(f, tail, initial_upper(cfg), rel_tol, opts)
}

fn integrate_beta<T: Real>(
    kernel: &Kernel<T>,
    cfg: &NetworkConfig<T>,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<T>> {
    let gbar0 = cfg.gbar0();
    if let Kernel::OutageIndicator { threshold } = kernel {
        // P(γ₀ + γ₁ < a) = ∫₀^a p_{γ₁}(g)·(1 − e^(−(a−g)/γ̄₀)) dg
        let a = (*threshold).max(T::zero());
        let f = move |g: T| {
            pdf_gamma1(g, cfg).expect("g >= 0") * -((g - a) / gbar0).exp_m1()
        };
        return integrate_fn(f, T::zero(), a, rel_tol, opts);
    }

    // outer over the product-form γ₁ density, inner over the exponential γ₀
    let inner_rel = cast::<T>(rel_tol) / cast(10.0);
    let inner_failure: Cell<Option<Error>> = Cell::new(None);
    let inner = |g: T| -> T {
        match kernel {
            Kernel::Unit => T::one(),
            _ => {
                let f = move |t: T| kernel_value(kernel, g + t) * (-t / gbar0).exp() / gbar0;
                let tail = move |u: T| {
                    kernel_tail_bound(kernel, T::one(), gbar0.recip(), g, u)
                };
                let inner_opts = QuadratureOptions {
                    max_intervals: opts.inner_max_intervals,
                    ..*opts
                };
                match integrate_fn_to_infinity(
                    f,
                    tail,
                    cast::<T>(8.0) * gbar0 + cast(8.0),
                    inner_rel.to_f64().unwrap(),
                    &inner_opts,
                ) {
                    Ok(integral) => integral.value,
                    Err(e) => {
                        inner_failure.set(Some(e));
                        T::zero()
                    }
                }
            }
        }
    };

    let n = cast::<T>(cfg.n_relays() as f64);
    let lambda1 = cast::<T>(2.0) / cfg.gbar1();
    let f = |g: T| pdf_gamma1(g, cfg).expect("g >= 0") * inner(g);
    let tail = move |u: T| kernel_tail_bound(kernel, n, lambda1, gbar0, u);
    let result = integrate_fn_to_infinity(f, tail, initial_upper(cfg), rel_tol, opts);
    if let Some(e) = inner_failure.take() {
        return Err(e);
    }
    // the nested inner pass contributes up to rel_tol/10 of the value
    result.map(|integral| Integral {
        value: integral.value,
        error_estimate: integral.error_estimate + inner_rel * integral.value.abs(),
    })
}

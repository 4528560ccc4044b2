//! Relaxation and creep functions in the time and Laplace domains.
//!
//! With `t̂ = t/t_g` the dimensionless kernels are
//!
//! ```text
//! K̂(t̂) = 2(1+ν) [1 + Σ A_n exp(-α_n² t̂)]
//! M̂(t̂) = [1 - Σ B_n exp(-β_n² t̂)] / (2(1+ν))
//! ```
//!
//! and the bracketed factors are the relative kernels `K(t)`, `M(t)`. Their
//! Laplace transforms in `t̂` are
//!
//! ```text
//! K̄(s) = (3 - 4c q) / (s (1 - c q)),   M̄(s) = (1 - c q) / (s (3 - 4c q)),
//! q = I1(√s) / (√s I0(√s)),             c = (1 - 2ν)/(1 - ν).
//! ```
//!
//! `q` is an even function of `√s`, so the branch of the square root is
//! immaterial; the principal branch is used.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::charroots::{check_poisson, RootFamily};
use crate::error::{Error, Result};
use crate::material::BiphasicSpectrum;
use crate::specfun::bessel_i_ratio_complex;

/// Series are extended until the last retained term is below this.
pub const TERM_TOLERANCE: f64 = 1e-12;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;
/// Default accuracy of [`invert_laplace`].
pub const DEFAULT_INVERSION_ACCURACY: f64 = 1e-8;

/// One kernel value with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    /// Evaluation time, in seconds when `dimensional`, otherwise `t̂`.
    pub t: f64,
    pub dimensional: bool,
    /// `K(t)`/`M(t)` when `dimensional`, otherwise `K̂(t̂)`/`M̂(t̂)`.
    pub value: f64,
    pub n_terms_used: usize,
    /// Bound on the neglected terms, in the units of `value`.
    pub tail_bound: f64,
    /// Set when [`MAX_TERMS`] stopped the extension before the term
    /// tolerance was met; `tail_bound` then carries the remaining error.
    pub cap_reached: bool,
}

struct SeriesSum {
    sum: f64,
    n_used: usize,
    tail: f64,
    cap_reached: bool,
}

/// `Σ c_n exp(-x_n² t̂)` over the spectrum, extending it as needed.
fn adaptive_sum(spec: &BiphasicSpectrum, family: RootFamily, t_hat: f64) -> Result<SeriesSum> {
    let mut n = spec.n_terms();
    loop {
        let (roots, coeffs, tail) = spec.family_terms(family, n)?;
        let n_now = roots.len();
        let last = if n_now == 0 {
            0.0
        } else {
            coeffs[n_now - 1].abs() * (-roots[n_now - 1].powi(2) * t_hat).exp()
        };
        let done = last < TERM_TOLERANCE || !spec.is_truncated();
        if done || n_now >= MAX_TERMS {
            let sum = coeffs
                .iter()
                .zip(&roots)
                .rev()
                .map(|(c, x)| c * (-x * x * t_hat).exp())
                .sum();
            return Ok(SeriesSum {
                sum,
                n_used: n_now,
                tail: tail.decaying(t_hat),
                cap_reached: !done,
            });
        }
        n = next_term_count(coeffs[n_now - 1], roots[n_now - 1], n_now, t_hat);
    }
}

/// Estimate the term count at which `|c| exp(-x² t̂)` drops below the
/// tolerance, using `c ∝ 1/x²` and `x_n ≈ nπ`.
fn next_term_count(c_last: f64, x_last: f64, n: usize, t_hat: f64) -> usize {
    let k = c_last.abs() * x_last * x_last;
    let mut x2 = x_last * x_last;
    for _ in 0..8 {
        x2 = ((k / x2).ln() - TERM_TOLERANCE.ln()).max(0.0) / t_hat;
    }
    let estimate = (x2.sqrt() / PI).ceil() as usize + 2;
    estimate.max(n + n / 2).min(MAX_TERMS)
}

fn to_t_hat(func: &'static str, t: f64, spec: &BiphasicSpectrum, dimensional: bool) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain {
            func,
            value: t,
            reason: "time must be non-negative",
        });
    }
    if !dimensional {
        return Ok(t);
    }
    let t_g = spec.gel_time();
    Ok(if t == 0.0 {
        0.0
    } else if t_g == 0.0 {
        f64::INFINITY
    } else {
        t / t_g
    })
}

/// Relaxation function `K(t)` (or `K̂(t̂)` when `dimensional` is false).
///
/// `K(0) = K0` is taken from its closed form.
pub fn relaxation_k(t: f64, spec: &BiphasicSpectrum, dimensional: bool) -> Result<KernelEval> {
    let t_hat = to_t_hat("kernels::relaxation_k", t, spec, dimensional)?;
    let scale = if dimensional { 1.0 } else { 2.0 * (1.0 + spec.nu_s()) };
    if t_hat == 0.0 {
        return Ok(KernelEval {
            t,
            dimensional,
            value: scale * spec.k0(),
            n_terms_used: 0,
            tail_bound: 0.0,
            cap_reached: false,
        });
    }
    let s = adaptive_sum(spec, RootFamily::Relaxation, t_hat)?;
    Ok(KernelEval {
        t,
        dimensional,
        value: scale * (1.0 + s.sum),
        n_terms_used: s.n_used,
        tail_bound: scale * s.tail,
        cap_reached: s.cap_reached,
    })
}

/// Creep function `M(t)` (or `M̂(t̂)` when `dimensional` is false).
///
/// For `t > 0` this is `1 - Σ B_n exp(-t/τ_n)`, which equals
/// `M0 + Σ B_n (1 - exp(-t/τ_n))` plus the neglected part of the sum
/// identity `1 - Σ B_n = M0`; `M(0) = M0` is taken from its closed form.
pub fn creep_m(t: f64, spec: &BiphasicSpectrum, dimensional: bool) -> Result<KernelEval> {
    let t_hat = to_t_hat("kernels::creep_m", t, spec, dimensional)?;
    let scale = if dimensional { 1.0 } else { 0.5 / (1.0 + spec.nu_s()) };
    if t_hat == 0.0 {
        return Ok(KernelEval {
            t,
            dimensional,
            value: scale * spec.m0(),
            n_terms_used: 0,
            tail_bound: 0.0,
            cap_reached: false,
        });
    }
    let s = adaptive_sum(spec, RootFamily::Retardation, t_hat)?;
    Ok(KernelEval {
        t,
        dimensional,
        value: scale * (1.0 - s.sum),
        n_terms_used: s.n_used,
        tail_bound: scale * s.tail,
        cap_reached: s.cap_reached,
    })
}

/// `K(t)` from the stored terms only (no extension), `t` in seconds; `K(0) = K0`.
///
/// This is the kernel the closed-form responses are built from.
pub fn relaxation_truncated(spec: &BiphasicSpectrum, t: f64) -> f64 {
    if t == 0.0 {
        return spec.k0();
    }
    1.0 + spec.relaxation_terms().map(|(a, rho)| a * (-t / rho).exp()).sum::<f64>()
}

/// `M(t)` from the stored terms only (no extension), `t` in seconds; `M(0) = M0`.
pub fn creep_truncated(spec: &BiphasicSpectrum, t: f64) -> f64 {
    if t == 0.0 {
        return spec.m0();
    }
    1.0 - spec.retardation_terms().map(|(b, tau)| b * (-t / tau).exp()).sum::<f64>()
}

/// `q(z) = I1(z)/(z I0(z))`.
fn bessel_q(z: Complex64) -> Result<Complex64> {
    if z.norm() < 1e-4 {
        let s = z * z;
        return Ok(0.5 - s / 16.0 + s * s / 96.0);
    }
    Ok(bessel_i_ratio_complex(z)? / z)
}

fn laplace_parts(func: &'static str, z: Complex64, nu_s: f64) -> Result<(Complex64, Complex64, Complex64)> {
    check_poisson(func, nu_s)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain {
            func,
            value: z.norm(),
            reason: "transform variable must be finite",
        });
    }
    if z.norm_sqr() == 0.0 {
        return Err(Error::Pole { func });
    }
    let c = (1.0 - 2.0 * nu_s) / (1.0 - nu_s);
    let cq = c * bessel_q(z)?;
    Ok((z * z, 3.0 - 4.0 * cq, 1.0 - cq))
}

fn checked_div(func: &'static str, num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() < 1e-300 {
        return Err(Error::Singular {
            func,
            denominator: den.norm(),
        });
    }
    Ok(num / den)
}

/// `K̄(s)`, the Laplace transform of `K̂(t̂)`.
pub fn laplace_k(s: Complex64, nu_s: f64) -> Result<Complex64> {
    laplace_k_sqrt(s.sqrt(), nu_s)
}

/// `M̄(s)`, the Laplace transform of `M̂(t̂)`.
pub fn laplace_m(s: Complex64, nu_s: f64) -> Result<Complex64> {
    laplace_m_sqrt(s.sqrt(), nu_s)
}

/// `K̄` evaluated at `s = z²` from a chosen square root `z`.
pub fn laplace_k_sqrt(z: Complex64, nu_s: f64) -> Result<Complex64> {
    const F: &str = "kernels::laplace_k";
    let (s, three_m, one_m) = laplace_parts(F, z, nu_s)?;
    checked_div(F, three_m, s * one_m)
}

/// `M̄` evaluated at `s = z²` from a chosen square root `z`.
pub fn laplace_m_sqrt(z: Complex64, nu_s: f64) -> Result<Complex64> {
    const F: &str = "kernels::laplace_m";
    let (s, three_m, one_m) = laplace_parts(F, z, nu_s)?;
    checked_div(F, one_m, s * three_m)
}

/// Result of a numerical Laplace inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    /// Difference between the two finest contour discretisations.
    pub error_estimate: f64,
    /// Number of contour nodes of the returned value.
    pub nodes: usize,
}

/// Node counts tried in turn; beyond ~28 nodes double precision roundoff
/// (amplified by `exp(0.4 M)`) outweighs the discretisation gain.
const TALBOT_NODES: [usize; 5] = [12, 16, 20, 24, 28];

/// Numerical inverse Laplace transform on a fixed Talbot contour.
///
/// Oracle for the series kernels. `transform` must be analytic off the
/// negative real axis. The value is accepted once two consecutive node
/// counts agree to `accuracy`.
pub fn invert_laplace<F>(transform: F, t: f64, accuracy: f64) -> Result<Inversion>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const FN: &str = "kernels::invert_laplace";
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            func: FN,
            value: t,
            reason: "inversion time must be positive and finite",
        });
    }
    let mut previous: Option<f64> = None;
    let mut diffs = Vec::new();
    for m in TALBOT_NODES {
        let v = talbot(&transform, t, m)?;
        if let Some(p) = previous {
            let diff = (v - p).abs();
            if diff <= accuracy {
                return Ok(Inversion {
                    value: v,
                    error_estimate: diff,
                    nodes: m,
                });
            }
            diffs.push(diff);
        }
        previous = Some(v);
    }
    Err(Error::Oracle {
        func: FN,
        detail: format!("successive contour refinements differ by {diffs:?} at t = {t}"),
    })
}

/// Fixed Talbot rule with `m` nodes: `r = 2m/(5t)`, `s(θ) = rθ(cot θ + i)`.
fn talbot<F>(transform: &F, t: f64, m: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (transform(Complex64::new(r, 0.0))? * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * PI / m as f64;
        let cot = 1.0 / theta.tan();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * transform(s)? * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    Ok(r / m as f64 * sum)
}

fn check_short_time(func: &'static str, t_hat: f64, nu_s: f64) -> Result<f64> {
    check_poisson(func, nu_s)?;
    if !(t_hat >= 0.0) {
        return Err(Error::Domain {
            func,
            value: t_hat,
            reason: "time must be non-negative",
        });
    }
    Ok(2.0 * (1.0 - 2.0 * nu_s) / (PI.sqrt() * (1.0 - nu_s)) * t_hat.sqrt())
}

/// Two-term small-time law `K̂ ≈ 3 - 2(1-2ν)/(√π(1-ν)) √t̂`.
pub fn short_time_k(t_hat: f64, nu_s: f64) -> Result<f64> {
    Ok(3.0 - check_short_time("kernels::short_time_k", t_hat, nu_s)?)
}

/// Two-term small-time law `M̂ ≈ 1/3 + 2(1-2ν)/(9√π(1-ν)) √t̂`.
pub fn short_time_m(t_hat: f64, nu_s: f64) -> Result<f64> {
    Ok(1.0 / 3.0 + check_short_time("kernels::short_time_m", t_hat, nu_s)? / 9.0)
}

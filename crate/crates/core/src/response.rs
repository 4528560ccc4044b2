//! Time-domain responses of the four loading protocols.
//!
//! Displacement-controlled protocols return the contact force (N), the
//! force-controlled ones the plate displacement (m). Each response is the
//! Stieltjes convolution of the input with `K` or `M`, evaluated in closed
//! form term by term over the Prony series:
//!
//! ```text
//! ω∫₀ᵗ sin(ωτ) e^{-(t-τ)/ρ} dτ = w[sin ωt - w cos ωt + w e^{-t/ρ}]/(1+w²)
//! ω∫₀ᵗ cos(ωτ) e^{-(t-τ)/ρ} dτ = w[cos ωt + w sin ωt - e^{-t/ρ}]/(1+w²)
//! ```
//!
//! with `w = ωρ`. [`convolve_oracle`] evaluates the same convolutions by
//! adaptive quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{creep_truncated, relaxation_truncated};
use crate::material::{BiphasicSpectrum, MaterialParams};
use crate::moduli::{storage_loss_k, storage_loss_m};
use crate::quadrature::{integrate_with_breaks, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// `w(t) = w0(1 - cos ωt) + w1`, output force.
    CyclicDisplacement,
    /// `F(t) = F0(1 - cos ωt) + F1`, output displacement.
    CyclicForce,
    /// `w(t) = w0 sin ωt` on `(0, π/ω)`, output force.
    HalfsineDisplacement,
    /// `F(t) = F0 sin ωt` on `(0, π/ω)`, output displacement.
    HalfsineForce,
}

impl ProtocolKind {
    pub fn is_displacement_controlled(self) -> bool {
        matches!(self, ProtocolKind::CyclicDisplacement | ProtocolKind::HalfsineDisplacement)
    }

    pub fn is_halfsine(self) -> bool {
        matches!(self, ProtocolKind::HalfsineDisplacement | ProtocolKind::HalfsineForce)
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolKind::CyclicDisplacement => "cyclic_displacement",
            ProtocolKind::CyclicForce => "cyclic_force",
            ProtocolKind::HalfsineDisplacement => "halfsine_displacement",
            ProtocolKind::HalfsineForce => "halfsine_force",
        })
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cyclic_displacement" => ProtocolKind::CyclicDisplacement,
            "cyclic_force" => ProtocolKind::CyclicForce,
            "halfsine_displacement" => ProtocolKind::HalfsineDisplacement,
            "halfsine_force" => ProtocolKind::HalfsineForce,
            other => return Err(Error::Validation(vec![format!("unknown protocol '{other}'")])),
        })
    }
}

/// Input history. `amplitude` and `preoffset` are in metres for displacement
/// kinds and newtons for force kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadingProtocol {
    pub kind: ProtocolKind,
    /// Angular frequency (rad/s).
    pub omega: f64,
    pub amplitude: f64,
    pub preoffset: f64,
}

impl LoadingProtocol {
    pub fn new(kind: ProtocolKind, omega: f64, amplitude: f64, preoffset: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(omega > 0.0 && omega.is_finite()) {
            problems.push(format!("omega must be positive and finite, got {omega}"));
        }
        if !(amplitude != 0.0 && amplitude.is_finite()) {
            problems.push(format!("amplitude must be nonzero and finite, got {amplitude}"));
        }
        if !preoffset.is_finite() {
            problems.push(format!("preoffset must be finite, got {preoffset}"));
        } else if kind.is_halfsine() && preoffset != 0.0 {
            problems.push(format!("preoffset must be 0 for {kind}, got {preoffset}"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(LoadingProtocol {
            kind,
            omega,
            amplitude,
            preoffset,
        })
    }

    /// End of the loading phase of a half-sine test, `π/ω`.
    pub fn half_period(&self) -> f64 {
        PI / self.omega
    }

    /// Input value at time `t` (zero before 0 and, for half-sine kinds, after `π/ω`).
    pub fn input(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let wt = self.omega * t;
        if self.kind.is_halfsine() {
            if t > self.half_period() {
                0.0
            } else {
                self.amplitude * wt.sin()
            }
        } else {
            self.amplitude * (1.0 - wt.cos()) + self.preoffset
        }
    }

    /// Derivative of the input for `t > 0`, excluding the jump at 0.
    pub fn input_derivative(&self, t: f64) -> f64 {
        let wt = self.omega * t;
        if self.kind.is_halfsine() {
            self.amplitude * self.omega * wt.cos()
        } else {
            self.amplitude * self.omega * wt.sin()
        }
    }

    fn require(&self, func: &'static str, kind: ProtocolKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Validation(vec![format!(
                "{func} needs a {kind} protocol, got {}",
                self.kind
            )]));
        }
        Ok(())
    }
}

fn check_time(func: &'static str, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            func,
            value: t,
            reason: "time must be non-negative and finite",
        });
    }
    Ok(())
}

/// Relative force `F(t)/(πa²E_s/h)` of the cyclic displacement protocol (m).
fn cyclic_force_relative(t: f64, proto: &LoadingProtocol, spec: &BiphasicSpectrum) -> Result<f64> {
    let omega = proto.omega;
    let (k1, k2) = storage_loss_k(omega, spec)?;
    let transient: f64 = spec
        .relaxation_terms()
        .map(|(a, rho)| {
            let w = omega * rho;
            a * w * w / (1.0 + w * w) * (-t / rho).exp()
        })
        .sum();
    let wt = omega * t;
    Ok(proto.preoffset * relaxation_truncated(spec, t) + proto.amplitude * (1.0 + transient)
        - proto.amplitude * (k1 * wt.cos() - k2 * wt.sin()))
}

/// Contact force (N) under `w(t) = w0(1 - cos ωt) + w1`.
pub fn cyclic_force_response(
    t: f64,
    proto: &LoadingProtocol,
    p: &MaterialParams,
    spec: &BiphasicSpectrum,
) -> Result<f64> {
    const F: &str = "response::cyclic_force_response";
    check_time(F, t)?;
    proto.require(F, ProtocolKind::CyclicDisplacement)?;
    Ok(p.force_scale()? * cyclic_force_relative(t, proto, spec)?)
}

/// Plate displacement (m) under `F(t) = F0(1 - cos ωt) + F1`.
pub fn cyclic_displacement_response(
    t: f64,
    proto: &LoadingProtocol,
    p: &MaterialParams,
    spec: &BiphasicSpectrum,
) -> Result<f64> {
    const F: &str = "response::cyclic_displacement_response";
    check_time(F, t)?;
    proto.require(F, ProtocolKind::CyclicForce)?;
    let omega = proto.omega;
    let (m1, m2) = storage_loss_m(omega, spec)?;
    let transient: f64 = spec
        .retardation_terms()
        .map(|(b, tau)| {
            let w = omega * tau;
            b * w * w / (1.0 + w * w) * (-t / tau).exp()
        })
        .sum();
    let wt = omega * t;
    let rel = proto.preoffset * creep_truncated(spec, t) + proto.amplitude * (1.0 - transient)
        - proto.amplitude * (m1 * wt.cos() + m2 * wt.sin());
    Ok(rel / p.force_scale()?)
}

/// `ω∫₀ᵗ cos(ωτ) K(t-τ) dτ` (`sign = 1`, coefficients `A_n`) or the creep
/// analogue (`sign = -1`, coefficients `B_n`).
fn halfsine_relative(t: f64, omega: f64, terms: impl Iterator<Item = (f64, f64)>, sign: f64) -> f64 {
    let (s, c) = (omega * t).sin_cos();
    let sum: f64 = terms
        .map(|(coeff, time)| {
            let w = omega * time;
            coeff * w * (c + w * s - (-t / time).exp()) / (1.0 + w * w)
        })
        .sum();
    s + sign * sum
}

/// Contact force (N) of the displacement-controlled half-sine test.
pub fn halfsine_displacement_test(
    t: f64,
    proto: &LoadingProtocol,
    p: &MaterialParams,
    spec: &BiphasicSpectrum,
) -> Result<f64> {
    const F: &str = "response::halfsine_displacement_test";
    check_time(F, t)?;
    proto.require(F, ProtocolKind::HalfsineDisplacement)?;
    let rel = halfsine_relative(t, proto.omega, spec.relaxation_terms(), 1.0);
    Ok(p.force_scale()? * proto.amplitude * rel)
}

/// Plate displacement (m) of the force-controlled half-sine test.
pub fn halfsine_force_test(t: f64, proto: &LoadingProtocol, p: &MaterialParams, spec: &BiphasicSpectrum) -> Result<f64> {
    const F: &str = "response::halfsine_force_test";
    check_time(F, t)?;
    proto.require(F, ProtocolKind::HalfsineForce)?;
    let rel = halfsine_relative(t, proto.omega, spec.retardation_terms(), -1.0);
    Ok(proto.amplitude * rel / p.force_scale()?)
}

/// Response of any protocol at `t`.
pub fn respond(t: f64, proto: &LoadingProtocol, p: &MaterialParams, spec: &BiphasicSpectrum) -> Result<f64> {
    match proto.kind {
        ProtocolKind::CyclicDisplacement => cyclic_force_response(t, proto, p, spec),
        ProtocolKind::CyclicForce => cyclic_displacement_response(t, proto, p, spec),
        ProtocolKind::HalfsineDisplacement => halfsine_displacement_test(t, proto, p, spec),
        ProtocolKind::HalfsineForce => halfsine_force_test(t, proto, p, spec),
    }
}

/// Scan steps per half period in [`contact_duration`].
const CONTACT_SCAN_STEPS: usize = 256;
/// Periods searched before giving up.
const CONTACT_SEARCH_PERIODS: f64 = 10.0;

/// Duration of contact of a half-sine test.
///
/// Force-controlled tests last `π/ω` by construction. For the
/// displacement-controlled test this is the first zero of the contact force
/// after the displacement peak `t_m = π/(2ω)`, located by scanning and
/// bisection down to adjacent floating-point numbers.
pub fn contact_duration(proto: &LoadingProtocol, spec: &BiphasicSpectrum) -> Result<f64> {
    const F: &str = "response::contact_duration";
    match proto.kind {
        ProtocolKind::HalfsineForce => return Ok(proto.half_period()),
        ProtocolKind::HalfsineDisplacement => {}
        other => {
            return Err(Error::Validation(vec![format!(
                "{F} needs a half-sine protocol, got {other}"
            )]))
        }
    }
    let omega = proto.omega;
    if spec.relaxation_terms().next().is_none() {
        return Ok(proto.half_period());
    }
    let force = |t: f64| halfsine_relative(t, omega, spec.relaxation_terms(), 1.0);
    let t_m = 0.5 * proto.half_period();
    let end = CONTACT_SEARCH_PERIODS * proto.half_period();
    let step = proto.half_period() / CONTACT_SCAN_STEPS as f64;
    let mut lo = t_m;
    let f_lo = force(lo);
    while lo < end {
        let hi = (lo + step).min(end);
        let f_hi = force(hi);
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_hi.signum() != f_lo.signum() {
            let (mut a, mut b) = (lo, hi);
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    return Ok(b);
                }
                let f_mid = force(mid);
                if f_mid == 0.0 {
                    return Ok(mid);
                }
                if f_mid.signum() == f_lo.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
        }
        lo = hi;
    }
    Err(Error::Search { func: F, from: t_m, to: end })
}

/// `∫₀ᵗ input'(τ) kernel(t - τ) dτ + jump · kernel(t)` by adaptive quadrature.
///
/// `jump` is the step of the input at `τ = 0`; it is added explicitly rather
/// than integrated as a delta. The absolute error target is
/// `max(tol, tol·|value|)`.
pub fn convolve_oracle(
    kernel: impl Fn(f64) -> f64,
    input_derivative: impl Fn(f64) -> f64,
    jump: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    convolve_oracle_with_breaks(kernel, input_derivative, jump, t, tol, &[])
}

/// As [`convolve_oracle`], with extra break points at lags `t - τ` where the
/// kernel varies quickly (for example a few of the shortest relaxation times).
pub fn convolve_oracle_with_breaks(
    kernel: impl Fn(f64) -> f64,
    input_derivative: impl Fn(f64) -> f64,
    jump: f64,
    t: f64,
    tol: f64,
    kernel_scales: &[f64],
) -> Result<f64> {
    check_time("response::convolve_oracle", t)?;
    let mut breaks = vec![0.0, t];
    breaks.extend(kernel_scales.iter().map(|lag| t - lag).filter(|&b| b > 0.0 && b < t));
    breaks.sort_by(f64::total_cmp);
    let opts = QuadOptions {
        abs_tol: tol,
        rel_tol: tol,
        max_intervals: 20_000,
    };
    let integral = if t > 0.0 {
        integrate_with_breaks(|tau| input_derivative(tau) * kernel(t - tau), &breaks, opts)
            .map_err(|e| match e {
                Error::Oracle { detail, .. } => Error::Oracle {
                    func: "response::convolve_oracle",
                    detail,
                },
                other => other,
            })?
            .value
    } else {
        0.0
    };
    Ok(integral + jump * kernel(t))
}

/// Sampling times for [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub enum TimeGrid {
    Explicit(Vec<f64>),
    Uniform { start: f64, end: f64, points: usize },
    /// At least `per_period` uniform points per period up to `end` (default:
    /// `π/ω` for half-sine tests, four periods otherwise), plus log-spaced
    /// refinement towards `t = 0`.
    Auto { end: Option<f64>, per_period: usize },
}

impl TimeGrid {
    pub fn auto() -> Self {
        TimeGrid::Auto {
            end: None,
            per_period: 40,
        }
    }

    pub fn times(&self, proto: &LoadingProtocol) -> Result<Vec<f64>> {
        let times = match self {
            TimeGrid::Explicit(v) => v.clone(),
            TimeGrid::Uniform { start, end, points } => {
                if *points < 2 || !(end > start) || !(*start >= 0.0) || !end.is_finite() {
                    return Err(Error::Validation(vec![format!(
                        "time grid needs 0 <= start < end and at least 2 points, got {start}:{end} with {points}"
                    )]));
                }
                let n = (*points - 1) as f64;
                (0..*points)
                    .map(|i| if i + 1 == *points { *end } else { start + (end - start) * i as f64 / n })
                    .collect()
            }
            TimeGrid::Auto { end, per_period } => {
                let period = 2.0 * PI / proto.omega;
                let end = end.unwrap_or(if proto.kind.is_halfsine() {
                    proto.half_period()
                } else {
                    4.0 * period
                });
                if !(end > 0.0 && end.is_finite()) || *per_period == 0 {
                    return Err(Error::Validation(vec![format!(
                        "auto time grid needs a positive end and per-period count, got {end} and {per_period}"
                    )]));
                }
                let n = ((end / period) * *per_period as f64).ceil().max(2.0) as usize;
                let dt = end / n as f64;
                let mut v: Vec<f64> = (0..=n).map(|i| if i == n { end } else { dt * i as f64 }).collect();
                v.extend((1..=20).map(|k| dt * 10f64.powf(-4.0 * k as f64 / 20.0)));
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
        };
        if times.is_empty() || times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Validation(vec!["times must be finite and non-negative".into()]));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(vec!["times must be strictly increasing".into()]));
        }
        Ok(times)
    }
}

/// Sampled response of one protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTrace {
    pub protocol: LoadingProtocol,
    pub times: Vec<f64>,
    pub inputs: Vec<f64>,
    pub values: Vec<f64>,
    pub n_terms: usize,
    /// Half-sine samples past `π/ω` continue the closed form beyond the end
    /// of loading; this flags that any such sample is present.
    pub beyond_loading: bool,
}

pub fn simulate(
    proto: &LoadingProtocol,
    p: &MaterialParams,
    spec: &BiphasicSpectrum,
    grid: &TimeGrid,
) -> Result<ResponseTrace> {
    let times = grid.times(proto)?;
    let values = times
        .iter()
        .map(|&t| respond(t, proto, p, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseTrace {
        protocol: *proto,
        inputs: times.iter().map(|&t| proto.input(t)).collect(),
        beyond_loading: proto.kind.is_halfsine() && times.iter().any(|&t| t > proto.half_period()),
        times,
        values,
        n_terms: spec.n_terms(),
    })
}

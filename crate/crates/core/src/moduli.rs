//! Apparent storage and loss moduli, compliances, loss angle, and the
//! incomplete storage modulus and compliance of the half-sine tests.
//!
//! All quantities are relative (dimensionless); multiply by `πa²E_s/h` or its
//! inverse for forces and displacements. With `w_n = ωρ_n`:
//!
//! ```text
//! K1 = 1 + Σ A_n w_n²/(1+w_n²)            K2 = Σ A_n w_n/(1+w_n²)
//! K̃1 = 1 + Σ A_n w_n (w_n - e_n)/(1+w_n²),   e_n = exp(-π/(2 w_n))
//! ```
//!
//! and likewise for the compliances with `B_n`, `τ_n` and the opposite sign.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::charroots::RootFamily;
use crate::error::{Error, Result};
use crate::material::{BiphasicSpectrum, MaterialParams};
use crate::quadrature::{integrate, QuadOptions};

/// `∫₀^{π/2} √x sin x dx`, as pinned by the regression test against
/// [`s_half`].
pub const S_HALF: f64 = 0.977_451_424_291_329_7;

/// Envelope constant for `K1 - K̃1 <= C ωρ₁ exp(-π/(2ωρ₁))`; valid whenever
/// `0 <= ΣA_n <= 1`, which holds for `ν ∈ [0, 1/2]`.
pub const DEFICIT_ENVELOPE: f64 = 1.0;

/// `|w(w - e^{-π/2w})|/(1+w²) <= 1.25 min(1, w²)`.
const INCOMPLETE_TERM_FACTOR: f64 = 1.25;

/// All frequency-domain quantities at one angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuliEval {
    pub omega: f64,
    pub k1: f64,
    pub k2: f64,
    pub m1: f64,
    pub m2: f64,
    pub k1_tilde: f64,
    pub m1_tilde: f64,
    pub loss_angle: f64,
    /// Largest truncation bound among the series above.
    pub tail_bound: f64,
}

fn check_omega(func: &'static str, omega: f64) -> Result<()> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::Domain {
            func,
            value: omega,
            reason: "angular frequency must be non-negative and finite",
        });
    }
    Ok(())
}

/// `exp(-π/(2w))`, zero at `w = 0`.
fn quarter_decay(w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        (-FRAC_PI_2 / w).exp()
    }
}

/// `(K1, K2)` at angular frequency `omega` (rad/s).
pub fn storage_loss_k(omega: f64, spec: &BiphasicSpectrum) -> Result<(f64, f64)> {
    check_omega("moduli::storage_loss_k", omega)?;
    let (mut k1, mut k2) = (0.0, 0.0);
    for (a, rho) in spec.relaxation_terms() {
        let w = omega * rho;
        let d = 1.0 + w * w;
        k1 += a * w * w / d;
        k2 += a * w / d;
    }
    Ok((1.0 + k1, k2))
}

/// `(M1, M2)` at angular frequency `omega` (rad/s).
pub fn storage_loss_m(omega: f64, spec: &BiphasicSpectrum) -> Result<(f64, f64)> {
    check_omega("moduli::storage_loss_m", omega)?;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (b, tau) in spec.retardation_terms() {
        let w = omega * tau;
        let d = 1.0 + w * w;
        m1 += b * w * w / d;
        m2 += b * w / d;
    }
    Ok((1.0 - m1, m2))
}

/// Loss angle `δ = atan2(K2, K1)`.
pub fn loss_angle(omega: f64, spec: &BiphasicSpectrum) -> Result<f64> {
    let (k1, k2) = storage_loss_k(omega, spec)?;
    Ok(k2.atan2(k1))
}

/// Incomplete apparent storage modulus `K̃1(ω)`; tends to 1 as `ω → 0`.
pub fn incomplete_storage_k(omega: f64, spec: &BiphasicSpectrum) -> Result<f64> {
    check_omega("moduli::incomplete_storage_k", omega)?;
    let sum: f64 = spec
        .relaxation_terms()
        .map(|(a, rho)| {
            let w = omega * rho;
            a * w * (w - quarter_decay(w)) / (1.0 + w * w)
        })
        .sum();
    Ok(1.0 + sum)
}

/// Incomplete apparent storage compliance `M̃1(ω)`.
///
/// Summed as `1 - Σ B_n w_n(w_n - e_n)/(1+w_n²)`, which equals
/// `M0 + Σ B_n (1 + w_n e_n)/(1+w_n²)` through `M0 = 1 - ΣB_n` but whose
/// neglected terms decay like `w_n²` instead of `B_n`.
pub fn incomplete_storage_m(omega: f64, spec: &BiphasicSpectrum) -> Result<f64> {
    check_omega("moduli::incomplete_storage_m", omega)?;
    let sum: f64 = spec
        .retardation_terms()
        .map(|(b, tau)| {
            let w = omega * tau;
            b * w * (w - quarter_decay(w)) / (1.0 + w * w)
        })
        .sum();
    Ok(1.0 - sum)
}

/// `K1 - K̃1 = Σ A_n w_n e_n/(1+w_n²)`, summed termwise so that the
/// exponentially small low-frequency difference keeps full relative accuracy.
pub fn storage_deficit_k(omega: f64, spec: &BiphasicSpectrum) -> Result<f64> {
    check_omega("moduli::storage_deficit_k", omega)?;
    Ok(spec
        .relaxation_terms()
        .map(|(a, rho)| {
            let w = omega * rho;
            a * w * quarter_decay(w) / (1.0 + w * w)
        })
        .sum())
}

/// `s_{1/2} = ∫₀^{π/2} √x sin x dx`, computed once by adaptive quadrature.
pub fn s_half() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_intervals: 1000,
        };
        integrate(|x: f64| x.sqrt() * x.sin(), 0.0, FRAC_PI_2, opts)
            .expect("smooth integrand converges")
            .value
    })
}

fn highfreq(omega: f64, nu_s: f64, t_g: f64) -> f64 {
    let k0 = 1.5 / (1.0 + nu_s);
    let coeff = s_half() * (1.0 - 2.0 * nu_s) / (PI.sqrt() * (1.0 - nu_s * nu_s));
    if coeff == 0.0 {
        return k0;
    }
    k0 - coeff / (omega * t_g).sqrt()
}

/// High-frequency law `K̃1 ≈ K0 - s_{1/2}(1-2ν)/(√π(1-ν²)) √(H_A k/a²) / √ω`.
pub fn highfreq_asymptote_k_tilde(omega: f64, p: &MaterialParams) -> Result<f64> {
    const F: &str = "moduli::highfreq_asymptote_k_tilde";
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain {
            func: F,
            value: omega,
            reason: "angular frequency must be positive and finite",
        });
    }
    let d = p.derive_constants()?;
    Ok(highfreq(omega, d.nu_s, d.t_g))
}

/// As [`highfreq_asymptote_k_tilde`], from the constants stored in a spectrum.
pub fn highfreq_asymptote_k_tilde_for(omega: f64, spec: &BiphasicSpectrum) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain {
            func: "moduli::highfreq_asymptote_k_tilde",
            value: omega,
            reason: "angular frequency must be positive and finite",
        });
    }
    Ok(highfreq(omega, spec.nu_s(), spec.gel_time()))
}

/// Truncation bounds `(K1, K2, K̃1)` at `omega`. Compliance bounds follow
/// from [`tail_bounds_m`].
pub fn tail_bounds_k(omega: f64, spec: &BiphasicSpectrum) -> (f64, f64, f64) {
    tail_bounds(omega, spec, RootFamily::Relaxation)
}

/// Truncation bounds `(M1, M2, M̃1)` at `omega`.
pub fn tail_bounds_m(omega: f64, spec: &BiphasicSpectrum) -> (f64, f64, f64) {
    tail_bounds(omega, spec, RootFamily::Retardation)
}

fn tail_bounds(omega: f64, spec: &BiphasicSpectrum, family: RootFamily) -> (f64, f64, f64) {
    let tail = spec.tail(family);
    let w = omega * spec.gel_time();
    (
        tail.power(w, 2),
        tail.power(w, 1),
        INCOMPLETE_TERM_FACTOR * tail.power(w, 2),
    )
}

/// Every modulus and compliance at `omega`.
pub fn evaluate(omega: f64, spec: &BiphasicSpectrum) -> Result<ModuliEval> {
    let (k1, k2) = storage_loss_k(omega, spec)?;
    let (m1, m2) = storage_loss_m(omega, spec)?;
    let (a, b, c) = tail_bounds_k(omega, spec);
    let (d, e, f) = tail_bounds_m(omega, spec);
    Ok(ModuliEval {
        omega,
        k1,
        k2,
        m1,
        m2,
        k1_tilde: incomplete_storage_k(omega, spec)?,
        m1_tilde: incomplete_storage_m(omega, spec)?,
        loss_angle: k2.atan2(k1),
        tail_bound: [a, b, c, d, e, f].into_iter().fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

/// Frequency grid `[min, max]` with `points` nodes (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl FrequencyGrid {
    pub fn new(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        let mut problems = Vec::new();
        let lower = if spacing == Spacing::Log { 0.0 } else { -f64::MIN_POSITIVE };
        if !(min > lower && min.is_finite()) {
            problems.push(format!("frequency grid min must be positive and finite, got {min}"));
        }
        if !(max >= min && max.is_finite()) {
            problems.push(format!("frequency grid max must be finite and >= min, got {max}"));
        }
        if points == 0 || (points == 1 && max != min) {
            problems.push(format!("frequency grid needs at least 2 points for a range, got {points}"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(FrequencyGrid {
            min,
            max,
            points,
            spacing,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.max;
                }
                let u = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * u,
                    Spacing::Log => self.min * (self.max / self.min).powf(u),
                }
            })
            .collect()
    }
}

/// [`evaluate`] over a grid, in grid order.
pub fn sweep(grid: &FrequencyGrid, spec: &BiphasicSpectrum) -> Result<Vec<ModuliEval>> {
    grid.values().into_iter().map(|w| evaluate(w, spec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{creep_truncated, relaxation_truncated};
    use crate::quadrature::integrate_with_breaks;
    use approx::assert_relative_eq;

    fn toy_k() -> BiphasicSpectrum {
        BiphasicSpectrum::from_prony(0.0, 1.0, &[(1.0, 1.0)], &[(0.5, 2.0)]).unwrap()
    }

    fn oracle(kernel: impl Fn(f64) -> f64, omega: f64, rho1: f64) -> f64 {
        let end = FRAC_PI_2 / omega;
        let mut breaks = vec![0.0];
        breaks.extend([1e-6, 1e-4, 1e-2].iter().map(|f| f * rho1).filter(|&b| b < end));
        breaks.push(end);
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_intervals: 10_000,
        };
        omega * integrate_with_breaks(|t| kernel(t) * (omega * t).sin(), &breaks, opts).unwrap().value
    }

    #[test]
    fn zero_frequency_limits() {
        let s = BiphasicSpectrum::new(0.2, 3.0, 100).unwrap();
        let e = evaluate(0.0, &s).unwrap();
        assert_eq!((e.k1, e.k2, e.m1, e.m2), (1.0, 0.0, 1.0, 0.0));
        assert_eq!((e.k1_tilde, e.m1_tilde, e.loss_angle), (1.0, 1.0, 0.0));
        assert!(storage_loss_k(-1.0, &s).is_err());
    }

    #[test]
    fn toy_spectra() {
        let s = toy_k();
        assert_eq!(storage_loss_k(1.0, &s).unwrap(), (1.5, 0.5));
        assert_eq!(storage_loss_m(0.5, &s).unwrap(), (0.75, 0.25));
        let e = (-FRAC_PI_2).exp();
        assert_relative_eq!(incomplete_storage_k(1.0, &s).unwrap(), 1.0 + 0.5 * (1.0 - e), max_relative = 1e-15);
        assert!((incomplete_storage_k(1.0, &s).unwrap() - 1.396060211824619046).abs() < 1e-15);
        let s = BiphasicSpectrum::from_prony(0.0, 1.0, &[], &[(0.5, 1.0)]).unwrap();
        assert_eq!(s.m0(), 0.5);
        assert_relative_eq!(incomplete_storage_m(1.0, &s).unwrap(), 0.5 + 0.25 * (1.0 + e), max_relative = 1e-15);
        assert!((incomplete_storage_m(1.0, &s).unwrap() - 0.8019698940876904771).abs() < 1e-15);
    }

    #[test]
    fn high_frequency_limits() {
        for nu in [0.0, 0.3] {
            let s = BiphasicSpectrum::new(nu, 1.0, 200).unwrap();
            let omega = 1e6 / s.rho()[0];
            let (k1, k2) = storage_loss_k(omega, &s).unwrap();
            let flat_a = s.tail(RootFamily::Relaxation).flat();
            assert!((k1 - s.k0()).abs() < flat_a + 1e-12);
            assert!(k2 < 1e-3);
            let (m1, _) = storage_loss_m(1e6 / s.tau()[0], &s).unwrap();
            assert!((m1 - s.m0()).abs() < s.tail(RootFamily::Retardation).flat() + 1e-12);
            assert!(loss_angle(omega, &s).unwrap() < 1e-3);
        }
    }

    #[test]
    fn loss_angle_interior_maximum() {
        let s = BiphasicSpectrum::new(0.0, 1.0, 200).unwrap();
        let grid = FrequencyGrid::new(1e-3 / s.rho()[0], 1e3 / s.rho()[0], 601, Spacing::Log).unwrap();
        let (imax, dmax) = grid
            .values()
            .iter()
            .map(|&w| loss_angle(w, &s).unwrap())
            .enumerate()
            .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        assert!(imax > 0 && imax < 600);
        // regression baseline
        assert!((dmax - LOSS_ANGLE_MAX_NU0).abs() < 1e-12, "{dmax:.17} at {:.17}", grid.values()[imax] * s.rho()[0]);
        assert!((grid.values()[imax] * s.rho()[0] - LOSS_ANGLE_ARGMAX_NU0).abs() < 1e-9);
    }

    const LOSS_ANGLE_MAX_NU0: f64 = 0.177_519_913_066_086_83;
    const LOSS_ANGLE_ARGMAX_NU0: f64 = 0.851_138_038_202_376_5;

    #[test]
    fn incomplete_moduli_match_defining_integrals() {
        for nu in [0.0, 0.3] {
            let s = BiphasicSpectrum::new(nu, 1.0, 200).unwrap();
            let rho1 = s.rho()[0];
            for wr in [1e-2, 0.3, 1.0, 10.0, 300.0] {
                let omega = wr / rho1;
                let k = oracle(|t| relaxation_truncated(&s, t), omega, rho1);
                assert!((k - incomplete_storage_k(omega, &s).unwrap()).abs() < 1e-8, "nu={nu} wr={wr}");
                let m = oracle(|t| creep_truncated(&s, t), omega, rho1);
                assert!((m - incomplete_storage_m(omega, &s).unwrap()).abs() < 1e-8, "nu={nu} wr={wr}");
            }
        }
    }

    #[test]
    fn deficit_is_positive_and_enveloped() {
        for nu in [0.0, 0.3] {
            let s = BiphasicSpectrum::new(nu, 1.0, 200).unwrap();
            let rho1 = s.rho()[0];
            for wr in [0.02, 0.05, 0.1] {
                let omega = wr / rho1;
                let d = storage_deficit_k(omega, &s).unwrap();
                let (k1, _) = storage_loss_k(omega, &s).unwrap();
                let direct = k1 - incomplete_storage_k(omega, &s).unwrap();
                assert!(d > 0.0);
                assert!((d - direct).abs() < 1e-15);
                assert!(d <= DEFICIT_ENVELOPE * wr * (-FRAC_PI_2 / wr).exp());
            }
        }
    }

    #[test]
    fn incomplete_moduli_bracket_the_storage_moduli() {
        let rel_k = |s: &BiphasicSpectrum, wr: f64| {
            let e = evaluate(wr / s.rho()[0], s).unwrap();
            (e.k1_tilde - e.k1).abs() / e.k1
        };
        let rel_m = |s: &BiphasicSpectrum, wr: f64| {
            let e = evaluate(wr / s.tau()[0], s).unwrap();
            (e.m1_tilde - e.m1).abs() / e.m1
        };
        for nu in [0.0, 0.3] {
            let s = BiphasicSpectrum::new(nu, 1.0, 400).unwrap();
            for wr in [1e-3, 0.01, 0.049] {
                assert!(rel_k(&s, wr) < 0.01 && rel_m(&s, wr) < 0.01, "nu={nu} wr={wr}");
            }
            // the high-frequency gap closes like (ωρ₁)^(-1/2)
            let mut prev = f64::INFINITY;
            for wr in [20.5, 100.0, 1e3, 1e4] {
                let (k, m) = (rel_k(&s, wr), rel_m(&s, wr));
                assert!(k * wr.sqrt() < 0.12 && m * wr.sqrt() < 0.12, "nu={nu} wr={wr}");
                assert!(k < prev);
                prev = k;
            }
        }
        let s = BiphasicSpectrum::new(0.3, 1.0, 400).unwrap();
        assert!(rel_k(&s, 20.5) < 0.01 && rel_m(&s, 20.5) < 0.01);
        // at ν = 0 one percent is reached only near ωρ₁ = 100 (K) and 200 (M)
        let s = BiphasicSpectrum::new(0.0, 1.0, 400).unwrap();
        assert!(rel_k(&s, 20.5) > 0.01);
        assert!(rel_k(&s, 100.0) < 0.01 && rel_m(&s, 200.0) < 0.01);
    }

    #[test]
    fn s_half_pinned() {
        assert!((s_half() - S_HALF).abs() < 1e-15);
        assert!((S_HALF - 0.9774514242913297430586).abs() < 1e-15);
    }

    #[test]
    fn high_frequency_law() {
        let p = MaterialParams::new(1.0, f64::INFINITY, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(highfreq_asymptote_k_tilde(10.0, &p).unwrap(), 1.0);
        assert!(highfreq_asymptote_k_tilde(0.0, &p).is_err());
        let s = BiphasicSpectrum::new(0.2, 1.0, 400).unwrap();
        let rho1 = s.rho()[0];
        let mut scaled = Vec::new();
        for wr in [1e2, 1e3, 1e4] {
            let omega = wr / rho1;
            let n = ((wr.sqrt() * 40.0) as usize).max(400);
            let se = s.extended(n).unwrap();
            let diff = incomplete_storage_k(omega, &se).unwrap() - highfreq_asymptote_k_tilde_for(omega, &se).unwrap();
            scaled.push((diff * omega * rho1).abs());
        }
        assert!(scaled.iter().all(|v| v.is_finite() && *v < 10.0), "{scaled:?}");
    }

    #[test]
    fn storage_modulus_nondecreasing() {
        let s = BiphasicSpectrum::new(0.1, 2.0, 200).unwrap();
        let grid = FrequencyGrid::new(1e-4, 1e4, 200, Spacing::Log).unwrap();
        let sw = sweep(&grid, &s).unwrap();
        assert!(sw.windows(2).all(|w| w[1].k1 >= w[0].k1 && w[1].m1 <= w[0].m1));
        assert!(sw.iter().all(|e| e.k2 >= 0.0 && e.m2 >= 0.0));
        assert!(sw.iter().all(|e| e.loss_angle >= 0.0 && e.loss_angle < FRAC_PI_2));
    }

    #[test]
    fn grids() {
        let g = FrequencyGrid::new(1.0, 100.0, 3, Spacing::Log).unwrap();
        assert_eq!(g.values(), vec![1.0, 10.0, 100.0]);
        let g = FrequencyGrid::new(0.0, 1.0, 5, Spacing::Linear).unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(FrequencyGrid::new(0.0, 1.0, 5, Spacing::Log).is_err());
        assert!(FrequencyGrid::new(2.0, 1.0, 5, Spacing::Linear).is_err());
        assert_eq!(FrequencyGrid::new(3.0, 3.0, 1, Spacing::Log).unwrap().values(), vec![3.0]);
    }
}

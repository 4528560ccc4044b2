//! Material constants, nondimensionalization and the discrete spectra.
//!
//! A [`BiphasicSpectrum`] holds the first `N` roots of both characteristic
//! equations together with the Prony coefficients `A_n`, `B_n` and the
//! relaxation and retardation times `ρ_n = t_g/α_n²`, `τ_n = t_g/β_n²`.
//! Alongside the truncated data it keeps enough information to bound every
//! neglected tail analytically (see [`TailModel`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charroots::{check_poisson, find_roots, CharacteristicRoots, RootFamily};
use crate::error::{Error, Result};

/// Lower bound on the gap between consecutive roots of either family.
///
/// Each root lies in `(j1_{n-1}, j0_n]`; the smallest gap between a zero of
/// `J0` and the following zero of `J1` is `j1_1 - j0_1 = 1.4269`.
const ROOT_GAP: f64 = 1.4;
const MIN_DENOMINATOR: f64 = 1e-300;

/// Elastic constants, permeability and geometry of the specimen, in SI units.
///
/// `lambda_s = +∞` describes an incompressible solid matrix (`ν_s = 1/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Shear Lamé constant μ_s (Pa).
    pub mu_s: f64,
    /// Lamé constant λ_s (Pa).
    pub lambda_s: f64,
    /// Permeability k (m⁴/(N·s)).
    pub k_perm: f64,
    /// Specimen radius a (m).
    pub radius_a: f64,
    /// Sample thickness h (m).
    pub height_h: f64,
}

/// Constants derived from [`MaterialParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub nu_s: f64,
    /// Aggregate (confined compression) modulus `H_A = λ_s + 2μ_s` (Pa).
    pub h_a: f64,
    /// Young's modulus of the solid matrix (Pa).
    pub e_s: f64,
    /// Gel diffusion time `t_g = a²/(H_A k)` (s).
    pub t_g: f64,
}

fn poisson_from_lame(mu_s: f64, lambda_s: f64) -> f64 {
    if lambda_s == f64::INFINITY {
        0.5
    } else {
        lambda_s / (2.0 * (lambda_s + mu_s))
    }
}

impl MaterialParams {
    /// Validated constructor from the Lamé constants.
    pub fn new(mu_s: f64, lambda_s: f64, k_perm: f64, radius_a: f64, height_h: f64) -> Result<Self> {
        let p = MaterialParams {
            mu_s,
            lambda_s,
            k_perm,
            radius_a,
            height_h,
        };
        p.validate()?;
        Ok(p)
    }

    /// Validated constructor from Young's modulus and Poisson's ratio.
    pub fn from_young_poisson(e_s: f64, nu_s: f64, k_perm: f64, radius_a: f64, height_h: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(e_s.is_finite() && e_s > 0.0) {
            problems.push(format!("E_s must be positive and finite, got {e_s}"));
        }
        if !(nu_s > -1.0 && nu_s <= 0.5) {
            problems.push(format!("nu_s must lie in (-1, 0.5], got {nu_s}"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let mu_s = e_s / (2.0 * (1.0 + nu_s));
        let lambda_s = if nu_s == 0.5 {
            f64::INFINITY
        } else {
            2.0 * mu_s * nu_s / (1.0 - 2.0 * nu_s)
        };
        Self::new(mu_s, lambda_s, k_perm, radius_a, height_h)
    }

    /// Check every invariant, collecting all failures.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let positive = |name: &str, v: f64, problems: &mut Vec<String>| {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("{name} must be positive and finite, got {v}"));
            }
        };
        positive("mu_s", self.mu_s, &mut problems);
        positive("k_perm", self.k_perm, &mut problems);
        positive("radius_a", self.radius_a, &mut problems);
        positive("height_h", self.height_h, &mut problems);
        if self.lambda_s.is_nan() || self.lambda_s == f64::NEG_INFINITY {
            problems.push(format!("lambda_s must be a number or +inf, got {}", self.lambda_s));
        } else if self.mu_s.is_finite() && self.mu_s > 0.0 {
            let nu = poisson_from_lame(self.mu_s, self.lambda_s);
            if !(nu > -1.0 && nu <= 0.5) {
                problems.push(format!(
                    "lambda_s = {} gives nu_s = {nu}, outside (-1, 0.5]",
                    self.lambda_s
                ));
            }
            if !(self.lambda_s + 2.0 * self.mu_s > 0.0) {
                problems.push("H_A = lambda_s + 2 mu_s must be positive".to_string());
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn poisson_ratio(&self) -> f64 {
        poisson_from_lame(self.mu_s, self.lambda_s)
    }

    pub fn derive_constants(&self) -> Result<DerivedConstants> {
        self.validate()?;
        let nu_s = self.poisson_ratio();
        let h_a = self.lambda_s + 2.0 * self.mu_s;
        Ok(DerivedConstants {
            nu_s,
            h_a,
            e_s: 2.0 * self.mu_s * (1.0 + nu_s),
            t_g: self.radius_a * self.radius_a / (h_a * self.k_perm),
        })
    }

    /// `t̂ = H_A k t / a²`.
    pub fn nondimensionalize_time(&self, t: f64) -> Result<f64> {
        self.validate()?;
        let h_a = self.lambda_s + 2.0 * self.mu_s;
        Ok(h_a * self.k_perm * t / (self.radius_a * self.radius_a))
    }

    /// `F̂ = F / (π a² μ_s)`.
    pub fn nondimensionalize_force(&self, force: f64) -> Result<f64> {
        self.validate()?;
        Ok(force / (PI * self.radius_a * self.radius_a * self.mu_s))
    }

    /// Stiffness `π a² E_s / h` (N/m) that converts relative moduli into forces.
    pub fn force_scale(&self) -> Result<f64> {
        let d = self.derive_constants()?;
        Ok(PI * self.radius_a * self.radius_a * d.e_s / self.height_h)
    }
}

/// Material file layout: Lamé form or `(E_s, ν_s)` form, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_s_pa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_s_pa: Option<f64>,
    #[serde(default, rename = "E_s_pa", skip_serializing_if = "Option::is_none")]
    pub e_s_pa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_s: Option<f64>,
    pub k_perm: f64,
    pub radius_m: f64,
    pub height_m: f64,
}

impl TryFrom<MaterialFile> for MaterialParams {
    type Error = Error;

    fn try_from(f: MaterialFile) -> Result<Self> {
        match (f.mu_s_pa, f.lambda_s_pa, f.e_s_pa, f.nu_s) {
            (Some(mu), Some(lambda), None, None) => MaterialParams::new(mu, lambda, f.k_perm, f.radius_m, f.height_m),
            (None, None, Some(e), Some(nu)) => {
                MaterialParams::from_young_poisson(e, nu, f.k_perm, f.radius_m, f.height_m)
            }
            _ => Err(Error::Validation(vec![
                "material file needs either mu_s_pa and lambda_s_pa, or E_s_pa and nu_s".to_string(),
            ])),
        }
    }
}

impl From<&MaterialParams> for MaterialFile {
    fn from(p: &MaterialParams) -> Self {
        MaterialFile {
            mu_s_pa: Some(p.mu_s),
            lambda_s_pa: Some(p.lambda_s),
            e_s_pa: None,
            nu_s: None,
            k_perm: p.k_perm,
            radius_m: p.radius_a,
            height_m: p.height_h,
        }
    }
}

/// Coefficient `A_n` for the root `α_n`:
/// `(1-ν)(1-2ν) / ((1+ν)[(1-ν)²α² - (1-2ν)])`.
pub fn coefficient_a(nu_s: f64, alpha: f64) -> Result<f64> {
    const F: &str = "material::coefficient_a";
    check_poisson(F, nu_s)?;
    check_root(F, alpha)?;
    let (num, b, c0) = family_constants(RootFamily::Relaxation, nu_s);
    coefficient(F, num, b, c0, alpha)
}

/// Coefficient `B_n` for the root `β_n`:
/// `4(1-ν²)(1-2ν) / (9(1-ν)²β² - 8(1+ν)(1-2ν))`.
pub fn coefficient_b(nu_s: f64, beta: f64) -> Result<f64> {
    const F: &str = "material::coefficient_b";
    check_poisson(F, nu_s)?;
    check_root(F, beta)?;
    let (num, b, c0) = family_constants(RootFamily::Retardation, nu_s);
    coefficient(F, num, b, c0, beta)
}

fn check_root(func: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain {
            func,
            value: x,
            reason: "root must be positive and finite",
        });
    }
    Ok(())
}

/// Both coefficients have the shape `num / (b x² - c0)`.
fn family_constants(family: RootFamily, nu: f64) -> (f64, f64, f64) {
    let one_m = 1.0 - nu;
    let one_m2 = 1.0 - 2.0 * nu;
    match family {
        RootFamily::Relaxation => (one_m * one_m2 / (1.0 + nu), one_m * one_m, one_m2),
        RootFamily::Retardation => (
            4.0 * (1.0 - nu * nu) * one_m2,
            9.0 * one_m * one_m,
            8.0 * (1.0 + nu) * one_m2,
        ),
    }
}

fn coefficient(func: &'static str, num: f64, b: f64, c0: f64, x: f64) -> Result<f64> {
    let den = b * x * x - c0;
    if den.abs() < MIN_DENOMINATOR {
        return Err(Error::Singular { func, denominator: den });
    }
    Ok(num / den)
}

/// Analytic bound on the neglected part of a Prony series.
///
/// For `n > N` the coefficients obey `|c_n| <= K/x_n²` with
/// `K = num/(b(1 - q))`, `q = c0/(b x_N²)`, and the roots are at least
/// [`ROOT_GAP`] apart, so `Σ_{n>N} f(x_n) <= (1/gap)∫_{x_N}^∞ f(x) dx` for any
/// decreasing weight `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    scale: f64,
    last_root: f64,
}

impl TailModel {
    /// Tail of an exactly finite series.
    pub const NONE: TailModel = TailModel {
        scale: 0.0,
        last_root: f64::INFINITY,
    };

    fn new(num: f64, b: f64, c0: f64, last_root: f64) -> Self {
        if num == 0.0 {
            return Self::NONE;
        }
        let q = c0 / (b * last_root * last_root);
        let scale = if q < 1.0 {
            num.abs() / (b * (1.0 - q) * ROOT_GAP)
        } else {
            f64::INFINITY
        };
        TailModel { scale, last_root }
    }

    /// Bound on `Σ_{n>N} |c_n|`.
    pub fn flat(&self) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.scale / self.last_root
    }

    /// Bound on `Σ_{n>N} |c_n| exp(-x_n² t̂)`.
    pub fn decaying(&self, t_hat: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.flat() * (-self.last_root * self.last_root * t_hat.max(0.0)).exp()
    }

    /// Bound on `Σ_{n>N} |c_n| min(1, (w/x_n²)^p)`.
    pub fn power(&self, w: f64, p: u32) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let x = self.last_root;
        let pf = p as f64;
        let decayed = self.scale * w.abs().powf(pf) / ((2.0 * pf + 1.0) * x.powf(2.0 * pf + 1.0));
        self.flat().min(decayed)
    }
}

#[derive(Debug, Clone)]
enum Source {
    Roots {
        alpha: CharacteristicRoots,
        beta: CharacteristicRoots,
    },
    Prony,
}

/// Truncated relaxation and retardation spectra.
///
/// Immutable once built; [`BiphasicSpectrum::extended`] returns a longer copy.
#[derive(Debug, Clone)]
pub struct BiphasicSpectrum {
    nu_s: f64,
    t_g: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    coeff_a: Vec<f64>,
    coeff_b: Vec<f64>,
    rho: Vec<f64>,
    tau: Vec<f64>,
    tail_a: TailModel,
    tail_b: TailModel,
    source: Source,
}

impl BiphasicSpectrum {
    /// Spectrum with `n_terms` terms for Poisson ratio `nu_s` and gel time `t_g` (s).
    ///
    /// `t_g = 0` is accepted only for the incompressible case, where every
    /// coefficient vanishes.
    pub fn new(nu_s: f64, t_g: f64, n_terms: usize) -> Result<Self> {
        const F: &str = "material::build_spectrum";
        check_poisson(F, nu_s)?;
        if !(t_g.is_finite() && (t_g > 0.0 || (t_g == 0.0 && nu_s == 0.5))) {
            return Err(Error::Domain {
                func: F,
                value: t_g,
                reason: "gel time must be positive and finite",
            });
        }
        let alpha = find_roots(RootFamily::Relaxation, nu_s, n_terms)?;
        let beta = find_roots(RootFamily::Retardation, nu_s, n_terms)?;
        Self::from_roots(nu_s, t_g, alpha, beta)
    }

    pub fn from_material(p: &MaterialParams, n_terms: usize) -> Result<Self> {
        let d = p.derive_constants()?;
        Self::new(d.nu_s, d.t_g, n_terms)
    }

    fn from_roots(nu_s: f64, t_g: f64, alpha: CharacteristicRoots, beta: CharacteristicRoots) -> Result<Self> {
        let (na, ba, ca) = family_constants(RootFamily::Relaxation, nu_s);
        let (nb, bb, cb) = family_constants(RootFamily::Retardation, nu_s);
        let coeff_a = alpha
            .roots
            .iter()
            .map(|&x| coefficient("material::coefficient_a", na, ba, ca, x))
            .collect::<Result<Vec<_>>>()?;
        let coeff_b = beta
            .roots
            .iter()
            .map(|&x| coefficient("material::coefficient_b", nb, bb, cb, x))
            .collect::<Result<Vec<_>>>()?;
        let rho = alpha.roots.iter().map(|x| t_g / (x * x)).collect();
        let tau = beta.roots.iter().map(|x| t_g / (x * x)).collect();
        let last = |r: &CharacteristicRoots| *r.roots.last().expect("at least one root");
        Ok(BiphasicSpectrum {
            nu_s,
            t_g,
            tail_a: TailModel::new(na, ba, ca, last(&alpha)),
            tail_b: TailModel::new(nb, bb, cb, last(&beta)),
            alpha: alpha.roots.clone(),
            beta: beta.roots.clone(),
            coeff_a,
            coeff_b,
            rho,
            tau,
            source: Source::Roots { alpha, beta },
        })
    }

    /// Spectrum given directly as Prony pairs `(A_n, ρ_n)` and `(B_n, τ_n)`.
    ///
    /// The series are exact (zero tails) and the instantaneous values are
    /// `K0 = 1 + ΣA_n`, `M0 = 1 - ΣB_n`. Roots are reported as `sqrt(t_g/ρ_n)`.
    pub fn from_prony(nu_s: f64, t_g: f64, relaxation: &[(f64, f64)], retardation: &[(f64, f64)]) -> Result<Self> {
        let mut problems = Vec::new();
        if !(t_g.is_finite() && t_g > 0.0) {
            problems.push(format!("t_g must be positive and finite, got {t_g}"));
        }
        for (name, pairs) in [("relaxation", relaxation), ("retardation", retardation)] {
            for (i, &(c, time)) in pairs.iter().enumerate() {
                if !c.is_finite() || !(time.is_finite() && time > 0.0) {
                    problems.push(format!("{name} term {i}: coefficient {c}, time {time}"));
                }
            }
            if pairs.windows(2).any(|w| !(w[1].1 < w[0].1)) {
                problems.push(format!("{name} times must be strictly decreasing"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let roots = |pairs: &[(f64, f64)]| pairs.iter().map(|&(_, time)| (t_g / time).sqrt()).collect();
        Ok(BiphasicSpectrum {
            nu_s,
            t_g,
            alpha: roots(relaxation),
            beta: roots(retardation),
            coeff_a: relaxation.iter().map(|p| p.0).collect(),
            coeff_b: retardation.iter().map(|p| p.0).collect(),
            rho: relaxation.iter().map(|p| p.1).collect(),
            tau: retardation.iter().map(|p| p.1).collect(),
            tail_a: TailModel::NONE,
            tail_b: TailModel::NONE,
            source: Source::Prony,
        })
    }

    /// Copy with at least `n_terms` terms; roots already found are reused.
    pub fn extended(&self, n_terms: usize) -> Result<Self> {
        match &self.source {
            Source::Roots { alpha, beta } if n_terms > self.n_terms() => {
                let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
                alpha.extend_to(n_terms)?;
                beta.extend_to(n_terms)?;
                Self::from_roots(self.nu_s, self.t_g, alpha, beta)
            }
            _ => Ok(self.clone()),
        }
    }

    /// Whether the series are truncations of the infinite biphasic spectra
    /// (as opposed to explicitly supplied Prony data).
    pub fn is_truncated(&self) -> bool {
        matches!(self.source, Source::Roots { .. })
    }

    /// Roots and coefficients of one family extended to `n` terms, without
    /// recomputing the other family.
    pub(crate) fn family_terms(&self, family: RootFamily, n: usize) -> Result<(Vec<f64>, Vec<f64>, TailModel)> {
        let (roots, coeffs, tail) = match family {
            RootFamily::Relaxation => (&self.alpha, &self.coeff_a, self.tail_a),
            RootFamily::Retardation => (&self.beta, &self.coeff_b, self.tail_b),
        };
        let Source::Roots { alpha, beta } = &self.source else {
            return Ok((roots.clone(), coeffs.clone(), tail));
        };
        if n <= roots.len() {
            return Ok((roots[..n].to_vec(), coeffs[..n].to_vec(), self.tail_after(family, n)));
        }
        let mut found = match family {
            RootFamily::Relaxation => alpha.clone(),
            RootFamily::Retardation => beta.clone(),
        };
        found.extend_to(n)?;
        let (num, b, c0) = family_constants(family, self.nu_s);
        let func = match family {
            RootFamily::Relaxation => "material::coefficient_a",
            RootFamily::Retardation => "material::coefficient_b",
        };
        let coeffs = found
            .roots
            .iter()
            .map(|&x| coefficient(func, num, b, c0, x))
            .collect::<Result<Vec<_>>>()?;
        let tail = TailModel::new(num, b, c0, found.roots[n - 1]);
        Ok((found.roots, coeffs, tail))
    }

    fn tail_after(&self, family: RootFamily, n: usize) -> TailModel {
        let roots = match family {
            RootFamily::Relaxation => &self.alpha,
            RootFamily::Retardation => &self.beta,
        };
        if !self.is_truncated() || n == roots.len() {
            return self.tail(family);
        }
        let (num, b, c0) = family_constants(family, self.nu_s);
        TailModel::new(num, b, c0, roots[n - 1])
    }

    pub fn nu_s(&self) -> f64 {
        self.nu_s
    }
    pub fn gel_time(&self) -> f64 {
        self.t_g
    }
    /// Number of relaxation terms (equal to the number of retardation terms
    /// for spectra built from roots).
    pub fn n_terms(&self) -> usize {
        self.alpha.len()
    }
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
    pub fn coeff_a(&self) -> &[f64] {
        &self.coeff_a
    }
    pub fn coeff_b(&self) -> &[f64] {
        &self.coeff_b
    }
    /// Relaxation times ρ_n (s).
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
    /// Retardation times τ_n (s).
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// Pairs `(A_n, ρ_n)` with nonzero coefficient, last term first.
    ///
    /// Zero terms are skipped so that the incompressible limit (`ρ_n = 0`)
    /// never produces `0·exp(-t/0)`.
    pub fn relaxation_terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        nonzero_terms(&self.coeff_a, &self.rho)
    }

    /// Pairs `(B_n, τ_n)` with nonzero coefficient, last term first.
    pub fn retardation_terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        nonzero_terms(&self.coeff_b, &self.tau)
    }

    pub fn tail(&self, family: RootFamily) -> TailModel {
        match family {
            RootFamily::Relaxation => self.tail_a,
            RootFamily::Retardation => self.tail_b,
        }
    }

    /// `K0 = K(0)`: `3/(2(1+ν))` for the biphasic spectra, `1 + ΣA_n` for
    /// explicit Prony data.
    pub fn k0(&self) -> f64 {
        match self.source {
            Source::Roots { .. } => 1.5 / (1.0 + self.nu_s),
            Source::Prony => 1.0 + self.coeff_a.iter().sum::<f64>(),
        }
    }

    /// `M0 = M(0)`: `2(1+ν)/3` for the biphasic spectra, `1 - ΣB_n` for
    /// explicit Prony data.
    pub fn m0(&self) -> f64 {
        match self.source {
            Source::Roots { .. } => 2.0 * (1.0 + self.nu_s) / 3.0,
            Source::Prony => 1.0 - self.coeff_b.iter().sum::<f64>(),
        }
    }

    /// `|1 + Σ A_n - K0|` for the stored terms.
    pub fn sum_identity_deviation_a(&self) -> f64 {
        (1.0 + self.coeff_a.iter().sum::<f64>() - self.k0()).abs()
    }

    /// `|1 - Σ B_n - M0|` for the stored terms.
    pub fn sum_identity_deviation_b(&self) -> f64 {
        (1.0 - self.coeff_b.iter().sum::<f64>() - self.m0()).abs()
    }

    /// Terms whose coefficient is not strictly positive. Expected to be empty
    /// for `ν ∈ [0, 1/2)`.
    pub fn nonpositive_coefficients(&self) -> Vec<(RootFamily, usize)> {
        let pick = |family, c: &[f64]| {
            c.iter()
                .enumerate()
                .filter(|(_, &v)| !(v > 0.0))
                .map(move |(i, _)| (family, i))
                .collect::<Vec<_>>()
        };
        if self.nu_s == 0.5 && self.is_truncated() {
            return Vec::new();
        }
        let mut out = pick(RootFamily::Relaxation, &self.coeff_a);
        out.extend(pick(RootFamily::Retardation, &self.coeff_b));
        out
    }
}

fn nonzero_terms<'a>(coeffs: &'a [f64], times: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
    coeffs
        .iter()
        .zip(times)
        .rev()
        .filter(|(c, _)| **c != 0.0)
        .map(|(&c, &time)| (c, time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cartilage() -> MaterialParams {
        MaterialParams::new(0.25e6, 0.25e6, 1e-15, 3e-3, 1e-3).unwrap()
    }

    #[test]
    fn derived_constants_examples() {
        let d = MaterialParams::new(1.0, 0.0, 1.0, 1.0, 1.0)
            .unwrap()
            .derive_constants()
            .unwrap();
        assert_eq!((d.nu_s, d.h_a, d.e_s), (0.0, 2.0, 2.0));
        let d = MaterialParams::new(1.0, 1.0, 1.0, 1.0, 1.0)
            .unwrap()
            .derive_constants()
            .unwrap();
        assert_eq!((d.nu_s, d.h_a, d.e_s), (0.25, 3.0, 2.5));
        // 9e-6 / (0.75e6 * 1e-15)
        let d = cartilage().derive_constants().unwrap();
        assert_relative_eq!(d.t_g, 12000.0, max_relative = 1e-14);
    }

    #[test]
    fn nondimensional_scales() {
        let p = cartilage();
        let t_g = p.derive_constants().unwrap().t_g;
        assert_relative_eq!(p.nondimensionalize_time(t_g).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.nondimensionalize_time(6000.0).unwrap(), 0.5, max_relative = 1e-14);
        let f = PI * p.radius_a * p.radius_a * p.mu_s;
        assert_relative_eq!(p.nondimensionalize_force(f).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            p.force_scale().unwrap(),
            PI * 9e-6 * 0.625e6 / 1e-3,
            max_relative = 1e-14
        );
    }

    #[test]
    fn validation_lists_every_failure() {
        let err = MaterialParams::new(-1.0, f64::NAN, 0.0, 1.0, -2.0).unwrap_err();
        let Error::Validation(list) = err else {
            panic!("expected validation error")
        };
        assert_eq!(list.len(), 4, "{list:?}");
        assert!(list.iter().any(|m| m.contains("mu_s")));
        assert!(list.iter().any(|m| m.contains("k_perm")));
        assert!(list.iter().any(|m| m.contains("height_h")));
        assert!(list.iter().any(|m| m.contains("lambda_s")));
        // λ = -0.7 μ gives ν = -7/6
        assert!(MaterialParams::new(1.0, -0.7, 1.0, 1.0, 1.0).is_err());
        assert!(MaterialParams::new(1.0, -0.66, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn young_poisson_round_trip() {
        let p = MaterialParams::from_young_poisson(0.625e6, 0.25, 1e-15, 3e-3, 1e-3).unwrap();
        assert_relative_eq!(p.mu_s, 0.25e6, max_relative = 1e-15);
        assert_relative_eq!(p.lambda_s, 0.25e6, max_relative = 1e-15);
        let inc = MaterialParams::from_young_poisson(3.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        let d = inc.derive_constants().unwrap();
        assert_eq!((d.nu_s, d.h_a, d.e_s, d.t_g), (0.5, f64::INFINITY, 3.0, 0.0));
    }

    #[test]
    fn material_file_forms() {
        let lame = MaterialFile {
            mu_s_pa: Some(0.25e6),
            lambda_s_pa: Some(0.25e6),
            e_s_pa: None,
            nu_s: None,
            k_perm: 1e-15,
            radius_m: 3e-3,
            height_m: 1e-3,
        };
        assert_eq!(MaterialParams::try_from(lame.clone()).unwrap(), cartilage());
        assert_eq!(MaterialFile::from(&cartilage()), lame);
        let mixed = MaterialFile {
            nu_s: Some(0.2),
            ..lame
        };
        assert!(matches!(MaterialParams::try_from(mixed), Err(Error::Validation(_))));
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficient_a(0.5, 3.7).unwrap(), 0.0);
        assert_eq!(coefficient_b(0.5, 3.7).unwrap(), 0.0);
        assert_relative_eq!(coefficient_a(0.0, 2.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(coefficient_b(0.0, 2.0).unwrap(), 1.0 / 7.0, max_relative = 1e-15);
        // 50-digit references for the first roots
        let alpha1 = find_roots(RootFamily::Relaxation, 0.0, 1).unwrap().roots[0];
        assert!((coefficient_a(0.0, alpha1).unwrap() - 0.4184174443858110651).abs() < 1e-12);
        let beta1 = find_roots(RootFamily::Retardation, 0.3, 1).unwrap().roots[0];
        assert!((coefficient_b(0.3, beta1).unwrap() - 0.1066862661026436677).abs() < 1e-12);
        // (1-ν)²α² = 1-2ν at ν = 0, α = 1
        assert!(matches!(coefficient_a(0.0, 1.0), Err(Error::Singular { .. })));
        assert!(coefficient_a(0.7, 2.0).is_err());
        assert!(coefficient_b(0.0, -1.0).is_err());
    }

    #[test]
    fn spectrum_structure() {
        let s = BiphasicSpectrum::from_material(&cartilage(), 50).unwrap();
        assert_eq!(s.n_terms(), 50);
        assert_eq!(s.nu_s(), 0.25);
        assert_relative_eq!(s.rho()[0], 12000.0 / (s.alpha()[0] * s.alpha()[0]), max_relative = 1e-15);
        assert!(s.rho().windows(2).all(|w| w[1] < w[0]));
        assert!(s.tau().windows(2).all(|w| w[1] < w[0]));
        assert!(s.nonpositive_coefficients().is_empty());
        assert_relative_eq!(s.k0(), 1.2, max_relative = 1e-15);
        assert_relative_eq!(s.m0(), 2.5 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn incompressible_spectrum_is_elastic() {
        let s = BiphasicSpectrum::new(0.5, 100.0, 5).unwrap();
        assert!(s.coeff_a().iter().chain(s.coeff_b()).all(|&c| c == 0.0));
        assert!(s.rho().iter().all(|&r| r > 0.0));
        assert_eq!(s.tail(RootFamily::Relaxation).flat(), 0.0);
        assert_eq!((s.k0(), s.m0()), (1.0, 1.0));
        assert!(BiphasicSpectrum::new(0.5, 0.0, 3).is_ok());
        assert!(BiphasicSpectrum::new(0.3, 0.0, 3).is_err());
    }

    #[test]
    fn sum_identities_converge_within_tail_bounds() {
        for nu in [-0.5, 0.0, 0.2, 0.45] {
            let mut prev = (f64::INFINITY, f64::INFINITY);
            for n in [50, 100, 200, 400] {
                let s = BiphasicSpectrum::new(nu, 1.0, n).unwrap();
                let (da, db) = (s.sum_identity_deviation_a(), s.sum_identity_deviation_b());
                assert!(da <= s.tail(RootFamily::Relaxation).flat(), "nu={nu} n={n}");
                assert!(db <= s.tail(RootFamily::Retardation).flat(), "nu={nu} n={n}");
                assert!(da < prev.0 && db < prev.1);
                prev = (da, db);
            }
        }
        let s = BiphasicSpectrum::new(0.0, 1.0, 200).unwrap();
        assert!(s.sum_identity_deviation_a() < 1e-3);
        // partial sums approach from below
        assert!(1.0 + s.coeff_a().iter().sum::<f64>() < 1.5);
    }

    #[test]
    fn coefficients_decay_like_inverse_square_roots() {
        let s = BiphasicSpectrum::new(0.1, 1.0, 51).unwrap();
        for (c, x) in [(s.coeff_a(), s.alpha()), (s.coeff_b(), s.beta())] {
            let ratio = c[50] / c[49];
            let expected = (x[49] / x[50]).powi(2);
            assert!((ratio / expected - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn extension_matches_fresh_build() {
        let s = BiphasicSpectrum::new(0.3, 7.0, 20).unwrap();
        let e = s.extended(60).unwrap();
        let f = BiphasicSpectrum::new(0.3, 7.0, 60).unwrap();
        assert_eq!(e.alpha(), f.alpha());
        assert_eq!(e.coeff_b(), f.coeff_b());
        assert_eq!(e.tail(RootFamily::Retardation), f.tail(RootFamily::Retardation));
        let (roots, coeffs, tail) = s.family_terms(RootFamily::Relaxation, 60).unwrap();
        assert_eq!(roots, f.alpha());
        assert_eq!(coeffs, f.coeff_a());
        assert_eq!(tail, f.tail(RootFamily::Relaxation));
        let (_, _, tail) = f.family_terms(RootFamily::Relaxation, 20).unwrap();
        assert_eq!(tail, s.tail(RootFamily::Relaxation));
    }

    #[test]
    fn tail_model_bounds_actual_tails() {
        let long = BiphasicSpectrum::new(0.0, 1.0, 3000).unwrap();
        let n = 100;
        let tail = long.tail_after(RootFamily::Relaxation, n);
        let a = &long.coeff_a()[n..];
        let x = &long.alpha()[n..];
        // the first 2900 neglected terms are a lower bound for the true tail
        assert!(a.iter().sum::<f64>() < tail.flat());
        for t_hat in [1e-5, 1e-4, 1e-3] {
            let s: f64 = a.iter().zip(x).map(|(a, x)| a * (-x * x * t_hat).exp()).sum();
            assert!(s < tail.decaying(t_hat));
        }
        for w in [1.0, 1e3, 1e5, 1e7] {
            for p in [1, 2] {
                let s: f64 = a.iter().zip(x).map(|(a, x)| a * (w / (x * x)).powi(p as i32).min(1.0)).sum();
                assert!(s <= tail.power(w, p), "w={w} p={p}");
            }
        }
    }

    #[test]
    fn prony_spectrum() {
        let s = BiphasicSpectrum::from_prony(0.0, 1.0, &[(1.0, 1.0)], &[(0.5, 2.0)]).unwrap();
        assert_eq!((s.k0(), s.m0()), (2.0, 0.5));
        assert_eq!(s.tail(RootFamily::Relaxation).flat(), 0.0);
        assert!(!s.is_truncated());
        assert!(BiphasicSpectrum::from_prony(0.0, 1.0, &[(1.0, 1.0), (1.0, 2.0)], &[]).is_err());
    }
}

//! Roots of the two characteristic equations `J0(x) - c J1(x)/x = 0`.
//!
//! The relaxation family (roots `α_n`) uses `c = (1 - 2ν)/(1 - ν)`, the
//! retardation family (roots `β_n`) uses `c = 4(1 - 2ν)/(3(1 - ν))`.
//!
//! Roots are located by scanning contiguous intervals of width π/2 for sign
//! changes and bisecting each bracket down to adjacent floating-point numbers.
//! Consecutive roots are more than π/2 apart (each root lies between the
//! preceding zero of `J1` and the next zero of `J0`), so a scan interval never
//! holds two roots.
//!
//! For `ν ∈ (-1, 1/2]` both constants satisfy `0 <= c < 2`, hence
//! `g(0) = 1 - c/2 > 0`. The scan starts at `x = 0.05`; a root below that point
//! only exists when `c` is within a hair of 2 (`ν → -1`) and is caught by an
//! explicit check of the sign of `g(0.05)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{j0_unchecked, j1_over_x_unchecked};

const SCAN_START: f64 = 0.05;
const SCAN_WIDTH: f64 = FRAC_PI_2;
const MAX_ROOTS: usize = 10_000;
const RESIDUAL_LIMIT: f64 = 1e-12;
/// Consecutive empty scan intervals tolerated before declaring a bracketing failure.
const MAX_EMPTY_INTERVALS: usize = 4;

/// Which characteristic equation a root sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootFamily {
    /// Roots `α_n`, feeding the relaxation spectrum.
    Relaxation,
    /// Roots `β_n`, feeding the retardation spectrum.
    Retardation,
}

pub(crate) fn check_poisson(func: &'static str, nu_s: f64) -> Result<()> {
    if !(nu_s.is_finite() && nu_s > -1.0 && nu_s <= 0.5) {
        return Err(Error::Domain {
            func,
            value: nu_s,
            reason: "Poisson ratio must lie in (-1, 0.5]",
        });
    }
    Ok(())
}

/// The constant `c` of the characteristic equation for `family`.
pub fn characteristic_c(family: RootFamily, nu_s: f64) -> Result<f64> {
    check_poisson("charroots::characteristic_c", nu_s)?;
    let base = (1.0 - 2.0 * nu_s) / (1.0 - nu_s);
    Ok(match family {
        RootFamily::Relaxation => base,
        RootFamily::Retardation => 4.0 * base / 3.0,
    })
}

/// `g(x) = J0(x) - c J1(x)/x`.
pub fn characteristic_function(c: f64, x: f64) -> f64 {
    j0_unchecked(x) - c * j1_over_x_unchecked(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ScanCursor {
    lo: f64,
    /// Sign of `g` just right of `lo`.
    sign: f64,
}

/// The first roots of one characteristic equation, with their residuals `|g(x)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRoots {
    pub family: RootFamily,
    pub nu_s: f64,
    pub c: f64,
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
    cursor: ScanCursor,
}

impl CharacteristicRoots {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Continue the scan until `n` roots are known. The result is identical to
    /// a fresh `find_roots(family, nu_s, n)`.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        const F: &str = "charroots::find_roots";
        if n > MAX_ROOTS {
            return Err(Error::Domain {
                func: F,
                value: n as f64,
                reason: "at most 10000 roots",
            });
        }
        let c = self.c;
        let g = |x: f64| characteristic_function(c, x);
        let start = self.roots.len();
        scan(&g, &mut self.cursor, n, &mut self.roots)?;
        for (i, &x) in self.roots.iter().enumerate().skip(start) {
            let r = g(x).abs();
            if r > RESIDUAL_LIMIT {
                return Err(Error::Residual {
                    func: F,
                    index: i + 1,
                    root: x,
                    residual: r,
                });
            }
            self.residuals.push(r);
        }
        Ok(())
    }
}

/// The first `n` positive roots of the characteristic equation of `family`.
pub fn find_roots(family: RootFamily, nu_s: f64, n: usize) -> Result<CharacteristicRoots> {
    const F: &str = "charroots::find_roots";
    check_poisson(F, nu_s)?;
    if n == 0 || n > MAX_ROOTS {
        return Err(Error::Domain {
            func: F,
            value: n as f64,
            reason: "root count must lie in [1, 10000]",
        });
    }
    let c = characteristic_c(family, nu_s)?;
    let g = |x: f64| characteristic_function(c, x);
    let mut out = CharacteristicRoots {
        family,
        nu_s,
        c,
        roots: Vec::with_capacity(n),
        residuals: Vec::with_capacity(n),
        cursor: ScanCursor {
            lo: SCAN_START,
            sign: 1.0,
        },
    };
    let g_start = g(SCAN_START);
    if g_start <= 0.0 {
        // g(0) = 1 - c/2 > 0, so a root sits in (0, SCAN_START].
        let x = if g_start == 0.0 {
            SCAN_START
        } else {
            bisect(&g, 0.0, SCAN_START, 1.0)
        };
        let r = g(x).abs();
        if r > RESIDUAL_LIMIT {
            return Err(Error::Residual {
                func: F,
                index: 1,
                root: x,
                residual: r,
            });
        }
        out.roots.push(x);
        out.residuals.push(r);
        out.cursor.sign = -1.0;
    }
    out.extend_to(n)?;
    Ok(out)
}

fn scan(g: &impl Fn(f64) -> f64, cursor: &mut ScanCursor, n: usize, out: &mut Vec<f64>) -> Result<()> {
    let mut empty = 0;
    while out.len() < n {
        let lo = cursor.lo;
        let hi = lo + SCAN_WIDTH;
        let g_hi = g(hi);
        if g_hi == 0.0 {
            out.push(hi);
            cursor.sign = -cursor.sign;
            empty = 0;
        } else if g_hi.signum() != cursor.sign {
            out.push(bisect(g, lo, hi, cursor.sign));
            cursor.sign = g_hi.signum();
            empty = 0;
        } else {
            empty += 1;
            if empty > MAX_EMPTY_INTERVALS {
                return Err(Error::Bracket {
                    func: "charroots::find_roots",
                    lo: hi - SCAN_WIDTH * empty as f64,
                    hi,
                });
            }
        }
        cursor.lo = hi;
    }
    Ok(())
}

/// Bisection on `[lo, hi]` where `g` has sign `sign_lo` near `lo` and the
/// opposite sign at `hi`; runs until the bracket endpoints are adjacent doubles.
fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, sign_lo: f64) -> f64 {
    for _ in 0..2100 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

/// McMahon-type estimate of the `k`-th root, used as a bracket centre.
///
/// Starts from the asymptotic `k`-th zero of `J0` and shifts it by `-c/x`,
/// the first-order effect of the `c J1(x)/x` term. Accurate to `O(1/k)`.
pub fn large_root_asymptote(family: RootFamily, nu_s: f64, k: usize) -> Result<f64> {
    let c = characteristic_c(family, nu_s)?;
    if k == 0 {
        return Err(Error::Domain {
            func: "charroots::large_root_asymptote",
            value: 0.0,
            reason: "root index starts at 1",
        });
    }
    let b = (k as f64 - 0.25) * PI;
    let b2 = b * b;
    let j0_zero = b + 1.0 / (8.0 * b) - 31.0 / (384.0 * b * b2) + 3779.0 / (15360.0 * b * b2 * b2);
    Ok(j0_zero - c / j0_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn j0_taylor(x: f64) -> f64 {
        let q = -x * x / 4.0;
        let (mut t, mut s) = (1.0, 1.0);
        for k in 1..60 {
            t *= q / (k * k) as f64;
            s += t;
        }
        s
    }

    fn j1_over_x_taylor(x: f64) -> f64 {
        let q = -x * x / 4.0;
        let (mut t, mut s) = (0.5, 0.5);
        for k in 1..60 {
            t *= q / (k * (k + 1)) as f64;
            s += t;
        }
        s
    }

    fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        let flo = f(lo);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    const NUS: [f64; 7] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.499, 0.5];

    #[test]
    fn characteristic_constants() {
        assert_eq!(characteristic_c(RootFamily::Relaxation, 0.5).unwrap(), 0.0);
        assert_eq!(characteristic_c(RootFamily::Relaxation, 0.0).unwrap(), 1.0);
        assert_eq!(characteristic_c(RootFamily::Retardation, 0.0).unwrap(), 4.0 / 3.0);
        assert!(characteristic_c(RootFamily::Relaxation, 0.6).is_err());
        assert!(characteristic_c(RootFamily::Relaxation, -1.0).is_err());
        assert!(characteristic_c(RootFamily::Retardation, f64::NAN).is_err());
    }

    #[test]
    fn incompressible_roots_are_j0_zeros() {
        let r = find_roots(RootFamily::Relaxation, 0.5, 3).unwrap();
        let expected = [2.404825557695773, 5.520078110286311, 8.653727912911013];
        for (k, (&x, e)) in r.roots.iter().zip(expected).enumerate() {
            let oracle = bisect_oracle(j0_taylor, e - 0.3, e + 0.3, 1e-15);
            assert!((x - oracle).abs() < 1e-12, "root {k}: {x} vs {oracle}");
            assert!((x - e).abs() < 1e-12);
        }
        let b = find_roots(RootFamily::Retardation, 0.5, 2).unwrap();
        assert_eq!(b.roots, r.roots[..2]);
    }

    #[test]
    fn first_relaxation_root_at_zero_poisson() {
        let g = |x: f64| j0_taylor(x) - j1_over_x_taylor(x);
        let mut x = 0.1;
        let mut bracket = None;
        while x < 6.0 {
            if g(x) * g(x + 0.05) < 0.0 {
                bracket = Some((x, x + 0.05));
                break;
            }
            x += 0.05;
        }
        let (lo, hi) = bracket.unwrap();
        let oracle = bisect_oracle(g, lo, hi, 1e-14);
        let r = find_roots(RootFamily::Relaxation, 0.0, 1).unwrap();
        assert!((r.roots[0] - oracle).abs() < 1e-12);
        // 40-digit reference: 1.841183781340659302...
        assert!((r.roots[0] - 1.8411837813406593).abs() < 1e-14);
    }

    #[test]
    fn residuals_within_bound_across_poisson_grid() {
        for nu in NUS {
            for family in [RootFamily::Relaxation, RootFamily::Retardation] {
                let r = find_roots(family, nu, 200).unwrap();
                assert_eq!(r.len(), 200);
                assert!(r.roots[0] > 0.0);
                assert!(r.roots.windows(2).all(|w| w[1] > w[0]));
                assert!(r.residuals.iter().all(|&e| e <= 1e-12));
            }
        }
    }

    #[test]
    fn roots_move_continuously_with_poisson_ratio() {
        for i in 0..9 {
            let nu = -0.4 + 0.1 * i as f64;
            let a = find_roots(RootFamily::Relaxation, nu, 20).unwrap();
            let b = find_roots(RootFamily::Relaxation, nu + 1e-4, 20).unwrap();
            for (x, y) in a.roots.iter().zip(&b.roots) {
                assert!((x - y).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn spacing_tends_to_pi() {
        for nu in [0.0, 0.3] {
            let r = find_roots(RootFamily::Retardation, nu, 60).unwrap();
            for k in 49..59 {
                assert!((r.roots[k + 1] - r.roots[k] - PI).abs() < 0.05);
            }
        }
    }

    #[test]
    fn deterministic_and_extendable() {
        let a = find_roots(RootFamily::Relaxation, 0.27, 150).unwrap();
        let b = find_roots(RootFamily::Relaxation, 0.27, 150).unwrap();
        assert_eq!(a, b);
        let mut short = find_roots(RootFamily::Relaxation, 0.27, 40).unwrap();
        short.extend_to(150).unwrap();
        assert_eq!(short.roots, a.roots);
        assert_eq!(short.residuals, a.residuals);
    }

    #[test]
    fn asymptote_examples() {
        let j1 = large_root_asymptote(RootFamily::Relaxation, 0.5, 1).unwrap();
        assert!((j1 - 2.404825557695773).abs() < 0.01);
        let zeros = find_roots(RootFamily::Relaxation, 0.5, 10).unwrap();
        let j10 = large_root_asymptote(RootFamily::Relaxation, 0.5, 10).unwrap();
        assert!((j10 - zeros.roots[9]).abs() < 0.01);
        for nu in NUS {
            for family in [RootFamily::Relaxation, RootFamily::Retardation] {
                let c = characteristic_c(family, nu).unwrap();
                let x = large_root_asymptote(family, nu, 100).unwrap();
                let (lo, hi) = (x - FRAC_PI_2, x + FRAC_PI_2);
                assert!(characteristic_function(c, lo) * characteristic_function(c, hi) < 0.0);
                let roots = find_roots(family, nu, 100).unwrap();
                assert!(roots.roots[99] > lo && roots.roots[99] < hi);
            }
        }
        assert!(large_root_asymptote(RootFamily::Relaxation, 0.2, 0).is_err());
    }

    #[test]
    fn near_incompressible_limit_of_negative_poisson() {
        // c_β → 2 as ν → -1; the first root approaches the origin.
        let r = find_roots(RootFamily::Retardation, -0.9999, 3).unwrap();
        assert!(r.roots[0] < 0.05);
        assert!(r.residuals.iter().all(|&e| e <= 1e-12));
    }

    #[test]
    fn scan_reports_missing_sign_change() {
        let mut cursor = ScanCursor { lo: 0.05, sign: 1.0 };
        let mut out = Vec::new();
        let err = scan(&|_x: f64| 1.0, &mut cursor, 1, &mut out).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn domain_checks() {
        assert!(find_roots(RootFamily::Relaxation, 0.2, 0).is_err());
        assert!(find_roots(RootFamily::Relaxation, 0.2, 10_001).is_err());
        assert!(find_roots(RootFamily::Relaxation, 0.7, 3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_poisson_ratios_give_clean_roots(nu in -0.95f64..=0.5, n in 1usize..30) {
            for family in [RootFamily::Relaxation, RootFamily::Retardation] {
                let r = find_roots(family, nu, n).unwrap();
                prop_assert_eq!(r.len(), n);
                prop_assert!(r.roots.windows(2).all(|w| w[1] - w[0] > FRAC_PI_2));
                prop_assert!(r.residuals.iter().all(|&e| e <= 1e-12));
            }
        }
    }
}

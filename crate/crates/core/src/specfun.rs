//! Bessel functions of integer order 0 and 1.
//!
//! Only the four functions the model needs are provided: `J0`, `J1` on the real
//! line and `I0`, `I1` on the closed right half-plane (extended to the left
//! half-plane by parity). Evaluation is split into three regimes:
//!
//! * `|x| < 2`: ascending power series, no cancellation to speak of.
//! * `2 <= |x| < 25`: Miller's backward recurrence normalised by the Neumann
//!   sum `1 = J0 + 2 Σ J_2k` (real `J`) or `e^z = I0 + 2 Σ I_k` (complex `I`).
//!   Both sums are free of cancellation in their respective regimes.
//! * `|x| >= 25`: Hankel asymptotic expansions, summed until the terms drop
//!   below `1e-17`; the smallest term at `|x| = 25` is of order `e^-50`.
//!
//! The modified functions are computed exponentially scaled (`e^-z I_n(z)`),
//! which keeps the `I1/I0` ratio finite for arbitrarily large arguments.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;
const J_ARG_MAX: f64 = 1.0e6;
const I_ARG_MAX: f64 = 700.0;
const EPS: f64 = f64::EPSILON;

/// A function value with a conservative absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub value: f64,
    pub abs_error_bound: f64,
}

fn check_j_arg(func: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain {
            func,
            value: x,
            reason: "argument must be finite",
        });
    }
    if x.abs() > J_ARG_MAX {
        return Err(Error::Domain {
            func,
            value: x,
            reason: "|x| must not exceed 1e6",
        });
    }
    Ok(())
}

fn check_i_arg(func: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain {
            func,
            value: x,
            reason: "argument must be finite",
        });
    }
    if x < 0.0 {
        return Err(Error::Domain {
            func,
            value: x,
            reason: "argument must be non-negative",
        });
    }
    Ok(())
}

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_j_arg("specfun::bessel_j0", x)?;
    Ok(j01(x.abs()).0.value)
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1(x: f64) -> Result<f64> {
    check_j_arg("specfun::bessel_j1", x)?;
    let v = j01(x.abs()).1.value;
    Ok(if x < 0.0 { -v } else { v })
}

/// `J0(x)` together with its error estimate.
pub fn bessel_j0_eval(x: f64) -> Result<BesselEval> {
    check_j_arg("specfun::bessel_j0", x)?;
    Ok(j01(x.abs()).0)
}

/// `J1(x)` together with its error estimate.
pub fn bessel_j1_eval(x: f64) -> Result<BesselEval> {
    check_j_arg("specfun::bessel_j1", x)?;
    let mut e = j01(x.abs()).1;
    if x < 0.0 {
        e.value = -e.value;
    }
    Ok(e)
}

/// `J1(x)/x`, continuous through the origin where it equals 1/2.
pub fn bessel_j1_over_x(x: f64) -> Result<f64> {
    check_j_arg("specfun::bessel_j1_over_x", x)?;
    Ok(j1_over_x_unchecked(x))
}

/// `J0(x)` for finite `|x| <= 1e6`, no argument checks.
pub(crate) fn j0_unchecked(x: f64) -> f64 {
    j01(x.abs()).0.value
}

pub(crate) fn j1_over_x_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        // J1(x)/x = 1/2 Σ (-x²/4)^k / (k! (k+1)!)
        let q = -0.25 * ax * ax;
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 1..40 {
            term *= q / (k as f64 * (k + 1) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        j01(ax).1.value / ax
    }
}

fn j01(x: f64) -> (BesselEval, BesselEval) {
    debug_assert!(x >= 0.0);
    if x < SERIES_LIMIT {
        j01_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        j01_miller(x)
    } else {
        (j_hankel(x, 0), j_hankel(x, 1))
    }
}

fn j01_series(x: f64) -> (BesselEval, BesselEval) {
    let q = -0.25 * x * x;
    let (mut t0, mut t1) = (1.0, 0.5 * x);
    let (mut s0, mut s1) = (t0, t1);
    let (mut a0, mut a1) = (1.0, t1.abs());
    for k in 1..40 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        a0 += t0.abs();
        a1 += t1.abs();
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (
        BesselEval {
            value: s0,
            abs_error_bound: 4.0 * EPS * a0,
        },
        BesselEval {
            value: s1,
            abs_error_bound: 4.0 * EPS * a1,
        },
    )
}

fn miller_start(x: f64) -> usize {
    let n = (x + 40.0 + 4.0 * x.sqrt()) as usize;
    n + (n & 1)
}

fn j01_miller(x: f64) -> (BesselEval, BesselEval) {
    let n = miller_start(x);
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1.0e-30; // J_k
    let mut norm = 0.0;
    for k in (1..=n).rev() {
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1.0e250 {
            cur *= 1.0e-250;
            next *= 1.0e-250;
            norm *= 1.0e-250;
        }
    }
    norm += cur;
    let bound = 64.0 * EPS;
    (
        BesselEval {
            value: cur / norm,
            abs_error_bound: bound,
        },
        BesselEval {
            value: next / norm,
            abs_error_bound: bound,
        },
    )
}

/// Hankel expansion of `J_order(x)` for large positive `x`.
fn j_hankel(x: f64, order: u32) -> BesselEval {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0;
    let (mut p, mut q) = (1.0, 0.0);
    let mut last = 0.0;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() {
            last = term.abs();
            break;
        }
        term = next;
        // a_k / x^k enters P for even k and Q for odd k, with alternating signs
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        last = term.abs();
        if term.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) / 2f64.sqrt(), (s - c) / 2f64.sqrt())
    } else {
        ((s - c) / 2f64.sqrt(), -(s + c) / 2f64.sqrt())
    };
    let pref = (2.0 / (PI * x)).sqrt();
    BesselEval {
        value: pref * (p * cos_chi - q * sin_chi),
        abs_error_bound: pref * (last + 8.0 * EPS),
    }
}

/// Modified Bessel function `I0(x)`, `0 <= x <= 700`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    const F: &str = "specfun::bessel_i0";
    check_i_arg(F, x)?;
    if x > I_ARG_MAX {
        return Err(Error::Range { func: F, value: x });
    }
    Ok(i01_scaled(Complex64::new(x, 0.0)).0.re * x.exp())
}

/// Modified Bessel function `I1(x)`, `0 <= x <= 700`.
pub fn bessel_i1(x: f64) -> Result<f64> {
    const F: &str = "specfun::bessel_i1";
    check_i_arg(F, x)?;
    if x > I_ARG_MAX {
        return Err(Error::Range { func: F, value: x });
    }
    Ok(i01_scaled(Complex64::new(x, 0.0)).1.re * x.exp())
}

/// `e^-x I0(x)` for any finite `x >= 0`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check_i_arg("specfun::bessel_i0_scaled", x)?;
    Ok(i01_scaled(Complex64::new(x, 0.0)).0.re)
}

/// `e^-x I1(x)` for any finite `x >= 0`.
pub fn bessel_i1_scaled(x: f64) -> Result<f64> {
    check_i_arg("specfun::bessel_i1_scaled", x)?;
    Ok(i01_scaled(Complex64::new(x, 0.0)).1.re)
}

/// `I1(x)/I0(x)`; increases from 0 at the origin towards 1 as `x → ∞`.
pub fn bessel_i_ratio(x: f64) -> Result<f64> {
    check_i_arg("specfun::bessel_i_ratio", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let (s0, s1) = i01_scaled(Complex64::new(x, 0.0));
    Ok(s1.re / s0.re)
}

fn check_complex(func: &'static str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain {
            func,
            value: if z.re.is_finite() { z.im } else { z.re },
            reason: "argument must be finite",
        });
    }
    Ok(())
}

/// Complex `I0(z)`; `I0` is even, so any finite `z` with `|Re z| <= 700` works.
pub fn bessel_i0_complex(z: Complex64) -> Result<Complex64> {
    const F: &str = "specfun::bessel_i0_complex";
    check_complex(F, z)?;
    let (w, _) = reflect(z);
    if w.re > I_ARG_MAX {
        return Err(Error::Range { func: F, value: w.re });
    }
    Ok(i01_scaled(w).0 * w.exp())
}

/// Complex `I1(z)`; odd in `z`.
pub fn bessel_i1_complex(z: Complex64) -> Result<Complex64> {
    const F: &str = "specfun::bessel_i1_complex";
    check_complex(F, z)?;
    let (w, sign) = reflect(z);
    if w.re > I_ARG_MAX {
        return Err(Error::Range { func: F, value: w.re });
    }
    Ok(i01_scaled(w).1 * w.exp() * sign)
}

/// Complex `I1(z)/I0(z)`, overflow-free for any finite `z`.
pub fn bessel_i_ratio_complex(z: Complex64) -> Result<Complex64> {
    check_complex("specfun::bessel_i_ratio_complex", z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    let (w, sign) = reflect(z);
    let (s0, s1) = i01_scaled(w);
    Ok(s1 / s0 * sign)
}

fn reflect(z: Complex64) -> (Complex64, f64) {
    if z.re < 0.0 {
        (-z, -1.0)
    } else {
        (z, 1.0)
    }
}

/// `(e^-z I0(z), e^-z I1(z))` for `Re z >= 0`.
pub(crate) fn i01_scaled(z: Complex64) -> (Complex64, Complex64) {
    debug_assert!(z.re >= 0.0);
    let r = z.norm();
    if r < SERIES_LIMIT {
        let (i0, i1) = i01_series(z);
        let e = (-z).exp();
        (i0 * e, i1 * e)
    } else if r < ASYMPTOTIC_LIMIT {
        i01_miller_scaled(z)
    } else {
        (i_asymptotic_scaled(z, 0), i_asymptotic_scaled(z, 1))
    }
}

fn i01_series(z: Complex64) -> (Complex64, Complex64) {
    let q = 0.25 * z * z;
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = 0.5 * z;
    let (mut s0, mut s1) = (t0, t1);
    for k in 1..40 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0.norm() < 1e-18 * s0.norm() && t1.norm() < 1e-18 * s1.norm() {
            break;
        }
    }
    (s0, s1)
}

fn i01_miller_scaled(z: Complex64) -> (Complex64, Complex64) {
    let n = miller_start(z.norm());
    let two_over_z = 2.0 / z;
    let mut next = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0e-30, 0.0);
    let mut norm = Complex64::new(0.0, 0.0);
    for k in (1..=n).rev() {
        norm += 2.0 * cur;
        let prev = k as f64 * two_over_z * cur + next;
        next = cur;
        cur = prev;
        if cur.norm() > 1.0e250 {
            cur *= 1.0e-250;
            next *= 1.0e-250;
            norm *= 1.0e-250;
        }
    }
    norm += cur;
    (cur / norm, next / norm)
}

/// Large-argument expansion of `e^-z I_order(z)`, including the
/// exponentially small `e^-2z` contribution that matters near the imaginary axis.
fn i_asymptotic_scaled(z: Complex64, order: u32) -> Complex64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut alternating = term;
    let mut plain = term;
    let limit = 2.0 * z.norm();
    for k in 1..200 {
        if k as f64 > limit {
            break;
        }
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * z);
        if k % 2 == 0 {
            alternating += term;
        } else {
            alternating -= term;
        }
        plain += term;
        if term.norm() < 1e-17 {
            break;
        }
    }
    let pref = (2.0 * PI * z).sqrt().inv();
    // Coefficient ± i e^{±iνπ} of the recessive solution; it vanishes on the
    // Stokes line Im z = 0, where it is in any case below e^-50.
    let side = if z.im > 0.0 {
        1.0
    } else if z.im < 0.0 {
        -1.0
    } else {
        0.0
    };
    let parity = if order % 2 == 0 { 1.0 } else { -1.0 };
    let recessive = Complex64::new(0.0, side * parity) * (-2.0 * z).exp() * plain;
    pref * (alternating + recessive)
}

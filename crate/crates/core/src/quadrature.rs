//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Used only as an independent oracle for the closed-form series results: the
//! incomplete moduli against their defining integrals, and the convolution
//! responses against direct evaluation of the hereditary integrals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrate `f` over `[a, b]`, bisecting the worst segment until the summed
/// error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// As [`integrate`], with the initial partition given by the sorted `points`
/// (first and last entries are the integration limits).
pub fn integrate_with_breaks(f: impl Fn(f64) -> f64, points: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    const F: &str = "quadrature::integrate";
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Oracle {
            func: F,
            detail: "break points must be sorted and at least two".into(),
        });
    }
    let mut segments: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::Oracle {
                func: F,
                detail: "integrand produced a non-finite value".into(),
            });
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Oracle {
                func: F,
                detail: format!(
                    "error estimate {error:e} above tolerance after {} intervals",
                    segments.len()
                ),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::Oracle {
                func: F,
                detail: format!("segment [{}, {}] cannot be split further", s.a, s.b),
            });
        }
        segments.push(gauss_kronrod(&f, s.a, mid));
        segments.push(gauss_kronrod(&f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn smooth_and_endpoint_singular_integrands() {
        let r = integrate(f64::sin, 0.0, PI, QuadOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate(f64::sqrt, 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
        let r = integrate(|x| (-x / 1e-3).exp(), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - 1e-3).abs() < 1e-14);
    }

    #[test]
    fn break_points_and_failures() {
        let r = integrate_with_breaks(|x: f64| x.abs(), &[-1.0, 0.0, 1.0], QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let tight = QuadOptions {
            abs_tol: 1e-30,
            rel_tol: 0.0,
            max_intervals: 5,
        };
        assert!(matches!(
            integrate(|x: f64| x.sqrt(), 0.0, 1.0, tight),
            Err(Error::Oracle { .. })
        ));
        assert!(integrate_with_breaks(|x| x, &[1.0, 0.0], QuadOptions::default()).is_err());
    }
}

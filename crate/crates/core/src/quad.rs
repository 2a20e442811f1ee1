//! Adaptive Gauss–Kronrod quadrature (7/15 pair) for real and complex
//! integrands.
//!
//! Integrands are called as `f(base, offset)` with the evaluation point being
//! `base + offset`, where `base` is the left end of the current panel. Callers
//! that compute oscillatory phases can therefore reduce `α·base` once in
//! extended precision and add the small `α·offset` exactly, instead of losing
//! phase bits to the rounding of `base + offset` itself. Integrands that do
//! not care simply evaluate at `base + offset`.
//!
//! Subdivision is deterministic (plain recursive bisection, left to right)
//! and results are accumulated with compensated summation, so values do not
//! depend on thread count or evaluation order.

use crate::kahan::{KahanComplex, KahanSum};
use num_complex::Complex64;

// 15-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
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

/// One 15-point Kronrod panel over `[a, b]`. Returns `(K15 value, |K15 − G7|)`.
pub fn gk15_complex<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    let h = 0.5 * (b - a);
    let mut resk = Complex64::new(0.0, 0.0);
    let mut resg = Complex64::new(0.0, 0.0);
    // Node offsets from the left end: h·(1 ∓ x).
    for (j, &x) in XGK.iter().enumerate() {
        if j == 7 {
            let fc = f(a, h);
            resk += WGK[7] * fc;
            resg += WG[3] * fc;
            break;
        }
        let f_lo = f(a, h * (1.0 - x));
        let f_hi = f(a, h * (1.0 + x));
        let sum = f_lo + f_hi;
        resk += WGK[j] * sum;
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
    }
    (resk * h, (resk - resg).norm() * h.abs())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    /// Estimated absolute error (sum of per-panel |K15 − G7|).
    pub err: f64,
    pub evals: usize,
    /// False if some panel hit the depth cap before meeting its share of the
    /// tolerance; the value and error estimate are still usable.
    pub converged: bool,
}

/// Adaptive bisection to absolute tolerance `abs_tol` over `[a, b]`.
pub fn adaptive_complex<F>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> QuadResult
where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    adaptive_segments(f, &[a, b], abs_tol, max_depth)
}

/// Adaptive quadrature over a chain of segments `pts[0] < pts[1] < …`;
/// the tolerance is apportioned to segments by length. Mandatory initial
/// breakpoints let callers pre-split at kinks, jump points, or oscillation
/// periods so the error estimator never sees an unresolved panel.
pub fn adaptive_segments<F>(f: &F, pts: &[f64], abs_tol: f64, max_depth: u32) -> QuadResult
where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    assert!(pts.len() >= 2, "need at least one segment");
    let total: f64 = pts.last().unwrap() - pts[0];
    debug_assert!(total >= 0.0);
    let mut acc = KahanComplex::new();
    let mut err = KahanSum::new();
    let mut evals = 0usize;
    let mut converged = true;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo == hi {
            continue;
        }
        let tol = if total > 0.0 {
            abs_tol * ((hi - lo) / total)
        } else {
            abs_tol
        };
        rec(f, lo, hi, tol, max_depth, &mut acc, &mut err, &mut evals, &mut converged);
    }
    QuadResult {
        value: acc.value(),
        err: err.value(),
        evals,
        converged,
    }
}

#[allow(clippy::too_many_arguments)]
fn rec<F>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    acc: &mut KahanComplex,
    err: &mut KahanSum,
    evals: &mut usize,
    converged: &mut bool,
) where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    let (v, e) = gk15_complex(f, a, b);
    *evals += 15;
    if e <= tol || depth == 0 {
        if e > tol {
            *converged = false;
        }
        acc.add(v);
        err.add(e);
        return;
    }
    let m = 0.5 * (a + b);
    rec(f, a, m, 0.5 * tol, depth - 1, acc, err, evals, converged);
    rec(f, m, b, 0.5 * tol, depth - 1, acc, err, evals, converged);
}

/// Real-valued convenience wrapper around [`adaptive_segments`].
pub fn adaptive_real<F>(f: &F, pts: &[f64], abs_tol: f64, max_depth: u32) -> (f64, f64, bool)
where
    F: Fn(f64, f64) -> f64 + Sync + ?Sized,
{
    let g = |base: f64, off: f64| Complex64::new(f(base, off), 0.0);
    let r = adaptive_segments(&g, pts, abs_tol, max_depth);
    (r.value.re, r.err, r.converged)
}

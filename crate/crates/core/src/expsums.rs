//! Exponential sums over primes, the matching oscillatory integral, and the
//! Fejér kernel.
//!
//! The basic objects, for a component exponent k and box p^k ∈ [δX, X]:
//!
//! * `exp_sum`: S(α) = Σ ln p · e(α p^k) (and an unweighted variant);
//! * `exp_integral`: T(α) = ∫ e(α t^k) dt over the same box, written after
//!   u = t^k as (1/k)∫ u^(1/k−1) e(αu) du;
//! * `fejer_kernel`: K(α) = (sin(παη)/(πα))², whose Fourier transform is the
//!   triangle max(0, η − |t|) — the weight that turns integrals of products
//!   of these sums into counts of near-solutions.
//!
//! Phases are never reduced modulo 1 in plain f64: α·p^k can reach 10^12 and
//! f64 reduction would lose half the significand. Every phase goes through
//! double-double multiplication and exact fractional-part extraction
//! ([`crate::dd`]), keeping each e(·) accurate to ~1 ulp.
//!
//! Grid evaluation (`exp_sum_grid`) uses one complex rotation per prime per
//! step, re-synchronized from exact phases every [`RESYNC_INTERVAL`] steps,
//! and reduces over primes in fixed chunks so results are byte-identical for
//! any thread count.

use crate::dd::{two_prod, two_sum, e_unit, Dd};
use crate::error::{Error, Result};
use crate::kahan::{KahanSum, CHUNK};
use crate::primes::{prime_power_range_indices, PrimeTable};
use crate::quad::gk15_complex;
use num_complex::Complex64;
use rayon::prelude::*;

/// Steps between exact re-synchronizations of the grid rotation recurrence.
pub const RESYNC_INTERVAL: usize = 256;

/// Largest phase magnitude |α|·X for which exact reduction is supported.
const PHASE_MAX: f64 = 4.0e15;

/// Segment cap for the oscillatory integral (one segment per half period).
const MAX_SEGMENTS: u64 = 8_000_000;

fn phase_guard(alpha: f64, x: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("α must be finite, got {alpha}")));
    }
    if alpha.abs() * x > PHASE_MAX {
        return Err(Error::Domain(format!(
            "|α|·X = {:.3e} exceeds the exact phase-reduction range {PHASE_MAX:.1e}",
            alpha.abs() * x
        )));
    }
    Ok(())
}

fn sum_over_primes(primes: &[u64], k_i: f64, alpha: f64, weighted: bool) -> Complex64 {
    let aa = alpha.abs();
    let nchunks = primes.len().div_ceil(CHUNK);
    let partials: Vec<(f64, f64)> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let chunk = &primes[ci * CHUNK..((ci + 1) * CHUNK).min(primes.len())];
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for &p in chunk {
                let z = e_unit(Dd::pow_u64(p, k_i).mul_f64(aa));
                let w = if weighted { (p as f64).ln() } else { 1.0 };
                re.add(w * z.re);
                im.add(w * z.im);
            }
            (re.value(), im.value())
        })
        .collect();
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (r, i) in partials {
        re.add(r);
        im.add(i);
    }
    let z = Complex64::new(re.value(), im.value());
    if alpha < 0.0 {
        z.conj()
    } else {
        z
    }
}

/// S(α) = Σ_{p^k ∈ [δX, X]} ln p · e(α p^k).
pub fn exp_sum(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
    alpha: f64,
) -> Result<Complex64> {
    phase_guard(alpha, x)?;
    let r = prime_power_range_indices(table, k_i, delta, x)?;
    Ok(sum_over_primes(&table.primes[r], k_i, alpha, true))
}

/// Unweighted variant: Σ_{p^k ∈ [δX, X]} e(α p^k).
pub fn exp_sum_unweighted(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
    alpha: f64,
) -> Result<Complex64> {
    phase_guard(alpha, x)?;
    let r = prime_power_range_indices(table, k_i, delta, x)?;
    Ok(sum_over_primes(&table.primes[r], k_i, alpha, false))
}

/// A uniform α grid: α_j = start + j·step for j = 0, …, n−1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn alpha(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.alpha(self.n.saturating_sub(1))
    }
}

/// Exact dd value of start + j·step (the product is error-free).
fn grid_alpha_dd(grid: &GridSpec, j: usize) -> Dd {
    let (ph, pl) = two_prod(j as f64, grid.step);
    Dd { hi: ph, lo: pl }.add_f64(grid.start)
}

/// S(α_j) for every grid point, one rotation multiply per prime per step.
///
/// Per-prime states drift by at most ~256ε between exact re-syncs; chunked
/// in-order reduction makes the output independent of the thread count.
pub fn exp_sum_grid(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
    grid: &GridSpec,
    weighted: bool,
) -> Result<Vec<Complex64>> {
    if grid.n == 0 {
        return Err(Error::Parameter("empty grid".into()));
    }
    if !grid.step.is_finite() {
        return Err(Error::Parameter(format!(
            "grid step must be finite, got {}",
            grid.step
        )));
    }
    // Steps of either sign are allowed: arc quadrature scales one α grid by
    // each coefficient λᵢ, which may be negative. |α| is largest at an end.
    phase_guard(grid.start, x)?;
    phase_guard(grid.end(), x)?;
    let r = prime_power_range_indices(table, k_i, delta, x)?;
    let primes = &table.primes[r];
    let n = grid.n;
    let nchunks = primes.len().div_ceil(CHUNK).max(1);
    let partials: Vec<Vec<Complex64>> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let chunk = if primes.is_empty() {
                &[][..]
            } else {
                &primes[ci * CHUNK..((ci + 1) * CHUNK).min(primes.len())]
            };
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            for &p in chunk {
                let pk = Dd::pow_u64(p, k_i);
                let w = if weighted { (p as f64).ln() } else { 1.0 };
                let rot = e_unit(pk.mul_f64(grid.step));
                let mut state = e_unit(pk.mul_f64(grid.start));
                for (j, slot) in acc.iter_mut().enumerate() {
                    if j > 0 && j % RESYNC_INTERVAL == 0 {
                        state = e_unit(pk.mul(grid_alpha_dd(grid, j)));
                    }
                    *slot += w * state;
                    state *= rot;
                }
            }
            acc
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for part in &partials {
            re.add(part[j].re);
            im.add(part[j].im);
        }
        out.push(Complex64::new(re.value(), im.value()));
    }
    Ok(out)
}

fn box_bounds(k_i: f64, delta: f64, x: f64) -> Result<(f64, f64)> {
    if !(k_i > 0.0 && k_i.is_finite()) {
        return Err(Error::Domain(format!("integral needs k > 0, got {k_i}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("integral needs 0 < δ < 1, got {delta}")));
    }
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::Domain(format!("integral needs X ≥ 2, got {x}")));
    }
    Ok((delta * x, x))
}

/// x^(1/k) in double-double.
fn root_dd(x: f64, k_i: f64) -> Dd {
    Dd::from_f64(x).ln().div_f64(k_i).exp()
}

/// T(α) = ∫ e(α t^k) dt over t^k ∈ [δX, X], evaluated after u = t^k as
/// (1/k) ∫_{δX}^{X} u^(1/k−1) e(αu) du.
///
/// The u-integral is split at half-period boundaries of the linear phase and
/// each piece is handled by 15-point Gauss–Kronrod with phases carried in
/// double-double; segment values accumulate in double-double so the massive
/// cancellation between periods costs no precision. Returns the value and a
/// bound combining per-segment quadrature differences with a rounding floor.
pub fn exp_integral(k_i: f64, delta: f64, x: f64, alpha: f64) -> Result<(Complex64, f64)> {
    let (a, b) = box_bounds(k_i, delta, x)?;
    phase_guard(alpha, x)?;
    // Length of the t-interval; computed in dd, also the α = 0 value.
    let amp_integral = root_dd(x, k_i).sub(root_dd(a, k_i)).to_f64();
    if alpha == 0.0 {
        let err = 4.0 * f64::EPSILON * amp_integral.abs();
        return Ok((Complex64::new(amp_integral, 0.0), err));
    }
    let aa = alpha.abs();
    let half_period = 0.5 / aa;
    let n_seg = ((b - a) / half_period).ceil() as u64;
    if n_seg > MAX_SEGMENTS {
        return Err(Error::Resource(format!(
            "oscillatory integral needs {n_seg} segments (cap {MAX_SEGMENTS}); \
             |α|·(X − δX) is too large"
        )));
    }
    let inv_k = 1.0 / k_i;
    let gamma = inv_k - 1.0;
    let f = |base: f64, off: f64| -> Complex64 {
        let u = base + off;
        let amp = if k_i == 1.0 {
            1.0
        } else if k_i == 2.0 {
            0.5 / u.sqrt()
        } else {
            inv_k * u.powf(gamma)
        };
        let (uh, ul) = two_sum(base, off);
        amp * e_unit(Dd { hi: uh, lo: ul }.mul_f64(aa))
    };
    let mut re = Dd::ZERO;
    let mut im = Dd::ZERO;
    let mut gk_err = KahanSum::new();
    let mut s0 = a;
    for i in 0..n_seg {
        let s1 = if i + 1 == n_seg {
            b
        } else {
            a + (i + 1) as f64 * half_period
        };
        let (v, e) = gk15_complex(&f, s0, s1);
        re = re.add_f64(v.re);
        im = im.add_f64(v.im);
        gk_err.add(e);
        s0 = s1;
    }
    let value = Complex64::new(re.to_f64(), im.to_f64());
    // Rounding floor: node values are accurate to ~4ε relative, and they sum
    // (with signs) against the non-oscillatory envelope ∫ amp du.
    let err = gk_err.value() + 4.0 * f64::EPSILON * amp_integral.abs();
    let value = if alpha < 0.0 { value.conj() } else { value };
    Ok((value, err))
}

/// Closed form of the k = 1 integral: (e(αX) − e(αδX))/(2πiα).
///
/// Kept separate from the generic machinery as an independent cross-check.
pub fn exp_integral_linear_exact(delta: f64, x: f64, alpha: f64) -> Result<Complex64> {
    let (a, b) = box_bounds(1.0, delta, x)?;
    phase_guard(alpha, x)?;
    if alpha == 0.0 {
        return Ok(Complex64::new(b - a, 0.0));
    }
    let eb = e_unit(exact_prod(alpha, b));
    let ea = e_unit(exact_prod(alpha, a));
    let diff = eb - ea;
    // 1/(2πiα) = −i/(2πα)
    let s = 1.0 / (2.0 * std::f64::consts::PI * alpha);
    Ok(Complex64::new(diff.im * s, -diff.re * s))
}

fn exact_prod(a: f64, b: f64) -> Dd {
    let (hi, lo) = two_prod(a, b);
    Dd { hi, lo }
}

/// Fejér-type kernel K(α) = (sin(παη)/(πα))²; K(0) = η², and the Fourier
/// transform is the triangle `max(0, η − |t|)`.
pub fn fejer_kernel(alpha: f64, eta: f64) -> f64 {
    debug_assert!(eta > 0.0);
    let x = std::f64::consts::PI * alpha * eta;
    if x.abs() < 1e-4 {
        // sinc series: sin(x)/x = 1 − x²/6 + x⁴/120 − x⁶/5040 + O(x⁸)
        let x2 = x * x;
        let s = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
        let v = eta * s;
        v * v
    } else {
        let s = x.sin() / (std::f64::consts::PI * alpha);
        s * s
    }
}

/// The Fourier transform of the kernel: max(0, η − |t|).
pub fn triangle_weight(t: f64, eta: f64) -> f64 {
    debug_assert!(eta > 0.0);
    (eta - t.abs()).max(0.0)
}

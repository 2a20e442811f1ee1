//! Arc decomposition of the frequency line and quadrature of the product
//! integrand
//!
//! ```text
//! f(α) = S₁(λ₁α) · S₂(λ₂α) · S₃(λ₃α) · S₄(λ₄α) · K_η(α) · e(−ωα),
//! ```
//!
//! where S₁ is the k=1 prime sum, S₂ and S₃ the k=2 sums, S₄ the k-th-power
//! sum, and K_η the Fejér kernel. Because K̂_η is the triangle
//! max(0, η − |t|), the full-line integral of f equals the prime-side sum
//!
//! ```text
//! Σ ln p₁ ln p₂ ln p₃ ln p₄ · max(0, η − |λ₁p₁ + λ₂p₂² + λ₃p₃² + λ₄p₄ᵏ − ω|)
//! ```
//!
//! over all component tuples — an exact identity, not an asymptotic. The two
//! sides are computed by completely independent code paths ([`integrate_I`]
//! via quadrature, [`direct_sum_I`] via the solver), which makes the identity
//! the strongest cross-check in the crate.
//!
//! The line splits into a central arc |α| ≤ P/X, a middle arc P/X < |α| ≤ R,
//! and an outer region |α| > R. Quadrature truncates the outer region at
//! A ≥ R and covers the rest with [`tail_estimate`], a rigorous bound built
//! from unit-window moment inequalities (exact period integrals of |S₁|² and
//! |S₂|⁴, Hölder, and the summed 1/α² envelope of the kernel).

use crate::dd::{e_unit, two_prod, Dd};
use crate::error::{Error, Result};
use crate::expsums::{exp_integral, exp_sum, exp_sum_grid, fejer_kernel, GridSpec};
use crate::kahan::{KahanComplex, KahanSum};
use crate::model::{self, Params};
use crate::primes::{prime_power_range_indices, PrimeTable};
use crate::quad::{adaptive_real, adaptive_segments};
use crate::solver;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Which piece of the line an integral was taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcTag {
    Major,
    Minor,
    Trivial,
    Full,
}

impl ArcTag {
    pub fn name(self) -> &'static str {
        match self {
            ArcTag::Major => "major",
            ArcTag::Minor => "minor",
            ArcTag::Trivial => "trivial",
            ArcTag::Full => "full",
        }
    }
}

/// Cutoffs (P, R) at scale X: central arc |α| ≤ P/X, middle arc
/// P/X < |α| ≤ R, outer region |α| > R. The three pieces partition the line.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArcDecomposition {
    pub x: f64,
    pub p: f64,
    pub r: f64,
}

impl ArcDecomposition {
    /// Half-width P/X of the central arc.
    pub fn major_halfwidth(&self) -> f64 {
        self.p / self.x
    }

    /// Which arc a frequency belongs to (boundaries resolve inward).
    pub fn classify(&self, alpha: f64) -> ArcTag {
        let a = alpha.abs();
        if a <= self.major_halfwidth() {
            ArcTag::Major
        } else if a <= self.r {
            ArcTag::Minor
        } else {
            ArcTag::Trivial
        }
    }
}

/// Validate and build an [`ArcDecomposition`].
pub fn decompose(x: f64, p: f64, r: f64) -> Result<ArcDecomposition> {
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::Parameter(format!("decomposition needs X ≥ 2, got {x}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("central-arc cutoff needs P ≥ 1, got {p}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("outer cutoff needs R > 0, got {r}")));
    }
    if p / x >= r {
        return Err(Error::Parameter(format!(
            "P/X = {:.6e} must be smaller than R = {:.6e}",
            p / x,
            r
        )));
    }
    Ok(ArcDecomposition { x, p, r })
}

/// The standard cutoffs at scale X: P from the central-arc formula and
/// R = ln²X/η².
pub fn standard_decomposition(params: &Params, x: f64, eta: f64) -> Result<ArcDecomposition> {
    let p = model::major_arc_p(x, params.k, params.epsilon)?;
    let r = model::trivial_arc_r(x, eta)?;
    decompose(x, p, r)
}

/// Quadrature policy for [`integrate_I`] and [`main_term_j1`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridPolicy {
    /// Simpson samples per oscillation cycle on the central and middle arcs.
    pub samples_per_cycle: f64,
    /// Samples per cycle on the truncated outer region, where the kernel
    /// envelope has already collapsed the integrand by ~1/(πα)².
    pub trivial_samples_per_cycle: f64,
    /// Hard cap on evaluation points per call; the step is coarsened (and the
    /// reported quadrature error grows honestly) rather than failing.
    pub max_points: u64,
    /// Outer truncation A; `None` selects max(R, 50/η). Values below R are
    /// raised to R.
    pub truncation: Option<f64>,
    /// Monte Carlo sample count for the measure-side main-term route.
    pub mc_samples: u64,
    /// Monte Carlo seed (per-batch streams are derived deterministically).
    pub mc_seed: u64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            samples_per_cycle: 8.0,
            trivial_samples_per_cycle: 4.0,
            max_points: 200_000_000,
            truncation: None,
            mc_samples: 200_000,
            mc_seed: 271_828,
        }
    }
}

/// Result of one arc integral.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralResult {
    pub arc: ArcTag,
    /// Real part of the quadrature total (the integral itself; the imaginary
    /// part vanishes by conjugate symmetry).
    pub value: f64,
    /// Accumulated Richardson estimate |S_h − S_{2h}| over all panels.
    pub quad_error: f64,
    /// Rigorous bound on the un-quadratured region |α| > A
    /// (zero for the central and middle arcs).
    pub tail_bound: f64,
    /// |Im| of the quadrature total. Both half-lines are evaluated
    /// explicitly, so this is a genuine end-to-end symmetry diagnostic, not
    /// zero by construction.
    pub imag_residual: f64,
    /// Evaluation points used.
    pub points: u64,
}

#[inline]
fn slot_exponents(k: f64) -> [f64; 4] {
    [1.0, 2.0, 2.0, k]
}

fn check_lambdas(params: &Params) -> Result<()> {
    for (i, l) in params.lambda.iter().enumerate() {
        if *l == 0.0 || !l.is_finite() {
            return Err(Error::Domain(format!(
                "coefficient λ{} must be finite and nonzero, got {l}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Pointwise integrand value S₁S₂S₃S₄·K_η·e(−ωα).
pub fn integrand(
    table: &PrimeTable,
    params: &Params,
    x: f64,
    eta: f64,
    alpha: f64,
) -> Result<Complex64> {
    check_lambdas(params)?;
    if !(eta > 0.0) {
        return Err(Error::Parameter(format!("kernel needs η > 0, got {eta}")));
    }
    let exps = slot_exponents(params.k);
    let mut z = Complex64::new(1.0, 0.0);
    for i in 0..4 {
        z *= exp_sum(table, exps[i], params.delta, x, params.lambda[i] * alpha)?;
    }
    if params.omega != 0.0 {
        let (ph, pl) = two_prod(params.omega, alpha);
        z *= e_unit(Dd { hi: ph, lo: pl }.neg());
    }
    Ok(z * fejer_kernel(alpha, eta))
}

/// Subintervals per parallel panel (a multiple of 4, so halved-step Simpson
/// stays valid inside every panel). Fixed: panel boundaries are part of the
/// bit-reproducibility contract.
const SEG_SUB: usize = 4096;

fn simpson_sum(f: &[Complex64], stride: usize, step: f64) -> Complex64 {
    let nsub = f.len() - 1;
    debug_assert!(nsub % (2 * stride) == 0);
    let m_last = nsub / stride;
    let mut acc = KahanComplex::new();
    for m in 0..=m_last {
        let w = if m == 0 || m == m_last {
            1.0
        } else if m % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * f[m * stride]);
    }
    acc.value() * (step / 3.0)
}

/// One composite-Simpson panel: global subinterval indices [j0, j0 + nsub] on
/// the uniform grid α_j = lo + j·h. Returns (value, |S_h − S_2h|).
fn eval_panel(
    table: &PrimeTable,
    params: &Params,
    x: f64,
    eta: f64,
    lo: f64,
    h: f64,
    j0: usize,
    nsub: usize,
) -> Result<(Complex64, f64)> {
    let npts = nsub + 1;
    let start = lo + j0 as f64 * h;
    let exps = slot_exponents(params.k);
    let mut slots: Vec<Vec<Complex64>> = Vec::with_capacity(4);
    for i in 0..4 {
        let g = GridSpec {
            start: params.lambda[i] * start,
            step: params.lambda[i] * h,
            n: npts,
        };
        slots.push(exp_sum_grid(table, exps[i], params.delta, x, &g, true)?);
    }
    let omega = params.omega;
    let mut f = vec![Complex64::new(0.0, 0.0); npts];
    for (j, fj) in f.iter_mut().enumerate() {
        // α_j from the *global* index so panel boundaries cost no accuracy.
        let (ph, pl) = two_prod((j0 + j) as f64, h);
        let alpha_dd = Dd { hi: ph, lo: pl }.add_f64(lo);
        let alpha = alpha_dd.to_f64();
        let mut z = slots[0][j] * slots[1][j] * slots[2][j] * slots[3][j];
        if omega != 0.0 {
            z *= e_unit(alpha_dd.mul_f64(omega).neg());
        }
        *fj = z * fejer_kernel(alpha, eta);
    }
    let s_h = simpson_sum(&f, 1, h);
    let s_2h = simpson_sum(&f, 2, 2.0 * h);
    Ok((s_h, (s_h - s_2h).norm()))
}

/// Composite Simpson over [lo, hi] with `nsub` subintervals (multiple of 4),
/// parallel over fixed panels, combined in panel order.
fn integrate_interval(
    table: &PrimeTable,
    params: &Params,
    x: f64,
    eta: f64,
    lo: f64,
    hi: f64,
    nsub: usize,
) -> Result<(Complex64, f64, u64)> {
    debug_assert!(nsub % 4 == 0 && nsub > 0);
    let h = (hi - lo) / nsub as f64;
    let ntasks = nsub.div_ceil(SEG_SUB);
    let parts: Vec<Result<(Complex64, f64)>> = (0..ntasks)
        .into_par_iter()
        .map(|t| {
            let j0 = t * SEG_SUB;
            let n_t = SEG_SUB.min(nsub - j0);
            eval_panel(table, params, x, eta, lo, h, j0, n_t)
        })
        .collect();
    let mut val = KahanComplex::new();
    let mut err = KahanSum::new();
    for part in parts {
        let (v, e) = part?;
        val.add(v);
        err.add(e);
    }
    Ok((val.value(), err.value(), (nsub + ntasks) as u64))
}

fn round_up4(n: u64) -> u64 {
    n.div_ceil(4) * 4
}

/// Numerical integral of the product integrand over one arc of the
/// decomposition (or the whole truncated line for [`ArcTag::Full`]).
///
/// Both half-lines are evaluated explicitly on a uniform grid whose step
/// resolves the fastest phase Σ|λᵢ|·X + |ω| + η at `samples_per_cycle`
/// points; the outer region |α| > R uses the coarser
/// `trivial_samples_per_cycle` (its kernel envelope is already ≤ 1/(πα)²).
/// Panels report |S_h − S_{2h}|, summed into `quad_error`. For the outer and
/// full cases quadrature stops at the truncation A and [`tail_estimate`]
/// bounds the remainder.
#[allow(non_snake_case)]
pub fn integrate_I(
    table: &PrimeTable,
    params: &Params,
    eta: f64,
    deco: &ArcDecomposition,
    tag: ArcTag,
    policy: &GridPolicy,
) -> Result<IntegralResult> {
    check_lambdas(params)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("kernel needs η > 0, got {eta}")));
    }
    if !(policy.samples_per_cycle >= 2.0 && policy.trivial_samples_per_cycle >= 2.0) {
        return Err(Error::Parameter(
            "need at least 2 samples per cycle to resolve the integrand".into(),
        ));
    }
    if policy.max_points < 64 {
        return Err(Error::Parameter("max_points too small to integrate anything".into()));
    }
    let x = deco.x;
    let a = deco.major_halfwidth();
    let r = deco.r;
    let trunc = policy.truncation.unwrap_or((50.0 / eta).max(r)).max(r);

    // Fastest phase of the integrand, in cycles per unit α: every slot power
    // is ≤ X by construction, the reference point adds |ω|, the kernel η.
    let lam_sum: f64 = params.lambda.iter().map(|l| l.abs()).sum();
    let nu = lam_sum * x + params.omega.abs() + eta;

    let spc = policy.samples_per_cycle;
    let tspc = policy.trivial_samples_per_cycle;
    let regions: Vec<(f64, f64, f64)> = match tag {
        ArcTag::Major => vec![(-a, a, spc)],
        ArcTag::Minor => vec![(-r, -a, spc), (a, r, spc)],
        ArcTag::Trivial => vec![(-trunc, -r, tspc), (r, trunc, tspc)],
        ArcTag::Full => vec![(-trunc, -r, tspc), (-r, r, spc), (r, trunc, tspc)],
    };

    // Coarsen uniformly if the cap would be exceeded; the Richardson
    // estimate then reports the loss instead of hiding it.
    let want: f64 = regions.iter().map(|&(lo, hi, s)| (hi - lo) * s * nu).sum();
    let coarsen = if want > policy.max_points as f64 {
        want / policy.max_points as f64
    } else {
        1.0
    };

    let mut total = KahanComplex::new();
    let mut quad_error = KahanSum::new();
    let mut points = 0u64;
    for (lo, hi, s) in regions {
        if hi <= lo {
            continue;
        }
        let raw = ((hi - lo) * s * nu / coarsen).ceil() as u64;
        let nsub = round_up4(raw).max(8) as usize;
        let (v, e, pts) = integrate_interval(table, params, x, eta, lo, hi, nsub)?;
        total.add(v);
        quad_error.add(e);
        points += pts;
    }
    let tail_bound = match tag {
        ArcTag::Trivial | ArcTag::Full => tail_estimate(table, params, x, eta, trunc)?,
        _ => 0.0,
    };
    let t = total.value();
    Ok(IntegralResult {
        arc: tag,
        value: t.re,
        quad_error: quad_error.value(),
        tail_bound,
        imag_residual: t.im.abs(),
        points,
    })
}

/// The prime-side value of the full-line integral: the triangle-weighted
/// solution mass Σ Πln pᵢ · max(0, η − |form − ω|), computed exactly (to
/// floating rounding) by the solver's window search. Identity partner of
/// [`integrate_I`] over [`ArcTag::Full`].
#[allow(non_snake_case)]
pub fn direct_sum_I(table: &PrimeTable, params: &Params, x: f64, eta: f64) -> Result<f64> {
    Ok(solver::find_solutions(table, params, x, eta)?.triangle_mass)
}

/// The 1/α² envelope of the kernel summed over unit windows past A:
/// Σ_{j≥0} sup_{[A+j, A+j+1)} 1/(πα)² ≤ (1/π²)(1/A² + 1/A), both signs.
pub fn tail_closed_form(sup_product: f64, a_cut: f64) -> f64 {
    2.0 * sup_product * (1.0 / (a_cut * a_cut) + 1.0 / a_cut) / (PI * PI)
}

/// Rigorous bound for |∫_{|α| > A} f| .
///
/// On each unit window J the product obeys Hölder with exponents (2, 4, 4)
/// on the first three factors and the supremum on the fourth:
///
/// ```text
/// ∫_J |S₁S₂S₃S₄| ≤ sup|S₄| · (∫_J|S₁(λ₁α)|²)^½ (∫_J|S₂(λ₂α)|⁴)^¼ (∫_J|S₃(λ₃α)|⁴)^¼,
/// ```
///
/// and each window integral of a 1-periodic sum over an argument window of
/// length |λ| is at most ⌈|λ|⌉/|λ| times its exact period integral
/// (Σ ln²p for |S₁|², the equal-pair-sum quadruple mass for |S₂|⁴). The
/// kernel contributes sup 1/(πα)² per window, summed by
/// [`tail_closed_form`]. Everything on the right is computed exactly, so the
/// result is a true bound, not an estimate.
pub fn tail_estimate(
    table: &PrimeTable,
    params: &Params,
    x: f64,
    eta: f64,
    a_cut: f64,
) -> Result<f64> {
    check_lambdas(params)?;
    let _ = eta; // the kernel envelope 1/(πα)² is η-free
    if !(a_cut >= 1.0 && a_cut.is_finite()) {
        return Err(Error::Domain(format!("tail cutoff needs A ≥ 1, got {a_cut}")));
    }
    let [l1, l2, l3, _l4] = params.lambda;
    let sup4 = exp_sum(table, params.k, params.delta, x, 0.0)?.re;
    let m1 = crate::verify::log_square_mass(table, 1.0, params.delta, x)?;
    let n2 = prime_power_range_indices(table, 2.0, params.delta, x)?.len();
    let excess = |l: f64| l.abs().ceil() / l.abs();
    let slot1_window = (excess(l1) * m1).sqrt();
    let w = if n2 * n2 <= 16_000_000 {
        let m2 = crate::verify::equal_power_sum_mass(table, 2.0, params.delta, x)?;
        slot1_window * (excess(l2) * m2).powf(0.25) * (excess(l3) * m2).powf(0.25) * sup4
    } else {
        // Pair table too large: bound the two k=2 factors by their suprema.
        let sup2 = exp_sum(table, 2.0, params.delta, x, 0.0)?.re;
        slot1_window * sup2 * sup2 * sup4
    };
    Ok(tail_closed_form(w, a_cut))
}

/// Numerical mass of the kernel over [−A, A] (value, quadrature error).
/// As A grows this converges to η, the kernel's total integral.
pub fn kernel_mass(eta: f64, a_cut: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("kernel needs η > 0, got {eta}")));
    }
    if !(a_cut > 0.0 && a_cut.is_finite()) {
        return Err(Error::Parameter(format!("need A > 0, got {a_cut}")));
    }
    // Breakpoints at the first kernel zeros j/η, then dyadic out to A: the
    // integrand is smooth on every piece and the error estimator never sees
    // an unresolved oscillation.
    let mut pts = vec![0.0f64];
    let mut j = 1.0;
    while j <= 64.0 && j / eta < a_cut {
        pts.push(j / eta);
        j += 1.0;
    }
    let mut t = pts.last().copied().unwrap().max(1.0 / eta);
    while t * 2.0 < a_cut {
        t *= 2.0;
        pts.push(t);
    }
    pts.push(a_cut);
    pts.dedup();
    let f = move |b: f64, o: f64| fejer_kernel(b + o, eta);
    let (v, e, _) = adaptive_real(&f, &pts, 1e-12 * eta, 32);
    Ok((2.0 * v, 2.0 * e))
}

/// Bound for the kernel mass beyond A: ∫_{|α|>A} K_η ≤ 2/(π²A).
pub fn kernel_mass_tail_bound(a_cut: f64) -> f64 {
    2.0 / (PI * PI * a_cut)
}

/// Main-term integral evaluated by two independent routes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MainTerm {
    /// Route 1: frequency-side quadrature of T₁T₂T₃T₄·K_η·e(−ωα).
    pub fourier_value: f64,
    pub fourier_quad_error: f64,
    /// Bound on the truncated |α| > A remainder of route 1.
    pub fourier_tail_bound: f64,
    /// Route 2: measure-side integral — exact triangle integral in the first
    /// coordinate, Monte Carlo over the flattening substitutions of the
    /// other three.
    pub measure_value: f64,
    pub measure_std_error: f64,
    /// fourier_value / (η² X^(1/k + 1)), the expected growth shape.
    pub ratio: f64,
    pub measure_ratio: f64,
    pub mc_samples: u64,
}

/// ∫ max(0, η − |s|) ds from −∞ to t.
fn triangle_cdf(t: f64, eta: f64) -> f64 {
    if t <= -eta {
        0.0
    } else if t < 0.0 {
        0.5 * (eta + t) * (eta + t)
    } else if t < eta {
        eta * eta - 0.5 * (eta - t) * (eta - t)
    } else {
        eta * eta
    }
}

/// Exact ∫_{u_lo}^{u_hi} max(0, η − |l·u + shift|) du.
fn triangle_box_integral(l: f64, shift: f64, eta: f64, u_lo: f64, u_hi: f64) -> f64 {
    let s1 = l * u_lo + shift;
    let s2 = l * u_hi + shift;
    let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
    (triangle_cdf(hi, eta) - triangle_cdf(lo, eta)) / l.abs()
}

/// Smooth analogue of the arc integrand with every prime sum replaced by its
/// oscillatory integral T, evaluated two ways:
///
/// * route 1 truncates at A (chosen so the closed-form 1/α decay of each T
///   makes the remainder negligible) and integrates adaptively with dyadic
///   initial breakpoints;
/// * route 2 rewrites the integral over the measure side, where the first
///   coordinate's triangle integral is exact and the remaining three
///   coordinates are flattened (u₂ = v², u₃ = v², u₄ = wᵏ make the weights
///   constant) and sampled by seeded Monte Carlo.
///
/// Both values, their error estimates, and their ratios to η²X^(1/k+1) are
/// reported; agreement of the two routes is the oracle for this term.
pub fn main_term_j1(params: &Params, x: f64, eta: f64, policy: &GridPolicy) -> Result<MainTerm> {
    check_lambdas(params)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("kernel needs η > 0, got {eta}")));
    }
    let k = params.k;
    let delta = params.delta;
    let exps = slot_exponents(k);
    let lam = params.lambda;
    let u_lo = delta * x;
    let boxes: Vec<f64> = exps
        .iter()
        .map(|&ki| x.powf(1.0 / ki) - u_lo.powf(1.0 / ki))
        .collect();

    // Past its first-derivative crossover each factor obeys
    // |T(β)| ≤ (δX)^(1/k−1) / (π k |β|); the product then decays like α⁻⁴
    // and the kernel envelope adds α⁻², giving the closed-form remainder
    // 2·D / (5π² A⁵). Grow A until that is negligible against the α = 0
    // magnitude.
    let dec: Vec<f64> = exps
        .iter()
        .zip(&lam)
        .map(|(&ki, &l)| u_lo.powf(1.0 / ki - 1.0) / (PI * ki * l.abs()))
        .collect();
    let d_prod: f64 = dec.iter().product();
    let scale0 = eta * eta * boxes.iter().product::<f64>();
    let tail_at = |a: f64| 2.0 * d_prod / (5.0 * PI * PI * a.powi(5));
    let mut a_t = 1.0f64;
    while tail_at(a_t) > 1e-10 * scale0 && a_t < 64.0 {
        a_t *= 2.0;
    }

    // Pre-flight the worst case so the closure below cannot fail.
    for i in 0..4 {
        exp_integral(exps[i], delta, x, lam[i] * a_t)?;
    }

    let f = move |base: f64, off: f64| {
        let alpha = base + off;
        let mut z = Complex64::new(1.0, 0.0);
        for i in 0..4 {
            let (t, _) = exp_integral(exps[i], delta, x, lam[i] * alpha)
                .expect("pre-validated oscillatory integral");
            z *= t;
        }
        if params.omega != 0.0 {
            let (ph, pl) = two_prod(params.omega, alpha);
            z *= e_unit(Dd { hi: ph, lo: pl }.neg());
        }
        z * fejer_kernel(alpha, eta)
    };
    // Dyadic breakpoints: T decays on scale 1/X, so refinement starts there.
    let mut right = vec![0.0f64, 1.0 / x];
    let mut t = 1.0 / x;
    while t * 2.0 < a_t {
        t *= 2.0;
        right.push(t);
    }
    right.push(a_t);
    right.dedup();
    let mut pts: Vec<f64> = right.iter().rev().map(|v| -v).collect();
    pts.pop();
    pts.extend_from_slice(&right);
    let res = adaptive_segments(&f, &pts, 1e-9 * scale0, 24);

    // Error floor from the inner oscillatory integrals: each is accurate to
    // ~machine·box, so the product is good to ~4·machine relative; fold a
    // conservative multiple through the kernel mass η.
    let t_err_floor = 4.0 * 1e-13 * boxes.iter().product::<f64>() * eta;
    let fourier_quad_error = res.err + res.value.im.abs() + t_err_floor;
    let fourier_tail_bound = tail_at(a_t);

    // Measure side. After u₁'s exact triangle integral and the flattening
    // substitutions, the Jacobian constants cancel the prefactor exactly and
    // the value is Vol · E[g] over a uniform box in (v₂, v₃, w).
    let v_lo = u_lo.sqrt();
    let v_hi = x.sqrt();
    let w_lo = u_lo.powf(1.0 / k);
    let w_hi = x.powf(1.0 / k);
    let vol = (v_hi - v_lo) * (v_hi - v_lo) * (w_hi - w_lo);
    let nsamp = policy.mc_samples.max(16);
    const MC_BATCH: u64 = 4096;
    let nb = nsamp.div_ceil(MC_BATCH);
    let parts: Vec<(f64, f64)> = (0..nb)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha12Rng::seed_from_u64(policy.mc_seed);
            rng.set_stream(b);
            let n_here = MC_BATCH.min(nsamp - b * MC_BATCH);
            let mut s = KahanSum::new();
            let mut s2 = KahanSum::new();
            for _ in 0..n_here {
                let v2 = v_lo + (v_hi - v_lo) * rng.random::<f64>();
                let v3 = v_lo + (v_hi - v_lo) * rng.random::<f64>();
                let w = w_lo + (w_hi - w_lo) * rng.random::<f64>();
                let shift = lam[1] * v2 * v2 + lam[2] * v3 * v3 + lam[3] * w.powf(k)
                    - params.omega;
                let g = triangle_box_integral(lam[0], shift, eta, u_lo, x);
                s.add(g);
                s2.add(g * g);
            }
            (s.value(), s2.value())
        })
        .collect();
    let mut s = KahanSum::new();
    let mut s2 = KahanSum::new();
    for (a, b) in parts {
        s.add(a);
        s2.add(b);
    }
    let n = nsamp as f64;
    let mean = s.value() / n;
    let var = ((s2.value() - n * mean * mean) / (n - 1.0)).max(0.0);
    let measure_value = vol * mean;
    let measure_std_error = vol * (var / n).sqrt();

    let shape = eta * eta * x.powf(1.0 / k + 1.0);
    Ok(MainTerm {
        fourier_value: res.value.re,
        fourier_quad_error,
        fourier_tail_bound,
        measure_value,
        measure_std_error,
        ratio: res.value.re / shape,
        measure_ratio: measure_value / shape,
        mc_samples: nsamp,
    })
}

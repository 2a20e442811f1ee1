//! Empirical verification of the analytic inequalities the search relies on.
//!
//! Every bound used elsewhere has the shape `quantity ≤ C · shape(X)` with an
//! unspecified constant. Rather than trusting the constant, this module
//! measures the left side at several scales, divides by the claimed shape,
//! and reports whether the implied constant stays inside a configurable band
//! (default: a factor of 2). A drifting constant means either the shape or
//! the code is wrong — both worth knowing.
//!
//! The measured quantities:
//!
//! * [`robert_sargos_count`] — near-equal pairs of k-th-power sums over an
//!   integer dyadic range, the combinatorial core of the fourth-moment
//!   bound, with an O(M⁴) [`robert_sargos_count_naive`] oracle;
//! * [`selberg_integral`] — the short-window variance of the prime-power
//!   count, integrated piecewise-exactly between breakpoints;
//! * [`tu_gap_check`] — the gap between the weighted prime sum and its
//!   smooth integral, normalized by 1 + |α|X;
//! * [`arc_moment`] — kernel-weighted second and fourth moments of the
//!   component sums split across the arc decomposition, with the full-line
//!   value computed *exactly* from pair correlations rather than quadrature;
//! * [`bound_shape_stability`] — the driver that runs all of the above
//!   across scales and emits one [`BoundCheck`] per claimed inequality.

use crate::arcs::ArcDecomposition;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::expsums::{exp_integral, exp_sum, exp_sum_grid, exp_sum_unweighted, fejer_kernel, GridSpec};
use crate::kahan::KahanSum;
use crate::model::Params;
use crate::primes::{pow_cmp, prime_power_range_indices, PrimeTable};
use crate::quad::adaptive_segments;
use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Outcome of a constant-stability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
}

/// One measured inequality across a set of scales.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// Measured left sides, one per scale.
    pub lhs: Vec<f64>,
    /// Human-readable right-hand shape the constant multiplies.
    pub rhs_formula: String,
    /// lhs / shape at each scale.
    pub constants: Vec<f64>,
    /// max of `constants` — the constant the data actually implies.
    pub implied_constant: f64,
    pub scales_tested: Vec<f64>,
    /// max/min ratio of the constants across scales.
    pub band: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    fn from_constants(
        name: &str,
        rhs_formula: &str,
        scales: &[f64],
        lhs: Vec<f64>,
        constants: Vec<f64>,
        band_limit: f64,
    ) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &c in &constants {
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let band = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        BoundCheck {
            name: name.into(),
            lhs,
            rhs_formula: rhs_formula.into(),
            constants,
            implied_constant: hi,
            scales_tested: scales.to_vec(),
            band,
            verdict: if band <= band_limit {
                Verdict::Stable
            } else {
                Verdict::Unstable
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Near-equal pair counting for k-th-power sums
// ---------------------------------------------------------------------------

/// Largest admissible integer-range length M for the pair counter: the pair
/// table holds M² double-double sums (≈ 64 MB at the cap).
pub const RS_MAX_M: u64 = 2000;

fn rs_integer_range(x: f64, k: f64) -> Result<Vec<u64>> {
    if !(x >= 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("pair count needs X ≥ 1, got {x}")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Domain(format!("pair count needs k ≥ 1, got {k}")));
    }
    let upper = Dd::pow_u64(2, k).mul_f64(x);
    let n_guess = (2.0 * x.powf(1.0 / k)).ceil() as u64 + 2;
    let mut ns = Vec::new();
    for n in 1..=n_guess {
        if pow_cmp(n, k, x) == Ordering::Less {
            continue;
        }
        // Stop once n^k exceeds 2^k·X beyond the relative tie band.
        let nk = Dd::pow_u64(n, k);
        let diff = nk.sub(upper);
        if diff.hi > 0.0 && diff.hi > 3e-28 * upper.hi.abs() {
            break;
        }
        ns.push(n);
    }
    if ns.len() as u64 > RS_MAX_M {
        return Err(Error::Resource(format!(
            "integer range holds {} points; the pair table is capped at M = {RS_MAX_M}",
            ns.len()
        )));
    }
    Ok(ns)
}

fn rs_pair_sums(ns: &[u64], k: f64) -> Vec<Dd> {
    let powers: Vec<Dd> = ns.iter().map(|&n| Dd::pow_u64(n, k)).collect();
    let mut sums = Vec::with_capacity(powers.len() * powers.len());
    for a in &powers {
        for b in &powers {
            sums.push(a.add(*b));
        }
    }
    sums.sort_unstable_by(|p, q| p.hi.total_cmp(&q.hi).then(p.lo.total_cmp(&q.lo)));
    sums
}

/// Number of ordered quadruples (n₁, n₂, n₃, n₄) of integers in
/// [X^(1/k), 2X^(1/k)] (endpoints included) with
/// |n₁ᵏ + n₂ᵏ − n₃ᵏ − n₄ᵏ| < γ (strict).
///
/// Counted as ordered pairs of pair sums within a γ-window, by a two-pointer
/// sweep over the sorted sums — O(M² log M) regardless of γ, so the
/// everything-matches regime (count → M⁴) costs the same as the diagonal
/// regime. Powers are double-double, exact for integer k and accurate to
/// ~1e−28 relative otherwise, so window membership at these scales is exact.
pub fn robert_sargos_count(x: f64, k: f64, gamma: f64) -> Result<u64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("window needs γ > 0, got {gamma}")));
    }
    let ns = rs_integer_range(x, k)?;
    let sums = rs_pair_sums(&ns, k);
    let n = sums.len();
    let mut lo = 0usize;
    let mut hi = 0usize;
    let mut count = 0u64;
    for i in 0..n {
        let s = sums[i];
        while lo < n && sums[lo].sub(s).cmp_f64(-gamma) != Ordering::Greater {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < n && sums[hi].sub(s).cmp_f64(gamma) == Ordering::Less {
            hi += 1;
        }
        count += (hi - lo) as u64;
    }
    Ok(count)
}

/// Direct O(M⁴) oracle for [`robert_sargos_count`]: loops over every ordered
/// pair of pair sums with the same double-double comparisons. Only for small
/// ranges; the production counter must agree exactly.
pub fn robert_sargos_count_naive(x: f64, k: f64, gamma: f64) -> Result<u64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("window needs γ > 0, got {gamma}")));
    }
    let ns = rs_integer_range(x, k)?;
    if ns.len() > 40 {
        return Err(Error::Resource(format!(
            "naive pair count is O(M⁴); M = {} is past the point of usefulness",
            ns.len()
        )));
    }
    let powers: Vec<Dd> = ns.iter().map(|&n| Dd::pow_u64(n, k)).collect();
    let mut count = 0u64;
    for a in &powers {
        for b in &powers {
            let s = a.add(*b);
            for c in &powers {
                for d in &powers {
                    let diff = c.add(*d).sub(s);
                    if diff.cmp_f64(gamma) == Ordering::Less
                        && diff.cmp_f64(-gamma) == Ordering::Greater
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Short-window variance of the prime-power count
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SelbergResult {
    pub value: f64,
    pub quad_error: f64,
    /// Number of smooth pieces between discontinuities of the window count.
    pub pieces: usize,
}

/// ∫ over t ∈ [X, 2X] of (θ((t+h)^(1/k)) − θ(t^(1/k)) − ((t+h)^(1/k) − t^(1/k)))² dt,
/// the variance of the weighted prime count in the sliding window
/// (t, t+h] of k-th powers against its expected length.
///
/// The integrand is smooth except where a prime enters or leaves the window,
/// i.e. at t = pᵏ and t = pᵏ − h; those breakpoints are listed explicitly
/// and the quadrature never integrates across one, so the result is exact up
/// to the reported quadrature error.
pub fn selberg_integral(
    table: &PrimeTable,
    k: f64,
    x: f64,
    h: f64,
    tol: f64,
) -> Result<SelbergResult> {
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::Domain(format!("variance integral needs X ≥ 2, got {x}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("window length must be positive, got {h}")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Domain(format!("variance integral needs k ≥ 1, got {k}")));
    }
    let reach = (2.0 * x + h).powf(1.0 / k);
    if reach > table.limit as f64 {
        return Err(Error::TableTooSmall {
            needed: reach.ceil() as u64,
            limit: table.limit,
        });
    }
    let mut pts = vec![x, 2.0 * x];
    for &p in &table.primes {
        let pk = Dd::pow_u64(p, k).to_f64();
        if pk > 2.0 * x + h {
            break;
        }
        if pk > x && pk < 2.0 * x {
            pts.push(pk);
        }
        let shifted = pk - h;
        if shifted > x && shifted < 2.0 * x {
            pts.push(shifted);
        }
    }
    pts.sort_unstable_by(f64::total_cmp);
    pts.dedup();
    let pieces = pts.len() - 1;
    let inv_k = 1.0 / k;
    let f = move |base: f64, off: f64| {
        let t = base + off;
        let top = (t + h).powf(inv_k);
        let bot = t.powf(inv_k);
        let c = table.theta(top).expect("coverage pre-validated")
            - table.theta(bot).expect("coverage pre-validated");
        let g = top - bot;
        let d = c - g;
        Complex64::new(d * d, 0.0)
    };
    let r = adaptive_segments(&f, &pts, tol, 28);
    Ok(SelbergResult {
        value: r.value.re,
        quad_error: r.err,
        pieces,
    })
}

/// The canonical sliding-window length for the variance check at scale X.
pub fn selberg_window(x: f64, k: f64) -> f64 {
    x.powf(1.0 - 5.0 / (6.0 * k) + 0.05)
}

// ---------------------------------------------------------------------------
// Prime sum vs. smooth integral
// ---------------------------------------------------------------------------

/// Normalized gap between the weighted prime-power sum and its oscillatory
/// integral, maximized over a frequency grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TuGap {
    /// max over the grid of |T(α) − U(α)| / (1 + |α| X).
    pub constant: f64,
    /// Same maximum with the integral's quadrature error subtracted /
    /// added — a certified interval for the constant.
    pub constant_lo: f64,
    pub constant_hi: f64,
    pub argmax_alpha: f64,
}

/// Measures sup |T_k(α) − U_k(α)| / (1 + |α|X) over `alpha_grid`,
/// where T is the oscillatory integral over [δX, X] and U the *unweighted*
/// sum over primes with pᵏ in the same range. Frequencies must satisfy
/// |α| ≤ 1 (past one cycle per integer the normalization stops meaning
/// anything).
pub fn tu_gap_check(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
    alpha_grid: &[f64],
) -> Result<TuGap> {
    if alpha_grid.is_empty() {
        return Err(Error::Parameter("frequency grid is empty".into()));
    }
    let mut best = TuGap {
        constant: -1.0,
        constant_lo: 0.0,
        constant_hi: 0.0,
        argmax_alpha: 0.0,
    };
    let mut hi_max = 0.0f64;
    let mut lo_max = 0.0f64;
    for &alpha in alpha_grid {
        if !(alpha.abs() <= 1.0) {
            return Err(Error::Domain(format!(
                "gap normalization needs |α| ≤ 1, got {alpha}"
            )));
        }
        let (t, terr) = exp_integral(k_i, delta, x, alpha)?;
        let u = exp_sum_unweighted(table, k_i, delta, x, alpha)?;
        let denom = 1.0 + alpha.abs() * x;
        let gap = (t - u).norm() / denom;
        if gap > best.constant {
            best.constant = gap;
            best.argmax_alpha = alpha;
        }
        hi_max = hi_max.max(((t - u).norm() + terr) / denom);
        lo_max = lo_max.max((((t - u).norm() - terr) / denom).max(0.0));
    }
    best.constant_hi = hi_max;
    best.constant_lo = lo_max;
    Ok(best)
}

/// Same gap with the prime sum replaced by the sum over *all integers* n
/// with nᵏ in [δX, X] — the diagnostic companion of [`tu_gap_check`]: the
/// smooth integral tracks the integer sum with a bounded gap, while the
/// prime sum differs by genuinely growing density factors.
pub fn tu_gap_integer_check(
    k_i: f64,
    delta: f64,
    x: f64,
    alpha_grid: &[f64],
) -> Result<TuGap> {
    if alpha_grid.is_empty() {
        return Err(Error::Parameter("frequency grid is empty".into()));
    }
    if !(k_i >= 1.0 && k_i.is_finite()) {
        return Err(Error::Domain(format!("integer gap needs k ≥ 1, got {k_i}")));
    }
    if !(delta > 0.0 && delta < 1.0 && x >= 2.0) {
        return Err(Error::Domain(format!(
            "integer gap needs 0 < δ < 1 and X ≥ 2, got δ={delta}, X={x}"
        )));
    }
    let lo_val = delta * x;
    let n_hi_guess = x.powf(1.0 / k_i).ceil() as u64 + 2;
    let mut members = Vec::new();
    for n in 1..=n_hi_guess {
        if pow_cmp(n, k_i, lo_val) == Ordering::Less {
            continue;
        }
        if pow_cmp(n, k_i, x) == Ordering::Greater {
            break;
        }
        members.push(n);
    }
    let mut best = TuGap {
        constant: -1.0,
        constant_lo: 0.0,
        constant_hi: 0.0,
        argmax_alpha: 0.0,
    };
    let mut hi_max = 0.0f64;
    let mut lo_max = 0.0f64;
    for &alpha in alpha_grid {
        if !(alpha.abs() <= 1.0) {
            return Err(Error::Domain(format!(
                "gap normalization needs |α| ≤ 1, got {alpha}"
            )));
        }
        let (t, terr) = exp_integral(k_i, delta, x, alpha)?;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for &n in &members {
            let z = crate::dd::e_unit(Dd::pow_u64(n, k_i).mul_f64(alpha));
            re.add(z.re);
            im.add(z.im);
        }
        let u = Complex64::new(re.value(), im.value());
        let denom = 1.0 + alpha.abs() * x;
        let gap = (t - u).norm() / denom;
        if gap > best.constant {
            best.constant = gap;
            best.argmax_alpha = alpha;
        }
        hi_max = hi_max.max(((t - u).norm() + terr) / denom);
        lo_max = lo_max.max((((t - u).norm() - terr) / denom).max(0.0));
    }
    best.constant_hi = hi_max;
    best.constant_lo = lo_max;
    Ok(best)
}

/// The default frequency grid for the gap checks: 0 together with ±10^t for
/// 10 log-spaced t ∈ [−3, 0].
pub fn default_tu_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    for j in 0..10 {
        let a = 10f64.powf(-3.0 + 3.0 * j as f64 / 9.0);
        g.push(a);
        g.push(-a);
    }
    g.sort_unstable_by(f64::total_cmp);
    g
}

// ---------------------------------------------------------------------------
// Exact pair-correlation masses (shared with the tail bounds in `arcs`)
// ---------------------------------------------------------------------------

/// Σ ln²p over primes with pᵏ ∈ [δX, X] — the exact period integral of
/// |S_k|² for integer k.
pub(crate) fn log_square_mass(table: &PrimeTable, k_i: f64, delta: f64, x: f64) -> Result<f64> {
    let r = prime_power_range_indices(table, k_i, delta, x)?;
    Ok(KahanSum::sum_iter(table.primes[r].iter().map(|&p| {
        let l = (p as f64).ln();
        l * l
    })))
}

/// Σ over equal values s = pᵏ + qᵏ of (Σ_{pᵏ+qᵏ=s} ln p ln q)² — the exact
/// period integral of |S_k|⁴ for k ∈ {1, 2} (integer pair sums).
pub(crate) fn equal_power_sum_mass(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
) -> Result<f64> {
    if k_i != 1.0 && k_i != 2.0 {
        return Err(Error::Domain(format!(
            "integer pair-sum mass needs k ∈ {{1, 2}}, got {k_i}"
        )));
    }
    let r = prime_power_range_indices(table, k_i, delta, x)?;
    let primes = &table.primes[r];
    let mut sums: Vec<(u64, f64)> = Vec::with_capacity(primes.len() * primes.len());
    for &p in primes {
        let lp = (p as f64).ln();
        let pk = if k_i == 1.0 { p } else { p * p };
        for &q in primes {
            let qk = if k_i == 1.0 { q } else { q * q };
            sums.push((pk + qk, lp * (q as f64).ln()));
        }
    }
    sums.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut total = KahanSum::new();
    let mut i = 0usize;
    while i < sums.len() {
        let key = sums[i].0;
        let mut mass = KahanSum::new();
        while i < sums.len() && sums[i].0 == key {
            mass.add(sums[i].1);
            i += 1;
        }
        let m = mass.value();
        total.add(m * m);
    }
    Ok(total.value())
}

/// Σ_{i,j} w_i w_j · max(0, η′ − |key_i − key_j|) over sorted (key, weight)
/// items — the exact value of ∫ |Σ w e(key·β)|² K_η′(β) dβ.
fn pair_correlation_mass(items: &[(f64, f64)], eta_p: f64) -> f64 {
    let n = items.len();
    let mut lo = 0usize;
    let mut total = KahanSum::new();
    for i in 0..n {
        let (ki, wi) = items[i];
        while lo < n && items[lo].0 <= ki - eta_p {
            lo += 1;
        }
        let mut j = lo;
        while j < n {
            let (kj, wj) = items[j];
            if kj >= ki + eta_p {
                break;
            }
            total.add(wi * wj * (eta_p - (ki - kj).abs()));
            j += 1;
        }
    }
    total.value()
}

// ---------------------------------------------------------------------------
// Kernel-weighted moments across the arc decomposition
// ---------------------------------------------------------------------------

/// Which component sum and power the moment takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentKind {
    /// ∫ |S₁(λ₁α)|² K_η(α) dα
    S1Sq,
    /// ∫ |S₂(λ₂α)|⁴ K_η(α) dα
    S2Fourth,
    /// ∫ |S_k(λ₄α)|⁴ K_η(α) dα
    SkFourth,
}

impl MomentKind {
    fn slot(self, params: &Params) -> (f64, f64, u32) {
        match self {
            MomentKind::S1Sq => (1.0, params.lambda[0], 2),
            MomentKind::S2Fourth => (2.0, params.lambda[1], 4),
            MomentKind::SkFourth => (params.k, params.lambda[3], 4),
        }
    }
}

/// A kernel-weighted moment split across the decomposition. The middle-arc
/// value is bracketed, not integrated: full-line minus central-arc
/// quadrature bounds it above, and subtracting the outer-region bound
/// brackets it below.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentValue {
    pub kind: MomentKind,
    /// Exact full-line value from pair correlations.
    pub full_line: f64,
    /// Central-arc quadrature.
    pub major: f64,
    pub major_quad_error: f64,
    /// Bound on the |α| > R contribution.
    pub trivial_tail_bound: f64,
    pub minor_upper: f64,
    pub minor_lower: f64,
}

/// Simpson quadrature of |S(λα)|^pow · K_η(α) over [lo, hi].
pub(crate) fn moment_quadrature(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
    lam: f64,
    pow: u32,
    eta: f64,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    let nu = (pow as f64 / 2.0) * lam.abs() * x + eta;
    let nsub = (((hi - lo) * nu * 8.0).ceil() as u64)
        .div_ceil(4)
        .max(4)
        .min(1 << 22) as usize
        * 4;
    let h = (hi - lo) / nsub as f64;
    let grid = GridSpec {
        start: lam * lo,
        step: lam * h,
        n: nsub + 1,
    };
    let vals = exp_sum_grid(table, k_i, delta, x, &grid, true)?;
    let f: Vec<f64> = vals
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let alpha = lo + j as f64 * h;
            let m = v.norm_sqr();
            let m = if pow == 2 { m } else { m * m };
            m * fejer_kernel(alpha, eta)
        })
        .collect();
    let simpson = |stride: usize| {
        let m_last = nsub / stride;
        let mut acc = KahanSum::new();
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
        acc.value() * (stride as f64 * h / 3.0)
    };
    let s1 = simpson(1);
    let s2 = simpson(2);
    Ok((s1, (s1 - s2).abs()))
}

/// Compute one moment: exact full line, quadratured central arc, bounded
/// outer region, bracketed middle arc.
pub fn arc_moment(
    table: &PrimeTable,
    params: &Params,
    eta: f64,
    deco: &ArcDecomposition,
    kind: MomentKind,
) -> Result<MomentValue> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("moment needs η > 0, got {eta}")));
    }
    let a = deco.major_halfwidth();
    if a >= deco.r {
        return Err(Error::Parameter(format!(
            "middle arc is empty: P/X = {a:.3e} ≥ R = {:.3e}",
            deco.r
        )));
    }
    let (k_i, lam, pow) = kind.slot(params);
    if lam == 0.0 || !lam.is_finite() {
        return Err(Error::Domain(format!("moment needs a nonzero coefficient, got {lam}")));
    }
    let x = deco.x;
    let eta_p = eta / lam.abs();

    // Exact full-line value by pair correlation.
    let full_line = lam.abs()
        * match pow {
            2 => {
                let r = prime_power_range_indices(table, k_i, delta_of(params), x)?;
                let items: Vec<(f64, f64)> = table.primes[r]
                    .iter()
                    .map(|&p| {
                        let pk = Dd::pow_u64(p, k_i).to_f64();
                        (pk, (p as f64).ln())
                    })
                    .collect();
                // Keys ascend with p already.
                pair_correlation_mass(&items, eta_p)
            }
            _ => {
                let r = prime_power_range_indices(table, k_i, delta_of(params), x)?;
                let primes = &table.primes[r];
                let mut items: Vec<(f64, f64)> =
                    Vec::with_capacity(primes.len() * primes.len());
                for &p in primes {
                    let lp = (p as f64).ln();
                    let pk = Dd::pow_u64(p, k_i).to_f64();
                    for &q in primes {
                        items.push((pk + Dd::pow_u64(q, k_i).to_f64(), lp * (q as f64).ln()));
                    }
                }
                items.sort_unstable_by(|u, v| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1)));
                pair_correlation_mass(&items, eta_p)
            }
        };

    let (major, major_quad_error) =
        moment_quadrature(table, k_i, delta_of(params), x, lam, pow, eta, -a, a)?;

    // Outer region |α| > R: for integer k the power of |S| integrates over
    // each unit window to at most ⌈|λ|⌉/|λ| times its exact period integral;
    // otherwise fall back to the supremum times the kernel's outer mass.
    let trivial_tail_bound = if k_i == 1.0 || k_i == 2.0 {
        let period = match pow {
            2 => log_square_mass(table, k_i, delta_of(params), x)?,
            _ => equal_power_sum_mass(table, k_i, delta_of(params), x)?,
        };
        let c = lam.abs().ceil() / lam.abs();
        2.0 * c * period * (1.0 / (deco.r * deco.r) + 1.0 / deco.r) / (PI * PI)
    } else {
        let sup = exp_sum(table, k_i, delta_of(params), x, 0.0)?.re;
        let sup_pow = if pow == 2 { sup * sup } else { sup * sup * sup * sup };
        sup_pow * 2.0 / (PI * PI * deco.r)
    };

    let minor_upper = (full_line - major + major_quad_error).max(0.0);
    let minor_lower = (full_line - major - major_quad_error - trivial_tail_bound).max(0.0);
    Ok(MomentValue {
        kind,
        full_line,
        major,
        major_quad_error,
        trivial_tail_bound,
        minor_upper,
        minor_lower,
    })
}

#[inline]
fn delta_of(params: &Params) -> f64 {
    params.delta
}

/// The claimed shape the middle-arc moment should stay below, and its
/// display form.
pub fn moment_shape(kind: MomentKind, params: &Params, x: f64, eta: f64) -> (f64, &'static str) {
    match kind {
        MomentKind::S1Sq => (eta * x * x.ln(), "η X ln X"),
        MomentKind::S2Fourth => (eta * x * x.ln() * x.ln(), "η X ln² X"),
        MomentKind::SkFourth => {
            let k = params.k;
            let shape = eta
                * x.powf(params.epsilon)
                * x.powf(2.0 / k).max(x.powf(4.0 / k - 1.0));
            (shape, "η X^ε max(X^(2/k), X^(4/k−1))")
        }
    }
}

// ---------------------------------------------------------------------------
// Pointwise size probes
// ---------------------------------------------------------------------------

/// max over an n-point grid of α ∈ [0, 1] of |S_k(α)| / X^(1/k), with the
/// frequency attaining it. The supremum sits at α = 0 where the sum is the
/// plain log mass, so the ratio tends to 1 from below as X grows.
pub fn sk_sup_ratio(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
    n_grid: usize,
) -> Result<(f64, f64)> {
    if n_grid < 2 {
        return Err(Error::Parameter("sup-ratio grid needs ≥ 2 points".into()));
    }
    let scale = x.powf(1.0 / k_i);
    let mut best = (0.0f64, 0.0f64);
    for j in 0..n_grid {
        let alpha = j as f64 / (n_grid - 1) as f64;
        let v = exp_sum(table, k_i, delta, x, alpha)?.norm() / scale;
        if v > best.0 {
            best = (v, alpha);
        }
    }
    Ok(best)
}

/// The size thresholds (X^(6/7+ε), X^(3/7+ε)) past which the k=1 and k=2
/// sums cannot both stay large on the middle arc.
pub fn minor_arc_thresholds(x: f64, epsilon: f64) -> (f64, f64) {
    (x.powf(6.0 / 7.0 + epsilon), x.powf(3.0 / 7.0 + epsilon))
}

/// Fraction of an n-point middle-arc frequency grid where |S₁(λ₁α)| and
/// |S₂(λ₂α)| simultaneously exceed their thresholds. Always in [0, 1]; the
/// middle-arc estimates predict it to vanish as X grows.
pub fn threshold_exceedance(
    table: &PrimeTable,
    params: &Params,
    deco: &ArcDecomposition,
    n_grid: usize,
) -> Result<f64> {
    if n_grid < 2 {
        return Err(Error::Parameter("exceedance grid needs ≥ 2 points".into()));
    }
    let a = deco.major_halfwidth();
    if a >= deco.r {
        return Err(Error::Parameter("middle arc is empty".into()));
    }
    let (t1, t2) = minor_arc_thresholds(deco.x, params.epsilon);
    let mut hits = 0usize;
    for j in 0..n_grid {
        let alpha = a + (deco.r - a) * j as f64 / (n_grid - 1) as f64;
        let s1 = exp_sum(table, 1.0, params.delta, deco.x, params.lambda[0] * alpha)?.norm();
        let s2 = exp_sum(table, 2.0, params.delta, deco.x, params.lambda[1] * alpha)?.norm();
        if s1 > t1 && s2 > t2 {
            hits += 1;
        }
    }
    Ok(hits as f64 / n_grid as f64)
}

// ---------------------------------------------------------------------------
// The stability driver
// ---------------------------------------------------------------------------

/// Measure every claimed inequality at each scale in `xs` and report the
/// implied constants with a [`Verdict`] against `band_limit` (use 2.0 for
/// the canonical criterion). Scales must be large enough for the arc
/// decomposition to exist and the table must cover X and the variance
/// integral's reach.
pub fn bound_shape_stability(
    table: &PrimeTable,
    params: &Params,
    eta: f64,
    xs: &[f64],
    band_limit: f64,
) -> Result<Vec<BoundCheck>> {
    if xs.is_empty() {
        return Err(Error::Parameter("no scales given".into()));
    }
    if !(band_limit >= 1.0) {
        return Err(Error::Parameter(format!(
            "band limit must be ≥ 1, got {band_limit}"
        )));
    }
    let grid = default_tu_grid();
    let n = xs.len();
    let mut tu = Vec::with_capacity(n);
    let mut tu_int = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut moments: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut moment_shapes: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut selberg = Vec::with_capacity(n);
    let mut selberg_shape = Vec::with_capacity(n);
    let kinds = [MomentKind::S1Sq, MomentKind::S2Fourth, MomentKind::SkFourth];
    for &x in xs {
        tu.push(tu_gap_check(table, params.k, params.delta, x, &grid)?.constant);
        tu_int.push(tu_gap_integer_check(params.k, params.delta, x, &grid)?.constant);
        sup.push(sk_sup_ratio(table, params.k, params.delta, x, 65)?.0);
        let deco = crate::arcs::standard_decomposition(params, x, eta)?;
        for (i, &kind) in kinds.iter().enumerate() {
            let m = arc_moment(table, params, eta, &deco, kind)?;
            moments[i].push(m.minor_upper);
            moment_shapes[i].push(moment_shape(kind, params, x, eta).0);
        }
        let h = selberg_window(x, params.k);
        let shape = h * h * x.powf(2.0 / params.k - 1.0);
        let s = selberg_integral(table, params.k, x, h, 1e-8 * shape)?;
        selberg.push(s.value);
        selberg_shape.push(shape);
    }
    let ratio = |lhs: &[f64], shape: &[f64]| -> Vec<f64> {
        lhs.iter().zip(shape).map(|(l, s)| l / s).collect()
    };
    let ones = vec![1.0; n];
    let mut out = Vec::new();
    out.push(BoundCheck::from_constants(
        "prime-sum vs integral gap",
        "1 + |α| X (normalization already applied)",
        xs,
        tu.clone(),
        tu,
        band_limit,
    ));
    out.push(BoundCheck::from_constants(
        "integer-sum vs integral gap (diagnostic)",
        "1 + |α| X (normalization already applied)",
        xs,
        tu_int.clone(),
        tu_int,
        band_limit,
    ));
    out.push(BoundCheck::from_constants(
        "power-sum sup ratio",
        "X^(1/k)",
        xs,
        sup.clone(),
        ratio(&sup, &ones),
        band_limit,
    ));
    let moment_names = [
        "middle-arc second moment, k=1 factor",
        "middle-arc fourth moment, k=2 factor",
        "middle-arc fourth moment, k-th-power factor",
    ];
    let moment_formulas = [
        "η X ln X",
        "η X ln² X",
        "η X^ε max(X^(2/k), X^(4/k−1))",
    ];
    for i in 0..3 {
        out.push(BoundCheck::from_constants(
            moment_names[i],
            moment_formulas[i],
            xs,
            moments[i].clone(),
            ratio(&moments[i], &moment_shapes[i]),
            band_limit,
        ));
    }
    out.push(BoundCheck::from_constants(
        "short-window prime variance",
        "h² X^(2/k − 1), h = X^(1 − 5/(6k) + 0.05)",
        xs,
        selberg.clone(),
        ratio(&selberg, &selberg_shape),
        band_limit,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RatioSpec;
    use crate::primes::sieve;

    fn demo_params() -> Params {
        Params {
            lambda: [std::f64::consts::SQRT_2, 1.0, -1.0, -1.0],
            omega: 0.0,
            k: 2.0,
            delta: 0.01,
            epsilon: 0.01,
            ratio: RatioSpec::QuadSurd { d: 2, p: 0, q: 1 },
        }
    }

    #[test]
    fn pair_count_worked_example() {
        // k=2, X=4: integers {2, 3, 4}, ordered pair sums
        // {8,13,13,18,20,20,25,25,32}; within a strict unit window only equal
        // sums pair up, and the multiplicities square to 15.
        assert_eq!(robert_sargos_count(4.0, 2.0, 1.0).unwrap(), 15);
        assert_eq!(robert_sargos_count_naive(4.0, 2.0, 1.0).unwrap(), 15);
    }

    #[test]
    fn pair_count_matches_naive_oracle() {
        let cases = [
            (1.5, [4.0, 9.0, 20.0]),
            (2.0, [4.0, 16.0, 50.0]),
            (2.5, [6.0, 30.0, 120.0]),
        ];
        for &(k, xs) in &cases {
            for &x in &xs {
                for &gamma in &[0.4, 1.0, 3.7, 1e6] {
                    let fast = robert_sargos_count(x, k, gamma).unwrap();
                    let slow = robert_sargos_count_naive(x, k, gamma).unwrap();
                    assert_eq!(fast, slow, "k={k} X={x} γ={gamma}");
                }
            }
        }
    }

    #[test]
    fn pair_count_extremes() {
        // Vanishing window: only exactly-equal sums remain. Each unordered
        // off-diagonal pair {a, b} appears as two ordered pairs with the
        // same sum, so with no accidental collisions the count is
        // M + 4·M(M−1)/2 = 2M² − M — always ≥ the diagonal M².
        let m = |x: f64, k: f64| rs_integer_range(x, k).unwrap().len() as u64;
        let m15 = m(20.0, 1.5);
        assert_eq!(
            robert_sargos_count(20.0, 1.5, 1e-12).unwrap(),
            2 * m15 * m15 - m15
        );
        let m2 = m(16.0, 2.0);
        assert!(robert_sargos_count(16.0, 2.0, 1e-12).unwrap() >= m2 * m2);
        // Window past every gap: all M⁴ ordered quadruples count.
        let m25 = m(30.0, 2.5);
        assert_eq!(robert_sargos_count(30.0, 2.5, 1e9).unwrap(), m25.pow(4));
    }

    #[test]
    fn pair_count_range_cap() {
        // X^(1/k) ≈ 3000 exceeds the M = 2000 cap.
        assert!(matches!(
            robert_sargos_count(9.0e6, 2.0, 1.0),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn variance_integral_matches_dense_oracle() {
        let table = sieve(60).unwrap();
        let (k, x, h) = (1.0, 10.0, 2.0);
        let r = selberg_integral(&table, k, x, h, 1e-12).unwrap();
        // Independent dense Simpson between the same breakpoints.
        let mut pts = vec![x, 2.0 * x];
        for &p in &table.primes {
            let pf = p as f64;
            if pf > x && pf < 2.0 * x {
                pts.push(pf);
            }
            if pf - h > x && pf - h < 2.0 * x {
                pts.push(pf - h);
            }
        }
        pts.sort_unstable_by(f64::total_cmp);
        pts.dedup();
        // Midpoint sampling: the k=1 integrand is constant on each piece,
        // and midpoints never land on a jump of the (right-continuous)
        // prime-counting function — so this dense rule is exact here.
        let mut oracle = KahanSum::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = 4096;
            let hh = (b - a) / n as f64;
            let mut acc = KahanSum::new();
            for j in 0..n {
                let t = a + (j as f64 + 0.5) * hh;
                let c = table.theta(t + h).unwrap() - table.theta(t).unwrap();
                let d = c - h;
                acc.add(d * d);
            }
            oracle.add(acc.value() * hh);
        }
        let o = oracle.value();
        assert!(
            (r.value - o).abs() <= 1e-8 * o.abs().max(1.0),
            "{} vs oracle {o}",
            r.value
        );
        assert!(r.value >= 0.0);
        assert!(r.pieces >= 4);
    }

    #[test]
    fn variance_integral_guards_table_reach() {
        let table = sieve(10).unwrap();
        assert!(matches!(
            selberg_integral(&table, 1.0, 10.0, 2.0, 1e-10),
            Err(Error::TableTooSmall { .. })
        ));
        // k = 2 only needs the square roots covered.
        let small = sieve(30).unwrap();
        let r = selberg_integral(&small, 2.0, 100.0, 10.0, 1e-10).unwrap();
        assert!(r.value >= 0.0);
        assert!(r.pieces > 2);
    }

    #[test]
    fn gap_check_worked_example() {
        // k=1, δ=0.5, X=10, α=0: T = 5 (interval length), U = #{5, 7} = 2,
        // so the normalized gap is 3.
        let table = sieve(20).unwrap();
        let g = tu_gap_check(&table, 1.0, 0.5, 10.0, &[0.0]).unwrap();
        assert!((g.constant - 3.0).abs() < 1e-12, "{}", g.constant);
        assert!(g.constant_lo <= g.constant && g.constant <= g.constant_hi);
        assert_eq!(g.argmax_alpha, 0.0);
    }

    #[test]
    fn gap_check_rejects_large_frequencies() {
        let table = sieve(20).unwrap();
        assert!(tu_gap_check(&table, 1.0, 0.5, 10.0, &[1.5]).is_err());
        assert!(tu_gap_check(&table, 1.0, 0.5, 10.0, &[]).is_err());
        assert!(tu_gap_integer_check(1.0, 0.5, 10.0, &[-2.0]).is_err());
    }

    #[test]
    fn integer_gap_is_smaller_than_prime_gap() {
        // The smooth integral tracks the integer sum closely; the prime sum
        // deviates by the growing density factor. Diagnostic, k = 2.
        let table = sieve(1000).unwrap();
        let grid = default_tu_grid();
        let gp = tu_gap_check(&table, 2.0, 0.01, 1000.0, &grid).unwrap();
        let gi = tu_gap_integer_check(2.0, 0.01, 1000.0, &grid).unwrap();
        assert!(
            gi.constant < gp.constant,
            "integer {} vs prime {}",
            gi.constant,
            gp.constant
        );
    }

    #[test]
    fn moment_full_line_matches_direct_quadrature() {
        // λ = 1, η = 0.9: prime keys differ by ≥ 1, so the exact full-line
        // second moment is 0.9 · Σ ln²p. A wide direct quadrature must come
        // out below it by no more than the outer tail allows.
        let table = sieve(300).unwrap();
        let p = {
            let mut p = demo_params();
            p.lambda[0] = 1.0;
            p
        };
        let eta = 0.9;
        let deco = ArcDecomposition {
            x: 300.0,
            p: 6.0,
            r: 30.0,
        };
        let m = arc_moment(&table, &p, eta, &deco, MomentKind::S1Sq).unwrap();
        let m1 = log_square_mass(&table, 1.0, p.delta, 300.0).unwrap();
        assert!((m.full_line - 0.9 * m1).abs() <= 1e-10 * m1);
        let (wide, werr) =
            moment_quadrature(&table, 1.0, p.delta, 300.0, 1.0, 2, eta, -40.0, 40.0).unwrap();
        assert!(wide <= m.full_line + werr + 1e-9 * m.full_line);
        let tail = 2.0 * m1 * (1.0 / 1600.0 + 1.0 / 40.0) / (PI * PI);
        assert!(
            m.full_line - wide <= tail + werr + 1e-9 * m.full_line,
            "gap {:.3e} vs tail {tail:.3e}",
            m.full_line - wide
        );
    }

    #[test]
    fn moment_brackets_are_consistent() {
        let table = sieve(400).unwrap();
        let p = demo_params();
        let deco = crate::arcs::standard_decomposition(&p, 400.0, 1.0).unwrap();
        for kind in [MomentKind::S1Sq, MomentKind::S2Fourth, MomentKind::SkFourth] {
            let m = arc_moment(&table, &p, 1.0, &deco, kind).unwrap();
            assert!(m.full_line > 0.0);
            assert!(m.major >= 0.0);
            assert!(m.minor_lower <= m.minor_upper, "{kind:?}");
            assert!(m.minor_upper <= m.full_line + m.major_quad_error);
            assert!(m.trivial_tail_bound >= 0.0);
        }
        // An empty middle arc is an error, not a silent zero.
        let bad = ArcDecomposition {
            x: 100.0,
            p: 600.0,
            r: 5.0,
        };
        assert!(arc_moment(&table, &p, 1.0, &bad, MomentKind::S1Sq).is_err());
    }

    #[test]
    fn thresholds_worked_example() {
        let (t1, t2) = minor_arc_thresholds(1e7, 0.0);
        assert!((t1 - 1e6).abs() <= 1e-6 * 1e6);
        assert!((t2 - 1e3).abs() <= 1e-6 * 1e3);
        let table = sieve(200).unwrap();
        let p = demo_params();
        let deco = crate::arcs::standard_decomposition(&p, 200.0, 1.0).unwrap();
        let f = threshold_exceedance(&table, &p, &deco, 101).unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn sup_ratio_stays_below_one() {
        let table = sieve(2000).unwrap();
        for &x in &[500.0, 2000.0] {
            let (r, arg) = sk_sup_ratio(&table, 2.0, 0.01, x, 33).unwrap();
            assert!(r > 0.1 && r < 1.0, "X={x}: ratio {r}");
            assert_eq!(arg, 0.0, "sup should sit at frequency 0");
        }
    }

    #[test]
    fn stability_driver_reports_all_checks() {
        let table = sieve(1000).unwrap();
        let p = demo_params();
        let checks = bound_shape_stability(&table, &p, 1.0, &[400.0, 1000.0], 2.0).unwrap();
        assert_eq!(checks.len(), 7);
        for c in &checks {
            assert_eq!(c.constants.len(), 2, "{}", c.name);
            assert!(c.implied_constant.is_finite() && c.implied_constant > 0.0, "{}", c.name);
            assert!(c.band >= 1.0, "{}", c.name);
            let expect = if c.band <= 2.0 {
                Verdict::Stable
            } else {
                Verdict::Unstable
            };
            assert_eq!(c.verdict, expect, "{}", c.name);
        }
        // The sup ratio is genuinely scale-stable.
        let sup = checks.iter().find(|c| c.name.contains("sup")).unwrap();
        assert_eq!(sup.verdict, Verdict::Stable);
    }

    #[test]
    fn equal_power_sum_mass_has_exact_small_case() {
        // Primes with p ∈ [2, 6]: {2, 3, 5}. k=1 pair sums:
        // 4,5,7 / 5,6,8 / 7,8,10 → masses: 4:ln²2; 5:2ln2ln3; 6:ln²3;
        // 7:2ln2ln5; 8:2ln3ln5; 10:ln²5. Sum of squares below.
        let table = sieve(10).unwrap();
        let got = equal_power_sum_mass(&table, 1.0, 2.0 / 6.0, 6.0).unwrap();
        let (l2, l3, l5) = (2f64.ln(), 3f64.ln(), 5f64.ln());
        let expect = (l2 * l2).powi(2)
            + (2.0 * l2 * l3).powi(2)
            + (l3 * l3).powi(2)
            + (2.0 * l2 * l5).powi(2)
            + (2.0 * l3 * l5).powi(2)
            + (l5 * l5).powi(2);
        assert!((got - expect).abs() <= 1e-12 * expect, "{got} vs {expect}");
        // Fractional k is rejected on the integer-sum path.
        assert!(equal_power_sum_mass(&table, 1.5, 0.1, 6.0).is_err());
    }
}

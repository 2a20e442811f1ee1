//! Cross-module checks through the public API: the quadrature/solver
//! identity, convergent-driven scale scans, and the smooth main term against
//! the arithmetic truth.

use dioph::arcs::{self, ArcTag, GridPolicy};
use dioph::contfrac;
use dioph::model::RatioSpec;
use dioph::primes::sieve;
use dioph::solver;
use dioph::verify;
use dioph::{EtaPolicy, Params};

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

/// The full-line integral of S₁S₂S₃S₄·K_η equals the triangle-weighted
/// solution mass — two completely independent code paths.
#[test]
fn quadrature_and_solver_agree_on_the_full_line() {
    let params = demo_params();
    let x = 500.0;
    let eta = 1.0;
    let table = sieve(solver::required_prime_limit(x)).unwrap();
    let deco = arcs::standard_decomposition(&params, x, eta).unwrap();
    let policy = GridPolicy {
        truncation: Some(100.0),
        ..GridPolicy::default()
    };
    let full = arcs::integrate_I(&table, &params, eta, &deco, ArcTag::Full, &policy).unwrap();
    let direct = arcs::direct_sum_I(&table, &params, x, eta).unwrap();
    assert!(direct > 0.0);
    let gap = (full.value - direct).abs();
    assert!(
        gap <= full.quad_error + full.tail_bound,
        "gap {gap:.4e} exceeds budget {:.4e} + {:.4e}",
        full.quad_error,
        full.tail_bound
    );
    assert!(
        gap <= 0.10 * direct,
        "relative gap {:.2}% too large",
        100.0 * gap / direct
    );
}

/// Scales driven by the continued-fraction denominators of λ₁/λ₂ feed the
/// solver scan; the normalized mass is the reported mass over η²X^(1+1/k).
#[test]
fn convergent_scales_drive_the_scan() {
    let params = demo_params();
    let exp = contfrac::expand(&params.ratio, 6).unwrap();
    // q_n for √2: 1, 2, 5, 12, 29, 70.
    let mut xs = contfrac::x_sequence(&exp, contfrac::SCALE_EXPONENT, 400.0).unwrap();
    xs.retain(|&x| x >= 2.0);
    assert!(!xs.is_empty());
    for (x, q) in xs.iter().zip([2.0f64, 5.0, 12.0]) {
        assert!((x - q.powf(7.0 / 3.0)).abs() <= 1e-9 * x, "{x} vs q={q}");
    }
    let table = sieve(400).unwrap();
    let points = solver::scan_sequence(&table, &params, &EtaPolicy::Fixed(0.75), &xs).unwrap();
    assert_eq!(points.len(), xs.len());
    for p in &points {
        assert!(p.triangle_mass >= 0.0);
        assert!(p.normalized_mass.is_finite());
        let shape = p.eta * p.eta * p.x.powf(1.5);
        assert!((p.normalized_mass - p.triangle_mass / shape).abs() <= 1e-12);
    }
}

/// The smooth main term predicts the arithmetic mass, and the agreement
/// tightens as the scale grows.
///
/// Small scales sit far below the prediction: at X = 1000 the square slots
/// hold nine primes each, every attainable integer combination is ≡ 1
/// (mod 24), and by chance only six primes land in the resulting windows
/// (mostly near the edges where the triangle weight vanishes), so the
/// measured/predicted ratio is ~0.05.  By X = 4000 it recovers to ~0.64 and
/// it passes through 1 near X = 4e4.  We pin the moderate scale inside a
/// factor-four band and check the approach toward 1 between the two scales.
#[test]
fn main_term_predicts_the_measured_mass() {
    let params = demo_params();
    let eta = 1.0;
    let ratio_at = |x: f64| {
        let table = sieve(solver::required_prime_limit(x)).unwrap();
        let direct = arcs::direct_sum_I(&table, &params, x, eta).unwrap();
        let mt = arcs::main_term_j1(&params, x, eta, &GridPolicy::default()).unwrap();
        assert!(direct > 0.0 && mt.fourier_value > 0.0);
        direct / mt.fourier_value
    };
    let small = ratio_at(1000.0);
    let big = ratio_at(4000.0);
    assert!(
        (0.25..=4.0).contains(&big),
        "arithmetic/smooth ratio at X=4000 is {big:.3}, outside the factor-4 band"
    );
    assert!(
        big.ln().abs() < small.ln().abs(),
        "ratio should approach 1 with scale: {small:.3} at X=1e3, {big:.3} at X=4e3"
    );
}

/// The fast pair counter and its quartic oracle agree on a mid-size range.
#[test]
fn pair_counter_agrees_with_oracle_at_mid_size() {
    // X = 120, k = 2: integers in [√120, 2√120] = [10.95…, 21.9…] → M = 11.
    for &gamma in &[0.5, 1.0, 2.0, 7.0] {
        let fast = verify::robert_sargos_count(120.0, 2.0, gamma).unwrap();
        let slow = verify::robert_sargos_count_naive(120.0, 2.0, gamma).unwrap();
        assert_eq!(fast, slow, "γ = {gamma}");
    }
}

/// The stability driver, the moments, and the decomposition compose through
/// the public API at two scales without error and with coherent output.
#[test]
fn stability_driver_composes_end_to_end() {
    let params = demo_params();
    let table = sieve(1000).unwrap();
    let checks = verify::bound_shape_stability(&table, &params, 1.0, &[500.0, 1000.0], 2.0).unwrap();
    assert_eq!(checks.len(), 7);
    for c in &checks {
        assert_eq!(c.scales_tested, vec![500.0, 1000.0], "{}", c.name);
        assert!(c.implied_constant > 0.0 && c.implied_constant.is_finite(), "{}", c.name);
        assert!(
            c.constants.iter().all(|v| *v > 0.0 && v.is_finite()),
            "{}",
            c.name
        );
    }
}

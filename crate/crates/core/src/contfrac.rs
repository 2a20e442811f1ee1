//! Exact continued fractions for the coefficient ratio.
//!
//! The scale sequence used by scans is driven by the continued fraction of
//! λ₁/λ₂: the convergent denominators q_n give the scales X_n = q_n^(7/3) at
//! which the approximation quality |q·(λ₁/λ₂) − p| < 1/q_next is available.
//! Everything here is exact integer arithmetic:
//!
//! * quadratic surds (P + √D)/Q use the classical integer-state recurrence
//!   (floors extracted without any floating point);
//! * rationals use the Euclidean algorithm and terminate;
//! * decimals are expanded as *intervals* [v − 2^(−bits), v + 2^(−bits)]:
//!   a term is emitted only while both endpoints share it, so every emitted
//!   quotient is certified, and `exhausted` marks where certainty ran out.

use crate::dd::{Dd, LN2};
use crate::error::{Error, Result};
use crate::model::RatioSpec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

type BRat = Ratio<BigInt>;

/// Default exponent for the scale sequence X_n = q_n^(7/3).
pub const SCALE_EXPONENT: f64 = 7.0 / 3.0;

/// A (possibly partial) continued fraction with its convergents.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub quotients: Vec<BigInt>,
    /// `(p_n, q_n)` in lowest terms, same length as `quotients`.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The expansion is complete (rational value, no more terms exist).
    pub terminated: bool,
    /// Stopped because the input's precision cannot certify the next term.
    pub exhausted: bool,
}

/// Expand a ratio to at most `max_terms` certified quotients.
pub fn expand(ratio: &RatioSpec, max_terms: usize) -> Result<Expansion> {
    if max_terms == 0 {
        return Err(Error::Parameter("need at least one quotient".into()));
    }
    let (quotients, terminated, exhausted) = match ratio {
        RatioSpec::QuadSurd { d, p, q } => {
            if *d <= 0 || *q == 0 {
                return Err(Error::Parameter(format!(
                    "surd needs d > 0 and q ≠ 0, got d = {d}, q = {q}"
                )));
            }
            (expand_surd(d, p, q, max_terms), false, false)
        }
        RatioSpec::Rational { p, q } => {
            if *q == 0 {
                return Err(Error::Parameter("rational ratio with zero denominator".into()));
            }
            let (qs, done) = expand_rational(BigInt::from(*p), BigInt::from(*q), max_terms);
            (qs, done, false)
        }
        RatioSpec::Decimal { digits, bits } => {
            let v = decimal_to_rational(digits)?;
            let half_width = BRat::new(BigInt::one(), BigInt::one() << *bits);
            let (qs, ex) = expand_interval(&v - &half_width, v + half_width, max_terms);
            (qs, false, ex)
        }
    };
    let convergents = convergents_of(&quotients);
    Ok(Expansion {
        quotients,
        convergents,
        terminated,
        exhausted,
    })
}

/// p_n = a_n p_{n−1} + p_{n−2}, q_n likewise.
pub fn convergents_of(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_prev2, mut q_prev2) = (BigInt::zero(), BigInt::one());
    for a in quotients {
        let p = a * &p_prev + &p_prev2;
        let q = a * &q_prev + &q_prev2;
        out.push((p.clone(), q.clone()));
        p_prev2 = std::mem::replace(&mut p_prev, p);
        q_prev2 = std::mem::replace(&mut q_prev, q);
    }
    out
}

/// Compare √d with the integer t (d ≥ 0, never Equal for nonsquare d).
fn cmp_sqrt(d: &BigInt, t: &BigInt) -> Ordering {
    if t.is_negative() {
        return Ordering::Greater;
    }
    d.cmp(&(t * t))
}

/// floor((p + √d)/q) exactly, for nonsquare d > 0 and q ≠ 0.
///
/// With s = ⌊√d⌋ the numerator lies in the open interval (p+s, p+s+1), which
/// contains no integer, so the floor of the quotient is constant there.
fn surd_floor(p: &BigInt, q: &BigInt, s: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        (-(p + s) - BigInt::one()).div_floor(&-q)
    }
}

fn expand_surd(d: &i64, p: &i64, q: &i64, max_terms: usize) -> Vec<BigInt> {
    let (mut pp, mut dd, mut qq) = (BigInt::from(*p), BigInt::from(*d), BigInt::from(*q));
    // The recurrence needs Q | (D − P²); scale by |Q| once if necessary.
    if !((&dd - &pp * &pp) % &qq).is_zero() {
        let aq = qq.abs();
        pp *= &aq;
        dd *= &aq * &aq;
        qq *= aq;
    }
    let s = dd.sqrt(); // ⌊√D⌋, exact integer square root
    debug_assert!(&s * &s != dd, "square discriminants are rejected upstream");
    let mut out = Vec::with_capacity(max_terms);
    for _ in 0..max_terms {
        let a = surd_floor(&pp, &qq, &s);
        out.push(a.clone());
        // x' = 1/(x − a) = (P' + √D)/Q' with P' = aQ − P, Q' = (D − P'²)/Q.
        let p_next = &a * &qq - &pp;
        let num = &dd - &p_next * &p_next;
        debug_assert!((&num % &qq).is_zero());
        qq = num / qq;
        pp = p_next;
    }
    out
}

fn expand_rational(p: BigInt, q: BigInt, max_terms: usize) -> (Vec<BigInt>, bool) {
    let mut num = p;
    let mut den = q;
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    let mut out = Vec::new();
    while out.len() < max_terms {
        let (a, r) = num.div_mod_floor(&den);
        out.push(a);
        if r.is_zero() {
            return (out, true);
        }
        num = den;
        den = r;
    }
    (out, false)
}

/// Emit quotients common to every value in [lo, hi]; `true` in the second
/// slot means precision (not the term budget) stopped the expansion.
fn expand_interval(mut lo: BRat, mut hi: BRat, max_terms: usize) -> (Vec<BigInt>, bool) {
    debug_assert!(lo <= hi);
    let mut out = Vec::new();
    while out.len() < max_terms {
        let al = lo.floor().to_integer();
        let ah = hi.floor().to_integer();
        if al != ah {
            return (out, true);
        }
        out.push(al.clone());
        let fl = &lo - BRat::from_integer(al.clone());
        let fh = &hi - BRat::from_integer(al);
        if fl.is_zero() {
            // The low endpoint is exactly an integer: the next term cannot
            // be certified from interval data.
            return (out, true);
        }
        // Reciprocals swap the endpoints.
        lo = fh.recip();
        hi = fl.recip();
    }
    (out, false)
}

/// Exact rational value of a decimal literal (sign, point, optional e±NN).
pub fn decimal_to_rational(text: &str) -> Result<BRat> {
    let t = text.trim();
    let bad = || Error::Parameter(format!("bad decimal literal {text:?}"));
    let (mantissa, exp10) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let n: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bad())?
    };
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        BRat::from_integer(n * ten.pow(shift as u32))
    } else {
        BRat::new(n, ten.pow((-shift) as u32))
    };
    Ok(if sign < 0 { -value } else { value })
}

/// Outcome of checking |q_n·x − p_n| < 1/q_{n+1} for one convergent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxStatus {
    Proven,
    Failed,
    /// Interval data too coarse to decide (decimal ratios only).
    Inconclusive,
}

/// Verify the best-approximation inequality |q_n·x − p_n| < 1/q_{n+1} for
/// every convergent that has a successor; all comparisons are exact.
pub fn best_approx_check(ratio: &RatioSpec, exp: &Expansion) -> Result<Vec<ApproxStatus>> {
    let n = exp.convergents.len();
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let (pn, qn) = &exp.convergents[i];
        let (_, q_next) = &exp.convergents[i + 1];
        let status = match ratio {
            RatioSpec::Rational { p, q } => {
                // |q_n·a/b − p_n| < 1/r ⟺ |q_n a − p_n b|·r < |b|
                let a = BigInt::from(*p);
                let b = BigInt::from(*q);
                let lhs = (qn * &a - pn * &b).abs() * q_next;
                if lhs < b.abs() {
                    ApproxStatus::Proven
                } else {
                    ApproxStatus::Failed
                }
            }
            RatioSpec::QuadSurd { d, p, q } => {
                // |q_n(p+√d)/q − p_n| < 1/r ⟺ −|q| < r(u + q_n√d) < |q|
                // with u = q_n p − p_n q; split into two one-sided exact
                // square-root comparisons.
                let dd = BigInt::from(*d);
                let qq = BigInt::from(*q);
                let u = qn * BigInt::from(*p) - pn * &qq;
                let aq = qq.abs();
                let v = qn * q_next; // coefficient of √d after scaling by r
                let ru = q_next * &u;
                // upper: v√d < |q| − ru
                let w1 = &aq - &ru;
                let upper =
                    w1.is_positive() && cmp_sqrt(&(&dd * &v * &v), &w1) == Ordering::Less;
                // lower: v√d > −|q| − ru
                let w2 = -&aq - ru;
                let lower =
                    w2.is_negative() || cmp_sqrt(&(&dd * &v * &v), &w2) == Ordering::Greater;
                if upper && lower {
                    ApproxStatus::Proven
                } else {
                    ApproxStatus::Failed
                }
            }
            RatioSpec::Decimal { digits, bits } => {
                let v = decimal_to_rational(digits)?;
                let half = BRat::new(BigInt::one(), BigInt::one() << *bits);
                let lo = &v - &half;
                let hi = v + half;
                // q_n x − p_n is increasing in x; its range over [lo, hi] is
                // [e_lo, e_hi].
                let qn_r = BRat::from_integer(qn.clone());
                let pn_r = BRat::from_integer(pn.clone());
                let e_lo = &qn_r * lo - &pn_r;
                let e_hi = qn_r * hi - pn_r;
                let sup = e_lo.abs().max(e_hi.abs());
                let inf = if !e_lo.is_positive() && !e_hi.is_negative() {
                    BRat::zero() // the interval straddles p_n/q_n
                } else {
                    e_lo.abs().min(e_hi.abs())
                };
                let bound = BRat::new(BigInt::one(), q_next.clone());
                if sup < bound {
                    ApproxStatus::Proven
                } else if inf >= bound {
                    ApproxStatus::Failed
                } else {
                    ApproxStatus::Inconclusive
                }
            }
        };
        out.push(status);
    }
    Ok(out)
}

/// Scale sequence X_n = q_n^exponent from the convergent denominators, in
/// f64, truncated before the first entry that would exceed `cap`.
pub fn x_sequence(exp: &Expansion, exponent: f64, cap: f64) -> Result<Vec<f64>> {
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::Parameter(format!("scale exponent must be positive, got {exponent}")));
    }
    if !(cap > 1.0) {
        return Err(Error::Parameter(format!("scale cap must exceed 1, got {cap}")));
    }
    let ln_cap = cap.ln();
    let mut out = Vec::new();
    for (_, q) in &exp.convergents {
        if !q.is_positive() {
            continue; // q_0 can be… no: q_n ≥ 1 always; guard anyway
        }
        let ln_q = ln_bigint(q);
        let ln_x = ln_q.mul_f64(exponent);
        if ln_x.hi > ln_cap {
            break;
        }
        out.push(ln_x.exp().to_f64());
    }
    Ok(out)
}

/// ln of a positive BigInt via its top 106 bits (relative error < 2^(−105)
/// from the truncation, far below the double-double target).
fn ln_bigint(q: &BigInt) -> Dd {
    debug_assert!(q.is_positive());
    let bits = q.bits();
    if bits <= 106 {
        Dd::from_u128(q.to_u128().expect("fits in 106 bits")).ln()
    } else {
        let shift = bits - 106;
        let m: BigInt = q >> shift;
        let head = Dd::from_u128(m.to_u128().expect("top bits fit")).ln();
        head.add(LN2.mul_f64(shift as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn quotients_i64(e: &Expansion) -> Vec<i64> {
        e.quotients.iter().map(|q| q.to_i64().unwrap()).collect()
    }

    fn convergents_i64(e: &Expansion) -> Vec<(i64, i64)> {
        e.convergents
            .iter()
            .map(|(p, q)| (p.to_i64().unwrap(), q.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn sqrt2_quotients_and_convergents() {
        let e = expand(&RatioSpec::QuadSurd { d: 2, p: 0, q: 1 }, 6).unwrap();
        assert_eq!(quotients_i64(&e), vec![1, 2, 2, 2, 2, 2]);
        assert_eq!(
            convergents_i64(&e),
            vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70)]
        );
        assert!(!e.terminated);
        assert!(!e.exhausted);
    }

    #[test]
    fn golden_ratio_is_all_ones() {
        let e = expand(&RatioSpec::QuadSurd { d: 5, p: 1, q: 2 }, 8).unwrap();
        assert_eq!(quotients_i64(&e), vec![1; 8]);
        // Fibonacci convergents.
        assert_eq!(
            convergents_i64(&e)[..5],
            [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]
        );
    }

    #[test]
    fn sqrt61_period() {
        let e = expand(&RatioSpec::QuadSurd { d: 61, p: 0, q: 1 }, 14).unwrap();
        assert_eq!(
            quotients_i64(&e),
            vec![7, 1, 4, 3, 1, 2, 2, 1, 3, 4, 1, 14, 1, 4]
        );
        assert_eq!(
            convergents_i64(&e)[..8],
            [
                (7, 1),
                (8, 1),
                (39, 5),
                (125, 16),
                (164, 21),
                (453, 58),
                (1070, 137),
                (1523, 195)
            ]
        );
    }

    #[test]
    fn surd_with_mixed_p_q() {
        // (3+√61)/7 requires the |Q|-scaling normalization (7 ∤ 61 − 9).
        let e = expand(&RatioSpec::QuadSurd { d: 61, p: 3, q: 7 }, 14).unwrap();
        assert_eq!(
            quotients_i64(&e),
            vec![1, 1, 1, 5, 7, 8, 1, 35, 1, 1, 3, 1, 6, 1]
        );
    }

    #[test]
    fn negative_surds() {
        let e = expand(&RatioSpec::QuadSurd { d: 2, p: -5, q: 3 }, 10).unwrap();
        assert_eq!(quotients_i64(&e), vec![-2, 1, 4, 8, 4, 8, 4, 8, 4, 8]);
        // Negative denominator: −√2.
        let e = expand(&RatioSpec::QuadSurd { d: 2, p: 0, q: -1 }, 8).unwrap();
        assert_eq!(quotients_i64(&e), vec![-2, 1, 1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn rational_terminates() {
        let e = expand(&RatioSpec::Rational { p: 7, q: 3 }, 10).unwrap();
        assert_eq!(quotients_i64(&e), vec![2, 3]);
        assert!(e.terminated);
        let e = expand(&RatioSpec::Rational { p: 355, q: 113 }, 10).unwrap();
        assert_eq!(quotients_i64(&e), vec![3, 7, 16]);
        assert!(e.terminated);
        assert_eq!(*e.convergents.last().unwrap(), (big(355), big(113)));
        // Negative value, floor-style quotients.
        let e = expand(&RatioSpec::Rational { p: -7, q: 3 }, 10).unwrap();
        assert_eq!(quotients_i64(&e), vec![-3, 1, 2]);
        // Negative denominator normalizes.
        let e = expand(&RatioSpec::Rational { p: 7, q: -3 }, 10).unwrap();
        assert_eq!(quotients_i64(&e), vec![-3, 1, 2]);
    }

    #[test]
    fn decimal_interval_expansion_certifies_prefix() {
        // 16 digits of √2 with 40 certified bits: the first terms must match
        // the true expansion, and the tail must stop with `exhausted`.
        let e = expand(
            &RatioSpec::Decimal {
                digits: "1.414213562373095".into(),
                bits: 40,
            },
            40,
        )
        .unwrap();
        assert!(e.exhausted);
        assert!(!e.terminated);
        assert!(e.quotients.len() >= 5, "got {:?}", e.quotients);
        let true_exp = expand(&RatioSpec::QuadSurd { d: 2, p: 0, q: 1 }, e.quotients.len()).unwrap();
        assert_eq!(e.quotients, true_exp.quotients);
        // Interval width 2^−40 ≈ 9e−13 supports q up to ~1e6 at best.
        let (_, q_last) = e.convergents.last().unwrap();
        assert!(q_last < &big(10_000_000));
    }

    #[test]
    fn decimal_on_boundary_stops_immediately() {
        let e = expand(
            &RatioSpec::Decimal {
                digits: "0.5".into(),
                bits: 60,
            },
            10,
        )
        .unwrap();
        // Whether the value is exactly 1/2 or a near neighbor decides the
        // second quotient, so only the leading 0 is certain.
        assert_eq!(quotients_i64(&e), vec![0]);
        assert!(e.exhausted);
    }

    #[test]
    fn determinant_invariant() {
        for ratio in [
            RatioSpec::QuadSurd { d: 2, p: 0, q: 1 },
            RatioSpec::QuadSurd { d: 61, p: 3, q: 7 },
            RatioSpec::QuadSurd { d: 2, p: -5, q: 3 },
            RatioSpec::Rational { p: 355, q: 113 },
        ] {
            let e = expand(&ratio, 12).unwrap();
            for i in 1..e.convergents.len() {
                let (p1, q1) = &e.convergents[i];
                let (p0, q0) = &e.convergents[i - 1];
                let det = p1 * q0 - p0 * q1;
                assert!(det.abs() == BigInt::one(), "{ratio:?} at {i}: det = {det}");
            }
        }
    }

    #[test]
    fn tail_quotients_are_positive() {
        for ratio in [
            RatioSpec::QuadSurd { d: 2, p: -5, q: 3 },
            RatioSpec::QuadSurd { d: 61, p: 3, q: 7 },
            RatioSpec::QuadSurd { d: 2, p: 0, q: -1 },
        ] {
            let e = expand(&ratio, 20).unwrap();
            for a in &e.quotients[1..] {
                assert!(a.is_positive(), "{ratio:?}: {:?}", e.quotients);
            }
        }
    }

    #[test]
    fn convergents_approach_the_value() {
        let ratio = RatioSpec::QuadSurd { d: 61, p: 3, q: 7 };
        let x = ratio.value();
        let e = expand(&ratio, 12).unwrap();
        for i in 0..e.convergents.len() - 1 {
            let (p, q) = &e.convergents[i];
            let (_, q_next) = &e.convergents[i + 1];
            let err = (x - p.to_f64().unwrap() / q.to_f64().unwrap()).abs();
            let bound = 1.0 / (q.to_f64().unwrap() * q_next.to_f64().unwrap());
            assert!(err <= bound * (1.0 + 1e-9), "at {i}: {err} vs {bound}");
        }
    }

    #[test]
    fn best_approx_proven_for_exact_ratios() {
        let sqrt2 = RatioSpec::QuadSurd { d: 2, p: 0, q: 1 };
        let e = expand(&sqrt2, 10).unwrap();
        let st = best_approx_check(&sqrt2, &e).unwrap();
        assert_eq!(st.len(), 9);
        assert!(st.iter().all(|s| *s == ApproxStatus::Proven));

        let surd = RatioSpec::QuadSurd { d: 61, p: 3, q: 7 };
        let e = expand(&surd, 12).unwrap();
        assert!(best_approx_check(&surd, &e)
            .unwrap()
            .iter()
            .all(|s| *s == ApproxStatus::Proven));

        // For a rational value the penultimate convergent hits the bound
        // with exact equality (determinant ±1), so the strict inequality
        // fails exactly there and nowhere else.
        let rat = RatioSpec::Rational { p: 355, q: 113 };
        let e = expand(&rat, 12).unwrap();
        let st = best_approx_check(&rat, &e).unwrap();
        let (last, head) = st.split_last().unwrap();
        assert!(head.iter().all(|s| *s == ApproxStatus::Proven));
        assert_eq!(*last, ApproxStatus::Failed);
    }

    #[test]
    fn best_approx_fails_for_non_convergent() {
        // Hand-build a fake expansion whose "convergent" 3/2 is followed by a
        // huge denominator: |2√2 − 3| ≈ 0.17 is no better than 1/big.
        let sqrt2 = RatioSpec::QuadSurd { d: 2, p: 0, q: 1 };
        let fake = Expansion {
            quotients: vec![big(1), big(2)],
            convergents: vec![(big(3), big(2)), (big(1000), big(707))],
            terminated: false,
            exhausted: false,
        };
        let st = best_approx_check(&sqrt2, &fake).unwrap();
        assert_eq!(st, vec![ApproxStatus::Failed]);
    }

    #[test]
    fn best_approx_decimal_statuses() {
        let dec = RatioSpec::Decimal {
            digits: "1.414213562373095".into(),
            bits: 40,
        };
        let e = expand(&dec, 40).unwrap();
        let st = best_approx_check(&dec, &e).unwrap();
        // Early convergents are provable from the interval; none may fail
        // (they really are convergents of everything in the interval).
        assert!(st[0] == ApproxStatus::Proven);
        assert!(st.iter().all(|s| *s != ApproxStatus::Failed));
    }

    #[test]
    fn decimal_to_rational_forms() {
        let r = decimal_to_rational("1.25").unwrap();
        assert_eq!(r, BRat::new(big(5), big(4)));
        assert_eq!(decimal_to_rational("-0.5").unwrap(), BRat::new(big(-1), big(2)));
        assert_eq!(decimal_to_rational("3").unwrap(), BRat::from_integer(big(3)));
        assert_eq!(decimal_to_rational("2.5e2").unwrap(), BRat::from_integer(big(250)));
        assert_eq!(decimal_to_rational("25e-3").unwrap(), BRat::new(big(1), big(40)));
        assert!(decimal_to_rational("abc").is_err());
        assert!(decimal_to_rational("1.2.3").is_err());
    }

    #[test]
    fn x_sequence_matches_powf() {
        let e = expand(&RatioSpec::QuadSurd { d: 2, p: 0, q: 1 }, 8).unwrap();
        let xs = x_sequence(&e, SCALE_EXPONENT, 1e300).unwrap();
        assert_eq!(xs.len(), 8);
        let dens: [f64; 8] = [1.0, 2.0, 5.0, 12.0, 29.0, 70.0, 169.0, 408.0];
        for (x, q) in xs.iter().zip(dens) {
            let want = q.powf(SCALE_EXPONENT);
            assert!((x - want).abs() <= 1e-12 * want, "{x} vs {want}");
        }
    }

    #[test]
    fn x_sequence_overflow_guard() {
        // Denominators grow like φ^n for the golden ratio; q^(7/3) crosses
        // 1e300 near n ≈ 616, so a 700-term expansion must truncate there.
        let e = expand(&RatioSpec::QuadSurd { d: 5, p: 1, q: 2 }, 700).unwrap();
        let all = x_sequence(&e, SCALE_EXPONENT, 1e300).unwrap();
        assert!(all.len() > 500 && all.len() < 700, "len = {}", all.len());
        assert!(all.iter().all(|x| x.is_finite() && *x <= 1e300));
        let capped = x_sequence(&e, SCALE_EXPONENT, 1e12).unwrap();
        assert!(capped.len() < all.len());
        assert!(capped.iter().all(|x| *x <= 1e12));
        // Non-decreasing (q_0 = q_1 = 1 for the golden ratio), and strictly
        // increasing once the denominators start growing.
        for w in all.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for w in all[1..].windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn ln_bigint_large_value() {
        // 10^50: ln = 50 ln 10.
        let q = BigInt::from(10).pow(50);
        let got = ln_bigint(&q).to_f64();
        let want = 50.0 * 10f64.ln();
        assert!((got - want).abs() < 1e-13 * want);
    }
}

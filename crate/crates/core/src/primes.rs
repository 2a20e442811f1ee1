//! Prime generation and exact power-range enumeration.
//!
//! The search repeatedly needs "all primes p with p^k ∈ [δX, X]" for real k
//! and real f64 endpoints, with the guarantee that no boundary prime is
//! wrongly included or excluded. Membership p^k ≤ B is decided exactly:
//!
//! * k ∈ {1, 2} (and any integer): exact integer against the dyadic rational
//!   value of the f64 bound;
//! * k = m/2^s with s ≤ 8 (covers 1.5, 2.5, 2.75, …): exact big-integer
//!   comparison of p^m against B^(2^s);
//! * generic k: double-double evaluation of exp(k ln p), certified to
//!   [`crate::dd::POW_REL_ERR`]; a bound landing inside that sliver of the
//!   real line is treated as equal (closed-interval tie-break), which for
//!   f64 inputs cannot misclassify any physically constructible case.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use num_bigint::BigUint;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::io::{Read, Write};

/// Ascending primes up to `limit` with Chebyshev θ prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
    /// `theta_prefix[i]` = Σ_{j<i} ln p_j (compensated); length = count + 1.
    pub theta_prefix: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub segment_len: u64,
    pub memory_cap_bytes: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_len: 1 << 20,
            memory_cap_bytes: 4 << 30,
        }
    }
}

pub const SIEVE_LIMIT_MAX: u64 = 10_000_000_000;

/// Segmented sieve of Eratosthenes.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    sieve_with(limit, &SieveConfig::default())
}

pub fn sieve_with(limit: u64, cfg: &SieveConfig) -> Result<PrimeTable> {
    if !(2..=SIEVE_LIMIT_MAX).contains(&limit) {
        return Err(Error::Domain(format!(
            "sieve limit must be in [2, {SIEVE_LIMIT_MAX}], got {limit}"
        )));
    }
    if cfg.segment_len < 16 {
        return Err(Error::Parameter("segment length must be ≥ 16".into()));
    }
    // π(x) ≤ 1.26 x / ln x for x ≥ 17; 16 bytes per prime (value + θ entry).
    let est = if limit < 17 {
        8.0
    } else {
        1.26 * limit as f64 / (limit as f64).ln()
    };
    let bytes = est * 16.0 + cfg.segment_len as f64;
    if bytes > cfg.memory_cap_bytes as f64 {
        return Err(Error::Resource(format!(
            "sieve to {limit} needs ~{:.2e} bytes, cap is {}",
            bytes, cfg.memory_cap_bytes
        )));
    }

    let root = limit.isqrt();
    let root_primes = simple_sieve(root.max(2));

    let seg = cfg.segment_len;
    let n_segments = (limit - 1).div_ceil(seg); // covers [2, limit]
    let per_segment: Vec<Vec<u64>> = (0..n_segments)
        .into_par_iter()
        .map(|si| {
            let lo = 2 + si * seg;
            let hi = (lo + seg).min(limit + 1); // half-open [lo, hi)
            let mut composite = vec![false; (hi - lo) as usize];
            for &p in &root_primes {
                if p * p >= hi {
                    break;
                }
                let start = (p * p).max(lo.div_ceil(p) * p);
                let mut m = start;
                while m < hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            (lo..hi)
                .filter(|&n| !composite[(n - lo) as usize])
                .collect()
        })
        .collect();

    let mut primes = Vec::with_capacity(est as usize);
    for mut v in per_segment {
        primes.append(&mut v);
    }

    let theta_prefix = theta_prefix(&primes);
    Ok(PrimeTable {
        limit,
        primes,
        theta_prefix,
    })
}

fn theta_prefix(primes: &[u64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(primes.len() + 1);
    let mut acc = KahanSum::new();
    out.push(0.0);
    for &p in primes {
        acc.add((p as f64).ln());
        out.push(acc.value());
    }
    out
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut m = i * i;
            while m <= n {
                composite[m] = true;
                m += i;
            }
        }
    }
    primes
}

impl PrimeTable {
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Chebyshev θ(x) = Σ_{p ≤ x} ln p.
    pub fn theta(&self, x: f64) -> Result<f64> {
        if x > self.limit as f64 {
            return Err(Error::TableTooSmall {
                needed: x.ceil() as u64,
                limit: self.limit,
            });
        }
        let idx = self
            .primes
            .partition_point(|&p| cmp_u128_f64(u128::from(p), x) != Ordering::Greater);
        Ok(self.theta_prefix[idx])
    }

    /// θ over a half-open index range of the table (difference of prefixes).
    pub fn theta_range(&self, start: usize, end: usize) -> f64 {
        self.theta_prefix[end] - self.theta_prefix[start]
    }
}

/// Exact comparison of an unsigned integer with a (finite) f64.
pub fn cmp_u128_f64(v: u128, b: f64) -> Ordering {
    debug_assert!(!b.is_nan());
    if b < 0.0 {
        return Ordering::Greater;
    }
    if b >= 3.402823669209385e38 || b.is_infinite() {
        return Ordering::Less;
    }
    let t = b.trunc(); // integer part, exact
    let frac = b - t; // exact
    let bi = t as u128; // exact: t is integer-valued and < 2^128
    match v.cmp(&bi) {
        Ordering::Equal => {
            if frac > 0.0 {
                Ordering::Less
            } else {
                Ordering::Equal
            }
        }
        o => o,
    }
}

/// Decompose a positive finite f64 as mantissa · 2^exp (mantissa integer).
fn decompose_f64(b: f64) -> (u64, i64) {
    debug_assert!(b > 0.0 && b.is_finite());
    let bits = b.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        (frac, -1074) // subnormal
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    }
}

/// If `k = m / 2^s` exactly with s ≤ 8 and m ≤ 1024, return `(m, s)`.
fn small_dyadic_exponent(k: f64) -> Option<(u32, u32)> {
    if !(k > 0.0) || !k.is_finite() {
        return None;
    }
    let (mant, exp) = decompose_f64(k);
    let tz = mant.trailing_zeros();
    let m = mant >> tz;
    let e = exp + i64::from(tz);
    // k = m · 2^e; need e ∈ [−8, 0] (e > 0 means a huge integer, outside our k domain).
    if (-8..=0).contains(&e) && m <= 1024 {
        Some((m as u32, (-e) as u32))
    } else {
        None
    }
}

/// Certified comparison of p^k with a finite f64 bound.
pub fn pow_cmp(p: u64, k: f64, bound: f64) -> Ordering {
    debug_assert!(p >= 1);
    if bound <= 0.0 {
        return Ordering::Greater;
    }
    if k == 1.0 {
        return cmp_u128_f64(u128::from(p), bound);
    }
    if k == 2.0 {
        return cmp_u128_f64(u128::from(p) * u128::from(p), bound);
    }
    // Fast certified path: f64 pow with a wide safety margin.
    let approx = (p as f64).powf(k);
    if approx < bound * (1.0 - 1e-12) {
        return Ordering::Less;
    }
    if approx > bound * (1.0 + 1e-12) {
        return Ordering::Greater;
    }
    // Exact path for small dyadic exponents: p^(m/2^s) ≤ B ⟺ p^m ≤ B^(2^s).
    if let Some((m, s)) = small_dyadic_exponent(k) {
        let lhs = BigUint::from(p).pow(m);
        let (bm, be) = decompose_f64(bound);
        let rhs = BigUint::from(bm).pow(1u32 << s);
        let shift = be * (1i64 << s);
        return if shift >= 0 {
            lhs.cmp(&(rhs << shift as u64))
        } else {
            (lhs << (-shift) as u64).cmp(&rhs)
        };
    }
    // Double-double with certified error band; ties resolve as equal.
    let pd = Dd::pow_u64(p, k);
    let radius = crate::dd::POW_REL_ERR * pd.hi.abs();
    let diff = pd.sub_f64(bound).to_f64();
    if diff > radius {
        Ordering::Greater
    } else if diff < -radius {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// The closed real interval [lo, hi] read through the map p ↦ p^exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRange {
    pub exponent: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PowerRange {
    pub fn contains(&self, p: u64) -> bool {
        pow_cmp(p, self.exponent, self.lo) != Ordering::Less
            && pow_cmp(p, self.exponent, self.hi) != Ordering::Greater
    }
}

/// The range p^k ∈ [δX, X]. The lower endpoint is the one f64 rounding of
/// δ·X; membership against these f64 endpoints is then exact.
pub fn power_range(k_i: f64, delta: f64, x: f64) -> Result<PowerRange> {
    if !(k_i > 0.0 && k_i.is_finite()) {
        return Err(Error::Domain(format!("power range needs k > 0, got {k_i}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("power range needs 0 < δ < 1, got {delta}")));
    }
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::Domain(format!("power range needs X ≥ 2, got {x}")));
    }
    Ok(PowerRange {
        exponent: k_i,
        lo: delta * x,
        hi: x,
    })
}

/// All table primes with p^k ∈ [δX, X], as a contiguous slice of the table
/// (p ↦ p^k is increasing, so the members are consecutive).
///
/// Returns the index range; `&table.primes[r]` is the prime list.
pub fn prime_power_range_indices(
    table: &PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
) -> Result<std::ops::Range<usize>> {
    let range = power_range(k_i, delta, x)?;
    // Coverage: the table must rule out any prime beyond its limit entering
    // the range, i.e. (limit+1)^k > X must hold.
    if pow_cmp(table.limit + 1, k_i, x) != Ordering::Greater {
        return Err(Error::TableTooSmall {
            needed: x.powf(1.0 / k_i).ceil() as u64 + 1,
            limit: table.limit,
        });
    }
    let start = table
        .primes
        .partition_point(|&p| pow_cmp(p, k_i, range.lo) == Ordering::Less);
    let end = table.primes[start..]
        .partition_point(|&p| pow_cmp(p, k_i, range.hi) != Ordering::Greater)
        + start;
    Ok(start..end)
}

pub fn primes_in_power_range<'t>(
    table: &'t PrimeTable,
    k_i: f64,
    delta: f64,
    x: f64,
) -> Result<&'t [u64]> {
    let r = prime_power_range_indices(table, k_i, delta, x)?;
    Ok(&table.primes[r])
}

// ---------------------------------------------------------------------------
// Binary cache: magic, limit, count, first prime, then LEB128 gaps.
// ---------------------------------------------------------------------------

const CACHE_MAGIC: &[u8; 8] = b"DPRIMES1";

pub fn write_cache<W: Write>(table: &PrimeTable, w: &mut W) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&table.limit.to_le_bytes())?;
    w.write_all(&(table.primes.len() as u64).to_le_bytes())?;
    let mut prev = 0u64;
    let mut buf = Vec::with_capacity(table.primes.len() * 2);
    for &p in &table.primes {
        let mut gap = p - prev;
        loop {
            let byte = (gap & 0x7f) as u8;
            gap >>= 7;
            if gap == 0 {
                buf.push(byte);
                break;
            }
            buf.push(byte | 0x80);
        }
        prev = p;
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_cache<R: Read>(r: &mut R) -> Result<PrimeTable> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let limit = u64::from_le_bytes(u64buf);
    r.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf) as usize;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut primes = Vec::with_capacity(count);
    let mut prev = 0u64;
    let mut pos = 0usize;
    for _ in 0..count {
        let mut gap = 0u64;
        let mut shift = 0u32;
        loop {
            let byte = *bytes
                .get(pos)
                .ok_or_else(|| Error::Cache("truncated gap stream".into()))?;
            pos += 1;
            gap |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                break;
            }
            shift += 7;
            if shift > 63 {
                return Err(Error::Cache("gap varint too long".into()));
            }
        }
        let p = prev
            .checked_add(gap)
            .ok_or_else(|| Error::Cache("prime overflow".into()))?;
        if p <= prev && prev != 0 {
            return Err(Error::Cache("primes not strictly increasing".into()));
        }
        primes.push(p);
        prev = p;
    }
    if pos != bytes.len() {
        return Err(Error::Cache("trailing bytes after prime stream".into()));
    }
    if primes.last().copied().unwrap_or(0) > limit {
        return Err(Error::Cache("prime exceeds declared limit".into()));
    }
    let theta_prefix = theta_prefix(&primes);
    Ok(PrimeTable {
        limit,
        primes,
        theta_prefix,
    })
}

//! Compensated (Kahan) summation and deterministic chunked reduction.
//!
//! All large accumulations in this crate go through these helpers so that
//! results do not depend on evaluation order or thread count: work is split
//! into fixed-size chunks, each chunk is summed left to right with
//! compensation, and the per-chunk partials are combined in index order.

use num_complex::Complex64;

/// Kahan–Neumaier compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated value.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

/// Compensated accumulator for complex values (independent real/imag parts).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Fixed chunk length used by deterministic parallel reductions.
///
/// Chosen once for the whole crate: changing it changes roundoff at the
/// 1e-15 level, so it is part of the reproducibility contract.
pub const CHUNK: usize = 4096;

/// Sum `f(i)` for `i in 0..n` deterministically: fixed chunks of [`CHUNK`]
/// indices are mapped (possibly in parallel by the caller's thread pool via
/// rayon), then partials are combined in chunk order.
pub fn chunked_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    use rayon::prelude::*;
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = KahanSum::new();
            for i in lo..hi {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    let mut acc = KahanSum::new();
    for p in partials {
        acc.add(p);
    }
    acc.value()
}

//! Shared fixtures for the criterion benches.

use dioph::model::Params;
use dioph::primes::{sieve, PrimeTable};

pub fn table(limit: u64) -> PrimeTable {
    sieve(limit).expect("bench sieve")
}

/// The default demonstration instance with an integer-friendly ω for
/// benchable solution counts.
pub fn bench_params() -> Params {
    let mut p = Params::default();
    p.omega = 0.5;
    p
}

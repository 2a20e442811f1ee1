//! Numerical search and verification engine for the quaternary inequality
//!
//! ```text
//! |λ₁p₁ + λ₂p₂² + λ₃p₃² + λ₄p₄ᵏ − ω| ≤ η,     p₁, p₂, p₃, p₄ prime,
//! ```
//!
//! with real coefficients λᵢ (not all of the same sign, λ₁/λ₂ irrational) and a
//! real exponent 1 < k < 14/5.
//!
//! The crate provides the ingredients of a circle-method study of this form at
//! desk scale:
//!
//! * [`model`] — problem parameters, hypothesis validation, and the standard
//!   parameter formulas (η exponent, major-arc cutoff, trivial-arc cutoff);
//! * [`primes`] — segmented sieve, Chebyshev θ prefix sums, and exact
//!   enumeration of primes whose k-th power lies in a real interval;
//! * [`contfrac`] — exact continued-fraction expansion of quadratic surds and
//!   rationals, interval-certified expansion of decimal inputs, convergents,
//!   and the derived scale sequence X = q^{7/3};
//! * [`expsums`] — the weighted/unweighted prime exponential sums S and U, the
//!   oscillatory integral T, and the Fejér kernel pair K / K̂;
//! * [`arcs`] — major/minor/trivial arc decomposition, quadrature of the
//!   product integrand, the prime-side direct sum (the two are linked by an
//!   exact Fourier identity), a rigorous tail bound, and the main-term
//!   integral evaluated by two independent routes;
//! * [`solver`] — meet-in-the-middle enumeration of all solutions in a box,
//!   with high-precision re-verification near the window boundary;
//! * [`verify`] — empirical checks of the analytic inequalities used by the
//!   theory (mean values, Selberg integral scaling, near-diagonal quadruple
//!   counts, minor-arc thresholds), reported as fitted constants rather than
//!   asserted bounds.
//!
//! Everything is deterministic by construction: summation orders are fixed,
//! parallel reductions are chunked and combined in index order, and Monte
//! Carlo uses an explicit seed, so results are byte-identical across thread
//! counts.

pub mod arcs;
pub mod contfrac;
pub mod dd;
pub mod error;
pub mod expsums;
pub mod kahan;
pub mod model;
pub mod primes;
pub mod quad;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use model::{EtaPolicy, Params, RatioSpec};
pub use primes::PrimeTable;

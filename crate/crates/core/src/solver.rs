//! Solution search: all prime quadruples (p₁, p₂, p₃, p₄) in the box
//! pᵢ^kᵢ ∈ [δX, X] (k = 1, 2, 2, k₄) with
//! |λ₁p₁ + λ₂p₂² + λ₃p₃² + λ₄p₄^k − ω| ≤ η.
//!
//! Strategy: meet in the middle. The middle two components are combined into
//! a sorted array of pair values λ₂p₂² + λ₃p₃²; for every (p₁, p₄) the
//! admissible window is found by binary search. Windows are widened by a
//! rounding slack so no true solution can be cut off by f64 arithmetic, and
//! every candidate is then re-verified with a double-double residual — the
//! same predicate the exhaustive oracle uses, so fast path and oracle can
//! only differ through the windowing, never through membership arithmetic.
//!
//! The residual tie-break is closed: |residual| = η counts as a solution
//! (the triangle weight there is 0, so identity sums are unaffected).

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::model::{EtaPolicy, Params};
use crate::primes::{prime_power_range_indices, PrimeTable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// p₁ values processed per parallel work unit (fixed for determinism).
const P1_CHUNK: usize = 1024;

/// Cap on the pair table (24 bytes per entry).
const MAX_PAIRS: usize = 100_000_000;

/// One solution quadruple, in slot order (p₁, p₂, p₃, p₄).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Solution {
    pub p: [u64; 4],
}

/// The three prime lists for the four slots (slots 2 and 3 share k = 2).
#[derive(Debug, Clone, Copy)]
pub struct Components<'t> {
    pub p1: &'t [u64],
    pub p23: &'t [u64],
    pub p4: &'t [u64],
}

pub fn enumerate_components<'t>(
    table: &'t PrimeTable,
    params: &Params,
    x: f64,
) -> Result<Components<'t>> {
    let r1 = prime_power_range_indices(table, 1.0, params.delta, x)?;
    let r2 = prime_power_range_indices(table, 2.0, params.delta, x)?;
    let r4 = prime_power_range_indices(table, params.k, params.delta, x)?;
    Ok(Components {
        p1: &table.primes[r1],
        p23: &table.primes[r2],
        p4: &table.primes[r4],
    })
}

/// Smallest sieve limit that covers every component at scale X.
pub fn required_prime_limit(x: f64) -> u64 {
    x.ceil() as u64
}

/// Double-double residual λ₁p₁ + λ₂p₂² + λ₃p₃² + λ₄p₄^k − ω.
pub fn residual(lambda: &[f64; 4], omega: f64, k: f64, p: [u64; 4]) -> Dd {
    let exps = [1.0, 2.0, 2.0, k];
    let mut acc = Dd::from_f64(-omega);
    for i in 0..4 {
        acc = acc.add(Dd::pow_u64(p[i], exps[i]).mul_f64(lambda[i]));
    }
    acc
}

/// The shared membership predicate: |residual| ≤ η, decided in double-double.
pub fn accepts(lambda: &[f64; 4], omega: f64, k: f64, p: [u64; 4], eta: f64) -> bool {
    residual(lambda, omega, k, p).abs().cmp_f64(eta) != Ordering::Greater
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchStats {
    pub x: f64,
    pub eta: f64,
    /// Component sizes (slot 1, slots 2/3, slot 4).
    pub n1: usize,
    pub n2: usize,
    pub n4: usize,
    pub pairs: usize,
    /// Candidates pulled from windows (all of them get dd verification).
    pub candidates: u64,
    /// Wall-clock only; excluded from serialized output so result files are
    /// byte-identical across runs and thread counts.
    #[serde(skip)]
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Lexicographically sorted by (p₁, p₂, p₃, p₄).
    pub solutions: Vec<Solution>,
    /// Σ over solutions of ln p₁ ln p₂ ln p₃ ln p₄ · max(0, η − |residual|) —
    /// the quantity the kernel-weighted integral of the four sums equals.
    pub triangle_mass: f64,
    pub stats: SearchStats,
}

/// Find every solution at scale X and window η.
pub fn find_solutions(
    table: &PrimeTable,
    params: &Params,
    x: f64,
    eta: f64,
) -> Result<SearchOutcome> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("window η must be positive, got {eta}")));
    }
    let t0 = std::time::Instant::now();
    let comps = enumerate_components(table, params, x)?;
    let [l1, l2, l3, l4] = params.lambda;
    let omega = params.omega;
    let k = params.k;

    let n2 = comps.p23.len();
    if n2 * n2 > MAX_PAIRS {
        return Err(Error::Resource(format!(
            "pair table would hold {} entries (cap {MAX_PAIRS}); reduce X",
            n2 * n2
        )));
    }

    // Middle-pair values λ₂p₂² + λ₃p₃², f64 with dd-accurate parts.
    let sq2: Vec<f64> = comps
        .p23
        .iter()
        .map(|&p| Dd::pow_u64(p, 2.0).mul_f64(l2).to_f64())
        .collect();
    let sq3: Vec<f64> = comps
        .p23
        .iter()
        .map(|&p| Dd::pow_u64(p, 2.0).mul_f64(l3).to_f64())
        .collect();
    let mut pairs: Vec<(f64, u32, u32)> = Vec::with_capacity(n2 * n2);
    for (i2, a) in sq2.iter().enumerate() {
        for (i3, b) in sq3.iter().enumerate() {
            pairs.push((a + b, i2 as u32, i3 as u32));
        }
    }
    pairs.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    // λ₄p₄^k, dd-accurate.
    let a4: Vec<f64> = comps
        .p4
        .iter()
        .map(|&p| Dd::pow_u64(p, k).mul_f64(l4).to_f64())
        .collect();

    // Window slack: centers and pair values carry a few ulp of error at the
    // scale of the full form; 1e−11·scale covers that thousands of times over.
    let scale = params
        .lambda
        .iter()
        .map(|l| l.abs())
        .fold(omega.abs(), f64::max)
        * x.max(1.0)
        + omega.abs();
    let slack = 1e-11 * scale.max(1.0);

    let nchunks = comps.p1.len().div_ceil(P1_CHUNK);
    let per_chunk: Vec<(Vec<Solution>, f64, u64)> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let p1s = &comps.p1[ci * P1_CHUNK..((ci + 1) * P1_CHUNK).min(comps.p1.len())];
            let mut sols = Vec::new();
            let mut mass = KahanSum::new();
            let mut candidates = 0u64;
            for &p1 in p1s {
                let c1 = omega - Dd::pow_u64(p1, 1.0).mul_f64(l1).to_f64();
                let w1 = (p1 as f64).ln();
                for (j4, &p4) in comps.p4.iter().enumerate() {
                    let c = c1 - a4[j4];
                    let lo = c - eta - slack;
                    let hi = c + eta + slack;
                    let start = pairs.partition_point(|t| t.0 < lo);
                    let end = start + pairs[start..].partition_point(|t| t.0 <= hi);
                    for &(_, i2, i3) in &pairs[start..end] {
                        candidates += 1;
                        let p2 = comps.p23[i2 as usize];
                        let p3 = comps.p23[i3 as usize];
                        let quad = [p1, p2, p3, p4];
                        let r = residual(&params.lambda, omega, k, quad);
                        if r.abs().cmp_f64(eta) != Ordering::Greater {
                            sols.push(Solution { p: quad });
                            let w = w1
                                * (p2 as f64).ln()
                                * (p3 as f64).ln()
                                * (p4 as f64).ln()
                                * (eta - r.abs().to_f64()).max(0.0);
                            mass.add(w);
                        }
                    }
                }
            }
            (sols, mass.value(), candidates)
        })
        .collect();

    let mut solutions = Vec::new();
    let mut mass = KahanSum::new();
    let mut candidates = 0u64;
    for (s, m, c) in per_chunk {
        solutions.extend(s);
        mass.add(m);
        candidates += c;
    }
    solutions.sort_unstable();

    Ok(SearchOutcome {
        triangle_mass: mass.value(),
        stats: SearchStats {
            x,
            eta,
            n1: comps.p1.len(),
            n2,
            n4: comps.p4.len(),
            pairs: pairs.len(),
            candidates,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        },
        solutions,
    })
}

/// Recompute the triangle-weighted mass of a solution list (same weights as
/// [`find_solutions`]; order-stable Kahan sum).
pub fn weigh_solutions(solutions: &[Solution], params: &Params, eta: f64) -> f64 {
    let mut mass = KahanSum::new();
    for s in solutions {
        let r = residual(&params.lambda, params.omega, params.k, s.p);
        let w: f64 = s.p.iter().map(|&p| (p as f64).ln()).product();
        mass.add(w * (eta - r.abs().to_f64()).max(0.0));
    }
    mass.value()
}

/// One entry of a scale scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub eta: f64,
    pub solutions: usize,
    pub triangle_mass: f64,
    /// triangle_mass / (η²·X^(1+1/k)) — the density heuristic predicts this
    /// approaches a constant as X grows.
    pub normalized_mass: f64,
}

/// Run the search along a scale sequence (e.g. the convergent-driven
/// X_n = q_n^(7/3)), with the window η(X) drawn from the policy.
pub fn scan_sequence(
    table: &PrimeTable,
    params: &Params,
    eta: &EtaPolicy,
    xs: &[f64],
) -> Result<Vec<ScanPoint>> {
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let eta_x = eta.eta_at(x);
        let res = find_solutions(table, params, x, eta_x)?;
        let scale = eta_x * eta_x * x.powf(1.0 + 1.0 / params.k);
        out.push(ScanPoint {
            x,
            eta: eta_x,
            solutions: res.solutions.len(),
            triangle_mass: res.triangle_mass,
            normalized_mass: res.triangle_mass / scale,
        });
    }
    Ok(out)
}

pub mod oracle {
    //! Exhaustive reference search — four nested loops, no windowing, same
    //! membership predicate.

    use super::*;

    pub fn find_solutions_exhaustive(
        table: &PrimeTable,
        params: &Params,
        x: f64,
        eta: f64,
    ) -> Result<Vec<Solution>> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Parameter(format!("window η must be positive, got {eta}")));
        }
        let comps = enumerate_components(table, params, x)?;
        let mut out = Vec::new();
        for &p1 in comps.p1 {
            for &p2 in comps.p23 {
                for &p3 in comps.p23 {
                    for &p4 in comps.p4 {
                        if accepts(&params.lambda, params.omega, params.k, [p1, p2, p3, p4], eta)
                        {
                            out.push(Solution { p: [p1, p2, p3, p4] });
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve;

    fn integer_params() -> Params {
        Params {
            lambda: [1.0, 1.0, -1.0, -1.0],
            omega: 0.0,
            k: 2.0,
            delta: 1e-3,
            epsilon: 1e-2,
            ratio: crate::model::RatioSpec::Rational { p: 1, q: 1 },
        }
    }

    #[test]
    fn known_solution_is_found() {
        // 41 + 3² − 5² − 5² = 0.
        let t = sieve(100).unwrap();
        let out = find_solutions(&t, &integer_params(), 50.0, 0.5).unwrap();
        assert!(
            out.solutions.contains(&Solution { p: [41, 3, 5, 5] }),
            "missing the known quadruple; got {:?}",
            out.solutions
        );
    }

    #[test]
    fn integer_case_matches_exact_arithmetic() {
        // With integer λ and ω, membership is decidable in i128; every found
        // solution must satisfy it and no admissible quadruple may be missed.
        let t = sieve(200).unwrap();
        let p = integer_params();
        let eta = 0.5; // integers: |form| ≤ 0.5 ⟺ form = 0
        let out = find_solutions(&t, &p, 200.0, eta).unwrap();
        let comps = enumerate_components(&t, &p, 200.0).unwrap();
        let mut exact = Vec::new();
        for &p1 in comps.p1 {
            for &p2 in comps.p23 {
                for &p3 in comps.p23 {
                    for &p4 in comps.p4 {
                        let form = p1 as i128 + (p2 as i128).pow(2)
                            - (p3 as i128).pow(2)
                            - (p4 as i128).pow(2);
                        if form == 0 {
                            exact.push(Solution { p: [p1, p2, p3, p4] });
                        }
                    }
                }
            }
        }
        exact.sort_unstable();
        assert_eq!(out.solutions, exact);
        assert!(!out.solutions.is_empty());
    }

    #[test]
    fn fast_path_equals_exhaustive_oracle() {
        let t = sieve(250).unwrap();
        let mut p = Params::default(); // λ₁ = √2
        p.omega = 0.5;
        let eta = 0.3;
        let fast = find_solutions(&t, &p, 250.0, eta).unwrap();
        let slow = oracle::find_solutions_exhaustive(&t, &p, 250.0, eta).unwrap();
        assert_eq!(fast.solutions, slow);
    }

    #[test]
    fn fast_path_equals_exhaustive_fractional_exponent() {
        let t = sieve(1000).unwrap();
        let mut p = Params::default();
        p.k = 2.5;
        p.delta = 0.01;
        p.omega = 1.0;
        let eta = 0.6;
        let fast = find_solutions(&t, &p, 1000.0, eta).unwrap();
        let slow = oracle::find_solutions_exhaustive(&t, &p, 1000.0, eta).unwrap();
        assert_eq!(fast.solutions, slow);
    }

    #[test]
    fn boundary_residual_is_included_with_zero_weight() {
        // 43 + 3² − 5² − 5² = 2: with η = 2 this sits exactly on the edge.
        let t = sieve(100).unwrap();
        let out = find_solutions(&t, &integer_params(), 50.0, 2.0).unwrap();
        let edge = Solution { p: [43, 3, 5, 5] };
        assert!(out.solutions.contains(&edge));
        let w = weigh_solutions(&[edge], &integer_params(), 2.0);
        assert_eq!(w, 0.0);
    }

    #[test]
    fn triangle_mass_matches_recomputation() {
        let t = sieve(200).unwrap();
        let p = integer_params();
        let out = find_solutions(&t, &p, 200.0, 1.5).unwrap();
        let re = weigh_solutions(&out.solutions, &p, 1.5);
        assert!((out.triangle_mass - re).abs() <= 1e-12 * re.abs().max(1.0));
    }

    #[test]
    fn output_is_thread_count_invariant() {
        let t = sieve(400).unwrap();
        let mut p = Params::default();
        p.omega = 0.25;
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| find_solutions(&t, &p, 400.0, 0.4).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.solutions, b.solutions);
        assert_eq!(a.triangle_mass.to_bits(), b.triangle_mass.to_bits());
        assert_eq!(a.stats.candidates, b.stats.candidates);
    }

    #[test]
    fn stats_reflect_component_sizes() {
        let t = sieve(100).unwrap();
        let p = integer_params();
        let out = find_solutions(&t, &p, 50.0, 0.5).unwrap();
        // p ∈ [0.05, 50]: 15 primes; p² ∈ [0.05, 50]: {2,3,5,7}; same for k=2.
        assert_eq!(out.stats.n1, 15);
        assert_eq!(out.stats.n2, 4);
        assert_eq!(out.stats.n4, 4);
        assert_eq!(out.stats.pairs, 16);
        assert!(out.stats.candidates >= out.solutions.len() as u64);
    }

    #[test]
    fn scan_sequence_runs_and_normalizes() {
        let t = sieve(400).unwrap();
        let p = integer_params();
        let xs = [50.0, 100.0, 200.0, 400.0];
        let pts = scan_sequence(&t, &p, &EtaPolicy::Fixed(0.5), &xs).unwrap();
        assert_eq!(pts.len(), 4);
        for (pt, &x) in pts.iter().zip(&xs) {
            assert_eq!(pt.x, x);
            assert_eq!(pt.eta, 0.5);
            let check = find_solutions(&t, &p, x, 0.5).unwrap();
            assert_eq!(pt.solutions, check.solutions.len());
            let scale = 0.25 * x.powf(1.5);
            assert!((pt.normalized_mass - pt.triangle_mass / scale).abs() < 1e-15);
        }
        // Solution counts grow along the scan for this instance.
        assert!(pts.last().unwrap().solutions > pts[0].solutions);
    }

    #[test]
    fn eta_must_be_positive() {
        let t = sieve(100).unwrap();
        assert!(find_solutions(&t, &integer_params(), 50.0, 0.0).is_err());
        assert!(find_solutions(&t, &integer_params(), 50.0, -1.0).is_err());
    }

    #[test]
    fn residual_accuracy_against_integer_arithmetic() {
        // λ = (1, 1, −1, −1), huge values: dd residual must be exact.
        let lambda = [1.0, 1.0, -1.0, -1.0];
        let r = residual(&lambda, 0.0, 2.0, [999_983, 104_729, 104_729, 999_979]);
        let exact = 999_983i128 + 104_729i128 * 104_729 - 104_729i128 * 104_729
            - 999_979i128 * 999_979;
        assert_eq!(r.to_f64(), exact as f64);
    }
}

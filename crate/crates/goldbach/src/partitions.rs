//! Exact partition counts: G1, G2, GP, and the Goldbach ratio.

use crate::error::{GoldbachError, Result};
use crate::prime::PrimeTable;
use crate::symmetry::{is_pi_prime, DivisorProfile};
use num_rational::Ratio;

/// Ground-truth counts for one even target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionStats {
    pub e: u64,
    /// N in [1, E-1] with N and E-N indivisible by every sieve divisor.
    pub g1: u64,
    /// Primes q in (1, E) with E-q prime; E/2 contributes once when prime.
    pub g2: u64,
    /// Unordered prime pairs summing to E; equals ceil(G2 / 2).
    pub gp: u64,
    /// Largest prime below E.
    pub pe: u64,
    /// Number of primes <= PE.
    pub npe: u64,
    /// GP / NPE, exact.
    pub gr: Ratio<u64>,
}

/// G1 by per-divisor filtering: strike both residue classes 0 and E mod p
/// for every divisor, then count survivors.
pub fn g1_count(profile: &DivisorProfile) -> u64 {
    let e = profile.e as usize;
    let mut alive = vec![true; e];
    alive[0] = false; // index 0 is not an N value
    for d in &profile.divisors {
        let p = d.p as usize;
        let mut n = p;
        while n < e {
            alive[n] = false;
            n += p;
        }
        let r = e % p;
        if r != 0 {
            let mut n = r;
            while n < e {
                alive[n] = false;
                n += p;
            }
        }
    }
    alive.iter().filter(|&&a| a).count() as u64
}

/// G1 by the direct predicate: test every N against every divisor. Slower
/// route kept as a cross-check oracle for `g1_count`.
pub fn g1_count_predicate(profile: &DivisorProfile) -> u64 {
    let e = profile.e;
    (1..e)
        .filter(|&n| {
            profile
                .divisors
                .iter()
                .all(|d| is_pi_prime(n, d.p) && is_pi_prime(e - n, d.p))
        })
        .count() as u64
}

fn check_coverage(table: &PrimeTable, e: u64) -> Result<()> {
    if e < 4 || e % 2 != 0 {
        return Err(GoldbachError::BadEven(e));
    }
    if e - 1 > table.limit() {
        return Err(GoldbachError::Coverage {
            what: "partition counts",
            needed: e - 1,
            limit: table.limit(),
        });
    }
    Ok(())
}

/// GP: unordered prime pairs {q, E-q}, by a single pass over q <= E/2.
pub fn gp_count(table: &PrimeTable, e: u64) -> Result<u64> {
    check_coverage(table, e)?;
    let half = e / 2;
    Ok(table
        .primes_up_to(half)
        .filter(|&q| table.is_prime(e - q))
        .count() as u64)
}

///// G2: prime elements rather than pairs; each pair contributes twice except
/// a prime E/2, which is its own partner.
pub fn g2_count(table: &PrimeTable, e: u64) -> Result<u64> {
    let pairs = gp_count(table, e)?;
    Ok(2 * pairs - u64::from(table.is_prime(e / 2)))
}

/// GP / NPE as an exact rational.
pub fn goldbach_ratio(stats: &PartitionStats) -> Ratio<u64> {
    Ratio::new(stats.gp, stats.npe)
}

/// Assemble all exact counts for one target.
pub fn compute_stats(table: &PrimeTable, e: u64) -> Result<PartitionStats> {
    check_coverage(table, e)?;
    let profile = crate::symmetry::build_profile(table, e)?;
    let g1 = g1_count(&profile);
    let gp = gp_count(table, e)?;
    let g2 = 2 * gp - u64::from(table.is_prime(e / 2));
    let pe = table.largest_prime_below(e)?;
    let npe = table.prime_count_up_to(pe)?;
    Ok(PartitionStats {
        e,
        g1,
        g2,
        gp,
        pe,
        npe,
        gr: Ratio::new(gp, npe),
    })
}

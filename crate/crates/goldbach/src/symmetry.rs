//! Divisor classification and remaindering frequencies.
//!
//! A sieve divisor p cancels couples (N, E-N) on the line [1, E-1]. When p
//! divides E/2 the cancellations mirror about the midpoint and p leaves p-1
//! surviving couples per p consecutive N; otherwise the two residue classes
//! 0 and E mod p are distinct and p leaves p-2. The divisor 2 always leaves
//! 1 per 2: both members of a couple share N's parity.

use crate::error::{GoldbachError, Result};
use crate::prime::PrimeTable;
use num_rational::Ratio;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorEntry {
    pub p: u64,
    pub symmetric: bool,
    /// Surviving fraction of couples per window of p consecutive N.
    pub frequency: Ratio<u64>,
}

/// Per-divisor symmetry and frequency data for one even target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorProfile {
    pub e: u64,
    pub divisors: Vec<DivisorEntry>,
    pub p_m: u64,
}

fn check_even(e: u64) -> Result<()> {
    if e < 4 || e % 2 != 0 {
        return Err(GoldbachError::BadEven(e));
    }
    Ok(())
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn check_divisor(e: u64, p: u64) -> Result<()> {
    check_even(e)?;
    let in_set = p == 2 || (is_small_prime(p) && p * p <= e - 1);
    if in_set {
        Ok(())
    } else {
        Err(GoldbachError::NotADivisor { e, p })
    }
}

/// True when p cancels symmetrically about E/2: p = 2 always, odd p exactly
/// when p divides E/2.
pub fn classify_divisor(e: u64, p: u64) -> Result<bool> {
    check_divisor(e, p)?;
    Ok(p == 2 || (e / 2) % p == 0)
}

/// r.f.P(i): 1/2 for p = 2, (p-1)/p for symmetric odd p, (p-2)/p otherwise.
pub fn remainder_frequency(e: u64, p: u64) -> Result<Ratio<u64>> {
    Ok(frequency_for(p, classify_divisor(e, p)?))
}

pub(crate) fn frequency_for(p: u64, symmetric: bool) -> Ratio<u64> {
    if p == 2 {
        Ratio::new(1, 2)
    } else if symmetric {
        Ratio::new(p - 1, p)
    } else {
        Ratio::new(p - 2, p)
    }
}

/// Classify every sieve divisor of e and attach its frequency.
pub fn build_profile(table: &PrimeTable, e: u64) -> Result<DivisorProfile> {
    let divisors = table.divisor_set(e)?;
    let p_m = *divisors.last().expect("divisor set is never empty");
    let divisors = divisors
        .into_iter()
        .map(|p| {
            let symmetric = p == 2 || (e / 2) % p == 0;
            DivisorEntry {
                p,
                symmetric,
                frequency: frequency_for(p, symmetric),
            }
        })
        .collect();
    Ok(DivisorProfile { e, divisors, p_m })
}

/// Indivisibility by p, with 1 indivisible and p itself divisible.
#[inline]
pub fn is_pi_prime(n: u64, p: u64) -> bool {
    n % p != 0
}

/// Brute-force oracle: the number of N in [1, E-1] such that N and E-N are
/// both indivisible by p. Accepts any prime p, inside the divisor set or not.
pub fn count_symmetric_pi_primes(e: u64, p: u64) -> Result<u64> {
    check_even(e)?;
    if !is_small_prime(p) {
        return Err(GoldbachError::NotADivisor { e, p });
    }
    Ok((1..e)
        .filter(|&n| is_pi_prime(n, p) && is_pi_prime(e - n, p))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn classification_samples() {
        assert!(classify_divisor(210, 3).unwrap());
        assert!(!classify_divisor(502, 3).unwrap());
        assert!(classify_divisor(12, 2).unwrap());
        assert!(classify_divisor(2490, 5).unwrap());
        assert!(!classify_divisor(2490, 7).unwrap());
    }

    #[test]
    fn rejects_non_divisors() {
        assert!(matches!(
            classify_divisor(20, 11),
            Err(GoldbachError::NotADivisor { .. })
        ));
        assert!(classify_divisor(20, 9).is_err());
        assert!(classify_divisor(21, 3).is_err());
        assert!(remainder_frequency(20, 5).is_err()); // 5 > sqrt(19)
    }

    #[test]
    fn frequency_samples() {
        assert_eq!(remainder_frequency(210, 5).unwrap(), ratio(4, 5));
        assert_eq!(remainder_frequency(502, 5).unwrap(), ratio(3, 5));
        assert_eq!(remainder_frequency(128, 2).unwrap(), ratio(1, 2));
        assert_eq!(remainder_frequency(2490, 3).unwrap(), ratio(2, 3));
        assert_eq!(remainder_frequency(3022, 3).unwrap(), ratio(1, 3));
    }

    #[test]
    fn profile_210() {
        let t = PrimeTable::build(1_000).unwrap();
        let p = build_profile(&t, 210).unwrap();
        assert_eq!(p.p_m, 13);
        let freqs: Vec<Ratio<u64>> = p.divisors.iter().map(|d| d.frequency).collect();
        // 105 = 3*5*7, so 3, 5, and 7 are all symmetric
        assert_eq!(
            freqs,
            vec![
                ratio(1, 2),
                ratio(2, 3),
                ratio(4, 5),
                ratio(6, 7),
                ratio(9, 11),
                ratio(11, 13)
            ]
        );
    }

    #[test]
    fn profile_3022_prefix() {
        let t = PrimeTable::build(4_000).unwrap();
        let p = build_profile(&t, 3022).unwrap();
        let freqs: Vec<Ratio<u64>> =
            p.divisors.iter().take(5).map(|d| d.frequency).collect();
        assert_eq!(
            freqs,
            vec![
                ratio(1, 2),
                ratio(1, 3),
                ratio(3, 5),
                ratio(5, 7),
                ratio(9, 11)
            ]
        );
    }

    #[test]
    fn profile_6_is_single_entry() {
        let t = PrimeTable::build(100).unwrap();
        let p = build_profile(&t, 6).unwrap();
        assert_eq!(p.divisors.len(), 1);
        assert_eq!(p.divisors[0].p, 2);
        assert!(p.divisors[0].symmetric);
        assert_eq!(p.divisors[0].frequency, ratio(1, 2));
    }

    #[test]
    fn pi_prime_conventions() {
        assert!(is_pi_prime(1, 7));
        assert!(!is_pi_prime(7, 7));
        assert!(is_pi_prime(10, 3));
    }

    #[test]
    fn symmetric_counts_by_direct_scan() {
        assert_eq!(count_symmetric_pi_primes(20, 2).unwrap(), 10);
        assert_eq!(count_symmetric_pi_primes(20, 5).unwrap(), 16);
        assert_eq!(count_symmetric_pi_primes(22, 3).unwrap(), 7);
    }

    #[test]
    fn window_law_exact_on_aligned_windows() {
        let t = PrimeTable::build(1_000).unwrap();
        for e in [36u64, 210, 222, 502, 1000] {
            for d in build_profile(&t, e).unwrap().divisors {
                let expected = if d.p == 2 {
                    1
                } else if d.symmetric {
                    d.p - 1
                } else {
                    d.p - 2
                };
                let mut k = 0;
                while (k + 1) * d.p <= e - 1 {
                    let survivors = (k * d.p + 1..=(k + 1) * d.p)
                        .filter(|&n| is_pi_prime(n, d.p) && is_pi_prime(e - n, d.p))
                        .count() as u64;
                    assert_eq!(survivors, expected, "E={e} p={} k={k}", d.p);
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn count_tracks_frequency_within_boundary_error() {
        for (e, p) in [(20u64, 2u64), (20, 5), (22, 3), (1000, 3), (1000, 7), (9998, 97)] {
            let count = count_symmetric_pi_primes(e, p).unwrap();
            let symmetric = p == 2 || (e / 2) % p == 0;
            let f = frequency_for(p, symmetric);
            let lhs = (count * f.denom()) as i128 - (f.numer() * (e - 1)) as i128;
            assert!(
                lhs.unsigned_abs() <= (p * f.denom()) as u128,
                "E={e} p={p} count={count} freq={f}"
            );
        }
    }
}

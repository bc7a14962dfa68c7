//! Partition-count estimates: the exact product form, the asymptotic
//! E/(2 ln^2 E), and the comet band model.

use crate::error::Result;
use crate::partitions::gp_count;
use crate::prime::PrimeTable;
use crate::symmetry::{build_profile, DivisorProfile};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;

pub const DEFAULT_BAND_SET: [u64; 3] = [3, 5, 7];

/// One target's estimates next to its observed count.
#[derive(Debug, Clone)]
pub struct EstimateRecord {
    pub e: u64,
    pub product_exact: BigRational,
    pub product_int: u64,
    pub hl: f64,
    pub observed_gp: u64,
    pub error_pct: Option<i64>,
    /// observed / hl, reported without any convergence claim.
    pub hl_ratio: f64,
}

/// ((E-1)/2) * product of all remaindering frequencies, exactly. The
/// denominator grows like a primorial, hence arbitrary precision.
pub fn product_estimate(profile: &DivisorProfile) -> BigRational {
    let mut acc = BigRational::new(BigInt::from(profile.e - 1), BigInt::from(2));
    for d in &profile.divisors {
        acc *= BigRational::new(BigInt::from(*d.frequency.numer()), BigInt::from(*d.frequency.denom()));
    }
    acc
}

/// The product estimate rendered as an integer, rounding to nearest
/// (half away from zero; the value is always positive).
pub fn product_estimate_int(profile: &DivisorProfile) -> u64 {
    round_nearest(&product_estimate(profile))
}

fn round_nearest(r: &BigRational) -> u64 {
    let two = BigInt::from(2);
    let num = r.numer() * &two + r.denom();
    (num / (r.denom() * &two))
        .to_u64()
        .expect("estimate fits in u64")
}

/// E / (2 (ln E)^2).
pub fn hl_estimate(e: u64) -> f64 {
    let x = e as f64;
    x / (2.0 * x.ln().powi(2))
}

/// Signed percent deviation of an integer estimate from the observed count,
/// rounded to nearest, half away from zero. None when observed is zero.
pub fn error_percent(estimate_int: u64, observed: u64) -> Option<i64> {
    if observed == 0 {
        return None;
    }
    let diff = 100 * (estimate_int as i128 - observed as i128);
    let den = observed as i128;
    let q = (2 * diff.abs() + den) / (2 * den);
    Some((q as i64) * if diff < 0 { -1 } else { 1 })
}

///// Comet band membership: which primes from the small set divide E/2, and
/// the resulting height multiplier relative to the lowest band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandClass {
    pub e: u64,
    pub symmetric_small_divisors: Vec<u64>,
    /// Product of (p-1)/(p-2) over the symmetric members; 1 for the empty band.
    pub multiplier: Ratio<u64>,
}

pub fn band_class(e: u64, small_set: &[u64]) -> BandClass {
    let symmetric_small_divisors: Vec<u64> = small_set
        .iter()
        .copied()
        .filter(|&p| p % 2 == 1 && (e / 2) % p == 0)
        .collect();
    let multiplier = symmetric_small_divisors
        .iter()
        .fold(Ratio::new(1, 1), |acc, &p| acc * Ratio::new(p - 1, p - 2));
    BandClass {
        e,
        symmetric_small_divisors,
        multiplier,
    }
}

/// Assemble estimates and observation for one target.
pub fn estimate_record(table: &PrimeTable, e: u64) -> Result<EstimateRecord> {
    let profile = build_profile(table, e)?;
    let product_exact = product_estimate(&profile);
    let product_int = round_nearest(&product_exact);
    let hl = hl_estimate(e);
    let observed_gp = gp_count(table, e)?;
    Ok(EstimateRecord {
        e,
        product_exact,
        product_int,
        hl,
        observed_gp,
        error_pct: error_percent(product_int, observed_gp),
        hl_ratio: observed_gp as f64 / hl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::build(10_000).unwrap()
    }

    #[test]
    fn product_reproduces_worked_samples() {
        let t = table();
        let calc = |e| product_estimate_int(&build_profile(&t, e).unwrap());
        assert_eq!(calc(2_490), 85);
        assert_eq!(calc(3_022), 37);
        assert_eq!(calc(210), 17);
        assert_eq!(calc(128), 4);
        assert_eq!(calc(4), 1); // (3/2)*(1/2) = 3/4 rounds to 1
    }

    #[test]
    fn product_exact_value_210() {
        let t = table();
        let exact = product_estimate(&build_profile(&t, 210).unwrap());
        // (209/2)*(1/2)*(2/3)*(4/5)*(6/7)*(9/11)*(11/13) = 7524/455
        assert_eq!(
            exact,
            BigRational::new(BigInt::from(7_524), BigInt::from(455))
        );
    }

    #[test]
    fn hl_estimate_values() {
        assert!((hl_estimate(10_000) - 58.94).abs() < 0.01);
        assert!((hl_estimate(100) - 2.36).abs() < 0.01);
        assert!(hl_estimate(1_000_000) > hl_estimate(10_000));
    }

    #[test]
    fn error_percent_rendering() {
        assert_eq!(error_percent(17, 19), Some(-11));
        assert_eq!(error_percent(4, 3), Some(33));
        assert_eq!(error_percent(42, 42), Some(0));
        assert_eq!(error_percent(5, 0), None);
        assert_eq!(error_percent(85, 94), Some(-10));
        assert_eq!(error_percent(88, 96), Some(-8));
    }

    #[test]
    fn band_multipliers() {
        let b = band_class(6, &DEFAULT_BAND_SET); // E/2 = 3
        assert_eq!(b.symmetric_small_divisors, vec![3]);
        assert_eq!(b.multiplier, Ratio::new(2, 1));

        let b = band_class(10, &DEFAULT_BAND_SET); // E/2 = 5
        assert_eq!(b.symmetric_small_divisors, vec![5]);
        assert_eq!(b.multiplier, Ratio::new(4, 3));

        let b = band_class(30, &DEFAULT_BAND_SET); // E/2 = 15
        assert_eq!(b.symmetric_small_divisors, vec![3, 5]);
        assert_eq!(b.multiplier, Ratio::new(8, 3));

        let b = band_class(64, &DEFAULT_BAND_SET); // E/2 = 32
        assert!(b.symmetric_small_divisors.is_empty());
        assert_eq!(b.multiplier, Ratio::new(1, 1));

        let b = band_class(210, &DEFAULT_BAND_SET); // E/2 = 105 = 3*5*7
        assert_eq!(b.symmetric_small_divisors, vec![3, 5, 7]);
        assert_eq!(b.multiplier, Ratio::new(16, 5));
    }

    #[test]
    fn record_assembles() {
        let t = table();
        let r = estimate_record(&t, 210).unwrap();
        assert_eq!(r.product_int, 17);
        assert_eq!(r.observed_gp, 19);
        assert_eq!(r.error_pct, Some(-11));
        assert!(r.hl_ratio > 0.0);
    }
}

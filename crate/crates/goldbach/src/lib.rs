//! Exact Goldbach partition counts, divisor-symmetry frequencies,
//! step-truncated lower bounds, product estimates, and table/CSV reporting
//! for even targets.

pub mod bounds;
pub mod error;
pub mod estimates;
pub mod partitions;
pub mod prime;
pub mod report;
pub mod symmetry;

pub use bounds::{
    audit_range, min_gp_bound, stsp, verify_bounds, BoundReport, MinGpBound, RangeAudit, Verdicts,
};
pub use error::{GoldbachError, Result};
pub use estimates::{
    band_class, error_percent, estimate_record, hl_estimate, product_estimate,
    product_estimate_int, BandClass, EstimateRecord, DEFAULT_BAND_SET,
};
pub use partitions::{compute_stats, g1_count, g2_count, gp_count, PartitionStats};
pub use prime::PrimeTable;
pub use report::{
    appendix_a_audit, half_factors, read_csv, row, scan, scan_with, write_comet_csv, write_csv,
    AuditRow, RefRow, ScanConfig, ScanSummary, TableRow, CSV_HEADER, REFERENCE_ROWS,
};
pub use symmetry::{
    build_profile, classify_divisor, count_symmetric_pi_primes, is_pi_prime, remainder_frequency,
    DivisorEntry, DivisorProfile,
};

//! Table rows, the published-reference audit, range scans, and CSV I/O.

use crate::bounds::verify_bounds;
use crate::error::{GoldbachError, Result};
use crate::estimates::{band_class, error_percent, product_estimate_int};
use crate::partitions::gp_count;
use crate::prime::PrimeTable;
use crate::symmetry::build_profile;
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 10] = [
    "E", "PE", "NPE", "Pm", "half", "half_factors", "GP", "GR_pct", "calc_GP", "error_pct",
];

/// One fully computed table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub e: u64,
    pub pe: u64,
    pub npe: u64,
    pub p_m: u64,
    pub half: u64,
    /// "P" when E/2 is prime, otherwise the primes <= P(m) dividing E/2,
    /// ascending, comma-separated, including 2.
    pub half_factors: String,
    pub gp: u64,
    /// GP/NPE rendered as a percent, rounded to nearest.
    pub gr_pct: u64,
    pub calc_gp: u64,
    pub error_pct: Option<i64>,
}

/// A published reference row, embedded verbatim so the audit is
/// self-contained and any transcription error in the source is a finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefRow {
    pub e: u64,
    pub pe: u64,
    pub npe: u64,
    pub p_m: u64,
    pub half: u64,
    pub half_factors: &'static str,
    pub gp: u64,
    pub gr_pct: u64,
    pub calc_gp: u64,
    pub error_pct: i64,
}

/// A computed row next to its reference, with the disagreeing fields named.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub computed: TableRow,
    pub reference: RefRow,
    pub mismatches: Vec<&'static str>,
}

const fn rr(
    e: u64,
    pe: u64,
    npe: u64,
    p_m: u64,
    half: u64,
    half_factors: &'static str,
    gp: u64,
    gr_pct: u64,
    calc_gp: u64,
    error_pct: i64,
) -> RefRow {
    RefRow {
        e,
        pe,
        npe,
        p_m,
        half,
        half_factors,
        gp,
        gr_pct,
        calc_gp,
        error_pct,
    }
}

/// The 29 published rows, transcribed as printed (including its errors).
pub const REFERENCE_ROWS: [RefRow; 29] = [
    rr(128, 127, 31, 11, 64, "2", 3, 10, 4, 33),
    rr(210, 199, 46, 13, 105, "2,3,5,7", 19, 41, 17, -11),
    rr(222, 211, 47, 13, 111, "P", 11, 23, 5, -55),
    rr(502, 499, 95, 19, 251, "P", 15, 16, 10, -33),
    rr(512, 509, 97, 19, 256, "2", 11, 11, 10, -9),
    rr(678, 677, 123, 23, 339, "3", 28, 23, 24, -14),
    rr(1006, 997, 168, 31, 503, "P", 18, 11, 16, -11),
    rr(1024, 1021, 172, 31, 512, "2", 22, 13, 16, -27),
    rr(1510, 1499, 239, 37, 755, "5", 33, 14, 30, -9),
    rr(2018, 2017, 306, 43, 1009, "P", 28, 9, 27, -4),
    rr(2048, 2039, 309, 43, 1024, "2", 25, 8, 27, 8),
    rr(2490, 2477, 367, 47, 1245, "3,5", 94, 26, 85, -10),
    rr(3022, 3019, 433, 53, 1511, "P", 42, 10, 37, -12),
    rr(3514, 3511, 490, 59, 1757, "7", 51, 10, 50, -2),
    rr(4006, 4003, 552, 61, 2003, "P", 52, 9, 46, -12),
    rr(4096, 4093, 564, 61, 2048, "2", 53, 9, 47, -11),
    rr(4690, 4679, 633, 67, 2345, "5,7", 95, 15, 83, -13),
    rr(5006, 5003, 670, 67, 2503, "P", 63, 9, 56, -11),
    rr(5610, 5591, 738, 73, 2805, "2,3,5,11,17", 198, 27, 186, -6),
    rr(6002, 5987, 783, 73, 3001, "P", 62, 8, 63, 2),
    rr(6578, 6577, 851, 79, 3289, "2,11,13,23", 89, 10, 86, -3),
    rr(7022, 7019, 903, 83, 3511, "P", 72, 8, 70, -3),
    rr(7314, 7309, 932, 83, 3657, "2,3,23,53", 172, 18, 156, -9),
    rr(8002, 7993, 1007, 89, 4001, "P", 80, 8, 78, -3),
    rr(8192, 8191, 1028, 89, 4096, "2", 76, 7, 80, 5),
    rr(8610, 8609, 1072, 89, 4305, "2,3,5,7,41", 282, 26, 276, -2),
    rr(9014, 9013, 1021, 89, 4507, "P", 96, 9, 88, -8),
    rr(9510, 9497, 1177, 97, 4755, "3,5", 253, 21, 243, -4),
    rr(9998, 9973, 1229, 97, 4999, "P", 99, 8, 96, -3),
];

/// E/2's factor column: "P" for a prime half, otherwise every prime <= P(m)
/// dividing it, ascending, including 2.
pub fn half_factors(table: &PrimeTable, e: u64, p_m: u64) -> Result<String> {
    let half = e / 2;
    if table.is_prime(half) {
        return Ok("P".to_string());
    }
    let parts: Vec<String> = table
        .primes_up_to(p_m)
        .filter(|&p| half % p == 0)
        .map(|p| p.to_string())
        .collect();
    Ok(parts.join(","))
}

/// Compute every column for one target.
pub fn row(table: &PrimeTable, e: u64) -> Result<TableRow> {
    if e < 4 || e % 2 != 0 {
        return Err(GoldbachError::BadEven(e));
    }
    let profile = build_profile(table, e)?;
    let gp = gp_count(table, e)?;
    let pe = table.largest_prime_below(e)?;
    let npe = table.prime_count_up_to(pe)?;
    let gr_pct = (200 * gp + npe) / (2 * npe);
    let calc_gp = product_estimate_int(&profile);
    Ok(TableRow {
        e,
        pe,
        npe,
        p_m: profile.p_m,
        half: e / 2,
        half_factors: half_factors(table, e, profile.p_m)?,
        gp,
        gr_pct,
        calc_gp,
        error_pct: error_percent(calc_gp, gp),
    })
}

fn diff_fields(c: &TableRow, r: &RefRow) -> Vec<&'static str> {
    let mut out = Vec::new();
    if c.pe != r.pe {
        out.push("PE");
    }
    if c.npe != r.npe {
        out.push("NPE");
    }
    if c.p_m != r.p_m {
        out.push("Pm");
    }
    if c.half != r.half {
        out.push("half");
    }
    if c.half_factors != r.half_factors {
        out.push("half_factors");
    }
    if c.gp != r.gp {
        out.push("GP");
    }
    if c.gr_pct != r.gr_pct {
        out.push("GR_pct");
    }
    if c.calc_gp != r.calc_gp {
        out.push("calc_GP");
    }
    if c.error_pct != Some(r.error_pct) {
        out.push("error_pct");
    }
    out
}

/// Recompute all 29 reference rows and flag every disagreeing field.
pub fn appendix_a_audit(table: &PrimeTable) -> Result<Vec<AuditRow>> {
    REFERENCE_ROWS
        .iter()
        .map(|reference| {
            let computed = row(table, reference.e)?;
            let mismatches = diff_fields(&computed, reference);
            Ok(AuditRow {
                computed,
                reference: reference.clone(),
                mismatches,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub e_min: u64,
    pub e_max: u64,
    pub step: u64,
    pub threads: Option<usize>,
    pub csv_path: Option<PathBuf>,
    pub audit_bounds: bool,
}

impl ScanConfig {
    pub fn new(e_min: u64, e_max: u64) -> ScanConfig {
        ScanConfig {
            e_min,
            e_max,
            step: 2,
            threads: None,
            csv_path: None,
            audit_bounds: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.e_min < 4 || self.e_min % 2 != 0 {
            return Err(GoldbachError::Usage(format!(
                "scan start must be an even E >= 4, got {}",
                self.e_min
            )));
        }
        if self.e_max < self.e_min {
            return Err(GoldbachError::Usage(format!(
                "scan end {} is below its start {}",
                self.e_max, self.e_min
            )));
        }
        if self.step < 2 || self.step % 2 != 0 {
            return Err(GoldbachError::Usage(format!(
                "scan step must be even and >= 2, got {}",
                self.step
            )));
        }
        Ok(())
    }
}

/// Violation tallies from verify_bounds across a scan.
#[derive(Debug, Clone, Default)]
pub struct BoundViolationCounts {
    pub g1_ge_stsp_actual: u64,
    pub g1_ge_stsp_min: u64,
    pub g1_ge_closed_form: u64,
    pub g2_ge_min_g2: u64,
    pub gp_ge_min_gp: u64,
    pub chain_steps: u64,
}

impl BoundViolationCounts {
    pub fn total(&self) -> u64 {
        self.g1_ge_stsp_actual
            + self.g1_ge_stsp_min
            + self.g1_ge_closed_form
            + self.g2_ge_min_g2
            + self.gp_ge_min_gp
            + self.chain_steps
    }
}

#[derive(Debug, Clone)]
pub struct ScanSummary {
    pub rows: u64,
    pub gp_min: u64,
    pub gp_min_e: u64,
    pub gp_max: u64,
    pub gp_mean: f64,
    pub gp_ge_1_count: u64,
    pub violations: Option<BoundViolationCounts>,
}

/// Scan the configured range, handing each row to `on_row` in ascending E
/// order. Rows are computed in parallel chunks; delivery is sequential.
pub fn scan_with(
    table: &PrimeTable,
    config: &ScanConfig,
    mut on_row: impl FnMut(&TableRow) -> Result<()>,
) -> Result<ScanSummary> {
    config.validate()?;
    if config.e_max - 1 > table.limit() {
        return Err(GoldbachError::Coverage {
            what: "scan",
            needed: config.e_max - 1,
            limit: table.limit(),
        });
    }
    let targets: Vec<u64> = (config.e_min..=config.e_max)
        .step_by(config.step as usize)
        .collect();

    let mut rows = 0u64;
    let mut gp_min = u64::MAX;
    let mut gp_min_e = 0u64;
    let mut gp_max = 0u64;
    let mut gp_sum = 0u128;
    let mut gp_ge_1 = 0u64;
    let mut violations = config.audit_bounds.then(BoundViolationCounts::default);

    for chunk in targets.chunks(4096) {
        let computed: Vec<(TableRow, Option<crate::bounds::Verdicts>)> = chunk
            .par_iter()
            .map(|&e| {
                let r = row(table, e)?;
                let v = if config.audit_bounds {
                    Some(verify_bounds(table, e)?.verdicts)
                } else {
                    None
                };
                Ok((r, v))
            })
            .collect::<Result<_>>()?;
        for (r, v) in &computed {
            rows += 1;
            if r.gp < gp_min {
                gp_min = r.gp;
                gp_min_e = r.e;
            }
            gp_max = gp_max.max(r.gp);
            gp_sum += u128::from(r.gp);
            if r.gp >= 1 {
                gp_ge_1 += 1;
            }
            if let (Some(counts), Some(v)) = (violations.as_mut(), v) {
                counts.g1_ge_stsp_actual += u64::from(!v.g1_ge_stsp_actual);
                counts.g1_ge_stsp_min += u64::from(!v.g1_ge_stsp_min);
                counts.g1_ge_closed_form += u64::from(!v.g1_ge_closed_form);
                counts.g2_ge_min_g2 += u64::from(!v.g2_ge_min_g2);
                counts.gp_ge_min_gp += u64::from(!v.gp_ge_min_gp);
                counts.chain_steps += u64::from(!v.chain_steps_ok);
            }
            on_row(r)?;
        }
    }

    Ok(ScanSummary {
        rows,
        gp_min,
        gp_min_e,
        gp_max,
        gp_mean: if rows == 0 { 0.0 } else { gp_sum as f64 / rows as f64 },
        gp_ge_1_count: gp_ge_1,
        violations,
    })
}

/// Scan and collect all rows in memory.
pub fn scan(table: &PrimeTable, config: &ScanConfig) -> Result<(Vec<TableRow>, ScanSummary)> {
    let mut rows = Vec::new();
    let summary = scan_with(table, config, |r| {
        rows.push(r.clone());
        Ok(())
    })?;
    Ok((rows, summary))
}

/// Streaming CSV writer with the fixed header.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Result<CsvSink<W>> {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(CSV_HEADER)?;
        Ok(CsvSink { writer })
    }

    pub fn write_row(&mut self, r: &TableRow) -> Result<()> {
        self.writer.write_record([
            r.e.to_string(),
            r.pe.to_string(),
            r.npe.to_string(),
            r.p_m.to_string(),
            r.half.to_string(),
            r.half_factors.clone(),
            r.gp.to_string(),
            r.gr_pct.to_string(),
            r.calc_gp.to_string(),
            r.error_pct.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn write_csv(rows: &[TableRow], path: &Path) -> Result<()> {
    let mut sink = CsvSink::new(std::fs::File::create(path)?)?;
    for r in rows {
        sink.write_row(r)?;
    }
    sink.finish()
}

/// Parse a CSV produced by `CsvSink` back into rows.
pub fn read_csv(path: &Path) -> Result<Vec<TableRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(GoldbachError::Usage(format!(
            "unexpected CSV header in {}: {:?}",
            path.display(),
            headers
        )));
    }
    let parse = |s: &str, what: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| GoldbachError::Usage(format!("bad {what} field {s:?} in {}", path.display())))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        rows.push(TableRow {
            e: parse(field(0), "E")?,
            pe: parse(field(1), "PE")?,
            npe: parse(field(2), "NPE")?,
            p_m: parse(field(3), "Pm")?,
            half: parse(field(4), "half")?,
            half_factors: field(5).to_string(),
            gp: parse(field(6), "GP")?,
            gr_pct: parse(field(7), "GR_pct")?,
            calc_gp: parse(field(8), "calc_GP")?,
            error_pct: if field(9).is_empty() {
                None
            } else {
                Some(field(9).parse().map_err(|_| {
                    GoldbachError::Usage(format!(
                        "bad error_pct field {:?} in {}",
                        field(9),
                        path.display()
                    ))
                })?)
            },
        });
    }
    Ok(rows)
}

/// Comet export: one row per target with its band signature and multiplier.
pub fn write_comet_csv(
    table: &PrimeTable,
    e_max: u64,
    band_set: &[u64],
    path: &Path,
) -> Result<u64> {
    if e_max < 4 {
        return Err(GoldbachError::Usage(format!(
            "comet range must reach at least 4, got {e_max}"
        )));
    }
    if e_max - 1 > table.limit() {
        return Err(GoldbachError::Coverage {
            what: "comet export",
            needed: e_max - 1,
            limit: table.limit(),
        });
    }
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["E", "GP", "band_signature", "multiplier_num", "multiplier_den"])?;
    let targets: Vec<u64> = (4..=e_max).step_by(2).collect();
    let mut written = 0u64;
    for chunk in targets.chunks(8192) {
        let computed: Vec<(u64, u64)> = chunk
            .par_iter()
            .map(|&e| Ok((e, gp_count(table, e)?)))
            .collect::<Result<_>>()?;
        for (e, gp) in computed {
            let band = band_class(e, band_set);
            let signature = band
                .symmetric_small_divisors
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writer.write_record([
                e.to_string(),
                gp.to_string(),
                signature,
                band.multiplier.numer().to_string(),
                band.multiplier.denom().to_string(),
            ])?;
            written += 1;
        }
    }
    writer.flush()?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::build(10_000).unwrap()
    }

    #[test]
    fn row_210_matches_reference() {
        let t = table();
        let r = row(&t, 210).unwrap();
        assert_eq!(r.pe, 199);
        assert_eq!(r.npe, 46);
        assert_eq!(r.p_m, 13);
        assert_eq!(r.half, 105);
        assert_eq!(r.half_factors, "3,5,7"); // 105 is odd; the reference misprints a 2
        assert_eq!(r.gp, 19);
        assert_eq!(r.gr_pct, 41);
        assert_eq!(r.calc_gp, 17);
        assert_eq!(r.error_pct, Some(-11));
    }

    #[test]
    fn row_small_and_large_spots() {
        let t = table();
        let r = row(&t, 8_192).unwrap();
        assert_eq!((r.pe, r.npe, r.gp), (8_191, 1_028, 76));
        assert_eq!(r.half_factors, "2");

        let r = row(&t, 4).unwrap();
        assert_eq!((r.pe, r.npe, r.gp), (3, 2, 1));
        assert_eq!(r.half_factors, "P");
        assert_eq!(r.gr_pct, 50);
        assert_eq!(r.calc_gp, 1);
        assert_eq!(r.error_pct, Some(0));
    }

    #[test]
    fn half_factor_edge_cases() {
        let t = table();
        let hf = |e| {
            let pm = *t.divisor_set(e).unwrap().last().unwrap();
            half_factors(&t, e, pm).unwrap()
        };
        assert_eq!(hf(222), "3"); // 111 = 3*37 and 37 > P(m)=13
        assert_eq!(hf(4_690), "5,7,67"); // 2345 = 5*7*67, 67 <= P(m)=67
        assert_eq!(hf(5_610), "3,5,11,17"); // 2805 is odd
        assert_eq!(hf(502), "P");
        assert_eq!(hf(128), "2");
    }

    #[test]
    fn audit_flags_exactly_the_reference_errors() {
        let t = table();
        let audit = appendix_a_audit(&t).unwrap();
        assert_eq!(audit.len(), 29);
        for row in &audit {
            let e = row.reference.e;
            let expect: &[&str] = match e {
                210 | 5_610 | 6_578 | 7_314 | 8_610 => &["half_factors"],
                222 | 4_690 => &["half_factors", "calc_GP", "error_pct"],
                9_014 => &["NPE"],
                _ => &[],
            };
            assert_eq!(row.mismatches, expect, "E={e}");
        }
    }

    #[test]
    fn audit_core_columns_match_everywhere() {
        let t = table();
        for row in appendix_a_audit(&t).unwrap() {
            assert_eq!(row.computed.gp, row.reference.gp, "E={}", row.reference.e);
            assert_eq!(row.computed.pe, row.reference.pe, "E={}", row.reference.e);
            assert_eq!(row.computed.p_m, row.reference.p_m, "E={}", row.reference.e);
            assert_eq!(
                row.computed.gr_pct, row.reference.gr_pct,
                "E={}",
                row.reference.e
            );
        }
    }

    #[test]
    fn scan_small_range() {
        let t = table();
        let (rows, summary) = scan(&t, &ScanConfig::new(4, 100)).unwrap();
        assert_eq!(rows.len(), 49);
        assert_eq!(summary.rows, 49);
        assert_eq!(summary.gp_ge_1_count, 49);
        assert_eq!(summary.gp_min, 1);
        assert!(summary.violations.is_none());
        assert!(rows.windows(2).all(|w| w[0].e < w[1].e));
    }

    #[test]
    fn scan_step_four() {
        let t = table();
        let mut cfg = ScanConfig::new(4, 40);
        cfg.step = 4;
        let (rows, _) = scan(&t, &cfg).unwrap();
        assert!(rows.iter().all(|r| r.e % 4 == 0));
        assert_eq!(rows.len(), 10);
    }

    #[test]
    fn scan_with_bound_audit_counts_honestly() {
        let t = table();
        let mut cfg = ScanConfig::new(4, 100);
        cfg.audit_bounds = true;
        let (_, summary) = scan(&t, &cfg).unwrap();
        let v = summary.violations.unwrap();
        // Seven of these E break the actual-frequency claim (first at 36)
        // and two the worst-case one (46, 86); the closed-form chain holds
        // throughout.
        assert_eq!(v.g1_ge_stsp_actual, 7);
        assert_eq!(v.g1_ge_stsp_min, 2);
        assert_eq!(v.g1_ge_closed_form, 0);
        assert_eq!(v.g2_ge_min_g2, 0);
        assert_eq!(v.gp_ge_min_gp, 0);
        assert_eq!(v.chain_steps, 0);
    }

    #[test]
    fn scan_rejects_bad_configs() {
        let t = table();
        assert!(scan(&t, &ScanConfig::new(3, 100)).is_err());
        assert!(scan(&t, &ScanConfig::new(100, 4)).is_err());
        let mut cfg = ScanConfig::new(4, 100);
        cfg.step = 3;
        assert!(scan(&t, &cfg).is_err());
        assert!(matches!(
            scan(&t, &ScanConfig::new(4, 50_000)),
            Err(GoldbachError::Coverage { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let t = table();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let (rows, _) = scan(&t, &ScanConfig::new(4, 300)).unwrap();
        write_csv(&rows, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(rows, back);

        let text = std::fs::read_to_string(&path).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, CSV_HEADER.join(","));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_quotes_factor_lists() {
        let t = table();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.csv");
        let rows = vec![row(&t, 210).unwrap()];
        write_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"3,5,7\""));
        assert_eq!(read_csv(&path).unwrap(), rows);
    }

    #[test]
    fn comet_csv_writes_bands() {
        let t = PrimeTable::build(1_000).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("comet.csv");
        let n = write_comet_csv(&t, 1_000, &crate::estimates::DEFAULT_BAND_SET, &path).unwrap();
        assert_eq!(n, 499);
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "E,GP,band_signature,multiplier_num,multiplier_den"
        );
        assert!(text.contains("\"3,5\""));
        assert_eq!(lines.count(), 499);
    }
}

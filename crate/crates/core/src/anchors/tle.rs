//! Two-line element sets.
//!
//! Fixed columns (1-based, inclusive):
//!
//! ```text
//! line 1: 1 line no. | 3-7 catalog | 19-20 epoch year | 21-32 epoch day | 69 checksum
//! line 2: 1 line no. | 3-7 catalog | 9-16 incl (deg) | 18-25 RAAN (deg)
//!         27-33 eccentricity (implied "0.") | 35-42 arg. perigee (deg)
//!         44-51 mean anomaly (deg) | 53-63 mean motion (rev/day) | 69 checksum
//! ```
//!
//! The checksum is the sum of the digits in columns 1-68, with each `-`
//! counting as 1, modulo 10.

use std::f64::consts::TAU;

use super::orbit::{OrbitElements, EARTH_MU, EARTH_RADIUS_M};
use crate::error::{Error, Result, TleLine};

pub const TLE_LINE_LEN: usize = 69;

#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    pub catalog_number: u32,
    /// Two-digit epoch year as written (57-99 -> 19xx, 00-56 -> 20xx).
    pub epoch_year: u8,
    /// Day of year with fractional part.
    pub epoch_day: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
    pub mean_motion_rev_per_day: f64,
    line1: String,
    line2: String,
}

impl TleRecord {
    pub fn line1(&self) -> &str {
        &self.line1
    }

    pub fn line2(&self) -> &str {
        &self.line2
    }

    pub fn full_epoch_year(&self) -> u16 {
        if self.epoch_year >= 57 {
            1900 + self.epoch_year as u16
        } else {
            2000 + self.epoch_year as u16
        }
    }

    /// Circular-orbit approximation: semi-major axis from the mean motion,
    /// eccentricity dropped, phase = argument of perigee + mean anomaly.
    pub fn orbit_elements(&self) -> Result<OrbitElements> {
        let n = TAU * self.mean_motion_rev_per_day / 86_400.0;
        let a = (EARTH_MU / (n * n)).cbrt();
        OrbitElements::new(
            a - EARTH_RADIUS_M,
            self.inclination_deg.to_radians(),
            self.raan_deg.to_radians(),
            (self.arg_perigee_deg + self.mean_anomaly_deg).to_radians(),
        )
    }
}

/// Modulo-10 checksum over the first 68 columns.
pub fn tle_checksum(line: &str) -> u8 {
    let sum: u32 = line
        .bytes()
        .take(TLE_LINE_LEN - 1)
        .map(|b| match b {
            b'0'..=b'9' => (b - b'0') as u32,
            b'-' => 1,
            _ => 0,
        })
        .sum();
    (sum % 10) as u8
}

fn check_line(line: &str, which: TleLine) -> Result<()> {
    if !line.is_ascii() || line.len() != TLE_LINE_LEN {
        return Err(Error::TleFormat {
            line: which,
            expected: TLE_LINE_LEN,
            found: line.chars().count(),
        });
    }
    let stated = line.as_bytes()[TLE_LINE_LEN - 1];
    if !stated.is_ascii_digit() {
        return Err(Error::TleParse {
            line: which,
            field: "checksum",
            start: 69,
            end: 69,
            text: (stated as char).to_string(),
        });
    }
    let computed = tle_checksum(line);
    if stated - b'0' != computed {
        return Err(Error::TleChecksum {
            line: which,
            stated: stated - b'0',
            computed,
        });
    }
    let want = match which {
        TleLine::One => b'1',
        TleLine::Two => b'2',
    };
    if line.as_bytes()[0] != want {
        return Err(Error::TleStructure {
            line: which,
            detail: format!("line number must be '{}'", want as char),
        });
    }
    Ok(())
}

/// Slices 1-based inclusive columns.
fn columns(line: &str, start: usize, end: usize) -> &str {
    &line[start - 1..end]
}

fn field<T: std::str::FromStr>(
    line: &str,
    which: TleLine,
    name: &'static str,
    start: usize,
    end: usize,
) -> Result<T> {
    let text = columns(line, start, end);
    text.trim().parse().map_err(|_| Error::TleParse {
        line: which,
        field: name,
        start,
        end,
        text: text.to_string(),
    })
}

pub fn parse_tle(line1: &str, line2: &str) -> Result<TleRecord> {
    let line1 = line1.trim_end_matches(['\r', '\n']);
    let line2 = line2.trim_end_matches(['\r', '\n']);
    check_line(line1, TleLine::One)?;
    check_line(line2, TleLine::Two)?;

    let catalog_number: u32 = field(line1, TleLine::One, "catalog number", 3, 7)?;
    let catalog2: u32 = field(line2, TleLine::Two, "catalog number", 3, 7)?;
    if catalog_number != catalog2 {
        return Err(Error::TleStructure {
            line: TleLine::Two,
            detail: format!("catalog number {catalog2} does not match line 1 ({catalog_number})"),
        });
    }
    let ecc_digits = columns(line2, 27, 33);
    if !ecc_digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::TleParse {
            line: TleLine::Two,
            field: "eccentricity",
            start: 27,
            end: 33,
            text: ecc_digits.to_string(),
        });
    }
    let ecc_int: u32 = field(line2, TleLine::Two, "eccentricity", 27, 33)?;
    Ok(TleRecord {
        catalog_number,
        epoch_year: field(line1, TleLine::One, "epoch year", 19, 20)?,
        epoch_day: field(line1, TleLine::One, "epoch day", 21, 32)?,
        inclination_deg: field(line2, TleLine::Two, "inclination", 9, 16)?,
        raan_deg: field(line2, TleLine::Two, "right ascension", 18, 25)?,
        eccentricity: ecc_int as f64 * 1e-7,
        arg_perigee_deg: field(line2, TleLine::Two, "argument of perigee", 35, 42)?,
        mean_anomaly_deg: field(line2, TleLine::Two, "mean anomaly", 44, 51)?,
        mean_motion_rev_per_day: field(line2, TleLine::Two, "mean motion", 53, 63)?,
        line1: line1.to_string(),
        line2: line2.to_string(),
    })
}

fn splice(line: &mut String, start: usize, end: usize, text: &str) {
    debug_assert_eq!(text.len(), end - start + 1, "field width for columns {start}-{end}");
    line.replace_range(start - 1..end, text);
}

fn with_checksum(mut line: String) -> String {
    let sum = tle_checksum(&line);
    line.replace_range(TLE_LINE_LEN - 1..TLE_LINE_LEN, &sum.to_string());
    line
}

/// Writes the parsed fields back into the record's lines in the standard
/// fixed-width layout and recomputes both checksums. Columns that are not
/// modelled (designator, drag terms, revolution number) are carried over.
pub fn format_tle(record: &TleRecord) -> (String, String) {
    let mut l1 = record.line1.clone();
    splice(&mut l1, 3, 7, &format!("{:05}", record.catalog_number));
    splice(&mut l1, 19, 20, &format!("{:02}", record.epoch_year));
    splice(&mut l1, 21, 32, &format!("{:012.8}", record.epoch_day));

    let mut l2 = record.line2.clone();
    splice(&mut l2, 3, 7, &format!("{:05}", record.catalog_number));
    splice(&mut l2, 9, 16, &format!("{:8.4}", record.inclination_deg));
    splice(&mut l2, 18, 25, &format!("{:8.4}", record.raan_deg));
    splice(&mut l2, 27, 33, &format!("{:07}", (record.eccentricity * 1e7).round() as u32));
    splice(&mut l2, 35, 42, &format!("{:8.4}", record.arg_perigee_deg));
    splice(&mut l2, 44, 51, &format!("{:8.4}", record.mean_anomaly_deg));
    splice(&mut l2, 53, 63, &format!("{:11.8}", record.mean_motion_rev_per_day));
    (with_checksum(l1), with_checksum(l2))
}

/// Parses a file of 2-line or 3-line (name + 2 lines) element sets. Blank
/// lines are skipped.
pub fn parse_tle_file(text: &str) -> Result<Vec<(Option<String>, TleRecord)>> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let name = if lines[i].starts_with("1 ") {
            None
        } else {
            i += 1;
            Some(lines[i - 1].trim().to_string())
        };
        let l1 = lines.get(i).copied().unwrap_or("");
        let l2 = lines.get(i + 1).copied().unwrap_or("");
        out.push((name, parse_tle(l1, l2)?));
        i += 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    pub(crate) const ISS_1: &str = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
    pub(crate) const ISS_2: &str = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

    /// Independent checksum oracle written from the format definition.
    fn oracle_checksum(line: &str) -> u8 {
        let mut total = 0u32;
        for c in line.chars().take(68) {
            if let Some(d) = c.to_digit(10) {
                total += d;
            } else if c == '-' {
                total += 1;
            }
        }
        (total % 10) as u8
    }

    #[test]
    fn parses_reference_record() {
        let r = parse_tle(ISS_1, ISS_2).unwrap();
        assert_eq!(r.catalog_number, 25544);
        assert_eq!(r.epoch_year, 8);
        assert_eq!(r.full_epoch_year(), 2008);
        assert_eq!(r.epoch_day, 264.51782528);
        assert_eq!(r.inclination_deg, 51.6416);
        assert_eq!(r.raan_deg, 247.4627);
        assert!((r.eccentricity - 0.0006703).abs() < 1e-15);
        assert_eq!(r.arg_perigee_deg, 130.5360);
        assert_eq!(r.mean_anomaly_deg, 325.0288);
        assert_eq!(r.mean_motion_rev_per_day, 15.72125391);
        assert_eq!(oracle_checksum(ISS_1), 7);
        assert_eq!(oracle_checksum(ISS_2), 7);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let r = parse_tle(ISS_1, ISS_2).unwrap();
        let (a, b) = format_tle(&r);
        assert_eq!(a, ISS_1);
        assert_eq!(b, ISS_2);
    }

    #[test]
    fn short_line_is_a_format_error() {
        let short = &ISS_1[..68];
        match parse_tle(short, ISS_2) {
            Err(Error::TleFormat { line: TleLine::One, found: 68, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn checksum_error_names_the_line() {
        let mut bad = ISS_2.to_string();
        bad.replace_range(10..11, "2");
        match parse_tle(ISS_1, &bad) {
            Err(e @ Error::TleChecksum { line: TleLine::Two, .. }) => assert_eq!(e.code(), "TLE_CHECKSUM"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_field_reports_columns() {
        let mut bad = ISS_2.to_string();
        bad.replace_range(8..9, "x");
        let bad = with_checksum(bad);
        match parse_tle(ISS_1, &bad) {
            Err(Error::TleParse { field: "inclination", start: 9, end: 16, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn circular_elements_from_mean_motion() {
        let o = parse_tle(ISS_1, ISS_2).unwrap().orbit_elements().unwrap();
        // ~15.72 rev/day is a ~350 km orbit
        assert!((300e3..400e3).contains(&o.altitude_m), "{}", o.altitude_m);
        assert!((o.inclination.to_degrees() - 51.6416).abs() < 1e-9);
    }

    #[test]
    fn three_line_file() {
        let text = format!("ISS (ZARYA)\n{ISS_1}\n{ISS_2}\n\n{ISS_1}\r\n{ISS_2}\r\n");
        let sets = parse_tle_file(&text).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].0.as_deref(), Some("ISS (ZARYA)"));
        assert_eq!(sets[1].0, None);
    }

    proptest! {
        #[test]
        fn single_digit_flips_are_caught(line in 0usize..2, col in 0usize..69, delta in 1u8..10) {
            let mut lines = [ISS_1.to_string(), ISS_2.to_string()];
            let b = lines[line].as_bytes()[col];
            prop_assume!(b.is_ascii_digit());
            let flipped = (b'0' + (b - b'0' + delta) % 10) as char;
            lines[line].replace_range(col..col + 1, &flipped.to_string());
            let res = parse_tle(&lines[0], &lines[1]);
            let is_checksum_error = matches!(res, Err(Error::TleChecksum { .. }));
            prop_assert!(is_checksum_error);
        }

        #[test]
        fn checksum_matches_oracle(s in "[0-9 .+-]{68}") {
            prop_assert_eq!(tle_checksum(&s), oracle_checksum(&s));
        }
    }
}

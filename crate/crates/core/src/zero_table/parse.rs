use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Provenance, ZeroTable, ZetaZero};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroFormat {
    /// One decimal ordinate per line; every zero is simple and on the line.
    OrdinatesOnly,
    /// `delta,gamma[,multiplicity]` per line, optional header.
    DeltaGammaCsv,
}

impl FromStr for ZeroFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinates-only" | "ordinates" => Ok(ZeroFormat::OrdinatesOnly),
            "delta-gamma-csv" | "csv" => Ok(ZeroFormat::DeltaGammaCsv),
            other => Err(Error::Domain(format!("unknown zero-file format {other:?}"))),
        }
    }
}

impl fmt::Display for ZeroFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroFormat::OrdinatesOnly => "ordinates-only",
            ZeroFormat::DeltaGammaCsv => "delta-gamma-csv",
        })
    }
}

/// Reads a zero table from disk. Gzip-compressed files are detected by
/// their magic bytes and decompressed transparently.
pub fn parse_zero_file(path: impl AsRef<Path>, format: ZeroFormat) -> Result<ZeroTable> {
    let path = path.as_ref();
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_zero_bytes(&raw, format, &path.display().to_string())
}

pub(crate) fn parse_zero_bytes(raw: &[u8], format: ZeroFormat, source: &str) -> Result<ZeroTable> {
    let checksum = hex::encode(Sha256::digest(raw));
    let text = if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = String::new();
        GzDecoder::new(raw)
            .read_to_string(&mut out)
            .map_err(|e| Error::io(source, e))?;
        out
    } else {
        String::from_utf8(raw.to_vec()).map_err(|e| Error::Parse {
            line: 0,
            message: format!("not UTF-8: {e}"),
        })?
    };
    let mut table = parse_zero_str(&text, format)?;
    table.provenance.source = source.to_string();
    table.provenance.checksum = checksum;
    Ok(table)
}

/// Parses table text. Blank lines and `#` comments are skipped; ordinates
/// carrying more digits than f64 holds are rounded, not rejected.
pub fn parse_zero_str(text: &str, format: ZeroFormat) -> Result<ZeroTable> {
    let mut zeros = Vec::new();
    let mut seen_data = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let zero = match format {
            ZeroFormat::OrdinatesOnly => {
                let gamma = parse_number(line, lineno)?;
                check_zero(0.0, gamma, 1, lineno)?
            }
            ZeroFormat::DeltaGammaCsv => {
                let fields: Vec<&str> = line.split(',').map(str::trim).collect();
                if !seen_data && fields[0].parse::<f64>().is_err() {
                    // header row
                    seen_data = true;
                    continue;
                }
                if fields.len() < 2 || fields.len() > 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected 2 or 3 fields, found {}", fields.len()),
                    });
                }
                let delta = parse_number(fields[0], lineno)?;
                let gamma = parse_number(fields[1], lineno)?;
                let multiplicity = match fields.get(2) {
                    Some(m) => m.parse::<u32>().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad multiplicity {m:?}"),
                    })?,
                    None => 1,
                };
                check_zero(delta, gamma, multiplicity, lineno)?
            }
        };
        seen_data = true;
        zeros.push(zero);
    }
    ZeroTable::new(zeros, Provenance::default())
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value {field:?}"),
        });
    }
    Ok(v)
}

fn check_zero(delta: f64, gamma: f64, multiplicity: u32, line: usize) -> Result<ZetaZero> {
    if !(delta.abs() < 0.5) {
        return Err(Error::DeltaOutOfRange { line, delta });
    }
    ZetaZero::new(delta, gamma, multiplicity).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })
}

/// Serializes a table; parsing the output with the same format reproduces
/// every field exactly (shortest round-trip float formatting).
pub fn write_zero_table<W: Write>(table: &ZeroTable, format: ZeroFormat, mut out: W) -> std::io::Result<()> {
    match format {
        ZeroFormat::OrdinatesOnly => {
            for z in table.zeros() {
                writeln!(out, "{}", z.gamma)?;
            }
        }
        ZeroFormat::DeltaGammaCsv => {
            writeln!(out, "delta,gamma,multiplicity")?;
            for z in table.zeros() {
                writeln!(out, "{},{},{}", z.delta, z.gamma, z.multiplicity)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ordinates_only() {
        let t = parse_zero_str("14.134725\n21.022040\n", ZeroFormat::OrdinatesOnly).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.zeros().iter().all(|z| z.delta == 0.0 && z.multiplicity == 1));
        assert_eq!(t.t_max(), 21.022040);
    }

    #[test]
    fn blank_lines_are_ignored() {
        let t = parse_zero_str("\n14.1\n\n  21.0  \n", ZeroFormat::OrdinatesOnly).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn long_ordinates_are_rounded() {
        let t = parse_zero_str("14.13472514173469379045725198356247\n", ZeroFormat::OrdinatesOnly).unwrap();
        assert_eq!(t.zeros()[0].gamma, 14.134725141734694);
    }

    #[test]
    fn mirrored_off_line_pair() {
        let t = parse_zero_str("0.01,100.0\n-0.01,100.0\n", ZeroFormat::DeltaGammaCsv).unwrap();
        assert_eq!(t.len(), 2);
        let deltas: Vec<f64> = t.zeros().iter().map(|z| z.delta).collect();
        assert!(deltas.contains(&0.01) && deltas.contains(&-0.01));
        assert!(t.zeros().iter().all(|z| z.gamma == 100.0));
    }

    #[test]
    fn header_and_multiplicity() {
        let t = parse_zero_str("delta,gamma,multiplicity\n0,10,2\n0,11\n", ZeroFormat::DeltaGammaCsv).unwrap();
        assert_eq!(t.count_up_to(20.0), 3);
    }

    #[test]
    fn delta_out_of_range() {
        let err = parse_zero_str("0.6,50.0", ZeroFormat::DeltaGammaCsv).unwrap_err();
        assert!(matches!(err, Error::DeltaOutOfRange { line: 1, .. }));
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_zero_str("14.1\n21.0\nabc\n", ZeroFormat::OrdinatesOnly).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_zero_str("0,10\n0,11,2,4\n", ZeroFormat::DeltaGammaCsv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn gzip_input_is_detected() {
        use flate2::write::GzEncoder;
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(b"14.134725\n21.022040\n25.010858\n").unwrap();
        let gz = enc.finish().unwrap();
        let t = parse_zero_bytes(&gz, ZeroFormat::OrdinatesOnly, "mem.gz").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.provenance().checksum.len(), 64);
    }

    fn zero_strategy() -> impl Strategy<Value = ZetaZero> {
        (-0.499f64..0.499, 1e-3f64..1e6, 1u32..4).prop_map(|(d, g, m)| ZetaZero {
            delta: d,
            gamma: g,
            multiplicity: m,
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip(zeros in prop::collection::vec(zero_strategy(), 0..40)) {
            let table = ZeroTable::new(zeros, Provenance::default()).unwrap();
            let mut buf = Vec::new();
            write_zero_table(&table, ZeroFormat::DeltaGammaCsv, &mut buf).unwrap();
            let back = parse_zero_str(std::str::from_utf8(&buf).unwrap(), ZeroFormat::DeltaGammaCsv).unwrap();
            prop_assert_eq!(back.zeros(), table.zeros());
        }

        #[test]
        fn ordinates_round_trip(gammas in prop::collection::vec(1e-3f64..1e6, 0..40)) {
            let table = ZeroTable::from_ordinates(&gammas).unwrap();
            let mut buf = Vec::new();
            write_zero_table(&table, ZeroFormat::OrdinatesOnly, &mut buf).unwrap();
            let back = parse_zero_str(std::str::from_utf8(&buf).unwrap(), ZeroFormat::OrdinatesOnly).unwrap();
            prop_assert_eq!(back.zeros(), table.zeros());
        }
    }
}

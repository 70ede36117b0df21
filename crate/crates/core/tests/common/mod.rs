//! Genuine zero tables for the integration tests.
//!
//! Tables of the first `n` zeros come from `PAIRCORR_ZEROS1` (a local copy
//! of a published ordinates file, optionally gzipped) when set, and are
//! otherwise computed once with `zetagen` and cached under the cargo target
//! directory.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use paircorr::zero_table::{parse_zero_file, parse_zero_str, ZeroFormat, ZeroTable};

pub fn fixture_path(n: usize) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("zeros_first_{n}.txt"))
}

fn generated(n: usize) -> PathBuf {
    let path = fixture_path(n);
    if !path.exists() {
        let mut zeros = zetagen::ZeroFinder::new().first_zeros(n).expect("zero generation");
        zeros.truncate(n);
        let mut buf = Vec::new();
        zetagen::write_ordinates(&mut buf, &zeros).unwrap();
        // unique temp name so concurrent test binaries never see a partial file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, buf).unwrap();
        fs::rename(&tmp, &path).unwrap();
    }
    path
}

/// The first `n` zeros, on the critical line and simple.
pub fn genuine_table(n: usize) -> ZeroTable {
    if let Ok(src) = std::env::var("PAIRCORR_ZEROS1") {
        let full = parse_zero_file(&src, ZeroFormat::OrdinatesOnly).expect("PAIRCORR_ZEROS1 parses");
        assert!(full.len() >= n, "PAIRCORR_ZEROS1 holds only {} zeros", full.len());
        let mut text = String::new();
        for z in &full.zeros()[..n] {
            text.push_str(&format!("{}\n", z.gamma));
        }
        return parse_zero_str(&text, ZeroFormat::OrdinatesOnly).unwrap();
    }
    parse_zero_file(generated(n), ZeroFormat::OrdinatesOnly).expect("fixture parses")
}

/// The first `n` zeros as raw file bytes.
pub fn genuine_bytes(n: usize) -> Vec<u8> {
    fs::read(generated(n)).unwrap()
}

//! Bundled modulus-of-rupture data for the two lumber processes.
//!
//! Each table holds 25 samples of 4 specimens (GPa x 10). The first ten
//! samples of each are the in-control training set of the replay
//! experiments; samples 11 to 25 form Phase II.

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::io::samples::parse_samples;

pub const TABLE1_CSV: &str = include_str!("../../fixtures/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../../fixtures/table2.csv");

pub const TABLE1_SHA256: &str = "6330654c70c330060ac133f79603b270a3961dfc1860b176b2c9e93020ae27fd";
pub const TABLE2_SHA256: &str = "c22f32bd7e9938ec327ca15c53206ff09f7fdddfe8227bf2fbea62b2b5bf5c08";

/// Samples per table, specimens per sample, in-control prefix.
pub const SAMPLES: usize = 25;
pub const SAMPLE_SIZE: usize = 4;
pub const IN_CONTROL: usize = 10;

/// Anticipated 0.05 percentiles and shape used with these tables.
pub const PRIOR_X_R: f64 = 2.9;
pub const PRIOR_Y_R: f64 = 3.8;
pub const PRIOR_BETA: f64 = 5.0;
pub const R_LEVEL: f64 = 0.95;
/// Multiplier applied to the second process in Phase II.
pub const Y_SHIFT: f64 = 1.15;

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn table1() -> Vec<Vec<f64>> {
    parse_samples(TABLE1_CSV).expect("bundled table 1 parses")
}

pub fn table2() -> Vec<Vec<f64>> {
    parse_samples(TABLE2_CSV).expect("bundled table 2 parses")
}

/// Table 2 with every sample from index `from` onward multiplied by `factor`.
pub fn table2_shifted(factor: f64, from: usize) -> Vec<Vec<f64>> {
    let mut t = table2();
    for s in t.iter_mut().skip(from) {
        for v in s.iter_mut() {
            *v *= factor;
        }
    }
    t
}

/// Verifies both bundled tables against their pinned digests.
pub fn verify() -> Result<()> {
    for (name, text, want) in [("table1", TABLE1_CSV, TABLE1_SHA256), ("table2", TABLE2_CSV, TABLE2_SHA256)] {
        let got = sha256_hex(text);
        if got != want {
            return Err(crate::error::Error::parse(
                None,
                format!("bundled {name} digest {got} does not match pinned {want}"),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_intact() {
        verify().unwrap();
        let (t1, t2) = (table1(), table2());
        assert_eq!(t1.len(), SAMPLES);
        assert_eq!(t2.len(), SAMPLES);
        assert!(t1.iter().chain(&t2).all(|s| s.len() == SAMPLE_SIZE));
        assert_eq!(t1.iter().flatten().count(), 100);
        assert_eq!(t1[0], vec![3.7, 3.3, 4.9, 4.3]);
        assert_eq!(t2[0], vec![6.6, 4.5, 5.8, 6.5]);
        assert!(t1.iter().flatten().any(|&v| v == 0.98));
        assert!(t1.iter().flatten().any(|&v| v == 0.85));
    }

    #[test]
    fn shift_applies_from_index() {
        let s = table2_shifted(1.15, 10);
        let t = table2();
        assert_eq!(s[9], t[9]);
        assert!((s[10][0] - t[10][0] * 1.15).abs() < 1e-15);
    }
}

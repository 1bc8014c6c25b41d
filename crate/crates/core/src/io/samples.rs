//! Sample files: one sample per line, comma-separated positive decimals.
//!
//! Blank lines and lines whose first non-blank character is `#` are skipped.
//! The sample size is taken from the first data row and enforced after that.

use std::path::Path;

use crate::error::{Error, Result};

pub fn parse_samples(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut samples = Vec::new();
    let mut n = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut sample = Vec::new();
        for token in line.split(',') {
            let token = token.trim();
            let value: f64 = token
                .parse()
                .map_err(|_| Error::parse(Some(line_no), format!("`{token}` is not a number")))?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::parse(
                    Some(line_no),
                    format!("observations must be positive, got {token}"),
                ));
            }
            sample.push(value);
        }
        match n {
            None => n = Some(sample.len()),
            Some(n) if n != sample.len() => {
                return Err(Error::parse(
                    Some(line_no),
                    format!("expected {n} values per sample, got {}", sample.len()),
                ))
            }
            _ => {}
        }
        samples.push(sample);
    }
    Ok(samples)
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples(&text)
}

/// Writes samples in the same format `parse_samples` reads.
pub fn format_samples(samples: &[Vec<f64>], header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for s in samples {
        let row: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let s = parse_samples("# header\n 1.5 , 2\n\n3,4.25\n").unwrap();
        assert_eq!(s, vec![vec![1.5, 2.0], vec![3.0, 4.25]]);
    }

    #[test]
    fn errors_name_the_line() {
        for (text, line) in [("1,2\n3\n", 2), ("1,2\n3,x\n", 2), ("# c\n1,0\n", 2), ("1,-2\n", 1)] {
            match parse_samples(text) {
                Err(Error::Parse { line: Some(l), .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn format_round_trips() {
        let s = vec![vec![0.98, 2.1], vec![3.0, 0.85]];
        assert_eq!(parse_samples(&format_samples(&s, "x")).unwrap(), s);
    }
}

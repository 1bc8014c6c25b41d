//! Trace CSV: `index,phase,u_hat,lcl,ucl,signal,beta_bar`.
//!
//! Reals are written with 10 significant digits, so a parsed trace equals
//! the in-memory trace rounded to that precision and re-emits byte for byte.

use std::path::Path;

use crate::chart::{ChartPoint, PointPhase};
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "index,phase,u_hat,lcl,ucl,signal,beta_bar";

/// Formats `x` with 10 significant digits.
pub fn fmt_sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into an extra digit (9.9999999996 -> 10.000000000).
        let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        if digits.trim_start_matches('0').len() > 10 && decimals > 0 {
            let decimals = decimals - 1;
            return format!("{x:.decimals$}");
        }
        s
    } else {
        format!("{x:.9e}")
    }
}

pub fn format_trace(points: &[ChartPoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.index,
            p.phase.as_str(),
            fmt_sig10(p.u_hat),
            fmt_sig10(p.lcl),
            fmt_sig10(p.ucl),
            p.signal,
            fmt_sig10(p.beta_bar)
        ));
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<ChartPoint>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TRACE_HEADER => {}
        _ => return Err(Error::parse(Some(1), format!("trace header must be `{TRACE_HEADER}`"))),
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(Error::parse(Some(line_no), format!("expected 7 fields, got {}", fields.len())));
        }
        let real = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::parse(Some(line_no), format!("`{s}` is not a number")))
        };
        let phase = match fields[1] {
            "phase1" => PointPhase::Phase1,
            "phase2" => PointPhase::Phase2,
            other => return Err(Error::parse(Some(line_no), format!("unknown phase `{other}`"))),
        };
        let signal = match fields[5] {
            "true" => true,
            "false" => false,
            other => return Err(Error::parse(Some(line_no), format!("signal must be true/false, got `{other}`"))),
        };
        points.push(ChartPoint {
            index: fields[0]
                .parse()
                .map_err(|_| Error::parse(Some(line_no), format!("bad index `{}`", fields[0])))?,
            phase,
            u_hat: real(fields[2])?,
            lcl: real(fields[3])?,
            ucl: real(fields[4])?,
            signal,
            beta_bar: real(fields[6])?,
        });
    }
    Ok(points)
}

pub fn write_trace(points: &[ChartPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_trace(points)).map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<ChartPoint>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig10_examples() {
        assert_eq!(fmt_sig10(0.7054827286477544), "0.7054827286");
        assert_eq!(fmt_sig10(6.110), "6.110000000");
        assert_eq!(fmt_sig10(9.99999999996), "10.00000000");
        assert_eq!(fmt_sig10(1.5e-7), "1.500000000e-7");
    }

    #[test]
    fn bad_rows_are_located() {
        let text = format!("{TRACE_HEADER}\n1,phase1,0.7,0.5,1.0,false,6.1\n2,phase3,0.7,0.5,1.0,false,6.1\n");
        match parse_trace(&text) {
            Err(Error::Parse { line: Some(3), .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_trace("index,u\n").is_err());
    }

    proptest! {
        #[test]
        fn emit_parse_is_idempotent(u in 1e-3f64..1e3, l in 1e-3f64..1.0, w in 0.0f64..5.0, b in 0.5f64..20.0, sig: bool) {
            let p = ChartPoint { index: 7, phase: PointPhase::Phase2, u_hat: u, lcl: l, ucl: l + w, signal: sig, beta_bar: b };
            let text = format_trace(&[p]);
            let back = parse_trace(&text).unwrap();
            prop_assert_eq!(format_trace(&back), text);
            let q = back[0];
            prop_assert!((q.u_hat / u - 1.0).abs() <= 5e-10);
            prop_assert!((q.beta_bar / b - 1.0).abs() <= 5e-10);
            prop_assert_eq!(q.signal, sig);
        }
    }
}

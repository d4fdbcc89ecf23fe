use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A table row that can be written as CSV.
pub trait CsvRow {
    const HEADER: &'static str;
    fn fields(&self) -> Vec<String>;
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros removed.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_else(|| "nan".into())
}

pub fn render<T: CsvRow + Serialize>(rows: &[T], format: Format) -> io::Result<String> {
    match format {
        Format::Csv => {
            let mut s = String::with_capacity(64 * (rows.len() + 1));
            s.push_str(T::HEADER);
            s.push('\n');
            for row in rows {
                s.push_str(&row.fields().join(","));
                s.push('\n');
            }
            Ok(s)
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(io::Error::other)?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn write_output(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_g(0.4375), "0.4375");
        assert_eq!(fmt_g(7.503297215567727), "7.50329721557");
        assert_eq!(fmt_g(-2.0), "-2");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(1.5e-7), "1.5e-07");
        assert_eq!(fmt_g(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(f64::NAN), "nan");
        assert_eq!(fmt_g(7.0 * 0.01), "0.07");
    }
}

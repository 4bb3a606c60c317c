//! Output formatting and file/stdout plumbing.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Formats a float with 12 significant digits, '.' decimal separator,
/// trimming trailing zeros (the style of C's %.12g).
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        let s = format!("{:.11e}", x);
        match s.split_once('e') {
            Some((mantissa, exp)) => {
                let m = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{m}e{exp}")
            }
            None => s,
        }
    }
}

/// Writes `content` to `path`, or to stdout when no path is given.
/// Unwritable paths are I/O errors (exit code 3).
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            file.write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;

    #[test]
    fn formats_plain_values() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_f64(0.18), "0.18");
        assert_eq!(fmt_f64(1.125), "1.125");
        assert_eq!(fmt_f64(-0.245), "-0.245");
    }

    #[test]
    fn keeps_twelve_significant_digits() {
        assert_eq!(fmt_f64(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn rounds_near_integers_cleanly() {
        assert_eq!(fmt_f64(2.0000000000000004), "2");
        assert_eq!(fmt_f64(0.9999999999999998), "1");
    }

    #[test]
    fn tiny_and_huge_values_use_scientific_notation() {
        assert_eq!(fmt_f64(1.25e-9), "1.25e-9");
        assert_eq!(fmt_f64(3.0e15), "3e15");
    }
}

//! Complex polynomials, truncated power series and simultaneous root finding.

pub mod geometry;
mod poly;
mod roots;
mod series;

pub use num_complex::Complex64;
pub use poly::{ComplexPolynomial, PolyOp};
pub use roots::{find_roots, find_roots_of, find_roots_with, initial_guesses, RootEstimate, RootOptions};
pub use series::{radius_from_indices, radius_of_convergence, PowerSeries};

use crate::error::{Error, Result};

/// Returns `z` if both parts are finite.
pub fn finite(z: Complex64, context: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(context))
    }
}

/// Parses `"RE+IMi"`, `"RE-IMi"`, `"RE"` or `"IMi"`.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("cannot parse {text:?} as a complex number (expected RE+IMi)");
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let parse_im = |t: &str| -> std::result::Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im = parse_im(&body[k..])?;
            Ok(Complex64::new(re, im))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

/// Formats as `"RE+IMi"` with the given number of decimals.
pub fn format_complex(z: Complex64, decimals: usize) -> String {
    let im = format!("{:.*}", decimals, z.im.abs());
    let rounds_to_zero = im.bytes().all(|b| b == b'0' || b == b'.');
    let sign = if z.im < 0.0 && !rounds_to_zero { '-' } else { '+' };
    format!("{:.*}{sign}{im}i", decimals, z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_literals() {
        assert_eq!(parse_complex("3+0i").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("1-0.2i").unwrap(), Complex64::new(1.0, -0.2));
        assert_eq!(parse_complex("-1e-3+2e+1i").unwrap(), Complex64::new(-1e-3, 20.0));
        assert_eq!(parse_complex("-2.5").unwrap(), Complex64::new(-2.5, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        let z = Complex64::new(3.0, -0.25);
        assert_eq!(format_complex(z, 6), "3.000000-0.250000i");
        assert_eq!(format_complex(Complex64::new(3.0, -5e-16), 6), "3.000000+0.000000i");
        assert_eq!(parse_complex(&format_complex(z, 6)).unwrap(), z);
    }
}

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Poly;
use crate::error::{Error, Result};

type Rational = BigRational;

/// Parse `"3"`, `"-1.25"`, `"3/2"`, `"1e-3"` or `"2.5e2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => {
            let e: i64 = s[p + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?;
            (&s[..p], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("not a number: '{s}'")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: '{s}'")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Parse(format!("not a number: '{s}'")))?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Textual description of an exact real: a rational or an isolated polynomial root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealSpec {
    Rational(Rational),
    Root { poly: Poly, lo: Rational, hi: Rational },
}

impl RealSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("root:") {
            let (poly, interval) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("expected root:<poly>:[lo,hi], got '{s}'")))?;
            let poly = Poly::parse(poly).map_err(Error::Parse)?;
            let inner = interval
                .trim()
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected [lo,hi] in '{s}'")))?;
            let (lo, hi) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("expected [lo,hi] in '{s}'")))?;
            let lo = parse_rational(lo)?;
            let hi = parse_rational(hi)?;
            if lo >= hi {
                return Err(Error::Parse(format!("empty isolating interval in '{s}'")));
            }
            return Ok(RealSpec::Root { poly, lo, hi });
        }
        match s {
            "phi" | "golden" => Ok(RealSpec::Root {
                poly: Poly::from_ints(&[-1, -1, 1]),
                lo: Rational::one(),
                hi: Rational::from_integer(BigInt::from(2)),
            }),
            _ => parse_rational(s).map(RealSpec::Rational),
        }
    }
}

impl FromStr for RealSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RealSpec::parse(s)
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational(q) => write!(f, "{q}"),
            RealSpec::Root { poly, lo, hi } => write!(f, "root:{poly}:[{lo},{hi}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_forms() {
        assert_eq!(parse_rational("1.5").unwrap(), q(3, 2));
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5e2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn root_form() {
        let r = RealSpec::parse("root:z^2-z-1:[1.6,1.7]").unwrap();
        match &r {
            RealSpec::Root { poly, lo, hi } => {
                assert_eq!(poly, &Poly::from_ints(&[-1, -1, 1]));
                assert_eq!(lo, &q(8, 5));
                assert_eq!(hi, &q(17, 10));
            }
            _ => panic!("expected root"),
        }
        assert_eq!(RealSpec::parse(&r.to_string()).unwrap(), r);
        assert!(RealSpec::parse("root:z^2-z-1:[1.7,1.6]").is_err());
        assert!(RealSpec::parse("root:z^2-z-1").is_err());
    }
}

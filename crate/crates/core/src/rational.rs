//! Exact rational scalars shared by the set geometry and the step-function core.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d`; panics on a zero denominator.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact dyadic value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn pow2(k: u32) -> Rational {
    Rational::from_integer(BigInt::one() << k as usize)
}

/// Always `p/q`, even for integers.
pub fn fmt_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Parses `p`, `p/q`, or a finite decimal like `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let t = s.trim();
    let lead = s.len() - s.trim_start().len();
    if t.is_empty() {
        return Err(ParseError::at(lead + 1, "expected a rational number"));
    }
    if let Some((p, q)) = t.split_once('/') {
        let num = parse_integer(p.trim(), lead + 1)?;
        let den = parse_integer(q.trim(), lead + p.len() + 2)?;
        if den.is_zero() {
            return Err(ParseError::at(lead + p.len() + 2, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::at(
                lead + whole.len() + 2,
                "expected decimal digits after '.'",
            ));
        }
        let w = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_integer(whole_digits, lead + 1)?
        };
        let f: BigInt = frac.parse().map_err(|_| {
            ParseError::at(lead + whole.len() + 2, "invalid decimal fraction")
        })?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w * &scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    Ok(Rational::from_integer(parse_integer(t, lead + 1)?))
}

fn parse_integer(s: &str, column: usize) -> Result<BigInt, ParseError> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::at(column, format!("invalid integer '{s}'")));
    }
    s.parse()
        .map_err(|_| ParseError::at(column, format!("invalid integer '{s}'")))
}

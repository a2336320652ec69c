//! Inline textual notation for intervals, quaders and step values.
//!
//! ```text
//! interval  := "empty" | lbrack bound "," bound rbrack
//! lbrack    := "[" (closed) | "]" (open)
//! rbrack    := "]" (closed) | "[" (open)
//! bound     := "-inf" | "inf" | rational          (infinite ends must be open)
//! quader    := interval ("x" interval)* | "empty^" n
//! value     := rational | rational ("+"|"-") rational " i" | rational " i"
//! rational  := p | p "/" q | decimal
//! ```
//!
//! Columns in [`ParseError`] are 1-based character offsets into the input.

use num_traits::Zero;

use crate::error::ParseError;
use crate::geometry::{Endpoint, Interval, Quader};
use crate::rational::{parse_rational, Rational};
use crate::stepfn::StepValue;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.column(), msg)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.src.len()
    }

    /// Reads a bound token up to the next `,`, bracket or whitespace.
    fn token(&mut self) -> (usize, &'a str) {
        let start = self.pos;
        let col = self.column();
        while let Some(c) = self.peek() {
            if c == ',' || c == '[' || c == ']' || c.is_whitespace() {
                break;
            }
            self.bump();
        }
        (col, &self.src[start..self.pos])
    }
}

enum Bound {
    NegInf,
    PosInf,
    Value(Rational),
}

fn parse_bound(c: &mut Cursor<'_>) -> Result<Bound, ParseError> {
    c.skip_ws();
    let (col, tok) = c.token();
    match tok {
        "-inf" => Ok(Bound::NegInf),
        "inf" | "+inf" => Ok(Bound::PosInf),
        "" => Err(ParseError::at(col, "expected an endpoint")),
        _ => parse_rational(tok)
            .map(Bound::Value)
            .map_err(|e| ParseError::at(col + e.column - 1, e.message)),
    }
}

fn interval_at(c: &mut Cursor<'_>) -> Result<Interval, ParseError> {
    c.skip_ws();
    if c.eat("empty") {
        return Ok(Interval::EMPTY);
    }
    let lower_closed = match c.bump() {
        Some('[') => true,
        Some(']') => false,
        _ => return Err(ParseError::at(c.column().saturating_sub(1).max(1), "expected '[' or ']'")),
    };
    let lower_col = c.column();
    let lower = match parse_bound(c)? {
        Bound::NegInf if lower_closed => {
            return Err(ParseError::at(lower_col, "infinite endpoints are never closed"))
        }
        Bound::NegInf => Endpoint::NegInfinity,
        Bound::PosInf => return Err(ParseError::at(lower_col, "lower endpoint cannot be +inf")),
        Bound::Value(v) => Endpoint::Finite {
            value: v,
            closed: lower_closed,
        },
    };
    c.skip_ws();
    if !c.eat(",") {
        return Err(c.err("expected ','"));
    }
    c.skip_ws();
    let upper_col = c.column();
    let upper = parse_bound(c)?;
    c.skip_ws();
    let upper_closed = match c.bump() {
        Some(']') => true,
        Some('[') => false,
        _ => return Err(ParseError::at(c.column().saturating_sub(1).max(1), "expected ']' or '['")),
    };
    let upper = match upper {
        Bound::PosInf if upper_closed => {
            return Err(ParseError::at(upper_col, "infinite endpoints are never closed"))
        }
        Bound::PosInf => Endpoint::PosInfinity,
        Bound::NegInf => return Err(ParseError::at(upper_col, "upper endpoint cannot be -inf")),
        Bound::Value(v) => Endpoint::Finite {
            value: v,
            closed: upper_closed,
        },
    };
    Ok(Interval::new(lower, upper))
}

pub fn parse_interval(s: &str) -> Result<Interval, ParseError> {
    let mut c = Cursor::new(s);
    let i = interval_at(&mut c)?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.err("trailing input after interval"));
    }
    Ok(i)
}

pub fn parse_quader(s: &str) -> Result<Quader, ParseError> {
    let mut c = Cursor::new(s);
    c.skip_ws();
    if c.eat("empty^") {
        let col = c.column();
        let n: usize = c
            .rest()
            .trim()
            .parse()
            .map_err(|_| ParseError::at(col, "expected a dimension after 'empty^'"))?;
        if n == 0 || n > 4096 {
            return Err(ParseError::at(col, "dimension out of range"));
        }
        return Ok(Quader::empty(n));
    }
    let mut factors = vec![interval_at(&mut c)?];
    loop {
        c.skip_ws();
        if c.at_end() {
            break;
        }
        if !(c.eat("x") || c.eat("×")) {
            return Err(c.err("expected 'x' between intervals"));
        }
        factors.push(interval_at(&mut c)?);
    }
    Ok(Quader::new(factors).expect("at least one factor"))
}

/// Parses a point `(x_1, …, x_n)`; the parentheses are optional.
pub fn parse_point(s: &str) -> Result<Vec<Rational>, ParseError> {
    let t = s.trim();
    let lead = s.len() - s.trim_start().len();
    let (body, offset) = match t.strip_prefix('(') {
        Some(rest) => match rest.strip_suffix(')') {
            Some(b) => (b, lead + 1),
            None => return Err(ParseError::at(s.chars().count().max(1), "expected ')'")),
        },
        None => (t, lead),
    };
    let mut out = Vec::new();
    let mut col = offset + 1;
    for part in body.split(',') {
        out.push(parse_rational(part).map_err(|e| ParseError::at(col + e.column - 1, e.message))?);
        col += part.chars().count() + 1;
    }
    Ok(out)
}

pub fn parse_value(s: &str) -> Result<StepValue, ParseError> {
    let t = s.trim_end();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(StepValue::real(parse_rational(s)?));
    };
    // Split at the last sign that is neither leading nor part of a denominator.
    let bytes = body.as_bytes();
    let mut split = None;
    for (i, &b) in bytes.iter().enumerate().rev() {
        if (b == b'+' || b == b'-') && i > 0 {
            let prev = body[..i].trim_end();
            if !prev.is_empty() && !prev.ends_with('/') {
                split = Some(i);
                break;
            }
        }
    }
    let imag_of = |txt: &str, col: usize| -> Result<Rational, ParseError> {
        let trimmed = txt.trim();
        match trimmed {
            "" | "+" => Ok(Rational::from_integer(1.into())),
            "-" => Ok(Rational::from_integer((-1).into())),
            _ => parse_rational(txt).map_err(|e| ParseError::at(col + e.column - 1, e.message)),
        }
    };
    match split {
        Some(i) => {
            let re = parse_rational(&body[..i])?;
            let sign_neg = bytes[i] == b'-';
            let mut im = imag_of(&body[i + 1..], body[..i + 1].chars().count() + 1)?;
            if sign_neg {
                im = -im;
            }
            Ok(StepValue::new(re, im))
        }
        None => {
            let im = imag_of(body, 1)?;
            Ok(StepValue::new(Rational::zero(), im))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn interval_notations() {
        assert_eq!(
            parse_interval("[0,2]").unwrap(),
            Interval::closed(int(0), int(2))
        );
        assert_eq!(
            parse_interval(" ]1/2 , 3[ ").unwrap(),
            Interval::open(ratio(1, 2), int(3))
        );
        assert_eq!(
            parse_interval("]-inf,0]").unwrap(),
            Interval::new(Endpoint::NegInfinity, Endpoint::closed(int(0)))
        );
        assert_eq!(parse_interval("empty").unwrap(), Interval::EMPTY);
        assert_eq!(parse_interval("]1,1[").unwrap(), Interval::EMPTY);
    }

    #[test]
    fn interval_errors_carry_columns() {
        let e = parse_interval("[-inf,0]").unwrap_err();
        assert_eq!(e.column, 2);
        let e = parse_interval("[0;1]").unwrap_err();
        assert_eq!(e.column, 2);
        let e = parse_interval("[0,1/0]").unwrap_err();
        assert!(e.message.contains("zero denominator"));
        assert!(parse_interval("[0,1] junk").is_err());
        assert!(parse_interval("[0,inf]").is_err());
    }

    #[test]
    fn quader_round_trip() {
        for s in ["[0,1]x]2,3[", "]-inf,inf[", "[1/2,1/2]x[0,1]x]0,1]", "empty^3"] {
            let q = parse_quader(s).unwrap();
            assert_eq!(q.to_string(), s);
            assert_eq!(parse_quader(&q.to_string()).unwrap(), q);
        }
    }

    #[test]
    fn value_notations() {
        assert_eq!(parse_value("3").unwrap(), StepValue::real(int(3)));
        assert_eq!(
            parse_value("1/2-3/4 i").unwrap(),
            StepValue::new(ratio(1, 2), ratio(-3, 4))
        );
        assert_eq!(
            parse_value("-2/1+0/1 i").unwrap(),
            StepValue::real(int(-2))
        );
        assert_eq!(parse_value("i").unwrap(), StepValue::new(int(0), int(1)));
        assert_eq!(parse_value("-i").unwrap(), StepValue::new(int(0), int(-1)));
        assert_eq!(
            parse_value("1/-2+1 i").unwrap(),
            StepValue::new(ratio(-1, 2), int(1))
        );
        let v = StepValue::new(ratio(-1, 3), ratio(5, 2));
        assert_eq!(parse_value(&v.to_string()).unwrap(), v);
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("(0, 1/2)").unwrap(), vec![int(0), ratio(1, 2)]);
        assert_eq!(parse_point("3").unwrap(), vec![int(3)]);
        assert!(parse_point("(1,").is_err());
    }
}

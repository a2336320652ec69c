//! `L^p` seminorms of step functions and the classical inequalities as
//! slack computations.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::integrate::Compensated;
use crate::measures::BoxMeasure;
use crate::rational::{to_f64, Rational};
use crate::stepfn::StepFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PExponent {
    Finite(Rational),
    Infinity,
}

impl PExponent {
    pub fn finite(p: Rational) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::Exponent(format!("p must be positive, got {p}")));
        }
        Ok(PExponent::Finite(p))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            PExponent::Finite(p) => to_f64(p),
            PExponent::Infinity => f64::INFINITY,
        }
    }

    /// `p ≥ 1` (including `∞`).
    pub fn at_least_one(&self) -> bool {
        match self {
            PExponent::Finite(p) => p >= &Rational::one(),
            PExponent::Infinity => true,
        }
    }

    /// The Hölder conjugate `q` with `1/p + 1/q = 1`, for `p ≥ 1`.
    pub fn conjugate(&self) -> Option<PExponent> {
        match self {
            PExponent::Infinity => Some(PExponent::Finite(Rational::one())),
            PExponent::Finite(p) if p.is_one() => Some(PExponent::Infinity),
            PExponent::Finite(p) if p > &Rational::one() => {
                Some(PExponent::Finite(p / (p - Rational::one())))
            }
            PExponent::Finite(_) => None,
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

/// `Σ |α_i|^p φ(Q_i)`, exact or rounded.
#[derive(Clone, Debug, PartialEq)]
pub enum PowSum {
    Exact(Rational),
    Float(f64),
}

impl PowSum {
    pub fn to_f64(&self) -> f64 {
        match self {
            PowSum::Exact(r) => to_f64(r),
            PowSum::Float(x) => *x,
        }
    }
}

/// `∫ |t|^p dφ`; exact for positive integer `p` on real `t` and for even
/// integer `p` on complex `t`.
pub fn lp_pow_sum(t: &StepFunction, p: &Rational, m: &BoxMeasure) -> Result<PowSum> {
    if !p.is_positive() {
        return Err(Error::Exponent(format!("p must be positive, got {p}")));
    }
    let weights = t
        .terms()
        .iter()
        .map(|(q, v)| m.eval_quader(q).map(|w| (w, v)))
        .collect::<Result<Vec<_>>>()?;
    let int_p = p.is_integer().then(|| p.to_integer().to_usize()).flatten();
    match int_p {
        Some(k) if t.is_real() => Ok(PowSum::Exact(
            weights
                .iter()
                .map(|(w, v)| num_traits::pow(v.re.abs(), k) * w)
                .sum(),
        )),
        Some(k) if k % 2 == 0 => Ok(PowSum::Exact(
            weights
                .iter()
                .map(|(w, v)| num_traits::pow(v.norm_sqr(), k / 2) * w)
                .sum(),
        )),
        _ => {
            let pf = to_f64(p);
            let mut acc = Compensated::default();
            for (w, v) in &weights {
                acc.add(v.abs_f64().powf(pf) * to_f64(w));
            }
            Ok(PowSum::Float(acc.value()))
        }
    }
}

/// `‖t‖_p`, with the essential supremum over terms of positive measure for
/// `p = ∞`.
pub fn lp_norm(t: &StepFunction, p: &PExponent, m: &BoxMeasure) -> Result<f64> {
    match p {
        PExponent::Finite(p) => {
            let s = lp_pow_sum(t, p, m)?.to_f64();
            Ok(if p.is_one() { s } else { s.powf(1.0 / to_f64(p)) })
        }
        PExponent::Infinity => {
            let mut sup: f64 = 0.0;
            for (q, v) in t.terms() {
                if !m.eval_quader(q)?.is_zero() {
                    sup = sup.max(v.abs_f64());
                }
            }
            Ok(sup)
        }
    }
}

/// `(Σ |x_i|^p)^{1/p}` or `max |x_i|` for a finite sequence.
pub fn seq_norm(x: &[f64], p: &PExponent) -> f64 {
    match p {
        PExponent::Infinity => x.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        PExponent::Finite(p) => {
            let pf = to_f64(p);
            let mut acc = Compensated::default();
            for v in x {
                acc.add(v.abs().powf(pf));
            }
            acc.value().powf(1.0 / pf)
        }
    }
}

/// Both sides of an inequality `lhs ≤ rhs` (or `lhs ≥ rhs` for the reverse
/// forms) and the slack, which is non-negative when the inequality holds.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl InequalityCheck {
    fn upper(name: &'static str, lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            name,
            lhs,
            rhs,
            slack: rhs - lhs,
        }
    }

    fn lower(name: &'static str, lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            name,
            lhs,
            rhs,
            slack: lhs - rhs,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.slack >= -tol
    }
}

/// `‖fg‖_1 ≤ ‖f‖_p ‖g‖_q` for conjugate exponents.
pub fn check_hoelder(
    f: &StepFunction,
    g: &StepFunction,
    p: &PExponent,
    q: &PExponent,
    m: &BoxMeasure,
) -> Result<InequalityCheck> {
    if p.conjugate().as_ref() != Some(q) {
        return Err(Error::Exponent(format!("{p} and {q} are not conjugate")));
    }
    let one = PExponent::Finite(Rational::one());
    let lhs = lp_norm(&f.mul(g)?, &one, m)?;
    Ok(InequalityCheck::upper(
        "hoelder",
        lhs,
        lp_norm(f, p, m)? * lp_norm(g, q, m)?,
    ))
}

/// `‖f + g‖_p ≤ ‖f‖_p + ‖g‖_p` for `p ≥ 1`.
pub fn check_minkowski(
    f: &StepFunction,
    g: &StepFunction,
    p: &PExponent,
    m: &BoxMeasure,
) -> Result<InequalityCheck> {
    if !p.at_least_one() {
        return Err(Error::Exponent(format!(
            "the triangle inequality needs p >= 1, got {p}"
        )));
    }
    Ok(InequalityCheck::upper(
        "minkowski",
        lp_norm(&f.add(g)?, p, m)?,
        lp_norm(f, p, m)? + lp_norm(g, p, m)?,
    ))
}

/// `‖x‖_{p̃} ≤ ‖x‖_p` for `p ≤ p̃` on a finite sequence.
pub fn check_jensen(x: &[f64], p: &PExponent, p_tilde: &PExponent) -> Result<InequalityCheck> {
    if p.to_f64() > p_tilde.to_f64() {
        return Err(Error::Exponent(format!("need p <= p~, got {p} > {p_tilde}")));
    }
    Ok(InequalityCheck::upper(
        "jensen",
        seq_norm(x, p_tilde),
        seq_norm(x, p),
    ))
}

/// Clarkson's inequalities: for `p ≥ 2`
/// `‖f+g‖^p + ‖f−g‖^p ≤ 2^{p−1}(‖f‖^p + ‖g‖^p)`, for `1 < p < 2` with
/// `q = p/(p−1)`: `‖f+g‖^q + ‖f−g‖^q ≤ 2(‖f‖^p + ‖g‖^p)^{q−1}`.
pub fn check_clarkson(
    f: &StepFunction,
    g: &StepFunction,
    p: &Rational,
    m: &BoxMeasure,
) -> Result<InequalityCheck> {
    let two = Rational::from_integer(2.into());
    if p <= &Rational::one() {
        return Err(Error::Exponent(format!("Clarkson needs p > 1, got {p}")));
    }
    let pe = PExponent::Finite(p.clone());
    let sum = lp_norm(&f.add(g)?, &pe, m)?;
    let diff = lp_norm(&f.sub(g)?, &pe, m)?;
    let nf = lp_norm(f, &pe, m)?;
    let ng = lp_norm(g, &pe, m)?;
    let pf = to_f64(p);
    if p >= &two {
        Ok(InequalityCheck::upper(
            "clarkson-i",
            sum.powf(pf) + diff.powf(pf),
            2f64.powf(pf - 1.0) * (nf.powf(pf) + ng.powf(pf)),
        ))
    } else {
        let q = to_f64(&(p / (p - Rational::one())));
        Ok(InequalityCheck::upper(
            "clarkson-ii",
            sum.powf(q) + diff.powf(q),
            2.0 * (nf.powf(pf) + ng.powf(pf)).powf(q - 1.0),
        ))
    }
}

fn check_open_unit(p: &Rational, closed_right: bool) -> Result<()> {
    let ok = p.is_positive()
        && if closed_right {
            p <= &Rational::one()
        } else {
            p < &Rational::one()
        };
    if ok {
        Ok(())
    } else {
        let range = if closed_right { "]0,1]" } else { "]0,1[" };
        Err(Error::Exponent(format!("p must lie in {range}, got {p}")))
    }
}

/// `‖f + g‖_p ≥ ‖f‖_p + ‖g‖_p` for `p ∈ ]0,1[` and `f, g ≥ 0`.
pub fn check_reverse_minkowski(
    f: &StepFunction,
    g: &StepFunction,
    p: &Rational,
    m: &BoxMeasure,
) -> Result<InequalityCheck> {
    check_open_unit(p, false)?;
    for t in [f, g] {
        if !t.is_real() {
            return Err(Error::ComplexValue);
        }
        if t.terms().iter().any(|(_, v)| v.re.is_negative()) {
            return Err(Error::Exponent(
                "reverse Minkowski needs non-negative functions".into(),
            ));
        }
    }
    let pe = PExponent::Finite(p.clone());
    Ok(InequalityCheck::lower(
        "reverse-minkowski",
        lp_norm(&f.add(g)?, &pe, m)?,
        lp_norm(f, &pe, m)? + lp_norm(g, &pe, m)?,
    ))
}

/// `‖f + g‖_p ≤ 2^{1/p − 1}(‖f‖_p + ‖g‖_p)` for `p ∈ ]0,1]`.
pub fn check_quasi_triangle(
    f: &StepFunction,
    g: &StepFunction,
    p: &Rational,
    m: &BoxMeasure,
) -> Result<InequalityCheck> {
    check_open_unit(p, true)?;
    let pe = PExponent::Finite(p.clone());
    let c = 2f64.powf(1.0 / to_f64(p) - 1.0);
    Ok(InequalityCheck::upper(
        "quasi-triangle",
        lp_norm(&f.add(g)?, &pe, m)?,
        c * (lp_norm(f, &pe, m)? + lp_norm(g, &pe, m)?),
    ))
}

//! Univariate polynomials with exact rational coefficients.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{from_f64, to_f64, Rational};

/// `Σ c_k t^k`, coefficients stored from the constant term upwards with no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// `t^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Rational::zero(); k + 1];
        c[k] = Rational::one();
        Polynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + to_f64(c))
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, r: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = vec![Rational::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / Rational::from_integer((k + 1).into())),
        );
        Polynomial::new(out)
    }

    /// `∫_a^b p(t) dt`
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let big = self.antiderivative();
        big.eval(b) - big.eval(a)
    }

    /// Euclidean division `self = q·d + r`.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, c) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &factor * c;
            }
            quot[k] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Sturm chain `p, p', -rem(p, p'), …`.
    pub fn sturm_chain(&self) -> Vec<Polynomial> {
        let mut chain = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return chain;
        }
        chain.push(self.derivative());
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-Rational::one()));
        }
        chain
    }
}

fn sign_changes(chain: &[Polynomial], t: &Rational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in chain {
        let v = p.eval(t);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Float bounds `lo ≤ min p|_[a,b]`, `hi ≥ max p|_[a,b]` for a polynomial.
///
/// The real roots of `p'` are isolated once, by Sturm bisection, either
/// exactly (when a bisection point hits one) or to a bracket narrower than
/// `2^-64`. Between critical points `p` is monotone, so the range over
/// `[a, b]` is spanned by `p(a)`, `p(b)` and the values at critical points
/// inside; a bracketed critical value is enclosed by the mean-value form.
#[derive(Clone, Debug)]
pub struct PolyBounder {
    poly: Polynomial,
    deriv: Polynomial,
    critical: Vec<Critical>,
}

#[derive(Clone, Debug)]
enum Critical {
    Exact(Rational),
    /// Exactly one root of `p'` in the open interval, none at its ends.
    Bracket(Rational, Rational),
}

const ISOLATION_BITS: u32 = 64;

impl PolyBounder {
    pub fn new(poly: Polynomial) -> Self {
        let deriv = poly.derivative();
        let critical = isolate_roots(&deriv);
        PolyBounder {
            poly,
            deriv,
            critical,
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    /// Exact rational enclosure of the range on `[a, b]`.
    pub fn exact_range(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let (pa, pb) = (self.poly.eval(a), self.poly.eval(b));
        let (mut lo, mut hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
        for c in &self.critical {
            let (l, h) = match c {
                Critical::Exact(r) if a < r && r < b => {
                    let v = self.poly.eval(r);
                    (v.clone(), v)
                }
                Critical::Bracket(l, r) if l < b && r > a => {
                    let l = if l > a { l } else { a };
                    let r = if r < b { r } else { b };
                    self.mean_value(l, r)
                }
                _ => continue,
            };
            if l < lo {
                lo = l;
            }
            if h > hi {
                hi = h;
            }
        }
        (lo, hi)
    }

    pub fn bounds(&self, a: &Rational, b: &Rational) -> (f64, f64) {
        let (lo, hi) = self.exact_range(a, b);
        (round_down(&lo), round_up(&hi))
    }

    /// `p(c) ± max|p'|·(r−l)/2` on `[l, r]` with midpoint `c`.
    fn mean_value(&self, l: &Rational, r: &Rational) -> (Rational, Rational) {
        let two = Rational::from_integer(2.into());
        let c = (l + r) / &two;
        let (dl, dh) = horner_enclosure(&self.deriv, l, r);
        let slope = dl.abs().max(dh.abs());
        let spread = slope * (r - l) / two;
        let v = self.poly.eval(&c);
        (&v - &spread, v + spread)
    }
}

/// Distinct real roots of `d`, in increasing order.
fn isolate_roots(d: &Polynomial) -> Vec<Critical> {
    let Some(n) = d.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    let chain = d.sturm_chain();
    let lead = d.coeffs[n].abs();
    let bound = Rational::one()
        + d.coeffs[..n]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
    let width = Rational::one() / crate::rational::pow2(ISOLATION_BITS);
    let mut out = Vec::new();
    let count = |a: &Rational, b: &Rational| sign_changes(&chain, a) - sign_changes(&chain, b);
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let k = count(&a, &b);
        if k == 0 {
            continue;
        }
        if k == 1 && &b - &a <= width {
            out.push(Critical::Bracket(a, b));
            continue;
        }
        let mid = (&a + &b) / Rational::from_integer(2.into());
        if d.eval(&mid).is_zero() {
            out.push(Critical::Exact(mid.clone()));
            // shrink a gap around the root until it holds no other root
            let mut delta = (&b - &a) / Rational::from_integer(4.into());
            loop {
                let (l, r) = (&mid - &delta, &mid + &delta);
                if !d.eval(&l).is_zero() && !d.eval(&r).is_zero() && count(&l, &r) == 1 {
                    stack.push((r, b));
                    stack.push((a, l));
                    break;
                }
                delta /= Rational::from_integer(2.into());
            }
        } else {
            stack.push((mid.clone(), b));
            stack.push((a, mid));
        }
    }
    out.sort_by(|x, y| key(x).cmp(key(y)));
    out
}

fn key(c: &Critical) -> &Rational {
    match c {
        Critical::Exact(r) | Critical::Bracket(r, _) => r,
    }
}

fn horner_enclosure(p: &Polynomial, a: &Rational, b: &Rational) -> (Rational, Rational) {
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for c in p.coeffs.iter().rev() {
        let prods = [&lo * a, &lo * b, &hi * a, &hi * b];
        let mn = prods.iter().min().unwrap().clone();
        let mx = prods.iter().max().unwrap().clone();
        lo = mn + c;
        hi = mx + c;
    }
    (lo, hi)
}

/// Largest float not above `r`.
pub fn round_down(r: &Rational) -> f64 {
    let f = to_f64(r);
    match from_f64(f) {
        Some(x) if &x > r => f.next_down(),
        _ => f,
    }
}

/// Smallest float not below `r`.
pub fn round_up(r: &Rational) -> f64 {
    let f = to_f64(r);
    match from_f64(f) {
        Some(x) if &x < r => f.next_up(),
        _ => f,
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

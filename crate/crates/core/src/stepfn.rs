//! Step functions `T = Σ α_i χ_{Q_i}` over an ambient interval and their
//! exact integral `Σ α_i φ(Q_i)`.
//!
//! Terms are kept pairwise disjoint, bounded and inside the ambient interval;
//! zero values and empty quaders are pruned after every operation. The term
//! list is not canonical: two step functions may be equal as functions while
//! having different representations.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{common_refinement, first_overlap, Parkettable, Quader};
use crate::measures::{fmt_point, BoxMeasure};
use crate::rational::{fmt_pq, to_f64, Rational};

/// Complex rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct StepValue {
    pub re: Rational,
    pub im: Rational,
}

impl StepValue {
    pub fn new(re: Rational, im: Rational) -> Self {
        StepValue { re, im }
    }

    pub fn real(re: Rational) -> Self {
        StepValue {
            re,
            im: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        StepValue::default()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        StepValue::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs_f64(&self) -> f64 {
        to_f64(&self.re).hypot(to_f64(&self.im))
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        StepValue::new(&self.re * r, &self.im * r)
    }

    /// `self / r` for a non-zero rational.
    pub fn div_real(&self, r: &Rational) -> Self {
        StepValue::new(&self.re / r, &self.im / r)
    }
}

impl From<Rational> for StepValue {
    fn from(r: Rational) -> Self {
        StepValue::real(r)
    }
}

impl Add for &StepValue {
    type Output = StepValue;
    fn add(self, o: &StepValue) -> StepValue {
        StepValue::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &StepValue {
    type Output = StepValue;
    fn sub(self, o: &StepValue) -> StepValue {
        StepValue::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &StepValue {
    type Output = StepValue;
    fn mul(self, o: &StepValue) -> StepValue {
        StepValue::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &StepValue {
    type Output = StepValue;
    fn neg(self) -> StepValue {
        StepValue::new(-self.re.clone(), -self.im.clone())
    }
}

impl std::iter::Sum for StepValue {
    fn sum<I: Iterator<Item = StepValue>>(iter: I) -> Self {
        iter.fold(StepValue::zero(), |acc, v| &acc + &v)
    }
}

impl fmt::Display for StepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", fmt_pq(&self.re), sign, fmt_pq(&self.im.abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    ambient: Quader,
    terms: Vec<(Quader, StepValue)>,
}

impl StepFunction {
    /// Validates the term list against the ambient interval.
    pub fn new(ambient: Quader, terms: Vec<(Quader, StepValue)>) -> Result<Self> {
        if ambient.is_empty() {
            return Err(Error::EmptyDomain);
        }
        for (q, _) in &terms {
            q.check_dim(ambient.dim())?;
            if !q.is_bounded() {
                return Err(Error::Unbounded(q.to_string()));
            }
            if !q.is_subset(&ambient) {
                return Err(Error::NotContained {
                    inner: q.to_string(),
                    outer: ambient.to_string(),
                });
            }
        }
        let terms: Vec<_> = terms
            .into_iter()
            .filter(|(q, v)| !q.is_empty() && !v.is_zero())
            .collect();
        let quaders: Vec<&Quader> = terms.iter().map(|(q, _)| q).collect();
        if let Some((i, j)) = first_overlap(&quaders) {
            return Err(Error::NotDisjoint(quaders[i].to_string(), quaders[j].to_string()));
        }
        Ok(StepFunction { ambient, terms })
    }

    /// Skips validation; `terms` must be disjoint, bounded and inside `ambient`.
    pub(crate) fn from_parts(ambient: Quader, terms: Vec<(Quader, StepValue)>) -> Self {
        StepFunction {
            ambient,
            terms: terms
                .into_iter()
                .filter(|(q, v)| !q.is_empty() && !v.is_zero())
                .collect(),
        }
    }

    pub fn zero(ambient: Quader) -> Self {
        StepFunction {
            ambient,
            terms: Vec::new(),
        }
    }

    /// `χ_q` on `ambient`.
    pub fn indicator(q: &Quader, ambient: &Quader) -> Result<Self> {
        StepFunction::new(
            ambient.clone(),
            vec![(q.clone(), StepValue::real(Rational::from_integer(1.into())))],
        )
    }

    pub fn ambient(&self) -> &Quader {
        &self.ambient
    }

    pub fn terms(&self) -> &[(Quader, StepValue)] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, v)| v.is_real())
    }

    /// Union of the term quaders.
    pub fn support(&self) -> Parkettable {
        Parkettable::new(self.dim(), self.terms.iter().map(|(q, _)| q.clone()).collect())
            .expect("terms are disjoint and bounded")
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<StepValue> {
        if !self.ambient.contains_point(x) {
            return Err(Error::OutsideAmbient {
                point: fmt_point(x),
                ambient: self.ambient.to_string(),
            });
        }
        Ok(self
            .terms
            .iter()
            .find(|(q, _)| q.contains_point(x))
            .map(|(_, v)| v.clone())
            .unwrap_or_default())
    }

    fn check_ambient(&self, other: &StepFunction) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch(
                self.ambient.to_string(),
                other.ambient.to_string(),
            ))
        }
    }

    /// Applies `op` pointwise on a common refinement of all term quaders.
    /// Requires `op(0, …, 0) = 0`, since the region outside every support is
    /// never materialized.
    pub fn combine<F>(fs: &[&StepFunction], op: F) -> Result<StepFunction>
    where
        F: Fn(&[StepValue]) -> Result<StepValue>,
    {
        let first = fs
            .first()
            .ok_or_else(|| Error::InvalidArgument("no step functions to combine".into()))?;
        for f in &fs[1..] {
            first.check_ambient(f)?;
        }
        let families: Vec<Vec<Quader>> = fs
            .iter()
            .map(|f| f.terms.iter().map(|(q, _)| q.clone()).collect())
            .collect();
        let refinement = common_refinement(first.dim(), &families)?;
        let mut values = vec![vec![StepValue::zero(); fs.len()]; refinement.pieces.pieces().len()];
        for (fi, certs) in refinement.certificates.iter().enumerate() {
            for (ti, cells) in certs.iter().enumerate() {
                for &c in cells {
                    values[c][fi] = fs[fi].terms[ti].1.clone();
                }
            }
        }
        let mut terms = Vec::with_capacity(values.len());
        for (q, args) in refinement.pieces.into_pieces().into_iter().zip(values) {
            terms.push((q, op(&args)?));
        }
        Ok(StepFunction::from_parts(first.ambient.clone(), terms))
    }

    /// Re-expresses the function on a common refinement of its terms with
    /// `other`'s; the function itself is unchanged.
    pub fn refine_with(&self, other: &[Quader]) -> Result<StepFunction> {
        let mut families = vec![self.terms.iter().map(|(q, _)| q.clone()).collect::<Vec<_>>()];
        families.push(
            other
                .iter()
                .map(|q| q.intersect(&self.ambient))
                .collect::<Result<Vec<_>>>()?,
        );
        let r = common_refinement(self.dim(), &families)?;
        let mut terms = Vec::new();
        for (ti, cells) in r.certificates[0].iter().enumerate() {
            for &c in cells {
                terms.push((r.pieces.pieces()[c].clone(), self.terms[ti].1.clone()));
            }
        }
        Ok(StepFunction::from_parts(self.ambient.clone(), terms))
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        StepFunction::combine(&[self, other], |v| Ok(&v[0] + &v[1]))
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        StepFunction::combine(&[self, other], |v| Ok(&v[0] - &v[1]))
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        StepFunction::combine(&[self, other], |v| Ok(&v[0] * &v[1]))
    }

    pub fn scale(&self, lambda: &StepValue) -> StepFunction {
        StepFunction::from_parts(
            self.ambient.clone(),
            self.terms
                .iter()
                .map(|(q, v)| (q.clone(), lambda * v))
                .collect(),
        )
    }

    pub fn conj(&self) -> StepFunction {
        StepFunction::from_parts(
            self.ambient.clone(),
            self.terms.iter().map(|(q, v)| (q.clone(), v.conj())).collect(),
        )
    }

    /// Pointwise maximum of real step functions.
    pub fn sup(fs: &[&StepFunction]) -> Result<StepFunction> {
        StepFunction::combine(fs, |v| extremum(v, true))
    }

    /// Pointwise minimum of real step functions.
    pub fn inf(fs: &[&StepFunction]) -> Result<StepFunction> {
        StepFunction::combine(fs, |v| extremum(v, false))
    }

    pub fn abs(&self) -> Result<StepFunction> {
        self.map_real(|r| r.abs())
    }

    /// `T⁺ = sup(T, 0)`
    pub fn pos_part(&self) -> Result<StepFunction> {
        self.map_real(|r| if r.is_positive() { r.clone() } else { Rational::zero() })
    }

    /// `T⁻ = sup(-T, 0)`
    pub fn neg_part(&self) -> Result<StepFunction> {
        self.map_real(|r| if r.is_negative() { -r.clone() } else { Rational::zero() })
    }

    fn map_real(&self, f: impl Fn(&Rational) -> Rational) -> Result<StepFunction> {
        if !self.is_real() {
            return Err(Error::ComplexValue);
        }
        Ok(StepFunction::from_parts(
            self.ambient.clone(),
            self.terms
                .iter()
                .map(|(q, v)| (q.clone(), StepValue::real(f(&v.re))))
                .collect(),
        ))
    }

    /// `ψ ∘ T` for a finite value map with `ψ(0) = 0`.
    pub fn compose(&self, psi: &HashMap<StepValue, StepValue>) -> Result<StepFunction> {
        match psi.get(&StepValue::zero()) {
            Some(z) if z.is_zero() => {}
            Some(z) => return Err(Error::ValueMap(format!("psi(0) = {z}, expected 0"))),
            None => return Err(Error::ValueMap("psi is not defined at 0".into())),
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (q, v) in &self.terms {
            let image = psi
                .get(v)
                .ok_or_else(|| Error::ValueMap(format!("psi is not defined at {v}")))?;
            terms.push((q.clone(), image.clone()));
        }
        Ok(StepFunction::from_parts(self.ambient.clone(), terms))
    }

    /// `T|_I`, i.e. `χ_I T` on the new ambient `I`.
    pub fn restrict(&self, sub: &Quader) -> Result<StepFunction> {
        sub.check_dim(self.dim())?;
        if sub.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if !sub.is_subset(&self.ambient) {
            return Err(Error::NotContained {
                inner: sub.to_string(),
                outer: self.ambient.to_string(),
            });
        }
        Ok(StepFunction::from_parts(
            sub.clone(),
            self.terms
                .iter()
                .map(|(q, v)| (q.intersect_unchecked(sub), v.clone()))
                .collect(),
        ))
    }

    /// `χ_I T` on the original ambient.
    pub fn mask(&self, sub: &Quader) -> Result<StepFunction> {
        sub.check_dim(self.dim())?;
        Ok(StepFunction::from_parts(
            self.ambient.clone(),
            self.terms
                .iter()
                .map(|(q, v)| (q.intersect_unchecked(sub), v.clone()))
                .collect(),
        ))
    }

    /// The zero extension `T̂` to `R^n`.
    pub fn extend_hat(&self) -> StepFunction {
        StepFunction {
            ambient: Quader::full(self.dim()),
            terms: self.terms.clone(),
        }
    }

    /// Re-ambients onto a larger interval containing the current one.
    pub fn with_ambient(&self, ambient: &Quader) -> Result<StepFunction> {
        if !self.ambient.is_subset(ambient) {
            return Err(Error::NotContained {
                inner: self.ambient.to_string(),
                outer: ambient.to_string(),
            });
        }
        Ok(StepFunction {
            ambient: ambient.clone(),
            terms: self.terms.clone(),
        })
    }

    /// `∫ T dφ = Σ α_i φ(Q_i)`
    pub fn integral(&self, m: &BoxMeasure) -> Result<StepValue> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        self.terms
            .iter()
            .map(|(q, v)| m.eval_quader(q).map(|mq| v.scale(&mq)))
            .sum()
    }

    /// `∫_M T dφ = ∫ χ_M T dφ` for a parkettable `M`.
    pub fn integral_over(&self, set: &Parkettable, m: &BoxMeasure) -> Result<StepValue> {
        if m.dim() != self.dim() || set.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: if m.dim() != self.dim() { m.dim() } else { set.dim() },
            });
        }
        let mut total = StepValue::zero();
        for (q, v) in &self.terms {
            let part = Parkettable::from_quader(q.clone())?.intersect(set)?;
            total = &total + &v.scale(&m.eval_parkettable(&part)?);
        }
        Ok(total)
    }

    /// `T ≤ S` pointwise, for real step functions.
    pub fn le(&self, other: &StepFunction) -> Result<bool> {
        let diff = other.sub(self)?;
        if !diff.is_real() {
            return Err(Error::ComplexValue);
        }
        Ok(diff.terms.iter().all(|(_, v)| !v.re.is_negative()))
    }
}

fn extremum(v: &[StepValue], max: bool) -> Result<StepValue> {
    let mut best: Option<&Rational> = None;
    for x in v {
        if !x.is_real() {
            return Err(Error::ComplexValue);
        }
        best = match best {
            Some(b) if (max && b >= &x.re) || (!max && b <= &x.re) => Some(b),
            _ => Some(&x.re),
        };
    }
    Ok(StepValue::real(best.cloned().unwrap_or_default()))
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "on {}:", self.ambient)?;
        if self.terms.is_empty() {
            return f.write_str(" 0");
        }
        for (q, v) in &self.terms {
            write!(f, " ({v})*chi{q}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::text::parse_quader;

    fn qd(s: &str) -> Quader {
        parse_quader(s).unwrap()
    }

    fn line() -> Quader {
        Quader::full(1)
    }

    fn step(terms: &[(&str, i64)]) -> StepFunction {
        StepFunction::new(
            line(),
            terms
                .iter()
                .map(|(q, v)| (qd(q), StepValue::real(int(*v))))
                .collect(),
        )
        .unwrap()
    }

    fn at(t: &StepFunction, x: Rational) -> Rational {
        t.evaluate(&[x]).unwrap().re
    }

    #[test]
    fn indicator_and_evaluate() {
        let chi = StepFunction::indicator(&qd("[0,1]"), &line()).unwrap();
        assert_eq!(at(&chi, ratio(1, 2)), int(1));
        let zero = StepFunction::indicator(&Quader::empty(1), &line()).unwrap();
        assert!(zero.terms().is_empty());
        let three = step(&[("[0,2]", 3)]);
        assert_eq!(at(&three, int(1)), int(3));
        assert_eq!(at(&three, int(5)), int(0));
        assert_eq!(
            three.integral(&BoxMeasure::volume(1)).unwrap(),
            StepValue::real(int(6))
        );
    }

    #[test]
    fn evaluate_outside_ambient_fails() {
        let t = StepFunction::zero(qd("[0,1]"));
        assert!(matches!(
            t.evaluate(&[int(2)]),
            Err(Error::OutsideAmbient { .. })
        ));
    }

    #[test]
    fn indicator_requires_containment() {
        assert!(StepFunction::indicator(&qd("[0,2]"), &qd("[0,1]")).is_err());
    }

    #[test]
    fn sup_of_overlapping_indicators() {
        let a = step(&[("[0,2]", 1)]);
        let b = step(&[("[1,3]", 2)]);
        let s = StepFunction::sup(&[&a, &b]).unwrap();
        for (x, want) in [
            (ratio(-1, 2), 0),
            (int(0), 1),
            (ratio(1, 2), 1),
            (int(1), 2),
            (int(3), 2),
            (ratio(7, 2), 0),
        ] {
            assert_eq!(at(&s, x), int(want));
        }
    }

    #[test]
    fn products_and_parts() {
        let t = step(&[("[0,1]", 2)]);
        let sq = t.mul(&t).unwrap();
        assert_eq!(at(&sq, ratio(1, 2)), int(4));
        let mixed = step(&[("[0,1[", -3), ("[1,2]", 5)]);
        let p = mixed.pos_part().unwrap();
        let n = mixed.neg_part().unwrap();
        let back = p.sub(&n).unwrap();
        let abs = p.add(&n).unwrap();
        for x in [ratio(1, 2), ratio(3, 2), int(4)] {
            assert_eq!(at(&back, x.clone()), at(&mixed, x.clone()));
            assert_eq!(at(&abs, x.clone()), at(&mixed, x).abs());
        }
    }

    #[test]
    fn lattice_ops_reject_complex_values() {
        let z = StepFunction::new(
            line(),
            vec![(qd("[0,1]"), StepValue::new(int(0), int(1)))],
        )
        .unwrap();
        assert_eq!(StepFunction::sup(&[&z, &z]), Err(Error::ComplexValue));
        assert_eq!(z.abs(), Err(Error::ComplexValue));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = StepFunction::zero(qd("[0,1]"));
        let b = StepFunction::zero(qd("[0,2]"));
        assert!(matches!(a.add(&b), Err(Error::AmbientMismatch(..))));
    }

    #[test]
    fn compose_with_value_maps() {
        let t = step(&[("[0,1]", 2)]);
        let mut psi = HashMap::new();
        psi.insert(StepValue::zero(), StepValue::zero());
        psi.insert(StepValue::real(int(2)), StepValue::real(int(4)));
        assert_eq!(t.compose(&psi).unwrap(), step(&[("[0,1]", 4)]));

        let mut bad = HashMap::new();
        bad.insert(StepValue::zero(), StepValue::real(int(1)));
        assert!(matches!(t.compose(&bad), Err(Error::ValueMap(_))));
        psi.remove(&StepValue::real(int(2)));
        assert!(matches!(t.compose(&psi), Err(Error::ValueMap(_))));
    }

    #[test]
    fn sign_map_on_three_levels() {
        let t = step(&[("[0,1[", -2), ("[1,2[", 3), ("[2,3]", 7)]);
        let mut psi = HashMap::new();
        for v in [0, -2, 3, 7] {
            psi.insert(StepValue::real(int(v)), StepValue::real(int(v.signum())));
        }
        let s = t.compose(&psi).unwrap();
        for k in -2..=14 {
            let x = ratio(k, 4);
            assert_eq!(at(&s, x.clone()), int(at(&t, x).cmp(&int(0)) as i64));
        }
    }

    #[test]
    fn restrict_and_extend() {
        let t = step(&[("[0,2]", 3)]);
        let r = t.restrict(&qd("[1,4]")).unwrap();
        assert_eq!(r.terms(), &[(qd("[1,2]"), StepValue::real(int(3)))]);
        assert!(t.restrict(&qd("[1,4]x[0,1]")).is_err());

        let local = StepFunction::new(qd("[0,5]"), vec![(qd("[1,2]"), StepValue::real(int(3)))])
            .unwrap();
        assert!(local.restrict(&qd("[4,6]")).is_err());
        let hat = local.extend_hat();
        let m = BoxMeasure::volume(1);
        assert_eq!(hat.integral(&m).unwrap(), local.integral(&m).unwrap());
        let back = hat.restrict(&qd("[0,5]")).unwrap();
        assert_eq!(back.integral(&m).unwrap(), StepValue::real(int(3)));
    }

    #[test]
    fn dirac_integral() {
        let t = step(&[("[-1,1]", 5)]);
        assert_eq!(
            t.integral(&BoxMeasure::dirac(1)).unwrap(),
            StepValue::real(int(5))
        );
    }

    #[test]
    fn constructor_validates_terms() {
        assert!(matches!(
            StepFunction::new(line(), vec![(qd("[0,2]"), StepValue::real(int(1))), (qd("[1,3]"), StepValue::real(int(1)))]),
            Err(Error::NotDisjoint(..))
        ));
        assert!(matches!(
            StepFunction::new(line(), vec![(qd("[0,inf["), StepValue::real(int(1)))]),
            Err(Error::Unbounded(_))
        ));
        let pruned = StepFunction::new(line(), vec![(qd("[0,1]"), StepValue::zero())]).unwrap();
        assert!(pruned.terms().is_empty());
    }

    #[test]
    fn value_display_uses_pq_pairs() {
        assert_eq!(StepValue::real(int(3)).to_string(), "3/1+0/1 i");
        assert_eq!(
            StepValue::new(ratio(1, 2), ratio(-3, 4)).to_string(),
            "1/2-3/4 i"
        );
    }
}

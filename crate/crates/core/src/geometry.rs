//! Intervals, quaders and parkettable sets of `R^n` with exact rational endpoints.
//!
//! A [`Quader`] is a product of intervals. The same type doubles as the
//! (possibly unbounded) ambient interval of a step function; every quader that
//! enters a [`Parkettable`] must be bounded. Set operations follow the
//! classical constructive route: intersections factorwise, differences through
//! [`Quader::split_around`], unions through the complement inside a bounding
//! quader.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    NegInfinity,
    PosInfinity,
    Finite { value: Rational, closed: bool },
}

impl Endpoint {
    pub fn closed(value: Rational) -> Self {
        Endpoint::Finite {
            value,
            closed: true,
        }
    }

    pub fn open(value: Rational) -> Self {
        Endpoint::Finite {
            value,
            closed: false,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Endpoint::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Endpoint::Finite { closed: true, .. })
    }

    /// The complementary boundary: the last point excluded by a lower bound
    /// becomes the upper bound of what lies to its left, and vice versa.
    fn flipped(&self) -> Endpoint {
        match self {
            Endpoint::Finite { value, closed } => Endpoint::Finite {
                value: value.clone(),
                closed: !closed,
            },
            Endpoint::NegInfinity => Endpoint::PosInfinity,
            Endpoint::PosInfinity => Endpoint::NegInfinity,
        }
    }
}

/// Order of lower bounds by the sets they admit: `Less` means "starts earlier".
fn cmp_lower(a: &Endpoint, b: &Endpoint) -> Ordering {
    use Endpoint::*;
    match (a, b) {
        (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
        (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
        (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
        (
            Finite {
                value: va,
                closed: ca,
            },
            Finite {
                value: vb,
                closed: cb,
            },
        ) => va.cmp(vb).then_with(|| cb.cmp(ca)),
    }
}

/// Order of upper bounds: `Less` means "ends earlier".
fn cmp_upper(a: &Endpoint, b: &Endpoint) -> Ordering {
    use Endpoint::*;
    match (a, b) {
        (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
        (PosInfinity, _) | (_, NegInfinity) => Ordering::Greater,
        (_, PosInfinity) | (NegInfinity, _) => Ordering::Less,
        (
            Finite {
                value: va,
                closed: ca,
            },
            Finite {
                value: vb,
                closed: cb,
            },
        ) => va.cmp(vb).then_with(|| ca.cmp(cb)),
    }
}

/// An interval of `R`. All empty intervals share one representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    bounds: Option<(Endpoint, Endpoint)>,
}

impl Interval {
    pub const EMPTY: Interval = Interval { bounds: None };

    /// Builds `lower .. upper`, collapsing to the empty interval when no real
    /// number satisfies both bounds.
    pub fn new(lower: Endpoint, upper: Endpoint) -> Interval {
        use Endpoint::*;
        let nonempty = match (&lower, &upper) {
            (PosInfinity, _) | (_, NegInfinity) => false,
            (NegInfinity, _) | (_, PosInfinity) => true,
            (
                Finite {
                    value: a,
                    closed: ca,
                },
                Finite {
                    value: b,
                    closed: cb,
                },
            ) => a < b || (a == b && *ca && *cb),
        };
        if nonempty {
            Interval {
                bounds: Some((lower, upper)),
            }
        } else {
            Interval::EMPTY
        }
    }

    pub fn closed(a: Rational, b: Rational) -> Interval {
        Interval::new(Endpoint::closed(a), Endpoint::closed(b))
    }

    pub fn open(a: Rational, b: Rational) -> Interval {
        Interval::new(Endpoint::open(a), Endpoint::open(b))
    }

    /// `[a, b[`
    pub fn closed_open(a: Rational, b: Rational) -> Interval {
        Interval::new(Endpoint::closed(a), Endpoint::open(b))
    }

    /// `]a, b]`
    pub fn open_closed(a: Rational, b: Rational) -> Interval {
        Interval::new(Endpoint::open(a), Endpoint::closed(b))
    }

    pub fn point(a: Rational) -> Interval {
        Interval::closed(a.clone(), a)
    }

    pub fn real_line() -> Interval {
        Interval::new(Endpoint::NegInfinity, Endpoint::PosInfinity)
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn lower(&self) -> Option<&Endpoint> {
        self.bounds.as_ref().map(|b| &b.0)
    }

    pub fn upper(&self) -> Option<&Endpoint> {
        self.bounds.as_ref().map(|b| &b.1)
    }

    /// `inf` of a non-empty interval with finite lower end.
    pub fn inf(&self) -> Option<&Rational> {
        self.lower().and_then(Endpoint::value)
    }

    pub fn sup(&self) -> Option<&Rational> {
        self.upper().and_then(Endpoint::value)
    }

    pub fn is_bounded(&self) -> bool {
        match &self.bounds {
            None => true,
            Some((l, u)) => l.value().is_some() && u.value().is_some(),
        }
    }

    /// At most one point.
    pub fn is_degenerate(&self) -> bool {
        match &self.bounds {
            None => true,
            Some((l, u)) => matches!((l.value(), u.value()), (Some(a), Some(b)) if a == b),
        }
    }

    pub fn is_open(&self) -> bool {
        match &self.bounds {
            None => true,
            Some((l, u)) => !l.is_closed() && !u.is_closed(),
        }
    }

    /// Closed as a subset of `R`; infinite ends do not spoil closedness.
    pub fn is_closed(&self) -> bool {
        match &self.bounds {
            None => true,
            Some((l, u)) => {
                (l.is_closed() || l.value().is_none()) && (u.is_closed() || u.value().is_none())
            }
        }
    }

    /// `sup - inf` for bounded intervals, `0` for the empty one.
    pub fn length(&self) -> Option<Rational> {
        match &self.bounds {
            None => Some(Rational::from_integer(0.into())),
            Some((l, u)) => match (l.value(), u.value()) {
                (Some(a), Some(b)) => Some(b - a),
                _ => None,
            },
        }
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let Some((l, u)) = &self.bounds else {
            return false;
        };
        let above = match l {
            Endpoint::NegInfinity => true,
            Endpoint::PosInfinity => false,
            Endpoint::Finite { value, closed } => x > value || (*closed && x == value),
        };
        let below = match u {
            Endpoint::PosInfinity => true,
            Endpoint::NegInfinity => false,
            Endpoint::Finite { value, closed } => x < value || (*closed && x == value),
        };
        above && below
    }

    /// `self ⊂ other`
    pub fn is_subset(&self, other: &Interval) -> bool {
        match (&self.bounds, &other.bounds) {
            (None, _) => true,
            (_, None) => false,
            (Some((la, ua)), Some((lb, ub))) => {
                cmp_lower(lb, la) != Ordering::Greater && cmp_upper(ua, ub) != Ordering::Greater
            }
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        match (&self.bounds, &other.bounds) {
            (Some((la, ua)), Some((lb, ub))) => {
                let lower = if cmp_lower(la, lb) == Ordering::Greater {
                    la
                } else {
                    lb
                };
                let upper = if cmp_upper(ua, ub) == Ordering::Less {
                    ua
                } else {
                    ub
                };
                Interval::new(lower.clone(), upper.clone())
            }
            _ => Interval::EMPTY,
        }
    }

    /// Closure in `R`.
    pub fn closure(&self) -> Interval {
        let close = |e: &Endpoint| match e {
            Endpoint::Finite { value, .. } => Endpoint::closed(value.clone()),
            other => other.clone(),
        };
        match &self.bounds {
            None => Interval::EMPTY,
            Some((l, u)) => Interval::new(close(l), close(u)),
        }
    }

    /// `{ t ∈ self ∖ inner | t ≤ inf inner }` for `inner ⊂ self`, inner non-empty.
    fn left_remainder(&self, inner: &Interval) -> Interval {
        match (&self.bounds, inner.lower()) {
            (Some((l, _)), Some(il)) => Interval::new(l.clone(), il.flipped()),
            _ => Interval::EMPTY,
        }
    }

    /// `{ t ∈ self ∖ inner | t ≥ sup inner }` for `inner ⊂ self`, inner non-empty.
    fn right_remainder(&self, inner: &Interval) -> Interval {
        match (&self.bounds, inner.upper()) {
            (Some((_, u)), Some(iu)) => Interval::new(iu.flipped(), u.clone()),
            _ => Interval::EMPTY,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some((l, u)) = &self.bounds else {
            return f.write_str("empty");
        };
        match l {
            Endpoint::Finite { value, closed } => {
                write!(f, "{}{}", if *closed { "[" } else { "]" }, value)?
            }
            _ => f.write_str("]-inf")?,
        }
        f.write_str(",")?;
        match u {
            Endpoint::Finite { value, closed } => {
                write!(f, "{}{}", value, if *closed { "]" } else { "[" })
            }
            _ => f.write_str("inf["),
        }
    }
}

/// A product of `n ≥ 1` intervals. Empty quaders are stored with every factor
/// empty so that equality of empty quaders is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quader {
    factors: Vec<Interval>,
}

impl Quader {
    pub fn new(factors: Vec<Interval>) -> Result<Quader> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "a quader needs at least one factor".into(),
            ));
        }
        Ok(Quader::from_factors(factors))
    }

    fn from_factors(mut factors: Vec<Interval>) -> Quader {
        if factors.iter().any(Interval::is_empty) {
            factors.iter_mut().for_each(|f| *f = Interval::EMPTY);
        }
        Quader { factors }
    }

    pub fn empty(dim: usize) -> Quader {
        Quader {
            factors: vec![Interval::EMPTY; dim.max(1)],
        }
    }

    /// The whole of `R^n`.
    pub fn full(dim: usize) -> Quader {
        Quader {
            factors: vec![Interval::real_line(); dim.max(1)],
        }
    }

    /// Closed box `[a_1,b_1] × … × [a_n,b_n]`.
    pub fn closed_box(bounds: &[(Rational, Rational)]) -> Quader {
        Quader::from_factors(
            bounds
                .iter()
                .map(|(a, b)| Interval::closed(a.clone(), b.clone()))
                .collect(),
        )
    }

    pub fn from_interval(i: Interval) -> Quader {
        Quader::from_factors(vec![i])
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Interval] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Interval {
        &self.factors[i]
    }

    pub fn is_empty(&self) -> bool {
        self.factors[0].is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.factors.iter().all(Interval::is_bounded)
    }

    pub fn is_degenerate(&self) -> bool {
        self.factors.iter().any(Interval::is_degenerate)
    }

    pub fn is_open(&self) -> bool {
        self.factors.iter().all(Interval::is_open)
    }

    pub fn is_closed(&self) -> bool {
        self.factors.iter().all(Interval::is_closed)
    }

    pub fn is_compact(&self) -> bool {
        self.is_bounded() && self.is_closed()
    }

    pub fn closure(&self) -> Quader {
        Quader::from_factors(self.factors.iter().map(Interval::closure).collect())
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other,
            })
        }
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        x.len() == self.dim()
            && self
                .factors
                .iter()
                .zip(x)
                .all(|(f, xi)| f.contains_point(xi))
    }

    /// `self ⊂ other`, dimensions assumed equal.
    pub fn is_subset(&self, other: &Quader) -> bool {
        self.is_empty()
            || (self.dim() == other.dim()
                && self
                    .factors
                    .iter()
                    .zip(&other.factors)
                    .all(|(a, b)| a.is_subset(b)))
    }

    pub fn intersect(&self, other: &Quader) -> Result<Quader> {
        self.check_dim(other.dim())?;
        Ok(self.intersect_unchecked(other))
    }

    pub(crate) fn intersect_unchecked(&self, other: &Quader) -> Quader {
        Quader::from_factors(
            self.factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        )
    }

    pub fn is_disjoint(&self, other: &Quader) -> bool {
        self.intersect_unchecked(other).is_empty()
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Quader) -> Quader {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Quader::from_factors(factors)
    }

    /// Splits `R^{k} × R^{n-k}` coordinates into the two factor quaders.
    pub fn split_at(&self, k: usize) -> (Quader, Quader) {
        let (a, b) = self.factors.split_at(k);
        (
            Quader::from_factors(a.to_vec()),
            Quader::from_factors(b.to_vec()),
        )
    }

    /// Partitions `outer` into `inner` followed by at most `2n` further
    /// pairwise-disjoint quaders. Every prefix of the returned list unites to a
    /// quader. The first element is always `inner` (possibly empty); the
    /// remaining ones are non-empty.
    pub fn split_around(inner: &Quader, outer: &Quader) -> Result<Vec<Quader>> {
        inner.check_dim(outer.dim())?;
        if !inner.is_subset(outer) {
            return Err(Error::NotContained {
                inner: inner.to_string(),
                outer: outer.to_string(),
            });
        }
        let mut pieces = vec![inner.clone()];
        if inner.is_empty() {
            if !outer.is_empty() {
                pieces.push(outer.clone());
            }
            return Ok(pieces);
        }
        // Grow coordinate by coordinate: after handling the first d factors the
        // pieces cover outer_{<d} × inner_{≥d}.
        let n = inner.dim();
        let mut prefix: Vec<Vec<Interval>> = vec![Vec::new()];
        for d in 0..n {
            let j = &inner.factors[d];
            let jt = &outer.factors[d];
            for p in prefix.iter_mut() {
                p.push(j.clone());
            }
            let outer_prefix = &outer.factors[..d];
            for side in [jt.left_remainder(j), jt.right_remainder(j)] {
                let mut f = outer_prefix.to_vec();
                f.push(side);
                prefix.push(f);
            }
        }
        pieces.extend(
            prefix
                .into_iter()
                .skip(1)
                .map(Quader::from_factors)
                .filter(|q| !q.is_empty()),
        );
        Ok(pieces)
    }

    /// `self ∖ other` as disjoint quaders.
    pub fn difference(&self, other: &Quader) -> Result<Vec<Quader>> {
        let cut = self.intersect(other)?;
        if cut.is_empty() {
            return Ok(if self.is_empty() {
                Vec::new()
            } else {
                vec![self.clone()]
            });
        }
        let mut pieces = Quader::split_around(&cut, self)?;
        pieces.remove(0);
        Ok(pieces)
    }
}

impl fmt::Display for Quader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty^{}", self.dim());
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// A finite disjoint union of bounded, non-empty quaders.
///
/// Equality is structural and therefore depends on the chosen representation;
/// use [`Parkettable::set_eq`] for set equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parkettable {
    dim: usize,
    pieces: Vec<Quader>,
}

impl Parkettable {
    /// Validates boundedness, dimension and pairwise disjointness; empty
    /// pieces are dropped.
    pub fn new(dim: usize, pieces: Vec<Quader>) -> Result<Parkettable> {
        let pieces: Vec<Quader> = pieces.into_iter().filter(|q| !q.is_empty()).collect();
        for q in &pieces {
            q.check_dim(dim).map_err(|_| Error::DimensionMismatch {
                expected: dim,
                found: q.dim(),
            })?;
            if !q.is_bounded() {
                return Err(Error::Unbounded(q.to_string()));
            }
        }
        check_disjoint(&pieces)?;
        Ok(Parkettable { dim, pieces })
    }

    pub(crate) fn from_disjoint(dim: usize, pieces: Vec<Quader>) -> Parkettable {
        debug_assert!(pieces.iter().all(|q| q.dim() == dim && q.is_bounded()));
        Parkettable {
            dim,
            pieces: pieces.into_iter().filter(|q| !q.is_empty()).collect(),
        }
    }

    pub fn empty(dim: usize) -> Parkettable {
        Parkettable {
            dim,
            pieces: Vec::new(),
        }
    }

    pub fn from_quader(q: Quader) -> Result<Parkettable> {
        let dim = q.dim();
        Parkettable::new(dim, vec![q])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Quader] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Quader> {
        self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.pieces.iter().any(|q| q.contains_point(x))
    }

    fn check_dim(&self, other: &Parkettable) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    /// Smallest closed box containing the set, `None` for `∅`.
    pub fn bounding_box(&self) -> Option<Quader> {
        let first = self.pieces.first()?;
        let mut lo: Vec<Rational> = first.factors.iter().map(|f| f.inf().unwrap().clone()).collect();
        let mut hi: Vec<Rational> = first.factors.iter().map(|f| f.sup().unwrap().clone()).collect();
        for q in &self.pieces[1..] {
            for (i, f) in q.factors.iter().enumerate() {
                let (a, b) = (f.inf().unwrap(), f.sup().unwrap());
                if a < &lo[i] {
                    lo[i] = a.clone();
                }
                if b > &hi[i] {
                    hi[i] = b.clone();
                }
            }
        }
        let bounds: Vec<_> = lo.into_iter().zip(hi).collect();
        Some(Quader::closed_box(&bounds))
    }

    /// Pairwise intersection of the pieces.
    pub fn intersect(&self, other: &Parkettable) -> Result<Parkettable> {
        self.check_dim(other)?;
        let pieces = self
            .pieces
            .iter()
            .flat_map(|a| other.pieces.iter().map(move |b| a.intersect_unchecked(b)))
            .filter(|q| !q.is_empty())
            .collect();
        Ok(Parkettable::from_disjoint(self.dim, pieces))
    }

    /// Removes the quaders of `other` one after another from every piece.
    pub fn difference(&self, other: &Parkettable) -> Result<Parkettable> {
        self.check_dim(other)?;
        let mut pieces = self.pieces.clone();
        for cut in &other.pieces {
            pieces = minus_quader(pieces, cut);
            if pieces.is_empty() {
                break;
            }
        }
        Ok(Parkettable::from_disjoint(self.dim, pieces))
    }

    /// `B ∖ ((B ∖ P) ∩ (B ∖ P'))` for a bounding quader `B`.
    pub fn union(&self, other: &Parkettable) -> Result<Parkettable> {
        self.check_dim(other)?;
        let mut all = self.pieces.clone();
        all.extend(other.pieces.iter().cloned());
        let Some(bbox) = Parkettable::from_disjoint(self.dim, all).bounding_box() else {
            return Ok(Parkettable::empty(self.dim));
        };
        let b = Parkettable::from_disjoint(self.dim, vec![bbox]);
        let outside = b.difference(self)?.intersect(&b.difference(other)?)?;
        b.difference(&outside)
    }

    /// `P ∪̇ (P' ∖ P)`; an alternative to [`Parkettable::union`] that usually
    /// yields fewer pieces.
    pub fn union_disjoint(&self, other: &Parkettable) -> Result<Parkettable> {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.difference(self)?.pieces);
        Ok(Parkettable::from_disjoint(self.dim, pieces))
    }

    pub fn symmetric_difference(&self, other: &Parkettable) -> Result<Parkettable> {
        let mut pieces = self.difference(other)?.pieces;
        pieces.extend(other.difference(self)?.pieces);
        Ok(Parkettable::from_disjoint(self.dim, pieces))
    }

    pub fn is_subset(&self, other: &Parkettable) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn set_eq(&self, other: &Parkettable) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }
}

fn minus_quader(pieces: Vec<Quader>, cut: &Quader) -> Vec<Quader> {
    let mut out = Vec::with_capacity(pieces.len());
    for q in pieces {
        let meet = q.intersect_unchecked(cut);
        if meet.is_empty() {
            out.push(q);
        } else {
            let split = Quader::split_around(&meet, &q).expect("meet is inside q");
            out.extend(split.into_iter().skip(1));
        }
    }
    out
}

fn check_disjoint(pieces: &[Quader]) -> Result<()> {
    let refs: Vec<&Quader> = pieces.iter().collect();
    match first_overlap(&refs) {
        Some((i, j)) => Err(Error::NotDisjoint(pieces[i].to_string(), pieces[j].to_string())),
        None => Ok(()),
    }
}

/// Indices of two overlapping non-empty quaders, if any. Sweeps along the
/// first axis so that only pairs whose projections overlap are compared.
pub(crate) fn first_overlap(pieces: &[&Quader]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..pieces.len()).filter(|&i| !pieces[i].is_empty()).collect();
    let lower = |i: usize| pieces[i].factors[0].inf().cloned();
    order.sort_by(|&x, &y| match (lower(x), lower(y)) {
        (Some(a), Some(b)) => a.cmp(&b),
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    for (k, &i) in order.iter().enumerate() {
        let hi = pieces[i].factors[0].sup().cloned();
        for &j in &order[k + 1..] {
            if let (Some(h), Some(l)) = (&hi, lower(j)) {
                if &l > h {
                    break;
                }
            }
            if !pieces[i].is_disjoint(pieces[j]) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

impl fmt::Display for Parkettable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("{}");
        }
        for (i, q) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

/// Output of [`common_refinement`]: disjoint pieces plus, for every input
/// quader (`certificates[family][index]`), the indices of the pieces that
/// unite to it.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub pieces: Parkettable,
    pub certificates: Vec<Vec<Vec<usize>>>,
}

impl Refinement {
    /// The pieces certified for one input quader, as a parkettable.
    pub fn certified_union(&self, family: usize, index: usize) -> Parkettable {
        let pieces = self.certificates[family][index]
            .iter()
            .map(|&i| self.pieces.pieces[i].clone())
            .collect();
        Parkettable::from_disjoint(self.pieces.dim, pieces)
    }
}

/// A disjoint quader family of which every input quader is a union.
///
/// Each family must be internally disjoint; quaders of different families may
/// overlap arbitrarily.
pub fn common_refinement(dim: usize, families: &[Vec<Quader>]) -> Result<Refinement> {
    for fam in families {
        for q in fam {
            q.check_dim(dim).map_err(|_| Error::DimensionMismatch {
                expected: dim,
                found: q.dim(),
            })?;
            if !q.is_bounded() {
                return Err(Error::Unbounded(q.to_string()));
            }
        }
        check_disjoint(fam)?;
    }
    let mut cells: Vec<(Quader, BTreeSet<(usize, usize)>)> = Vec::new();
    for (f, fam) in families.iter().enumerate() {
        for (i, q) in fam.iter().enumerate() {
            if q.is_empty() {
                continue;
            }
            let mut next = Vec::with_capacity(cells.len() + 1);
            let mut rest = vec![q.clone()];
            for (cell, origins) in cells {
                let meet = cell.intersect_unchecked(q);
                if meet.is_empty() {
                    next.push((cell, origins));
                    continue;
                }
                rest = minus_quader(rest, &cell);
                let split = Quader::split_around(&meet, &cell).expect("meet is inside cell");
                let mut with = origins.clone();
                with.insert((f, i));
                next.push((meet, with));
                next.extend(split.into_iter().skip(1).map(|p| (p, origins.clone())));
            }
            next.extend(rest.into_iter().map(|p| (p, BTreeSet::from([(f, i)]))));
            cells = next;
        }
    }
    let mut certificates: Vec<Vec<Vec<usize>>> =
        families.iter().map(|fam| vec![Vec::new(); fam.len()]).collect();
    for (idx, (_, origins)) in cells.iter().enumerate() {
        for &(f, i) in origins {
            certificates[f][i].push(idx);
        }
    }
    Ok(Refinement {
        pieces: Parkettable::from_disjoint(dim, cells.into_iter().map(|(q, _)| q).collect()),
        certificates,
    })
}

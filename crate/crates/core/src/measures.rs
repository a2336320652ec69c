//! Box measures: additive, monotone, regular set functions on quaders, and
//! their extension to parkettable sets by summation over a representation.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Endpoint, Interval, Parkettable, Quader};
use crate::rational::Rational;

/// `intercept + slope · t`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub intercept: Rational,
    pub slope: Rational,
}

impl Affine {
    pub fn new(intercept: Rational, slope: Rational) -> Self {
        Affine { intercept, slope }
    }

    pub fn constant(c: Rational) -> Self {
        Affine::new(c, Rational::zero())
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        &self.intercept + &self.slope * t
    }
}

/// A monotone, piecewise-affine weight `g` with jumps at finitely many
/// rational breakpoints.
///
/// `pieces[0]` lives on `]-inf, c_1[`, `pieces[j]` on `]c_j, c_{j+1}[` and the
/// last one on `]c_m, inf[`; `values[j]` is `g(c_{j+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StieltjesWeight {
    breakpoints: Vec<Rational>,
    pieces: Vec<Affine>,
    values: Vec<Rational>,
}

impl StieltjesWeight {
    pub fn new(
        breakpoints: Vec<Rational>,
        pieces: Vec<Affine>,
        values: Vec<Rational>,
    ) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidMeasure(m));
        if pieces.len() != breakpoints.len() + 1 {
            return invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            ));
        }
        if values.len() != breakpoints.len() {
            return invalid("one value per breakpoint is required".into());
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("breakpoints must be strictly increasing".into());
        }
        if let Some(p) = pieces.iter().find(|p| p.slope.is_negative()) {
            return invalid(format!("negative slope {}", p.slope));
        }
        for (j, c) in breakpoints.iter().enumerate() {
            let left = pieces[j].eval(c);
            let right = pieces[j + 1].eval(c);
            if !(left <= values[j] && values[j] <= right) {
                return invalid(format!(
                    "not monotone at {c}: left limit {left}, value {}, right limit {right}",
                    values[j]
                ));
            }
        }
        Ok(StieltjesWeight {
            breakpoints,
            pieces,
            values,
        })
    }

    /// `g(t) = t`
    pub fn identity() -> Self {
        StieltjesWeight {
            breakpoints: Vec::new(),
            pieces: vec![Affine::new(Rational::zero(), Rational::one())],
            values: Vec::new(),
        }
    }

    /// `0` left of `c`, `1` from `c` on.
    pub fn heaviside(c: Rational) -> Self {
        StieltjesWeight {
            breakpoints: vec![c],
            pieces: vec![
                Affine::constant(Rational::zero()),
                Affine::constant(Rational::one()),
            ],
            values: vec![Rational::one()],
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Index of the open piece containing `t`, or `Err(j)` if `t = c_j`.
    fn locate(&self, t: &Rational) -> std::result::Result<usize, usize> {
        match self.breakpoints.binary_search(t) {
            Ok(j) => Err(j),
            Err(j) => Ok(j),
        }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        match self.locate(t) {
            Ok(piece) => self.pieces[piece].eval(t),
            Err(j) => self.values[j].clone(),
        }
    }

    /// `(g(c-), g(c+))`
    pub fn one_sided_limits(&self, c: &Rational) -> (Rational, Rational) {
        match self.locate(c) {
            Ok(piece) => {
                let v = self.pieces[piece].eval(c);
                (v.clone(), v)
            }
            Err(j) => (self.pieces[j].eval(c), self.pieces[j + 1].eval(c)),
        }
    }

    /// `g(c+) - g(c-)`
    pub fn jump(&self, c: &Rational) -> Rational {
        let (l, r) = self.one_sided_limits(c);
        r - l
    }

    /// The five-case formula in the one-sided limits of `g`.
    pub fn measure(&self, i: &Interval) -> Result<Rational> {
        let (Some(lo), Some(hi)) = (i.lower(), i.upper()) else {
            return Ok(Rational::zero());
        };
        let (Endpoint::Finite { value: a, closed: ca }, Endpoint::Finite { value: b, closed: cb }) =
            (lo, hi)
        else {
            return Err(Error::Unbounded(i.to_string()));
        };
        let (a_minus, a_plus) = self.one_sided_limits(a);
        let (b_minus, b_plus) = self.one_sided_limits(b);
        let upper = if *cb { b_plus } else { b_minus };
        let lower = if *ca { a_minus } else { a_plus };
        Ok(upper - lower)
    }
}

/// Finitely many distinct mass points with positive masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassPoints {
    dim: usize,
    points: Vec<(Vec<Rational>, Rational)>,
}

impl MassPoints {
    pub fn new(dim: usize, points: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be positive".into()));
        }
        for (i, (p, m)) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if !m.is_positive() {
                return Err(Error::InvalidMeasure(format!("mass {m} is not positive")));
            }
            if points[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::InvalidMeasure(format!(
                    "mass point {} listed twice",
                    fmt_point(p)
                )));
            }
        }
        Ok(MassPoints { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[(Vec<Rational>, Rational)] {
        &self.points
    }
}

pub(crate) fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxMeasure {
    /// `n`-dimensional volume.
    Volume(usize),
    Discrete(MassPoints),
    Stieltjes(StieltjesWeight),
    Product(Box<BoxMeasure>, Box<BoxMeasure>),
}

impl BoxMeasure {
    pub fn volume(dim: usize) -> Self {
        BoxMeasure::Volume(dim.max(1))
    }

    /// Unit mass at the origin of `R^n`.
    pub fn dirac(dim: usize) -> Self {
        let zero = vec![Rational::zero(); dim.max(1)];
        BoxMeasure::Discrete(MassPoints {
            dim: dim.max(1),
            points: vec![(zero, Rational::one())],
        })
    }

    pub fn discrete(dim: usize, points: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        MassPoints::new(dim, points).map(BoxMeasure::Discrete)
    }

    pub fn stieltjes(w: StieltjesWeight) -> Self {
        BoxMeasure::Stieltjes(w)
    }

    pub fn product(left: BoxMeasure, right: BoxMeasure) -> Self {
        BoxMeasure::Product(Box::new(left), Box::new(right))
    }

    /// `μ_1 × … × μ_1`
    pub fn volume_product(dim: usize) -> Self {
        let mut m = BoxMeasure::Volume(1);
        for _ in 1..dim.max(1) {
            m = BoxMeasure::product(m, BoxMeasure::Volume(1));
        }
        m
    }

    pub fn dim(&self) -> usize {
        match self {
            BoxMeasure::Volume(n) => *n,
            BoxMeasure::Discrete(m) => m.dim,
            BoxMeasure::Stieltjes(_) => 1,
            BoxMeasure::Product(a, b) => a.dim() + b.dim(),
        }
    }

    pub fn eval_quader(&self, q: &Quader) -> Result<Rational> {
        q.check_dim(self.dim()).map_err(|_| Error::DimensionMismatch {
            expected: self.dim(),
            found: q.dim(),
        })?;
        if q.is_empty() {
            return Ok(Rational::zero());
        }
        if !q.is_bounded() {
            return Err(Error::Unbounded(q.to_string()));
        }
        Ok(self.eval_bounded(q))
    }

    fn eval_bounded(&self, q: &Quader) -> Rational {
        if q.is_empty() {
            return Rational::zero();
        }
        match self {
            BoxMeasure::Volume(_) => q
                .factors()
                .iter()
                .map(|f| f.length().expect("bounded"))
                .product(),
            BoxMeasure::Discrete(m) => m
                .points
                .iter()
                .filter(|(p, _)| q.contains_point(p))
                .map(|(_, mass)| mass.clone())
                .sum(),
            BoxMeasure::Stieltjes(w) => w.measure(q.factor(0)).expect("bounded"),
            BoxMeasure::Product(a, b) => {
                let (qa, qb) = q.split_at(a.dim());
                a.eval_bounded(&qa) * b.eval_bounded(&qb)
            }
        }
    }

    /// `Σ φ(Q_i)` over the pieces of `p`.
    pub fn eval_parkettable(&self, p: &Parkettable) -> Result<Rational> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        Ok(p.pieces().iter().map(|q| self.eval_bounded(q)).sum())
    }

    /// An open quader `Q' ⊃ q` with `φ(Q') ≤ φ(q) + eps`.
    ///
    /// Closed ends are pushed outwards by `t` and `t` is halved until the
    /// bound holds; for every supported family `φ(Q'_t) → φ(q)` as `t ↓ 0`,
    /// so the loop terminates.
    pub fn regularity_witness(&self, q: &Quader, eps: &Rational) -> Result<Quader> {
        if !eps.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "eps must be positive, got {eps}"
            )));
        }
        let target = self.eval_quader(q)? + eps;
        if q.is_empty() {
            return Ok(q.clone());
        }
        let mut t = Rational::one();
        loop {
            let candidate = open_enlargement(q, &t);
            if self.eval_bounded(&candidate) <= target {
                return Ok(candidate);
            }
            t /= Rational::from_integer(2.into());
        }
    }
}

fn open_enlargement(q: &Quader, t: &Rational) -> Quader {
    let factors = q
        .factors()
        .iter()
        .map(|f| {
            let (Some(Endpoint::Finite { value: a, closed: ca }), Some(Endpoint::Finite { value: b, closed: cb })) =
                (f.lower(), f.upper())
            else {
                unreachable!("bounded non-empty factor")
            };
            let lo = if *ca { a - t } else { a.clone() };
            let hi = if *cb { b + t } else { b.clone() };
            Interval::open(lo, hi)
        })
        .collect();
    Quader::new(factors).expect("non-empty factor list")
}

impl fmt::Display for BoxMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxMeasure::Volume(n) => write!(f, "volume({n})"),
            BoxMeasure::Discrete(m) => {
                let parts: Vec<String> = m
                    .points
                    .iter()
                    .map(|(p, mass)| format!("{}:{}", fmt_point(p), mass))
                    .collect();
                write!(f, "discrete[{}]", parts.join(" "))
            }
            BoxMeasure::Stieltjes(w) => write!(f, "stieltjes({} breakpoints)", w.breakpoints.len()),
            BoxMeasure::Product(a, b) => write!(f, "({a} x {b})"),
        }
    }
}

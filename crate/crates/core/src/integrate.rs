//! Riemann brackets, δ-fine step functions, Stieltjes and discrete
//! integrals, step-level Fubini and Jordan measures.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Endpoint, Interval, Parkettable, Quader};
use crate::measures::{BoxMeasure, StieltjesWeight};
use crate::poly::{round_down, round_up, PolyBounder, Polynomial};
use crate::rational::{floor_int, from_f64, pow2, to_f64, Rational};
use crate::stepfn::{StepFunction, StepValue};

/// Largest grid the enumerating procedures will visit.
pub const MAX_CELLS: u128 = 1 << 24;

/// A real function together with an interval extension.
///
/// `bounds_on(q)` must return `lo ≤ inf f(q̄)` and `hi ≥ sup f(q̄)` for a
/// bounded non-empty quader; bounds are taken on the closure so they are also
/// valid for every half-open cell.
pub trait BoundedOracle {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[Rational]) -> f64;
    fn bounds_on(&self, q: &Quader) -> Result<(f64, f64)>;
}

/// Built-in oracles.
#[derive(Clone, Debug)]
pub enum Oracle {
    Constant { dim: usize, value: Rational },
    /// Univariate polynomial.
    Poly(PolyBounder),
    Exp,
    Sin,
    Cos,
    /// `χ_Q`
    Indicator(Quader),
    /// A univariate oracle applied to coordinate `axis` of `R^dim`.
    Axis {
        dim: usize,
        axis: usize,
        inner: Box<Oracle>,
    },
    Sum(Vec<Oracle>),
    Product(Vec<Oracle>),
}

impl Oracle {
    pub fn constant(dim: usize, value: Rational) -> Self {
        Oracle::Constant { dim, value }
    }

    pub fn poly(p: Polynomial) -> Self {
        Oracle::Poly(PolyBounder::new(p))
    }

    pub fn axis(dim: usize, axis: usize, inner: Oracle) -> Result<Self> {
        if inner.dim() != 1 || axis >= dim {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} of R^{dim} needs a univariate oracle"
            )));
        }
        Ok(Oracle::Axis {
            dim,
            axis,
            inner: Box::new(inner),
        })
    }

    pub fn sum(parts: Vec<Oracle>) -> Result<Self> {
        same_dim(&parts)?;
        Ok(Oracle::Sum(parts))
    }

    pub fn product(parts: Vec<Oracle>) -> Result<Self> {
        same_dim(&parts)?;
        Ok(Oracle::Product(parts))
    }
}

fn same_dim(parts: &[Oracle]) -> Result<()> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidArgument("empty oracle list".into()));
    };
    for p in parts {
        if p.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: p.dim(),
            });
        }
    }
    Ok(())
}

fn check_cell(q: &Quader, dim: usize) -> Result<()> {
    q.check_dim(dim).map_err(|_| Error::DimensionMismatch {
        expected: dim,
        found: q.dim(),
    })?;
    if q.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if !q.is_bounded() {
        return Err(Error::Unbounded(q.to_string()));
    }
    Ok(())
}

/// Pushes a pair of libm results outwards by a few ulps.
fn widen(lo: f64, hi: f64) -> (f64, f64) {
    (lo.next_down().next_down(), hi.next_up().next_up())
}

fn float_ends(i: &Interval) -> (f64, f64) {
    (round_down(i.inf().unwrap()), round_up(i.sup().unwrap()))
}

/// Whether some `c + k·period` may lie in `[a, b]`, erring towards yes.
fn hits(a: f64, b: f64, c: f64, period: f64) -> bool {
    let slack = 8.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs()));
    let k = ((a - slack - c) / period).ceil();
    c + k * period <= b + slack
}

fn trig_bounds(a: f64, b: f64, max_at: f64, min_at: f64, f: fn(f64) -> f64) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    if b - a >= tau {
        return (-1.0, 1.0);
    }
    let (fa, fb) = (f(a), f(b));
    let mut lo = fa.min(fb);
    let mut hi = fa.max(fb);
    if hits(a, b, max_at, tau) {
        hi = 1.0;
    }
    if hits(a, b, min_at, tau) {
        lo = -1.0;
    }
    let (lo, hi) = widen(lo, hi);
    (lo.max(-1.0), hi.min(1.0))
}

fn mul_bounds(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let pairs = [(a.0, b.0), (a.0, b.1), (a.1, b.0), (a.1, b.1)];
    let p = pairs.map(|(x, y)| x * y);
    let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exact = pairs.iter().zip(&p).all(|(&(x, y), &xy)| x.mul_add(y, -xy) == 0.0);
    if exact {
        (lo, hi)
    } else {
        widen(lo, hi)
    }
}

impl BoundedOracle for Oracle {
    fn dim(&self) -> usize {
        match self {
            Oracle::Constant { dim, .. } | Oracle::Axis { dim, .. } => *dim,
            Oracle::Poly(_) | Oracle::Exp | Oracle::Sin | Oracle::Cos => 1,
            Oracle::Indicator(q) => q.dim(),
            Oracle::Sum(v) | Oracle::Product(v) => v[0].dim(),
        }
    }

    fn eval(&self, x: &[Rational]) -> f64 {
        match self {
            Oracle::Constant { value, .. } => to_f64(value),
            Oracle::Poly(p) => to_f64(&p.poly().eval(&x[0])),
            Oracle::Exp => to_f64(&x[0]).exp(),
            Oracle::Sin => to_f64(&x[0]).sin(),
            Oracle::Cos => to_f64(&x[0]).cos(),
            Oracle::Indicator(q) => {
                if q.contains_point(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Oracle::Axis { axis, inner, .. } => inner.eval(std::slice::from_ref(&x[*axis])),
            Oracle::Sum(v) => v.iter().map(|o| o.eval(x)).sum(),
            Oracle::Product(v) => v.iter().map(|o| o.eval(x)).product(),
        }
    }

    fn bounds_on(&self, q: &Quader) -> Result<(f64, f64)> {
        check_cell(q, self.dim())?;
        Ok(match self {
            Oracle::Constant { value, .. } => (round_down(value), round_up(value)),
            Oracle::Poly(p) => {
                let i = q.factor(0);
                p.bounds(i.inf().unwrap(), i.sup().unwrap())
            }
            Oracle::Exp => {
                let (a, b) = float_ends(q.factor(0));
                let (lo, hi) = widen(a.exp(), b.exp());
                (lo.max(0.0), hi)
            }
            Oracle::Sin => {
                let (a, b) = float_ends(q.factor(0));
                let half = std::f64::consts::FRAC_PI_2;
                trig_bounds(a, b, half, -half, f64::sin)
            }
            Oracle::Cos => {
                let (a, b) = float_ends(q.factor(0));
                trig_bounds(a, b, 0.0, std::f64::consts::PI, f64::cos)
            }
            Oracle::Indicator(ind) => {
                let c = q.closure();
                let lo = if c.is_subset(ind) { 1.0 } else { 0.0 };
                let hi = if c.is_disjoint(ind) { 0.0 } else { 1.0 };
                (lo, hi)
            }
            Oracle::Axis { axis, inner, .. } => {
                inner.bounds_on(&Quader::from_interval(q.factor(*axis).clone()))?
            }
            Oracle::Sum(v) => {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for o in v {
                    let (l, h) = o.bounds_on(q)?;
                    lo += l;
                    hi += h;
                }
                if v.len() > 1 {
                    widen(lo, hi)
                } else {
                    (lo, hi)
                }
            }
            Oracle::Product(v) => {
                let mut acc = v[0].bounds_on(q)?;
                for o in &v[1..] {
                    acc = mul_bounds(acc, o.bounds_on(q)?);
                }
                acc
            }
        })
    }
}

/// An oracle from a closure with a known Lipschitz constant (Euclidean norm).
pub struct Lipschitz<F> {
    pub dim: usize,
    pub constant: f64,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> BoundedOracle for Lipschitz<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[Rational]) -> f64 {
        let x: Vec<f64> = x.iter().map(to_f64).collect();
        (self.f)(&x)
    }

    fn bounds_on(&self, q: &Quader) -> Result<(f64, f64)> {
        check_cell(q, self.dim)?;
        let mut centre = Vec::with_capacity(self.dim);
        let mut radius = 0.0;
        for i in q.factors() {
            let (a, b) = float_ends(i);
            centre.push(0.5 * (a + b));
            radius += (0.5 * (b - a)).powi(2);
        }
        let v = (self.f)(&centre);
        let r = self.constant * radius.sqrt();
        Ok(widen(v - r, v + r))
    }
}

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Lower and upper Darboux sums at one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub depth: u32,
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

fn grid_size(per_axis: &[u128]) -> Result<u128> {
    let mut total: u128 = 1;
    for &n in per_axis {
        total = total.checked_mul(n).ok_or(Error::TooManyCells(u128::MAX))?;
        if total > MAX_CELLS {
            return Err(Error::TooManyCells(total));
        }
    }
    Ok(total)
}

/// Visits every multi-index in `Π [lo_i, hi_i]` in lexicographic order.
fn for_each_index(lo: &[i64], hi: &[i64], mut visit: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Ok(());
    }
    let mut idx = lo.to_vec();
    loop {
        visit(&idx)?;
        let mut axis = idx.len();
        loop {
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
            if idx[axis] < hi[axis] {
                idx[axis] += 1;
                break;
            }
            idx[axis] = lo[axis];
        }
    }
}

/// The `2^{kn}` cells of a compact box: half-open except for the last cell
/// along each axis, which keeps the closed upper end.
struct BoxGrid {
    lower: Vec<Rational>,
    step: Vec<Rational>,
    last: i64,
}

impl BoxGrid {
    fn new(dom: &Quader, depth: u32) -> Result<Self> {
        if dom.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if !dom.is_compact() {
            return Err(Error::InvalidArgument(format!("{dom} is not compact")));
        }
        if dom.is_degenerate() {
            return Err(Error::Degenerate(dom.to_string()));
        }
        let per_axis = 1u128.checked_shl(depth).filter(|_| depth < 64).ok_or(Error::TooManyCells(u128::MAX))?;
        grid_size(&vec![per_axis; dom.dim()])?;
        let scale = pow2(depth);
        Ok(BoxGrid {
            lower: dom.factors().iter().map(|f| f.inf().unwrap().clone()).collect(),
            step: dom
                .factors()
                .iter()
                .map(|f| f.length().unwrap() / &scale)
                .collect(),
            last: (per_axis - 1) as i64,
        })
    }

    fn cell(&self, idx: &[i64]) -> Quader {
        let factors = idx
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let a = &self.lower[i] + &self.step[i] * Rational::from_integer(j.into());
                let b = &a + &self.step[i];
                if j == self.last {
                    Interval::closed(a, b)
                } else {
                    Interval::closed_open(a, b)
                }
            })
            .collect();
        Quader::new(factors).expect("non-empty index")
    }

    fn visit(&self, mut f: impl FnMut(Quader) -> Result<()>) -> Result<()> {
        let n = self.lower.len();
        for_each_index(&vec![0; n], &vec![self.last; n], |idx| f(self.cell(idx)))
    }
}

fn check_oracle_dim(f: &dyn BoundedOracle, dim: usize) -> Result<()> {
    if f.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: f.dim(),
        });
    }
    Ok(())
}

/// Measure-weighted Darboux sums `Σ φ(Q) inf f(Q̄)` and `Σ φ(Q) sup f(Q̄)`
/// over the dyadic cells of `dom`.
pub fn measure_bracket(
    f: &dyn BoundedOracle,
    dom: &Quader,
    m: &BoxMeasure,
    depth: u32,
) -> Result<Bracket> {
    check_oracle_dim(f, dom.dim())?;
    if m.dim() != dom.dim() {
        return Err(Error::DimensionMismatch {
            expected: dom.dim(),
            found: m.dim(),
        });
    }
    let grid = BoxGrid::new(dom, depth)?;
    let mut lower = Compensated::default();
    let mut upper = Compensated::default();
    grid.visit(|cell| {
        let w = m.eval_quader(&cell)?;
        if w.is_zero() {
            return Ok(());
        }
        let w = to_f64(&w);
        let (lo, hi) = f.bounds_on(&cell)?;
        lower.add(w * lo);
        upper.add(w * hi);
        Ok(())
    })?;
    Ok(Bracket {
        depth,
        lower: lower.value(),
        upper: upper.value(),
    })
}

/// Darboux bracket with respect to the volume.
pub fn riemann_bracket(f: &dyn BoundedOracle, dom: &Quader, depth: u32) -> Result<Bracket> {
    measure_bracket(f, dom, &BoxMeasure::volume(dom.dim()), depth)
}

fn exact(x: f64) -> Result<Rational> {
    from_f64(x).ok_or_else(|| Error::Overflow(format!("non-finite oracle bound {x}")))
}

/// The lower and upper step functions behind [`riemann_bracket`], with the
/// float bounds carried over exactly.
pub fn riemann_steps(
    f: &dyn BoundedOracle,
    dom: &Quader,
    depth: u32,
) -> Result<(StepFunction, StepFunction)> {
    check_oracle_dim(f, dom.dim())?;
    let grid = BoxGrid::new(dom, depth)?;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    grid.visit(|cell| {
        let (lo, hi) = f.bounds_on(&cell)?;
        lower.push((cell.clone(), StepValue::real(exact(lo)?)));
        upper.push((cell, StepValue::real(exact(hi)?)));
        Ok(())
    })?;
    Ok((
        StepFunction::from_parts(dom.clone(), lower),
        StepFunction::from_parts(dom.clone(), upper),
    ))
}

/// Integer range of absolute dyadic indices `a` whose cells
/// `[a/2^k, (a+1)/2^k]` can meet `[lo, hi]`.
fn index_range(lo: &Rational, hi: &Rational, scale: &Rational) -> Result<(i64, i64)> {
    let to_i64 = |b: BigInt| {
        b.to_i64()
            .ok_or_else(|| Error::Overflow(format!("grid index {b}")))
    };
    Ok((
        to_i64(floor_int(&(lo * scale)) - BigInt::one())?,
        to_i64(floor_int(&(hi * scale)))?,
    ))
}

/// The absolute dyadic cell `Π [a_i/2^k, (a_i+1)/2^k[`, closed if asked.
fn dyadic_cell(idx: &[i64], h: &Rational, closed: bool) -> Quader {
    let factors = idx
        .iter()
        .map(|&a| {
            let lo = h * Rational::from_integer(a.into());
            let hi = &lo + h;
            if closed {
                Interval::closed(lo, hi)
            } else {
                Interval::closed_open(lo, hi)
            }
        })
        .collect();
    Quader::new(factors).expect("non-empty index")
}

fn ranges_for(bbox: &Quader, scale: &Rational) -> Result<(Vec<i64>, Vec<i64>)> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut sizes = Vec::new();
    for f in bbox.factors() {
        let (a, b) = index_range(f.inf().unwrap(), f.sup().unwrap(), scale)?;
        sizes.push((b - a + 1).max(0) as u128);
        lo.push(a);
        hi.push(b);
    }
    grid_size(&sizes)?;
    Ok((lo, hi))
}

/// A step function sampling `f` once on every absolute dyadic cell
/// `[a/2^k, (a+1)/2^k[` meeting `M`, supported on `M`.
///
/// The sample point is the lower-left corner of the closure of the first
/// piece of `Q ∩ M`, a point of `Q̄ ∩ M̄`.
pub fn fine_step(f: &dyn BoundedOracle, m_dom: &Parkettable, depth: u32) -> Result<StepFunction> {
    check_oracle_dim(f, m_dom.dim())?;
    let bbox = m_dom.bounding_box().ok_or(Error::EmptyDomain)?;
    let scale = pow2(depth);
    let h = Rational::one() / &scale;
    let (lo, hi) = ranges_for(&bbox, &scale)?;
    let mut terms = Vec::new();
    for_each_index(&lo, &hi, |idx| {
        let cell = dyadic_cell(idx, &h, false);
        let part = Parkettable::from_quader(cell)?.intersect(m_dom)?;
        let Some(first) = part.pieces().first() else {
            return Ok(());
        };
        let corner: Vec<Rational> = first
            .factors()
            .iter()
            .map(|i| i.inf().unwrap().clone())
            .collect();
        let v = StepValue::real(exact(f.eval(&corner))?);
        terms.extend(part.into_pieces().into_iter().map(|q| (q, v.clone())));
        Ok(())
    })?;
    Ok(StepFunction::from_parts(bbox, terms))
}

/// Midpoint and half-width of the measure-weighted bracket.
pub fn integrate_continuous(
    f: &dyn BoundedOracle,
    dom: &Quader,
    m: &BoxMeasure,
    depth: u32,
) -> Result<(f64, f64)> {
    let b = measure_bracket(f, dom, m, depth)?;
    Ok((b.midpoint(), 0.5 * b.gap()))
}

/// `Σ m(p) f(p)` over an explicit point list; `tail` is echoed back.
pub fn integrate_discrete(
    f: &dyn BoundedOracle,
    points: &[(Vec<Rational>, Rational)],
    tail: Option<f64>,
) -> (f64, f64) {
    let mut acc = Compensated::default();
    for (p, mass) in points {
        acc.add(to_f64(mass) * f.eval(p));
    }
    (acc.value(), tail.unwrap_or(0.0))
}

/// `∫_{[a,b]} f dμ_g`: slope-weighted volume integrals over the affine pieces
/// plus `jump(c)·f(c)` for every breakpoint `c ∈ [a, b]`.
pub fn stieltjes_integral(
    f: &dyn BoundedOracle,
    w: &StieltjesWeight,
    a: &Rational,
    b: &Rational,
    depth: u32,
) -> Result<(f64, f64)> {
    check_oracle_dim(f, 1)?;
    if a >= b {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    let mut value = Compensated::default();
    let mut half = 0.0;
    let mut knots = vec![a.clone()];
    knots.extend(w.breakpoints().iter().filter(|c| a < *c && *c < b).cloned());
    knots.push(b.clone());
    let vol = BoxMeasure::volume(1);
    for pair in knots.windows(2) {
        let mid = (&pair[0] + &pair[1]) / Rational::from_integer(2.into());
        let slope = &w.pieces()[piece_index(w, &mid)].slope;
        if slope.is_zero() {
            continue;
        }
        let dom = Quader::from_interval(Interval::closed(pair[0].clone(), pair[1].clone()));
        let (v, hw) = integrate_continuous(f, &dom, &vol, depth)?;
        let s = to_f64(slope);
        value.add(s * v);
        half += s * hw;
    }
    for c in w.breakpoints().iter().filter(|c| a <= *c && *c <= b) {
        let jump = w.jump(c);
        if !jump.is_zero() {
            value.add(to_f64(&jump) * f.eval(std::slice::from_ref(c)));
        }
    }
    Ok((value.value(), half))
}

fn piece_index(w: &StieltjesWeight, t: &Rational) -> usize {
    w.breakpoints().partition_point(|c| c < t)
}

/// Which variable a step-level Fubini integrates first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FubiniOrder {
    /// `∫ ( ∫ T(x₁, x₂) dφ₂(x₂) ) dφ₁(x₁)`
    InnerSecond,
    /// `∫ ( ∫ T(x₁, x₂) dφ₁(x₁) ) dφ₂(x₂)`
    InnerFirst,
}

/// Iterated integral of a step function on `R^{n₁+n₂}` under `m1 × m2`.
///
/// The inner integration yields a step function on the remaining factor,
/// built as a sum of indicators, which is then integrated exactly.
pub fn fubini_step(
    t: &StepFunction,
    m1: &BoxMeasure,
    m2: &BoxMeasure,
    order: FubiniOrder,
) -> Result<StepValue> {
    let (n1, n2) = (m1.dim(), m2.dim());
    if t.dim() != n1 + n2 {
        return Err(Error::DimensionMismatch {
            expected: n1 + n2,
            found: t.dim(),
        });
    }
    let (amb1, amb2) = t.ambient().split_at(n1);
    let (outer_amb, outer_m, inner_m) = match order {
        FubiniOrder::InnerSecond => (amb1, m1, m2),
        FubiniOrder::InnerFirst => (amb2, m2, m1),
    };
    let mut inner = StepFunction::zero(outer_amb.clone());
    for (q, v) in t.terms() {
        let (q1, q2) = q.split_at(n1);
        let (keep, drop) = match order {
            FubiniOrder::InnerSecond => (q1, q2),
            FubiniOrder::InnerFirst => (q2, q1),
        };
        let weight = inner_m.eval_quader(&drop)?;
        if weight.is_zero() {
            continue;
        }
        let term = StepFunction::new(outer_amb.clone(), vec![(keep, v.scale(&weight))])?;
        inner = inner.add(&term)?;
    }
    inner.integral(outer_m)
}

/// Measure of a union of closed absolute dyadic cells of side `h`.
///
/// Every point of the union lies in exactly one relatively open face of the
/// lattice; summing `φ` over the distinct faces is therefore exact for every
/// box measure.
fn closed_cells_measure(cells: &[Vec<i64>], h: &Rational, m: &BoxMeasure) -> Result<Rational> {
    if cells.is_empty() {
        return Ok(Rational::zero());
    }
    let n = cells[0].len();
    if let BoxMeasure::Volume(_) = m {
        let count = Rational::from_integer(cells.len().into());
        return Ok(count * num_traits::pow(h.clone(), n));
    }
    let mut faces: HashSet<Vec<i64>> = HashSet::new();
    for cell in cells {
        let lo: Vec<i64> = cell.iter().map(|&a| 2 * a).collect();
        let hi: Vec<i64> = cell.iter().map(|&a| 2 * a + 2).collect();
        for_each_index(&lo, &hi, |code| {
            faces.insert(code.to_vec());
            Ok(())
        })?;
    }
    let mut total = Rational::zero();
    for code in faces {
        let factors = code
            .iter()
            .map(|&c| {
                let at = |j: i64| h * Rational::from_integer(j.into());
                if c % 2 == 0 {
                    Interval::point(at(c / 2))
                } else {
                    let a = c.div_euclid(2);
                    Interval::open(at(a), at(a + 1))
                }
            })
            .collect();
        total += m.eval_quader(&Quader::new(factors)?)?;
    }
    Ok(total)
}

fn check_measure_dim(m: &BoxMeasure, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    Ok(())
}

/// Per-axis index ranges `(lo, hi)` of the closed cells `[a h, (a+1) h]`
/// that meet (`contained = false`) or lie inside (`contained = true`) a
/// bounded quader, for `h = 1/scale`.
fn cell_ranges(q: &Quader, scale: &Rational, contained: bool) -> Result<(Vec<i64>, Vec<i64>)> {
    let to_i64 = |b: BigInt| {
        b.to_i64()
            .ok_or_else(|| Error::Overflow(format!("grid index {b}")))
    };
    let floor = |r: Rational| floor_int(&r);
    let ceil = |r: Rational| -floor_int(&-r);
    let mut lo = Vec::with_capacity(q.dim());
    let mut hi = Vec::with_capacity(q.dim());
    let mut sizes = Vec::with_capacity(q.dim());
    for f in q.factors() {
        let (Some(l), Some(u)) = (f.lower(), f.upper()) else {
            return Err(Error::Unbounded(q.to_string()));
        };
        let (a, b) = (l.value().unwrap() * scale, u.value().unwrap() * scale);
        let one = BigInt::one();
        let (first, last) = if contained {
            (
                if l.is_closed() { ceil(a) } else { floor(a) + &one },
                if u.is_closed() { floor(b) - &one } else { ceil(b) - BigInt::from(2) },
            )
        } else {
            (
                if l.is_closed() { ceil(a) - &one } else { floor(a) },
                if u.is_closed() { floor(b) } else { ceil(b) - &one },
            )
        };
        let (first, last) = (to_i64(first)?, to_i64(last)?);
        sizes.push(if last >= first { (last - first + 1) as u128 } else { 0 });
        lo.push(first);
        hi.push(last);
    }
    grid_size(&sizes)?;
    Ok((lo, hi))
}

/// Inner Jordan measure at depth `k`: `φ` of the union of the closed cells
/// `W_{k,a} = Π [a_i/2^k, (a_i+1)/2^k]` contained in `∪ u`.
pub fn jordan_inner(u: &[Quader], depth: u32, m: &BoxMeasure) -> Result<Rational> {
    let Some(first) = u.first() else {
        return Ok(Rational::zero());
    };
    let dim = first.dim();
    check_measure_dim(m, dim)?;
    for q in u {
        q.check_dim(dim)?;
        if !q.is_bounded() {
            return Err(Error::Unbounded(q.to_string()));
        }
    }
    let live: Vec<&Quader> = u.iter().filter(|q| !q.is_empty()).collect();
    let scale = pow2(depth);
    let h = Rational::one() / &scale;
    let mut inside: HashSet<Vec<i64>> = HashSet::new();
    for q in &live {
        let (lo, hi) = cell_ranges(q, &scale, true)?;
        for_each_index(&lo, &hi, |idx| {
            inside.insert(idx.to_vec());
            Ok(())
        })?;
        check_cells(inside.len())?;
    }
    // a cell inside no single quader can still be covered by several
    if live.len() > 1 {
        let mut touches: HashMap<Vec<i64>, u32> = HashMap::new();
        for q in &live {
            let (lo, hi) = cell_ranges(q, &scale, false)?;
            for_each_index(&lo, &hi, |idx| {
                if !inside.contains(idx) {
                    *touches.entry(idx.to_vec()).or_default() += 1;
                }
                Ok(())
            })?;
            check_cells(touches.len())?;
        }
        let mut extra: Vec<Vec<i64>> = touches
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(idx, _)| idx)
            .collect();
        extra.sort();
        for idx in extra {
            if covered(&dyadic_cell(&idx, &h, true), u)? {
                inside.insert(idx);
            }
        }
    }
    closed_cells_measure(&inside.into_iter().collect::<Vec<_>>(), &h, m)
}

fn check_cells(n: usize) -> Result<()> {
    if n as u128 > MAX_CELLS {
        return Err(Error::TooManyCells(n as u128));
    }
    Ok(())
}

fn covered(cell: &Quader, u: &[Quader]) -> Result<bool> {
    if u.iter().any(|q| cell.is_subset(q)) {
        return Ok(true);
    }
    let mut rest = vec![cell.clone()];
    for q in u {
        if rest.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for r in &rest {
            next.extend(r.difference(q)?);
        }
        rest = next;
    }
    Ok(rest.is_empty())
}

/// Outer Jordan measure at depth `k`: `φ` of the union of the closed cells
/// `W_{k,a}` meeting `C`.
pub fn jordan_outer(c: &Parkettable, depth: u32, m: &BoxMeasure) -> Result<Rational> {
    check_measure_dim(m, c.dim())?;
    let scale = pow2(depth);
    let h = Rational::one() / &scale;
    let mut meeting: HashSet<Vec<i64>> = HashSet::new();
    for q in c.pieces() {
        let (lo, hi) = cell_ranges(q, &scale, false)?;
        for_each_index(&lo, &hi, |idx| {
            meeting.insert(idx.to_vec());
            Ok(())
        })?;
        check_cells(meeting.len())?;
    }
    closed_cells_measure(&meeting.into_iter().collect::<Vec<_>>(), &h, m)
}

/// Stage `j` of the Smith–Volterra–Cantor construction: starting from
/// `[0, 1]`, stage `i` removes the open middle interval of length `4^{-i}`
/// from each of the `2^{i-1}` remaining closed intervals.
pub fn smith_volterra_cantor(stage: u32) -> Result<Parkettable> {
    if stage > 20 {
        return Err(Error::TooManyCells(1u128 << stage));
    }
    let two = Rational::from_integer(2.into());
    let mut intervals = vec![(Rational::zero(), Rational::one())];
    for i in 1..=stage {
        let gap = Rational::one() / pow2(2 * i);
        let half = &gap / &two;
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (a, b) in intervals {
            let mid = (&a + &b) / &two;
            next.push((a, &mid - &half));
            next.push((&mid + &half, b));
        }
        intervals = next;
    }
    Parkettable::new(
        1,
        intervals
            .into_iter()
            .map(|(a, b)| Quader::from_interval(Interval::closed(a, b)))
            .collect(),
    )
}

/// `φ(P) = 0`, decided exactly.
pub fn nullset_check(p: &Parkettable, m: &BoxMeasure) -> Result<bool> {
    Ok(m.eval_parkettable(p)?.is_zero())
}

/// Closed interval `[a, b]` as a one-dimensional quader.
pub fn closed_1d(a: Rational, b: Rational) -> Quader {
    Quader::from_interval(Interval::new(Endpoint::closed(a), Endpoint::closed(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn square() -> Oracle {
        Oracle::poly(Polynomial::monomial(2))
    }

    #[test]
    fn darboux_sums_of_square() {
        let b = riemann_bracket(&square(), &closed_1d(int(0), int(1)), 2).unwrap();
        assert_eq!(b.lower, 7.0 / 32.0);
        assert_eq!(b.upper, 15.0 / 32.0);
    }

    #[test]
    fn indicator_gap_is_one_cell() {
        let f = Oracle::Indicator(closed_1d(int(0), ratio(1, 2)));
        for k in 1..8 {
            let b = riemann_bracket(&f, &closed_1d(int(0), int(1)), k).unwrap();
            assert_eq!(b.gap(), 0.5f64.powi(k as i32));
        }
    }

    #[test]
    fn constant_is_exact() {
        let f = Oracle::constant(2, ratio(3, 2));
        let dom = Quader::closed_box(&[(int(0), int(2)), (int(-1), int(1))]);
        let b = riemann_bracket(&f, &dom, 3).unwrap();
        assert_eq!((b.lower, b.upper), (6.0, 6.0));
    }

    #[test]
    fn degenerate_domain_is_rejected() {
        let dom = closed_1d(int(1), int(1));
        assert!(matches!(
            riemann_bracket(&square(), &dom, 2),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn steps_sandwich() {
        let (lo, hi) = riemann_steps(&square(), &closed_1d(int(0), int(1)), 3).unwrap();
        assert!(lo.le(&hi).unwrap());
        let vol = BoxMeasure::volume(1);
        assert_eq!(lo.integral(&vol).unwrap(), StepValue::real(ratio(35, 128)));
    }

    #[test]
    fn dirac_picks_the_origin() {
        let (v, hw) = integrate_continuous(
            &Oracle::Cos,
            &closed_1d(int(-1), int(1)),
            &BoxMeasure::dirac(1),
            10,
        )
        .unwrap();
        assert!((v - 1.0).abs() <= hw + 1e-15);
        assert!(hw < 1e-5);
    }

    #[test]
    fn fine_step_properties() {
        let m = Parkettable::from_quader(closed_1d(int(0), int(1))).unwrap();
        let t = fine_step(&Oracle::poly(Polynomial::monomial(1)), &m, 3).unwrap();
        for j in 0..=64 {
            let x = ratio(j, 64);
            let d = to_f64(&t.evaluate(&[x.clone()]).unwrap().re) - to_f64(&x);
            assert!(d.abs() <= 0.125);
        }
        let vol = BoxMeasure::volume(1);
        let s = fine_step(&square(), &m, 5).unwrap().integral(&vol).unwrap();
        let b = riemann_bracket(&square(), &closed_1d(int(0), int(1)), 5).unwrap();
        let s = to_f64(&s.re);
        assert!(b.lower <= s && s <= b.upper);
    }

    #[test]
    fn discrete_geometric_series() {
        let n = 20;
        let pts: Vec<_> = (0..=n).map(|p| (vec![int(p)], int(1))).collect();
        let f = Lipschitz {
            dim: 1,
            constant: 1.0,
            f: |x: &[f64]| 0.5f64.powf(x[0]),
        };
        let (v, tail) = integrate_discrete(&f, &pts, Some(0.5f64.powi(n as i32)));
        assert_eq!(v, 2.0 - 0.5f64.powi(n as i32));
        assert_eq!(tail, 0.5f64.powi(n as i32));
    }

    #[test]
    fn stieltjes_cases() {
        let heav = StieltjesWeight::heaviside(int(0));
        let (v, _) = stieltjes_integral(&Oracle::Cos, &heav, &int(-1), &int(1), 6).unwrap();
        assert_eq!(v, 1.0);
        let w = StieltjesWeight::new(
            vec![],
            vec![crate::measures::Affine::new(int(0), int(2))],
            vec![],
        )
        .unwrap();
        let id = Oracle::poly(Polynomial::monomial(1));
        let (v, hw) = stieltjes_integral(&id, &w, &int(0), &int(1), 10).unwrap();
        assert!((v - 1.0).abs() <= hw);
    }

    #[test]
    fn fubini_examples() {
        let q = Quader::closed_box(&[(int(0), int(1)), (int(0), int(2))]);
        let amb = Quader::closed_box(&[(int(-5), int(5)), (int(-5), int(5))]);
        let t = StepFunction::indicator(&q, &amb).unwrap();
        let vol = BoxMeasure::volume(1);
        for order in [FubiniOrder::InnerSecond, FubiniOrder::InnerFirst] {
            assert_eq!(fubini_step(&t, &vol, &vol, order).unwrap(), StepValue::real(int(2)));
        }
        let q = Quader::closed_box(&[(int(-1), int(1)), (int(0), int(3))]);
        let t = StepFunction::indicator(&q, &amb).unwrap();
        let v = fubini_step(&t, &BoxMeasure::dirac(1), &vol, FubiniOrder::InnerFirst).unwrap();
        assert_eq!(v, StepValue::real(int(3)));
    }

    #[test]
    fn jordan_unit_interval() {
        let vol = BoxMeasure::volume(1);
        let open = Quader::from_interval(Interval::open(int(0), int(1)));
        let closed = Parkettable::from_quader(closed_1d(int(0), int(1))).unwrap();
        for k in 1..8 {
            let h = Rational::one() / pow2(k);
            assert_eq!(jordan_inner(std::slice::from_ref(&open), k, &vol).unwrap(), int(1) - &h * int(2));
            assert_eq!(jordan_outer(&closed, k, &vol).unwrap(), int(1) + &h * int(2));
        }
    }

    #[test]
    fn jordan_faces_under_point_masses() {
        let m = BoxMeasure::discrete(1, vec![(vec![int(0)], int(1)), (vec![int(1)], int(2))]).unwrap();
        let closed = Parkettable::from_quader(closed_1d(int(0), int(1))).unwrap();
        assert_eq!(jordan_outer(&closed, 3, &m).unwrap(), int(3));
        let open = Quader::from_interval(Interval::open(int(0), int(1)));
        assert_eq!(jordan_inner(&[open], 3, &m).unwrap(), int(0));
    }

    #[test]
    fn jointly_covered_cells_count() {
        let u = [
            Quader::from_interval(Interval::open(int(0), ratio(3, 4))),
            Quader::from_interval(Interval::open(ratio(1, 4), int(1))),
        ];
        assert_eq!(jordan_inner(&u, 2, &BoxMeasure::volume(1)).unwrap(), ratio(1, 2));
    }

    #[test]
    fn svc_stage_two() {
        let p = smith_volterra_cantor(2).unwrap();
        assert_eq!(p.pieces().len(), 4);
        let v = BoxMeasure::volume(1).eval_parkettable(&p).unwrap();
        assert_eq!(v, int(1) - ratio(1, 4) - ratio(2, 16));
    }

    #[test]
    fn nullsets() {
        let vol2 = BoxMeasure::volume(2);
        let thin = Parkettable::from_quader(Quader::closed_box(&[(int(0), int(0)), (int(0), int(1))])).unwrap();
        assert!(nullset_check(&thin, &vol2).unwrap());
        let unit = Parkettable::from_quader(closed_1d(int(0), int(1))).unwrap();
        assert!(!nullset_check(&unit, &BoxMeasure::volume(1)).unwrap());
        let origin = Parkettable::from_quader(closed_1d(int(0), int(0))).unwrap();
        assert!(!nullset_check(&origin, &BoxMeasure::dirac(1)).unwrap());
    }

    #[test]
    fn trig_bounds_contain_extrema() {
        let q = closed_1d(int(1), int(2));
        let (lo, hi) = Oracle::Sin.bounds_on(&q).unwrap();
        assert_eq!(hi, 1.0);
        assert!(lo <= 1f64.sin());
        let (lo, hi) = Oracle::Cos.bounds_on(&closed_1d(int(3), int(4))).unwrap();
        assert_eq!(lo, -1.0);
        assert!(hi >= 4f64.cos());
    }

    #[test]
    fn cell_ranges_match_direct_tests() {
        let mut rng = crate::random::rng(11);
        for _ in 0..100 {
            let q = crate::random::quader(&mut rng, 2);
            if q.is_empty() {
                continue;
            }
            for depth in [0, 2] {
                let scale = pow2(depth);
                let h = Rational::one() / &scale;
                let meet = cell_ranges(&q, &scale, false).unwrap();
                let inside = cell_ranges(&q, &scale, true).unwrap();
                let within = |r: &(Vec<i64>, Vec<i64>), idx: &[i64]| {
                    idx.iter().enumerate().all(|(i, a)| r.0[i] <= *a && *a <= r.1[i])
                };
                let span = 4 * (1 << depth) + 2;
                for_each_index(&[-span, -span], &[span, span], |idx| {
                    let cell = dyadic_cell(idx, &h, true);
                    assert_eq!(within(&meet, idx), !cell.is_disjoint(&q), "{q} {idx:?}");
                    assert_eq!(within(&inside, idx), cell.is_subset(&q), "{q} {idx:?}");
                    Ok(())
                })
                .unwrap();
            }
        }
    }
}

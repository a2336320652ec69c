//! Inner products on vectors, step functions and polynomials; Gram–Schmidt,
//! orthogonal projection and Fourier coefficients of step functions.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::integrate::Compensated;
use crate::measures::BoxMeasure;
use crate::poly::Polynomial;
use crate::rational::{from_f64, to_f64, Rational};
use crate::stepfn::{StepFunction, StepValue};

/// An element of one of the concrete inner product spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum IPElement {
    /// `C^n` with exact rational entries.
    Vec(Vec<StepValue>),
    /// `C^n` in floating point.
    VecF(Vec<Complex64>),
    /// A step function with `⟨f, g⟩ = ∫ f ḡ dφ`.
    Step { t: StepFunction, m: BoxMeasure },
    /// A real polynomial on `[a, b]` with `⟨p, q⟩ = ∫_a^b p q dt`.
    Poly { p: Polynomial, a: Rational, b: Rational },
}

/// A scalar, exact when both operands were.
#[derive(Clone, Debug, PartialEq)]
pub enum IPValue {
    Exact(StepValue),
    Float(Complex64),
}

impl IPValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            IPValue::Exact(v) => v.to_complex(),
            IPValue::Float(z) => *z,
        }
    }

    pub fn conj(&self) -> IPValue {
        match self {
            IPValue::Exact(v) => IPValue::Exact(v.conj()),
            IPValue::Float(z) => IPValue::Float(z.conj()),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    /// `|v|²`, exact when possible.
    fn norm_sqr(&self) -> IPValue {
        match self {
            IPValue::Exact(v) => IPValue::Exact(StepValue::real(v.norm_sqr())),
            IPValue::Float(z) => IPValue::Float(Complex64::new(z.norm_sqr(), 0.0)),
        }
    }

    fn mul(&self, o: &IPValue) -> IPValue {
        match (self, o) {
            (IPValue::Exact(a), IPValue::Exact(b)) => IPValue::Exact(a * b),
            _ => IPValue::Float(self.to_complex() * o.to_complex()),
        }
    }

    fn add(&self, o: &IPValue) -> IPValue {
        match (self, o) {
            (IPValue::Exact(a), IPValue::Exact(b)) => IPValue::Exact(a + b),
            _ => IPValue::Float(self.to_complex() + o.to_complex()),
        }
    }

    fn sub(&self, o: &IPValue) -> IPValue {
        self.add(&o.neg())
    }

    fn neg(&self) -> IPValue {
        match self {
            IPValue::Exact(a) => IPValue::Exact(-a),
            IPValue::Float(z) => IPValue::Float(-z),
        }
    }

    /// `self / d` for a real positive `d`.
    fn div_real(&self, d: &IPValue) -> IPValue {
        match (self, d) {
            (IPValue::Exact(a), IPValue::Exact(b)) if b.is_real() => IPValue::Exact(a.div_real(&b.re)),
            _ => IPValue::Float(self.to_complex() / d.to_complex().re),
        }
    }

    fn to_exact(&self) -> Result<StepValue> {
        match self {
            IPValue::Exact(v) => Ok(v.clone()),
            IPValue::Float(z) => {
                let conv = |x: f64| {
                    from_f64(x).ok_or_else(|| Error::Overflow(format!("non-finite scalar {x}")))
                };
                Ok(StepValue::new(conv(z.re)?, conv(z.im)?))
            }
        }
    }
}

fn kind(x: &IPElement) -> &'static str {
    match x {
        IPElement::Vec(_) => "exact vector",
        IPElement::VecF(_) => "float vector",
        IPElement::Step { .. } => "step function",
        IPElement::Poly { .. } => "polynomial",
    }
}

fn mismatch(x: &IPElement, y: &IPElement) -> Error {
    Error::CarrierMismatch(format!("{} vs {}", kind(x), kind(y)))
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

impl IPElement {
    pub fn step(t: StepFunction, m: BoxMeasure) -> Result<Self> {
        if t.dim() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: t.dim(),
                found: m.dim(),
            });
        }
        Ok(IPElement::Step { t, m })
    }

    pub fn poly(p: Polynomial, a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
        }
        Ok(IPElement::Poly { p, a, b })
    }

    /// The zero element of the same space.
    pub fn zero_like(&self) -> IPElement {
        match self {
            IPElement::Vec(v) => IPElement::Vec(vec![StepValue::zero(); v.len()]),
            IPElement::VecF(v) => IPElement::VecF(vec![Complex64::zero(); v.len()]),
            IPElement::Step { t, m } => IPElement::Step {
                t: StepFunction::zero(t.ambient().clone()),
                m: m.clone(),
            },
            IPElement::Poly { a, b, .. } => IPElement::Poly {
                p: Polynomial::zero(),
                a: a.clone(),
                b: b.clone(),
            },
        }
    }

    pub fn scale(&self, c: &IPValue) -> Result<IPElement> {
        Ok(match self {
            IPElement::VecF(v) => {
                let c = c.to_complex();
                IPElement::VecF(v.iter().map(|z| z * c).collect())
            }
            IPElement::Vec(v) => {
                let c = c.to_exact()?;
                IPElement::Vec(v.iter().map(|z| z * &c).collect())
            }
            IPElement::Step { t, m } => IPElement::Step {
                t: t.scale(&c.to_exact()?),
                m: m.clone(),
            },
            IPElement::Poly { p, a, b } => {
                let c = c.to_exact()?;
                if !c.is_real() {
                    return Err(Error::ComplexValue);
                }
                IPElement::Poly {
                    p: p.scale(&c.re),
                    a: a.clone(),
                    b: b.clone(),
                }
            }
        })
    }

    pub fn add(&self, other: &IPElement) -> Result<IPElement> {
        Ok(match (self, other) {
            (IPElement::Vec(x), IPElement::Vec(y)) => {
                check_len(x.len(), y.len())?;
                IPElement::Vec(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            (IPElement::VecF(x), IPElement::VecF(y)) => {
                check_len(x.len(), y.len())?;
                IPElement::VecF(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            (IPElement::Step { t, m }, IPElement::Step { t: s, m: n }) => {
                same_measure(m, n)?;
                IPElement::Step {
                    t: t.add(s)?,
                    m: m.clone(),
                }
            }
            (IPElement::Poly { p, a, b }, IPElement::Poly { p: q, a: c, b: d }) => {
                same_interval((a, b), (c, d))?;
                IPElement::Poly {
                    p: p.add(q),
                    a: a.clone(),
                    b: b.clone(),
                }
            }
            _ => return Err(mismatch(self, other)),
        })
    }

    pub fn sub(&self, other: &IPElement) -> Result<IPElement> {
        self.add(&other.scale(&IPValue::Exact(StepValue::real(-Rational::one())))?)
    }

    /// `‖x‖ = √⟨x, x⟩`
    pub fn norm(&self) -> Result<f64> {
        Ok(inner(self, self)?.to_complex().re.max(0.0).sqrt())
    }
}

fn same_measure(m: &BoxMeasure, n: &BoxMeasure) -> Result<()> {
    if m == n {
        Ok(())
    } else {
        Err(Error::CarrierMismatch(format!("measures {m} and {n} differ")))
    }
}

fn same_interval(x: (&Rational, &Rational), y: (&Rational, &Rational)) -> Result<()> {
    if x == y {
        Ok(())
    } else {
        Err(Error::CarrierMismatch(format!(
            "intervals [{}, {}] and [{}, {}] differ",
            x.0, x.1, y.0, y.1
        )))
    }
}

/// `⟨x, y⟩`, linear in `x` and conjugate-linear in `y`.
pub fn inner(x: &IPElement, y: &IPElement) -> Result<IPValue> {
    match (x, y) {
        (IPElement::Vec(a), IPElement::Vec(b)) => {
            check_len(a.len(), b.len())?;
            Ok(IPValue::Exact(a.iter().zip(b).map(|(u, v)| u * &v.conj()).sum()))
        }
        (IPElement::VecF(a), IPElement::VecF(b)) => {
            check_len(a.len(), b.len())?;
            let mut re = Compensated::default();
            let mut im = Compensated::default();
            for (u, v) in a.iter().zip(b) {
                let z = u * v.conj();
                re.add(z.re);
                im.add(z.im);
            }
            Ok(IPValue::Float(Complex64::new(re.value(), im.value())))
        }
        (IPElement::Step { t, m }, IPElement::Step { t: s, m: n }) => {
            same_measure(m, n)?;
            Ok(IPValue::Exact(t.mul(&s.conj())?.integral(m)?))
        }
        (IPElement::Poly { p, a, b }, IPElement::Poly { p: q, a: c, b: d }) => {
            same_interval((a, b), (c, d))?;
            Ok(IPValue::Exact(StepValue::real(p.mul(q).integrate(a, b))))
        }
        _ => Err(mismatch(x, y)),
    }
}

/// `⟨x,x⟩⟨y,y⟩ − |⟨x,y⟩|²`
pub fn cs_slack(x: &IPElement, y: &IPElement) -> Result<f64> {
    let xx = inner(x, x)?;
    let yy = inner(y, y)?;
    let xy = inner(x, y)?;
    Ok(xx.mul(&yy).sub(&xy.norm_sqr()).to_complex().re)
}

/// `|‖x+y‖² + ‖x−y‖² − 2‖x‖² − 2‖y‖²|`
pub fn parallelogram_residual(x: &IPElement, y: &IPElement) -> Result<f64> {
    let s = x.add(y)?;
    let d = x.sub(y)?;
    let two = IPValue::Exact(StepValue::real(Rational::from_integer(2.into())));
    let lhs = inner(&s, &s)?.add(&inner(&d, &d)?);
    let rhs = two.mul(&inner(x, x)?.add(&inner(y, y)?));
    Ok(lhs.sub(&rhs).abs())
}

/// Checks `|⟨x_i, x_j⟩| ≤ tol` for `i ≠ j` (exact zero for exact carriers).
fn check_orthogonal(family: &[IPElement], tol: f64) -> Result<()> {
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let v = inner(&family[i], &family[j])?;
            let bad = match &v {
                IPValue::Exact(e) => !e.is_zero(),
                IPValue::Float(z) => z.norm() > tol,
            };
            if bad {
                return Err(Error::NotOrthogonal {
                    i,
                    j,
                    value: v.abs(),
                });
            }
        }
    }
    Ok(())
}

/// `|‖Σ c_i x_i‖² − Σ |c_i|² ‖x_i‖²|` for a pairwise orthogonal family.
pub fn pythagoras_residual(family: &[IPElement], coefficients: &[IPValue], tol: f64) -> Result<f64> {
    check_len(family.len(), coefficients.len())?;
    let Some(first) = family.first() else {
        return Ok(0.0);
    };
    check_orthogonal(family, tol)?;
    let mut sum = first.zero_like();
    let mut rhs = IPValue::Exact(StepValue::zero());
    for (x, c) in family.iter().zip(coefficients) {
        let cx = x.scale(c)?;
        rhs = rhs.add(&inner(&cx, &cx)?);
        sum = sum.add(&cx)?;
    }
    Ok(inner(&sum, &sum)?.sub(&rhs).abs())
}

/// Threshold on `‖u_i‖ / ‖x_i‖` below which Gram–Schmidt declares dependence.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct OrthonormalFamily {
    /// The normalized vectors `e_i`.
    pub elements: Vec<IPElement>,
    /// Pairwise orthogonal vectors with `e_i = u_i / ‖u_i‖`, exact for exact
    /// carriers.
    pub orthogonal: Vec<IPElement>,
    /// `max |⟨e_i, e_j⟩ − δ_ij|`
    pub gram_residual: f64,
}

fn gram_residual(es: &[IPElement]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..es.len() {
        for j in i..es.len() {
            let mut z = inner(&es[i], &es[j])?.to_complex();
            if i == j {
                z -= 1.0;
            }
            worst = worst.max(z.norm());
        }
    }
    Ok(worst)
}

impl OrthonormalFamily {
    /// Wraps a family that is already orthonormal up to `tol`.
    pub fn from_orthonormal(elements: Vec<IPElement>, tol: f64) -> Result<Self> {
        for i in 0..elements.len() {
            for j in i..elements.len() {
                let mut z = inner(&elements[i], &elements[j])?.to_complex();
                if i == j {
                    z -= 1.0;
                }
                if z.norm() > tol {
                    return Err(Error::NotOrthogonal { i, j, value: z.norm() });
                }
            }
        }
        let gram_residual = gram_residual(&elements)?;
        Ok(OrthonormalFamily {
            orthogonal: elements.clone(),
            elements,
            gram_residual,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Gram–Schmidt `u_i = x_i − Σ_{j<i} ⟨x_i, u_j⟩/⟨u_j, u_j⟩ u_j`,
/// `e_i = u_i/‖u_i‖`, together with the upper-triangular table
/// `r[j][i] = ⟨x_i, e_j⟩` (`j ≤ i`) so that `x_i = Σ_j r[j][i] e_j`.
pub fn gram_schmidt(xs: &[IPElement]) -> Result<(OrthonormalFamily, Vec<Vec<Complex64>>)> {
    let mut us: Vec<IPElement> = Vec::with_capacity(xs.len());
    let mut uu: Vec<IPValue> = Vec::with_capacity(xs.len());
    let mut es = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        if let Some(first) = xs.first() {
            if kind(first) != kind(x) {
                return Err(mismatch(first, x));
            }
        }
        let mut u = x.clone();
        for (uj, nj) in us.iter().zip(&uu) {
            let c = inner(x, uj)?.div_real(nj);
            u = u.sub(&uj.scale(&c)?)?;
        }
        let x_norm = x.norm()?;
        let u_norm_sq = inner(&u, &u)?;
        let u_norm = u_norm_sq.to_complex().re.max(0.0).sqrt();
        let ratio = if x_norm > 0.0 { u_norm / x_norm } else { 0.0 };
        if ratio <= DEPENDENCE_THRESHOLD {
            return Err(Error::LinearDependence { index: i, ratio });
        }
        es.push(u.scale(&IPValue::Float(Complex64::new(1.0 / u_norm, 0.0)))?);
        us.push(u);
        uu.push(u_norm_sq);
    }
    let mut table = vec![vec![Complex64::zero(); xs.len()]; xs.len()];
    for (i, x) in xs.iter().enumerate() {
        for j in 0..=i {
            table[j][i] = inner(x, &es[j])?.to_complex();
        }
    }
    let gram_residual = gram_residual(&es)?;
    Ok((
        OrthonormalFamily {
            elements: es,
            orthogonal: us,
            gram_residual,
        },
        table,
    ))
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub projection: IPElement,
    /// `⟨x, e_i⟩`
    pub coefficients: Vec<Complex64>,
    /// `‖x − π(x)‖`
    pub defect: f64,
}

/// Orthogonal projection onto the span of `family`, computed through the
/// (exact, for exact carriers) orthogonal vectors `u_i`.
pub fn project(x: &IPElement, family: &OrthonormalFamily) -> Result<Projection> {
    let mut proj = x.zero_like();
    let mut coefficients = Vec::with_capacity(family.len());
    for (u, e) in family.orthogonal.iter().zip(&family.elements) {
        let uu = inner(u, u)?;
        let c = inner(x, u)?.div_real(&uu);
        proj = proj.add(&u.scale(&c)?)?;
        coefficients.push(inner(x, e)?.to_complex());
    }
    let r = x.sub(&proj)?;
    Ok(Projection {
        defect: r.norm()?,
        projection: proj,
        coefficients,
    })
}

/// `‖Σ a_i e_i − x‖`
pub fn defect_for(x: &IPElement, family: &OrthonormalFamily, coeffs: &[Complex64]) -> Result<f64> {
    check_len(family.len(), coeffs.len())?;
    let mut y = x.zero_like();
    for (e, a) in family.elements.iter().zip(coeffs) {
        y = y.add(&e.scale(&IPValue::Float(*a))?)?;
    }
    y.sub(x)?.norm()
}

/// Smallest `defect(perturbed) − defect(projection)` over `trials` random
/// perturbations of the coefficients of size up to `scale`; non-negative
/// (up to rounding) when the projection is the best approximation.
pub fn minimality_margin(
    x: &IPElement,
    family: &OrthonormalFamily,
    proj: &Projection,
    trials: usize,
    scale: f64,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = defect_for(x, family, &proj.coefficients)?;
    let real_space = matches!(x, IPElement::Poly { .. });
    let mut margin = f64::INFINITY;
    for _ in 0..trials {
        let perturbed: Vec<Complex64> = proj
            .coefficients
            .iter()
            .map(|c| {
                let re = rng.random_range(-scale..=scale);
                let im = if real_space { 0.0 } else { rng.random_range(-scale..=scale) };
                let d = Complex64::new(re, im);
                c + d
            })
            .collect();
        margin = margin.min(defect_for(x, family, &perturbed)? - base);
    }
    Ok(margin)
}

fn check_fourier_ambient(t: &StepFunction) -> Result<()> {
    let expected = crate::geometry::Quader::closed_box(&[(-Rational::one(), Rational::one())]);
    if t.ambient() != &expected {
        return Err(Error::AmbientMismatch(
            t.ambient().to_string(),
            format!("{expected} (units of pi)"),
        ));
    }
    Ok(())
}

/// `e^{-i k s π}` with the angle reduced exactly modulo `2π`.
fn unit_phase(k: i64, s: &Rational) -> Complex64 {
    let two = Rational::from_integer(2.into());
    let turns = Rational::from_integer(k.into()) * s;
    let reduced = &turns - (&turns / &two).floor() * &two;
    let theta = to_f64(&reduced) * std::f64::consts::PI;
    Complex64::new(theta.cos(), -theta.sin())
}

/// Coefficients `c_k = ⟨t, e^{ikx}/√(2π)⟩` on `[−π, π]`, `|k| ≤ kmax`.
///
/// `t` is given in units of `π`: its ambient must be `[−1, 1]`, and a term on
/// `[a, b]` stands for `[aπ, bπ]`, so endpoints stay exact.
pub fn fourier_coeffs(t: &StepFunction, kmax: u32) -> Result<Vec<(i64, Complex64)>> {
    check_fourier_ambient(t)?;
    let pi = std::f64::consts::PI;
    let norm = 1.0 / (2.0 * pi).sqrt();
    let kmax = kmax as i64;
    let mut out = Vec::with_capacity(2 * kmax as usize + 1);
    for k in -kmax..=kmax {
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for (q, v) in t.terms() {
            let i = q.factor(0);
            let (a, b) = (i.inf().unwrap(), i.sup().unwrap());
            let alpha = v.to_complex();
            let integral = if k == 0 {
                Complex64::new(to_f64(&(b - a)) * pi, 0.0)
            } else {
                (unit_phase(k, b) - unit_phase(k, a)) / Complex64::new(0.0, -(k as f64))
            };
            let z = alpha * integral;
            re.add(z.re);
            im.add(z.im);
        }
        out.push((k, Complex64::new(re.value(), im.value()) * norm));
    }
    Ok(out)
}

/// `‖t‖₂²` on `[−π, π]` for `t` in units of `π`.
pub fn fourier_norm_sqr(t: &StepFunction) -> Result<f64> {
    check_fourier_ambient(t)?;
    let exact: Rational = t
        .terms()
        .iter()
        .map(|(q, v)| v.norm_sqr() * q.factor(0).length().unwrap())
        .sum();
    Ok(to_f64(&exact) * std::f64::consts::PI)
}

/// `Σ_{|k| ≤ K} |c_k|²` for `K = 0..=kmax`.
pub fn bessel_partial_sums(t: &StepFunction, kmax: u32) -> Result<Vec<f64>> {
    let coeffs = fourier_coeffs(t, kmax)?;
    let centre = kmax as usize;
    let mut acc = Compensated::default();
    let mut out = Vec::with_capacity(centre + 1);
    acc.add(coeffs[centre].1.norm_sqr());
    out.push(acc.value());
    for k in 1..=centre {
        acc.add(coeffs[centre + k].1.norm_sqr());
        acc.add(coeffs[centre - k].1.norm_sqr());
        out.push(acc.value());
    }
    Ok(out)
}

/// `‖t‖₂² − Σ_{|k| ≤ kmax} |c_k|²`
pub fn parseval_gap(t: &StepFunction, kmax: u32) -> Result<f64> {
    let sums = bessel_partial_sums(t, kmax)?;
    Ok(fourier_norm_sqr(t)? - sums.last().copied().unwrap_or(0.0))
}

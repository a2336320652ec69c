//! TOML documents for measures, step functions, oracles, sets, families,
//! matrices, polytopes and contraction maps.
//!
//! Geometric and numeric leaves use the inline notation of [`crate::text`]
//! and are written as TOML strings, e.g. `quader = "[0,1]x]0,2["` or
//! `value = "1/2-1 i"`. Errors point at the offending line and column of the
//! document.
//!
//! ```toml
//! # measure
//! kind = "product"
//! factors = [{ kind = "volume", dim = 1 }, { kind = "dirac", dim = 1 }]
//!
//! # discrete measure
//! kind = "discrete"
//! dim = 1
//! points = [{ at = "(0)", mass = "1" }, { at = "(1)", mass = "1/2" }]
//!
//! # Stieltjes weight: breakpoints c_1 < … < c_m, affine pieces on the m+1
//! # gaps, optional values g(c_i) (right limits by default)
//! kind = "stieltjes"
//! breakpoints = ["0"]
//! pieces = [{ intercept = "0", slope = "0" }, { intercept = "1", slope = "0" }]
//!
//! # step function
//! ambient = "[-1,1]"
//! terms = [{ quader = "[0,1]", value = "1" }]
//!
//! # oracle: const, poly, exp, sin, cos, indicator, axis, sum, product
//! kind = "poly"
//! coeffs = ["0", "0", "1"]
//! ```

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, ParseError, Result};
use crate::geometry::{Parkettable, Quader};
use crate::hilbert::IPElement;
use crate::integrate::Oracle;
use crate::measures::{Affine, BoxMeasure, StieltjesWeight};
use crate::operators::{ContractionSpec, Halfspaces, Matrix};
use crate::poly::Polynomial;
use crate::rational::{fmt_pq, parse_rational, Rational};
use crate::stepfn::{StepFunction, StepValue};
use crate::text::{parse_point, parse_quader, parse_value};

type S = Spanned<String>;

/// 1-based line and column of a byte offset.
pub fn location(src: &str, byte: usize) -> (usize, usize) {
    let byte = byte.min(src.len());
    let mut start = byte;
    while !src.is_char_boundary(start) {
        start -= 1;
    }
    let before = &src[..start];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

struct Doc<'a> {
    src: &'a str,
}

impl<'a> Doc<'a> {
    fn parse<T: serde::de::DeserializeOwned>(src: &'a str) -> Result<(Doc<'a>, T)> {
        let doc = Doc { src };
        match toml::from_str::<T>(src) {
            Ok(v) => Ok((doc, v)),
            Err(e) => {
                let (line, column) = e.span().map_or((1, 1), |r| location(src, r.start));
                Err(ParseError::new(line, column, e.message().trim().to_string()).into())
            }
        }
    }

    /// Re-anchors an error from an inline string parser at its position in
    /// the document.
    fn relocate(&self, s: &S, e: ParseError) -> Error {
        let text = s.get_ref();
        let inner = text
            .char_indices()
            .nth(e.column.saturating_sub(1))
            .map_or(text.len(), |(i, _)| i);
        let (line, column) = location(self.src, s.span().start + 1 + inner);
        ParseError::new(line, column, e.message).into()
    }

    fn err_at(&self, s: &S, msg: impl Into<String>) -> Error {
        let (line, column) = location(self.src, s.span().start);
        ParseError::new(line, column, msg).into()
    }

    fn missing(&self, what: &str, ctx: &S) -> Error {
        self.err_at(ctx, format!("missing field '{what}' for kind '{}'", ctx.get_ref()))
    }

    fn rational(&self, s: &S) -> Result<Rational> {
        parse_rational(s.get_ref()).map_err(|e| self.relocate(s, e))
    }

    fn quader(&self, s: &S) -> Result<Quader> {
        parse_quader(s.get_ref()).map_err(|e| self.relocate(s, e))
    }

    fn value(&self, s: &S) -> Result<StepValue> {
        parse_value(s.get_ref()).map_err(|e| self.relocate(s, e))
    }

    fn point(&self, s: &S) -> Result<Vec<Rational>> {
        parse_point(s.get_ref()).map_err(|e| self.relocate(s, e))
    }

    fn rationals(&self, v: &[S]) -> Result<Vec<Rational>> {
        v.iter().map(|s| self.rational(s)).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    at: S,
    mass: S,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineDoc {
    intercept: S,
    slope: S,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    kind: S,
    dim: Option<usize>,
    points: Option<Vec<PointDoc>>,
    breakpoints: Option<Vec<S>>,
    pieces: Option<Vec<AffineDoc>>,
    values: Option<Vec<S>>,
    factors: Option<Vec<MeasureDoc>>,
}

const MAX_DIM: usize = 64;

fn dim_of(doc: &Doc<'_>, m: &MeasureDoc) -> Result<usize> {
    match m.dim {
        Some(d) if (1..=MAX_DIM).contains(&d) => Ok(d),
        Some(d) => Err(doc.err_at(&m.kind, format!("dimension {d} out of range 1..={MAX_DIM}"))),
        None => Ok(1),
    }
}

fn measure_from(doc: &Doc<'_>, m: &MeasureDoc) -> Result<BoxMeasure> {
    match m.kind.get_ref().as_str() {
        "volume" => Ok(BoxMeasure::volume(dim_of(doc, m)?)),
        "volume-product" => Ok(BoxMeasure::volume_product(dim_of(doc, m)?)),
        "dirac" => Ok(BoxMeasure::dirac(dim_of(doc, m)?)),
        "discrete" => {
            let dim = dim_of(doc, m)?;
            let pts = m.points.as_ref().ok_or_else(|| doc.missing("points", &m.kind))?;
            let mut out = Vec::with_capacity(pts.len());
            for p in pts {
                let at = doc.point(&p.at)?;
                if at.len() != dim {
                    return Err(doc.err_at(
                        &p.at,
                        format!("point has {} coordinates, expected {dim}", at.len()),
                    ));
                }
                out.push((at, doc.rational(&p.mass)?));
            }
            BoxMeasure::discrete(dim, out)
        }
        "stieltjes" => {
            let breakpoints = doc.rationals(m.breakpoints.as_deref().unwrap_or(&[]))?;
            let pieces = m
                .pieces
                .as_ref()
                .ok_or_else(|| doc.missing("pieces", &m.kind))?
                .iter()
                .map(|a| Ok(Affine::new(doc.rational(&a.intercept)?, doc.rational(&a.slope)?)))
                .collect::<Result<Vec<_>>>()?;
            let values = match &m.values {
                Some(v) => doc.rationals(v)?,
                None => breakpoints
                    .iter()
                    .zip(pieces.iter().skip(1))
                    .map(|(c, a)| a.eval(c))
                    .collect(),
            };
            Ok(BoxMeasure::stieltjes(StieltjesWeight::new(breakpoints, pieces, values)?))
        }
        "product" => {
            let f = m.factors.as_ref().ok_or_else(|| doc.missing("factors", &m.kind))?;
            if f.len() < 2 {
                return Err(doc.err_at(&m.kind, "a product needs at least two factors"));
            }
            let mut acc = measure_from(doc, &f[0])?;
            for g in &f[1..] {
                acc = BoxMeasure::product(acc, measure_from(doc, g)?);
            }
            Ok(acc)
        }
        other => Err(doc.err_at(&m.kind, format!("unknown measure kind '{other}'"))),
    }
}

pub fn parse_measure_doc(src: &str) -> Result<BoxMeasure> {
    let (doc, m) = Doc::parse::<MeasureDoc>(src)?;
    measure_from(&doc, &m)
}

/// A Stieltjes weight document (a measure document of kind `stieltjes`).
pub fn parse_weight_doc(src: &str) -> Result<StieltjesWeight> {
    match parse_measure_doc(src)? {
        BoxMeasure::Stieltjes(w) => Ok(w),
        other => Err(Error::InvalidMeasure(format!("expected a Stieltjes weight, got {other}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    quader: S,
    value: S,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    ambient: S,
    #[serde(default)]
    terms: Vec<TermDoc>,
    measure: Option<MeasureDoc>,
}

fn terms_from(doc: &Doc<'_>, terms: &[TermDoc]) -> Result<Vec<(Quader, StepValue)>> {
    terms
        .iter()
        .map(|t| Ok((doc.quader(&t.quader)?, doc.value(&t.value)?)))
        .collect()
}

/// A step function and the measure attached to it, if any.
pub fn parse_step_doc(src: &str) -> Result<(StepFunction, Option<BoxMeasure>)> {
    let (doc, s) = Doc::parse::<StepDoc>(src)?;
    let ambient = doc.quader(&s.ambient)?;
    let t = StepFunction::new(ambient, terms_from(&doc, &s.terms)?)?;
    let m = s.measure.as_ref().map(|m| measure_from(&doc, m)).transpose()?;
    Ok((t, m))
}

pub fn step_to_toml(t: &StepFunction) -> String {
    let mut out = format!("ambient = \"{}\"\nterms = [\n", t.ambient());
    for (q, v) in t.terms() {
        out.push_str(&format!("  {{ quader = \"{q}\", value = \"{v}\" }},\n"));
    }
    out.push_str("]\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleDoc {
    kind: S,
    dim: Option<usize>,
    value: Option<S>,
    coeffs: Option<Vec<S>>,
    quader: Option<S>,
    axis: Option<usize>,
    inner: Option<Box<OracleDoc>>,
    parts: Option<Vec<OracleDoc>>,
}

fn oracle_from(doc: &Doc<'_>, o: &OracleDoc) -> Result<Oracle> {
    let dim = || match o.dim {
        Some(d) if (1..=MAX_DIM).contains(&d) => Ok(d),
        Some(d) => Err(doc.err_at(&o.kind, format!("dimension {d} out of range 1..={MAX_DIM}"))),
        None => Ok(1),
    };
    match o.kind.get_ref().as_str() {
        "const" => {
            let v = o.value.as_ref().ok_or_else(|| doc.missing("value", &o.kind))?;
            Ok(Oracle::constant(dim()?, doc.rational(v)?))
        }
        "poly" => {
            let c = o.coeffs.as_ref().ok_or_else(|| doc.missing("coeffs", &o.kind))?;
            Ok(Oracle::poly(Polynomial::new(doc.rationals(c)?)))
        }
        "exp" => Ok(Oracle::Exp),
        "sin" => Ok(Oracle::Sin),
        "cos" => Ok(Oracle::Cos),
        "indicator" => {
            let q = o.quader.as_ref().ok_or_else(|| doc.missing("quader", &o.kind))?;
            let q = doc.quader(q)?;
            if !q.is_bounded() {
                return Err(Error::Unbounded(q.to_string()));
            }
            Ok(Oracle::Indicator(q))
        }
        "axis" => {
            let inner = o.inner.as_ref().ok_or_else(|| doc.missing("inner", &o.kind))?;
            let axis = o.axis.ok_or_else(|| doc.missing("axis", &o.kind))?;
            Oracle::axis(dim()?, axis, oracle_from(doc, inner)?)
        }
        "sum" | "product" => {
            let parts = o.parts.as_ref().ok_or_else(|| doc.missing("parts", &o.kind))?;
            let parts = parts
                .iter()
                .map(|p| oracle_from(doc, p))
                .collect::<Result<Vec<_>>>()?;
            if o.kind.get_ref() == "sum" {
                Oracle::sum(parts)
            } else {
                Oracle::product(parts)
            }
        }
        other => Err(doc.err_at(&o.kind, format!("unknown oracle kind '{other}'"))),
    }
}

pub fn parse_oracle_doc(src: &str) -> Result<Oracle> {
    let (doc, o) = Doc::parse::<OracleDoc>(src)?;
    oracle_from(&doc, &o)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDoc {
    quaders: Vec<S>,
}

/// A list of quaders, `quaders = ["]0,1[", …]`.
pub fn parse_set_doc(src: &str) -> Result<Vec<Quader>> {
    let (doc, s) = Doc::parse::<SetDoc>(src)?;
    let qs = s
        .quaders
        .iter()
        .map(|q| doc.quader(q))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = qs.first() {
        for q in &qs {
            if q.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: q.dim(),
                });
            }
        }
    }
    Ok(qs)
}

/// The union of a set document's quaders as a parkettable set.
pub fn set_to_parkettable(qs: &[Quader]) -> Result<Parkettable> {
    let Some(first) = qs.first() else {
        return Err(Error::EmptyDomain);
    };
    let mut p = Parkettable::empty(first.dim());
    for q in qs {
        p = p.union_disjoint(&Parkettable::from_quader(q.clone())?)?;
    }
    Ok(p)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepTermsDoc {
    #[serde(default)]
    terms: Vec<TermDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    carrier: S,
    interval: Option<S>,
    ambient: Option<S>,
    measure: Option<MeasureDoc>,
    elements: Option<Vec<Vec<S>>>,
    steps: Option<Vec<StepTermsDoc>>,
    target: Option<Vec<S>>,
    target_step: Option<StepTermsDoc>,
}

/// Elements of one inner product space plus an optional element to project.
#[derive(Clone, Debug)]
pub struct Family {
    pub elements: Vec<IPElement>,
    pub target: Option<IPElement>,
}

pub fn parse_family_doc(src: &str) -> Result<Family> {
    let (doc, f) = Doc::parse::<FamilyDoc>(src)?;
    match f.carrier.get_ref().as_str() {
        "vec" => {
            let make = |row: &[S]| -> Result<IPElement> {
                Ok(IPElement::Vec(row.iter().map(|s| doc.value(s)).collect::<Result<_>>()?))
            };
            let rows = f.elements.as_ref().ok_or_else(|| doc.missing("elements", &f.carrier))?;
            Ok(Family {
                elements: rows.iter().map(|r| make(r)).collect::<Result<_>>()?,
                target: f.target.as_deref().map(make).transpose()?,
            })
        }
        "poly" => {
            let iv = f.interval.as_ref().ok_or_else(|| doc.missing("interval", &f.carrier))?;
            let q = doc.quader(iv)?;
            let i = q.factor(0);
            let (Some(a), Some(b)) = (i.inf(), i.sup()) else {
                return Err(doc.err_at(iv, "interval must be bounded and non-empty"));
            };
            if q.dim() != 1 {
                return Err(doc.err_at(iv, "interval must be one-dimensional"));
            }
            let make = |row: &[S]| -> Result<IPElement> {
                IPElement::poly(Polynomial::new(doc.rationals(row)?), a.clone(), b.clone())
            };
            let rows = f.elements.as_ref().ok_or_else(|| doc.missing("elements", &f.carrier))?;
            Ok(Family {
                elements: rows.iter().map(|r| make(r)).collect::<Result<_>>()?,
                target: f.target.as_deref().map(make).transpose()?,
            })
        }
        "step" => {
            let amb = f.ambient.as_ref().ok_or_else(|| doc.missing("ambient", &f.carrier))?;
            let ambient = doc.quader(amb)?;
            let m = match &f.measure {
                Some(m) => measure_from(&doc, m)?,
                None => BoxMeasure::volume(ambient.dim()),
            };
            let make = |t: &StepTermsDoc| -> Result<IPElement> {
                let t = StepFunction::new(ambient.clone(), terms_from(&doc, &t.terms)?)?;
                IPElement::step(t, m.clone())
            };
            let steps = f.steps.as_ref().ok_or_else(|| doc.missing("steps", &f.carrier))?;
            Ok(Family {
                elements: steps.iter().map(make).collect::<Result<_>>()?,
                target: f.target_step.as_ref().map(make).transpose()?,
            })
        }
        other => Err(doc.err_at(&f.carrier, format!("unknown carrier '{other}'"))),
    }
}

/// Writes a family back in the document format; float vectors are written
/// as exact vectors of their binary values.
pub fn family_to_toml(elements: &[IPElement]) -> Result<String> {
    let Some(first) = elements.first() else {
        return Ok("carrier = \"vec\"\nelements = []\n".into());
    };
    let quote = |v: Vec<String>| {
        v.into_iter()
            .map(|s| format!("\"{s}\""))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = String::new();
    match first {
        IPElement::Vec(_) | IPElement::VecF(_) => {
            out.push_str("carrier = \"vec\"\nelements = [\n");
            for e in elements {
                let vals: Vec<String> = match e {
                    IPElement::Vec(v) => v.iter().map(|x| x.to_string()).collect(),
                    IPElement::VecF(v) => v
                        .iter()
                        .map(|z| {
                            let conv = |x: f64| {
                                crate::rational::from_f64(x)
                                    .ok_or_else(|| Error::Overflow(format!("non-finite entry {x}")))
                            };
                            Ok(StepValue::new(conv(z.re)?, conv(z.im)?).to_string())
                        })
                        .collect::<Result<_>>()?,
                    _ => return Err(Error::CarrierMismatch("mixed family".into())),
                };
                out.push_str(&format!("  [{}],\n", quote(vals)));
            }
            out.push_str("]\n");
        }
        IPElement::Poly { a, b, .. } => {
            out.push_str(&format!(
                "carrier = \"poly\"\ninterval = \"[{},{}]\"\nelements = [\n",
                fmt_pq(a),
                fmt_pq(b)
            ));
            for e in elements {
                let IPElement::Poly { p, .. } = e else {
                    return Err(Error::CarrierMismatch("mixed family".into()));
                };
                out.push_str(&format!("  [{}],\n", quote(p.coeffs().iter().map(fmt_pq).collect())));
            }
            out.push_str("]\n");
        }
        IPElement::Step { t, m } => {
            out.push_str(&format!("carrier = \"step\"\nambient = \"{}\"\n", t.ambient()));
            out.push_str(&measure_to_toml_inline(m).map_or(String::new(), |s| format!("measure = {s}\n")));
            for e in elements {
                let IPElement::Step { t, .. } = e else {
                    return Err(Error::CarrierMismatch("mixed family".into()));
                };
                out.push_str("[[steps]]\nterms = [\n");
                for (q, v) in t.terms() {
                    out.push_str(&format!("  {{ quader = \"{q}\", value = \"{v}\" }},\n"));
                }
                out.push_str("]\n");
            }
        }
    }
    Ok(out)
}

/// Inline-table form of a measure, where one exists.
pub fn measure_to_toml_inline(m: &BoxMeasure) -> Option<String> {
    Some(match m {
        BoxMeasure::Volume(n) => format!("{{ kind = \"volume\", dim = {n} }}"),
        BoxMeasure::Discrete(mp) => {
            let pts: Vec<String> = mp
                .points()
                .iter()
                .map(|(p, w)| {
                    let c: Vec<String> = p.iter().map(fmt_pq).collect();
                    format!("{{ at = \"({})\", mass = \"{}\" }}", c.join(","), fmt_pq(w))
                })
                .collect();
            format!(
                "{{ kind = \"discrete\", dim = {}, points = [{}] }}",
                mp.dim(),
                pts.join(", ")
            )
        }
        BoxMeasure::Stieltjes(w) => {
            let bps: Vec<String> = w.breakpoints().iter().map(|c| format!("\"{}\"", fmt_pq(c))).collect();
            let pcs: Vec<String> = w
                .pieces()
                .iter()
                .map(|a| {
                    format!(
                        "{{ intercept = \"{}\", slope = \"{}\" }}",
                        fmt_pq(&a.intercept),
                        fmt_pq(&a.slope)
                    )
                })
                .collect();
            let vals: Vec<String> = w.values().iter().map(|c| format!("\"{}\"", fmt_pq(c))).collect();
            format!(
                "{{ kind = \"stieltjes\", breakpoints = [{}], pieces = [{}], values = [{}] }}",
                bps.join(", "),
                pcs.join(", "),
                vals.join(", ")
            )
        }
        BoxMeasure::Product(a, b) => format!(
            "{{ kind = \"product\", factors = [{}, {}] }}",
            measure_to_toml_inline(a)?,
            measure_to_toml_inline(b)?
        ),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    rows: Spanned<Vec<Vec<f64>>>,
}

pub fn parse_matrix_doc(src: &str) -> Result<Matrix> {
    let (doc, m) = Doc::parse::<MatrixDoc>(src)?;
    Matrix::from_rows(m.rows.get_ref()).map_err(|e| {
        let (line, column) = location(doc.src, m.rows.span().start);
        ParseError::new(line, column, e.to_string()).into()
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfspacesDoc {
    rows: Vec<Vec<f64>>,
    bounds: Vec<f64>,
    point: Option<Vec<f64>>,
}

/// A polytope `{x : a_i·x ≤ b_i}` and an optional evaluation point.
pub fn parse_halfspaces_doc(src: &str) -> Result<(Halfspaces, Option<Vec<f64>>)> {
    let (_, h) = Doc::parse::<HalfspacesDoc>(src)?;
    Ok((Halfspaces::new(h.rows, h.bounds)?, h.point))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContractionDoc {
    map: S,
    factor: f64,
    start: Vec<f64>,
    matrix: Option<Vec<Vec<f64>>>,
    offset: Option<Vec<f64>>,
}

/// The self-maps a contraction document can name.
#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    /// `x ↦ (cos x_1, …, cos x_n)`
    Cos,
    /// `x ↦ A x + b`
    Affine { matrix: Matrix, offset: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub map: MapKind,
    pub factor: f64,
    pub start: Vec<f64>,
}

impl Contraction {
    pub fn spec(&self) -> ContractionSpec<'_> {
        let map: Box<dyn Fn(&[f64]) -> Vec<f64> + '_> = match &self.map {
            MapKind::Cos => Box::new(|x: &[f64]| x.iter().map(|v| v.cos()).collect()),
            MapKind::Affine { matrix, offset } => Box::new(move |x: &[f64]| {
                matrix
                    .apply(x)
                    .iter()
                    .zip(offset)
                    .map(|(a, b)| a + b)
                    .collect()
            }),
        };
        ContractionSpec {
            map,
            factor: self.factor,
            start: self.start.clone(),
        }
    }
}

pub fn parse_contraction_doc(src: &str) -> Result<Contraction> {
    let (doc, c) = Doc::parse::<ContractionDoc>(src)?;
    let map = match c.map.get_ref().as_str() {
        "cos" => MapKind::Cos,
        "affine" => {
            let rows = c.matrix.as_ref().ok_or_else(|| doc.missing("matrix", &c.map))?;
            let matrix = Matrix::from_rows(rows)?;
            let offset = c.offset.clone().unwrap_or_else(|| vec![0.0; matrix.dim()]);
            if offset.len() != matrix.dim() || c.start.len() != matrix.dim() {
                return Err(Error::DimensionMismatch {
                    expected: matrix.dim(),
                    found: if offset.len() != matrix.dim() { offset.len() } else { c.start.len() },
                });
            }
            MapKind::Affine { matrix, offset }
        }
        other => return Err(doc.err_at(&c.map, format!("unknown map '{other}'"))),
    };
    Ok(Contraction {
        map,
        factor: c.factor,
        start: c.start,
    })
}

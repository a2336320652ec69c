//! Seeded generators for boxes, parkettable sets and step functions.
//!
//! Every generator draws from a [`ChaCha8Rng`] seeded with a `u64`, so a
//! seed fixes the whole instance. Coordinates are multiples of `1/4` in
//! `[-4, 4]`, values are multiples of `1/2` in `[-3, 3]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Endpoint, Interval, Parkettable, Quader};
use crate::rational::Rational;
use crate::stepfn::{StepFunction, StepValue};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coord(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.random_range(-16i64..=16).into(), 4.into())
}

fn endpoint(rng: &mut impl Rng, v: Rational) -> Endpoint {
    if rng.random_bool(0.5) {
        Endpoint::closed(v)
    } else {
        Endpoint::open(v)
    }
}

/// A bounded interval with random end types; may be degenerate or empty.
pub fn interval(rng: &mut impl Rng) -> Interval {
    let a = coord(rng);
    let b = coord(rng);
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    Interval::new(endpoint(rng, a), endpoint(rng, b))
}

/// A bounded interval of positive length.
pub fn proper_interval(rng: &mut impl Rng) -> Interval {
    loop {
        let i = interval(rng);
        if i.length().is_some_and(|l| l > Rational::from_integer(0.into())) {
            return i;
        }
    }
}

pub fn quader(rng: &mut impl Rng, dim: usize) -> Quader {
    Quader::new((0..dim).map(|_| interval(rng)).collect()).expect("dim > 0")
}

/// A non-empty quader with positive volume.
pub fn proper_quader(rng: &mut impl Rng, dim: usize) -> Quader {
    Quader::new((0..dim).map(|_| proper_interval(rng)).collect()).expect("dim > 0")
}

/// A parkettable set built as the union of up to `max_pieces` random quaders.
pub fn parkettable(rng: &mut impl Rng, dim: usize, max_pieces: usize) -> Result<Parkettable> {
    let n = rng.random_range(1..=max_pieces.max(1));
    let mut p = Parkettable::empty(dim);
    for _ in 0..n {
        p = p.union_disjoint(&Parkettable::from_quader(quader(rng, dim))?)?;
    }
    Ok(p)
}

pub fn value(rng: &mut impl Rng, real: bool) -> StepValue {
    let part = |rng: &mut dyn rand::RngCore| {
        Rational::new(rng.random_range(-6i64..=6).into(), 2.into())
    };
    let re = part(rng);
    let im = if real {
        Rational::from_integer(0.into())
    } else {
        part(rng)
    };
    StepValue::new(re, im)
}

/// A real sequence of length `1..=max_len` with entries from [`value`].
pub fn sequence(rng: &mut impl Rng, max_len: usize) -> Vec<f64> {
    let len = rng.random_range(1..=max_len.max(1));
    (0..len).map(|_| value(rng, true).to_complex().re).collect()
}

/// The closed box `[-4, 4]^dim` in which all generated data lives.
pub fn ambient(dim: usize) -> Quader {
    let four = Rational::from_integer(4.into());
    Quader::closed_box(&vec![(-four.clone(), four); dim])
}

/// A step function on [`ambient`] with up to `max_terms` pieces.
pub fn step_function(
    rng: &mut impl Rng,
    dim: usize,
    max_terms: usize,
    real: bool,
) -> Result<StepFunction> {
    let support = parkettable(rng, dim, max_terms)?;
    let terms = support
        .into_pieces()
        .into_iter()
        .map(|q| (q, value(rng, real)))
        .collect();
    StepFunction::new(ambient(dim), terms)
}

/// A non-negative step function.
pub fn nonneg_step_function(rng: &mut impl Rng, dim: usize, max_terms: usize) -> Result<StepFunction> {
    let t = step_function(rng, dim, max_terms, true)?;
    t.abs()
}

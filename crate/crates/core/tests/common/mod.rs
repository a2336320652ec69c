#![allow(dead_code)]

use quaderint::rational::{int, ratio};
use quaderint::{
    random, Affine, BoxMeasure, Endpoint, Interval, Parkettable, Quader, Rational, StieltjesWeight,
};
use rand::Rng;
use proptest::test_runner::Config;
use rand_chacha::ChaCha8Rng;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    random::rng(seed)
}

/// A random non-decreasing weight with up to three breakpoints.
pub fn weight(rng: &mut ChaCha8Rng) -> StieltjesWeight {
    let mut bps: Vec<Rational> = (0..rng.random_range(0..=3))
        .map(|_| ratio(rng.random_range(-12..=12), 4))
        .collect();
    bps.sort();
    bps.dedup();
    let slope = |rng: &mut ChaCha8Rng| ratio(rng.random_range(0..=4), 2);
    let s0 = slope(rng);
    let mut pieces = vec![Affine::new(ratio(rng.random_range(-4..=4), 2), s0)];
    let mut values = Vec::new();
    for c in &bps {
        let left = pieces.last().unwrap().eval(c);
        let right = &left + ratio(rng.random_range(0..=3), 2);
        values.push(match rng.random_range(0..3) {
            0 => left.clone(),
            1 => right.clone(),
            _ => (&left + &right) / int(2),
        });
        let s = slope(rng);
        let intercept = &right - &s * c;
        pieces.push(Affine::new(intercept, s));
    }
    StieltjesWeight::new(bps, pieces, values).expect("monotone by construction")
}

/// A random one-dimensional measure from every family.
pub fn measure_1d(rng: &mut ChaCha8Rng) -> BoxMeasure {
    match rng.random_range(0..4) {
        0 => BoxMeasure::volume(1),
        1 => BoxMeasure::dirac(1),
        2 => {
            let mut at: Vec<i64> = (0..rng.random_range(1..=4))
                .map(|_| rng.random_range(-16..=16))
                .collect();
            at.sort();
            at.dedup();
            let pts = at
                .into_iter()
                .map(|a| (vec![ratio(a, 4)], ratio(rng.random_range(1..=6), 2)))
                .collect();
            BoxMeasure::discrete(1, pts).unwrap()
        }
        _ => BoxMeasure::stieltjes(weight(rng)),
    }
}

/// A product of random one-dimensional measures.
pub fn measure(rng: &mut ChaCha8Rng, dim: usize) -> BoxMeasure {
    let mut m = measure_1d(rng);
    for _ in 1..dim {
        m = BoxMeasure::product(m, measure_1d(rng));
    }
    m
}

/// A random quader contained in `outer`, built from sub-intervals of its
/// factors.
pub fn sub_quader(rng: &mut ChaCha8Rng, outer: &Quader) -> Quader {
    let factors = outer
        .factors()
        .iter()
        .map(|f| {
            let (a, b) = (f.inf().unwrap().clone(), f.sup().unwrap().clone());
            let t1 = ratio(rng.random_range(0..=4), 4);
            let t2 = ratio(rng.random_range(0..=4), 4);
            let (t1, t2) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let lo = &a + (&b - &a) * t1;
            let hi = &a + (&b - &a) * t2;
            let end = |v: Rational, closed: bool| {
                if closed {
                    Endpoint::closed(v)
                } else {
                    Endpoint::open(v)
                }
            };
            let i = Interval::new(end(lo, rng.random_bool(0.5)), end(hi, rng.random_bool(0.5)));
            if i.is_subset(f) {
                i
            } else {
                f.intersect(&i)
            }
        })
        .collect();
    Quader::new(factors).unwrap()
}

/// The smallest quader (with endpoint types) containing a non-empty
/// bounded family; the family unites to a quader iff it set-equals this.
pub fn hull(pieces: &[Quader]) -> Quader {
    let live: Vec<&Quader> = pieces.iter().filter(|q| !q.is_empty()).collect();
    let dim = live[0].dim();
    let factors = (0..dim)
        .map(|i| {
            let lo = live.iter().map(|q| q.factor(i).inf().unwrap()).min().unwrap().clone();
            let hi = live.iter().map(|q| q.factor(i).sup().unwrap()).max().unwrap().clone();
            let lo_closed = live.iter().any(|q| {
                q.factor(i).inf() == Some(&lo) && q.factor(i).lower().is_some_and(|e| e.is_closed())
            });
            let hi_closed = live.iter().any(|q| {
                q.factor(i).sup() == Some(&hi) && q.factor(i).upper().is_some_and(|e| e.is_closed())
            });
            let end = |v: Rational, c: bool| if c { Endpoint::closed(v) } else { Endpoint::open(v) };
            Interval::new(end(lo, lo_closed), end(hi, hi_closed))
        })
        .collect();
    Quader::new(factors).unwrap()
}

/// Set equality of two quader lists via empty symmetric difference.
pub fn same_set(a: &[Quader], b: &[Quader], dim: usize) -> bool {
    let union = |qs: &[Quader]| {
        qs.iter().fold(Parkettable::empty(dim), |acc, q| {
            acc.union_disjoint(&Parkettable::from_quader(q.clone()).unwrap())
                .unwrap()
        })
    };
    union(a).set_eq(&union(b)).unwrap()
}

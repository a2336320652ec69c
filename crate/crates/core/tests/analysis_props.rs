mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use quaderint::hilbert::{
    bessel_partial_sums, fourier_norm_sqr, gram_schmidt, inner, project, IPElement, IPValue,
};
use quaderint::lp::{
    check_hoelder, check_jensen, check_minkowski, lp_pow_sum, seq_norm, PExponent, PowSum,
};
use quaderint::operators::{
    abs_poly_grid, banach_iterate, minkowski_gauge, neumann_inverse, spectral_radius_seq,
    sup_dist, ContractionSpec, Halfspaces, Matrix, Norm,
};
use quaderint::rational::{int, ratio};
use quaderint::{random, BoxMeasure, Quader, StepValue};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{config, rng};

fn exponents() -> Vec<PExponent> {
    vec![
        PExponent::Finite(int(1)),
        PExponent::Finite(ratio(3, 2)),
        PExponent::Finite(int(2)),
        PExponent::Finite(int(3)),
        PExponent::Infinity,
    ]
}

fn exact_vec(r: &mut ChaCha8Rng, n: usize) -> IPElement {
    IPElement::Vec((0..n).map(|_| random::value(r, false)).collect())
}

fn exact(v: IPValue) -> StepValue {
    match v {
        IPValue::Exact(s) => s,
        IPValue::Float(z) => panic!("expected an exact value, got {z}"),
    }
}

fn matrix(r: &mut ChaCha8Rng, n: usize, max_row_sum: f64) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let s: f64 = raw.iter().map(|x: &f64| x.abs()).sum::<f64>().max(1e-9);
            let target = r.random_range(0.0..max_row_sum);
            raw.iter().map(|x| x * target / s).collect()
        })
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn lp_homogeneity_is_exact(seed in any::<u64>(), p in 1i64..=4) {
        let mut r = rng(seed);
        let m = BoxMeasure::volume(1);
        let t = random::step_function(&mut r, 1, 4, true).unwrap();
        let l = random::value(&mut r, true).re;
        let scaled = t.scale(&StepValue::real(l.clone()));
        let (PowSum::Exact(a), PowSum::Exact(b)) =
            (lp_pow_sum(&scaled, &int(p), &m).unwrap(), lp_pow_sum(&t, &int(p), &m).unwrap())
        else {
            panic!("integer p on a real function is exact");
        };
        let lp = num_traits::pow(num_traits::Signed::abs(&l), p as usize);
        prop_assert_eq!(a, lp * b);
    }

    #[test]
    fn minkowski_and_hoelder_hold(seed in any::<u64>(), dim in 1usize..=2) {
        let mut r = rng(seed);
        let m = BoxMeasure::volume(dim);
        let f = random::step_function(&mut r, dim, 4, false).unwrap();
        let g = random::step_function(&mut r, dim, 4, false).unwrap();
        for p in exponents() {
            prop_assert!(check_minkowski(&f, &g, &p, &m).unwrap().passes(1e-9));
            let q = p.conjugate().unwrap();
            prop_assert!(check_hoelder(&f, &g, &p, &q, &m).unwrap().passes(1e-9));
        }
    }

    #[test]
    fn sequence_norms_are_ordered(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random::sequence(&mut r, 8);
        let ps = exponents();
        for (i, p) in ps.iter().enumerate() {
            for pt in &ps[i..] {
                prop_assert!(check_jensen(&x, p, pt).unwrap().passes(1e-12));
            }
            let sup = seq_norm(&x, &PExponent::Infinity);
            let v = seq_norm(&x, p);
            let n = x.len() as f64;
            prop_assert!(sup <= v * (1.0 + 1e-12));
            prop_assert!(v <= n.powf(1.0 / p.to_f64()) * sup * (1.0 + 1e-12));
        }
    }

    #[test]
    fn inner_product_is_sesquilinear(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let (x, y, z) = (exact_vec(&mut r, n), exact_vec(&mut r, n), exact_vec(&mut r, n));
        let a = IPValue::Exact(random::value(&mut r, false));
        let lhs = exact(inner(&x.scale(&a).unwrap().add(&y).unwrap(), &z).unwrap());
        let rhs = &(&exact(a.clone()) * &exact(inner(&x, &z).unwrap())) + &exact(inner(&y, &z).unwrap());
        prop_assert_eq!(lhs, rhs);
        let right = exact(inner(&x, &z.scale(&a).unwrap()).unwrap());
        prop_assert_eq!(right, &exact(a.conj()) * &exact(inner(&x, &z).unwrap()));
        prop_assert_eq!(exact(inner(&x, &y).unwrap()), exact(inner(&y, &x).unwrap()).conj());
        let xx = exact(inner(&x, &x).unwrap());
        let zero = x == x.zero_like();
        prop_assert!(xx.im == int(0) && (zero || xx.re > int(0)));
    }

    #[test]
    fn gram_schmidt_reconstructs_and_projects(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let k = r.random_range(1..=n);
        let xs: Vec<IPElement> = (0..k).map(|_| exact_vec(&mut r, n)).collect();
        let Ok((fam, table)) = gram_schmidt(&xs) else {
            return Ok(());
        };
        prop_assert!(fam.gram_residual <= 1e-10);
        for (i, x) in xs.iter().enumerate() {
            let mut y = x.zero_like();
            for j in 0..=i {
                y = y.add(&fam.elements[j].scale(&IPValue::Float(table[j][i])).unwrap()).unwrap();
            }
            prop_assert!(y.sub(x).unwrap().norm().unwrap() <= 1e-9 * (1.0 + x.norm().unwrap()));
        }
        let target = exact_vec(&mut r, n);
        let pr = project(&target, &fam).unwrap();
        let resid = target.sub(&pr.projection).unwrap();
        for e in &fam.elements {
            prop_assert!(inner(&resid, e).unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn bessel_sums_increase_below_the_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let unit = Quader::closed_box(&[(int(-1), int(1))]);
        let t = random::step_function(&mut r, 1, 4, false).unwrap().restrict(&unit).unwrap();
        let sums = bessel_partial_sums(&t, 30).unwrap();
        let total = fourier_norm_sqr(&t).unwrap();
        for w in sums.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
        prop_assert!(*sums.last().unwrap() <= total + 1e-9);
    }

    #[test]
    fn banach_bounds_shrink_geometrically(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = matrix(&mut r, n, 0.8);
        let c = a.norm(Norm::Infinity).max(0.05);
        let b: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let start: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let f = |x: &[f64]| -> Vec<f64> { a.apply(x).iter().zip(&b).map(|(u, v)| u + v).collect() };
        let spec = ContractionSpec { map: Box::new(f), factor: c, start };
        let tol = 1e-10;
        let run = banach_iterate(&spec, tol, 100_000).unwrap();
        for w in run.bounds.windows(2) {
            prop_assert!(w[1] <= c * w[0] * (1.0 + 1e-12));
        }
        let fx = (spec.map)(&run.x_star);
        prop_assert!(sup_dist(&fx, &run.x_star) <= (1.0 + c) * tol);
    }

    #[test]
    fn neumann_telescopes(seed in any::<u64>(), n in 1usize..=4, terms in 0usize..=12) {
        let mut r = rng(seed);
        let a = matrix(&mut r, n, 0.9);
        let (s, _) = neumann_inverse(&a, terms, Norm::Infinity).unwrap();
        let id = Matrix::identity(n);
        let lhs = id.sub(&a).mul(&s);
        let mut power = id.clone();
        for _ in 0..=terms {
            power = power.mul(&a);
        }
        let rhs = id.sub(&power);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12);
    }

    #[test]
    fn fekete_infimum_bounds_the_spectral_radius(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let raw = DMatrix::<f64>::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let sym = (&raw + raw.transpose()) * 0.5;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| sym[(i, j)]).collect()).collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let rho = sym.symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let seq = spectral_radius_seq(&a, 60, Norm::Infinity).unwrap();
        prop_assert!(seq.violations.is_empty());
        for w in seq.running_inf.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(seq.estimate() >= rho * (1.0 - 1e-9));
    }

    #[test]
    fn gauges_are_sublinear(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let k = r.random_range(n + 1..=2 * n + 2);
        let rows: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let bounds: Vec<f64> = (0..k).map(|_| r.random_range(0.1..2.0)).collect();
        let hs = Halfspaces::new(rows, bounds).unwrap();
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let tau = 2f64.powi(r.random_range(-4..=4));
        let tx: Vec<f64> = x.iter().map(|v| tau * v).collect();
        prop_assert_eq!(minkowski_gauge(&hs, &tx).unwrap(), tau * minkowski_gauge(&hs, &x).unwrap());
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (gs, gx, gy) = (
            minkowski_gauge(&hs, &sum).unwrap(),
            minkowski_gauge(&hs, &x).unwrap(),
            minkowski_gauge(&hs, &y).unwrap(),
        );
        prop_assert!(gs <= gx + gy + 1e-12);
    }
}

#[test]
fn hoelder_at_one_and_infinity() {
    let mut r = rng(5);
    let m = BoxMeasure::volume(1);
    for _ in 0..200 {
        let f = random::step_function(&mut r, 1, 4, false).unwrap();
        let g = random::step_function(&mut r, 1, 4, false).unwrap();
        let c = check_hoelder(&f, &g, &PExponent::Finite(int(1)), &PExponent::Infinity, &m).unwrap();
        assert!(c.passes(1e-12), "{c:?}");
    }
}

#[test]
fn abs_poly_is_monotone_and_dominated() {
    for s in abs_poly_grid(6).unwrap() {
        assert!(s.monotone && s.dominated, "n = {}", s.n);
    }
}

#[test]
fn complex_values_round_trip_through_floats() {
    let z = Complex64::new(0.5, -0.25);
    let v = IPValue::Float(z);
    assert_eq!(v.conj().to_complex(), z.conj());
}

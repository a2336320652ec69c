//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p quaderint --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use quaderint::hilbert::{
    bessel_partial_sums, fourier_coeffs, fourier_norm_sqr, gram_schmidt, inner, IPElement, IPValue,
};
use quaderint::integrate::{
    fubini_step, jordan_inner, jordan_outer, riemann_bracket, smith_volterra_cantor, FubiniOrder,
    Oracle,
};
use quaderint::lp::{
    check_clarkson, check_hoelder, check_jensen, check_minkowski, check_quasi_triangle,
    check_reverse_minkowski, InequalityCheck, PExponent,
};
use quaderint::operators::{
    abs_grid, abs_poly, abs_poly_grid, banach_iterate, neumann_inverse, spectral_radius_seq,
    sup_dist, ContractionSpec, Matrix, Norm,
};
use quaderint::poly::Polynomial;
use quaderint::rational::{int, pow2, ratio, to_f64};
use quaderint::{
    common_refinement, random, BoxMeasure, Interval, Parkettable, Quader, Rational, StepFunction,
    StepValue,
};
use rand::Rng;

use common::{hull, measure, rng, same_set, sub_quader, weight};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = body()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail}; within {limit:?}"))
}

fn measure_extension() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut r = rng(1);
        for case in 0..500 {
            let dim = 1 + case % 2;
            let m = measure(&mut r, dim);
            let p = random::parkettable(&mut r, dim, 4).map_err(|e| e.to_string())?;
            let mut values = Vec::new();
            for _ in 0..2 {
                let cut = random::parkettable(&mut r, dim, 3).unwrap().into_pieces();
                let rf = common_refinement(dim, &[p.pieces().to_vec(), cut]).unwrap();
                let fine: Vec<Quader> = (0..p.pieces().len())
                    .flat_map(|i| rf.certified_union(0, i).into_pieces())
                    .collect();
                values.push(m.eval_parkettable(&Parkettable::new(dim, fine).unwrap()).unwrap());
            }
            let direct = m.eval_parkettable(&p).unwrap();
            ensure(values[0] == direct && values[1] == direct, || {
                format!("case {case}: {direct} vs {} / {}", values[0], values[1])
            })?;
        }
        Ok("500 sets, exact".into())
    })
}

fn splitting_lemma() -> Outcome {
    let mut r = rng(2);
    for case in 0..500 {
        let dim = 1 + case % 3;
        let outer = random::proper_quader(&mut r, dim);
        let inner = sub_quader(&mut r, &outer);
        let pieces = Quader::split_around(&inner, &outer).map_err(|e| e.to_string())?;
        let live = pieces.iter().filter(|q| !q.is_empty()).count();
        ensure(live <= 2 * dim + 1, || format!("case {case}: {live} pieces"))?;
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                ensure(a.is_disjoint(b), || format!("case {case}: {a} meets {b}"))?;
            }
        }
        ensure(same_set(&pieces, std::slice::from_ref(&outer), dim), || {
            format!("case {case}: union differs from {outer}")
        })?;
        for k in 1..=pieces.len() {
            let prefix = &pieces[..k];
            if prefix.iter().any(|q| !q.is_empty()) {
                ensure(same_set(prefix, &[hull(prefix)], dim), || {
                    format!("case {case}: prefix {k} is not a quader")
                })?;
            }
        }
    }
    Ok("500 pairs in dimensions 1-3".into())
}

fn step_integral_laws() -> Outcome {
    let mut r = rng(3);
    for case in 0..1000 {
        let dim = 1 + case % 2;
        let m = measure(&mut r, dim);
        let f = random::step_function(&mut r, dim, 4, false).unwrap();
        let g = random::step_function(&mut r, dim, 4, false).unwrap();
        let l = random::value(&mut r, false);
        let i = |t: &StepFunction| t.integral(&m).unwrap();
        ensure(i(&f.add(&g).unwrap()) == &i(&f) + &i(&g), || format!("case {case}: additivity"))?;
        ensure(i(&f.scale(&l)) == &l * &i(&f), || format!("case {case}: homogeneity"))?;

        let a = random::step_function(&mut r, dim, 4, true).unwrap();
        let h = a.add(&random::nonneg_step_function(&mut r, dim, 4).unwrap()).unwrap();
        ensure(a.le(&h).unwrap() && i(&a).re <= i(&h).re, || format!("case {case}: monotonicity"))?;
        ensure(i(&a).re.abs() <= i(&a.abs().unwrap()).re, || format!("case {case}: modulus"))?;
    }
    Ok("1000 pairs, exact".into())
}

fn fubini() -> Outcome {
    let mut r = rng(4);
    for case in 0..300 {
        let t = random::step_function(&mut r, 2, 5, false).unwrap();
        let pairs = [
            (BoxMeasure::volume(1), BoxMeasure::volume(1)),
            (BoxMeasure::dirac(1), BoxMeasure::volume(1)),
            (BoxMeasure::volume(1), BoxMeasure::stieltjes(weight(&mut r))),
        ];
        for (m1, m2) in pairs {
            let direct = t.integral(&BoxMeasure::product(m1.clone(), m2.clone())).unwrap();
            for order in [FubiniOrder::InnerSecond, FubiniOrder::InnerFirst] {
                let v = fubini_step(&t, &m1, &m2, order).map_err(|e| e.to_string())?;
                ensure(v == direct, || format!("case {case} {order:?}: {v} vs {direct}"))?;
            }
        }
    }
    Ok("300 functions x 3 measure pairs, exact".into())
}

fn riemann_square() -> Outcome {
    timed(Duration::from_secs(1), || {
        let f = Oracle::poly(Polynomial::new(vec![int(0), int(0), int(1)]));
        let dom = Quader::closed_box(&[(int(0), int(1))]);
        let b = riemann_bracket(&f, &dom, 12).map_err(|e| e.to_string())?;
        let h = 2f64.powi(-12);
        ensure(b.gap() == h, || format!("gap {} != 2^-12", b.gap()))?;
        let err = (b.midpoint() - 1.0 / 3.0).abs();
        ensure(err <= h, || format!("|midpoint - 1/3| = {err}"))?;
        Ok(format!("gap = 2^-12, |midpoint - 1/3| = {err:.3e}"))
    })
}

fn smith_volterra_cantor_limit() -> Outcome {
    let removed: Rational = (1..=8u32).map(|i| pow2(i - 1) / pow2(2 * i)).sum();
    let expected = Rational::one() - removed;
    let svc = smith_volterra_cantor(8).map_err(|e| e.to_string())?;
    let vol = BoxMeasure::volume(1);
    let value = vol.eval_parkettable(&svc).unwrap();
    ensure(value == expected, || format!("{value} != {expected}"))?;
    let dist = (&value - ratio(1, 2)).abs();
    ensure(dist <= Rational::one() / pow2(9), || format!("|{value} - 1/2| > 2^-9"))?;
    let inner = jordan_inner(svc.pieces(), 12, &vol).unwrap();
    let outer = jordan_outer(&svc, 12, &vol).unwrap();
    ensure(inner <= value && value <= outer, || {
        format!("Jordan bracket [{inner}, {outer}] misses {value}")
    })?;
    Ok(format!("stage 8 = {value}, Jordan depth 12 in [{inner}, {outer}]"))
}

fn inequality_suite() -> Outcome {
    const CASES: usize = 1000;
    const TOL: f64 = 1e-9;
    let vol = BoxMeasure::volume(1);
    let mut r = rng(7);
    let mut worst = f64::INFINITY;
    let mut run = |name: &str, mut check: Box<dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> InequalityCheck>| {
        for case in 0..CASES {
            let c = check(&mut r);
            worst = worst.min(c.slack);
            ensure(c.passes(TOL), || format!("{name} case {case}: {c:?}"))?;
        }
        Ok::<(), String>(())
    };
    let pair = |r: &mut rand_chacha::ChaCha8Rng| {
        (
            random::step_function(r, 1, 4, false).unwrap(),
            random::step_function(r, 1, 4, false).unwrap(),
        )
    };
    let two = PExponent::Finite(int(2));
    let three = PExponent::Finite(int(3));
    let three_halves = PExponent::Finite(ratio(3, 2));
    run("hoelder", Box::new(|r| {
        let (f, g) = pair(r);
        check_hoelder(&f, &g, &three, &three_halves, &vol).unwrap()
    }))?;
    run("minkowski", Box::new(|r| {
        let (f, g) = pair(r);
        check_minkowski(&f, &g, &three_halves, &vol).unwrap()
    }))?;
    run("jensen", Box::new(|r| {
        check_jensen(&random::sequence(r, 8), &two, &three).unwrap()
    }))?;
    run("quasi-triangle", Box::new(|r| {
        let (f, g) = pair(r);
        check_quasi_triangle(&f, &g, &ratio(1, 2), &vol).unwrap()
    }))?;
    for p in [ratio(3, 2), int(2), int(3)] {
        run("clarkson", Box::new(move |r| {
            let (f, g) = pair(r);
            check_clarkson(&f, &g, &p, &BoxMeasure::volume(1)).unwrap()
        }))?;
    }
    run("reverse-minkowski", Box::new(|r| {
        let f = random::nonneg_step_function(r, 1, 4).unwrap();
        let g = random::nonneg_step_function(r, 1, 4).unwrap();
        check_reverse_minkowski(&f, &g, &ratio(1, 2), &vol).unwrap()
    }))?;

    let amb = Quader::closed_box(&[(int(0), int(1))]);
    let one = StepValue::real(int(1));
    let f = StepFunction::new(
        amb.clone(),
        vec![(Quader::from_interval(Interval::closed(int(0), ratio(1, 2))), one.clone())],
    )
    .unwrap();
    let g = StepFunction::new(
        amb,
        vec![(Quader::from_interval(Interval::open_closed(ratio(1, 2), int(1))), one)],
    )
    .unwrap();
    let c = check_reverse_minkowski(&f, &g, &ratio(1, 2), &vol).unwrap();
    ensure(c.lhs == 1.0 && c.rhs == 0.5, || format!("p = 1/2 example gave {c:?}"))?;
    Ok(format!("8 suites x {CASES}, min slack {worst:.3e}; p = 1/2 example: 1 vs 1/2"))
}

fn legendre() -> Outcome {
    let xs: Vec<IPElement> = (0..=4)
        .map(|k| IPElement::poly(Polynomial::monomial(k), int(-1), int(1)).unwrap())
        .collect();
    let (fam, _) = gram_schmidt(&xs).map_err(|e| e.to_string())?;
    for i in 0..fam.orthogonal.len() {
        for j in 0..i {
            let v = inner(&fam.orthogonal[i], &fam.orthogonal[j]).unwrap();
            ensure(v == IPValue::Exact(StepValue::zero()), || format!("<u{i}, u{j}> = {v:?}"))?;
        }
    }
    let monic = [
        vec![int(1)],
        vec![int(0), int(1)],
        vec![ratio(-1, 3), int(0), int(1)],
        vec![int(0), ratio(-3, 5), int(0), int(1)],
        vec![ratio(3, 35), int(0), ratio(-6, 7), int(0), int(1)],
    ];
    for (u, c) in fam.orthogonal.iter().zip(monic) {
        let IPElement::Poly { p, .. } = u else {
            return Err("orthogonal family left the polynomial carrier".into());
        };
        ensure(p == &Polynomial::new(c.clone()), || format!("{p:?} is not monic Legendre {c:?}"))?;
    }
    ensure(fam.gram_residual <= 1e-12, || format!("Gram residual {}", fam.gram_residual))?;
    Ok(format!("exact orthogonality, Gram residual {:.1e}", fam.gram_residual))
}

fn fourier_parseval() -> Outcome {
    let kmax = 99;
    let amb = Quader::closed_box(&[(int(-1), int(1))]);
    let t = StepFunction::new(
        amb.clone(),
        vec![(Quader::closed_box(&[(int(0), int(1))]), StepValue::real(int(1)))],
    )
    .unwrap();
    let pi = std::f64::consts::PI;
    let s = (2.0 * pi).sqrt();
    let mut worst: f64 = 0.0;
    for (k, c) in fourier_coeffs(&t, kmax).map_err(|e| e.to_string())? {
        let closed = if k == 0 {
            num_complex::Complex64::new(pi / s, 0.0)
        } else if k % 2 == 0 {
            num_complex::Complex64::new(0.0, 0.0)
        } else {
            num_complex::Complex64::new(0.0, -2.0 / (k as f64 * s))
        };
        worst = worst.max((c - closed).norm());
    }
    ensure(worst <= 1e-10, || format!("coefficient error {worst:.3e}"))?;
    let sums = bessel_partial_sums(&t, kmax).unwrap();
    ensure(sums.windows(2).all(|w| w[0] <= w[1]), || "Bessel sums decrease".into())?;
    let total = fourier_norm_sqr(&t).unwrap();
    ensure((total - pi).abs() <= 1e-12, || format!("norm^2 {total} != pi"))?;
    let gaps: Vec<f64> = sums.iter().map(|s| pi - s).collect();
    ensure(gaps.windows(2).all(|w| w[1] <= w[0]), || "Parseval gaps increase".into())?;
    let gap = *gaps.last().unwrap();
    let bound = 4.0 / (pi * kmax as f64) + 1e-9;
    ensure(gap >= -1e-12 && gap <= bound, || format!("gap {gap} exceeds {bound}"))?;
    Ok(format!("coefficient error {worst:.1e}, gap {gap:.3e} <= {bound:.3e}"))
}

fn banach_cos() -> Outcome {
    let c = 1f64.sin();
    let spec = ContractionSpec {
        map: Box::new(|x: &[f64]| vec![x[0].cos()]),
        factor: c,
        start: vec![0.0],
    };
    let run = banach_iterate(&spec, 1e-12, 10_000).map_err(|e| e.to_string())?;
    let d01 = sup_dist(&run.iterates[0], &run.iterates[1]);
    let limit = 0.7390851332;
    for (n, x) in run.iterates.iter().enumerate() {
        let bound = c.powi(n as i32) / (1.0 - c) * d01 + 1e-9;
        let d = (x[0] - limit).abs();
        ensure(d <= bound, || format!("n = {n}: {d} > {bound}"))?;
    }
    Ok(format!("{} iterates, x* = {:.13}", run.iterates.len(), run.x_star[0]))
}

fn neumann() -> Outcome {
    let half = Matrix::from_rows(&[vec![0.5]]).unwrap();
    for n in 0..=20 {
        let (s, bound) = neumann_inverse(&half, n, Norm::Infinity).unwrap();
        let err = (2.0 - s.get(0, 0)).abs();
        ensure((err - bound).abs() <= 1e-15, || format!("n = {n}: error {err} vs bound {bound}"))?;
    }
    let mut r = rng(11);
    for case in 0..200 {
        let dim = r.random_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|_| {
                let raw: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
                let s: f64 = raw.iter().map(|x| x.abs()).sum::<f64>().max(1e-9);
                let target = r.random_range(0.0..0.4);
                raw.iter().map(|x| x * target / s).collect()
            })
            .collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let exact = Matrix::identity(dim).sub(&a).inverse().ok_or("singular I - A")?;
        for n in [2, 5, 10] {
            let (s, bound) = neumann_inverse(&a, n, Norm::Infinity).unwrap();
            let err = exact.sub(&s).norm(Norm::Infinity);
            ensure(err <= bound * (1.0 + 1e-9) + 1e-15, || {
                format!("case {case}, n = {n}: {err} > {bound}")
            })?;
        }
    }
    Ok("scalar 1/2 error = bound; 200 matrices at n in {2, 5, 10}".into())
}

fn spectral_radius() -> Outcome {
    let a = Matrix::from_rows(&[vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
    let seq = spectral_radius_seq(&a, 200, Norm::Infinity).map_err(|e| e.to_string())?;
    ensure(seq.running_inf.windows(2).all(|w| w[1] <= w[0]), || "running inf increases".into())?;
    let est = seq.estimate();
    ensure((est - 0.5).abs() <= 0.05, || format!("running inf {est} at k = 200"))?;
    Ok(format!("running inf at k = 200: {est:.4}"))
}

fn abs_poly_check() -> Outcome {
    let steps = abs_poly_grid(10).map_err(|e| e.to_string())?;
    for s in &steps {
        ensure(s.monotone && s.dominated, || format!("n = {}: {s:?}", s.n))?;
    }
    let grid = abs_grid();
    for n in [2u32, 4] {
        let p = abs_poly(n).unwrap();
        let err = grid.iter().map(|t| t.abs() - p.eval(t)).max().unwrap();
        let reported = steps[n as usize].grid_error;
        ensure(to_f64(&err) == reported, || format!("n = {n}: {err} vs {reported}"))?;
    }
    let e = |n: usize| steps[n].grid_error;
    ensure(e(2) > e(4) && e(4) > e(8), || format!("errors {} {} {}", e(2), e(4), e(8)))?;
    let zero = Rational::zero();
    ensure(grid.len() == 4097 && grid.contains(&zero), || "grid shape".into())?;
    Ok(format!("n <= 10 monotone and dominated; errors {:.4} > {:.4} > {:.4}", e(2), e(4), e(8)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("measure extension is well defined", measure_extension),
        ("splitting lemma", splitting_lemma),
        ("step integral laws", step_integral_laws),
        ("Fubini on step functions", fubini),
        ("Riemann bracket of t^2", riemann_square),
        ("Smith-Volterra-Cantor measure", smith_volterra_cantor_limit),
        ("inequality suite", inequality_suite),
        ("Gram-Schmidt gives Legendre", legendre),
        ("Fourier, Bessel and Parseval", fourier_parseval),
        ("Banach a-priori bound", banach_cos),
        ("Neumann series bound", neumann),
        ("spectral radius", spectral_radius),
        ("polynomial approximation of |t|", abs_poly_check),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, body)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(body))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let took = t0.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} of 13 criteria passed in {:.2?}", 13 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use quaderint::format::{
    family_to_toml, parse_contraction_doc, parse_family_doc, parse_halfspaces_doc,
    parse_matrix_doc, parse_measure_doc, parse_oracle_doc, parse_set_doc, parse_step_doc,
    parse_weight_doc, set_to_parkettable,
};
use quaderint::hilbert::{
    bessel_partial_sums, fourier_coeffs, fourier_norm_sqr, gram_schmidt, minimality_margin, project,
};
use quaderint::integrate::{
    fubini_step, integrate_continuous, integrate_discrete, jordan_inner, jordan_outer,
    riemann_bracket, smith_volterra_cantor, stieltjes_integral, FubiniOrder,
};
use quaderint::lp::{
    check_clarkson, check_hoelder, check_jensen, check_minkowski, check_quasi_triangle,
    check_reverse_minkowski, lp_norm, InequalityCheck, PExponent,
};
use quaderint::operators::{
    abs_poly_grid, banach_iterate, minkowski_gauge, neumann_inverse, spectral_radius_seq,
    sup_dist, Matrix, Norm,
};
use quaderint::rational::{fmt_pq, parse_rational, to_f64};
use quaderint::text::parse_quader;
use quaderint::{random, BoxMeasure, Error, Quader, Rational};

use crate::{Cli, Command, Global, NormArg, Suite};

#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, std::io::Error),
    Lib(Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::Parse(_)) | CliError::Io(..) | CliError::Usage(_) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

/// A finished table plus the reason the run failed a check, if it did.
pub struct Outcome {
    pub table: String,
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(table: String) -> Self {
        Outcome {
            table,
            violation: None,
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn measure_or_volume(path: Option<&PathBuf>, dim: usize) -> Res<BoxMeasure> {
    match path {
        Some(p) => Ok(parse_measure_doc(&read(p)?)?),
        None => Ok(BoxMeasure::volume(dim)),
    }
}

fn exponent(s: &str) -> Res<PExponent> {
    match s.trim() {
        "inf" | "infinity" => Ok(PExponent::Infinity),
        other => Ok(PExponent::finite(parse_rational(other).map_err(Error::from)?)?),
    }
}

fn finite_exponent(s: &str) -> Res<Rational> {
    match exponent(s)? {
        PExponent::Finite(p) => Ok(p),
        PExponent::Infinity => Err(CliError::Usage("this suite needs a finite p".into())),
    }
}

fn bounded_interval(domain: &Quader) -> Res<(Rational, Rational)> {
    if domain.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: domain.dim(),
        }
        .into());
    }
    let i = domain.factor(0);
    match (i.inf(), i.sup()) {
        (Some(a), Some(b)) if i.is_bounded() => Ok((a.clone(), b.clone())),
        _ => Err(Error::Unbounded(domain.to_string()).into()),
    }
}

fn norm_of(n: NormArg) -> Norm {
    match n {
        NormArg::One => Norm::One,
        NormArg::Inf => Norm::Infinity,
    }
}

fn check_failures(table: String, failed: usize, what: &str) -> Outcome {
    Outcome {
        table,
        violation: (failed > 0).then(|| format!("{failed} {what}")),
    }
}

pub fn run(cli: &Cli) -> Res<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Integrate {
            oracle,
            domain,
            measure,
        } => {
            let f = parse_oracle_doc(&read(oracle)?)?;
            let dom = parse_quader(domain).map_err(Error::from)?;
            let m = measure_or_volume(measure.as_ref(), dom.dim())?;
            let (v, hw) = integrate_continuous(&f, &dom, &m, g.depth)?;
            Ok(Outcome::ok(format!("depth,value,halfwidth\n{},{v},{hw}\n", g.depth)))
        }
        Command::Bracket { oracle, domain } => {
            let f = parse_oracle_doc(&read(oracle)?)?;
            let dom = parse_quader(domain).map_err(Error::from)?;
            let mut out = String::from("depth,lower,upper,gap,midpoint\n");
            let mut failed = 0;
            for k in 0..=g.depth {
                let b = riemann_bracket(&f, &dom, k)?;
                if b.lower > b.upper {
                    failed += 1;
                }
                writeln!(out, "{k},{},{},{},{}", b.lower, b.upper, b.gap(), b.midpoint()).unwrap();
            }
            Ok(check_failures(out, failed, "brackets with lower > upper"))
        }
        Command::Fubini { step, m1, m2 } => {
            let (t, _) = parse_step_doc(&read(step)?)?;
            let m1 = parse_measure_doc(&read(m1)?)?;
            let m2 = parse_measure_doc(&read(m2)?)?;
            let a = fubini_step(&t, &m1, &m2, FubiniOrder::InnerSecond)?;
            let b = fubini_step(&t, &m1, &m2, FubiniOrder::InnerFirst)?;
            let direct = t.integral(&BoxMeasure::product(m1, m2))?;
            let out = format!("order,value\ninner-second,{a}\ninner-first,{b}\ndirect,{direct}\n");
            let agree = a == b && b == direct;
            Ok(Outcome {
                table: out,
                violation: (!agree).then(|| "iterated integrals differ".to_string()),
            })
        }
        Command::Jordan { set, svc, measure } => {
            let (quaders, parts) = match (set, svc) {
                (Some(path), None) => {
                    let qs = parse_set_doc(&read(path)?)?;
                    let p = set_to_parkettable(&qs)?;
                    (qs, p)
                }
                (None, Some(stage)) => {
                    let p = smith_volterra_cantor(*stage)?;
                    (p.pieces().to_vec(), p)
                }
                _ => return Err(CliError::Usage("give exactly one of SET or --svc".into())),
            };
            let m = measure_or_volume(measure.as_ref(), parts.dim())?;
            let exact = m.eval_parkettable(&parts)?;
            let mut out = String::from("depth,inner,outer,exact,inner_f64,outer_f64\n");
            let mut failed = 0;
            for k in 0..=g.depth {
                let inner = jordan_inner(&quaders, k, &m)?;
                let outer = jordan_outer(&parts, k, &m)?;
                if inner > exact || exact > outer {
                    failed += 1;
                }
                writeln!(
                    out,
                    "{k},{},{},{},{},{}",
                    fmt_pq(&inner),
                    fmt_pq(&outer),
                    fmt_pq(&exact),
                    to_f64(&inner),
                    to_f64(&outer)
                )
                .unwrap();
            }
            Ok(check_failures(out, failed, "depths where inner <= exact <= outer fails"))
        }
        Command::Stieltjes {
            oracle,
            weight,
            domain,
        } => {
            let f = parse_oracle_doc(&read(oracle)?)?;
            let w = parse_weight_doc(&read(weight)?)?;
            let (a, b) = bounded_interval(&parse_quader(domain).map_err(Error::from)?)?;
            let (v, hw) = stieltjes_integral(&f, &w, &a, &b, g.depth)?;
            Ok(Outcome::ok(format!("value,halfwidth\n{v},{hw}\n")))
        }
        Command::Discrete {
            oracle,
            measure,
            tail,
        } => {
            let f = parse_oracle_doc(&read(oracle)?)?;
            let BoxMeasure::Discrete(mp) = parse_measure_doc(&read(measure)?)? else {
                return Err(Error::InvalidMeasure("expected a discrete measure".into()).into());
            };
            let (v, t) = integrate_discrete(&f, mp.points(), *tail);
            Ok(Outcome::ok(format!("value,tail\n{v},{t}\n")))
        }
        Command::LpNorm { step, measure } => {
            let (t, doc_m) = parse_step_doc(&read(step)?)?;
            let m = match measure {
                Some(p) => parse_measure_doc(&read(p)?)?,
                None => doc_m.unwrap_or_else(|| BoxMeasure::volume(t.dim())),
            };
            let p = exponent(g.p.as_deref().unwrap_or("2"))?;
            let v = lp_norm(&t, &p, &m)?;
            Ok(Outcome::ok(format!("p,norm\n{p},{v}\n")))
        }
        Command::IneqCheck { suite, cases, dim } => ineq_check(g, *suite, *cases, *dim),
        Command::GramSchmidt { family, write_family } => {
            let fam = parse_family_doc(&read(family)?)?;
            let (ortho, table) = gram_schmidt(&fam.elements)?;
            let mut out = String::from("j,i,re,im\n");
            for (j, row) in table.iter().enumerate() {
                for (i, r) in row.iter().enumerate().skip(j) {
                    writeln!(out, "{j},{i},{},{}", r.re, r.im).unwrap();
                }
            }
            if let Some(path) = write_family {
                let doc = format!(
                    "# gram residual {}\n{}",
                    ortho.gram_residual,
                    family_to_toml(&ortho.elements)?
                );
                fs::write(path, doc).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            Ok(Outcome {
                table: out,
                violation: (ortho.gram_residual > g.tol)
                    .then(|| format!("gram residual {} exceeds {}", ortho.gram_residual, g.tol)),
            })
        }
        Command::Fourier { step, bessel } => {
            let (t, _) = parse_step_doc(&read(step)?)?;
            let kmax = g.kmax.unwrap_or(9);
            if *bessel {
                let sums = bessel_partial_sums(&t, kmax)?;
                let total = fourier_norm_sqr(&t)?;
                let mut out = String::from("K,partial_sum,parseval_gap\n");
                let mut failed = 0;
                for (k, s) in sums.iter().enumerate() {
                    if k > 0 && *s < sums[k - 1] - g.tol {
                        failed += 1;
                    }
                    if *s > total + g.tol {
                        failed += 1;
                    }
                    writeln!(out, "{k},{s},{}", total - s).unwrap();
                }
                Ok(check_failures(out, failed, "Bessel violations"))
            } else {
                let mut out = String::from("k,re,im\n");
                for (k, c) in fourier_coeffs(&t, kmax)? {
                    writeln!(out, "{k},{},{}", c.re, c.im).unwrap();
                }
                Ok(Outcome::ok(out))
            }
        }
        Command::Project { family, trials } => {
            let fam = parse_family_doc(&read(family)?)?;
            let x = fam
                .target
                .ok_or_else(|| CliError::Usage("family document has no target".into()))?;
            let (ortho, _) = gram_schmidt(&fam.elements)?;
            let proj = project(&x, &ortho)?;
            let margin = minimality_margin(&x, &ortho, &proj, *trials, 0.1, g.seed)?;
            let mut out = String::from("quantity,re,im\n");
            for (i, c) in proj.coefficients.iter().enumerate() {
                writeln!(out, "c{i},{},{}", c.re, c.im).unwrap();
            }
            writeln!(out, "defect,{},0", proj.defect).unwrap();
            writeln!(out, "min_margin,{margin},0").unwrap();
            Ok(Outcome {
                table: out,
                violation: (margin < -g.tol)
                    .then(|| format!("a perturbed combination beats the projection by {}", -margin)),
            })
        }
        Command::Fixpoint {
            contraction,
            max_iter,
        } => {
            let c = parse_contraction_doc(&read(contraction)?)?;
            let spec = c.spec();
            let run = banach_iterate(&spec, g.tol, *max_iter)?;
            let dim = run.x_star.len();
            let mut out = String::from("n");
            for i in 0..dim {
                write!(out, ",x{i}").unwrap();
            }
            out.push_str(",dist_to_limit,bound\n");
            let mut failed = 0;
            for (n, (x, b)) in run.iterates.iter().zip(&run.bounds).enumerate() {
                let d = sup_dist(x, &run.x_star);
                if d > b + g.tol {
                    failed += 1;
                }
                write!(out, "{n}").unwrap();
                for v in x {
                    write!(out, ",{v}").unwrap();
                }
                writeln!(out, ",{d},{b}").unwrap();
            }
            Ok(check_failures(out, failed, "iterates beyond the a-priori bound"))
        }
        Command::Neumann { matrix, norm } => {
            let a = parse_matrix_doc(&read(matrix)?)?;
            let norm = norm_of(*norm);
            let exact = Matrix::identity(a.dim())
                .sub(&a)
                .inverse()
                .ok_or_else(|| Error::Degenerate("I - A is singular".into()))?;
            let mut out = String::from("n,error,bound\n");
            let mut failed = 0;
            for n in 0..=g.kmax.unwrap_or(10) as usize {
                let (s, bound) = neumann_inverse(&a, n, norm)?;
                let err = exact.sub(&s).norm(norm);
                if err > bound + g.tol {
                    failed += 1;
                }
                writeln!(out, "{n},{err},{bound}").unwrap();
            }
            Ok(check_failures(out, failed, "truncations beyond the bound"))
        }
        Command::Specrad { matrix, norm } => {
            let a = parse_matrix_doc(&read(matrix)?)?;
            let seq = spectral_radius_seq(&a, g.kmax.unwrap_or(200) as usize, norm_of(*norm))?;
            let mut out = String::from("k,radius,running_inf\n");
            for (k, (r, m)) in seq.radii.iter().zip(&seq.running_inf).enumerate() {
                writeln!(out, "{},{r},{m}", k + 1).unwrap();
            }
            Ok(check_failures(
                out,
                seq.violations.len(),
                "violations of submultiplicativity",
            ))
        }
        Command::Gauge { halfspaces, point } => {
            let (hs, doc_point) = parse_halfspaces_doc(&read(halfspaces)?)?;
            let x = match point {
                Some(s) => s
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Usage(format!("bad --point: {e}")))?,
                None => doc_point
                    .ok_or_else(|| CliError::Usage("no point given".into()))?,
            };
            let v = minkowski_gauge(&hs, &x)?;
            let mut out = String::new();
            for i in 0..x.len() {
                write!(out, "x{i},").unwrap();
            }
            out.push_str("gauge\n");
            for c in &x {
                write!(out, "{c},").unwrap();
            }
            writeln!(out, "{v}").unwrap();
            Ok(Outcome::ok(out))
        }
        Command::Abspoly => {
            let steps = abs_poly_grid(g.kmax.unwrap_or(10))?;
            let mut out = String::from("n,grid_error,monotone,dominated\n");
            let mut failed = 0;
            for s in &steps {
                if !(s.monotone && s.dominated) {
                    failed += 1;
                }
                writeln!(out, "{},{},{},{}", s.n, s.grid_error, s.monotone, s.dominated).unwrap();
            }
            Ok(check_failures(out, failed, "steps that are not monotone and dominated"))
        }
    }
}

fn ineq_check(g: &Global, suite: Suite, cases: usize, dim: usize) -> Res<Outcome> {
    if !(1..=3).contains(&dim) {
        return Err(CliError::Usage(format!("--dim must be 1, 2 or 3, got {dim}")));
    }
    let mut rng = random::rng(g.seed);
    let m = BoxMeasure::volume(dim);
    let p_or = |d: &str| g.p.as_deref().unwrap_or(d).to_string();
    let mut out = String::from("case,check,lhs,rhs,slack,status\n");
    let mut failed = 0;
    for case in 0..cases {
        let c: InequalityCheck = match suite {
            Suite::Hoelder => {
                let p = exponent(&p_or("2"))?;
                let q = match &g.q {
                    Some(q) => exponent(q)?,
                    None => p
                        .conjugate()
                        .ok_or_else(|| CliError::Usage(format!("{p} has no conjugate")))?,
                };
                let f = random::step_function(&mut rng, dim, 4, false)?;
                let h = random::step_function(&mut rng, dim, 4, false)?;
                check_hoelder(&f, &h, &p, &q, &m)?
            }
            Suite::Minkowski => {
                let p = exponent(&p_or("2"))?;
                let f = random::step_function(&mut rng, dim, 4, false)?;
                let h = random::step_function(&mut rng, dim, 4, false)?;
                check_minkowski(&f, &h, &p, &m)?
            }
            Suite::Jensen => {
                let p = exponent(&p_or("1"))?;
                let pt = exponent(g.q.as_deref().unwrap_or("2"))?;
                check_jensen(&random::sequence(&mut rng, 8), &p, &pt)?
            }
            Suite::Clarkson => {
                let p = finite_exponent(&p_or("2"))?;
                let f = random::step_function(&mut rng, dim, 4, false)?;
                let h = random::step_function(&mut rng, dim, 4, false)?;
                check_clarkson(&f, &h, &p, &m)?
            }
            Suite::ReverseMinkowski => {
                let p = finite_exponent(&p_or("1/2"))?;
                let f = random::nonneg_step_function(&mut rng, dim, 4)?;
                let h = random::nonneg_step_function(&mut rng, dim, 4)?;
                check_reverse_minkowski(&f, &h, &p, &m)?
            }
            Suite::QuasiTriangle => {
                let p = finite_exponent(&p_or("1/2"))?;
                let f = random::step_function(&mut rng, dim, 4, false)?;
                let h = random::step_function(&mut rng, dim, 4, false)?;
                check_quasi_triangle(&f, &h, &p, &m)?
            }
        };
        let pass = c.passes(g.tol);
        if !pass {
            failed += 1;
        }
        writeln!(
            out,
            "{case},{},{},{},{},{}",
            c.name,
            c.lhs,
            c.rhs,
            c.slack,
            if pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    Ok(check_failures(out, failed, "failing cases"))
}

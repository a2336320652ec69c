//! Banach fixed-point iteration, Neumann series, spectral radius sequences,
//! Minkowski gauges of polytopes and the polynomial approximation of `|t|`.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{to_f64, Rational};

/// Operator norms with closed row/column-sum formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// Maximum column sum.
    One,
    /// Maximum row sum.
    Infinity,
}

/// A square matrix of finite floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            if let Some(x) = r.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite entry {x}")));
            }
        }
        Ok(Matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        Matrix(&self.0 * &o.0)
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix(&self.0 - &o.0)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix(&self.0 * s)
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        let n = self.dim();
        let sums = (0..n).map(|i| match norm {
            Norm::Infinity => self.0.row(i).iter().map(|x| x.abs()).sum::<f64>(),
            Norm::One => self.0.column(i).iter().map(|x| x.abs()).sum::<f64>(),
        });
        sums.fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// Inverse by LU decomposition, `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        self.0.clone().try_inverse().map(Matrix)
    }

    /// `x` with `self · x = b`, by LU decomposition.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let rhs = nalgebra::DVector::from_column_slice(b);
        self.0.clone().lu().solve(&rhs).map(|x| x.iter().copied().collect())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(x);
        (&self.0 * v).iter().copied().collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            f.write_str(&cells.join(","))?;
        }
        Ok(())
    }
}

/// A self-map of a closed subset of `R^n`, claimed to be a contraction with
/// factor `C` in the sup metric.
pub struct ContractionSpec<'a> {
    pub map: Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>,
    pub factor: f64,
    pub start: Vec<f64>,
}

pub fn sup_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BanachRun {
    pub x_star: Vec<f64>,
    /// `x_0, x_1, …, x_N`
    pub iterates: Vec<Vec<f64>>,
    /// `C^n/(1−C)·d(x_0, x_1)` for every iterate.
    pub bounds: Vec<f64>,
}

/// Iterates `x_{n+1} = F(x_n)` until the a-priori bound
/// `C^n/(1−C)·d(x_0, x_1)` drops to `tol`.
///
/// Each step checks `d(x_{n+1}, x_n) ≤ C·d(x_n, x_{n−1})` up to rounding and
/// reports a violation of the claimed factor.
pub fn banach_iterate(spec: &ContractionSpec<'_>, tol: f64, max_iter: usize) -> Result<BanachRun> {
    let c = spec.factor;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "contraction factor must lie in ]0,1[, got {c}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let x0 = spec.start.clone();
    let x1 = (spec.map)(&x0);
    if x1.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            found: x1.len(),
        });
    }
    let d01 = sup_dist(&x0, &x1);
    let scale = d01 / (1.0 - c);
    let mut iterates = vec![x0];
    let mut bounds = vec![scale];
    if d01 == 0.0 {
        return Ok(BanachRun {
            x_star: iterates[0].clone(),
            iterates,
            bounds,
        });
    }
    let mut prev_step = d01;
    let mut cn = 1.0;
    let mut x = x1;
    for n in 1..=max_iter {
        cn *= c;
        let bound = cn * scale;
        iterates.push(x.clone());
        bounds.push(bound);
        if bound <= tol {
            return Ok(BanachRun {
                x_star: x,
                iterates,
                bounds,
            });
        }
        let next = (spec.map)(&x);
        let step = sup_dist(&next, &x);
        let rounding = 4.0 * f64::EPSILON * x.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
        if step > c * prev_step + rounding {
            return Err(Error::ContractionViolation {
                step: n,
                ratio: step / prev_step,
                factor: c,
            });
        }
        prev_step = step;
        x = next;
    }
    Err(Error::MaxIterations(max_iter))
}

/// `S_n = Σ_{k=0}^n a^k` and the bound `‖a‖^{n+1}/(1−‖a‖)` on
/// `‖(I − a)^{−1} − S_n‖`.
pub fn neumann_inverse(a: &Matrix, terms: usize, norm: Norm) -> Result<(Matrix, f64)> {
    let q = a.norm(norm);
    if q >= 1.0 {
        return Err(Error::NormNotBelowOne(q));
    }
    let id = Matrix::identity(a.dim());
    let mut s = id.clone();
    for _ in 0..terms {
        s = id.add(&a.mul(&s));
    }
    let exp = i32::try_from(terms + 1).unwrap_or(i32::MAX);
    Ok((s, q.powi(exp) / (1.0 - q)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSeq {
    /// `r_k = ‖a^k‖^{1/k}` for `k = 1..=kmax`.
    pub radii: Vec<f64>,
    /// `min_{j ≤ k} r_j`
    pub running_inf: Vec<f64>,
    /// Pairs `(k, l)` with `‖a^{k+l}‖ > ‖a^k‖·‖a^l‖` beyond rounding.
    pub violations: Vec<(usize, usize)>,
}

impl SpectralSeq {
    pub fn estimate(&self) -> f64 {
        self.running_inf.last().copied().unwrap_or(f64::NAN)
    }
}

/// The sequence `‖a^k‖^{1/k}`, computed on rescaled powers so that
/// `log ‖a^k‖` stays finite, with a full check of `a_{k+l} ≤ a_k a_l`.
pub fn spectral_radius_seq(a: &Matrix, kmax: usize, norm: Norm) -> Result<SpectralSeq> {
    if kmax == 0 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    let mut logs = Vec::with_capacity(kmax);
    let mut p = a.clone();
    let mut log_scale = 0.0;
    for k in 1..=kmax {
        if k > 1 {
            p = a.mul(&p);
        }
        let big = p.max_abs();
        if !big.is_finite() {
            return Err(Error::Overflow(format!("entries of a^{k}")));
        }
        if big > 0.0 {
            p = p.scale(1.0 / big);
            log_scale += big.ln();
        }
        let n = p.norm(norm);
        logs.push(if n == 0.0 { f64::NEG_INFINITY } else { log_scale + n.ln() });
    }
    let radii: Vec<f64> = logs
        .iter()
        .enumerate()
        .map(|(i, l)| (l / (i + 1) as f64).exp())
        .collect();
    let mut running_inf = Vec::with_capacity(kmax);
    let mut inf = f64::INFINITY;
    for r in &radii {
        inf = inf.min(*r);
        running_inf.push(inf);
    }
    let mut violations = Vec::new();
    for k in 1..=kmax {
        for l in k..=kmax - k {
            let lhs = logs[k + l - 1];
            let rhs = logs[k - 1] + logs[l - 1];
            let slack = 1e-9 * (1.0 + lhs.abs().max(rhs.abs()).min(1e300));
            if lhs.is_finite() && lhs > rhs + slack {
                violations.push((k, l));
            }
        }
    }
    Ok(SpectralSeq {
        radii,
        running_inf,
        violations,
    })
}

/// The polytope `{x : a_i · x ≤ b_i}` with every `b_i > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspaces {
    rows: Vec<Vec<f64>>,
    bounds: Vec<f64>,
}

impl Halfspaces {
    pub fn new(rows: Vec<Vec<f64>>, bounds: Vec<f64>) -> Result<Self> {
        if rows.len() != bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: bounds.len(),
            });
        }
        let dim = rows.first().map_or(0, Vec::len);
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        if let Some(b) = bounds.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "0 must be interior: bound {b} is not positive"
            )));
        }
        Ok(Halfspaces { rows, bounds })
    }

    /// The unit ball of `‖·‖_∞` in `R^n`, rows `±e_i` with bound 1.
    pub fn sup_ball(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut r = vec![0.0; n];
                r[i] = s;
                rows.push(r);
            }
        }
        Halfspaces {
            bounds: vec![1.0; rows.len()],
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.rows
            .iter()
            .zip(&self.bounds)
            .all(|(a, b)| dot(a, x) <= *b)
    }
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(u, v)| u * v).sum()
}

/// `inf{τ > 0 : x ∈ τC} = max(0, max_i a_i·x / b_i)`
pub fn minkowski_gauge(hs: &Halfspaces, x: &[f64]) -> Result<f64> {
    if x.len() != hs.dim() {
        return Err(Error::DimensionMismatch {
            expected: hs.dim(),
            found: x.len(),
        });
    }
    Ok(hs
        .rows
        .iter()
        .zip(&hs.bounds)
        .fold(0.0, |m: f64, (a, b)| m.max(dot(a, x) / b)))
}

/// Largest `n` accepted by [`abs_poly`]; `p_n` has degree `2^n`.
pub const ABS_POLY_MAX: u32 = 12;

/// Number of points `t_j = −1 + j/2048` in the `abs_poly` grid.
pub const ABS_GRID_POINTS: usize = 4097;

/// `p_0 = 0`, `p_{k+1} = p_k + (t² − p_k²)/2`.
pub fn abs_poly(n: u32) -> Result<Polynomial> {
    if n > ABS_POLY_MAX {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds the cap {ABS_POLY_MAX}"
        )));
    }
    let t2 = Polynomial::monomial(2);
    let half = Rational::new(1.into(), 2.into());
    let mut p = Polynomial::zero();
    for _ in 0..n {
        p = p.add(&t2.sub(&p.mul(&p)).scale(&half));
    }
    Ok(p)
}

pub fn abs_grid() -> Vec<Rational> {
    (0..ABS_GRID_POINTS as i64)
        .map(|j| Rational::new((j - 2048).into(), 2048.into()))
        .collect()
}

/// Grid behaviour of `p_n` for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsPolyStep {
    pub n: u32,
    /// `max_j (|t_j| − p_n(t_j))`
    pub grid_error: f64,
    /// `p_{n−1}(t_j) ≤ p_n(t_j)` at every grid point (exact).
    pub monotone: bool,
    /// `0 ≤ p_n(t_j) ≤ |t_j|` at every grid point (exact).
    pub dominated: bool,
}

/// Exact values `p_n(t_j)` for `n = 0..=n_max` on the grid, computed by
/// running the recursion on values, which is cheaper than evaluating the
/// degree-`2^n` coefficients.
///
/// Every `p_n(t_j)` is dyadic, so the values are kept as integer numerators
/// over a shared `2^e` and no gcd is ever taken.
pub fn abs_poly_grid(n_max: u32) -> Result<Vec<AbsPolyStep>> {
    if n_max > ABS_POLY_MAX {
        return Err(Error::InvalidArgument(format!(
            "n = {n_max} exceeds the cap {ABS_POLY_MAX}"
        )));
    }
    const GRID_BITS: usize = 11;
    let half = (ABS_GRID_POINTS as i64 - 1) / 2;
    let grid: Vec<BigInt> = (0..ABS_GRID_POINTS as i64).map(|j| BigInt::from(j - half)).collect();
    let mut values = vec![BigInt::zero(); grid.len()];
    let mut e = 0usize;
    let mut out = vec![AbsPolyStep {
        n: 0,
        grid_error: 1.0,
        monotone: true,
        dominated: true,
    }];
    for n in 1..=n_max {
        // p + (t² − p²)/2 over the common denominator 2^next_e.
        let next_e = (2 * e).max(2 * GRID_BITS) + 1;
        let mut err: Option<BigInt> = None;
        let mut monotone = true;
        let mut dominated = true;
        for (v, t) in values.iter_mut().zip(&grid) {
            let old = &*v << (next_e - e);
            let next = &old + ((t * t) << (next_e - 1 - 2 * GRID_BITS))
                - ((&*v * &*v) << (next_e - 1 - 2 * e));
            monotone &= next >= old;
            let abs = t.abs() << (next_e - GRID_BITS);
            dominated &= !next.is_negative() && next <= abs;
            let gap = abs - &next;
            if err.as_ref().is_none_or(|m| &gap > m) {
                err = Some(gap);
            }
            *v = next;
        }
        e = next_e;
        let err = Rational::new(err.unwrap_or_default(), BigInt::one() << e);
        out.push(AbsPolyStep {
            n,
            grid_error: to_f64(&err),
            monotone,
            dominated,
        });
    }
    Ok(out)
}

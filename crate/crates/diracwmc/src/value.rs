//! Dense evaluation of typed expressions and small-matrix numerics.
//!
//! This is the reference evaluator used to cross-check the compiler: plain
//! row-major matrices, standard linear algebra, and a Taylor-based matrix
//! exponential. Sizes are capped; large instances belong to the
//! representation pipeline.

use num_traits::{Float, NumCast, Zero};
use thiserror::Error;

use crate::field::Field;
use crate::lang::typecheck::power_bound;
use crate::lang::{typecheck, Expr, ExprType, TypeError};

/// Largest dense dimension the evaluator will materialize.
pub const MAX_DENSE_DIM: u128 = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("matrix of shape {rows} x {cols} exceeds the dense size cap {MAX_DENSE_DIM}")]
    TooLarge { rows: u128, cols: u128 },
    #[error("matrix exponential requires a square matrix, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> DenseMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DenseMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn matmul(&self, other: &DenseMatrix<F>) -> DenseMatrix<F> {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out: DenseMatrix<F> = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let acc = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix<F>) -> DenseMatrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shapes must agree");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn kron(&self, other: &DenseMatrix<F>) -> DenseMatrix<F> {
        let mut out = DenseMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(
                            i1 * other.rows + i2,
                            j1 * other.cols + j2,
                            a.clone() * other.get(i2, j2).clone(),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix<F> {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> F {
        assert_eq!(self.rows, self.cols, "trace of a square matrix");
        (0..self.rows).fold(F::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn map(&self, f: impl Fn(&F) -> F) -> DenseMatrix<F> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> DenseMatrix<F> {
        self.map(|x| s.clone() * x.clone())
    }

    /// Infinity norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> F::Real {
        let mut best = F::Real::zero();
        for i in 0..self.rows {
            let mut sum = F::Real::zero();
            for j in 0..self.cols {
                sum = sum + self.get(i, j).modulus();
            }
            best = best.max(sum);
        }
        best
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix<F>) -> F::Real {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shapes must agree");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(F::Real::zero(), |acc, d| acc.max(d))
    }
}

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Value<F: Field> {
    Scalar(F),
    Matrix(DenseMatrix<F>),
}

impl<F: Field> Value<F> {
    pub fn into_scalar(self) -> F {
        match self {
            Value::Scalar(x) => x,
            Value::Matrix(_) => panic!("expected a scalar value"),
        }
    }

    pub fn into_matrix(self) -> DenseMatrix<F> {
        match self {
            Value::Matrix(m) => m,
            Value::Scalar(_) => panic!("expected a matrix value"),
        }
    }
}

/// Evaluates a typed expression to a concrete scalar or matrix.
pub fn eval_value<F: Field>(e: &Expr<F>) -> Result<Value<F>, EvalError> {
    let t = typecheck(e)?;
    if let ExprType::Matrix { q, input, output } = t {
        check_dense(q, output, input)?;
    }
    Ok(eval(e))
}

fn check_dense(q: u32, output: u32, input: u32) -> Result<(usize, usize), EvalError> {
    let rows = power_bound(q, output);
    let cols = power_bound(q, input);
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DENSE_DIM && c <= MAX_DENSE_DIM => {
            Ok((r as usize, c as usize))
        }
        _ => Err(EvalError::TooLarge {
            rows: rows.unwrap_or(u128::MAX),
            cols: cols.unwrap_or(u128::MAX),
        }),
    }
}

/// Recursive evaluation; the expression is assumed to typecheck with dense
/// dimensions (intermediate results of typed expressions never exceed the
/// result and operand bounds).
fn eval<F: Field>(e: &Expr<F>) -> Value<F> {
    match e {
        Expr::Const(x) => Value::Scalar(x.clone()),
        Expr::SMul(a, b) => {
            Value::Scalar(eval(a).into_scalar() * eval(b).into_scalar())
        }
        Expr::SAdd(a, b) => {
            Value::Scalar(eval(a).into_scalar() + eval(b).into_scalar())
        }
        Expr::Trace(m) => Value::Scalar(eval(m).into_matrix().trace()),
        Expr::Entry(i, j, m) => {
            let m = eval(m).into_matrix();
            Value::Scalar(m.get(*i as usize, *j as usize).clone())
        }
        Expr::Apply(f, e) => match eval(e) {
            Value::Scalar(x) => Value::Scalar(f.apply(&x)),
            Value::Matrix(m) => Value::Matrix(m.map(|x| f.apply(x))),
        },
        Expr::Bra(i, q) => {
            let mut m = DenseMatrix::zeros(1, *q as usize);
            m.set(0, *i as usize, F::one());
            Value::Matrix(m)
        }
        Expr::Ket(i, q) => {
            let mut m = DenseMatrix::zeros(*q as usize, 1);
            m.set(*i as usize, 0, F::one());
            Value::Matrix(m)
        }
        Expr::MatMul(a, b) => {
            Value::Matrix(eval(a).into_matrix().matmul(&eval(b).into_matrix()))
        }
        Expr::MatAdd(a, b) => {
            Value::Matrix(eval(a).into_matrix().add(&eval(b).into_matrix()))
        }
        Expr::Kron(a, b) => {
            Value::Matrix(eval(a).into_matrix().kron(&eval(b).into_matrix()))
        }
        Expr::ScalMul(s, m) => {
            let s = eval(s).into_scalar();
            Value::Matrix(eval(m).into_matrix().scale(&s))
        }
        Expr::Trans(m) => Value::Matrix(eval(m).into_matrix().transpose()),
    }
}

/// Matrix exponential by scaling and squaring with a truncated Taylor
/// series; the truncation tail is below `1e-12` relative to the scaled
/// norm. With `is_diagonal` set, only the diagonal is exponentiated
/// entrywise.
pub fn dense_matexp<F: Field>(
    m: &DenseMatrix<F>,
    is_diagonal: bool,
) -> Result<DenseMatrix<F>, EvalError> {
    if m.rows != m.cols {
        return Err(EvalError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if is_diagonal {
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            out.set(i, i, m.get(i, i).exp());
        }
        return Ok(out);
    }

    // Scale until the norm is at most 1/2.
    let mut squarings = 0u32;
    let mut norm = m.norm_inf();
    let half: F::Real = <F::Real as NumCast>::from(0.5).unwrap();
    while norm > half && squarings < 64 {
        norm = norm * half;
        squarings += 1;
    }
    let scale = F::from_f64(0.5f64.powi(squarings as i32));
    let scaled = m.scale(&scale);

    let tol: F::Real = <F::Real as NumCast>::from(1e-13).unwrap();
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    let mut k = 1u32;
    loop {
        term = term.matmul(&scaled).scale(&F::from_f64(1.0 / k as f64));
        sum = sum.add(&term);
        if term.norm_inf() < tol || k > 60 {
            break;
        }
        k += 1;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    Ok(sum)
}

/// Renders a number with `sig` significant digits, using scientific
/// notation with an explicit exponent sign outside a moderate range.
pub fn format_real(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", sig.saturating_sub(1), x);
    let (_, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("numeric exponent");
    if (-3..sig as i32).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let (mant, _) = sci.split_once('e').unwrap();
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{}", trim_fraction(mant.to_string()), sign, exp.abs())
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders a field element; pure reals drop the imaginary part, pure
/// imaginaries drop the real part.
pub fn format_field<F: Field>(x: &F, sig: usize) -> String {
    let re: f64 = <f64 as NumCast>::from(x.real()).unwrap();
    let im: f64 = <f64 as NumCast>::from(x.imag()).unwrap();
    if im == 0.0 {
        format_real(re, sig)
    } else if re == 0.0 {
        format!("{}i", format_real(im, sig))
    } else if im < 0.0 {
        format!("{}-{}i", format_real(re, sig), format_real(-im, sig))
    } else {
        format!("{}+{}i", format_real(re, sig), format_real(im, sig))
    }
}

/// Bracketed row-per-line rendering used by the CLI `value` output.
pub fn format_matrix<F: Field>(m: &DenseMatrix<F>, sig: usize) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        out.push('[');
        for j in 0..m.cols() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format_field(m.get(i, j), sig));
        }
        out.push_str("]\n");
    }
    out
}

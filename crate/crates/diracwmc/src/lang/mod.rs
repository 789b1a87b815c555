//! The typed scalar/matrix expression language: AST, type checker, parser,
//! and printer.

use std::fmt;

use num_traits::Zero;

use crate::field::Field;

mod parser;
pub(crate) mod typecheck;

pub use parser::{parse, ParseError};
pub use typecheck::{typecheck, TypeError};

/// Field endomorphisms applicable entrywise or to scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endomorphism {
    Identity,
    Conjugate,
}

impl Endomorphism {
    pub fn apply<F: Field>(self, x: &F) -> F {
        match self {
            Endomorphism::Identity => x.clone(),
            Endomorphism::Conjugate => x.conj(),
        }
    }
}

/// An expression over scalars and `q^n x q^m` matrices.
///
/// Binary matrix products are stored left factor first: `MatMul(a, b)`
/// denotes the product `a · b`, which applies `b` first.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr<F: Field> {
    Const(F),
    SMul(Box<Expr<F>>, Box<Expr<F>>),
    SAdd(Box<Expr<F>>, Box<Expr<F>>),
    Trace(Box<Expr<F>>),
    Entry(u128, u128, Box<Expr<F>>),
    Apply(Endomorphism, Box<Expr<F>>),
    Bra(u128, u32),
    Ket(u128, u32),
    MatMul(Box<Expr<F>>, Box<Expr<F>>),
    MatAdd(Box<Expr<F>>, Box<Expr<F>>),
    Kron(Box<Expr<F>>, Box<Expr<F>>),
    ScalMul(Box<Expr<F>>, Box<Expr<F>>),
    Trans(Box<Expr<F>>),
}

/// The type of an expression: a scalar, or a matrix in `M(q, m -> n)`
/// (shape `q^n x q^m`; `input` is `m`, `output` is `n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprType {
    Scalar,
    Matrix { q: u32, input: u32, output: u32 },
}

impl fmt::Display for ExprType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprType::Scalar => write!(f, "scalar"),
            ExprType::Matrix { q, input, output } => {
                write!(f, "matrix({q}, {input} -> {output})")
            }
        }
    }
}

impl<F: Field> Expr<F> {
    pub fn constant(x: F) -> Self {
        Expr::Const(x)
    }

    pub fn smul(a: Expr<F>, b: Expr<F>) -> Self {
        Expr::SMul(Box::new(a), Box::new(b))
    }

    pub fn sadd(a: Expr<F>, b: Expr<F>) -> Self {
        Expr::SAdd(Box::new(a), Box::new(b))
    }

    pub fn trace(m: Expr<F>) -> Self {
        Expr::Trace(Box::new(m))
    }

    pub fn entry(i: u128, j: u128, m: Expr<F>) -> Self {
        Expr::Entry(i, j, Box::new(m))
    }

    pub fn apply(f: Endomorphism, e: Expr<F>) -> Self {
        Expr::Apply(f, Box::new(e))
    }

    /// The product `a · b` (`b` applied first).
    pub fn matmul(a: Expr<F>, b: Expr<F>) -> Self {
        Expr::MatMul(Box::new(a), Box::new(b))
    }

    pub fn matadd(a: Expr<F>, b: Expr<F>) -> Self {
        Expr::MatAdd(Box::new(a), Box::new(b))
    }

    pub fn kron(a: Expr<F>, b: Expr<F>) -> Self {
        Expr::Kron(Box::new(a), Box::new(b))
    }

    pub fn scalmul(s: Expr<F>, m: Expr<F>) -> Self {
        Expr::ScalMul(Box::new(s), Box::new(m))
    }

    pub fn trans(m: Expr<F>) -> Self {
        Expr::Trans(Box::new(m))
    }

    /// Left-to-right product of a nonempty sequence of matrix expressions.
    pub fn matmul_chain(mut factors: impl Iterator<Item = Expr<F>>) -> Self {
        let first = factors.next().expect("nonempty product");
        factors.fold(first, Expr::matmul)
    }

    /// Left-to-right sum of a nonempty sequence of matrix expressions.
    pub fn matadd_chain(mut terms: impl Iterator<Item = Expr<F>>) -> Self {
        let first = terms.next().expect("nonempty sum");
        terms.fold(first, Expr::matadd)
    }

    /// Kronecker product of a nonempty sequence, left to right.
    pub fn kron_chain(mut factors: impl Iterator<Item = Expr<F>>) -> Self {
        let first = factors.next().expect("nonempty Kronecker product");
        factors.fold(first, Expr::kron)
    }
}

/// Prints in the concrete syntax with full parenthesization, so that the
/// output parses back to the same tree. `apply(identity, e)` has no surface
/// syntax and prints as `e`.
impl<F: Field> fmt::Display for Expr<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(x) => write_const(f, x),
            Expr::SMul(a, b) | Expr::ScalMul(a, b) | Expr::MatMul(a, b) => {
                write!(f, "({a} * {b})")
            }
            Expr::SAdd(a, b) | Expr::MatAdd(a, b) => write!(f, "({a} + {b})"),
            Expr::Trace(m) => write!(f, "tr({m})"),
            Expr::Entry(i, j, m) => write!(f, "entry({i}, {j}, {m})"),
            Expr::Apply(Endomorphism::Identity, e) => write!(f, "{e}"),
            Expr::Apply(Endomorphism::Conjugate, e) => write!(f, "conj({e})"),
            Expr::Bra(i, q) => write!(f, "bra({i}, {q})"),
            Expr::Ket(i, q) => write!(f, "ket({i}, {q})"),
            Expr::Kron(a, b) => write!(f, "({a} kron {b})"),
            Expr::Trans(m) => write!(f, "trans({m})"),
        }
    }
}

fn write_const<F: Field>(f: &mut fmt::Formatter<'_>, x: &F) -> fmt::Result {
    let re = x.real();
    let im = x.imag();
    if im.is_zero() {
        write!(f, "{re}")
    } else if re.is_zero() {
        write!(f, "{im}i")
    } else {
        // Not surface syntax for a single constant; reparses as a sum with
        // the same value.
        write!(f, "({re} + {im}i)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn display_uses_the_concrete_syntax() {
        let e: Expr<Complex64> = Expr::kron(
            Expr::scalmul(
                Expr::Const(Complex64::new(3.0, 0.0)),
                Expr::matmul(Expr::Ket(0, 2), Expr::Bra(1, 2)),
            ),
            Expr::Ket(0, 2),
        );
        assert_eq!(e.to_string(), "((3 * (ket(0, 2) * bra(1, 2))) kron ket(0, 2))");
    }

    #[test]
    fn constants_print_by_component() {
        let c = |re, im| Expr::<Complex64>::Const(Complex64::new(re, im));
        assert_eq!(c(2.5, 0.0).to_string(), "2.5");
        assert_eq!(c(0.0, -1.0).to_string(), "-1i");
        assert_eq!(c(1.0, 2.0).to_string(), "(1 + 2i)");
    }
}

//! Type checking for scalar/matrix expressions.

use thiserror::Error;

use crate::field::Field;
use crate::lang::{Expr, ExprType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("{node}: expected a scalar operand, got {got}")]
    ScalarExpected { node: &'static str, got: ExprTypeName },
    #[error("{node}: expected a matrix operand, got a scalar")]
    MatrixExpected { node: &'static str },
    #[error("{node}: base mismatch, {left} vs {right}")]
    BaseMismatch { node: &'static str, left: u32, right: u32 },
    #[error("{node}: dimension mismatch, {left} does not compose with {right}")]
    DimMismatch { node: &'static str, left: ExprType, right: ExprType },
    #[error("{node}: index {index} out of range (bound {bound})")]
    IndexOutOfRange { node: &'static str, index: u128, bound: u128 },
    #[error("{node}: base must be at least 2, got {q}")]
    BadBase { node: &'static str, q: u32 },
    #[error("trace requires a square matrix, got {0}")]
    NotSquare(ExprType),
}

/// Coarse type name used in error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprTypeName {
    Scalar,
    Matrix,
}

impl std::fmt::Display for ExprTypeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExprTypeName::Scalar => write!(f, "a scalar"),
            ExprTypeName::Matrix => write!(f, "a matrix"),
        }
    }
}

/// Returns the unique type of the expression, or the first rule violation.
pub fn typecheck<F: Field>(e: &Expr<F>) -> Result<ExprType, TypeError> {
    match e {
        Expr::Const(_) => Ok(ExprType::Scalar),
        Expr::SMul(a, b) => {
            expect_scalar("scalar product", a)?;
            expect_scalar("scalar product", b)?;
            Ok(ExprType::Scalar)
        }
        Expr::SAdd(a, b) => {
            expect_scalar("scalar sum", a)?;
            expect_scalar("scalar sum", b)?;
            Ok(ExprType::Scalar)
        }
        Expr::Trace(m) => {
            let t = expect_matrix("trace", m)?;
            let ExprType::Matrix { input, output, .. } = t else { unreachable!() };
            if input != output {
                return Err(TypeError::NotSquare(t));
            }
            Ok(ExprType::Scalar)
        }
        Expr::Entry(i, j, m) => {
            let t = expect_matrix("entry", m)?;
            let ExprType::Matrix { q, input, output } = t else { unreachable!() };
            check_index("entry", *i, power_bound(q, output))?;
            check_index("entry", *j, power_bound(q, input))?;
            Ok(ExprType::Scalar)
        }
        Expr::Apply(_, e) => typecheck(e),
        Expr::Bra(i, q) => {
            check_base("bra", *q)?;
            check_index("bra", *i, Some(*q as u128))?;
            Ok(ExprType::Matrix { q: *q, input: 1, output: 0 })
        }
        Expr::Ket(i, q) => {
            check_base("ket", *q)?;
            check_index("ket", *i, Some(*q as u128))?;
            Ok(ExprType::Matrix { q: *q, input: 0, output: 1 })
        }
        Expr::MatMul(a, b) => {
            let ta = expect_matrix("matrix product", a)?;
            let tb = expect_matrix("matrix product", b)?;
            let (ExprType::Matrix { q: qa, input: ka, output: n }, ExprType::Matrix { q: qb, input: m, output: kb }) =
                (ta, tb)
            else {
                unreachable!()
            };
            if qa != qb {
                return Err(TypeError::BaseMismatch { node: "matrix product", left: qa, right: qb });
            }
            // The composition is read right to left: b's output feeds a.
            if ka != kb {
                return Err(TypeError::DimMismatch { node: "matrix product", left: ta, right: tb });
            }
            Ok(ExprType::Matrix { q: qa, input: m, output: n })
        }
        Expr::MatAdd(a, b) => {
            let ta = expect_matrix("matrix sum", a)?;
            let tb = expect_matrix("matrix sum", b)?;
            let (ExprType::Matrix { q: qa, .. }, ExprType::Matrix { q: qb, .. }) = (ta, tb) else {
                unreachable!()
            };
            if qa != qb {
                return Err(TypeError::BaseMismatch { node: "matrix sum", left: qa, right: qb });
            }
            if ta != tb {
                return Err(TypeError::DimMismatch { node: "matrix sum", left: ta, right: tb });
            }
            Ok(ta)
        }
        Expr::Kron(a, b) => {
            let ta = expect_matrix("kronecker product", a)?;
            let tb = expect_matrix("kronecker product", b)?;
            let (ExprType::Matrix { q: qa, input: m1, output: n1 }, ExprType::Matrix { q: qb, input: m2, output: n2 }) =
                (ta, tb)
            else {
                unreachable!()
            };
            if qa != qb {
                return Err(TypeError::BaseMismatch {
                    node: "kronecker product",
                    left: qa,
                    right: qb,
                });
            }
            Ok(ExprType::Matrix { q: qa, input: m1 + m2, output: n1 + n2 })
        }
        Expr::ScalMul(s, m) => {
            expect_scalar("scalar-matrix product", s)?;
            expect_matrix("scalar-matrix product", m)
        }
        Expr::Trans(m) => {
            let t = expect_matrix("transpose", m)?;
            let ExprType::Matrix { q, input, output } = t else { unreachable!() };
            Ok(ExprType::Matrix { q, input: output, output: input })
        }
    }
}

fn expect_scalar<F: Field>(node: &'static str, e: &Expr<F>) -> Result<(), TypeError> {
    match typecheck(e)? {
        ExprType::Scalar => Ok(()),
        ExprType::Matrix { .. } => {
            Err(TypeError::ScalarExpected { node, got: ExprTypeName::Matrix })
        }
    }
}

fn expect_matrix<F: Field>(node: &'static str, e: &Expr<F>) -> Result<ExprType, TypeError> {
    match typecheck(e)? {
        t @ ExprType::Matrix { .. } => Ok(t),
        ExprType::Scalar => Err(TypeError::MatrixExpected { node }),
    }
}

fn check_base(node: &'static str, q: u32) -> Result<(), TypeError> {
    if q < 2 {
        Err(TypeError::BadBase { node, q })
    } else {
        Ok(())
    }
}

/// `q^e` in `u128`, or `None` when it overflows (indices are then always in
/// range: `u128` cannot reach the bound).
pub(crate) fn power_bound(q: u32, e: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(q as u128)?;
    }
    Some(acc)
}

fn check_index(node: &'static str, index: u128, bound: Option<u128>) -> Result<(), TypeError> {
    match bound {
        Some(bound) if index >= bound => Err(TypeError::IndexOutOfRange { node, index, bound }),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type E = Expr<Complex64>;

    fn c(x: f64) -> E {
        Expr::Const(Complex64::new(x, 0.0))
    }

    #[test]
    fn worked_example_types_as_one_to_two() {
        // (3 · ket(0,2) · bra(1,2)) ⊗ ket(0,2)
        let e = E::kron(
            E::scalmul(c(3.0), E::matmul(E::Ket(0, 2), E::Bra(1, 2))),
            E::Ket(0, 2),
        );
        assert_eq!(typecheck(&e).unwrap(), ExprType::Matrix { q: 2, input: 1, output: 2 });
    }

    #[test]
    fn kets_do_not_compose_with_kets() {
        let e = E::matmul(E::Ket(0, 2), E::Ket(0, 2));
        assert!(matches!(
            typecheck(&e).unwrap_err(),
            TypeError::DimMismatch { node: "matrix product", .. }
        ));
    }

    #[test]
    fn trace_of_square_outer_product_is_scalar() {
        let e = E::trace(E::matmul(E::Ket(0, 3), E::Bra(0, 3)));
        assert_eq!(typecheck(&e).unwrap(), ExprType::Scalar);
    }

    #[test]
    fn trace_rejects_non_square() {
        let e = E::trace(E::Ket(0, 2));
        assert!(matches!(typecheck(&e).unwrap_err(), TypeError::NotSquare(_)));
    }

    #[test]
    fn index_bounds_are_enforced() {
        assert!(matches!(
            typecheck(&E::Bra(2, 2)).unwrap_err(),
            TypeError::IndexOutOfRange { node: "bra", index: 2, bound: 2 }
        ));
        let outer = E::matmul(E::Ket(0, 2), E::Bra(0, 2));
        assert!(typecheck(&E::entry(1, 1, outer.clone())).is_ok());
        assert!(matches!(
            typecheck(&E::entry(2, 0, outer)).unwrap_err(),
            TypeError::IndexOutOfRange { node: "entry", .. }
        ));
    }

    #[test]
    fn huge_exponents_do_not_overflow_bounds() {
        // A 100-fold Kronecker power of a 3x3 identity-like factor has
        // q^100 rows; the bound saturates rather than overflowing.
        let factor = E::matmul(E::Ket(0, 3), E::Bra(0, 3));
        let mut e = factor.clone();
        for _ in 0..99 {
            e = E::kron(e, factor.clone());
        }
        assert_eq!(typecheck(&e).unwrap(), ExprType::Matrix { q: 3, input: 100, output: 100 });
        assert!(typecheck(&E::entry(0, 0, e)).is_ok());
    }

    #[test]
    fn base_mismatch_is_reported() {
        let e = E::matadd(E::Ket(0, 2), E::Ket(0, 3));
        assert!(matches!(
            typecheck(&e).unwrap_err(),
            TypeError::BaseMismatch { node: "matrix sum", left: 2, right: 3 }
        ));
    }

    #[test]
    fn apply_preserves_the_operand_type() {
        use crate::lang::Endomorphism;
        let e = E::apply(Endomorphism::Conjugate, E::Ket(1, 3));
        assert_eq!(typecheck(&e).unwrap(), ExprType::Matrix { q: 3, input: 0, output: 1 });
        let s = E::apply(Endomorphism::Conjugate, c(2.0));
        assert_eq!(typecheck(&s).unwrap(), ExprType::Scalar);
    }
}

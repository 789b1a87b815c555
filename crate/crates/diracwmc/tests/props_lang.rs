//! Properties of the expression language: printing, parsing, and typing.

mod common;

use diracwmc::{eval_value, parse, typecheck, Value};
use proptest::prelude::*;

use common::{random_expr, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Printing an expression yields text that parses back to something
    /// that prints identically and means the same thing.
    #[test]
    fn print_parse_round_trip(seed: u64, depth in 0u32..4, q in 2u32..=3) {
        let e = random_expr(&mut rng(seed), depth, q);
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        prop_assert_eq!(typecheck(&back).unwrap(), typecheck(&e).unwrap());
        match (eval_value(&e).unwrap(), eval_value(&back).unwrap()) {
            (Value::Scalar(a), Value::Scalar(b)) => prop_assert_eq!(a, b),
            (Value::Matrix(a), Value::Matrix(b)) => {
                prop_assert_eq!(a.rows(), b.rows());
                for i in 0..a.rows() {
                    for j in 0..a.cols() {
                        prop_assert_eq!(a.get(i, j), b.get(i, j));
                    }
                }
            }
            _ => prop_assert!(false, "shape changed by the round trip"),
        }
    }

    /// The checker assigns one type, and dense evaluation produces exactly
    /// the shape that type promises.
    #[test]
    fn evaluation_matches_the_declared_type(seed: u64, depth in 0u32..4, q in 2u32..=3) {
        let e = random_expr(&mut rng(seed), depth, q);
        let ty = typecheck(&e).unwrap();
        prop_assert_eq!(typecheck(&e.clone()).unwrap(), ty);
        match (ty, eval_value(&e).unwrap()) {
            (diracwmc::ExprType::Scalar, Value::Scalar(_)) => {}
            (diracwmc::ExprType::Matrix { q, input, output }, Value::Matrix(m)) => {
                prop_assert_eq!(m.rows(), (q as usize).pow(output));
                prop_assert_eq!(m.cols(), (q as usize).pow(input));
            }
            _ => prop_assert!(false, "shape disagrees with the type"),
        }
    }
}

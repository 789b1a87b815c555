//! Shared helpers for the integration tests: seeded random expressions,
//! formulas, and weight functions.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use diracwmc::{BoolFormula, Endomorphism, Expr, Variable, WeightFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    match rng.gen_range(0..4) {
        0 => Complex64::new(rng.gen_range(-3i32..=3) as f64, 0.0),
        1 => Complex64::new(rng.gen_range(-2.0..2.0), 0.0),
        2 => Complex64::new(0.0, rng.gen_range(-2.0..2.0)),
        _ => Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
    }
}

/// A random well-typed scalar expression of the given depth budget.
pub fn random_scalar(rng: &mut ChaCha8Rng, depth: u32, q: u32) -> Expr<Complex64> {
    if depth == 0 {
        return Expr::constant(random_complex(rng));
    }
    match rng.gen_range(0..6) {
        0 => Expr::constant(random_complex(rng)),
        1 => Expr::sadd(random_scalar(rng, depth - 1, q), random_scalar(rng, depth - 1, q)),
        2 => Expr::smul(random_scalar(rng, depth - 1, q), random_scalar(rng, depth - 1, q)),
        3 => Expr::apply(random_endo(rng), random_scalar(rng, depth - 1, q)),
        4 => {
            let k = rng.gen_range(0..=2u32);
            Expr::trace(random_matrix(rng, depth - 1, q, k, k))
        }
        _ => {
            let m = rng.gen_range(0..=2u32);
            let n = rng.gen_range(0..=2u32);
            let i = rng.gen_range(0..(q as u128).pow(n));
            let j = rng.gen_range(0..(q as u128).pow(m));
            Expr::entry(i, j, random_matrix(rng, depth - 1, q, m, n))
        }
    }
}

fn random_endo(rng: &mut ChaCha8Rng) -> Endomorphism {
    if rng.gen() {
        Endomorphism::Conjugate
    } else {
        Endomorphism::Identity
    }
}

/// A random well-typed expression of type `matrix(q, m -> n)`.
pub fn random_matrix(rng: &mut ChaCha8Rng, depth: u32, q: u32, m: u32, n: u32) -> Expr<Complex64> {
    if depth == 0 {
        return leaf_matrix(rng, q, m, n);
    }
    match rng.gen_range(0..7) {
        0 => leaf_matrix(rng, q, m, n),
        1 => Expr::matadd(
            random_matrix(rng, depth - 1, q, m, n),
            random_matrix(rng, depth - 1, q, m, n),
        ),
        2 => Expr::scalmul(
            random_scalar(rng, depth - 1, q),
            random_matrix(rng, depth - 1, q, m, n),
        ),
        3 => Expr::apply(random_endo(rng), random_matrix(rng, depth - 1, q, m, n)),
        4 => Expr::trans(random_matrix(rng, depth - 1, q, n, m)),
        5 => {
            let k = rng.gen_range(0..=2u32);
            Expr::matmul(
                random_matrix(rng, depth - 1, q, k, n),
                random_matrix(rng, depth - 1, q, m, k),
            )
        }
        _ => {
            let m1 = rng.gen_range(0..=m);
            let n1 = rng.gen_range(0..=n);
            Expr::kron(
                random_matrix(rng, depth - 1, q, m1, n1),
                random_matrix(rng, depth - 1, q, m - m1, n - n1),
            )
        }
    }
}

/// A depth-0 matrix of the requested type built from bras and kets. The
/// `0 -> 0` case (a one-by-one matrix) is a bra applied to a ket.
fn leaf_matrix(rng: &mut ChaCha8Rng, q: u32, m: u32, n: u32) -> Expr<Complex64> {
    let mut factors: Vec<Expr<Complex64>> = Vec::new();
    for _ in 0..n {
        factors.push(Expr::Ket(rng.gen_range(0..q as u128), q));
    }
    for _ in 0..m {
        factors.push(Expr::Bra(rng.gen_range(0..q as u128), q));
    }
    if factors.is_empty() {
        let i = rng.gen_range(0..q as u128);
        return Expr::matmul(Expr::Bra(i, q), Expr::Ket(i, q));
    }
    Expr::kron_chain(factors.into_iter())
}

/// A random expression of either shape; covers all thirteen constructors
/// across draws.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32, q: u32) -> Expr<Complex64> {
    if rng.gen() {
        random_scalar(rng, depth, q)
    } else {
        let m = rng.gen_range(0..=2u32);
        let n = rng.gen_range(0..=2u32);
        random_matrix(rng, depth, q, m, n)
    }
}

/// A random formula over the given variables.
pub fn random_formula(rng: &mut ChaCha8Rng, vars: &[Variable], depth: u32) -> BoolFormula {
    if depth == 0 || rng.gen_range(0..5) == 0 {
        return match rng.gen_range(0..6) {
            0 => BoolFormula::True,
            1 => BoolFormula::False,
            _ => {
                let v = vars[rng.gen_range(0..vars.len())];
                if rng.gen() {
                    BoolFormula::var(v)
                } else {
                    BoolFormula::nvar(v)
                }
            }
        };
    }
    match rng.gen_range(0..4) {
        0 => BoolFormula::not(random_formula(rng, vars, depth - 1)),
        1 => BoolFormula::and(
            (0..rng.gen_range(2..=3))
                .map(|_| random_formula(rng, vars, depth - 1))
                .collect(),
        ),
        2 => BoolFormula::or(
            (0..rng.gen_range(2..=3))
                .map(|_| random_formula(rng, vars, depth - 1))
                .collect(),
        ),
        _ => BoolFormula::iff(
            random_formula(rng, vars, depth - 1),
            random_formula(rng, vars, depth - 1),
        ),
    }
}

/// Random complex weights over the given variables.
pub fn random_weights(rng: &mut ChaCha8Rng, vars: &[Variable]) -> WeightFunction<Complex64> {
    let mut w = WeightFunction::new();
    for &v in vars {
        w.insert(v, random_complex(rng), random_complex(rng));
    }
    w
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

//! Scalar abstraction for weights and matrix entries.
//!
//! The counting kernel, encodings, and compiler are generic over the field
//! the weights live in. Real and complex floating-point fields are provided;
//! the crate root exports concrete aliases for the common `f64`-backed case.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, NumCast, One, Zero};

/// Field elements used as weights and matrix entries.
///
/// The only supported non-identity endomorphism is complex conjugation,
/// which is the identity on the real types.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    /// The underlying real type.
    type Real: Float + Display + Debug + Send + Sync + 'static;

    fn from_real(re: Self::Real) -> Self;
    fn from_f64(x: f64) -> Self;
    fn real(&self) -> Self::Real;
    fn imag(&self) -> Self::Real;
    fn conj(&self) -> Self;
    /// Absolute value (complex modulus).
    fn modulus(&self) -> Self::Real;
    fn exp(&self) -> Self;
}

macro_rules! impl_real_field {
    ($t:ty) => {
        impl Field for $t {
            type Real = $t;

            fn from_real(re: $t) -> Self {
                re
            }
            fn from_f64(x: f64) -> Self {
                <$t as NumCast>::from(x).expect("finite f64 converts to real field")
            }
            fn real(&self) -> $t {
                *self
            }
            fn imag(&self) -> $t {
                0.0
            }
            fn conj(&self) -> Self {
                *self
            }
            fn modulus(&self) -> $t {
                self.abs()
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
        }
    };
}

impl_real_field!(f32);
impl_real_field!(f64);

macro_rules! impl_complex_field {
    ($t:ty) => {
        impl Field for Complex<$t> {
            type Real = $t;

            fn from_real(re: $t) -> Self {
                Complex::new(re, 0.0)
            }
            fn from_f64(x: f64) -> Self {
                Complex::new(<$t as NumCast>::from(x).expect("finite f64"), 0.0)
            }
            fn real(&self) -> $t {
                self.re
            }
            fn imag(&self) -> $t {
                self.im
            }
            fn conj(&self) -> Self {
                Complex::conj(self)
            }
            fn modulus(&self) -> $t {
                self.norm()
            }
            fn exp(&self) -> Self {
                Complex::exp(*self)
            }
        }
    };
}

impl_complex_field!(f32);
impl_complex_field!(f64);

/// Relative distance between two field elements, `|a - b| / max(|a|, |b|, 1)`.
pub fn rel_dist<F: Field>(a: &F, b: &F) -> F::Real {
    let diff = (a.clone() - b.clone()).modulus();
    let scale = a.modulus().max(b.modulus()).max(F::Real::one());
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn conjugation_is_identity_on_reals() {
        assert_eq!(Field::conj(&2.5f64), 2.5);
    }

    #[test]
    fn complex_conjugation_flips_imag() {
        let z = Complex64::new(1.0, -2.0);
        assert_eq!(Field::conj(&z), Complex64::new(1.0, 2.0));
    }

    #[test]
    fn rel_dist_small_numbers_uses_absolute_scale() {
        assert!(rel_dist(&1e-14f64, &0.0) < 1e-12);
    }
}

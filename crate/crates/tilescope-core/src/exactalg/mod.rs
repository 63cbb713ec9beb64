//! Exact arithmetic: extended binomials, Pochhammer symbols, product and sum
//! conventions, fraction-free determinants over three rings, interpolation,
//! and an arbitrary-precision real type for the analytic side.

mod combin;
mod eisenstein;
mod matrix;
mod poly;
pub mod real;
mod ring;

pub use combin::{
    binom, binom_big, factorial, pochhammer, range_product, range_product_int, signed_sum, small_ratio_product, tree_product,
    ProductConvention,
};
pub use eisenstein::Eisenstein;
pub use matrix::Matrix;
pub use poly::{interpolate, RationalPoly};
pub use real::HighReal;
pub use ring::Ring;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Shorthand for an exact rational from two machine integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an exact rational from a machine integer.
pub fn rint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Converts a rational known to be integral, failing otherwise.
pub fn to_integer(r: &BigRational) -> crate::Result<BigInt> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(crate::Error::NotIntegral(r.to_string()))
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        RationalPoly::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_root(r: &BigRational) -> Self {
        RationalPoly::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(x)))
    }

    pub fn add(&self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRational::zero();
        RationalPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, o: &RationalPoly) -> RationalPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// True when every coefficient is a non-negative integer.
    pub fn has_nonnegative_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Lagrange interpolation through distinct nodes.
pub fn interpolate(points: &[(BigRational, BigRational)]) -> Result<RationalPoly> {
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::DuplicateNode(xi.to_string()));
        }
    }
    let mut acc = RationalPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = RationalPoly::constant(yi.clone());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                let inv = (xi - xj).recip();
                basis = basis.mul(&RationalPoly::linear_root(xj)).scale(&inv);
            }
        }
        acc = acc.add(&basis);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rint};
    use proptest::prelude::*;

    #[test]
    fn interpolates_quadratic() {
        let pts: Vec<_> = (0..3).map(|x| (rint(x), rint(x * x + 1))).collect();
        let p = interpolate(&pts).unwrap();
        assert_eq!(p.coeffs(), &[rint(1), rint(0), rint(1)]);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn duplicate_nodes_fail() {
        let pts = vec![(rint(1), rint(2)), (rint(1), rint(3))];
        assert!(matches!(interpolate(&pts), Err(Error::DuplicateNode(_))));
    }

    proptest! {
        #[test]
        fn interpolation_reproduces_polynomial(
            coeffs in proptest::collection::vec(-20i64..20, 1..7),
            start in -5i64..5,
        ) {
            let p = RationalPoly::new(coeffs.iter().map(|&c| rint(c)).collect());
            let n = coeffs.len() as i64;
            let pts: Vec<_> = (0..n).map(|i| {
                let x = rat(start + 2 * i, 3);
                let y = p.eval(&x);
                (x, y)
            }).collect();
            prop_assert_eq!(interpolate(&pts).unwrap(), p);
        }
    }
}

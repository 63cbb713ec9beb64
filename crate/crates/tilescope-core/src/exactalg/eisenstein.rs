use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::ring::Ring;

/// Eisenstein integer `x + y*w` where `w = -1/2 + (sqrt 3)/2 i`, so that
/// `w^2 = -1 - w` and `w^3 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Eisenstein {
    pub x: BigInt,
    pub y: BigInt,
}

impl Eisenstein {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Eisenstein { x: x.into(), y: y.into() }
    }

    /// The primitive cube root of unity `w`.
    pub fn w() -> Self {
        Eisenstein::new(0, 1)
    }

    /// `w^2 = -1 - w`.
    pub fn w2() -> Self {
        Eisenstein::new(-1, -1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Eisenstein::new(n, 0)
    }

    /// Complex conjugate: `w` maps to `w^2`.
    pub fn conj(&self) -> Self {
        Eisenstein { x: &self.x - &self.y, y: -&self.y }
    }

    /// `x^2 - xy + y^2`, the product with the conjugate.
    pub fn norm(&self) -> BigInt {
        &self.x * &self.x - &self.x * &self.y + &self.y * &self.y
    }

    /// Rational integer value, if the `w` part vanishes.
    pub fn as_int(&self) -> Option<&BigInt> {
        self.y.is_zero().then_some(&self.x)
    }
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}w", self.x, self.y)
    }
}

impl Add for &Eisenstein {
    type Output = Eisenstein;
    fn add(self, o: &Eisenstein) -> Eisenstein {
        Eisenstein { x: &self.x + &o.x, y: &self.y + &o.y }
    }
}

impl Sub for &Eisenstein {
    type Output = Eisenstein;
    fn sub(self, o: &Eisenstein) -> Eisenstein {
        Eisenstein { x: &self.x - &o.x, y: &self.y - &o.y }
    }
}

impl Mul for &Eisenstein {
    type Output = Eisenstein;
    fn mul(self, o: &Eisenstein) -> Eisenstein {
        // (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2, with w^2 = -1 - w
        let bd = &self.y * &o.y;
        Eisenstein {
            x: &self.x * &o.x - &bd,
            y: &self.x * &o.y + &self.y * &o.x - bd,
        }
    }
}

impl Neg for &Eisenstein {
    type Output = Eisenstein;
    fn neg(self) -> Eisenstein {
        Eisenstein { x: -&self.x, y: -&self.y }
    }
}

impl Ring for Eisenstein {
    fn zero() -> Self {
        Eisenstein::new(0, 0)
    }
    fn one() -> Self {
        Eisenstein::new(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let t = self * &d.conj();
        let (qx, rx) = t.x.div_rem(&n);
        let (qy, ry) = t.y.div_rem(&n);
        (rx.is_zero() && ry.is_zero()).then_some(Eisenstein { x: qx, y: qy })
    }
    fn from_int(n: &BigInt) -> Self {
        Eisenstein { x: n.clone(), y: <BigInt as Ring>::zero() }
    }
}

impl One for Eisenstein {
    fn one() -> Self {
        <Eisenstein as Ring>::one()
    }
}

impl Mul for Eisenstein {
    type Output = Eisenstein;
    fn mul(self, o: Eisenstein) -> Eisenstein {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cube_root_of_unity() {
        let w = Eisenstein::w();
        let w2 = &w * &w;
        assert_eq!(w2, Eisenstein::w2());
        assert_eq!(&w2 * &w, Eisenstein::from_int(1));
        let s = &(&Eisenstein::from_int(1) + &w) + &w2;
        assert!(Ring::is_zero(&s));
        assert_eq!(w.norm(), BigInt::from(1));
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
            let p = Eisenstein::new(a, b);
            let q = Eisenstein::new(c, d);
            prop_assert_eq!((&p * &q).norm(), p.norm() * q.norm());
            prop_assert!(p.norm() >= BigInt::from(0));
        }

        #[test]
        fn exact_division_inverts_product(a in -30i64..30, b in -30i64..30, c in -30i64..30, d in -30i64..30) {
            let p = Eisenstein::new(a, b);
            let q = Eisenstein::new(c, d);
            prop_assume!(!Ring::is_zero(&q));
            let prod = &p * &q;
            prop_assert_eq!(prod.div_exact(&q), Some(p));
        }
    }
}

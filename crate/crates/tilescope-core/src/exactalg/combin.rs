use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Extended binomial coefficient: the falling factorial `n(n-1)...(n-k+1)/k!`
/// for `k >= 0` (any integer `n`), and `0` for `k < 0`.
pub fn binom(n: i64, k: i64) -> BigInt {
    binom_big(&BigInt::from(n), k)
}

/// [`binom`] with an arbitrary-precision upper argument.
pub fn binom_big(n: &BigInt, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    // For 0 <= n < k the falling factorial hits zero.
    if !n.is_negative() && *n < BigInt::from(k) {
        return BigInt::zero();
    }
    // Use the shorter side when the symmetry holds.
    let mut k = k;
    if !n.is_negative() {
        let nk = n - BigInt::from(k);
        if nk < BigInt::from(k) {
            k = i64::try_from(&nk).expect("binomial index fits in i64");
        }
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = binom(n, i) * (n - i) / (i + 1) is exact at each step.
        acc *= n - BigInt::from(i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// `n!` for `n >= 0`.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Pochhammer symbol for integer `k`: the rising factorial for `k > 0`,
/// `1` for `k = 0`, and `1/((alpha-1)(alpha-2)...(alpha+k))` for `k < 0`.
pub fn pochhammer(alpha: &BigRational, k: i64) -> Result<BigRational> {
    let (p, q) = (alpha.numer(), alpha.denom());
    if k >= 0 {
        let terms: Vec<BigInt> = (0..k).map(|i| p + q * BigInt::from(i)).collect();
        return Ok(BigRational::new(tree_product(&terms), num_traits::pow(q.clone(), k as usize)));
    }
    let mut terms = Vec::with_capacity((-k) as usize);
    for i in 1..=(-k) {
        let f = p - q * BigInt::from(i);
        if f.is_zero() {
            return Err(Error::Pole(format!("pochhammer({alpha}, {k}) divides by alpha-{i} = 0")));
        }
        terms.push(f);
    }
    Ok(BigRational::new(num_traits::pow(q.clone(), (-k) as usize), tree_product(&terms)))
}

/// Balanced product of integers; keeps operands similar in size.
pub fn tree_product(terms: &[BigInt]) -> BigInt {
    match terms.len() {
        0 => BigInt::one(),
        1 => terms[0].clone(),
        n => tree_product(&terms[..n / 2]) * tree_product(&terms[n / 2..]),
    }
}

/// How a product `prod_{i=lo}^{hi}` with `hi < lo` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductConvention {
    /// `prod_{i=m}^{n-1} f(i) = 1 / prod_{i=n}^{m-1} f(i)` when `n < m`.
    Reciprocal,
    /// Out-of-order limits give the empty product `1`.
    Clamped,
}

/// `prod_{i=lo}^{hi} f(i)` (inclusive limits) under the given convention.
pub fn range_product<F>(lo: i64, hi: i64, conv: ProductConvention, mut f: F) -> Result<BigRational>
where
    F: FnMut(i64) -> Result<BigRational>,
{
    let (mut nums, mut dens) = (Vec::new(), Vec::new());
    let mut push = |t: BigRational| {
        let (n, d) = t.into_raw();
        nums.push(n);
        dens.push(d);
    };
    if hi >= lo {
        for i in lo..=hi {
            push(f(i)?);
        }
        return Ok(BigRational::new(tree_product(&nums), tree_product(&dens)));
    }
    match conv {
        ProductConvention::Clamped => Ok(BigRational::one()),
        ProductConvention::Reciprocal => {
            // prod_{i=lo}^{hi} = prod_{i=m}^{n-1} with m = lo, n = hi + 1 < m
            for i in (hi + 1)..lo {
                let t = f(i)?;
                if t.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                push(t);
            }
            Ok(BigRational::new(tree_product(&dens), tree_product(&nums)))
        }
    }
}

/// Product of machine-size fractions `num / den`, reduced through prime
/// exponents so no gcd on large integers is needed.
pub fn small_ratio_product<I>(terms: I) -> Result<BigRational>
where
    I: IntoIterator<Item = (i64, i64)>,
{
    let mut exps: BTreeMap<u64, i64> = BTreeMap::new();
    let mut negative = false;
    for (num, den) in terms {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        if num == 0 {
            return Ok(BigRational::zero());
        }
        negative ^= (num < 0) ^ (den < 0);
        for (v, sign) in [(num.unsigned_abs(), 1), (den.unsigned_abs(), -1)] {
            for p in prime_factors(v) {
                *exps.entry(p).or_default() += sign;
            }
        }
    }
    let (mut nums, mut dens) = (Vec::new(), Vec::new());
    for (p, e) in exps {
        let side = if e > 0 { &mut nums } else { &mut dens };
        side.extend(std::iter::repeat_n(BigInt::from(p), e.unsigned_abs() as usize));
    }
    let num = tree_product(&nums);
    let num = if negative { -num } else { num };
    Ok(BigRational::new_raw(num, tree_product(&dens)))
}

/// Prime factors of `n` with multiplicity, by trial division.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// [`range_product`] for integer-valued terms; the result may still be a
/// proper fraction under the reciprocal convention.
pub fn range_product_int<F>(lo: i64, hi: i64, conv: ProductConvention, mut f: F) -> Result<BigRational>
where
    F: FnMut(i64) -> BigInt,
{
    range_product(lo, hi, conv, |i| Ok(BigRational::from_integer(f(i))))
}

/// `sum_{i=lo}^{hi} f(i)` with the signed convention
/// `sum_{i=a}^{b} = -sum_{i=b+1}^{a-1}` for `b < a` (so `sum_{a}^{a-1} = 0`).
pub fn signed_sum<F>(lo: i64, hi: i64, mut f: F) -> BigInt
where
    F: FnMut(i64) -> BigInt,
{
    if hi >= lo {
        (lo..=hi).fold(BigInt::zero(), |acc, i| acc + f(i))
    } else {
        -((hi + 1)..lo).fold(BigInt::zero(), |acc, i| acc + f(i))
    }
}

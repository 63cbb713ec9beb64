//! Arbitrary-precision reals backed by `astro-float`, with a Gamma function
//! built on Stirling's series and exact Bernoulli numbers.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::combin::binom;
use crate::{Error, Result};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 64;
/// Smallest precision accepted by the analytic routines.
pub const MIN_DIGITS: u32 = 16;

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 32;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

fn bits_for(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS
}

/// Validates a requested decimal precision.
pub fn check_precision(digits: u32) -> Result<u32> {
    if digits < MIN_DIGITS {
        Err(Error::Precision(format!("{digits} digits requested, at least {MIN_DIGITS} required")))
    } else {
        Ok(digits)
    }
}

/// Real number carried at an explicit decimal precision. Binary operations run
/// at the larger precision of the two operands.
#[derive(Clone)]
pub struct HighReal {
    v: BigFloat,
    digits: u32,
}

impl HighReal {
    fn wrap(v: BigFloat, digits: u32) -> Self {
        HighReal { v, digits }
    }

    fn p(&self) -> usize {
        bits_for(self.digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Same value carried at a different precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let mut v = self.v.clone();
        let _ = v.set_precision(bits_for(digits), RM);
        HighReal::wrap(v, digits)
    }

    pub fn from_i64(n: i64, digits: u32) -> Self {
        HighReal::wrap(BigFloat::from_i64(n, bits_for(digits)), digits)
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        HighReal::wrap(BigFloat::from_f64(x, bits_for(digits)), digits)
    }

    pub fn from_bigint(n: &BigInt, digits: u32) -> Self {
        // Keep only the leading bits so huge integers skip a full decimal rendering.
        let keep = bits_for(digits) as u64 + 64;
        let excess = n.bits().saturating_sub(keep);
        let top = HighReal::parse(&(n >> excess).to_string(), digits).expect("integer literal parses");
        if excess == 0 {
            top
        } else {
            &top * &HighReal::from_i64(2, digits).powi(excess as i64)
        }
    }

    pub fn from_rational(r: &BigRational, digits: u32) -> Self {
        let n = HighReal::from_bigint(r.numer(), digits);
        let d = HighReal::from_bigint(r.denom(), digits);
        &n / &d
    }

    /// Parses a decimal literal such as `1.2824e+0` or `-17`.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, bits_for(digits), RM, cc));
        if v.is_nan() {
            Err(Error::Precision(format!("cannot parse real literal {s:?}")))
        } else {
            Ok(HighReal::wrap(v, digits))
        }
    }

    pub fn zero(digits: u32) -> Self {
        HighReal::from_i64(0, digits)
    }

    pub fn one(digits: u32) -> Self {
        HighReal::from_i64(1, digits)
    }

    pub fn pi(digits: u32) -> Self {
        HighReal::wrap(with_consts(|cc| cc.pi(bits_for(digits), RM)), digits)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn abs(&self) -> Self {
        HighReal::wrap(self.v.abs(), self.digits)
    }

    pub fn exp(&self) -> Self {
        HighReal::wrap(with_consts(|cc| self.v.exp(self.p(), RM, cc)), self.digits)
    }

    pub fn ln(&self) -> Self {
        HighReal::wrap(with_consts(|cc| self.v.ln(self.p(), RM, cc)), self.digits)
    }

    pub fn sqrt(&self) -> Self {
        HighReal::wrap(self.v.sqrt(self.p(), RM), self.digits)
    }

    pub fn sin(&self) -> Self {
        HighReal::wrap(with_consts(|cc| self.v.sin(self.p(), RM, cc)), self.digits)
    }

    /// `self^e` for positive `self`.
    pub fn pow(&self, e: &HighReal) -> Self {
        let d = self.digits.max(e.digits);
        HighReal::wrap(with_consts(|cc| self.v.pow(&e.v, bits_for(d), RM, cc)), d)
    }

    /// `self^(num/den)` for positive `self`.
    pub fn pow_ratio(&self, num: i64, den: i64) -> Self {
        if den == 1 {
            return self.powi(num);
        }
        self.pow(&HighReal::from_rational(&BigRational::new(num.into(), den.into()), self.digits))
    }

    /// Integer power, including negative exponents.
    pub fn powi(&self, n: i64) -> Self {
        let m = n.unsigned_abs() as usize;
        let v = self.v.powi(m, self.p(), RM);
        let v = if n < 0 { v.reciprocal(self.p(), RM) } else { v };
        HighReal::wrap(v, self.digits)
    }

    pub fn recip(&self) -> Self {
        HighReal::wrap(self.v.reciprocal(self.p(), RM), self.digits)
    }

    /// Nearest `f64`; values beyond range saturate to infinities.
    pub fn to_f64(&self) -> f64 {
        self.to_sci_string(20).parse().unwrap_or(f64::NAN)
    }

    /// Scientific notation with `sig` significant digits, e.g. `2.0800e-1`.
    pub fn to_sci_string(&self, sig: usize) -> String {
        if self.v.is_zero() {
            return "0".into();
        }
        let raw = match with_consts(|cc| self.v.format(Radix::Dec, RM, cc)) {
            Ok(s) => s,
            Err(_) => return "NaN".into(),
        };
        let (neg, body) = match raw.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, raw.as_str()),
        };
        let Some((mant, exp)) = body.split_once('e') else {
            return raw;
        };
        let mut exp: i64 = exp.parse().unwrap_or(0);
        let mut ds: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
        // mantissa is d.ddd; normalise leading zeros away
        while ds.len() > 1 && ds[0] == 0 {
            ds.remove(0);
            exp -= 1;
        }
        let sig = sig.max(1);
        if ds.len() > sig {
            let round_up = ds[sig] >= 5;
            ds.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        ds.insert(0, 1);
                        ds.truncate(sig);
                        exp += 1;
                        break;
                    }
                    i -= 1;
                    if ds[i] == 9 {
                        ds[i] = 0;
                    } else {
                        ds[i] += 1;
                        break;
                    }
                }
            }
        }
        while ds.len() < sig {
            ds.push(0);
        }
        let digits: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
        let (head, tail) = digits.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{exp:+}")
        } else {
            format!("{sign}{head}.{tail}e{exp:+}")
        }
    }

    /// `|self - o|`.
    pub fn abs_diff(&self, o: &HighReal) -> HighReal {
        (self - o).abs()
    }

    /// `|self - o| / |o|`, or the absolute difference when `o` is zero.
    pub fn rel_diff(&self, o: &HighReal) -> HighReal {
        let d = self.abs_diff(o);
        if o.is_zero() {
            d
        } else {
            &d / &o.abs()
        }
    }

    /// True when `|self - o| <= tol`.
    pub fn approx_eq(&self, o: &HighReal, tol: f64) -> bool {
        let t = HighReal::from_f64(tol, self.digits.max(o.digits));
        self.abs_diff(o) <= t
    }
}

impl fmt::Display for HighReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.digits as usize);
        f.write_str(&self.to_sci_string(sig))
    }
}

impl fmt::Debug for HighReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HighReal({}, {} digits)", self.to_sci_string(self.digits as usize), self.digits)
    }
}

impl PartialEq for HighReal {
    fn eq(&self, o: &Self) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for HighReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &HighReal {
            type Output = HighReal;
            fn $m(self, o: &HighReal) -> HighReal {
                let d = self.digits.max(o.digits);
                HighReal::wrap(self.v.$m(&o.v, bits_for(d), RM), d)
            }
        }
        impl $tr for HighReal {
            type Output = HighReal;
            fn $m(self, o: HighReal) -> HighReal {
                (&self).$m(&o)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &HighReal {
    type Output = HighReal;
    fn neg(self) -> HighReal {
        HighReal::wrap(BigFloat::neg(&self.v), self.digits)
    }
}

impl Neg for HighReal {
    type Output = HighReal;
    fn neg(self) -> HighReal {
        -&self
    }
}

/// Bernoulli numbers `B_0..=B_m`, computed once and extended on demand.
pub(crate) fn bernoulli(m: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut b = cache.lock().expect("bernoulli cache");
    while b.len() <= m {
        let n = b.len() as i64;
        // sum_{k=0}^{n} binom(n+1, k) B_k = 0
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += BigRational::from_integer(binom(n + 1, k as i64)) * bk;
        }
        let next = -s / BigRational::from_integer(BigInt::from(n + 1));
        b.push(next);
    }
    b[..=m].to_vec()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: &HighReal) -> Result<HighReal> {
    if x.is_negative() || x.is_zero() {
        return Err(Error::Pole(format!("ln_gamma at non-positive argument {x}")));
    }
    let digits = x.digits;
    let w = digits + 10;
    let x = x.with_digits(w);
    let threshold = 0.4 * digits as f64 + 10.0;
    let xf = x.to_f64();
    let shift = if xf < threshold { (threshold - xf).ceil() as i64 } else { 0 };
    let mut z = x.clone();
    let mut prod = HighReal::one(w);
    for _ in 0..shift {
        prod = &prod * &z;
        z = &z + &HighReal::one(w);
    }
    let half = HighReal::from_rational(&BigRational::new(1.into(), 2.into()), w);
    let two_pi = &HighReal::pi(w) * &HighReal::from_i64(2, w);
    // (z - 1/2) ln z - z + ln(2 pi)/2 + sum B_{2k} / (2k(2k-1) z^{2k-1})
    let mut acc = &(&(&z - &half) * &z.ln()) - &z;
    acc = &acc + &(&two_pi.ln() * &half);
    let eps = HighReal::from_f64(10f64.powi(-(w as i32)), w);
    let z2 = &z * &z;
    let mut zpow = z.clone();
    let mut prev = None::<HighReal>;
    let mut k = 1usize;
    loop {
        let b = bernoulli(2 * k).pop().expect("nonempty");
        let c = HighReal::from_rational(&(b / BigRational::from_integer(BigInt::from((2 * k * (2 * k - 1)) as i64))), w);
        let term = &c / &zpow;
        let mag = term.abs();
        if mag < eps {
            break;
        }
        if let Some(p) = &prev {
            if mag > *p {
                // asymptotic series started to diverge
                break;
            }
        }
        acc = &acc + &term;
        prev = Some(mag);
        zpow = &zpow * &z2;
        k += 1;
        if k > 4 * w as usize + 50 {
            break;
        }
    }
    if shift > 0 {
        acc = &acc - &prod.ln();
    }
    Ok(acc.with_digits(digits))
}

/// `Gamma(x)` for real `x` away from the poles at non-positive integers.
pub fn gamma(x: &HighReal) -> Result<HighReal> {
    let digits = x.digits;
    if x.is_negative() || x.is_zero() {
        let floor = x.v.floor();
        if floor == x.v {
            return Err(Error::Pole(format!("gamma at non-positive integer {x}")));
        }
        // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        let w = digits + 10;
        let xw = x.with_digits(w);
        let pi = HighReal::pi(w);
        let s = (&pi * &xw).sin();
        let g = gamma(&(&HighReal::one(w) - &xw))?;
        return Ok((&pi / &(&s * &g)).with_digits(digits));
    }
    Ok(ln_gamma(x)?.exp())
}

/// `Gamma(r)` at an exact rational argument.
pub fn gamma_rational(r: &BigRational, digits: u32) -> Result<HighReal> {
    if r.is_integer() && !r.is_positive() {
        return Err(Error::Pole(format!("gamma at non-positive integer {r}")));
    }
    if r.is_integer() {
        let n = r.to_integer().to_u64().ok_or_else(|| Error::Precision(format!("gamma argument {r} too large")))?;
        if n <= 2000 {
            return Ok(HighReal::from_bigint(&super::combin::factorial(n - 1), digits));
        }
    }
    gamma(&HighReal::from_rational(r, digits))
}

/// `Gamma(alpha + k) / Gamma(alpha)` for rational `alpha` and rational `k`;
/// integral `k` is routed through the exact symbol.
pub fn pochhammer_real(alpha: &BigRational, k: &BigRational, digits: u32) -> Result<HighReal> {
    if k.is_integer() {
        let ki = k.to_integer().to_i64().ok_or_else(|| Error::Precision(format!("index {k} too large")))?;
        return Ok(HighReal::from_rational(&super::combin::pochhammer(alpha, ki)?, digits));
    }
    let w = digits + 10;
    let num = gamma_rational(&(alpha + k), w)?;
    let den = gamma_rational(alpha, w)?;
    Ok((&num / &den).with_digits(digits))
}

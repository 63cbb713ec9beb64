//! Correlations of the core and its satellites at finite gap, their
//! large-gap asymptotics, hole correlation constants and the diagnostics
//! tying them together.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::exactalg::real::{bernoulli, check_precision, gamma_rational, DEFAULT_DIGITS};
use crate::exactalg::{pochhammer, range_product, rat, rint, HighReal, ProductConvention};
use crate::formulas::{barnes_int, conjecture1_ratio, GammaQuotient, RatioValue, Status};
use crate::{Error, Result};

/// Glaisher-Kinkelin constant, 100 significant digits.
pub const GLAISHER_LITERAL: &str =
    "1.282427129100622636875342568869791727767688927325001192063740021740406308858826461129736491958202374";

/// Order at which the stored constant is checked against the superfactorial expansion.
pub const GLAISHER_CHECK_ORDER: u64 = 200;

/// Which correlation an asymptotic formula describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// Full correlation of the core and three satellites.
    Omega,
    /// Correlation measured through rotation-invariant tilings only.
    OmegaR,
}

/// Whether a correlation value is at finite gap or the large-gap formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    FiniteK,
    Asymptotic,
}

/// A correlation value with its parameters and status.
#[derive(Debug, Clone)]
pub struct CorrelationValue {
    pub value: RatioValue,
    pub kind: CorrelationKind,
    pub a: i64,
    pub b: i64,
    pub k: i64,
    pub status: Status,
}

impl CorrelationValue {
    pub fn to_json(&self, digits: u32) -> Value {
        json!({
            "a": self.a,
            "b": self.b,
            "k": self.k,
            "kind": match self.kind { CorrelationKind::FiniteK => "finite_k", CorrelationKind::Asymptotic => "asymptotic" },
            "status": self.status,
            "exact": self.value.exact().map(|r| r.to_string()),
            "value": self.value.to_real(digits).to_sci_string(digits as usize),
        })
    }
}

fn require_even_core(a: i64) -> Result<()> {
    if a % 2 != 0 {
        return Err(Error::Parity(format!("core size a = {a} must be even")));
    }
    if a < 0 {
        return Err(Error::GeometryViolation(format!("core size a = {a} is negative")));
    }
    Ok(())
}

fn real(r: &BigRational, digits: u32) -> HighReal {
    HighReal::from_rational(r, digits)
}

/// `ln A` from the expansion of `ln H(n)` with Bernoulli corrections.
fn ln_glaisher_from_expansion(n: u64, digits: u32) -> HighReal {
    let w = digits + 20;
    // ln H(n) = sum_{i=1}^{n-1} (n - i) ln i
    let mut ln_h = HighReal::zero(w);
    for i in 2..n {
        ln_h = &ln_h + &(&HighReal::from_i64((n - i) as i64, w) * &HighReal::from_i64(i as i64, w).ln());
    }
    let nn = HighReal::from_i64(n as i64, w);
    let ln_n = nn.ln();
    let two_pi = &HighReal::pi(w) * &HighReal::from_i64(2, w);
    let half_n2 = real(&rat((n * n) as i64, 2), w);
    let twelfth = real(&rat(1, 12), w);
    // ln H(n) = (n^2/2 - 1/12) ln n - 3n^2/4 + (n/2) ln 2pi + 1/12 - ln A + sum_k B_{2k+2} / (4k(k+1) n^{2k})
    let mut main = &(&half_n2 - &twelfth) * &ln_n;
    main = &main - &real(&rat(3 * (n * n) as i64, 4), w);
    main = &main + &(&real(&rat(n as i64, 2), w) * &two_pi.ln());
    main = &main + &twelfth;
    let eps = HighReal::from_f64(10f64.powi(-(w as i32)), w);
    let n2 = &nn * &nn;
    let mut npow = n2.clone();
    let mut k = 1usize;
    loop {
        let b = bernoulli(2 * k + 2).pop().expect("nonempty");
        let c = real(&(b / rint((4 * k * (k + 1)) as i64)), w);
        let term = &c / &npow;
        if term.abs() < eps || k > 200 {
            break;
        }
        main = &main + &term;
        npow = &npow * &n2;
        k += 1;
    }
    (&main - &ln_h).with_digits(digits)
}

/// Outcome of comparing the stored Glaisher-Kinkelin literal with the
/// superfactorial asymptotics.
#[derive(Debug, Clone)]
pub struct GlaisherCheck {
    pub order: u64,
    pub from_expansion: HighReal,
    pub literal: HighReal,
    pub agreeing_digits: f64,
}

/// Recomputes `A` at order `n` and reports how many digits agree with the literal.
pub fn glaisher_self_check(n: u64, digits: u32) -> Result<GlaisherCheck> {
    let digits = check_precision(digits)?;
    let from_expansion = ln_glaisher_from_expansion(n, digits).exp();
    let literal = HighReal::parse(GLAISHER_LITERAL, digits)?;
    let rel = from_expansion.rel_diff(&literal).to_f64();
    let agreeing_digits = if rel == 0.0 { digits as f64 } else { -rel.log10() };
    Ok(GlaisherCheck { order: n, from_expansion, literal, agreeing_digits })
}

/// The Glaisher-Kinkelin constant at the given precision; the literal is
/// validated once per process.
pub fn glaisher(digits: u32) -> Result<HighReal> {
    static VALIDATED: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    let ok = VALIDATED.get_or_init(|| {
        let check = glaisher_self_check(GLAISHER_CHECK_ORDER, DEFAULT_DIGITS).map_err(|e| e.to_string())?;
        if check.agreeing_digits >= 10.0 {
            Ok(())
        } else {
            Err(format!("stored constant agrees to only {:.1} digits", check.agreeing_digits))
        }
    });
    if let Err(e) = ok {
        return Err(Error::Precision(format!("Glaisher-Kinkelin self-check failed: {e}")));
    }
    if digits > 95 {
        return Err(Error::Precision(format!("{digits} digits exceed the stored Glaisher-Kinkelin constant")));
    }
    HighReal::parse(GLAISHER_LITERAL, check_precision(digits)?)
}

/// `G(1/2)` in closed form through the Glaisher-Kinkelin constant.
pub fn barnes_g_half(digits: u32) -> Result<HighReal> {
    let w = digits + 10;
    let a = glaisher(w)?;
    let pi = HighReal::pi(w);
    let num = &real(&rat(1, 8), w).exp() * &HighReal::from_i64(2, w).pow_ratio(1, 24);
    let den = &a.pow_ratio(3, 2) * &pi.pow_ratio(1, 4);
    Ok((&num / &den).with_digits(digits))
}

/// `Gamma(j + 1/2) = sqrt(pi) (1/2)_j`.
fn gamma_half_integer(j: i64, digits: u32) -> Result<HighReal> {
    let p = pochhammer(&rat(1, 2), j)?;
    Ok(&HighReal::pi(digits).sqrt() * &real(&p, digits))
}

/// Barnes G at a non-negative integer or half-integer.
pub fn barnes_g(z: &BigRational, digits: u32) -> Result<HighReal> {
    let digits = check_precision(digits)?;
    if z.is_negative() {
        return Err(Error::GeometryViolation(format!("Barnes G argument {z} is negative")));
    }
    if z.is_integer() {
        let n = z.to_integer().to_u64().ok_or_else(|| Error::Precision(format!("argument {z} too large")))?;
        return Ok(HighReal::from_bigint(&BigInt::from(barnes_int(n)), digits));
    }
    let twice = z * rint(2);
    if !twice.is_integer() {
        return Err(Error::GeometryViolation(format!("Barnes G argument {z} is not a half-integer")));
    }
    // G(n + 1/2) = G(1/2) Gamma(1/2) Gamma(3/2) ... Gamma(n - 1/2)
    let n = z.floor().to_integer().to_i64().ok_or_else(|| Error::Precision(format!("argument {z} too large")))?;
    let w = digits + 10;
    let mut acc = barnes_g_half(w)?;
    for j in 0..n {
        acc = &acc * &gamma_half_integer(j, w)?;
    }
    Ok(acc.with_digits(digits))
}

/// Residual `|G(z+1) - Gamma(z) G(z)|` of the defining recurrence.
pub fn barnes_recurrence_residual(z: &BigRational, digits: u32) -> Result<HighReal> {
    let lhs = barnes_g(&(z + BigRational::one()), digits)?;
    let gz = if z.is_integer() {
        gamma_rational(z, digits + 10)?
    } else {
        let j = z.floor().to_integer().to_i64().expect("small argument");
        gamma_half_integer(j, digits + 10)?
    };
    let rhs = &gz * &barnes_g(z, digits)?;
    Ok(lhs.rel_diff(&rhs))
}

/// Largest gap for which odd-satellite correlations are returned as exact rationals.
pub const ODD_EXACT_GAP_LIMIT: i64 = 200;

/// Limit of the rotation-invariant count ratio as the hexagon grows, for an
/// even core `a`, satellites `b` and gap `k`.
pub fn omega_r_finite(a: i64, b: i64, k: i64, digits: u32) -> Result<CorrelationValue> {
    require_even_core(a)?;
    if b < 0 || k < 0 {
        return Err(Error::GeometryViolation(format!("satellites {b} and gap {k} must be non-negative")));
    }
    let value = if b % 2 == 0 {
        RatioValue::Exact(omega_r_even(a, b, k)?)
    } else {
        let g = omega_r_odd_quotient(a, b, k);
        // The exact value has roughly k^2 log k bits; large gaps go straight to reals.
        let exact = if k <= ODD_EXACT_GAP_LIMIT { g.exact()? } else { None };
        match exact {
            Some(r) => RatioValue::Exact(r),
            None => RatioValue::Real(g.real(check_precision(digits)?)?),
        }
    };
    Ok(CorrelationValue { value, kind: CorrelationKind::FiniteK, a, b, k, status: Status::Proved })
}

fn omega_r_even(a: i64, b: i64, k: i64) -> Result<BigRational> {
    let half_b = b / 2;
    let c = a / 2;
    let lead = pochhammer(&rat(a + 6 * k + 2, 4), half_b)? / pochhammer(&rat(a + 2, 4), half_b)?;
    let prod = range_product(1, half_b, ProductConvention::Reciprocal, |i| {
        let x = rint(c + 3 * i - 1);
        let ik = pochhammer(&rint(i), k)?;
        let shift = pochhammer(&x, k - i)? * pochhammer(&x, k - i + 1)? / (pochhammer(&x, -i)? * pochhammer(&x, -i + 1)?);
        let tail = pochhammer(&rint(c + 3 * k + 2 * i), i - 1)? / pochhammer(&rint(c + 2 * i), i - 1)?;
        Ok(shift * &tail * &tail / (&ik * &ik))
    })?;
    Ok(lead * prod)
}

/// The two limit products for odd satellites, multiplied, as a Gamma quotient.
fn omega_r_odd_quotient(a: i64, b: i64, k: i64) -> GammaQuotient {
    let mut g = GammaQuotient::new();
    let c = a / 2;
    let ri = rint;
    // 1 / (2^k (a/4 + b/2 + k/2 + 1/2)_k)
    g.factor(&ri(2), -k);
    g.pochhammer(&rat(a + 2 * b + 2 * k + 2, 4), &ri(k), -1);
    for i in 1..=((b + 1) / 6) {
        let idx = ri(3 * (b + 1) / 2 - 9 * i + 1);
        g.pochhammer(&ri(c + 3 * k + 6 * i - 2), &idx, 1);
        g.pochhammer(&ri(c + 6 * i - 2), &idx, -1);
    }
    for i in 1..=((b - 1) / 6) {
        g.factor(&ri(c + 6 * i - 1), 1);
        g.factor(&ri(c + 6 * i + 3 * k - 1), -1);
    }
    for i in 1..=((b - 1) / 2) {
        let x = ri(c + 3 * i - 1);
        g.pochhammer(&x, &ri(k - i + 1), 1);
        g.pochhammer(&x, &ri(1 - i), -1);
    }
    let shared = |g: &mut GammaQuotient, i: i64| {
        g.push(rat(b + 2 * i + 3, 2), 1);
        g.push(rat(2 * i + 3, 2), -1);
        g.pochhammer(&ri(i), &ri((b + 3) / 2), -1);
        g.pochhammer(&rat(2 * i + 3, 2), &ri((b - 3) / 2), -1);
        g.push(rat(a + 3 * b + 6 * i - 2, 2), 1);
    };
    for i in 1..=k {
        shared(&mut g, i);
        g.push(rat(a + 3 * b + 6 * i - 5, 2), -1);
    }
    for i in 1..=((k + 1) / 3) {
        g.pochhammer(&ri(c + 3 * i - 1), &ri(3 * k - 9 * i + 4), 1);
    }
    for i in 1..=(k / 3) {
        g.factor(&ri(c + 3 * k - 6 * i + 1), -1);
    }
    for i in 1..=k {
        shared(&mut g, i);
        g.push(ri(c + b + k + 2 * i - 1), -1);
    }
    g
}

/// Full correlation at finite gap: the conjectured ratio times the cube of
/// the invariant correlation.
pub fn omega_finite(a: i64, b: i64, k: i64, digits: u32) -> Result<CorrelationValue> {
    let ratio = conjecture1_ratio(a, b, k)?;
    let r = omega_r_finite(a, b, k, digits)?;
    let value = match r.value {
        RatioValue::Exact(x) => RatioValue::Exact(ratio * x.pow(3)),
        RatioValue::Real(x) => RatioValue::Real(&real(&ratio, x.digits()) * &x.powi(3)),
    };
    Ok(CorrelationValue { value, kind: CorrelationKind::FiniteK, a, b, k, status: Status::Conjectured })
}

fn g_at(num: i64, den: i64, w: u32) -> Result<HighReal> {
    barnes_g(&rat(num, den), w)
}

/// Large-gap formula for either correlation, evaluated at gap `k`.
pub fn omega_asymptotic(a: i64, b: i64, k: i64, which: Which, digits: u32) -> Result<HighReal> {
    require_even_core(a)?;
    let digits = check_precision(digits)?;
    if k <= 0 {
        return Err(Error::GeometryViolation(format!("asymptotic formula needs k > 0, got {k}")));
    }
    let w = digits + 10;
    let kpow = HighReal::from_i64(k, w).pow_ratio(b * (a + b), 2);
    let three = HighReal::from_i64(3, w);
    let sat = &three.pow_ratio(b * b, 4) * &g_at(b + 2, 2, w)?.powi(2);
    let v = match which {
        Which::Omega => {
            let core = &g_at(a + 2, 2, w)? / &g_at(a + 3 * b + 2, 2, w)?;
            &core.powi(2) * &(&sat * &kpow).powi(3)
        }
        Which::OmegaR => {
            let gr = |n: i64, d: i64| gamma_rational(&rat(n, d), w);
            let brace = &(&(&gr(a + 3 * b + 2, 6)? / &gr(a + 3 * b + 4, 6)?) * &(&gr(a + 4, 6)? / &gr(a + 2, 6)?))
                * &(&g_at(a + 3 * b + 2, 2, w)? / &g_at(a + 2, 2, w)?);
            &(&sat / &brace.pow_ratio(2, 3)) * &kpow
        }
    };
    Ok(v.with_digits(digits))
}

/// Large-gap limit of the product inside the first conjectured ratio (before squaring).
pub fn conjecture1_limit(a: i64, b: i64, digits: u32) -> Result<HighReal> {
    require_even_core(a)?;
    let w = check_precision(digits)? + 10;
    let gr = |n: i64| gamma_rational(&rat(n, 6), w);
    let v = &(&gr(a + 4)? * &gr(a + 3 * b + 2)?) / &(&gr(a + 2)? * &gr(a + 3 * b + 4)?);
    Ok(v.with_digits(digits))
}

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub k: i64,
    pub finite: HighReal,
    pub asymptotic: HighReal,
    pub ratio: HighReal,
}

impl ConvergenceRow {
    pub fn deviation(&self) -> f64 {
        (&self.ratio - &HighReal::one(self.ratio.digits())).abs().to_f64()
    }
}

/// Ratios of the finite-gap correlation to its large-gap formula.
pub fn convergence_table(a: i64, b: i64, ks: &[i64], digits: u32) -> Result<Vec<ConvergenceRow>> {
    ks.iter()
        .map(|&k| {
            let finite = omega_finite(a, b, k, digits)?.value.to_real(digits);
            let asymptotic = omega_asymptotic(a, b, k, Which::Omega, digits)?;
            let ratio = &finite / &asymptotic;
            Ok(ConvergenceRow { k, finite, asymptotic, ratio })
        })
        .collect()
}

/// Numeric check of the monomer constant identity and Hartwig's square-lattice constant.
#[derive(Debug, Clone)]
pub struct CalibrationReport {
    /// `3^{1/4} G(3/2)^4 / (2 pi)` via the Gamma chain.
    pub via_barnes: HighReal,
    /// `3^{1/4} e^{1/2} / (2^{5/6} A^6)`.
    pub via_glaisher: HighReal,
    pub identity_residual: HighReal,
    /// `e^{1/2} / (2^{5/6} A^6)`.
    pub hartwig: HighReal,
    /// Hartwig's constant recovered by dividing the monomer constant by `3^{1/4}`.
    pub hartwig_from_monomer: HighReal,
    pub hartwig_residual: HighReal,
}

impl CalibrationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "via_barnes": self.via_barnes.to_sci_string(40),
            "via_glaisher": self.via_glaisher.to_sci_string(40),
            "identity_residual": self.identity_residual.to_sci_string(6),
            "hartwig": self.hartwig.to_sci_string(20),
            "hartwig_residual": self.hartwig_residual.to_sci_string(6),
        })
    }
}

pub fn calibration_check(digits: u32) -> Result<CalibrationReport> {
    let digits = check_precision(digits)?;
    let w = digits + 10;
    let pi = HighReal::pi(w);
    let two = HighReal::from_i64(2, w);
    let quarter3 = HighReal::from_i64(3, w).pow_ratio(1, 4);
    let g32 = barnes_g(&rat(3, 2), w)?;
    let via_barnes = &(&quarter3 * &g32.powi(4)) / &(&two * &pi);
    let a = glaisher(w)?;
    let hartwig = &real(&rat(1, 2), w).exp() / &(&two.pow_ratio(5, 6) * &a.powi(6));
    let via_glaisher = &quarter3 * &hartwig;
    let identity_residual = via_barnes.abs_diff(&via_glaisher);
    let hartwig_from_monomer = &via_barnes / &quarter3;
    let hartwig_residual = hartwig_from_monomer.abs_diff(&hartwig);
    Ok(CalibrationReport {
        via_barnes: via_barnes.with_digits(digits),
        via_glaisher: via_glaisher.with_digits(digits),
        identity_residual: identity_residual.with_digits(digits),
        hartwig: hartwig.with_digits(digits),
        hartwig_from_monomer: hartwig_from_monomer.with_digits(digits),
        hartwig_residual: hartwig_residual.with_digits(digits),
    })
}

/// `G(1/2)^4` recovered from the odd-satellite leading coefficient.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    /// Value implied by equating leading coefficients.
    pub recovered: HighReal,
    /// `G(1/2)^4` from the closed form.
    pub closed_form: HighReal,
    pub agreeing_digits: f64,
}

/// Leading coefficient of the invariant correlation for core 0 and satellite 1,
/// from the limit-product asymptotics expressed through `A`.
fn invariant_unit_satellite_constant(w: u32) -> Result<HighReal> {
    let pi = HighReal::pi(w);
    let a = glaisher(w)?;
    let two = HighReal::from_i64(2, w);
    let three = HighReal::from_i64(3, w);
    let g23 = gamma_rational(&rat(2, 3), w)?;
    let inner = &(&(&two.pow_ratio(41, 36) * &pi) * &real(&rat(1, 12), w).exp())
        / &(&(&three.pow_ratio(23, 24) * &a) * &g23.powi(2));
    Ok(&three.sqrt() * &inner.powi(2))
}

/// Solves the core-0, satellite-1 leading-coefficient identity for `G(1/2)^4`.
pub fn g_half_bootstrap(digits: u32) -> Result<BootstrapReport> {
    let digits = check_precision(digits)?;
    let w = digits + 10;
    let pi = HighReal::pi(w);
    // left: limit of the conjectured product squared times the invariant constant cubed
    let lim = conjecture1_limit(0, 1, w)?;
    let left = &lim.powi(2) * &invariant_unit_satellite_constant(w)?.powi(3);
    // right: 3^{3/4} (4/pi) G(3/2)^4 = 3^{3/4} 4 pi G(1/2)^4
    let coeff = &(&HighReal::from_i64(3, w).pow_ratio(3, 4) * &HighReal::from_i64(4, w)) * &pi;
    let recovered = &left / &coeff;
    let closed_form = barnes_g_half(w)?.powi(4);
    let rel = recovered.rel_diff(&closed_form).to_f64();
    let agreeing_digits = if rel == 0.0 { w as f64 } else { -rel.log10() };
    Ok(BootstrapReport { recovered: recovered.with_digits(digits), closed_form: closed_form.with_digits(digits), agreeing_digits })
}

/// Leading coefficient of the invariant correlation at core 0, satellite 1,
/// estimated from finite gaps by Richardson extrapolation in `1/k`.
pub fn invariant_unit_satellite_extrapolated(k0: i64, levels: usize, digits: u32) -> Result<HighReal> {
    let w = check_precision(digits)? + 10;
    let mut table: Vec<HighReal> = (0..levels)
        .map(|j| {
            let k = k0 << j;
            let v = omega_r_finite(0, 1, k, w)?.value.to_real(w);
            Ok(&v / &HighReal::from_i64(k, w).sqrt())
        })
        .collect::<Result<_>>()?;
    for m in 1..levels {
        let f = HighReal::from_i64(1 << m, w);
        let den = &f - &HighReal::one(w);
        for j in (m..levels).rev() {
            table[j] = &(&(&f * &table[j]) - &table[j - 1]) / &den;
        }
    }
    Ok(table[levels - 1].with_digits(digits))
}

/// Shapes whose correlation has a closed-form constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoleDescriptor {
    /// Triangular hole of signed side `k` (negative for the opposite orientation).
    Triangle(i64),
    /// Two triangles of sides `a` and `a'` touching at a vertex.
    Bowtie(i64, i64),
    /// Core `m` with lobes `a`, `b`, `c` at its vertices.
    Shamrock { a: i64, b: i64, c: i64, m: i64 },
    /// Contiguous alternating lobes along a lattice line.
    Fern(Vec<i64>),
    /// Three bowties in a triad at node distance `3k`.
    TriadAsymptotic { outer: [i64; 3], inner: [i64; 3], k: i64 },
}

fn charge_prefactor(total: i64, w: u32) -> Result<HighReal> {
    // 3^{s^2/8} / (2 pi)^{s/2} G(s/2 + 1)^2
    let two_pi = &HighReal::pi(w) * &HighReal::from_i64(2, w);
    let v = &HighReal::from_i64(3, w).pow_ratio(total * total, 8) / &two_pi.pow_ratio(total, 2);
    Ok(&v * &g_at(total + 2, 2, w)?.powi(2))
}

fn g_int(n: i64, w: u32) -> Result<HighReal> {
    if n < 0 {
        return Err(Error::GeometryViolation(format!("G({n}) needed for a hole of negative size")));
    }
    barnes_g(&rint(n), w)
}

/// Fern helper: alternating-interval Barnes quotient of the first odd-length prefix.
fn fern_s(parts: &[i64], w: u32) -> Result<HighReal> {
    let len = if parts.len() % 2 == 1 { parts.len() } else { parts.len().saturating_sub(1) };
    let parts = &parts[..len];
    let mut acc = HighReal::one(w);
    for i in 0..len {
        let mut sum = 0;
        for (run, part) in parts[i..].iter().enumerate() {
            sum += part;
            let g = g_int(sum + 1, w)?;
            acc = if run % 2 == 0 { &acc * &g } else { &acc / &g };
        }
    }
    let odd: i64 = parts.iter().step_by(2).sum();
    Ok(&acc / &g_int(odd + 1, w)?)
}

/// Closed-form correlation constant of a hole shape.
pub fn hole_correlations(descriptor: &HoleDescriptor, digits: u32) -> Result<HighReal> {
    let digits = check_precision(digits)?;
    let w = digits + 10;
    let g = |n: i64| g_int(n, w);
    let v = match descriptor {
        HoleDescriptor::Triangle(k) => charge_prefactor(k.abs(), w)?,
        HoleDescriptor::Bowtie(a, a2) => {
            &charge_prefactor(a + a2, w)? * &(&(&g(a + 1)? * &g(a2 + 1)?) / &g(a + a2 + 1)?)
        }
        HoleDescriptor::Shamrock { a, b, c, m } => {
            let num = &(&(&g(m + 1)?.powi(3) * &g(a + 1)?) * &g(b + 1)?) * &g(c + 1)?;
            let den = &(&g(a + m + 1)? * &g(b + m + 1)?) * &g(c + m + 1)?;
            &charge_prefactor(a + b + c + m, w)? * &(&num / &den)
        }
        HoleDescriptor::Fern(parts) => {
            if parts.iter().any(|p| *p < 0) {
                return Err(Error::GeometryViolation("fern lobes must be non-negative".into()));
            }
            let total: i64 = parts.iter().sum();
            let odd: i64 = parts.iter().step_by(2).sum();
            let even = total - odd;
            let base = &charge_prefactor(total, w)? * &(&(&g(odd + 1)? * &g(even + 1)?) / &g(total + 1)?);
            let tail = if parts.is_empty() { HighReal::one(w) } else { fern_s(&parts[1..], w)? };
            &(&base * &fern_s(parts, w)?) * &tail
        }
        HoleDescriptor::TriadAsymptotic { outer, inner, k } => {
            let big_b = outer[0] + inner[0];
            if (0..3).any(|i| outer[i] + inner[i] != big_b) {
                return Err(Error::HypothesisViolation(format!(
                    "lobe pairs {outer:?} and {inner:?} must have a common sum"
                )));
            }
            if *k <= 0 {
                return Err(Error::GeometryViolation(format!("triad needs k > 0, got {k}")));
            }
            // each bowtie contributes its own correlation constant
            let mut acc = HighReal::one(w);
            for i in 0..3 {
                acc = &acc * &hole_correlations(&HoleDescriptor::Bowtie(outer[i], inner[i]), w)?;
            }
            let q: Vec<i64> = (0..3).map(|i| outer[i] - inner[i]).collect();
            let expo = q[0] * q[1] + q[0] * q[2] + q[1] * q[2];
            &acc * &HighReal::from_i64(3 * k, w).pow_ratio(-expo, 2)
        }
    };
    Ok(v.with_digits(digits))
}

/// Parses descriptors such as `triangle:2`, `bowtie:1,2`, `shamrock:a,b,c,m`,
/// `fern:1,2,3` and `triad:a,b,c,a2,b2,c2,k`.
pub fn parse_hole(s: &str) -> Result<HoleDescriptor> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<i64> = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::VariantParameter(format!("bad number {t:?} in {s:?}"))))
            .collect::<Result<_>>()?
    };
    let need = |n: usize| -> Result<()> {
        if nums.len() == n {
            Ok(())
        } else {
            Err(Error::VariantParameter(format!("{kind} takes {n} numbers, got {}", nums.len())))
        }
    };
    match kind {
        "triangle" => {
            need(1)?;
            Ok(HoleDescriptor::Triangle(nums[0]))
        }
        "bowtie" => {
            need(2)?;
            Ok(HoleDescriptor::Bowtie(nums[0], nums[1]))
        }
        "shamrock" => {
            need(4)?;
            Ok(HoleDescriptor::Shamrock { a: nums[0], b: nums[1], c: nums[2], m: nums[3] })
        }
        "fern" => Ok(HoleDescriptor::Fern(nums)),
        "triad" => {
            need(7)?;
            Ok(HoleDescriptor::TriadAsymptotic {
                outer: [nums[0], nums[1], nums[2]],
                inner: [nums[3], nums[4], nums[5]],
                k: nums[6],
            })
        }
        other => Err(Error::VariantParameter(format!("unknown hole kind {other:?}"))),
    }
}

//! Determinant formulas for tiling counts: the trapezoid path matrix and
//! the block matrices derived from it for cored, satellited hexagons.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exactalg::{binom, interpolate, rint, signed_sum, to_integer, Eisenstein, Matrix, RationalPoly};
use crate::oracle::BigCount;
use crate::region::{six_chains, RegionSpec};
use crate::{Error, Result};

/// Free shift used when a variant leaves it open.
pub const DEFAULT_D: i64 = 1;

/// Parameters of the general region: side offsets, core, satellites and gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralParams {
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
    pub a: i64,
    pub b1: i64,
    pub b2: i64,
    pub b3: i64,
    pub k1: i64,
    pub k2: i64,
    pub k3: i64,
}

impl GeneralParams {
    pub fn from_spec(spec: &RegionSpec) -> Result<Self> {
        match spec.to_general() {
            Some(RegionSpec::SGeneral { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 }) => {
                Ok(GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 })
            }
            _ => Err(Error::VariantParameter(format!("{spec} is not a general cored region"))),
        }
    }

    pub fn spec(&self) -> RegionSpec {
        let GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 } = *self;
        RegionSpec::SGeneral { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 }
    }

    fn bsum(&self) -> i64 {
        self.b1 + self.b2 + self.b3
    }

    fn all_b_even(&self) -> bool {
        self.b1 % 2 == 0 && self.b2 % 2 == 0 && self.b3 % 2 == 0
    }
}

/// Which matrix to build, with the parameters it needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixVariant {
    /// Path matrix of an `n`-legged trapezoid with dents at `(row, position)`, both 1-based.
    Gelfand { n: i64, removed: Vec<(i64, i64)>, d: i64 },
    /// Path matrix of the six-chain encoding; all satellites even.
    GeneralEvenB { params: GeneralParams, d: i64 },
    /// Any satellite parity with the two upper gaps equal and an even core.
    OddB(GeneralParams),
    /// The `(A | B')` matrix, polynomial in the core side.
    EvenOddAB(GeneralParams),
    /// Dimension `a + b1 + b2 + b3` with an exact rational prefactor.
    Reduced(GeneralParams),
    /// The `(n1+n2)`-square matrix for a hexagon with a core and no satellites; any integer `a`.
    Cored { n1: i64, n2: i64, n3: i64, a: i64 },
    /// Identity-pattern and body matrices of the rotational factorization.
    SymmetricIB { n: i64, a: i64, b: i64, k: i64 },
}

/// Output of [`build_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltMatrix {
    Single(Matrix<BigInt>),
    Pair { ident: Matrix<BigInt>, body: Matrix<BigInt> },
}

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `(-1)^b - 1`: zero for even `b`, `-2` for odd.
fn parity_gap(b: i64) -> BigInt {
    sign(b) - BigInt::one()
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::VariantParameter(msg()))
    }
}

fn check_nonnegative(p: &GeneralParams) -> Result<()> {
    let GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 } = *p;
    require([n1, n2, n3, a, b1, b2, b3, k1, k2, k3].iter().all(|&v| v >= 0), || {
        format!("negative parameter in {}", p.spec())
    })
}

/// Checks the parity and equality constraints of a variant.
pub fn validate(variant: &MatrixVariant) -> Result<()> {
    match variant {
        MatrixVariant::Gelfand { n, removed, .. } => require(removed.len() as i64 == *n, || {
            format!("trapezoid with legs {n} needs {n} dents, got {}", removed.len())
        }),
        MatrixVariant::GeneralEvenB { params: p, .. } => {
            check_nonnegative(p)?;
            require(p.all_b_even(), || format!("satellites b1={}, b2={}, b3={} must all be even", p.b1, p.b2, p.b3))?;
            require(p.a % 2 == 0 || p.bsum() == 0, || format!("core side a = {} must be even", p.a))
        }
        MatrixVariant::OddB(p) | MatrixVariant::EvenOddAB(p) => {
            check_nonnegative(p)?;
            require(p.k2 == p.k3, || format!("gaps k2 = {} and k3 = {} must be equal", p.k2, p.k3))?;
            require(p.a % 2 == 0, || format!("core side a = {} must be even", p.a))
        }
        MatrixVariant::Reduced(p) => {
            check_nonnegative(p)?;
            require(p.a % 2 == 0, || format!("core side a = {} must be even", p.a))?;
            require(p.all_b_even(), || format!("satellites b1={}, b2={}, b3={} must all be even", p.b1, p.b2, p.b3))
        }
        MatrixVariant::Cored { n1, n2, n3, .. } => {
            require(*n1 >= 0 && *n2 >= 0 && *n3 >= 0, || "negative side offset".into())?;
            require(n3 <= &(n1 + n2), || format!("right block width n1 + n2 - n3 = {} is negative", n1 + n2 - n3))
        }
        MatrixVariant::SymmetricIB { n, a, b, k } => {
            require(*n >= 0 && *a >= 0 && *b >= 0 && *k >= 0, || "negative parameter".into())?;
            require(a % 2 == 0, || format!("core side a = {a} must be even"))?;
            require(b % 2 == 0, || format!("satellite side b = {b} must be even"))
        }
    }
}

/// Entry function of 1-based `(i, j)` for one row block.
type Entry<'a> = Box<dyn Fn(i64, i64) -> BigInt + 'a>;

/// Stacks row blocks, each a count of rows and an entry function.
fn stack(cols: i64, blocks: Vec<(i64, Entry<'_>)>) -> Matrix<BigInt> {
    let mut rows = Vec::new();
    for (len, f) in &blocks {
        for i in 1..=*len {
            rows.push((1..=cols).map(|j| f(i, j)).collect::<Vec<_>>());
        }
    }
    Matrix::from_rows(rows)
}

fn gelfand(n: i64, removed: &[(i64, i64)], d: i64) -> Matrix<BigInt> {
    Matrix::from_fn(removed.len(), n as usize, |i, j| {
        let (row, pos) = removed[i];
        binom(pos - d, j as i64 + 1 - row)
    })
}

fn odd_b(p: &GeneralParams) -> Matrix<BigInt> {
    let GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, .. } = *p;
    let h = a / 2;
    let n = n1 + n2 + a + p.bsum();
    stack(
        n,
        vec![
            (
                n2,
                Box::new(move |i, j| {
                    let flip = sign(if j > n3 - 2 * k2 { b3 } else { 0 });
                    let base = binom(i - n1 - h - b1 - k2 - 1, j - 1);
                    let tail = parity_gap(b1)
                        * signed_sum(n3 + h + b3 + k1 + 1, j, |q| {
                            binom(i - n1 + 2 * k1 - 1, q - 1) * binom(-2 * k1 - h - b1 - k2, j - q)
                        });
                    flip * (base + tail)
                }),
            ),
            (
                n1,
                Box::new(move |i, j| {
                    sign(if j > n3 + h + b3 + k2 { b2 } else { 0 })
                        * binom(-n1 + n2 + n3 + h + b2 + b3 - k2 + i - 1, j - 1)
                }),
            ),
            (b3, Box::new(move |i, j| binom(i - 1, j - 1 - n3 + 2 * k2))),
            (a, Box::new(move |i, j| binom(i - h - k2 - 1, j - 1 - n3 - b3))),
            (b1, Box::new(move |i, j| binom(-h - b1 - 2 * k1 - k2 + i - 1, j - 1 - n3 - h - b3 - k1))),
            (b2, Box::new(move |i, j| binom(i - 1, j - 1 - n3 - h - b3 - k2))),
        ],
    )
}

fn even_odd_ab(p: &GeneralParams) -> Matrix<BigInt> {
    let GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, .. } = *p;
    let h = a / 2;
    let left_cols = n3 + b3;
    let right_cols = n1 + n2 - n3 + b1 + b2;
    let left = stack(
        left_cols,
        vec![
            (
                n2,
                Box::new(move |i, j| {
                    binom(i - n1 - b1 - 1, j - 1)
                        + parity_gap(b3)
                            * signed_sum(1 + n3 - 2 * k2, j, |q| {
                                binom(i - n1 - h - b1 - k2 - 1, q - 1) * binom(h + k2, j - q)
                            })
                }),
            ),
            (n1, Box::new(move |i, j| binom(-n1 + n2 + n3 + a + b2 + b3 + i - 1, j - 1))),
            (b3, Box::new(move |i, j| binom(h + k2 + i - 1, j - 1 - n3 + 2 * k2))),
            (b1, Box::new(|_, _| BigInt::zero())),
            (b2, Box::new(|_, _| BigInt::zero())),
        ],
    );
    let right = stack(
        right_cols,
        vec![
            (
                n2,
                Box::new(move |i, j| {
                    let s = sign(j + n3 - 1);
                    let base = binom(n1 + n3 + a + b1 + b3 - i + j - 1, n1 + b1 - i);
                    let tail = parity_gap(b1)
                        * signed_sum(n3 + h + b3 + k1 + 1, j + n3 + a + b3, |q| {
                            binom(n1 - 2 * k1 - i + q - 1, n1 - 2 * k1 - i)
                                * binom(j + n3 + a + b1 + b3 + 2 * k1 - q - 1, b1 + 2 * k1 - 1)
                        });
                    s * (base + tail)
                }),
            ),
            (
                n1,
                Box::new(move |i, j| {
                    let top = -n1 + n2 + b2 + i;
                    binom(-n1 + n2 + n3 + a + b2 + b3 + i - 1, top - j)
                        + parity_gap(b2)
                            * signed_sum(1, top - 2 * k2, |q| {
                                binom(-n1 + n2 + n3 + h + b2 + b3 - k2 + i - 1, top - 2 * k2 - q)
                                    * binom(h + k2, 2 * k2 - j + q)
                            })
                }),
            ),
            (b3, Box::new(|_, _| BigInt::zero())),
            (b1, Box::new(move |i, j| sign(j) * binom(h + b1 + k1 - i + j - 1, b1 + 2 * k1 - i))),
            (b2, Box::new(move |i, j| binom(h + k2 + i - 1, 2 * k2 + i - j))),
        ],
    );
    Matrix::from_blocks(&[&[&left, &right]])
}

fn reduced_matrix(p: &GeneralParams) -> Matrix<BigInt> {
    let GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 } = *p;
    let h = a / 2;
    let size = a + p.bsum();
    let tail = -n3 - a - p.bsum();
    let entry = move |x: i64, y: i64, j: i64| -> BigInt {
        (1..=j + n1).fold(BigInt::zero(), |acc, l| {
            acc + binom(x, l + n2 - y - 1) * binom(l + n2 - 1, l - 1) * binom(tail, j + n1 - l)
        })
    };
    stack(
        size,
        vec![
            (b3, Box::new(move |i, j| entry(n1 + h + b1 + k3 + i - 1, n3 - 2 * k3, j))),
            (a, Box::new(move |i, j| entry(n1 + b1 + i - 1, n3 + b3, j))),
            (b1, Box::new(move |i, j| entry(n1 - 2 * k1 + i - 1, n3 + h + b3 + k1, j))),
            (b2, Box::new(move |i, j| entry(n1 + h + b1 + k2 + i - 1, n3 + h + b3 + k2, j))),
        ],
    )
}

/// Rational factor pulled out of rows and columns in the reduced formula.
pub fn reduced_prefactor(p: &GeneralParams) -> BigRational {
    let GeneralParams { n1, n2, n3, a, .. } = *p;
    let big = p.bsum();
    let num = (1..=n1).fold(BigInt::one(), |acc, i| acc * binom(n2 + n3 + a + big + i - 1, n2));
    let den = (1..=a + big + n1).fold(BigInt::one(), |acc, j| acc * binom(j + n2 - 1, j - 1));
    BigRational::new(num, den)
}

fn cored(n1: i64, n2: i64, n3: i64, a: i64) -> Matrix<BigInt> {
    let right_cols = n1 + n2 - n3;
    let left = stack(
        n3,
        vec![
            (n2, Box::new(move |i, j| binom(i - n1 - 1, j - 1))),
            (n1, Box::new(move |i, j| binom(-n1 + n2 + n3 + a + i - 1, j - 1))),
        ],
    );
    let right = stack(
        right_cols,
        vec![
            (n2, Box::new(move |i, j| sign(j + n3 - 1) * binom(n1 + n3 + a - i + j - 1, n1 - i))),
            (n1, Box::new(move |i, j| binom(-n1 + n2 + n3 + a + i - 1, -n1 + n2 + i - j))),
        ],
    );
    Matrix::from_blocks(&[&[&left, &right]])
}

fn symmetric_body(n: i64, a: i64, b: i64, k: i64) -> Matrix<BigInt> {
    let h = a / 2;
    let m = (n + b) as usize;
    Matrix::from_fn(m + b as usize, m + b as usize, |r, c| {
        let (i, j) = (r as i64 + 1, c as i64 + 1);
        match (r < m, c < m) {
            (true, true) => binom(a + i + j - 2, j - 1),
            (true, false) => binom(h + k + i - 1, 2 * k + (j - m as i64) - 1),
            (false, true) => binom(n + a + b + j - 1, j - (i - m as i64)),
            (false, false) => binom(n + h + b + k, 2 * k + (j - m as i64) - (i - m as i64)),
        }
    })
}

fn symmetric_ident(n: i64, b: i64) -> Matrix<BigInt> {
    let m = (n + b) as usize;
    Matrix::from_fn(m + b as usize, m + b as usize, |r, c| if r == c && r < m { BigInt::one() } else { BigInt::zero() })
}

/// Builds the matrix of a variant after validating it.
pub fn build_matrix(variant: &MatrixVariant) -> Result<BuiltMatrix> {
    validate(variant)?;
    let single = |m: Matrix<BigInt>, label: String| Ok(BuiltMatrix::Single(m.with_label(label)));
    match variant {
        MatrixVariant::Gelfand { n, removed, d } => single(gelfand(*n, removed, *d), format!("gelfand d={d}")),
        MatrixVariant::GeneralEvenB { params, d } => {
            let (n, _, chains) = six_chains(&params.spec())?;
            let removed: Vec<_> = chains.iter().flat_map(|c| c.dents().collect::<Vec<_>>()).collect();
            single(gelfand(n, &removed, *d), format!("even-b {} d={d}", params.spec()))
        }
        MatrixVariant::OddB(p) => single(odd_b(p), format!("odd-b {}", p.spec())),
        MatrixVariant::EvenOddAB(p) => single(even_odd_ab(p), format!("evenodd {}", p.spec())),
        MatrixVariant::Reduced(p) => single(reduced_matrix(p), format!("reduced {}", p.spec())),
        MatrixVariant::Cored { n1, n2, n3, a } => single(cored(*n1, *n2, *n3, *a), format!("cored ({n1},{n2},{n3}) a={a}")),
        MatrixVariant::SymmetricIB { n, a, b, k } => Ok(BuiltMatrix::Pair {
            ident: symmetric_ident(*n, *b).with_label("identity pattern"),
            body: symmetric_body(*n, *a, *b, *k).with_label(format!("body ({n},{a},{b},{k})")),
        }),
    }
}

/// True when every dent above the bottom row lies in a maximal horizontal
/// run of even length, which makes all path families carry the same sign.
pub fn is_even_removed_set(removed: &[(i64, i64)]) -> bool {
    let set: std::collections::BTreeSet<(i64, i64)> = removed.iter().copied().collect();
    set.iter().all(|&(row, pos)| {
        if row == 1 || set.contains(&(row, pos - 1)) {
            return true;
        }
        // pos starts a run: measure it
        let len = (0..).take_while(|t| set.contains(&(row, pos + t))).count();
        len % 2 == 0
    })
}

fn abs_count(v: BigInt) -> BigCount {
    v.abs().to_biguint().expect("absolute value is non-negative")
}

/// Tiling count carried by a variant's determinant.
pub fn count_via_determinant(variant: &MatrixVariant) -> Result<BigCount> {
    if let MatrixVariant::SymmetricIB { n, a, b, k } = variant {
        return factorized_count(*n, *a, *b, *k).map(|(total, _)| total);
    }
    if let MatrixVariant::Gelfand { removed, .. } = variant {
        if !is_even_removed_set(removed) {
            return Err(Error::HypothesisViolation(
                "dent set is not even, so the signed count is not a tiling count".into(),
            ));
        }
    }
    let BuiltMatrix::Single(m) = build_matrix(variant)? else { unreachable!() };
    let det = m.det()?;
    match variant {
        MatrixVariant::Reduced(p) => {
            let scaled = reduced_prefactor(p) * BigRational::from_integer(det.abs());
            Ok(abs_count(to_integer(&scaled)?))
        }
        _ => Ok(abs_count(det)),
    }
}

/// Total count and rotation-invariant count of the symmetric region from
/// the three-way factorization over the Eisenstein integers.
pub fn factorized_count(n: i64, a: i64, b: i64, k: i64) -> Result<(BigCount, BigCount)> {
    if a % 2 != 0 || b % 2 != 0 {
        return Err(Error::Parity(format!("factorization needs even a and b, got a = {a}, b = {b}")));
    }
    let BuiltMatrix::Pair { ident, body } = build_matrix(&MatrixVariant::SymmetricIB { n, a, b, k })? else {
        unreachable!()
    };
    let size = body.rows;
    let plus = |scale: &Eisenstein| {
        Matrix::from_fn(size, size, |i, j| {
            let e = Eisenstein::from_int(body.get(i, j).clone());
            if ident.get(i, j).is_one() {
                &e + scale
            } else {
                e
            }
        })
    };
    let mr = plus(&Eisenstein::from_int(1)).det()?;
    let mr = mr
        .as_int()
        .cloned()
        .ok_or_else(|| Error::NotIntegral(format!("rotational factor {mr} is not rational")))?;
    let twisted = plus(&Eisenstein::w()).det()? * plus(&Eisenstein::w2()).det()?;
    let twisted = twisted
        .as_int()
        .cloned()
        .ok_or_else(|| Error::NotIntegral(format!("twisted product {twisted} is not rational")))?;
    Ok((abs_count(&mr * twisted), abs_count(mr)))
}

/// Count of a general region by the cheapest applicable determinant:
/// the path matrix for even satellites, otherwise the odd-satellite matrix.
pub fn count_general(p: &GeneralParams) -> Result<BigCount> {
    if p.all_b_even() {
        count_via_determinant(&MatrixVariant::GeneralEvenB { params: *p, d: DEFAULT_D })
    } else {
        count_via_determinant(&MatrixVariant::OddB(*p))
    }
}

/// Upper bound on the degree in `a` of the cored determinant.
pub fn cored_degree_bound(n1: i64, n2: i64, n3: i64) -> i64 {
    (2 * n1 * n2 + 2 * n1 * n3 + 2 * n2 * n3 - n1 * n1 - n2 * n2 - n3 * n3).div_euclid(4)
}

/// Cored determinant as a polynomial in `a`, interpolated two points past the bound.
pub fn cored_polynomial(n1: i64, n2: i64, n3: i64) -> Result<RationalPoly> {
    let top = cored_degree_bound(n1, n2, n3).max(0) + 2;
    let pts = (0..=top)
        .map(|a| Ok((rint(a), BigRational::from_integer(cored(n1, n2, n3, a).det()?))))
        .collect::<Result<Vec<_>>>()?;
    interpolate(&pts)
}

/// Principal minor of the symmetric body on `rows` (1-based, within the first
/// `n + b`) together with the last `b` indices.
pub fn symmetric_minor(n: i64, a: i64, b: i64, k: i64, rows: &[usize]) -> Result<BigInt> {
    let body = symmetric_body(n, a, b, k);
    let m = (n + b) as usize;
    let idx: Vec<usize> = rows.iter().map(|r| r - 1).chain(m..m + b as usize).collect();
    Matrix::from_fn(idx.len(), idx.len(), |i, j| body.get(idx[i], idx[j]).clone()).det()
}

/// Degree bound in `a` for [`symmetric_minor`].
pub fn symmetric_minor_degree_bound(b: i64, k: i64, rows: &[usize]) -> i64 {
    let s = rows.len() as i64;
    let shift: i64 = rows.iter().enumerate().map(|(t, &r)| r as i64 - (t as i64 + 1)).sum();
    shift + 2 * b * k - b * s
}

/// Outcome of one entrywise relation check on the cored matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub sides: (i64, i64, i64),
    pub first: i64,
    pub second: i64,
    pub d: i64,
    pub holds: bool,
}

fn row_slice(m: &Matrix<BigInt>, lo: usize, hi: usize) -> Vec<Vec<BigInt>> {
    (lo..hi).map(|i| (0..m.cols).map(|j| m.get(i, j).clone()).collect()).collect()
}

fn col_slice(m: &Matrix<BigInt>, lo: usize, hi: usize) -> Vec<Vec<BigInt>> {
    (lo..hi).map(|j| (0..m.rows).map(|i| m.get(i, j).clone()).collect()).collect()
}

/// `d`-th forward difference (`sum_sign = -1`) or anti-difference (`+1`) of a list of vectors.
fn differences(v: &[Vec<BigInt>], d: i64, sum_sign: i64) -> Vec<Vec<BigInt>> {
    let mut cur = v.to_vec();
    for _ in 0..d {
        cur = cur
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(x, y)| x + y * sum_sign).collect())
            .collect();
    }
    cur
}

/// Row relations of the cored matrix specialized at `a = i1 - i2 - n2 - n3`:
/// the odd-zero family and the even-zero family with vanishing right block.
pub fn row_relation_checks(n1: i64, n2: i64, n3: i64) -> Result<Vec<RelationCheck>> {
    let mut out = Vec::new();
    if n3 > n1 + n2 {
        return Ok(out);
    }
    for d in 0..=n1.max(n2) {
        for i1 in 1..=n2 - d {
            for i2 in 1..=n1 - d {
                let odd = (i1 + i2 - n2 - n3 - 1).rem_euclid(2) == 0 && i2 + n3 + d >= i1 + n1;
                let even = (i1 + i2 - n2 - n3).rem_euclid(2) == 0 && i1 > n1 && -i1 + i2 - n1 + n3 + d >= 0;
                if !odd && !even {
                    continue;
                }
                let m = cored(n1, n2, n3, i1 - i2 - n2 - n3);
                let top = differences(&row_slice(&m, 0, n2 as usize), d, -1);
                let bottom = differences(&row_slice(&m, n2 as usize, (n1 + n2) as usize), d, -1);
                let holds = top[(i1 - 1) as usize] == bottom[(i2 - 1) as usize];
                let relation = if odd { "odd-zero rows" } else { "even-zero rows" };
                out.push(RelationCheck { relation, sides: (n1, n2, n3), first: i1, second: i2, d, holds });
            }
        }
    }
    Ok(out)
}

/// Column relations of the cored matrix specialized at `a = j1 - j2 - n3`,
/// comparing anti-differences of the left and right column blocks.
pub fn column_relation_checks(n1: i64, n2: i64, n3: i64) -> Result<Vec<RelationCheck>> {
    let mut out = Vec::new();
    if n3 > n1 + n2 {
        return Ok(out);
    }
    let right = n1 + n2 - n3;
    for d in 0..=n3.max(right) {
        for j1 in 1.max(n2 - n1 + 1)..=n3 - d {
            for j2 in 1..=right - d {
                if (j1 + j2 + n3).rem_euclid(2) != 0 || n2 - n1 + j1 + d < j2 {
                    continue;
                }
                let m = cored(n1, n2, n3, j1 - j2 - n3);
                let lhs = differences(&col_slice(&m, 0, n3 as usize), d, 1);
                let rhs = differences(&col_slice(&m, n3 as usize, (n1 + n2) as usize), d, 1);
                let holds = lhs[(j1 - 1) as usize] == rhs[(j2 - 1) as usize];
                out.push(RelationCheck { relation: "columns", sides: (n1, n2, n3), first: j1, second: j2, d, holds });
            }
        }
    }
    Ok(out)
}

/// `prod_{i<j} (x_j - x_i)`.
pub fn vandermonde(xs: &[i64]) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..xs.len() {
        for i in 0..j {
            acc *= xs[j] - xs[i];
        }
    }
    acc
}

/// Integer-valued `BigUint` from an `i64`, for comparisons in tests.
pub fn count_of(v: u64) -> BigCount {
    BigUint::from(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{count_invariant_tilings, count_tilings};
    use crate::region::build_region;
    use proptest::prelude::*;

    fn gp(v: [i64; 10]) -> GeneralParams {
        let [n1, n2, n3, a, b1, b2, b3, k1, k2, k3] = v;
        GeneralParams { n1, n2, n3, a, b1, b2, b3, k1, k2, k3 }
    }

    fn oracle(p: &GeneralParams) -> BigCount {
        count_tilings(&build_region(&p.spec()).unwrap(), 400).unwrap()
    }

    #[test]
    fn cored_small_matrix_matches_display() {
        let BuiltMatrix::Single(m) = build_matrix(&MatrixVariant::Cored { n1: 1, n2: 1, n3: 1, a: 3 }).unwrap() else {
            panic!()
        };
        // blocks binom(i-2, j-1) and (-1)^j binom(a+j-i+1, 1-i)
        assert_eq!(m.get(0, 0), &binom(-1, 0));
        assert_eq!(m.get(0, 1), &(sign(1) * binom(3 + 1 - 1 + 1, 0)));
        assert_eq!(count_via_determinant(&MatrixVariant::Cored { n1: 1, n2: 1, n3: 1, a: 0 }).unwrap(), count_of(2));
    }

    #[test]
    fn evenodd_without_satellites_is_cored() {
        for (n1, n2, n3, a) in [(1, 1, 1, 2), (2, 2, 2, 0), (1, 2, 2, 4), (2, 3, 4, 2)] {
            let p = gp([n1, n2, n3, a, 0, 0, 0, 0, 0, 0]);
            let BuiltMatrix::Single(e) = build_matrix(&MatrixVariant::EvenOddAB(p)).unwrap() else { panic!() };
            let BuiltMatrix::Single(c) = build_matrix(&MatrixVariant::Cored { n1, n2, n3, a }).unwrap() else { panic!() };
            assert_eq!(e.rows, c.rows);
            for i in 0..e.rows {
                for j in 0..e.cols {
                    assert_eq!(e.get(i, j), c.get(i, j), "entry ({i},{j}) of ({n1},{n2},{n3}) a={a}");
                }
            }
        }
    }

    #[test]
    fn gelfand_without_raised_dents_is_vandermonde() {
        for xs in [vec![1, 3, 4], vec![2, 5, 6, 9], vec![1, 2, 3]] {
            let removed: Vec<_> = xs.iter().map(|&x| (1, x)).collect();
            let n = xs.len() as i64;
            let count = count_via_determinant(&MatrixVariant::Gelfand { n, removed, d: DEFAULT_D }).unwrap();
            let ones: Vec<i64> = (1..=n).collect();
            assert_eq!(BigInt::from(count), vandermonde(&xs) / vandermonde(&ones));
        }
    }

    #[test]
    fn odd_dent_run_is_rejected() {
        let v = MatrixVariant::Gelfand { n: 2, removed: vec![(1, 1), (2, 2)], d: 1 };
        assert!(matches!(count_via_determinant(&v), Err(Error::HypothesisViolation(_))));
        assert!(is_even_removed_set(&[(1, 1), (1, 3), (2, 2), (2, 3)]));
    }

    #[test]
    fn variant_parameters_are_checked() {
        let p = gp([2, 2, 2, 0, 1, 0, 0, 0, 0, 0]);
        assert!(matches!(validate(&MatrixVariant::GeneralEvenB { params: p, d: 1 }), Err(Error::VariantParameter(_))));
        let q = gp([2, 2, 2, 2, 0, 0, 0, 0, 1, 0]);
        assert!(matches!(validate(&MatrixVariant::OddB(q)), Err(Error::VariantParameter(_))));
        assert!(matches!(factorized_count(2, 1, 0, 0), Err(Error::Parity(_))));
    }

    #[test]
    fn determinants_match_oracle() {
        let cases = [
            [1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
            [2, 2, 2, 2, 0, 0, 0, 0, 0, 0],
            [1, 2, 2, 2, 0, 0, 0, 0, 0, 0],
            [2, 2, 2, 0, 2, 2, 2, 1, 1, 1],
            [2, 1, 2, 0, 2, 0, 0, 1, 0, 0],
            [2, 2, 2, 0, 1, 1, 1, 1, 1, 1],
            [2, 2, 2, 2, 1, 0, 1, 1, 0, 0],
            [1, 2, 2, 0, 1, 1, 0, 0, 0, 0],
        ];
        for v in cases {
            let p = gp(v);
            let want = oracle(&p);
            if p.all_b_even() {
                for d in 0..=5 {
                    assert_eq!(count_via_determinant(&MatrixVariant::GeneralEvenB { params: p, d }).unwrap(), want, "{v:?} d={d}");
                }
                if p.a % 2 == 0 {
                    assert_eq!(count_via_determinant(&MatrixVariant::Reduced(p)).unwrap(), want, "reduced {v:?}");
                }
            }
            if p.k2 == p.k3 && p.a % 2 == 0 {
                assert_eq!(count_via_determinant(&MatrixVariant::OddB(p)).unwrap(), want, "odd-b {v:?}");
                assert_eq!(count_via_determinant(&MatrixVariant::EvenOddAB(p)).unwrap(), want, "evenodd {v:?}");
            }
        }
    }

    #[test]
    fn reduced_agrees_with_cored() {
        let p = gp([2, 2, 2, 2, 0, 0, 0, 0, 0, 0]);
        assert_eq!(
            count_via_determinant(&MatrixVariant::Reduced(p)).unwrap(),
            count_via_determinant(&MatrixVariant::Cored { n1: 2, n2: 2, n3: 2, a: 2 }).unwrap()
        );
    }

    #[test]
    fn factorization_matches_oracle() {
        assert_eq!(factorized_count(2, 0, 0, 0).unwrap(), (count_of(20), count_of(5)));
        for (n, a, b, k) in [(2, 2, 0, 0), (2, 0, 2, 1), (3, 0, 0, 0), (1, 2, 0, 0)] {
            let r = build_region(&RegionSpec::s(n, a, b, k)).unwrap();
            let (total, mr) = factorized_count(n, a, b, k).unwrap();
            assert_eq!(total, count_tilings(&r, 400).unwrap(), "total ({n},{a},{b},{k})");
            assert_eq!(mr, count_invariant_tilings(&r, 400).unwrap(), "invariant ({n},{a},{b},{k})");
        }
        assert_eq!(factorized_count(2, 2, 0, 0).unwrap().0, factorized_count(2, 2, 0, 1).unwrap().0);
    }

    #[test]
    fn relation_identities_hold_entrywise() {
        for n1 in 0..=4 {
            for n2 in 0..=4 {
                for n3 in 0..=4 {
                    for c in row_relation_checks(n1, n2, n3).unwrap().into_iter().chain(column_relation_checks(n1, n2, n3).unwrap()) {
                        assert!(c.holds, "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cored_degree_respects_bound() {
        for n1 in 0..=3 {
            for n2 in n1..=3 {
                for n3 in n2..=(n1 + n2).min(3) {
                    let p = cored_polynomial(n1, n2, n3).unwrap();
                    let deg = p.degree().map_or(-1, |d| d as i64);
                    assert!(deg <= cored_degree_bound(n1, n2, n3), "({n1},{n2},{n3}) degree {deg}");
                }
            }
        }
    }

    #[test]
    fn counts_are_polynomial_in_one_satellite() {
        let at = |b2: i64| {
            let p = gp([1, 1, 1, 0, 0, b2, 0, 0, 0, 0]);
            BigRational::from_integer(BigInt::from(count_general(&p).unwrap()))
        };
        let pts: Vec<_> = (0..4).map(|t| (rint(2 * t), at(2 * t))).collect();
        let poly = interpolate(&pts).unwrap();
        for t in 4..7 {
            assert_eq!(poly.eval_int(2 * t), at(2 * t), "b2 = {}", 2 * t);
        }
    }

    #[test]
    fn symmetric_minors_obey_degree_bound() {
        let (n, b, k) = (2, 2, 1);
        for rows in [vec![], vec![1], vec![2, 4], vec![1, 3, 4], vec![4]] {
            let bound = symmetric_minor_degree_bound(b, k, &rows);
            let pts: Vec<_> = (0..=bound.max(0) + 3)
                .map(|t| (rint(2 * t), BigRational::from_integer(symmetric_minor(n, 2 * t, b, k, &rows).unwrap())))
                .collect();
            let deg = interpolate(&pts).unwrap().degree().map_or(-1, |d| d as i64);
            assert!(deg <= bound.max(0), "rows {rows:?}: degree {deg} > {bound}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn trapezoid_dents_give_vandermonde_ratio(xs in proptest::collection::btree_set(1i64..12, 1..=5)) {
            let xs: Vec<i64> = xs.into_iter().collect();
            let n = xs.len() as i64;
            let removed: Vec<_> = xs.iter().map(|&x| (1, x)).collect();
            let count = count_via_determinant(&MatrixVariant::Gelfand { n, removed, d: 3 }).unwrap();
            let ones: Vec<i64> = (1..=n).collect();
            prop_assert_eq!(BigInt::from(count), vandermonde(&xs) / vandermonde(&ones));
        }

        #[test]
        fn shift_does_not_change_even_b_count(n1 in 0i64..3, n2 in 0i64..3, n3 in 0i64..3, b in 0i64..2, k in 0i64..2) {
            let p = gp([n1, n2, n3, 0, 2 * b, 2 * b, 2 * b, k, k, k]);
            if build_region(&p.spec()).is_ok() {
                let base = count_via_determinant(&MatrixVariant::GeneralEvenB { params: p, d: 0 }).unwrap();
                for d in 1..=5 {
                    prop_assert_eq!(count_via_determinant(&MatrixVariant::GeneralEvenB { params: p, d }).unwrap(), base.clone());
                }
            }
        }
    }
}

use std::fmt;

use super::ring::Ring;
use crate::{Error, Result};

/// Dense row-major matrix over a ring, optionally labelled for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<R>,
    pub label: String,
}

impl<R: Ring> Matrix<R> {
    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> R,
    {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data, label: String::new() }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect(), label: String::new() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Maps entries into another ring.
    pub fn map<S: Ring, F: FnMut(&R) -> S>(&self, f: F) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect(), label: self.label.clone() }
    }

    /// Stacks square-compatible blocks `[[A, B], [C, D]]` into one matrix.
    pub fn from_blocks(blocks: &[&[&Matrix<R>]]) -> Self {
        let heights: Vec<usize> = blocks.iter().map(|row| row[0].rows).collect();
        let widths: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        let rows: usize = heights.iter().sum();
        let cols: usize = widths.iter().sum();
        let mut out = Matrix::from_fn(rows, cols, |_, _| R::zero());
        let mut r0 = 0;
        for (bi, row) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                assert_eq!(b.rows, heights[bi], "block row height mismatch");
                assert_eq!(b.cols, widths[bj], "block column width mismatch");
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        out.set(r0 + i, c0 + j, b.get(i, j).clone());
                    }
                }
                c0 += b.cols;
            }
            r0 += heights[bi];
        }
        out
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::HypothesisViolation(format!(
                "determinant of non-square {}x{} matrix {}",
                self.rows, self.cols, self.label
            )))
        }
    }

    /// Fraction-free Bareiss elimination with row pivoting. The empty matrix
    /// has determinant one.
    pub fn det(&self) -> Result<R> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(R::one());
        }
        let mut a: Vec<Vec<R>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign_flip = false;
        let mut prev = R::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        sign_flip = !sign_flip;
                    }
                    None => return Ok(R::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                    a[i][j] = num.div_exact(&prev).ok_or_else(|| {
                        Error::InternalDivision(format!("Bareiss step {k} in {}", self.label))
                    })?;
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if sign_flip { d.neg() } else { d })
    }

    /// Laplace expansion along the first row; exponential, for cross-checks.
    pub fn det_cofactor(&self) -> Result<R> {
        self.require_square()?;
        let idx: Vec<usize> = (0..self.cols).collect();
        Ok(self.cofactor_rec(0, &idx))
    }

    fn cofactor_rec(&self, row: usize, cols: &[usize]) -> R {
        if cols.is_empty() {
            return R::one();
        }
        let mut acc = R::zero();
        for (pos, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = e.mul(&self.cofactor_rec(row + 1, &rest));
            acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone()).with_label(self.label.clone())
    }

    pub fn mul(&self, o: &Matrix<R>) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, o.cols, |i, j| {
            (0..self.cols).fold(R::zero(), |acc, k| acc.add(&self.get(i, k).mul(o.get(k, j))))
        })
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.label.is_empty() {
            writeln!(f, "{}:", self.label)?;
        }
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{binom, Eisenstein};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn int_matrix(rows: Vec<Vec<i64>>) -> Matrix<BigInt> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
    }

    #[test]
    fn small_determinants() {
        assert_eq!(int_matrix(vec![]).det().unwrap(), BigInt::from(1));
        assert_eq!(int_matrix(vec![vec![0, 1], vec![1, 0]]).det().unwrap(), BigInt::from(-1));
        assert_eq!(
            int_matrix(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).det().unwrap(),
            BigInt::from(4)
        );
        assert_eq!(int_matrix(vec![vec![1, 2], vec![2, 4]]).det().unwrap(), BigInt::from(0));
    }

    #[test]
    fn pascal_matrix_is_unimodular() {
        for n in 1..8 {
            let m = Matrix::from_fn(n, n, |i, j| binom((i + j) as i64, i as i64));
            assert_eq!(m.det().unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn non_square_is_rejected() {
        let m = int_matrix(vec![vec![1, 2, 3]]);
        assert!(matches!(m.det(), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn eisenstein_determinant() {
        let w = Eisenstein::w();
        let one = Eisenstein::from_int(1);
        let m = Matrix::from_rows(vec![vec![one.clone(), w.clone()], vec![w.clone(), one.clone()]]);
        // 1 - w^2 = 2 + w
        assert_eq!(m.det().unwrap(), Eisenstein::new(2, 1));
        assert_eq!(m.det_cofactor().unwrap(), Eisenstein::new(2, 1));
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(n in 0usize..6, seed in proptest::collection::vec(-9i64..10, 36)) {
            let m = Matrix::from_fn(n, n, |i, j| BigInt::from(seed[i * 6 + j]));
            prop_assert_eq!(m.det().unwrap(), m.det_cofactor().unwrap());
        }

        #[test]
        fn rational_determinant_is_multiplicative(
            a in proptest::collection::vec(-5i64..6, 9),
            b in proptest::collection::vec(-5i64..6, 9),
        ) {
            let ma = Matrix::from_fn(3, 3, |i, j| BigRational::from_integer(BigInt::from(a[i * 3 + j])));
            let mb = Matrix::from_fn(3, 3, |i, j| BigRational::from_integer(BigInt::from(b[i * 3 + j])));
            prop_assert_eq!(ma.mul(&mb).det().unwrap(), ma.det().unwrap() * mb.det().unwrap());
            prop_assert_eq!(ma.transpose().det().unwrap(), ma.det().unwrap());
        }

        #[test]
        fn eisenstein_bareiss_matches_cofactor(n in 0usize..5, seed in proptest::collection::vec(-4i64..5, 32)) {
            let m = Matrix::from_fn(n, n, |i, j| Eisenstein::new(seed[(i * 4 + j) * 2 % 32], seed[((i * 4 + j) * 2 + 1) % 32]));
            prop_assert_eq!(m.det().unwrap(), m.det_cofactor().unwrap());
        }
    }
}

//! Exact arithmetic over prime fields and over the integers.
//!
//! Field elements are canonical representatives in `0..q`. Ranks over F_2
//! are computed on bit-packed rows; all other primes use byte entries.
//! Integer ranks use fraction-free (Bareiss) elimination on big integers,
//! so nothing here ever touches floating point.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime that still fits a `u8` symbol.
pub const MAX_FIELD_ORDER: u32 = 251;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime field F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Field {
    q: u8,
}

impl TryFrom<u32> for Field {
    type Error = Error;

    fn try_from(q: u32) -> Result<Self> {
        Field::new(q)
    }
}

impl From<Field> for u32 {
    fn from(f: Field) -> u32 {
        f.q as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q as u64) || q > MAX_FIELD_ORDER {
            return Err(Error::NotPrime(q as u64));
        }
        Ok(Field { q: q as u8 })
    }

    pub fn binary() -> Self {
        Field { q: 2 }
    }

    #[inline]
    pub fn order(self) -> u8 {
        self.q
    }

    pub fn check(self, a: u8) -> Result<u8> {
        if a < self.q {
            Ok(a)
        } else {
            Err(Error::SymbolOutOfRange {
                value: a as u64,
                q: self.q as u64,
            })
        }
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.q as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.q as u16 - b as u16) % self.q as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.q as u16) as u8
    }

    pub fn inv(self, a: u8) -> Result<u8> {
        if a.is_multiple_of(self.q) {
            return Err(Error::ZeroInverse);
        }
        // a^(q-2) by square-and-multiply
        let mut base = a % self.q;
        let mut exp = self.q as u32 - 2;
        let mut acc = 1u8;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Applies `op`; `b` is ignored for [`FieldOp::Inv`].
    pub fn apply(self, op: FieldOp, a: u8, b: u8) -> Result<u8> {
        let a = self.check(a)?;
        if op != FieldOp::Inv {
            self.check(b)?;
        }
        Ok(match op {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
            FieldOp::Inv => self.inv(a)?,
        })
    }
}

/// Dense matrix over a prime field, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl FieldMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for &e in &entries {
            field.check(e)?;
        }
        Ok(FieldMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows<R: AsRef<[u8]>>(field: Field, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::shape("ragged rows"));
            }
            entries.extend_from_slice(r);
        }
        FieldMatrix::new(field, rows.len(), cols, entries)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.entries[r * self.cols + c]
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c));
            }
        }
        FieldMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Rank over F_q. Uses the bit-packed path when q = 2.
    pub fn rank(&self) -> usize {
        if self.field.order() == 2 {
            BitMatrix::from_field_matrix(self).rank()
        } else {
            self.rank_generic()
        }
    }

    /// Plain Gaussian elimination on byte entries, valid for every prime.
    pub fn rank_generic(&self) -> usize {
        let f = self.field;
        let mut a = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            if piv != rank {
                for c in 0..cols {
                    a.swap(piv * cols + c, rank * cols + c);
                }
            }
            let inv = f.inv(a[rank * cols + col]).expect("pivot is nonzero");
            for c in col..cols {
                a[rank * cols + c] = f.mul(a[rank * cols + c], inv);
            }
            for r in rank + 1..rows {
                let factor = a[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let sub = f.mul(factor, a[rank * cols + c]);
                    a[r * cols + c] = f.sub(a[r * cols + c], sub);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank over F_q; see [`FieldMatrix::rank`].
pub fn rank_gf(m: &FieldMatrix) -> usize {
    m.rank()
}

/// F_2 matrix with each row packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            cols,
            words,
            rows: vec![vec![0; words]; rows],
        }
    }

    pub fn from_field_matrix(m: &FieldMatrix) -> Self {
        assert_eq!(m.field.order(), 2, "bit-packed rank is F_2 only");
        let mut b = BitMatrix::zeros(m.rows, m.cols);
        for r in 0..m.rows {
            for c in 0..m.cols {
                if m.get(r, c) == 1 {
                    b.set(r, c);
                }
            }
        }
        b
    }

    /// Rows given as bitmasks, bit `i` meaning column `i`.
    pub fn from_masks(masks: &[u64], cols: usize) -> Self {
        assert!(cols <= 64);
        BitMatrix {
            cols,
            words: 1,
            rows: masks.iter().map(|&m| vec![m]).collect(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] |= 1 << (c % 64);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    pub fn rank(&self) -> usize {
        let mut a = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(piv) = (rank..a.len()).find(|&r| a[r][w] & bit != 0) else {
                continue;
            };
            a.swap(piv, rank);
            let pivot_row = a[rank].clone();
            for row in a.iter_mut().skip(rank + 1) {
                if row[w] & bit != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row).skip(w) {
                        *x ^= *y;
                    }
                }
            }
            rank += 1;
            if rank == a.len() {
                break;
            }
        }
        debug_assert!(self.words == 0 || a.iter().all(|r| r.len() == self.words));
        rank
    }
}

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::shape("ragged rows"));
            }
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix::new(rows.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// A^T A.
    pub fn gram(&self) -> IntMatrix {
        self.transpose().mul(self).expect("shapes agree")
    }

    /// self - e*I for a square matrix.
    pub fn shift_diagonal(&self, e: &BigInt) -> IntMatrix {
        assert_eq!(self.rows, self.cols, "diagonal shift needs a square matrix");
        let mut out = self.clone();
        for i in 0..self.rows {
            out.entries[i * self.cols + i] -= e;
        }
        out
    }

    /// Exact rank over Q by Bareiss elimination. Every division is exact.
    pub fn rank(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.entries.clone();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
                continue;
            };
            if piv != rank {
                for c in 0..cols {
                    a.swap(piv * cols + c, rank * cols + c);
                }
            }
            let pivot = a[rank * cols + col].clone();
            for r in rank + 1..rows {
                let lead = a[r * cols + col].clone();
                for c in col + 1..cols {
                    let v = (&pivot * &a[r * cols + c] - &lead * &a[rank * cols + c]) / &prev;
                    a[r * cols + c] = v;
                }
                a[r * cols + col] = BigInt::zero();
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }
}

/// Exact rank over Q; see [`IntMatrix::rank`].
pub fn rank_exact(m: &IntMatrix) -> usize {
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2_rows(rows: &[&str]) -> FieldMatrix {
        let rows: Vec<Vec<u8>> = rows
            .iter()
            .map(|s| s.bytes().map(|b| b - b'0').collect())
            .collect();
        FieldMatrix::from_rows(Field::binary(), &rows).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = Field::new(3).unwrap();
        assert_eq!(f3.apply(FieldOp::Add, 2, 2).unwrap(), 1);
        let f7 = Field::new(7).unwrap();
        assert_eq!(f7.apply(FieldOp::Inv, 3, 0).unwrap(), 5);
        assert_eq!(Field::binary().apply(FieldOp::Add, 1, 1).unwrap(), 0);
        assert_eq!(f7.apply(FieldOp::Sub, 2, 5).unwrap(), 4);
        assert_eq!(f7.apply(FieldOp::Mul, 4, 5).unwrap(), 6);
    }

    #[test]
    fn inverse_of_zero_and_composite_orders() {
        assert_eq!(Field::new(5).unwrap().inv(0), Err(Error::ZeroInverse));
        assert_eq!(Field::new(4), Err(Error::NotPrime(4)));
        assert_eq!(Field::new(1), Err(Error::NotPrime(1)));
        assert!(Field::new(7).unwrap().apply(FieldOp::Add, 7, 0).is_err());
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for q in [2u32, 3, 5, 7, 11, 13, 251] {
            let f = Field::new(q).unwrap();
            for a in 1..q as u8 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(f2_rows(&["100", "010", "001"]).rank(), 3);
        assert_eq!(f2_rows(&["110", "011", "101"]).rank(), 2);
        let o = f2_rows(&[
            "1000", "0100", "0010", "0001", "1110", "1101", "1011", "0111",
        ]);
        assert_eq!(o.rank(), 4);
        assert_eq!(o.rank_generic(), 4);
    }

    #[test]
    fn rank_over_f3() {
        let f3 = Field::new(3).unwrap();
        let m = FieldMatrix::from_rows(f3, &[[1u8, 1], [1, 2], [2, 2]]).unwrap();
        assert_eq!(m.rank(), 2);
        let m = FieldMatrix::from_rows(f3, &[[1u8, 2, 0], [2, 1, 0]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn bitmatrix_wide_rows() {
        let mut b = BitMatrix::zeros(3, 130);
        b.set(0, 129);
        b.set(1, 129);
        b.set(1, 3);
        b.set(2, 3);
        assert_eq!(b.rank(), 2);
        assert!(b.get(1, 3));
    }

    #[test]
    fn exact_rank_examples() {
        let j4 = IntMatrix::from_i64_rows(&[[1i64; 4]; 4]).unwrap();
        assert_eq!(j4.rank(), 1);
        let m = IntMatrix::from_i64_rows(&[[2i64, 4], [1, 2]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(IntMatrix::identity(5).rank(), 5);
        assert_eq!(IntMatrix::zeros(3, 2).rank(), 0);
        let m = IntMatrix::from_i64_rows(&[[0i64, 0, 3], [0, 2, 1], [0, 4, 2]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn shape_errors() {
        assert!(FieldMatrix::new(Field::binary(), 2, 2, vec![0, 1, 1]).is_err());
        assert!(IntMatrix::from_i64_rows(&[vec![1i64, 2], vec![3]]).is_err());
        let a = IntMatrix::zeros(2, 3);
        assert!(a.mul(&a).is_err());
    }
}

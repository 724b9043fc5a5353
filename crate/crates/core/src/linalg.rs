//! Dense linear algebra over a prime field GF(p).
//!
//! Matrices here are tiny (a handful of rows and columns), so everything is
//! stored densely in row-major order and reduced with plain Gauss-Jordan
//! elimination.

use std::fmt;

use crate::error::{Error, Result};

/// A dense matrix over GF(p), entries kept in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    p: u32,
    data: Vec<u32>,
}

/// Modular inverse by Fermat's little theorem; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc: u64 = 1;
    let mut b = (base % p) as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FMatrix {
    pub fn zero(rows: usize, cols: usize, p: u32) -> Self {
        FMatrix { rows, cols, p, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, p: u32) -> Self {
        let mut m = Self::zero(n, n, p);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Builds a matrix from row-major entries, reducing each entry mod `p`.
    pub fn from_vec(rows: usize, cols: usize, p: u32, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Contract(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let data = data.into_iter().map(|x| x % p).collect();
        Ok(FMatrix { rows, cols, p, data })
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize, p: u32) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Contract(format!(
                    "ragged row of length {} in matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|x| x % p));
        }
        Ok(FMatrix { rows: rows.len(), cols, p, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::Contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &FMatrix) -> FMatrix {
        let p = self.p as u64;
        let mut out = Self::zero(self.rows, other.cols, self.p);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, c) as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &FMatrix) -> Result<FMatrix> {
        self.check_same_shape(other)?;
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect();
        Ok(FMatrix { rows: self.rows, cols: self.cols, p: self.p, data })
    }

    pub fn sub(&self, other: &FMatrix) -> Result<FMatrix> {
        self.check_same_shape(other)?;
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + p - b) % p).collect();
        Ok(FMatrix { rows: self.rows, cols: self.cols, p: self.p, data })
    }

    pub fn neg(&self) -> FMatrix {
        self.scale(self.p - 1)
    }

    pub fn scale(&self, s: u32) -> FMatrix {
        let p = self.p as u64;
        let s = (s % self.p) as u64;
        let data = self.data.iter().map(|&a| (a as u64 * s % p) as u32).collect();
        FMatrix { rows: self.rows, cols: self.cols, p: self.p, data }
    }

    fn check_same_shape(&self, other: &FMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.p != other.p {
            return Err(Error::Contract(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.rows != other.rows {
            return Err(Error::Contract("hstack needs equal row counts".into()));
        }
        let mut out = Self::zero(self.rows, self.cols + other.cols, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.cols != other.cols {
            return Err(Error::Contract("vstack needs equal column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix { rows: self.rows + other.rows, cols: self.cols, p: self.p, data })
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &FMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> FMatrix {
        let mut out = Self::zero(rows, cols, self.p);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r0 + r, c0 + c));
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> FMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        FMatrix { rows: idx.len(), cols: self.cols, p: self.p, data }
    }

    /// Reduced row echelon form together with the rank.
    pub fn rref(&self) -> (FMatrix, usize) {
        let (m, pivots) = self.rref_with_pivots();
        (m, pivots.len())
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref_with_pivots(&self) -> (FMatrix, Vec<usize>) {
        let p = self.p as u64;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = inv_mod(m.get(row, col), m.p) as u64;
            for c in 0..m.cols {
                let idx = row * m.cols + c;
                m.data[idx] = (m.data[idx] as u64 * inv % p) as u32;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col) as u64;
                if f == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let sub = f * m.get(row, c) as u64 % p;
                    let idx = r * m.cols + c;
                    m.data[idx] = ((m.data[idx] as u64 + p - sub) % p) as u32;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Rows form a basis of `{x : self * x^T = 0}`.
    pub fn kernel_basis(&self) -> FMatrix {
        let (r, pivots) = self.rref_with_pivots();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zero(free.len(), self.cols, p);
        for (i, &f) in free.iter().enumerate() {
            out.set(i, f, 1);
            for (prow, &pc) in pivots.iter().enumerate() {
                let v = r.get(prow, f);
                out.set(i, pc, (p - v) % p);
            }
        }
        out
    }

    /// Some `x` with `self * x^T = b`, or `None` when the system is inconsistent.
    ///
    /// The returned solution sets every free variable to zero, so it is
    /// deterministic for a given input.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>> {
        if b.len() != self.rows {
            return Err(Error::Contract(format!(
                "right-hand side has length {} but matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let rhs = FMatrix::from_vec(self.rows, 1, self.p, b.to_vec())?;
        let aug = self.hstack(&rhs)?;
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (prow, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(prow, self.cols);
        }
        Ok(Some(x))
    }

    pub fn mul_vec(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.rows)
            .map(|r| {
                (self.row(r).iter().zip(x).map(|(&a, &b)| a as u64 * b as u64 % p).sum::<u64>() % p) as u32
            })
            .collect()
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<FMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&FMatrix::identity(n, self.p)).ok()?;
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Row space basis in canonical (RREF, zero rows dropped) form.
    pub fn row_space(&self) -> FMatrix {
        let (r, pivots) = self.rref_with_pivots();
        r.block(0, 0, pivots.len(), self.cols)
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FMatrix<{}>{}x{}[", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

/// Iterates over every vector of `GF(p)^n` in lexicographic order.
pub fn all_vectors(n: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    (0..total).map(move |mut i| {
        let mut v = vec![0u32; n];
        for slot in v.iter_mut() {
            *slot = (i % p as u64) as u32;
            i /= p as u64;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(rows: &[Vec<u32>], cols: usize) -> FMatrix {
        FMatrix::from_rows(rows, cols, 2).unwrap()
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = FMatrix::identity(2, 2);
        assert_eq!(id.rref(), (id.clone(), 2));
        let z = FMatrix::zero(3, 3, 2);
        assert_eq!(z.rref(), (z.clone(), 0));
    }

    #[test]
    fn rref_all_ones() {
        let m = m2(&[vec![1, 1], vec![1, 1]], 2);
        let (r, rank) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(r, m2(&[vec![1, 1], vec![0, 0]], 2));
        assert_eq!(r.rref().0, r);
    }

    #[test]
    fn kernels() {
        assert_eq!(FMatrix::identity(2, 2).kernel_basis().rows(), 0);
        let k = FMatrix::zero(2, 3, 2).kernel_basis();
        assert_eq!(k.rows(), 3);
        assert_eq!(k.rank(), 3);
        let k = m2(&[vec![1, 1]], 2).kernel_basis();
        assert_eq!(k, m2(&[vec![1, 1]], 2));
    }

    #[test]
    fn solving() {
        let id = FMatrix::identity(2, 2);
        assert_eq!(id.solve(&[1, 0]).unwrap(), Some(vec![1, 0]));
        assert_eq!(FMatrix::zero(2, 2, 2).solve(&[1, 0]).unwrap(), None);
        let m = m2(&[vec![1, 1]], 2);
        let x = m.solve(&[1]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x), vec![1]);
        assert!(matches!(id.solve(&[1]), Err(Error::Contract(_))));
    }

    #[test]
    fn inverse_over_gf3() {
        let m = FMatrix::from_rows(&[vec![2, 1], vec![1, 1]], 2, 3).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), FMatrix::identity(2, 3));
        assert!(FMatrix::from_rows(&[vec![1, 2], vec![2, 1]], 2, 3).unwrap().inverse().is_none());
    }

    #[test]
    fn vector_enumeration() {
        let all: Vec<_> = all_vectors(2, 3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[1], vec![1, 0]);
        assert_eq!(all_vectors(0, 2).count(), 1);
    }
}

//! Dense matrices of exact ring elements.

use std::fmt;

use super::{Ring, RingElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RingMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl RingMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        RingMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(ring: &Ring, rows: Vec<Vec<RingElem>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RingMatrix {
            ring: ring.clone(),
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(ring: &Ring, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| ring.from_i64(v)).collect())
            .collect();
        Self::from_rows(ring, rows).expect("rectangular literal")
    }

    /// Parses every entry with [`Ring::parse`].
    pub fn parse(ring: &Ring, rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, rows)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &RingElem {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RingElem) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> Vec<RingElem> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<RingElem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<RingElem>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.ring.is_zero(e))
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|e| !self.ring.is_zero(e))
            .map(|i| (i / self.cols, i % self.cols))
    }

    fn check_ring(&self, other: &RingMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring.spec(),
                other.ring.spec()
            )));
        }
        Ok(())
    }

    /// Exact matrix product.
    pub fn mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = RingMatrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if r.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = r.add(&out.entries[idx], &r.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(
                "cannot add matrices of different shapes".into(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Ok(RingMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingMatrix {
        self.map(|r, e| r.neg(e))
    }

    pub fn scale(&self, c: &RingElem) -> RingMatrix {
        self.map(|r, e| r.mul(c, e))
    }

    pub fn map(&self, f: impl Fn(&Ring, &RingElem) -> RingElem) -> RingMatrix {
        RingMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| f(&self.ring, e)).collect(),
        }
    }

    pub fn transpose(&self) -> RingMatrix {
        let mut out = RingMatrix::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RingMatrix {
        let mut out = RingMatrix::zeros(&self.ring, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &RingMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block_diag(a: &RingMatrix, b: &RingMatrix) -> Result<RingMatrix> {
        a.check_ring(b)?;
        let mut out = RingMatrix::zeros(&a.ring, a.rows + b.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(a.rows, a.cols, b);
        Ok(out)
    }

    /// `P^T A P` for the permutation sending new index `i` to old index `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> RingMatrix {
        self.submatrix(perm, perm)
    }

    /// Kronecker product.
    pub fn kronecker(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.check_ring(other)?;
        let r = &self.ring;
        let mut out = RingMatrix::zeros(r, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if r.is_zero(a) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(
                            i * other.rows + k,
                            j * other.cols + l,
                            r.mul(a, other.get(k, l)),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// Whether every entry on or below the diagonal vanishes.
    pub fn is_strictly_upper_triangular(&self) -> bool {
        self.first_on_or_below_diagonal().is_none()
    }

    pub fn first_on_or_below_diagonal(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..=i.min(self.cols.saturating_sub(1)) {
                if j < self.cols && !self.ring.is_zero(self.get(i, j)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Inverse over the ring, if it exists.
    ///
    /// Over `Z` and `Z/n` this goes through the Smith normal form; elsewhere
    /// Gauss-Jordan elimination with unit pivots, which is complete over
    /// fields and local rings.
    pub fn inverse(&self) -> Result<RingMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let r = &self.ring;
        if r.is_integers() || r.modulus().is_some() {
            return super::snf::inverse_via_snf(self);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RingMatrix::identity(r, n);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&i| r.is_unit(a.get(i, col))) else {
                return Err(Error::NotInvertible(format!(
                    "no unit pivot in column {col}"
                )));
            };
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let u = r.inverse(a.get(col, col)).expect("pivot is a unit");
            a.scale_row(col, &u);
            inv.scale_row(col, &u);
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a.get(i, col).clone();
                if r.is_zero(&factor) {
                    continue;
                }
                a.add_row_multiple(i, col, &r.neg(&factor));
                inv.add_row_multiple(i, col, &r.neg(&factor));
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub fn scale_row(&mut self, row: usize, c: &RingElem) {
        for j in 0..self.cols {
            let v = self.ring.mul(c, self.get(row, j));
            self.set(row, j, v);
        }
    }

    /// `row[target] += c * row[source]`.
    pub fn add_row_multiple(&mut self, target: usize, source: usize, c: &RingElem) {
        for j in 0..self.cols {
            let s = self.get(source, j);
            if self.ring.is_zero(s) {
                continue;
            }
            let v = self.ring.add(self.get(target, j), &self.ring.mul(c, s));
            self.set(target, j, v);
        }
    }

    /// `col[target] += c * col[source]`.
    pub fn add_col_multiple(&mut self, target: usize, source: usize, c: &RingElem) {
        for i in 0..self.rows {
            let s = self.get(i, source);
            if self.ring.is_zero(s) {
                continue;
            }
            let v = self.ring.add(self.get(i, target), &self.ring.mul(s, c));
            self.set(i, target, v);
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.ring.fmt_elem(self.get(i, j)))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.to_strings();
        write!(f, "[")?;
        for (i, row) in rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let r = Ring::integers();
        let a = RingMatrix::from_i64(&r, &[&[2, 4], &[3, 6]]);
        let i = RingMatrix::identity(&r, 2);
        assert_eq!(i.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&i).unwrap(), a);
    }

    #[test]
    fn integer_product() {
        let r = Ring::integers();
        let a = RingMatrix::from_i64(&r, &[&[2, 4], &[3, 6]]);
        let b = RingMatrix::from_i64(&r, &[&[1], &[0]]);
        assert_eq!(a.mul(&b).unwrap(), RingMatrix::from_i64(&r, &[&[2], &[3]]));
    }

    #[test]
    fn normal_example_squares_to_zero() {
        let r = Ring::from_notation("Q[x,y,z]/(x^2 + y*z)").unwrap();
        let a = RingMatrix::parse(&r, &[&["x", "y"], &["z", "-x"]]).unwrap();
        assert!(a.mul(&a).unwrap().is_zero());
    }

    #[test]
    fn mismatches_are_errors() {
        let z = Ring::integers();
        let q = Ring::rationals();
        let a = RingMatrix::identity(&z, 2);
        assert!(matches!(
            a.mul(&RingMatrix::identity(&q, 2)),
            Err(Error::RingMismatch(_))
        ));
        assert!(matches!(
            a.mul(&RingMatrix::identity(&z, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn local_inverse_uses_unit_pivots() {
        let r = Ring::from_notation("F5[x]").unwrap();
        let a = RingMatrix::parse(&r, &[&["x", "1"], &["1", "0"]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RingMatrix::identity(&r, 2));
    }
}

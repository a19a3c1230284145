//! Smith normal form over `Z` and `Z/n`.
//!
//! Entries are handled through their integer lifts; over `Z/n` every
//! operation is followed by reduction to the canonical range `0..n`.
//! Pivots are the nonzero entries of smallest absolute value (ties broken
//! in row-major order); rows and columns are cleared with unimodular 2x2
//! Bezout transforms, so `U` and `V` stay invertible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Ring, RingElem, RingMatrix};
use crate::error::{Error, Result};

/// Dense integer matrix used by the lattice computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn from_ring_matrix(m: &RingMatrix) -> IntMat {
        let r = m.ring();
        IntMat {
            rows: m.rows(),
            cols: m.cols(),
            data: m.entries().iter().map(|e| r.lift(e)).collect(),
        }
    }

    pub fn to_ring_matrix(&self, ring: &Ring) -> RingMatrix {
        let rows = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| ring.from_bigint(self.get(i, j)))
                    .collect()
            })
            .collect();
        RingMatrix::from_rows(ring, rows).expect("rectangular")
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> IntMat {
        let mut m = IntMat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }
}

/// `(U, S, V)` with `U * A * V = S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSmith {
    pub u: IntMat,
    pub s: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

impl IntSmith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

struct Work<'a> {
    a: IntMat,
    u: IntMat,
    v: IntMat,
    modulus: Option<&'a BigInt>,
}

impl Work<'_> {
    fn norm(&self, x: BigInt) -> BigInt {
        match self.modulus {
            Some(n) => x.mod_floor(n),
            None => x,
        }
    }

    fn row_op(&mut self, t: usize, i: usize, m: [[BigInt; 2]; 2]) {
        for is_a in [true, false] {
            let target = if is_a { &mut self.a } else { &mut self.u };
            for c in 0..target.cols {
                let x = target.get(t, c).clone();
                let y = target.get(i, c).clone();
                let nx = &m[0][0] * &x + &m[0][1] * &y;
                let ny = &m[1][0] * &x + &m[1][1] * &y;
                target.set(t, c, nx);
                target.set(i, c, ny);
            }
        }
        self.reduce_rows(&[t, i]);
    }

    fn col_op(&mut self, t: usize, j: usize, m: [[BigInt; 2]; 2]) {
        for is_a in [true, false] {
            let target = if is_a { &mut self.a } else { &mut self.v };
            for r in 0..target.rows {
                let x = target.get(r, t).clone();
                let y = target.get(r, j).clone();
                let nx = &m[0][0] * &x + &m[1][0] * &y;
                let ny = &m[0][1] * &x + &m[1][1] * &y;
                target.set(r, t, nx);
                target.set(r, j, ny);
            }
        }
        self.reduce_cols(&[t, j]);
    }

    fn reduce_rows(&mut self, rows: &[usize]) {
        if self.modulus.is_none() {
            return;
        }
        for &r in rows {
            for c in 0..self.a.cols {
                let v = self.norm(self.a.get(r, c).clone());
                self.a.set(r, c, v);
            }
            for c in 0..self.u.cols {
                let v = self.norm(self.u.get(r, c).clone());
                self.u.set(r, c, v);
            }
        }
    }

    fn reduce_cols(&mut self, cols: &[usize]) {
        if self.modulus.is_none() {
            return;
        }
        for &c in cols {
            for r in 0..self.a.rows {
                let v = self.norm(self.a.get(r, c).clone());
                self.a.set(r, c, v);
            }
            for r in 0..self.v.rows {
                let v = self.norm(self.v.get(r, c).clone());
                self.v.set(r, c, v);
            }
        }
    }

    fn swap_rows(&mut self, x: usize, y: usize) {
        let m = [
            [BigInt::zero(), BigInt::one()],
            [BigInt::one(), BigInt::zero()],
        ];
        if x != y {
            self.row_op(x, y, m);
        }
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        let m = [
            [BigInt::zero(), BigInt::one()],
            [BigInt::one(), BigInt::zero()],
        ];
        if x != y {
            self.col_op(x, y, m);
        }
    }

    /// Multiplies row `t` by a unit so the pivot becomes its canonical
    /// associate: positive over `Z`, `gcd(pivot, n)` over `Z/n`.
    fn normalize_pivot(&mut self, t: usize) {
        let p = self.a.get(t, t).clone();
        let unit_inv = match self.modulus {
            None => {
                if p.is_negative() {
                    Some(-BigInt::one())
                } else {
                    None
                }
            }
            Some(n) => {
                let g = p.gcd(n);
                if g == p {
                    None
                } else {
                    let step = n / &g;
                    let mut u = &p / &g;
                    while !u.gcd(n).is_one() {
                        u += &step;
                    }
                    Some(u.extended_gcd(n).x.mod_floor(n))
                }
            }
        };
        if let Some(c) = unit_inv {
            for target in [&mut self.a, &mut self.u] {
                for col in 0..target.cols {
                    let v = target.get(t, col) * &c;
                    target.set(t, col, v);
                }
            }
            self.reduce_rows(&[t]);
        }
    }
}

fn bezout(a: &BigInt, b: &BigInt) -> [[BigInt; 2]; 2] {
    let e = a.extended_gcd(b);
    let g = e.gcd;
    [[e.x, e.y], [-(b / &g), a / &g]]
}

/// Smith normal form of an integer matrix, optionally modulo `n`.
pub fn smith_int(a: &IntMat, modulus: Option<&BigInt>) -> IntSmith {
    let (m, n) = (a.rows, a.cols);
    let mut w = Work {
        a: a.clone(),
        u: IntMat::identity(m),
        v: IntMat::identity(n),
        modulus,
    };
    if modulus.is_some() {
        w.reduce_rows(&(0..m).collect::<Vec<_>>());
    }
    let mut t = 0;
    while t < m.min(n) {
        // smallest |entry| in the trailing block, row-major ties
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = w.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < w.a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            w.normalize_pivot(t);
            let mut clean = true;
            for i in t + 1..m {
                let b = w.a.get(i, t).clone();
                if b.is_zero() {
                    continue;
                }
                let p = w.a.get(t, t).clone();
                if b.is_multiple_of(&p) {
                    let q = &b / &p;
                    w.row_op(t, i, [[BigInt::one(), BigInt::zero()], [-q, BigInt::one()]]);
                } else {
                    w.row_op(t, i, bezout(&p, &b));
                    clean = false;
                }
            }
            for j in t + 1..n {
                let b = w.a.get(t, j).clone();
                if b.is_zero() {
                    continue;
                }
                let p = w.a.get(t, t).clone();
                if b.is_multiple_of(&p) {
                    let q = &b / &p;
                    w.col_op(t, j, [[BigInt::one(), -q], [BigInt::zero(), BigInt::one()]]);
                } else {
                    let bz = bezout(&p, &b);
                    // column version: new col_t = x col_t + y col_j
                    w.col_op(
                        t,
                        j,
                        [
                            [bz[0][0].clone(), bz[1][0].clone()],
                            [bz[0][1].clone(), bz[1][1].clone()],
                        ],
                    );
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let row_clear = (t + 1..m).all(|i| w.a.get(i, t).is_zero());
            let col_clear = (t + 1..n).all(|j| w.a.get(t, j).is_zero());
            if !(row_clear && col_clear) {
                continue;
            }
            w.normalize_pivot(t);
            let p = w.a.get(t, t).clone();
            let offender =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !w.a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    w.row_op(
                        t,
                        i,
                        [
                            [BigInt::one(), BigInt::one()],
                            [BigInt::zero(), BigInt::one()],
                        ],
                    );
                }
                None => break,
            }
        }
        t += 1;
    }
    let rank = (0..m.min(n)).filter(|&i| !w.a.get(i, i).is_zero()).count();
    IntSmith {
        u: w.u,
        s: w.a,
        v: w.v,
        rank,
    }
}

/// Smith normal form of a ring matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithForm {
    pub u: RingMatrix,
    pub s: RingMatrix,
    pub v: RingMatrix,
}

impl SmithForm {
    /// Diagonal of `S` as ring elements.
    pub fn diagonal(&self) -> Vec<RingElem> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

/// Computes `(U, S, V)` with `U * A * V = S` over `Z` or `Z/n`.
pub fn smith_normal_form(a: &RingMatrix) -> Result<SmithForm> {
    let ring = a.ring();
    let modulus = match (ring.is_integers(), ring.modulus()) {
        (true, _) => None,
        (false, Some(n)) => Some(BigInt::from(n)),
        _ => {
            return Err(Error::UnsupportedBackend(format!(
                "Smith normal form requires Z or Z/n, got {}",
                ring.spec()
            )))
        }
    };
    let res = smith_int(&IntMat::from_ring_matrix(a), modulus.as_ref());
    Ok(SmithForm {
        u: res.u.to_ring_matrix(ring),
        s: res.s.to_ring_matrix(ring),
        v: res.v.to_ring_matrix(ring),
    })
}

pub(super) fn inverse_via_snf(a: &RingMatrix) -> Result<RingMatrix> {
    let ring = a.ring();
    let sf = smith_normal_form(a)?;
    let n = a.rows();
    let mut sinv = RingMatrix::zeros(ring, n, n);
    for i in 0..n {
        let d = sf.s.get(i, i);
        let inv = ring.inverse(d).ok_or_else(|| {
            Error::NotInvertible(format!(
                "invariant factor {} is not a unit",
                ring.fmt_elem(d)
            ))
        })?;
        sinv.set(i, i, inv);
    }
    sf.v.mul(&sinv)?.mul(&sf.u)
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn int_determinant(a: &IntMat) -> BigInt {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m.get(k, k).is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            for c in 0..n {
                m.data.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * m.get(n - 1, n - 1)
}

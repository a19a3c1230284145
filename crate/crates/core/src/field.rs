//! Scalar fields and dense linear algebra over them.
//!
//! Every degreewise computation (graded components, homology tables,
//! spectral pages) reduces to linear algebra over the base field of the
//! coefficient ring. The routines here are generic over [`Field`] so the
//! prime-field path runs on plain `u64` residues.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

/// The field of integers modulo a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in F_{}", self.p);
        pow_mod(*a, self.p - 2, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// The rational numbers, stored as reduced fractions with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero in Q");
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

pub fn rational_from_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Dense row-major matrix over a field.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Mat {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<E>], zero: E) -> Self {
        let mut m = Mat::filled(rows, columns.len(), zero);
        for (c, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Mat<F::Elem> {
    Mat::filled(rows, cols, f.zero())
}

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::Elem> {
    let mut m = zeros(f, n, n);
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn mat_mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!(a.cols, b.rows, "mat_mul dimension mismatch");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let bkj = b.get(k, j);
                if f.is_zero(bkj) {
                    continue;
                }
                let idx = i * out.cols + j;
                out.data[idx] = f.add(&out.data[idx], &f.mul(aik, bkj));
            }
        }
    }
    out
}

pub fn mat_vec<F: Field>(f: &F, a: &Mat<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            let mut acc = f.zero();
            for (k, vk) in v.iter().enumerate() {
                let aik = a.get(i, k);
                if !f.is_zero(aik) && !f.is_zero(vk) {
                    acc = f.add(&acc, &f.mul(aik, vk));
                }
            }
            acc
        })
        .collect()
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut Mat<F::Elem>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    let cols = m.cols;
    for col in 0..cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
            continue;
        };
        if pr != row {
            for c in 0..cols {
                m.data.swap(pr * cols + c, row * cols + c);
            }
        }
        let inv = f.inv(m.get(row, col));
        for c in col..cols {
            let idx = row * cols + c;
            m.data[idx] = f.mul(&m.data[idx], &inv);
        }
        for r in 0..m.rows {
            if r == row {
                continue;
            }
            let factor = m.get(r, col).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for c in col..cols {
                let pv = m.data[row * cols + c].clone();
                if f.is_zero(&pv) {
                    continue;
                }
                let idx = r * cols + c;
                m.data[idx] = f.sub(&m.data[idx], &f.mul(&factor, &pv));
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
    let mut work = m.clone();
    rref(f, &mut work).len()
}

/// Basis of the right null space `{x : m x = 0}`, one vector per free column.
pub fn nullspace<F: Field>(f: &F, m: &Mat<F::Elem>) -> Vec<Vec<F::Elem>> {
    let mut work = m.clone();
    let pivots = rref(f, &mut work);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); m.cols];
        v[free] = f.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(work.get(r, free));
        }
        basis.push(v);
    }
    basis
}

/// Indices of the vectors that are not in the span of their predecessors.
pub fn independent_prefix_columns<F: Field>(
    f: &F,
    dim: usize,
    vectors: &[Vec<F::Elem>],
) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = Mat::from_columns(dim, vectors, f.zero());
    rref(f, &mut m)
}

/// A basis of the span of `vectors`, chosen among the vectors themselves.
pub fn span_basis<F: Field>(f: &F, dim: usize, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    independent_prefix_columns(f, dim, vectors)
        .into_iter()
        .map(|i| vectors[i].clone())
        .collect()
}

/// Solves `a x = b`, returning one solution if the system is consistent.
pub fn solve<F: Field>(f: &F, a: &Mat<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert_eq!(a.rows, b.len());
    let mut aug = zeros(f, a.rows, a.cols + 1);
    for r in 0..a.rows {
        for c in 0..a.cols {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, a.cols, b[r].clone());
    }
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![f.zero(); a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, a.cols).clone();
    }
    Some(x)
}

/// Whether `v` lies in the span of `basis` (vectors of length `dim`).
pub fn in_span<F: Field>(f: &F, dim: usize, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> bool {
    if v.iter().all(|x| f.is_zero(x)) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let a = Mat::from_columns(dim, basis, f.zero());
    solve(f, &a, v).is_some()
}

pub fn inverse<F: Field>(f: &F, m: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    if m.rows != m.cols {
        return None;
    }
    let n = m.rows;
    let mut aug = zeros(f, n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, n + r, f.one());
    }
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = zeros(f, n, n);
    for r in 0..n {
        for c in 0..n {
            inv.set(r, c, aug.get(r, n + c).clone());
        }
    }
    Some(inv)
}

/// Echelon basis of a subspace of `F^dim`, grown one vector at a time.
///
/// Each stored row has a leading 1 at its pivot and zeros at the pivots of
/// the rows stored before it, so reducing in insertion order is enough.
#[derive(Debug, Clone)]
pub struct Echelon<F: Field> {
    f: F,
    dim: usize,
    rows: Vec<(usize, Vec<F::Elem>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(f: &F, dim: usize) -> Self {
        Echelon {
            f: f.clone(),
            dim,
            rows: Vec::new(),
        }
    }

    pub fn from_vectors(f: &F, dim: usize, vectors: &[Vec<F::Elem>]) -> Self {
        let mut e = Echelon::new(f, dim);
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` modulo the subspace; zero iff `v` lies in it.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.f;
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            let c = v[*p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                if !f.is_zero(ri) {
                    *vi = f.sub(vi, &f.mul(&c, ri));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.f.is_zero(x))
    }

    /// Adds `v` to the subspace; returns whether the rank grew.
    pub fn insert(&mut self, v: &[F::Elem]) -> bool {
        let f = &self.f;
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&r[p]);
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        self.rows.push((p, r));
        true
    }
}

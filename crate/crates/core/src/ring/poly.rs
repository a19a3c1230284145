//! Sparse multivariate polynomials over a base field.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::field::{Field, PrimeField, RationalField};

/// Coefficient field of a polynomial ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseField {
    PrimeField { p: u64 },
    Rationals,
}

/// An element of a [`BaseField`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp(u64),
    Q(BigRational),
}

impl BaseField {
    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            BaseField::PrimeField { p } => Scalar::Fp(PrimeField::new(*p).reduce_i64(v)),
            BaseField::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            BaseField::PrimeField { p } => {
                let m = BigInt::from(*p);
                let r = ((v % &m) + &m) % &m;
                Scalar::Fp(r.try_into().expect("residue fits in u64"))
            }
            BaseField::Rationals => Scalar::Q(BigRational::from_integer(v.clone())),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            BaseField::PrimeField { p } => *p,
            BaseField::Rationals => 0,
        }
    }

    pub fn to_u64(&self, s: &Scalar) -> u64 {
        match s {
            Scalar::Fp(v) => *v,
            Scalar::Q(_) => panic!("rational scalar in a prime-field context"),
        }
    }

    pub fn to_rational(&self, s: &Scalar) -> BigRational {
        match s {
            Scalar::Q(q) => q.clone(),
            Scalar::Fp(_) => panic!("prime-field scalar in a rational context"),
        }
    }

    pub fn fmt_scalar(&self, s: &Scalar) -> String {
        match s {
            Scalar::Fp(v) => v.to_string(),
            Scalar::Q(q) => {
                if q.is_integer() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
        }
    }

    /// Whether the scalar prints with a leading minus sign.
    pub fn is_negative(&self, s: &Scalar) -> bool {
        matches!(s, Scalar::Q(q) if q.is_negative())
    }
}

impl Field for BaseField {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        self.from_i64(0)
    }
    fn one(&self) -> Scalar {
        self.from_i64(1)
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseField::PrimeField { p }, Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(PrimeField::new(*p).add(x, y))
            }
            (BaseField::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            _ => panic!("scalar/base field mismatch"),
        }
    }
    fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseField::PrimeField { p }, Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(PrimeField::new(*p).sub(x, y))
            }
            (BaseField::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x - y),
            _ => panic!("scalar/base field mismatch"),
        }
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseField::PrimeField { p }, Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(PrimeField::new(*p).mul(x, y))
            }
            (BaseField::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            _ => panic!("scalar/base field mismatch"),
        }
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (BaseField::PrimeField { p }, Scalar::Fp(x)) => Scalar::Fp(PrimeField::new(*p).neg(x)),
            (BaseField::Rationals, Scalar::Q(x)) => Scalar::Q(-x),
            _ => panic!("scalar/base field mismatch"),
        }
    }
    fn inv(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (BaseField::PrimeField { p }, Scalar::Fp(x)) => Scalar::Fp(PrimeField::new(*p).inv(x)),
            (BaseField::Rationals, Scalar::Q(x)) => Scalar::Q(RationalField.inv(x)),
            _ => panic!("scalar/base field mismatch"),
        }
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Fp(x) => *x == 0,
            Scalar::Q(x) => x.is_zero(),
        }
    }
}

/// Exponent vector. Ordered by total degree, then lexicographically with
/// the first variable largest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// Indices of the variables occurring in the monomial.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{}", names[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree `d` in `nvars` variables, in descending order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    let mut current = vec![0u16; nvars];
    fn rec(i: usize, remaining: u32, current: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        let n = current.len();
        if i == n - 1 {
            current[i] = remaining as u16;
            out.push(Monomial(current.clone()));
            return;
        }
        for e in (0..=remaining).rev() {
            current[i] = e as u16;
            rec(i + 1, remaining - e, current, out);
        }
        current[i] = 0;
    }
    rec(0, d, &mut current, &mut out);
    out
}

/// A polynomial as a list of terms sorted by descending monomial, with
/// nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(f: &BaseField, nvars: usize, c: Scalar) -> Self {
        if f.is_zero(&c) {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(nvars), c)],
            }
        }
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        Poly {
            terms: vec![(m, c)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Builds a polynomial from unsorted terms, merging duplicates.
    pub fn from_terms(f: &BaseField, mut terms: Vec<(Monomial, Scalar)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 = f.add(&last.1, &c);
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !f.is_zero(c));
        Poly { terms: out }
    }

    pub fn add(&self, f: &BaseField, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(ca, cb);
                    if !f.is_zero(&c) {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self, f: &BaseField) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, f: &BaseField, other: &Poly) -> Poly {
        self.add(f, &other.neg(f))
    }

    pub fn scale(&self, f: &BaseField, c: &Scalar) -> Poly {
        if f.is_zero(c) {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), f.mul(a, c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, f: &BaseField, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.mul(mb), f.mul(ca, cb)));
            }
        }
        Poly::from_terms(f, terms)
    }

    pub fn leading(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.first()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// `Some(d)` when every term has degree `d`; `None` if mixed. Zero is
    /// reported as `Some(None)`-like via [`Poly::is_zero`] by callers.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    /// The homogeneous component of degree `d`.
    pub fn component(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .cloned()
                .collect(),
        }
    }

    pub fn constant_term(&self, f: &BaseField) -> Scalar {
        self.terms
            .iter()
            .find(|(m, _)| m.degree() == 0)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| f.zero())
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.iter().find(|(t, _)| t == m).map(|(_, c)| c)
    }

    pub fn fmt_with(&self, f: &BaseField, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = f.is_negative(c);
            let abs = if negative { f.neg(c) } else { c.clone() };
            if idx == 0 {
                if negative {
                    s.push('-');
                }
            } else if negative {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let is_one = abs == f.one();
            if m.degree() == 0 {
                s.push_str(&f.fmt_scalar(&abs));
            } else if is_one {
                s.push_str(&m.fmt_with(names));
            } else {
                s.push_str(&f.fmt_scalar(&abs));
                s.push('*');
                s.push_str(&m.fmt_with(names));
            }
        }
        s
    }
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monomial_counts_match_binomials() {
        for v in 1..=4usize {
            for d in 0..=8u32 {
                let ms = monomials_of_degree(v, d);
                assert_eq!(
                    ms.len() as u64,
                    binom(d as u64 + v as u64 - 1, v as u64 - 1)
                );
                assert!(ms.windows(2).all(|w| w[0] > w[1]));
            }
        }
    }

    #[test]
    fn display_orders_terms_descending() {
        let f = BaseField::Rationals;
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let p = Poly::from_terms(
            &f,
            vec![
                (Monomial(vec![0, 1, 1]), f.from_i64(1)),
                (Monomial(vec![2, 0, 0]), f.from_i64(1)),
                (Monomial(vec![0, 0, 0]), f.from_i64(-3)),
            ],
        );
        assert_eq!(p.fmt_with(&f, &names), "x^2 + y*z - 3");
    }
}

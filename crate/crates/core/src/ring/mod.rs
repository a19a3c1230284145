//! Coefficient rings: prime fields, the rationals, the integers, integers
//! modulo `n`, and quotients of polynomial rings by homogeneous relations.

pub mod gcd;
mod graded;
pub mod matrix;
mod parse;
pub mod poly;
pub mod snf;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use graded::{DegreeData, GradedData};
pub use matrix::RingMatrix;
pub use poly::{BaseField, Monomial, Poly, Scalar};

use crate::error::{Error, Result};
use crate::field::{pow_mod, Field};

/// Which arithmetic backend a ring uses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RingKind {
    PrimeField {
        p: u64,
    },
    Rationals,
    Integers,
    IntegersMod {
        n: u64,
    },
    GradedPoly {
        base: BaseField,
        vars: Vec<String>,
        #[serde(default)]
        relations: Vec<String>,
    },
}

/// Serializable description of a coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    #[serde(flatten)]
    pub kind: RingKind,
    /// Interpret graded rings at the irrelevant ideal and `Z/p^k` as local.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub local: bool,
}

impl RingSpec {
    pub fn new(kind: RingKind) -> Self {
        RingSpec { kind, local: false }
    }

    pub fn local(mut self) -> Self {
        self.local = true;
        self
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Short notation: `Q`, `Z`, `F5`, `Z/4`, `Q[x,y]`, `F2[x,y]/(x^2, x*y)`;
    /// a trailing `!local` sets the local flag.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (s, local) = match s.strip_suffix("!local") {
            Some(rest) => (rest.trim(), true),
            None => (s, false),
        };
        let bad = || Error::InvalidRing(format!("cannot parse ring notation {s:?}"));
        let base_of = |t: &str| -> Result<BaseField> {
            match t {
                "Q" => Ok(BaseField::Rationals),
                _ => {
                    let p = t
                        .strip_prefix('F')
                        .or_else(|| t.strip_prefix("GF"))
                        .ok_or_else(bad)?
                        .parse::<u64>()
                        .map_err(|_| bad())?;
                    Ok(BaseField::PrimeField { p })
                }
            }
        };
        let kind = if let Some(open) = s.find('[') {
            let close = s.find(']').ok_or_else(bad)?;
            let base = base_of(s[..open].trim())?;
            let vars: Vec<String> = s[open + 1..close]
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            let rest = s[close + 1..].trim();
            let relations = if rest.is_empty() {
                Vec::new()
            } else {
                let inner = rest
                    .strip_prefix('/')
                    .map(str::trim)
                    .and_then(|r| r.strip_prefix('('))
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                split_top_level(inner)
            };
            RingKind::GradedPoly {
                base,
                vars,
                relations,
            }
        } else if s == "Z" {
            RingKind::Integers
        } else if let Some(n) = s.strip_prefix("Z/") {
            RingKind::IntegersMod {
                n: n.trim().parse().map_err(|_| bad())?,
            }
        } else {
            match base_of(s)? {
                BaseField::Rationals => RingKind::Rationals,
                BaseField::PrimeField { p } => RingKind::PrimeField { p },
            }
        };
        Ok(RingSpec { kind, local })
    }
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(p)` when `n = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = n;
            while m.is_multiple_of(p) {
                m /= p;
            }
            return (m == 1).then_some(p);
        }
        p += 1;
    }
    Some(n)
}

/// An element of a [`Ring`], always stored in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingElem {
    /// Residue in `F_p` or `Z/n`, in `0..n`.
    Res(u64),
    Int(BigInt),
    Rat(BigRational),
    Poly(Poly),
}

#[derive(Debug)]
enum Backend {
    Prime(u64),
    Rationals,
    Integers,
    IntegersMod(u64),
    Graded(GradedData),
}

#[derive(Debug)]
struct RingInner {
    spec: RingSpec,
    backend: Backend,
}

/// A validated coefficient ring. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        let mut spec = spec;
        let kind = spec.kind.clone();
        let backend = match &kind {
            RingKind::PrimeField { p } => {
                if !is_prime(*p) {
                    return Err(Error::InvalidRing(format!("{p} is not prime")));
                }
                Backend::Prime(*p)
            }
            RingKind::Rationals => Backend::Rationals,
            RingKind::Integers => Backend::Integers,
            RingKind::IntegersMod { n } => {
                if *n < 2 {
                    return Err(Error::InvalidRing(format!(
                        "modulus {n} must be at least 2"
                    )));
                }
                if *n > (1u64 << 62) {
                    return Err(Error::InvalidRing(format!("modulus {n} is too large")));
                }
                Backend::IntegersMod(*n)
            }
            RingKind::GradedPoly {
                base,
                vars,
                relations,
            } => {
                if let BaseField::PrimeField { p } = base {
                    if !is_prime(*p) {
                        return Err(Error::InvalidRing(format!("{p} is not prime")));
                    }
                }
                for (i, v) in vars.iter().enumerate() {
                    let valid = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                        && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !valid {
                        return Err(Error::InvalidRing(format!("invalid variable name {v:?}")));
                    }
                    if vars[..i].contains(v) {
                        return Err(Error::InvalidRing(format!("duplicate variable {v}")));
                    }
                }
                let free = GradedData::new(*base, vars.clone(), Vec::new());
                let mut polys = Vec::new();
                for r in relations {
                    let p = parse::parse_poly(&free, r)?;
                    if p.is_zero() {
                        continue;
                    }
                    match p.homogeneous_degree() {
                        Some(0) => {
                            return Err(Error::InvalidRing(format!(
                                "relation {r:?} is a nonzero constant"
                            )))
                        }
                        Some(_) => polys.push(p),
                        None => {
                            return Err(Error::InvalidRing(format!(
                                "relation {r:?} is not homogeneous"
                            )))
                        }
                    }
                }
                let canonical: Vec<String> = polys.iter().map(|p| p.fmt_with(base, vars)).collect();
                spec.kind = RingKind::GradedPoly {
                    base: *base,
                    vars: vars.clone(),
                    relations: canonical,
                };
                Backend::Graded(GradedData::new(*base, vars.clone(), polys))
            }
        };
        Ok(Ring(Arc::new(RingInner { spec, backend })))
    }

    pub fn from_notation(s: &str) -> Result<Ring> {
        Ring::new(s.parse()?)
    }

    pub fn rationals() -> Ring {
        Ring::new(RingSpec::new(RingKind::Rationals)).expect("valid ring")
    }

    pub fn integers() -> Ring {
        Ring::new(RingSpec::new(RingKind::Integers)).expect("valid ring")
    }

    pub fn prime_field(p: u64) -> Result<Ring> {
        Ring::new(RingSpec::new(RingKind::PrimeField { p }))
    }

    pub fn integers_mod(n: u64) -> Result<Ring> {
        Ring::new(RingSpec::new(RingKind::IntegersMod { n }))
    }

    pub fn polynomial(base: BaseField, vars: &[&str], relations: &[&str]) -> Result<Ring> {
        Ring::new(RingSpec::new(RingKind::GradedPoly {
            base,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
        }))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }

    pub fn is_local_flag(&self) -> bool {
        self.0.spec.local
    }

    pub fn graded(&self) -> Option<&GradedData> {
        match &self.0.backend {
            Backend::Graded(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_graded(&self) -> bool {
        self.graded().is_some()
    }

    /// `Some(field)` when the ring itself is a field.
    pub fn as_field(&self) -> Option<BaseField> {
        match &self.0.backend {
            Backend::Prime(p) => Some(BaseField::PrimeField { p: *p }),
            Backend::Rationals => Some(BaseField::Rationals),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        self.as_field().is_some()
    }

    pub fn is_integers(&self) -> bool {
        matches!(self.0.backend, Backend::Integers)
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.0.backend {
            Backend::IntegersMod(n) => Some(n),
            _ => None,
        }
    }

    /// Polynomial ring over a field without relations.
    pub fn is_free_polynomial_ring(&self) -> bool {
        self.graded().is_some_and(|g| g.relations.is_empty())
    }

    /// Univariate polynomial ring over a field (a Euclidean domain).
    pub fn is_univariate_polynomial_ring(&self) -> bool {
        self.graded()
            .is_some_and(|g| g.relations.is_empty() && g.nvars() == 1)
    }

    /// Integral domains the toolkit can reason about: fields, `Z`, and
    /// polynomial rings over a field without relations.
    pub fn is_supported_domain(&self) -> bool {
        self.is_field() || self.is_integers() || self.is_free_polynomial_ring()
    }

    /// Residue field of a local ring: fields are their own residue field,
    /// `Z/p^k` has `F_p`, graded rings (local flag) have their base field.
    pub fn residue_field(&self) -> Option<BaseField> {
        match &self.0.backend {
            Backend::Prime(p) => Some(BaseField::PrimeField { p: *p }),
            Backend::Rationals => Some(BaseField::Rationals),
            Backend::IntegersMod(n) => prime_power_base(*n).map(|p| BaseField::PrimeField { p }),
            Backend::Graded(g) if self.0.spec.local => Some(g.base),
            _ => None,
        }
    }

    /// Image of `a` in the residue field (see [`Ring::residue_field`]).
    pub fn residue(&self, a: &RingElem) -> Option<Scalar> {
        let k = self.residue_field()?;
        Some(match (&self.0.backend, a) {
            (Backend::Prime(_), RingElem::Res(v)) => Scalar::Fp(*v),
            (Backend::Rationals, RingElem::Rat(q)) => Scalar::Q(q.clone()),
            (Backend::IntegersMod(_), RingElem::Res(v)) => k.from_i64(*v as i64),
            (Backend::Graded(g), RingElem::Poly(p)) => p.constant_term(&g.base),
            _ => panic!("element does not belong to ring"),
        })
    }

    pub fn zero(&self) -> RingElem {
        match &self.0.backend {
            Backend::Prime(_) | Backend::IntegersMod(_) => RingElem::Res(0),
            Backend::Rationals => RingElem::Rat(BigRational::zero()),
            Backend::Integers => RingElem::Int(BigInt::zero()),
            Backend::Graded(_) => RingElem::Poly(Poly::zero()),
        }
    }

    pub fn one(&self) -> RingElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> RingElem {
        match &self.0.backend {
            Backend::Prime(n) | Backend::IntegersMod(n) => {
                let m = BigInt::from(*n);
                let r: BigInt = v.mod_floor(&m);
                RingElem::Res(r.to_u64().expect("residue fits"))
            }
            Backend::Rationals => RingElem::Rat(BigRational::from_integer(v.clone())),
            Backend::Integers => RingElem::Int(v.clone()),
            Backend::Graded(g) => {
                RingElem::Poly(Poly::constant(&g.base, g.nvars(), g.base.from_bigint(v)))
            }
        }
    }

    /// Embeds a base-field scalar (graded rings and fields only).
    pub fn from_scalar(&self, s: &Scalar) -> RingElem {
        match (&self.0.backend, s) {
            (Backend::Graded(g), _) => {
                RingElem::Poly(Poly::constant(&g.base, g.nvars(), s.clone()))
            }
            (Backend::Prime(_), Scalar::Fp(v)) => RingElem::Res(*v),
            (Backend::Rationals, Scalar::Q(q)) => RingElem::Rat(q.clone()),
            _ => panic!("scalar does not embed into this ring"),
        }
    }

    /// The `i`-th variable of a graded ring, in normal form.
    pub fn var(&self, i: usize) -> RingElem {
        let g = self
            .graded()
            .expect("variables exist only in polynomial rings");
        let p = Poly::monomial(Monomial::var(g.nvars(), i), g.base.one());
        RingElem::Poly(g.reduce(&p))
    }

    pub fn var_by_name(&self, name: &str) -> Option<RingElem> {
        let g = self.graded()?;
        g.vars.iter().position(|v| v == name).map(|i| self.var(i))
    }

    pub fn monomial(&self, m: &Monomial) -> RingElem {
        let g = self
            .graded()
            .expect("monomials exist only in polynomial rings");
        RingElem::Poly(g.reduce(&Poly::monomial(m.clone(), g.base.one())))
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        match a {
            RingElem::Res(v) => *v == 0,
            RingElem::Int(v) => v.is_zero(),
            RingElem::Rat(v) => v.is_zero(),
            RingElem::Poly(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self, a: &RingElem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match (&self.0.backend, a, b) {
            (Backend::Prime(n) | Backend::IntegersMod(n), RingElem::Res(x), RingElem::Res(y)) => {
                RingElem::Res(((*x as u128 + *y as u128) % *n as u128) as u64)
            }
            (Backend::Integers, RingElem::Int(x), RingElem::Int(y)) => RingElem::Int(x + y),
            (Backend::Rationals, RingElem::Rat(x), RingElem::Rat(y)) => RingElem::Rat(x + y),
            (Backend::Graded(g), RingElem::Poly(x), RingElem::Poly(y)) => {
                RingElem::Poly(x.add(&g.base, y))
            }
            _ => panic!("ring element mismatch in add"),
        }
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        match (&self.0.backend, a) {
            (Backend::Prime(n) | Backend::IntegersMod(n), RingElem::Res(x)) => {
                RingElem::Res(if *x == 0 { 0 } else { n - x })
            }
            (Backend::Integers, RingElem::Int(x)) => RingElem::Int(-x),
            (Backend::Rationals, RingElem::Rat(x)) => RingElem::Rat(-x),
            (Backend::Graded(g), RingElem::Poly(x)) => RingElem::Poly(x.neg(&g.base)),
            _ => panic!("ring element mismatch in neg"),
        }
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match (&self.0.backend, a, b) {
            (Backend::Prime(n) | Backend::IntegersMod(n), RingElem::Res(x), RingElem::Res(y)) => {
                RingElem::Res(((*x as u128 * *y as u128) % *n as u128) as u64)
            }
            (Backend::Integers, RingElem::Int(x), RingElem::Int(y)) => RingElem::Int(x * y),
            (Backend::Rationals, RingElem::Rat(x), RingElem::Rat(y)) => RingElem::Rat(x * y),
            (Backend::Graded(g), RingElem::Poly(x), RingElem::Poly(y)) => {
                if x.is_zero() || y.is_zero() {
                    return RingElem::Poly(Poly::zero());
                }
                RingElem::Poly(g.reduce(&x.mul(&g.base, y)))
            }
            _ => panic!("ring element mismatch in mul"),
        }
    }

    pub fn pow(&self, a: &RingElem, e: u32) -> RingElem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Multiplicative inverse, when `a` is a unit.
    pub fn inverse(&self, a: &RingElem) -> Option<RingElem> {
        match (&self.0.backend, a) {
            (Backend::Prime(p), RingElem::Res(x)) => {
                (*x != 0).then(|| RingElem::Res(pow_mod(*x, p - 2, *p)))
            }
            (Backend::IntegersMod(n), RingElem::Res(x)) => {
                let e = BigInt::from(*x).extended_gcd(&BigInt::from(*n));
                e.gcd.is_one().then(|| self.from_bigint(&e.x))
            }
            (Backend::Integers, RingElem::Int(x)) => {
                (x.abs().is_one()).then(|| RingElem::Int(x.clone()))
            }
            (Backend::Rationals, RingElem::Rat(x)) => {
                (!x.is_zero()).then(|| RingElem::Rat(x.recip()))
            }
            (Backend::Graded(g), RingElem::Poly(x)) => {
                // Units of a positively graded ring are the nonzero constants.
                match x.terms.as_slice() {
                    [(m, c)] if m.degree() == 0 => Some(RingElem::Poly(Poly::constant(
                        &g.base,
                        g.nvars(),
                        g.base.inv(c),
                    ))),
                    _ => None,
                }
            }
            _ => panic!("ring element mismatch in inverse"),
        }
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        self.inverse(a).is_some()
    }

    /// Degree of a homogeneous element: `Ok(None)` for zero, `Err(())` for
    /// non-homogeneous elements or non-graded rings.
    pub fn homogeneous_degree(&self, a: &RingElem) -> std::result::Result<Option<u32>, ()> {
        match a {
            RingElem::Poly(p) if p.is_zero() => Ok(None),
            RingElem::Poly(p) => p.homogeneous_degree().map(Some).ok_or(()),
            _ => Err(()),
        }
    }

    pub fn as_poly<'a>(&self, a: &'a RingElem) -> &'a Poly {
        match a {
            RingElem::Poly(p) => p,
            _ => panic!("not a polynomial element"),
        }
    }

    pub fn as_bigint<'a>(&self, a: &'a RingElem) -> &'a BigInt {
        match a {
            RingElem::Int(v) => v,
            _ => panic!("not an integer element"),
        }
    }

    /// Canonical integer lift of an element of `Z` or `Z/n`.
    pub fn lift(&self, a: &RingElem) -> BigInt {
        match a {
            RingElem::Int(v) => v.clone(),
            RingElem::Res(v) => BigInt::from(*v),
            _ => panic!("element has no integer lift"),
        }
    }

    /// Parses an element from its string form (`"x^2 + y*z"`, `"-3"`, `"3/2"`).
    pub fn parse(&self, s: &str) -> Result<RingElem> {
        parse::parse_elem(self, s)
    }

    pub fn fmt_elem(&self, a: &RingElem) -> String {
        match (&self.0.backend, a) {
            (_, RingElem::Res(v)) => v.to_string(),
            (_, RingElem::Int(v)) => v.to_string(),
            (_, RingElem::Rat(q)) => poly::fmt_rational(q),
            (Backend::Graded(g), RingElem::Poly(p)) => p.fmt_with(&g.base, &g.vars),
            _ => panic!("ring element mismatch in fmt"),
        }
    }

    /// Standard monomial basis of the degree-`d` component.
    pub fn graded_component_basis(&self, d: u32) -> Result<Vec<Monomial>> {
        let g = self.graded().ok_or_else(|| {
            Error::UnsupportedBackend("graded_component_basis requires a graded-poly ring".into())
        })?;
        Ok(g.degree_data(d).basis.clone())
    }

    /// Same as [`Ring::graded_component_basis`] but as ring elements.
    pub fn graded_component_elems(&self, d: u32) -> Result<Vec<RingElem>> {
        Ok(self
            .graded_component_basis(d)?
            .into_iter()
            .map(|m| self.monomial(&m))
            .collect())
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base_str = |b: &BaseField| match b {
            BaseField::Rationals => "Q".to_string(),
            BaseField::PrimeField { p } => format!("F{p}"),
        };
        match &self.kind {
            RingKind::PrimeField { p } => write!(f, "F{p}")?,
            RingKind::Rationals => write!(f, "Q")?,
            RingKind::Integers => write!(f, "Z")?,
            RingKind::IntegersMod { n } => write!(f, "Z/{n}")?,
            RingKind::GradedPoly {
                base,
                vars,
                relations,
            } => {
                write!(f, "{}[{}]", base_str(base), vars.join(","))?;
                if !relations.is_empty() {
                    write!(f, "/({})", relations.join(", "))?;
                }
            }
        }
        if self.local {
            write!(f, "!local")?;
        }
        Ok(())
    }
}

//! Greatest common divisors and exact division in the supported domains.

use num_integer::Integer;
use num_traits::Signed;

use super::poly::Poly;
use super::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::field::Field;

/// Normalized associate: positive over `Z`, monic over `k[x]`, 1 over a field.
pub fn normalize(ring: &Ring, a: &RingElem) -> RingElem {
    if ring.is_zero(a) {
        return a.clone();
    }
    match a {
        RingElem::Int(v) => RingElem::Int(v.abs()),
        RingElem::Poly(p) => {
            let g = ring.graded().expect("polynomial ring");
            let lc = &p.leading().expect("nonzero").1;
            RingElem::Poly(p.scale(&g.base, &g.base.inv(lc)))
        }
        _ if ring.is_field() => ring.one(),
        _ => a.clone(),
    }
}

/// Unit `u` with `a = u * normalize(a)`.
pub fn unit_part(ring: &Ring, a: &RingElem) -> RingElem {
    if ring.is_zero(a) {
        return ring.one();
    }
    match a {
        RingElem::Int(v) => ring.from_i64(if v.is_negative() { -1 } else { 1 }),
        RingElem::Poly(p) => ring.from_scalar(&p.leading().expect("nonzero").1),
        _ if ring.is_field() => a.clone(),
        _ => ring.one(),
    }
}

/// Division with remainder in `k[x]`.
pub fn poly_divrem(ring: &Ring, a: &RingElem, b: &RingElem) -> Result<(RingElem, RingElem)> {
    if !ring.is_univariate_polynomial_ring() {
        return Err(Error::UnsupportedBackend(
            "division with remainder requires k[x]".into(),
        ));
    }
    let g = ring.graded().expect("graded");
    let f = &g.base;
    let (pa, pb) = (ring.as_poly(a), ring.as_poly(b));
    let (lb_m, lb_c) = pb
        .leading()
        .cloned()
        .ok_or_else(|| Error::Precondition("division by zero".into()))?;
    let lb_inv = f.inv(&lb_c);
    let mut q = Poly::zero();
    let mut r = pa.clone();
    while let Some((lm, lc)) = r.leading().cloned() {
        let Some(shift) = lm.div(&lb_m) else { break };
        let c = f.mul(&lc, &lb_inv);
        let t = Poly::monomial(shift, c);
        q = q.add(f, &t);
        r = r.sub(f, &t.mul(f, pb));
    }
    Ok((RingElem::Poly(q), RingElem::Poly(r)))
}

/// Normalized greatest common divisor over `Z` or `k[x]`; `gcd(0, 0) = 0`.
pub fn gcd(ring: &Ring, a: &RingElem, b: &RingElem) -> Result<RingElem> {
    if ring.is_integers() {
        return Ok(RingElem::Int(ring.as_bigint(a).gcd(ring.as_bigint(b))));
    }
    if ring.is_univariate_polynomial_ring() {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !ring.is_zero(&y) {
            let (_, r) = poly_divrem(ring, &x, &y)?;
            x = y;
            y = r;
        }
        return Ok(normalize(ring, &x));
    }
    Err(Error::UnsupportedBackend(format!(
        "gcd requires Z or a univariate polynomial ring over a field, got {}",
        ring.spec()
    )))
}

/// `Some(a / b)` when `b` divides `a` exactly. Supported on `Z`, fields and
/// polynomial rings without relations.
pub fn exact_div(ring: &Ring, a: &RingElem, b: &RingElem) -> Option<RingElem> {
    if ring.is_zero(b) {
        return ring.is_zero(a).then(|| ring.zero());
    }
    if ring.is_zero(a) {
        return Some(ring.zero());
    }
    match (a, b) {
        (RingElem::Int(x), RingElem::Int(y)) => x.is_multiple_of(y).then(|| RingElem::Int(x / y)),
        (RingElem::Poly(pa), RingElem::Poly(pb)) => {
            let g = ring.graded()?;
            if !g.relations.is_empty() {
                return None;
            }
            let f = &g.base;
            let (lb_m, lb_c) = pb.leading().cloned()?;
            let lb_inv = f.inv(&lb_c);
            let mut q = Poly::zero();
            let mut r = pa.clone();
            while let Some((lm, lc)) = r.leading().cloned() {
                let shift = lm.div(&lb_m)?;
                let t = Poly::monomial(shift, f.mul(&lc, &lb_inv));
                q = q.add(f, &t);
                r = r.sub(f, &t.mul(f, pb));
            }
            Some(RingElem::Poly(q))
        }
        _ => ring.inverse(b).map(|inv| ring.mul(a, &inv)),
    }
}

pub fn divides(ring: &Ring, d: &RingElem, a: &RingElem) -> bool {
    exact_div(ring, a, d).is_some()
}

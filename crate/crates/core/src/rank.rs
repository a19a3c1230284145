//! Determinantal rank, rank-one factorization over a UFD, and heights of
//! monomial ideals.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::gcd::{exact_div, gcd, unit_part};
use crate::ring::poly::Monomial;
use crate::ring::{Ring, RingElem, RingMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Rows and columns of a minor with nonzero determinant.
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
    /// Nonzero entries: generators of `I_1(A)`.
    pub ideal_generators: Vec<RingElem>,
}

impl RankReport {
    pub fn to_json(&self, ring: &Ring) -> Value {
        json!({
            "rank": self.rank,
            "witness_rows": self.witness_rows,
            "witness_cols": self.witness_cols,
            "ideal_generators": self.ideal_generators.iter().map(|g| ring.fmt_elem(g)).collect::<Vec<_>>(),
        })
    }
}

fn check_domain(ring: &Ring) -> Result<()> {
    if ring.is_supported_domain() {
        Ok(())
    } else {
        Err(Error::UnsupportedBackend(format!(
            "determinantal rank needs Z, a field or a polynomial ring without relations, got {}",
            ring.spec()
        )))
    }
}

/// Largest `r` with `I_r(A) != 0`, by fraction-free (Bareiss)
/// elimination. Every intermediate entry is a minor of `A`, so the
/// divisions are exact and the pivots give a witness minor.
pub fn determinantal_rank(a: &RingMatrix) -> Result<RankReport> {
    let ring = a.ring();
    check_domain(ring)?;
    let (m, n) = (a.rows(), a.cols());
    let mut work = a.clone();
    let mut order: Vec<usize> = (0..m).collect();
    let mut prev = ring.one();
    let mut witness_rows = Vec::new();
    let mut witness_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !ring.is_zero(work.get(i, col))) else {
            continue;
        };
        work.swap_rows(r, p);
        order.swap(r, p);
        let piv = work.get(r, col).clone();
        for i in r + 1..m {
            let lead = work.get(i, col).clone();
            for j in col + 1..n {
                let num = ring.sub(
                    &ring.mul(&piv, work.get(i, j)),
                    &ring.mul(&lead, work.get(r, j)),
                );
                let v = exact_div(ring, &num, &prev).ok_or_else(|| {
                    Error::Precondition(format!(
                        "inexact Bareiss division by {}: not a domain?",
                        ring.fmt_elem(&prev)
                    ))
                })?;
                work.set(i, j, v);
            }
            work.set(i, col, ring.zero());
        }
        prev = piv;
        witness_rows.push(order[r]);
        witness_cols.push(col);
        r += 1;
    }
    witness_rows.sort_unstable();
    let mut ideal_generators: Vec<RingElem> = Vec::new();
    for e in a.entries() {
        if !ring.is_zero(e) && !ideal_generators.contains(e) {
            ideal_generators.push(e.clone());
        }
    }
    Ok(RankReport {
        rank: r,
        witness_rows,
        witness_cols,
        ideal_generators,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Factorization {
    /// `m x 1`.
    pub column: RingMatrix,
    /// `1 x n`.
    pub row: RingMatrix,
}

fn column_of(ring: &Ring, v: Vec<RingElem>) -> RingMatrix {
    RingMatrix::from_rows(ring, v.into_iter().map(|x| vec![x]).collect()).expect("column")
}

fn row_of(ring: &Ring, v: Vec<RingElem>) -> RingMatrix {
    RingMatrix::from_rows(ring, vec![v]).expect("row")
}

/// Two rows `x`, `y` proportional over the fraction field, `x != 0`:
/// with `y_h / x_h = p / q` in lowest terms, `x = q y'` and `y = p y'`.
fn factor_two_rows(
    ring: &Ring,
    x: &[RingElem],
    y: &[RingElem],
) -> Result<(RingElem, RingElem, Vec<RingElem>)> {
    let h = x
        .iter()
        .position(|v| !ring.is_zero(v))
        .expect("first row is nonzero");
    let g = gcd(ring, &x[h], &y[h])?;
    let mut q = exact_div(ring, &x[h], &g).expect("gcd divides");
    let mut p = exact_div(ring, &y[h], &g).expect("gcd divides");
    let u = ring
        .inverse(&unit_part(ring, &q))
        .expect("unit part is a unit");
    q = ring.mul(&q, &u);
    p = ring.mul(&p, &u);
    let yp: Vec<RingElem> = x
        .iter()
        .map(|xj| exact_div(ring, xj, &q))
        .collect::<Option<_>>()
        .ok_or(Error::RankTooLarge(2))?;
    if yp.iter().zip(y).any(|(a, b)| ring.mul(&p, a) != *b) {
        return Err(Error::RankTooLarge(2));
    }
    Ok((q, p, yp))
}

fn factor_rec(a: &RingMatrix) -> Result<(Vec<RingElem>, Vec<RingElem>)> {
    let ring = a.ring();
    let (m, n) = (a.rows(), a.cols());
    if a.is_zero() {
        return Ok((vec![ring.zero(); m], vec![ring.zero(); n]));
    }
    if m == 1 {
        return Ok((vec![ring.one()], a.row(0)));
    }
    if n == 1 {
        return Ok((a.column(0), vec![ring.one()]));
    }
    let top: Vec<usize> = (0..m - 1).collect();
    let all: Vec<usize> = (0..n).collect();
    let b = a.submatrix(&top, &all);
    let last = a.row(m - 1);
    if b.is_zero() {
        let mut col = vec![ring.zero(); m];
        col[m - 1] = ring.one();
        return Ok((col, last));
    }
    if m == 2 {
        let (q, p, yp) = factor_two_rows(ring, &b.row(0), &last)?;
        return Ok((vec![q, p], yp));
    }
    // B = B'B'', A = B''' C with C = [B''; last row], then C = C'C''.
    let (bp, bpp) = factor_rec(&b)?;
    let (q, p, cpp) = factor_two_rows(ring, &bpp, &last)?;
    let mut col: Vec<RingElem> = bp.iter().map(|v| ring.mul(v, &q)).collect();
    col.push(p);
    Ok((col, cpp))
}

/// Writes a matrix of determinantal rank at most one as column times row,
/// by induction on the number of rows.
pub fn inner_rank_factor_rank1(a: &RingMatrix) -> Result<Rank1Factorization> {
    let ring = a.ring();
    if !(ring.is_integers() || ring.is_univariate_polynomial_ring()) {
        return Err(Error::UnsupportedBackend(format!(
            "rank-one factorization needs Z or k[x], got {}",
            ring.spec()
        )));
    }
    let rank = determinantal_rank(a)?.rank;
    if rank > 1 {
        return Err(Error::RankTooLarge(rank));
    }
    let (c, r) = factor_rec(a)?;
    let f = Rank1Factorization {
        column: column_of(ring, c),
        row: row_of(ring, r),
    };
    debug_assert_eq!(&f.column.mul(&f.row)?, a);
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Height {
    Finite(usize),
    /// The ideal contains a unit.
    UnitIdeal,
}

impl Height {
    pub fn to_json(self) -> Value {
        match self {
            Height::Finite(h) => json!(h),
            Height::UnitIdeal => json!("unit-ideal"),
        }
    }
}

/// Least number of variables meeting the support of every monomial: the
/// height of the monomial ideal they generate.
pub fn monomial_height(nvars: usize, monomials: &[Monomial]) -> Height {
    if monomials.iter().any(|m| m.degree() == 0) {
        return Height::UnitIdeal;
    }
    let supports: Vec<u128> = monomials
        .iter()
        .map(|m| m.support().into_iter().fold(0u128, |acc, v| acc | (1 << v)))
        .collect();
    fn search(supports: &[u128], chosen: u128, start: usize, nvars: usize, left: usize) -> bool {
        let hit = |c: u128| supports.iter().all(|s| s & c != 0);
        if left == 0 {
            return hit(chosen);
        }
        (start..nvars).any(|v| search(supports, chosen | (1 << v), v + 1, nvars, left - 1))
    }
    let h = (0..=nvars)
        .find(|&k| search(&supports, 0, 0, nvars, k))
        .expect("all variables hit every nonconstant monomial");
    Height::Finite(h)
}

fn as_monomial(ring: &Ring, a: &RingElem) -> Result<Monomial> {
    let p = ring.as_poly(a);
    match p.terms.as_slice() {
        [(m, _)] => Ok(m.clone()),
        _ => Err(Error::NotMonomial(ring.fmt_elem(a))),
    }
}

/// Height of the ideal generated by monomials of a polynomial ring; zero
/// generators are ignored.
pub fn monomial_ideal_height(ring: &Ring, generators: &[RingElem]) -> Result<Height> {
    let g = ring.graded().ok_or_else(|| {
        Error::UnsupportedBackend(format!(
            "monomial heights need a polynomial ring, got {}",
            ring.spec()
        ))
    })?;
    let monomials = generators
        .iter()
        .filter(|x| !ring.is_zero(x))
        .map(|x| as_monomial(ring, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(monomial_height(g.nvars(), &monomials))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightBound {
    pub height: Height,
    pub bound: usize,
}

impl HeightBound {
    pub fn unit_ideal(&self) -> bool {
        self.height == Height::UnitIdeal
    }

    /// `I_1(A) = R` or `height I_1(A) <= max(m, n)`.
    pub fn holds(&self) -> bool {
        match self.height {
            Height::UnitIdeal => true,
            Height::Finite(h) => h <= self.bound,
        }
    }

    pub fn to_json(&self) -> Value {
        let verdict = if self.unit_ideal() {
            "unit-ideal"
        } else if self.holds() {
            "holds"
        } else {
            "VIOLATION"
        };
        json!({"height": self.height.to_json(), "bound": self.bound, "verdict": verdict})
    }
}

/// For a rank-one matrix with monomial entries over a polynomial ring.
pub fn check_height_bound(a: &RingMatrix) -> Result<HeightBound> {
    let report = determinantal_rank(a)?;
    if report.rank != 1 {
        return Err(Error::Precondition(format!(
            "height bound applies to determinantal rank 1, got {}",
            report.rank
        )));
    }
    let height = monomial_ideal_height(a.ring(), &report.ideal_generators)?;
    Ok(HeightBound {
        height,
        bound: a.rows().max(a.cols()),
    })
}

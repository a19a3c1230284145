//! Contractibility: conjugating a square-zero matrix to `[[0, 1_r], [0, 0]]`.
//!
//! Over a local ring a unit entry `a_ij` (`i != j`) splits off the summand
//! spanned by `e_j` and `v = delta e_j`. The complement is spanned by
//! `e_k - (a_ik / a_ij) e_j` for `k != i, j`, on which delta acts by
//! `a_lk - a_lj a_ik / a_ij`. Each split lowers the residue rank by one, so
//! peeling reaches the empty matrix exactly when the residue rank is `s/2`.

use super::{is_acyclic, Acyclicity, DiffModule};
use crate::error::{Error, Result};
use crate::field::{rank, Field, Mat};
use crate::ring::snf::{smith_int, IntMat};
use crate::ring::{prime_power_base, Ring, RingElem, RingMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum Contractibility {
    Yes(StandardBasis),
    No {
        reasons: Vec<String>,
        acyclic: Option<Acyclicity>,
        residue_rank: Option<usize>,
    },
}

impl Contractibility {
    pub fn is_yes(&self) -> bool {
        matches!(self, Contractibility::Yes(_))
    }
}

/// `[[0, 1_r], [0, 0]]`.
pub fn standard_form_matrix(ring: &Ring, r: usize) -> RingMatrix {
    let mut m = RingMatrix::zeros(ring, 2 * r, 2 * r);
    for i in 0..r {
        m.set(i, r + i, ring.one());
    }
    m
}

fn check_local(ring: &Ring) -> Result<()> {
    if let Some(n) = ring.modulus() {
        if prime_power_base(n).is_none() {
            return Err(Error::UnsupportedBackend(format!(
                "Z/{n} is not local: {n} has several prime factors"
            )));
        }
    }
    if ring.is_graded() && !ring.is_local_flag() {
        return Err(Error::UnsupportedBackend(format!(
            "{} is not marked local; append !local to work at the irrelevant ideal",
            ring.spec()
        )));
    }
    Ok(())
}

/// Rank of `delta` reduced modulo the maximal ideal of a local ring.
pub fn residue_rank(d: &DiffModule) -> Result<usize> {
    let ring = d.ring();
    check_local(ring)?;
    let k = ring
        .residue_field()
        .ok_or_else(|| Error::UnsupportedBackend(format!("{} is not a local ring", ring.spec())))?;
    let s = d.size();
    let mut m = Mat::filled(s, s, k.zero());
    for i in 0..s {
        for j in 0..s {
            m.set(i, j, ring.residue(d.delta().get(i, j)).expect("local ring"));
        }
    }
    Ok(rank(&k, &m))
}

/// A basis change to standard form: `conjugator * delta * inverse` is
/// `[[0, 1_r], [0, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardBasis {
    pub conjugator: RingMatrix,
    pub inverse: RingMatrix,
}

fn rows_to_matrix(ring: &Ring, rows: Vec<Vec<RingElem>>, s: usize) -> RingMatrix {
    let mut m = RingMatrix::zeros(ring, rows.len(), s);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

fn axpy(ring: &Ring, y: &[RingElem], c: &RingElem, x: &[RingElem]) -> Vec<RingElem> {
    if ring.is_zero(c) {
        return y.to_vec();
    }
    y.iter()
        .zip(x)
        .map(|(a, b)| ring.add(a, &ring.mul(c, b)))
        .collect()
}

/// Peels unit pivots off `delta` over a local ring, or returns `None` when
/// a remainder without unit entries is left over.
///
/// Both the basis (columns of `inverse`) and the coordinate functionals
/// (rows of `conjugator`) are tracked, so nothing is ever inverted; over a
/// graded ring a unimodular matrix need not admit constant pivots.
pub fn peel_to_standard_form(d: &DiffModule) -> Result<Option<StandardBasis>> {
    let ring = d.ring();
    check_local(ring)?;
    let k = ring
        .residue_field()
        .ok_or_else(|| Error::UnsupportedBackend(format!("{} is not a local ring", ring.spec())))?;
    let s = d.size();
    let unit = |a: &RingElem| ring.residue(a).is_some_and(|r| !k.is_zero(&r));
    let e = |i: usize| -> Vec<RingElem> {
        (0..s)
            .map(|j| if i == j { ring.one() } else { ring.zero() })
            .collect()
    };
    let mut a = d.delta().clone();
    // basis[l] in original coordinates; coords[l] is the functional reading
    // off the coefficient of basis[l].
    let mut basis: Vec<Vec<RingElem>> = (0..s).map(e).collect();
    let mut coords: Vec<Vec<RingElem>> = (0..s).map(e).collect();
    let (mut vs, mut ws, mut v_rows, mut w_rows) = (vec![], vec![], vec![], vec![]);
    while a.rows() > 0 {
        let m = a.rows();
        let candidates: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && unit(a.get(i, j)))
            .collect();
        let Some(&first) = candidates.first() else {
            return Ok(None);
        };
        let Some((i, j, inv)) = candidates
            .iter()
            .find_map(|&(i, j)| ring.inverse(a.get(i, j)).map(|inv| (i, j, inv)))
        else {
            return Err(Error::Precondition(format!(
                "pivot {} is a unit of the local ring but not of the polynomial ring",
                ring.fmt_elem(a.get(first.0, first.1))
            )));
        };
        let mut v = vec![ring.zero(); s];
        for l in 0..m {
            v = axpy(ring, &v, a.get(l, j), &basis[l]);
        }
        vs.push(v);
        ws.push(basis[j].clone());
        v_rows.push(
            coords[i]
                .iter()
                .map(|c| ring.mul(&inv, c))
                .collect::<Vec<_>>(),
        );

        let keep: Vec<usize> = (0..m).filter(|&l| l != i && l != j).collect();
        let t: Vec<RingElem> = (0..m).map(|l| ring.mul(&inv, a.get(i, l))).collect();
        let shifted: Vec<Vec<RingElem>> = (0..m)
            .map(|l| {
                let c = ring.neg(&ring.mul(&inv, a.get(l, j)));
                axpy(ring, &coords[l], &c, &coords[i])
            })
            .collect();
        let mut w_row = shifted[j].clone();
        for &l in &keep {
            w_row = axpy(ring, &w_row, &t[l], &shifted[l]);
        }
        w_rows.push(w_row);

        let mut next = RingMatrix::zeros(ring, keep.len(), keep.len());
        for (kk, &c) in keep.iter().enumerate() {
            for (ll, &l) in keep.iter().enumerate() {
                next.set(ll, kk, ring.sub(a.get(l, c), &ring.mul(a.get(l, j), &t[c])));
            }
        }
        basis = keep
            .iter()
            .map(|&l| axpy(ring, &basis[l], &ring.neg(&t[l]), &basis[j]))
            .collect();
        coords = keep.iter().map(|&l| shifted[l].clone()).collect();
        a = next;
    }
    let conjugator = rows_to_matrix(ring, v_rows.into_iter().chain(w_rows).collect(), s);
    let inverse = rows_to_matrix(ring, vs.into_iter().chain(ws).collect(), s).transpose();
    debug_assert_eq!(conjugator.mul(&inverse)?, RingMatrix::identity(ring, s));
    debug_assert_eq!(
        conjugator.mul(d.delta())?.mul(&inverse)?,
        standard_form_matrix(ring, s / 2)
    );
    Ok(Some(StandardBasis {
        conjugator,
        inverse,
    }))
}

/// Over `Z`: Smith form `U delta V = S`; when every nonzero invariant factor
/// is a unit and there are `s/2` of them, the columns `V e_t` and their
/// images form a basis in which delta is standard.
pub(crate) fn integer_standard_form(d: &DiffModule) -> Result<Option<StandardBasis>> {
    let ring = d.ring();
    let s = d.size();
    if s % 2 == 1 {
        return Ok(None);
    }
    let sm = smith_int(&IntMat::from_ring_matrix(d.delta()), None);
    let r = sm.rank;
    if r != s / 2
        || sm.diagonal()[..r]
            .iter()
            .any(|c| c.magnitude() != &num_bigint::BigUint::from(1u8))
    {
        return Ok(None);
    }
    let v = sm.v.to_ring_matrix(ring);
    let ws: Vec<Vec<RingElem>> = (0..r).map(|t| v.column(t)).collect();
    let vs: Vec<Vec<RingElem>> = (0..r)
        .map(|t| {
            let wt = RingMatrix::from_rows(ring, ws[t].iter().map(|x| vec![x.clone()]).collect())?;
            Ok(d.delta().mul(&wt)?.column(0))
        })
        .collect::<Result<_>>()?;
    let inverse = rows_to_matrix(ring, vs.into_iter().chain(ws).collect(), s).transpose();
    let conjugator = if s == 0 {
        inverse.clone()
    } else {
        inverse.inverse()?
    };
    Ok(Some(StandardBasis {
        conjugator,
        inverse,
    }))
}

/// Decides whether `D` is contractible: acyclic with residue rank `s/2`
/// over local rings, acyclic over `Z`. The cutoff is used only to report
/// acyclicity over graded rings.
pub fn is_contractible(d: &DiffModule, cutoff: Option<i64>) -> Result<Contractibility> {
    let ring = d.ring();
    let s = d.size();
    if ring.is_integers() {
        let acyclic = is_acyclic(d, None)?;
        return Ok(match integer_standard_form(d)? {
            Some(b) => Contractibility::Yes(b),
            None => Contractibility::No {
                reasons: vec![if acyclic == Acyclicity::No {
                    "not acyclic".to_string()
                } else {
                    "image of delta is not a direct summand".to_string()
                }],
                acyclic: Some(acyclic),
                residue_rank: None,
            },
        });
    }
    check_local(ring)?;
    let rr = residue_rank(d)?;
    if 2 * rr == s {
        let u = peel_to_standard_form(d)?.expect("full residue rank peels completely");
        return Ok(Contractibility::Yes(u));
    }
    let acyclic = if ring.is_graded() && cutoff.is_none() {
        None
    } else {
        Some(is_acyclic(d, cutoff)?)
    };
    let mut reasons = Vec::new();
    match acyclic {
        Some(Acyclicity::No) => reasons.push("not acyclic".to_string()),
        None => reasons.push("acyclicity not computed (no cutoff)".to_string()),
        _ => {}
    }
    if s % 2 == 1 {
        reasons.push(format!("odd size {s}: residue rank {rr} cannot equal s/2"));
    } else {
        reasons.push(format!("residue rank {rr} != s/2 = {}", s / 2));
    }
    Ok(Contractibility::No {
        reasons,
        acyclic,
        residue_rank: Some(rr),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::Grading;

    fn module(ring: &Ring, rows: &[&[&str]]) -> DiffModule {
        DiffModule::new(RingMatrix::parse(ring, rows).unwrap(), None).unwrap()
    }

    #[test]
    fn standard_form_is_contractible() {
        let r = Ring::rationals();
        let d = module(&r, &[&["0", "1"], &["0", "0"]]);
        match is_contractible(&d, None).unwrap() {
            Contractibility::Yes(b) => {
                assert_eq!(b.conjugator, RingMatrix::identity(&r, 2))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dold_module_is_not_contractible() {
        let r = Ring::integers_mod(4).unwrap();
        let d = module(&r, &[&["2"]]);
        match is_contractible(&d, None).unwrap() {
            Contractibility::No {
                acyclic,
                residue_rank,
                ..
            } => {
                assert_eq!(acyclic, Some(Acyclicity::Yes));
                assert_eq!(residue_rank, Some(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn normal_example_is_not_contractible() {
        let r = Ring::from_notation("Q[x,y,z]/(x^2 + y*z) !local").unwrap();
        let d = DiffModule::new(
            RingMatrix::parse(&r, &[&["x", "y"], &["z", "-x"]]).unwrap(),
            Some(Grading::flat(2, 1)),
        )
        .unwrap();
        match is_contractible(&d, Some(6)).unwrap() {
            Contractibility::No {
                acyclic,
                residue_rank,
                ..
            } => {
                assert_eq!(acyclic, Some(Acyclicity::YesUpToCutoff(6)));
                assert_eq!(residue_rank, Some(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn peeling_a_scrambled_standard_form() {
        let r = Ring::integers_mod(9).unwrap();
        let std = standard_form_matrix(&r, 2);
        let p = RingMatrix::from_i64(
            &r,
            &[&[1, 3, 0, 2], &[0, 1, 4, 0], &[5, 0, 1, 3], &[0, 0, 0, 1]],
        );
        let a = p.mul(&std).unwrap().mul(&p.inverse().unwrap()).unwrap();
        let d = DiffModule::new(a.clone(), None).unwrap();
        let Contractibility::Yes(b) = is_contractible(&d, None).unwrap() else {
            panic!("contractible by construction")
        };
        assert_eq!(b.conjugator.mul(&a).unwrap().mul(&b.inverse).unwrap(), std);
    }

    #[test]
    fn peeling_over_a_graded_local_ring() {
        let r = Ring::from_notation("Q[x,y] !local").unwrap();
        let std = standard_form_matrix(&r, 2);
        let p = RingMatrix::parse(
            &r,
            &[
                &["1", "x", "0", "0"],
                &["0", "1", "0", "0"],
                &["y", "0", "1", "0"],
                &["0", "0", "x^2", "1"],
            ],
        )
        .unwrap();
        let a = p.mul(&std).unwrap().mul(&p.inverse().unwrap()).unwrap();
        let d = DiffModule::new(a.clone(), None).unwrap();
        let b = peel_to_standard_form(&d)
            .unwrap()
            .expect("contractible by construction");
        assert_eq!(
            b.conjugator.mul(&b.inverse).unwrap(),
            RingMatrix::identity(&r, 4)
        );
        assert_eq!(b.conjugator.mul(&a).unwrap().mul(&b.inverse).unwrap(), std);
    }

    #[test]
    fn integer_contractibility() {
        let z = Ring::integers();
        let d = module(&z, &[&["2", "-4"], &["1", "-2"]]);
        let Contractibility::Yes(b) = is_contractible(&d, None).unwrap() else {
            panic!("[[2,-4],[1,-2]] has image = kernel = Z(2,1)")
        };
        let conj = b
            .conjugator
            .mul(d.delta())
            .unwrap()
            .mul(&b.inverse)
            .unwrap();
        assert_eq!(conj, standard_form_matrix(&z, 1));
        let twice = module(&z, &[&["0", "2"], &["0", "0"]]);
        assert!(!is_contractible(&twice, None).unwrap().is_yes());
    }

    #[test]
    fn non_local_modulus_is_rejected() {
        let r = Ring::integers_mod(6).unwrap();
        let d = module(&r, &[&["0", "1"], &["0", "0"]]);
        assert!(matches!(
            is_contractible(&d, None),
            Err(Error::UnsupportedBackend(_))
        ));
    }
}

//! Homology `Ker / Im` of differential modules and complexes.
//!
//! Everything reduces to a composable pair `f : A -> B`, `g : B -> C` with
//! `g f = 0` and the quotient `ker g / im f`. Fields and graded rings go
//! through degreewise linear algebra; `Z` and `Z/n` through Smith forms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::linear::{to_field_mat, GradedModel};
use super::{DiffModule, FreeComplex};
use crate::error::{Error, Result};
use crate::field::{nullspace, rank, Echelon, Field};
use crate::ring::poly::monomials_of_degree;
use crate::ring::snf::{smith_int, IntMat};
use crate::ring::{BaseField, Ring, RingElem, RingMatrix, Scalar};

/// Graded homology truncated at a cutoff degree.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedHomology {
    /// `dim_k H_d` for every degree from the lowest generator degree up to
    /// the cutoff.
    pub hilbert: BTreeMap<i64, usize>,
    pub cutoff: i64,
    /// Minimal monomials, then supplied elements, verified to annihilate
    /// `H` in every degree the table covers.
    pub annihilator: Vec<RingElem>,
    /// Supplied candidates that failed verification.
    pub rejected: Vec<RingElem>,
}

impl GradedHomology {
    pub fn is_zero(&self) -> bool {
        self.hilbert.values().all(|&v| v == 0)
    }

    pub fn total(&self) -> usize {
        self.hilbert.values().sum()
    }

    /// Finite length as far as the table can tell: the two top degrees
    /// vanish.
    pub fn finite_length_detected(&self) -> bool {
        self.hilbert.range(self.cutoff - 1..).all(|(_, &v)| v == 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HomologyPresentation {
    /// Homology over a field: total dimension, and per generator degree
    /// when the module is graded.
    Field {
        dim: usize,
        by_degree: Option<BTreeMap<i64, usize>>,
    },
    /// Invariant factors over `Z`; `0` stands for a free summand.
    Integers {
        invariant_factors: Vec<BigInt>,
    },
    /// `H = (+) Z/c_i` over `Z/n`.
    IntegersMod {
        modulus: u64,
        invariant_factors: Vec<BigInt>,
    },
    Graded(GradedHomology),
}

impl HomologyPresentation {
    pub fn is_zero(&self) -> bool {
        match self {
            HomologyPresentation::Field { dim, .. } => *dim == 0,
            HomologyPresentation::Integers { invariant_factors }
            | HomologyPresentation::IntegersMod {
                invariant_factors, ..
            } => invariant_factors.is_empty(),
            HomologyPresentation::Graded(g) => g.is_zero(),
        }
    }

    pub fn graded(&self) -> Option<&GradedHomology> {
        match self {
            HomologyPresentation::Graded(g) => Some(g),
            _ => None,
        }
    }

    pub fn field_dim(&self) -> Option<usize> {
        match self {
            HomologyPresentation::Field { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    /// Rank over `Z`, the number of free summands.
    pub fn free_rank(&self) -> Option<usize> {
        match self {
            HomologyPresentation::Integers { invariant_factors } => {
                Some(invariant_factors.iter().filter(|c| c.is_zero()).count())
            }
            _ => None,
        }
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        let strs = |v: &[BigInt]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        match self {
            HomologyPresentation::Field { dim, by_degree } => {
                let mut out = json!({"backend": "field", "dims": dim});
                if let Some(t) = by_degree {
                    out["dims_by_degree"] = table_json(t);
                }
                out
            }
            HomologyPresentation::Integers { invariant_factors } => {
                json!({"backend": "integers", "invariant_factors": strs(invariant_factors)})
            }
            HomologyPresentation::IntegersMod {
                modulus,
                invariant_factors,
            } => json!({
                "backend": "integers-mod",
                "modulus": modulus,
                "invariant_factors": strs(invariant_factors),
            }),
            HomologyPresentation::Graded(g) => json!({
                "backend": "graded",
                "hilbert": table_json(&g.hilbert),
                "cutoff": g.cutoff,
                "annihilator_verified": g.annihilator.iter().map(|a| ring.fmt_elem(a)).collect::<Vec<_>>(),
                "annihilator_rejected": g.rejected.iter().map(|a| ring.fmt_elem(a)).collect::<Vec<_>>(),
                "annihilator_scope": "verified-up-to-cutoff",
                "finite_length_detected": g.finite_length_detected(),
            }),
        }
    }
}

fn table_json(t: &BTreeMap<i64, usize>) -> Value {
    Value::Object(t.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acyclicity {
    Yes,
    No,
    YesUpToCutoff(i64),
}

/// Generator degrees of the source, middle and target of a graded pair.
struct PairDegrees {
    src: Vec<i64>,
    mid: Vec<i64>,
    tgt: Vec<i64>,
}

fn module_pair_degrees(d: &DiffModule) -> Result<Option<PairDegrees>> {
    let ring = d.ring();
    let grading = if ring.is_graded() {
        Some(d.grading_or_inferred().ok_or_else(|| {
            Error::Precondition("entries are not homogeneous for any grading".into())
        })?)
    } else {
        d.grading().cloned()
    };
    Ok(grading.map(|g| {
        let w = g.differential_degree;
        let mid = g.generator_degrees;
        PairDegrees {
            src: mid.iter().map(|x| x + w).collect(),
            tgt: mid.iter().map(|x| x - w).collect(),
            mid,
        }
    }))
}

/// Homology of `D`. Graded rings need a cutoff.
pub fn homology(d: &DiffModule, cutoff: Option<i64>) -> Result<HomologyPresentation> {
    homology_with(d, cutoff, &[])
}

/// Like [`homology`], additionally verifying the supplied annihilator
/// candidates (graded rings only).
pub fn homology_with(
    d: &DiffModule,
    cutoff: Option<i64>,
    candidates: &[RingElem],
) -> Result<HomologyPresentation> {
    let degrees = module_pair_degrees(d)?;
    pair_homology(d.delta(), d.delta(), degrees, cutoff, candidates)
}

pub fn is_acyclic(d: &DiffModule, cutoff: Option<i64>) -> Result<Acyclicity> {
    let h = homology(d, cutoff)?;
    Ok(match (&h, h.is_zero()) {
        (_, false) => Acyclicity::No,
        (HomologyPresentation::Graded(g), true) => Acyclicity::YesUpToCutoff(g.cutoff),
        (_, true) => Acyclicity::Yes,
    })
}

/// Hilbert table `d -> dim H_d` up to the cutoff, without annihilator data.
pub fn hilbert_table(d: &DiffModule, cutoff: i64) -> Result<BTreeMap<i64, usize>> {
    let pd = module_pair_degrees(d)?
        .ok_or_else(|| Error::Precondition("Hilbert tables need a graded module".into()))?;
    let model = GradedModel::new(d.ring())?;
    let lo = pd.mid.iter().copied().min().unwrap_or(0);
    Ok((lo..=cutoff)
        .map(|k| (k, degree_homology(&model, d.delta(), d.delta(), &pd, k).h))
        .collect())
}

/// `dim H_k` of a graded module.
pub fn hilbert_at(d: &DiffModule, k: i64) -> Result<usize> {
    let pd = module_pair_degrees(d)?
        .ok_or_else(|| Error::Precondition("Hilbert tables need a graded module".into()))?;
    let model = GradedModel::new(d.ring())?;
    Ok(degree_homology(&model, d.delta(), d.delta(), &pd, k).h)
}

/// `H_n(X) = ker d_n / im d_{n+1}`.
pub fn complex_homology(
    x: &FreeComplex,
    n: i64,
    cutoff: Option<i64>,
) -> Result<HomologyPresentation> {
    let f = x.differential(n + 1);
    let g = x.differential(n);
    let degrees = match x.internal_degrees() {
        Some(_) => Some(PairDegrees {
            src: x.degrees_at(n + 1).expect("graded"),
            mid: x.degrees_at(n).expect("graded"),
            tgt: x.degrees_at(n - 1).expect("graded"),
        }),
        None if x.ring().is_graded() => {
            return Err(Error::Precondition(
                "a complex over a graded ring needs internal degrees".into(),
            ))
        }
        None => None,
    };
    pair_homology(&f, &g, degrees, cutoff, &[])
}

fn pair_homology(
    f: &RingMatrix,
    g: &RingMatrix,
    degrees: Option<PairDegrees>,
    cutoff: Option<i64>,
    candidates: &[RingElem],
) -> Result<HomologyPresentation> {
    let ring = g.ring();
    if let Some(k) = ring.as_field() {
        let dim = field_pair_dim(&k, f, g);
        let by_degree = degrees.map(|pd| {
            let model = GradedModel::new(ring).expect("field");
            let mut ks: Vec<i64> = pd.mid.clone();
            ks.sort_unstable();
            ks.dedup();
            ks.into_iter()
                .map(|k| (k, degree_homology(&model, f, g, &pd, k).h))
                .collect()
        });
        return Ok(HomologyPresentation::Field { dim, by_degree });
    }
    if ring.is_integers() {
        return Ok(HomologyPresentation::Integers {
            invariant_factors: integer_pair_factors(f, g),
        });
    }
    if let Some(n) = ring.modulus() {
        return Ok(HomologyPresentation::IntegersMod {
            modulus: n,
            invariant_factors: modular_pair_factors(f, g, n),
        });
    }
    let cutoff = cutoff.ok_or(Error::CutoffMissing)?;
    let pd = degrees.expect("graded rings always carry degrees");
    if let Some(&max) = pd.mid.iter().max() {
        if cutoff < max {
            return Err(Error::CutoffTooSmall {
                cutoff,
                max_degree: max,
            });
        }
    }
    Ok(HomologyPresentation::Graded(graded_pair_homology(
        f, g, &pd, cutoff, candidates,
    )?))
}

fn field_pair_dim(k: &BaseField, f: &RingMatrix, g: &RingMatrix) -> usize {
    let n = g.cols();
    n - rank(k, &to_field_mat(k, g)) - rank(k, &to_field_mat(k, f))
}

struct DegreeHomology {
    kernel: Vec<Vec<Scalar>>,
    image: Echelon<BaseField>,
    h: usize,
}

fn degree_homology(
    model: &GradedModel,
    f: &RingMatrix,
    g: &RingMatrix,
    pd: &PairDegrees,
    k: i64,
) -> DegreeHomology {
    let base = model.base();
    let gk = model.map_at(g, &pd.mid, &pd.tgt, k);
    let kernel = if gk.rows == 0 {
        (0..gk.cols)
            .map(|i| {
                let mut v = vec![base.zero(); gk.cols];
                v[i] = base.one();
                v
            })
            .collect()
    } else {
        nullspace(base, &gk)
    };
    let fk = model.map_at(f, &pd.src, &pd.mid, k);
    let cols: Vec<Vec<Scalar>> = (0..fk.cols).map(|c| fk.column(c)).collect();
    let image = Echelon::from_vectors(base, fk.rows, &cols);
    let h = kernel.len() - image.rank();
    DegreeHomology { kernel, image, h }
}

fn graded_pair_homology(
    f: &RingMatrix,
    g: &RingMatrix,
    pd: &PairDegrees,
    cutoff: i64,
    candidates: &[RingElem],
) -> Result<GradedHomology> {
    let ring = g.ring();
    let model = GradedModel::new(ring)?;
    let Some(&lo) = pd.mid.iter().min() else {
        return Ok(GradedHomology {
            hilbert: BTreeMap::new(),
            cutoff,
            annihilator: vec![ring.one()],
            rejected: Vec::new(),
        });
    };
    let data: BTreeMap<i64, DegreeHomology> = (lo..=cutoff)
        .map(|k| (k, degree_homology(&model, f, g, pd, k)))
        .collect();
    let hilbert: BTreeMap<i64, usize> = data.iter().map(|(&k, d)| (k, d.h)).collect();

    let annihilates = |c: &RingElem, e: i64| -> bool {
        data.iter().all(|(&k, dk)| {
            // products past the cutoff are not tabulated
            if k + e > cutoff {
                return true;
            }
            let target = &data[&(k + e)].image;
            dk.kernel
                .iter()
                .all(|z| target.contains(&model.scale_vector(c, e, &pd.mid, k, z)))
        })
    };

    let gd = ring.graded().expect("graded ring");
    let mut verified_monomials = Vec::new();
    let mut annihilator = Vec::new();
    for e in 0..=(cutoff - lo) {
        for m in monomials_of_degree(gd.nvars(), e as u32) {
            if verified_monomials
                .iter()
                .any(|v: &crate::ring::Monomial| v.divides(&m))
            {
                continue;
            }
            let c = ring.monomial(&m);
            if ring.is_zero(&c) {
                continue;
            }
            if annihilates(&c, e) {
                verified_monomials.push(m);
                annihilator.push(c);
            }
        }
    }
    let mut rejected = Vec::new();
    for c in candidates {
        if ring.is_zero(c) || annihilator.contains(c) {
            continue;
        }
        let p = ring.as_poly(c);
        let mut degs: Vec<u32> = p.terms.iter().map(|(m, _)| m.degree()).collect();
        degs.dedup();
        let ok = degs.into_iter().all(|e| {
            let comp = RingElem::Poly(gd.reduce(&p.component(e)));
            ring.is_zero(&comp) || annihilates(&comp, i64::from(e))
        });
        if ok {
            annihilator.push(c.clone());
        } else {
            rejected.push(c.clone());
        }
    }
    Ok(GradedHomology {
        hilbert,
        cutoff,
        annihilator,
        rejected,
    })
}

fn lift(m: &RingMatrix) -> IntMat {
    IntMat::from_ring_matrix(m)
}

fn unimodular_inverse(m: &IntMat) -> IntMat {
    let z = Ring::integers();
    let inv = m.to_ring_matrix(&z).inverse().expect("unimodular");
    IntMat::from_ring_matrix(&inv)
}

/// Nonzero diagonal of a Smith form, with units dropped and the rest
/// made positive.
fn torsion_factors(s: &IntMat, rank: usize) -> Vec<BigInt> {
    (0..rank)
        .map(|i| s.get(i, i).abs())
        .filter(|c| !c.is_one())
        .collect()
}

fn integer_pair_factors(f: &RingMatrix, g: &RingMatrix) -> Vec<BigInt> {
    let n = g.cols();
    let sg = smith_int(&lift(g), None);
    let r = sg.rank;
    // ker g is spanned by the last n - r columns of V; im f sits inside it
    let vinv = unimodular_inverse(&sg.v);
    let vf = vinv.mul(&lift(f));
    let mut c = IntMat::zeros(n - r, f.cols());
    for i in r..n {
        for j in 0..f.cols() {
            c.set(i - r, j, vf.get(i, j).clone());
        }
    }
    let sc = smith_int(&c, None);
    let mut out = torsion_factors(&sc.s, sc.rank);
    out.extend(std::iter::repeat_n(BigInt::zero(), n - r - sc.rank));
    out
}

fn modular_pair_factors(f: &RingMatrix, g: &RingMatrix, modulus: u64) -> Vec<BigInt> {
    let n = g.cols();
    let b = g.rows();
    let nn = BigInt::from(modulus);
    // Z = {x in Z^n : g x = 0 mod n} is the projection of ker [g | n I]
    let gl = lift(g);
    let mut m = IntMat::zeros(b, n + b);
    for i in 0..b {
        for j in 0..n {
            m.set(i, j, gl.get(i, j).clone());
        }
        m.set(i, n + i, nn.clone());
    }
    let sm = smith_int(&m, None);
    let kernel_cols: Vec<Vec<BigInt>> = (sm.rank..n + b)
        .map(|c| sm.v.column(c)[..n].to_vec())
        .collect();
    let p = IntMat::from_columns(n, &kernel_cols);
    // basis of Z: columns of U2^-1 scaled by the diagonal of S2
    let sp = smith_int(&p, None);
    debug_assert_eq!(sp.rank, n);
    let diag = sp.diagonal();
    // B = im f + n Z^n, in coordinates of that basis
    let fl = lift(f);
    let mut gens: Vec<Vec<BigInt>> = (0..f.cols()).map(|c| fl.column(c)).collect();
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[i] = nn.clone();
        gens.push(v);
    }
    let mut coords = IntMat::zeros(n, gens.len());
    for (j, v) in gens.iter().enumerate() {
        let uv = sp.u.mul(&IntMat::from_columns(n, std::slice::from_ref(v)));
        for i in 0..n {
            let (q, r) = uv.get(i, 0).div_rem(&diag[i]);
            debug_assert!(r.is_zero(), "generator of B outside Z");
            coords.set(i, j, q);
        }
    }
    let sc = smith_int(&coords, None);
    torsion_factors(&sc.s, sc.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{compress, expand, koszul_complex, Grading};

    fn module(ring: &Ring, rows: &[&[&str]], grading: Option<Grading>) -> DiffModule {
        DiffModule::new(RingMatrix::parse(ring, rows).unwrap(), grading).unwrap()
    }

    #[test]
    fn dold_module_is_acyclic() {
        let r = Ring::integers_mod(4).unwrap();
        let d = module(&r, &[&["2"]], None);
        let h = homology(&d, None).unwrap();
        assert!(h.is_zero());
        assert_eq!(is_acyclic(&d, None).unwrap(), Acyclicity::Yes);
    }

    #[test]
    fn modular_homology_with_torsion() {
        // (Z/8, 4): ker = (2), im = (4), H = Z/2
        let r = Ring::integers_mod(8).unwrap();
        let d = module(&r, &[&["4"]], None);
        assert_eq!(
            homology(&d, None).unwrap(),
            HomologyPresentation::IntegersMod {
                modulus: 8,
                invariant_factors: vec![BigInt::from(2)]
            }
        );
    }

    #[test]
    fn integer_homology() {
        // [[0, 2], [0, 0]] over Z: ker = Z e1, im = 2Z e1, H = Z/2
        let z = Ring::integers();
        let d = module(&z, &[&["0", "2"], &["0", "0"]], None);
        assert_eq!(
            homology(&d, None).unwrap(),
            HomologyPresentation::Integers {
                invariant_factors: vec![BigInt::from(2)]
            }
        );
        let zero = DiffModule::zero(&z, 2);
        assert_eq!(homology(&zero, None).unwrap().free_rank(), Some(2));
    }

    #[test]
    fn normal_example_is_acyclic_up_to_cutoff() {
        let r = Ring::from_notation("Q[x,y,z]/(x^2 + y*z)").unwrap();
        let d = module(&r, &[&["x", "y"], &["z", "-x"]], Some(Grading::flat(2, 1)));
        assert_eq!(
            is_acyclic(&d, Some(8)).unwrap(),
            Acyclicity::YesUpToCutoff(8)
        );
        assert!(matches!(homology(&d, None), Err(Error::CutoffMissing)));
    }

    #[test]
    fn notaflag_table_and_annihilator() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let d = module(&r, &[&["x*y", "-x^2"], &["y^2", "-x*y"]], None);
        let h = homology(&d, Some(8)).unwrap();
        let g = h.graded().unwrap();
        let mut expected: BTreeMap<i64, usize> = (0..=8).map(|k| (k, 0)).collect();
        expected.insert(1, 1);
        assert_eq!(g.hilbert, expected);
        assert_eq!(g.annihilator, vec![r.var(0), r.var(1)]);
        assert!(g.finite_length_detected());
    }

    #[test]
    fn supplied_candidates_are_checked() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let d = module(&r, &[&["x*y", "-x^2"], &["y^2", "-x*y"]], None);
        let cands = [r.parse("x + y").unwrap(), r.parse("1 + x").unwrap()];
        let g = homology_with(&d, Some(6), &cands).unwrap();
        let g = g.graded().unwrap();
        assert!(g.annihilator.contains(&cands[0]));
        assert_eq!(g.rejected, vec![cands[1].clone()]);
    }

    #[test]
    fn koszul_homology_is_the_residue_field() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let d = compress(&koszul_complex(&r, &[r.var(0), r.var(1)]).unwrap());
        let g = homology(&d, Some(6)).unwrap().graded().unwrap().clone();
        assert_eq!(g.total(), 1);
        assert_eq!(g.hilbert[&0], 1);
    }

    #[test]
    fn expansion_interior_matches() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let d = module(
            &r,
            &[&["x*y", "-x^2"], &["y^2", "-x*y"]],
            Some(Grading::flat(2, 2)),
        );
        let x = expand(&d, 0, 3).unwrap();
        let hd = homology(&d, Some(8)).unwrap();
        for n in 1..3 {
            let hn = complex_homology(&x, n, Some(8 + 2 * n)).unwrap();
            let shifted: BTreeMap<i64, usize> = hn
                .graded()
                .unwrap()
                .hilbert
                .iter()
                .map(|(k, v)| (k - 2 * n, *v))
                .filter(|(k, _)| *k >= 0)
                .collect();
            assert_eq!(shifted, hd.graded().unwrap().hilbert);
        }
    }

    #[test]
    fn cutoff_below_generators() {
        let r = Ring::from_notation("Q[x]").unwrap();
        let d =
            DiffModule::new(RingMatrix::zeros(&r, 1, 1), Some(Grading::new(vec![3], 0))).unwrap();
        assert!(matches!(
            homology(&d, Some(2)),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}

//! The spectral sequence of a flag, computed degreewise over the base field.
//!
//! With `Z^r_i = {x in F^i : delta x in F^{i-r}}` the `r`th page is
//! `E^r_i = Z^r_i / (Z^{r-1}_{i-1} + delta Z^{r-1}_{i+r-1})` and
//! `d^r : E^r_i -> E^r_{i-r}` is induced by delta. Every page is rebuilt
//! from delta on representatives; nothing is composed symbolically.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{mat_vec, nullspace, solve, Echelon, Field, Mat};
use crate::flags::{verify_certificate, FlagCertificate};
use crate::module::linear::GradedModel;
use crate::module::{hilbert_table, homology, infer_grading, DiffModule, Grading};
use crate::ring::{BaseField, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTerm {
    pub i: usize,
    /// Dimension per internal degree (degree 0 only over a field).
    pub dims: BTreeMap<i64, usize>,
    pub stable: bool,
}

impl SpectralTerm {
    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }
}

/// `d^r : E^r_source -> E^r_target` on the chosen representatives, one
/// matrix per source degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PageDifferential {
    pub source: usize,
    pub target: usize,
    pub by_degree: BTreeMap<i64, Mat<Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPage {
    pub r: usize,
    pub terms: Vec<SpectralTerm>,
    pub differentials: Vec<PageDifferential>,
    pub cutoff: Option<i64>,
}

impl SpectralPage {
    pub fn stable(&self) -> bool {
        self.terms.iter().all(|t| t.stable)
    }

    pub fn to_json(&self, base: &BaseField) -> Value {
        let presentation = |t: &SpectralTerm| match self.cutoff {
            Some(c) => json!({
                "hilbert": t.dims.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
                "cutoff": c,
            }),
            None => json!({"dim": t.total()}),
        };
        json!({
            "r": self.r,
            "stable": self.stable(),
            "terms": self.terms.iter().map(|t| json!({
                "i": t.i,
                "presentation": presentation(t),
                "stable": t.stable,
            })).collect::<Vec<_>>(),
            "differentials": self.differentials.iter().map(|d| json!({
                "from": d.source,
                "to": d.target,
                "matrices": d.by_degree.iter().map(|(k, m)| (k.to_string(), json!(
                    (0..m.rows).map(|r| (0..m.cols).map(|c| base.fmt_scalar(m.get(r, c))).collect::<Vec<_>>()).collect::<Vec<_>>()
                ))).collect::<serde_json::Map<_, _>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Degree-`k` data of the conjugated module.
struct Slice {
    dim: usize,
    /// `prefix[i]` = dimension of `F^i` in this degree, `i = 0..=l`.
    prefix: Vec<usize>,
    /// `delta : D_k -> D_{k+w}`.
    delta: Mat<Scalar>,
}

struct Setup {
    k: BaseField,
    l: usize,
    w: i64,
    slices: HashMap<i64, Slice>,
    degrees: Vec<i64>,
    cutoff: Option<i64>,
    zero_delta: bool,
}

impl Setup {
    fn new(d: &DiffModule, flag: &FlagCertificate, cutoff: Option<i64>) -> Result<Setup> {
        verify_certificate(d, flag)?;
        let ring = d.ring();
        let model = GradedModel::new(ring)?;
        let a = flag.conjugate(d.delta())?;
        let grading = if ring.is_graded() {
            let g = match (&flag.conjugator, d.grading_or_inferred()) {
                (None, Some(g)) => Some(g),
                _ => infer_grading(&a),
            };
            Some(g.ok_or_else(|| {
                Error::Precondition(
                    "spectral pages over a graded ring need a homogeneous flag basis".into(),
                )
            })?)
        } else {
            None
        };
        let (gens, w) = match &grading {
            Some(Grading {
                generator_degrees,
                differential_degree,
            }) => (generator_degrees.clone(), *differential_degree),
            None => (vec![0; d.size()], 0),
        };
        let degrees: Vec<i64> = match (&grading, cutoff) {
            (None, _) => vec![0],
            (Some(_), None) => return Err(Error::CutoffMissing),
            (Some(_), Some(c)) => {
                let lo = gens.iter().copied().min().unwrap_or(0);
                let hi = gens.iter().copied().max().unwrap_or(0);
                if c < hi {
                    return Err(Error::CutoffTooSmall {
                        cutoff: c,
                        max_degree: hi,
                    });
                }
                (lo..=c).collect()
            }
        };
        let tgt: Vec<i64> = gens.iter().map(|g| g - w).collect();
        let mut slices = HashMap::new();
        // targets of d^r sit in degree k + w and their cycles look one
        // step further
        let reach = 2 * w.abs();
        let needed: Vec<i64> = match (degrees.first(), degrees.last()) {
            (Some(&a), Some(&b)) => (a - reach..=b + reach).collect(),
            _ => Vec::new(),
        };
        for k in needed {
            if slices.contains_key(&k) {
                continue;
            }
            let layout = model.layout(&gens, k);
            let prefix = flag
                .partition
                .iter()
                .map(|&s| {
                    if s == gens.len() {
                        layout.total
                    } else {
                        layout.offsets[s]
                    }
                })
                .collect();
            slices.insert(
                k,
                Slice {
                    dim: layout.total,
                    prefix,
                    delta: model.map_at(&a, &gens, &tgt, k),
                },
            );
        }
        Ok(Setup {
            k: *model.base(),
            l: flag.steps(),
            w,
            slices,
            degrees,
            cutoff: grading.as_ref().and(cutoff),
            zero_delta: d.delta().is_zero(),
        })
    }

    fn prefix(&self, k: i64, i: i64) -> usize {
        let s = &self.slices[&k];
        if i < 0 {
            0
        } else {
            s.prefix[(i as usize).min(self.l)]
        }
    }

    /// Basis of `Z^r_i` in degree `k`.
    fn cycles(&self, k: i64, i: i64, r: i64) -> Vec<Vec<Scalar>> {
        let Some(s) = self.slices.get(&k) else {
            return Vec::new();
        };
        if i < 0 || s.dim == 0 {
            return Vec::new();
        }
        let cols = self.prefix(k, i);
        let row0 = self.prefix(k + self.w, i - r);
        let rows = s.delta.rows - row0;
        let mut m = Mat::filled(rows, cols, self.k.zero());
        for rr in 0..rows {
            for c in 0..cols {
                m.set(rr, c, s.delta.get(row0 + rr, c).clone());
            }
        }
        nullspace(&self.k, &m)
            .into_iter()
            .map(|mut v| {
                v.resize(s.dim, self.k.zero());
                v
            })
            .collect()
    }

    fn apply_delta(&self, k: i64, v: &[Scalar]) -> Vec<Scalar> {
        mat_vec(&self.k, &self.slices[&k].delta, v)
    }

    /// Denominator basis and representatives of `E^r_i` in degree `k`.
    fn term(&self, k: i64, i: i64, r: i64) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) {
        let dim = self.slices.get(&k).map_or(0, |s| s.dim);
        let mut span = Echelon::new(&self.k, dim);
        let mut denom = Vec::new();
        let boundaries = if self.slices.contains_key(&(k - self.w)) {
            self.cycles(k - self.w, i + r - 1, r - 1)
                .iter()
                .map(|z| self.apply_delta(k - self.w, z))
                .collect()
        } else {
            Vec::new()
        };
        for v in self.cycles(k, i - 1, r - 1).into_iter().chain(boundaries) {
            if span.insert(&v) {
                denom.push(v);
            }
        }
        let mut reps = Vec::new();
        for z in self.cycles(k, i, r) {
            if span.insert(&z) {
                reps.push(z);
            }
        }
        (denom, reps)
    }
}

fn stable_at(l: usize, i: usize, r: usize) -> bool {
    r > i.max(l - i)
}

/// Pages `E^1 .. E^{r_max}` of the spectral sequence of `flag`. Graded
/// rings need a cutoff; pages are then truncated there.
pub fn spectral_pages(
    d: &DiffModule,
    flag: &FlagCertificate,
    r_max: usize,
    cutoff: Option<i64>,
) -> Result<Vec<SpectralPage>> {
    let ring = d.ring();
    if !(ring.is_field() || ring.is_graded()) {
        return Err(Error::UnsupportedBackend(format!(
            "spectral pages are computed over fields and graded rings, not {}",
            ring.spec()
        )));
    }
    if r_max == 0 {
        return Err(Error::Precondition("r_max must be at least 1".into()));
    }
    let setup = Setup::new(d, flag, cutoff)?;
    let l = setup.l;
    let mut pages = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut terms = Vec::with_capacity(l + 1);
        let mut data: Vec<BTreeMap<i64, (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>)>> = Vec::new();
        for i in 0..=l {
            let mut dims = BTreeMap::new();
            let mut per_degree = BTreeMap::new();
            for &k in &setup.degrees {
                let t = setup.term(k, i as i64, r as i64);
                dims.insert(k, t.1.len());
                per_degree.insert(k, t);
            }
            terms.push(SpectralTerm {
                i,
                dims,
                stable: setup.zero_delta || stable_at(l, i, r),
            });
            data.push(per_degree);
        }
        let mut differentials = Vec::new();
        for source in r..=l {
            let target = source - r;
            let mut by_degree = BTreeMap::new();
            for &k in &setup.degrees {
                let (_, reps) = &data[source][&k];
                let tk = k + setup.w;
                let (tden, treps) = match data[target].get(&tk) {
                    Some(t) => t.clone(),
                    None => setup.term(tk, target as i64, r as i64),
                };
                let tdim = setup.slices.get(&tk).map_or(0, |s| s.dim);
                let basis: Vec<Vec<Scalar>> = tden.iter().chain(&treps).cloned().collect();
                let solver = Mat::from_columns(tdim, &basis, setup.k.zero());
                let mut m = Mat::filled(treps.len(), reps.len(), setup.k.zero());
                for (c, x) in reps.iter().enumerate() {
                    let y = setup.apply_delta(k, x);
                    let coeffs = solve(&setup.k, &solver, &y)
                        .expect("delta of a cycle lands in the target cycles");
                    for (row, v) in coeffs[tden.len()..].iter().enumerate() {
                        m.set(row, c, v.clone());
                    }
                }
                by_degree.insert(k, m);
            }
            differentials.push(PageDifferential {
                source,
                target,
                by_degree,
            });
        }
        pages.push(SpectralPage {
            r,
            terms,
            differentials,
            cutoff: setup.cutoff,
        });
    }
    Ok(pages)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `E^infinity_i` per position and degree.
    pub contributions: Vec<BTreeMap<i64, usize>>,
    pub homology: BTreeMap<i64, usize>,
    pub mismatches: Vec<i64>,
}

impl ConvergenceReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let table = |t: &BTreeMap<i64, usize>| {
            t.iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect::<serde_json::Map<_, _>>()
        };
        json!({
            "holds": self.holds(),
            "contributions": self.contributions.iter().enumerate().map(|(i, t)| json!({"i": i, "dims": table(t)})).collect::<Vec<_>>(),
            "homology": table(&self.homology),
            "mismatched_degrees": self.mismatches,
        })
    }
}

/// Compares the stable page with `H(D)` degree by degree:
/// `sum_i dim E^infinity_i = dim H`.
pub fn check_convergence(
    d: &DiffModule,
    pages: &[SpectralPage],
    cutoff: Option<i64>,
) -> Result<ConvergenceReport> {
    let last = pages
        .last()
        .ok_or_else(|| Error::NotStabilized("no pages computed".into()))?;
    if !last.stable() {
        let l = last.terms.len() - 1;
        return Err(Error::NotStabilized(format!(
            "page {} is below the bound l + 1 = {}",
            last.r,
            l + 1
        )));
    }
    let homology: BTreeMap<i64, usize> = if d.ring().is_field() {
        let h = homology(d, None)?.field_dim().expect("field homology");
        BTreeMap::from([(0, h)])
    } else {
        let c = cutoff.or(last.cutoff).ok_or(Error::CutoffMissing)?;
        let graded = match d.grading() {
            Some(_) => d.clone(),
            None => d.clone().with_grading(d.grading_or_inferred())?,
        };
        hilbert_table(&graded, c)?
    };
    let contributions: Vec<BTreeMap<i64, usize>> =
        last.terms.iter().map(|t| t.dims.clone()).collect();
    let mut mismatches = Vec::new();
    let degrees: std::collections::BTreeSet<i64> = homology
        .keys()
        .chain(contributions.iter().flat_map(|c| c.keys()))
        .copied()
        .collect();
    for k in degrees {
        let e: usize = contributions
            .iter()
            .map(|c| c.get(&k).copied().unwrap_or(0))
            .sum();
        if e != homology.get(&k).copied().unwrap_or(0) {
            mismatches.push(k);
        }
    }
    Ok(ConvergenceReport {
        contributions,
        homology,
        mismatches,
    })
}

/// `E^1` as a complex of free modules: the folds and the blocks of the
/// conjugated matrix just above the block diagonal.
pub fn first_page_maps(
    d: &DiffModule,
    flag: &FlagCertificate,
) -> Result<Vec<crate::ring::RingMatrix>> {
    verify_certificate(d, flag)?;
    let a = flag.conjugate(d.delta())?;
    let mut starts = vec![0];
    starts.extend(flag.partition.iter().copied());
    Ok((1..=flag.steps())
        .map(|i| {
            let rows: Vec<usize> = (starts[i - 1]..starts[i]).collect();
            let cols: Vec<usize> = (starts[i]..starts[i + 1]).collect();
            a.submatrix(&rows, &cols)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::mat_mul;
    use crate::flags::{block_partition, find_sut_conjugation};
    use crate::module::koszul;
    use crate::ring::{Ring, RingMatrix};

    fn section_two_example() -> DiffModule {
        let r = Ring::from_notation("Q[x,y]/(x^2, x*y)").unwrap();
        DiffModule::new(
            RingMatrix::parse(
                &r,
                &[
                    &["0", "x", "y", "0"],
                    &["0", "0", "x", "y"],
                    &["0", "0", "0", "0"],
                    &["0", "0", "0", "0"],
                ],
            )
            .unwrap(),
            Some(Grading::flat(4, 1)),
        )
        .unwrap()
    }

    #[test]
    fn zero_differential_is_stable_at_once() {
        let r = Ring::prime_field(5).unwrap();
        let d = DiffModule::zero(&r, 3);
        let flag = FlagCertificate::plain(vec![1, 3]);
        let pages = spectral_pages(&d, &flag, 1, None).unwrap();
        assert!(pages[0].stable());
        assert_eq!(pages[0].terms[1].total(), 2);
        assert!(check_convergence(&d, &pages, None).unwrap().holds());
    }

    #[test]
    fn section_two_pages() {
        let d = section_two_example();
        let flag = block_partition(d.delta()).unwrap();
        let maps = first_page_maps(&d, &flag).unwrap();
        let r = d.ring();
        assert_eq!(maps[0], RingMatrix::parse(r, &[&["x"]]).unwrap());
        assert_eq!(maps[1], RingMatrix::parse(r, &[&["x", "y"]]).unwrap());
        let pages = spectral_pages(&d, &flag, 3, Some(8)).unwrap();
        // E^2_0 = R/(x) = k[y]: one dimension in every degree
        let e2 = &pages[1].terms[0];
        assert!((0..=8).all(|k| e2.dims[&k] == 1));
        assert!(!pages[1].stable());
        let report = check_convergence(&d, &pages, Some(8)).unwrap();
        assert!(report.holds(), "{report:?}");
        assert!(matches!(
            check_convergence(&d, &pages[..2], Some(8)),
            Err(Error::NotStabilized(_))
        ));
        // E^infinity vanishes in high degrees although E^2_0 does not
        let total_top: usize = report.contributions.iter().map(|c| c[&8]).sum();
        assert_eq!(total_top, 0);
    }

    #[test]
    fn koszul_second_page() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let d = koszul(&r, &[r.var(0), r.var(1)]).unwrap();
        let flag = block_partition(d.delta()).unwrap();
        let pages = spectral_pages(&d, &flag, 3, Some(6)).unwrap();
        let e2 = &pages[1];
        assert_eq!(e2.terms[0].total(), 1);
        assert_eq!(e2.terms[1].total() + e2.terms[2].total(), 0);
        assert!(check_convergence(&d, &pages, Some(6)).unwrap().holds());
    }

    #[test]
    fn consecutive_differentials_compose_to_zero() {
        let r = Ring::prime_field(5).unwrap();
        // delta e1 = e0, delta e2 = -e0, delta e3 = e1 + e2, delta e4 = e0;
        // the finest partition has four steps
        let a = RingMatrix::from_i64(
            &r,
            &[
                &[0, 1, 4, 0, 1],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0],
            ],
        );
        let d = DiffModule::new(a, None).unwrap();
        let flag = FlagCertificate::plain(vec![1, 2, 3, 4, 5]);
        let pages = spectral_pages(&d, &flag, 5, None).unwrap();
        let k = BaseField::PrimeField { p: 5 };
        for page in &pages {
            for first in &page.differentials {
                for second in page
                    .differentials
                    .iter()
                    .filter(|s| s.source == first.target)
                {
                    let prod = mat_mul(&k, &second.by_degree[&0], &first.by_degree[&0]);
                    assert!(
                        (0..prod.rows).all(|i| (0..prod.cols).all(|j| k.is_zero(prod.get(i, j))))
                    );
                }
            }
        }
        assert!(check_convergence(&d, &pages, None).unwrap().holds());
    }

    #[test]
    fn kernel_flag_converges() {
        let r = Ring::rationals();
        let d = DiffModule::new(
            RingMatrix::from_i64(&r, &[&[1, -1, 0], &[1, -1, 0], &[2, -2, 0]]),
            None,
        )
        .unwrap();
        let flag = find_sut_conjugation(&d).unwrap();
        let pages = spectral_pages(&d, &flag, 2, None).unwrap();
        let report = check_convergence(&d, &pages, None).unwrap();
        assert!(report.holds());
        assert_eq!(report.homology[&0], 1);
    }
}

//! Differential modules `(D, delta)` with `D` free of finite rank, free
//! complexes, and the constructions linking them.

pub(crate) mod contract;
mod homology;
pub(crate) mod linear;

use serde::{Deserialize, Serialize};

pub use contract::{
    is_contractible, peel_to_standard_form, residue_rank, standard_form_matrix, Contractibility,
    StandardBasis,
};
pub use homology::{
    complex_homology, hilbert_at, hilbert_table, homology, homology_with, is_acyclic, Acyclicity,
    GradedHomology, HomologyPresentation,
};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem, RingMatrix};

/// Generator degrees `g` and the degree `w` of the differential: a nonzero
/// entry `a_ij` must be homogeneous of degree `g_j - g_i + w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub generator_degrees: Vec<i64>,
    pub differential_degree: i64,
}

impl Grading {
    pub fn new(generator_degrees: Vec<i64>, differential_degree: i64) -> Self {
        Grading {
            generator_degrees,
            differential_degree,
        }
    }

    /// All generators in degree 0.
    pub fn flat(size: usize, differential_degree: i64) -> Self {
        Grading::new(vec![0; size], differential_degree)
    }

    pub fn expected_degree(&self, i: usize, j: usize) -> i64 {
        self.generator_degrees[j] - self.generator_degrees[i] + self.differential_degree
    }

    pub fn permuted(&self, perm: &[usize]) -> Grading {
        Grading::new(
            perm.iter().map(|&p| self.generator_degrees[p]).collect(),
            self.differential_degree,
        )
    }
}

/// Degree of a homogeneous element as seen by gradings: polynomials by
/// their degree, nonzero scalars of the other backends in degree 0.
pub(crate) fn element_degree(ring: &Ring, a: &RingElem) -> Option<i64> {
    if ring.is_graded() {
        ring.homogeneous_degree(a).ok().flatten().map(i64::from)
    } else {
        Some(0)
    }
}

fn check_grading(delta: &RingMatrix, grading: &Grading) -> Result<()> {
    let s = delta.rows();
    if grading.generator_degrees.len() != s {
        return Err(Error::DimensionMismatch(format!(
            "{} generator degrees for a module of rank {s}",
            grading.generator_degrees.len()
        )));
    }
    let ring = delta.ring();
    for i in 0..s {
        for j in 0..s {
            let a = delta.get(i, j);
            if ring.is_zero(a) {
                continue;
            }
            let expected = grading.expected_degree(i, j);
            if element_degree(ring, a) != Some(expected) {
                return Err(Error::GradingMismatch {
                    row: i,
                    col: j,
                    value: ring.fmt_elem(a),
                    expected,
                });
            }
        }
    }
    Ok(())
}

/// A finite free differential module: a square-zero matrix over a ring,
/// optionally graded.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffModule {
    delta: RingMatrix,
    grading: Option<Grading>,
}

impl DiffModule {
    /// Validates `delta^2 = 0` and the grading.
    pub fn new(delta: RingMatrix, grading: Option<Grading>) -> Result<Self> {
        if !delta.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "differential is {}x{}, not square",
                delta.rows(),
                delta.cols()
            )));
        }
        let sq = delta.mul(&delta)?;
        if let Some((row, col)) = sq.first_nonzero() {
            return Err(Error::NotSquareZero {
                row,
                col,
                value: delta.ring().fmt_elem(sq.get(row, col)),
            });
        }
        if let Some(g) = &grading {
            check_grading(&delta, g)?;
        }
        Ok(DiffModule { delta, grading })
    }

    /// `(R^s, 0)`.
    pub fn zero(ring: &Ring, s: usize) -> Self {
        DiffModule {
            delta: RingMatrix::zeros(ring, s, s),
            grading: None,
        }
    }

    pub fn ring(&self) -> &Ring {
        self.delta.ring()
    }

    pub fn size(&self) -> usize {
        self.delta.rows()
    }

    pub fn delta(&self) -> &RingMatrix {
        &self.delta
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    pub fn with_grading(self, grading: Option<Grading>) -> Result<Self> {
        DiffModule::new(self.delta, grading)
    }

    /// The grading if present, else one inferred from the entries.
    pub fn grading_or_inferred(&self) -> Option<Grading> {
        self.grading.clone().or_else(|| infer_grading(&self.delta))
    }

    /// Same module in the basis ordered by `perm` (new index `k` is old
    /// index `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> DiffModule {
        DiffModule {
            delta: self.delta.permute_symmetric(perm),
            grading: self.grading.as_ref().map(|g| g.permuted(perm)),
        }
    }

    /// `U delta U^-1`, keeping the grading only if it still fits.
    pub fn conjugate(&self, u: &RingMatrix) -> Result<DiffModule> {
        self.conjugate_with(u, &u.inverse()?)
    }

    /// Conjugation with a known inverse.
    pub fn conjugate_with(&self, u: &RingMatrix, uinv: &RingMatrix) -> Result<DiffModule> {
        let delta = u.mul(&self.delta)?.mul(uinv)?;
        let grading = self
            .grading
            .clone()
            .filter(|g| check_grading(&delta, g).is_ok());
        Ok(DiffModule { delta, grading })
    }
}

/// Validating constructor used at API boundaries.
pub fn make_diff_module(
    ring: &Ring,
    delta: RingMatrix,
    grading: Option<Grading>,
) -> Result<DiffModule> {
    if delta.ring() != ring {
        return Err(Error::RingMismatch(format!(
            "matrix over {} given for ring {}",
            delta.ring().spec(),
            ring.spec()
        )));
    }
    DiffModule::new(delta, grading)
}

/// Finds generator degrees making every nonzero entry homogeneous of the
/// right degree. Tries a flat grading first, then `w = 0, 1, ...`.
pub fn infer_grading(delta: &RingMatrix) -> Option<Grading> {
    let ring = delta.ring();
    let s = delta.rows();
    let mut degs = Vec::new();
    for i in 0..s {
        for j in 0..s {
            let a = delta.get(i, j);
            if !ring.is_zero(a) {
                degs.push((i, j, element_degree(ring, a)?));
            }
        }
    }
    if degs.is_empty() {
        return Some(Grading::flat(s, 0));
    }
    if degs.iter().all(|&(_, _, d)| d == degs[0].2) {
        return Some(Grading::flat(s, degs[0].2));
    }
    let max = degs.iter().map(|&(_, _, d)| d).max().unwrap_or(0);
    (0..=max).find_map(|w| solve_degrees(s, &degs, w))
}

fn solve_degrees(s: usize, degs: &[(usize, usize, i64)], w: i64) -> Option<Grading> {
    // g_j - g_i = deg - w along every edge; propagate per component.
    let mut g: Vec<Option<i64>> = vec![None; s];
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); s];
    for &(i, j, d) in degs {
        adj[i].push((j, d - w));
        adj[j].push((i, w - d));
    }
    for root in 0..s {
        if g[root].is_some() {
            continue;
        }
        g[root] = Some(0);
        let mut stack = vec![root];
        let mut comp = vec![root];
        while let Some(u) = stack.pop() {
            let gu = g[u].expect("assigned");
            for &(v, diff) in &adj[u] {
                match g[v] {
                    None => {
                        g[v] = Some(gu + diff);
                        stack.push(v);
                        comp.push(v);
                    }
                    Some(gv) if gv != gu + diff => return None,
                    _ => {}
                }
            }
        }
        let min = comp
            .iter()
            .map(|&u| g[u].expect("assigned"))
            .min()
            .unwrap_or(0);
        for u in comp {
            g[u] = g[u].map(|x| x - min);
        }
    }
    Some(Grading::new(
        g.into_iter().map(|x| x.unwrap_or(0)).collect(),
        w,
    ))
}

/// A bounded complex of finite free modules `X_lo <- ... <- X_hi`.
///
/// `differentials[k]` is `d_n : X_n -> X_{n-1}` for `n = lo + 1 + k`, an
/// `r_{n-1} x r_n` matrix. Optional internal degrees make every `d_n` a
/// degree-preserving map (entry `(a, b)` has degree `deg x_b - deg x_a`).
#[derive(Debug, Clone, PartialEq)]
pub struct FreeComplex {
    ring: Ring,
    lo: i64,
    ranks: Vec<usize>,
    differentials: Vec<RingMatrix>,
    internal_degrees: Option<Vec<Vec<i64>>>,
}

impl FreeComplex {
    pub fn new(
        ring: &Ring,
        lo: i64,
        ranks: Vec<usize>,
        differentials: Vec<RingMatrix>,
        internal_degrees: Option<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Precondition(
                "a complex needs at least one term".into(),
            ));
        }
        if differentials.len() + 1 != ranks.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.ring() != ring {
                return Err(Error::RingMismatch(format!(
                    "differential {k} has another ring"
                )));
            }
            if d.rows() != ranks[k] || d.cols() != ranks[k + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "d_{} is {}x{}, expected {}x{}",
                    lo + 1 + k as i64,
                    d.rows(),
                    d.cols(),
                    ranks[k],
                    ranks[k + 1]
                )));
            }
        }
        for k in 1..differentials.len() {
            let comp = differentials[k - 1].mul(&differentials[k])?;
            if let Some((row, col)) = comp.first_nonzero() {
                return Err(Error::NotSquareZero {
                    row,
                    col,
                    value: ring.fmt_elem(comp.get(row, col)),
                });
            }
        }
        if let Some(deg) = &internal_degrees {
            if deg.len() != ranks.len() || deg.iter().zip(&ranks).any(|(d, &r)| d.len() != r) {
                return Err(Error::DimensionMismatch(
                    "internal degrees do not match ranks".into(),
                ));
            }
            for (k, d) in differentials.iter().enumerate() {
                for a in 0..d.rows() {
                    for b in 0..d.cols() {
                        let e = d.get(a, b);
                        if ring.is_zero(e) {
                            continue;
                        }
                        let expected = deg[k + 1][b] - deg[k][a];
                        if element_degree(ring, e) != Some(expected) {
                            return Err(Error::GradingMismatch {
                                row: a,
                                col: b,
                                value: ring.fmt_elem(e),
                                expected,
                            });
                        }
                    }
                }
            }
        }
        Ok(FreeComplex {
            ring: ring.clone(),
            lo,
            ranks,
            differentials,
            internal_degrees,
        })
    }

    /// `0 -> R^r -> 0` in homological degree `n`.
    pub fn single(ring: &Ring, n: i64, r: usize) -> Self {
        FreeComplex {
            ring: ring.clone(),
            lo: n,
            ranks: vec![r],
            differentials: Vec::new(),
            internal_degrees: Some(vec![vec![0; r]]),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.ranks[(n - self.lo) as usize]
        }
    }

    pub fn differentials(&self) -> &[RingMatrix] {
        &self.differentials
    }

    /// `d_n`, a zero map outside the stored range.
    pub fn differential(&self, n: i64) -> RingMatrix {
        if n > self.lo && n <= self.hi() {
            self.differentials[(n - self.lo - 1) as usize].clone()
        } else {
            RingMatrix::zeros(&self.ring, self.rank(n - 1), self.rank(n))
        }
    }

    pub fn internal_degrees(&self) -> Option<&[Vec<i64>]> {
        self.internal_degrees.as_deref()
    }

    pub fn degrees_at(&self, n: i64) -> Option<Vec<i64>> {
        let deg = self.internal_degrees.as_ref()?;
        Some(if n < self.lo || n > self.hi() {
            Vec::new()
        } else {
            deg[(n - self.lo) as usize].clone()
        })
    }

    /// Number of nonzero terms.
    pub fn nonzero_terms(&self) -> usize {
        self.ranks.iter().filter(|&&r| r > 0).count()
    }

    /// Tensor product of complexes, with `d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy`.
    /// Summands of `(X (x) Y)_n` are ordered by ascending `|x|`, each in
    /// Kronecker order.
    pub fn tensor(&self, other: &FreeComplex) -> Result<FreeComplex> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(
                "tensor of complexes over different rings".into(),
            ));
        }
        let ring = &self.ring;
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        // summands of degree n: (p, q, offset)
        let layout = |n: i64| -> Vec<(i64, i64, usize)> {
            let mut out = Vec::new();
            let mut off = 0;
            for p in self.lo..=self.hi() {
                let q = n - p;
                if q < other.lo || q > other.hi() {
                    continue;
                }
                out.push((p, q, off));
                off += self.rank(p) * other.rank(q);
            }
            out
        };
        let total = |n: i64| -> usize {
            layout(n)
                .iter()
                .map(|&(p, q, _)| self.rank(p) * other.rank(q))
                .sum()
        };
        let ranks: Vec<usize> = (lo..=hi).map(total).collect();
        let mut differentials = Vec::new();
        for n in lo + 1..=hi {
            let mut d = RingMatrix::zeros(ring, total(n - 1), total(n));
            let target = layout(n - 1);
            for &(p, q, off) in &layout(n) {
                // dx (x) y lands in (p-1, q)
                if let Some(&(_, _, toff)) = target.iter().find(|t| t.0 == p - 1 && t.1 == q) {
                    let block = self
                        .differential(p)
                        .kronecker(&RingMatrix::identity(ring, other.rank(q)))?;
                    d.set_block(toff, off, &block);
                }
                // (-1)^p x (x) dy lands in (p, q-1)
                if let Some(&(_, _, toff)) = target.iter().find(|t| t.0 == p && t.1 == q - 1) {
                    let mut block = RingMatrix::identity(ring, self.rank(p))
                        .kronecker(&other.differential(q))?;
                    if p.rem_euclid(2) == 1 {
                        block = block.neg();
                    }
                    d.set_block(toff, off, &block);
                }
            }
            differentials.push(d);
        }
        let internal_degrees = match (&self.internal_degrees, &other.internal_degrees) {
            (Some(_), Some(_)) => Some(
                (lo..=hi)
                    .map(|n| {
                        let mut v = Vec::new();
                        for (p, q, _) in layout(n) {
                            let dx = self.degrees_at(p).expect("graded");
                            let dy = other.degrees_at(q).expect("graded");
                            for a in &dx {
                                for b in &dy {
                                    v.push(a + b);
                                }
                            }
                        }
                        v
                    })
                    .collect(),
            ),
            _ => None,
        };
        FreeComplex::new(ring, lo, ranks, differentials, internal_degrees)
    }
}

/// `Sigma D`: the same module with the differential negated.
pub fn suspension(d: &DiffModule) -> DiffModule {
    DiffModule {
        delta: d.delta.neg(),
        grading: d.grading.clone(),
    }
}

/// Cone of a morphism `phi : D -> E`: the module `D (+) E` with
/// differential `[[-delta_D, 0], [phi, delta_E]]`.
pub fn cone(phi: &RingMatrix, d: &DiffModule, e: &DiffModule) -> Result<DiffModule> {
    let ring = d.ring();
    if e.ring() != ring || phi.ring() != ring {
        return Err(Error::RingMismatch("cone over different rings".into()));
    }
    if phi.rows() != e.size() || phi.cols() != d.size() {
        return Err(Error::DimensionMismatch(format!(
            "phi is {}x{}, expected {}x{}",
            phi.rows(),
            phi.cols(),
            e.size(),
            d.size()
        )));
    }
    let lhs = e.delta.mul(phi)?;
    let rhs = phi.mul(&d.delta)?;
    if let Some((row, col)) = lhs.sub(&rhs)?.first_nonzero() {
        return Err(Error::NotAMorphism { row, col });
    }
    let (s, t) = (d.size(), e.size());
    let mut delta = RingMatrix::zeros(ring, s + t, s + t);
    delta.set_block(0, 0, &d.delta.neg());
    delta.set_block(s, 0, phi);
    delta.set_block(s, s, &e.delta);
    let grading = match (&d.grading, &e.grading) {
        (Some(gd), Some(ge)) if gd.differential_degree == ge.differential_degree => {
            let mut g = gd.generator_degrees.clone();
            g.extend(&ge.generator_degrees);
            Some(Grading::new(g, gd.differential_degree))
                .filter(|g| check_grading(&delta, g).is_ok())
        }
        _ => None,
    };
    DiffModule::new(delta, grading)
}

/// `D (+) E` with block-diagonal differential.
pub fn direct_sum(d: &DiffModule, e: &DiffModule) -> Result<DiffModule> {
    let delta = RingMatrix::block_diag(&d.delta, &e.delta)?;
    let grading = match (&d.grading, &e.grading) {
        (Some(gd), Some(ge)) if gd.differential_degree == ge.differential_degree => {
            let mut g = gd.generator_degrees.clone();
            g.extend(&ge.generator_degrees);
            Some(Grading::new(g, gd.differential_degree))
        }
        _ => None,
    };
    DiffModule::new(delta, grading)
}

/// Compression of a complex: the direct sum of its terms, `X_lo` first,
/// with `d_n` in the block superdiagonal.
///
/// Internal degrees of the complex become generator degrees and the
/// differential has degree 0.
pub fn compress(x: &FreeComplex) -> DiffModule {
    let ring = x.ring();
    let s: usize = x.ranks.iter().sum();
    let mut delta = RingMatrix::zeros(ring, s, s);
    let mut offsets = Vec::new();
    let mut off = 0;
    for &r in &x.ranks {
        offsets.push(off);
        off += r;
    }
    for (k, d) in x.differentials.iter().enumerate() {
        delta.set_block(offsets[k], offsets[k + 1], d);
    }
    let grading = x
        .internal_degrees
        .as_ref()
        .map(|deg| Grading::new(deg.iter().flatten().copied().collect(), 0));
    DiffModule::new(delta, grading).expect("compression of a complex is square-zero")
}

/// The window `[lo, hi]` of the 2-periodic complex `... -> D -> D -> ...`.
pub fn expand(d: &DiffModule, lo: i64, hi: i64) -> Result<FreeComplex> {
    if hi < lo {
        return Err(Error::Precondition(format!("empty window [{lo}, {hi}]")));
    }
    let n = (hi - lo + 1) as usize;
    let s = d.size();
    let internal = d.grading.as_ref().map(|g| {
        (lo..=hi)
            .map(|k| {
                g.generator_degrees
                    .iter()
                    .map(|x| x + k * g.differential_degree)
                    .collect()
            })
            .collect()
    });
    FreeComplex::new(
        d.ring(),
        lo,
        vec![s; n],
        vec![d.delta.clone(); n - 1],
        internal,
    )
}

/// `X (x) D`: the module `(+)_n X_n (x) D` with differential
/// `d (x) 1 + (-1)^n 1 (x) delta` on `X_n (x) D`.
///
/// Blocks are ordered by ascending `n`, each in Kronecker order.
pub fn tensor(x: &FreeComplex, d: &DiffModule) -> Result<DiffModule> {
    let ring = d.ring();
    if x.ring() != ring {
        return Err(Error::RingMismatch(format!(
            "complex over {} and module over {}",
            x.ring().spec(),
            ring.spec()
        )));
    }
    let s = d.size();
    let total: usize = x.ranks.iter().sum::<usize>() * s;
    let mut delta = RingMatrix::zeros(ring, total, total);
    let mut offsets = Vec::new();
    let mut off = 0;
    for &r in &x.ranks {
        offsets.push(off);
        off += r * s;
    }
    let id_s = RingMatrix::identity(ring, s);
    for (k, &r) in x.ranks.iter().enumerate() {
        let n = x.lo + k as i64;
        let mut diag = RingMatrix::identity(ring, r).kronecker(&d.delta)?;
        if n.rem_euclid(2) == 1 {
            diag = diag.neg();
        }
        delta.set_block(offsets[k], offsets[k], &diag);
        if k > 0 {
            let block = x.differentials[k - 1].kronecker(&id_s)?;
            delta.set_block(offsets[k - 1], offsets[k], &block);
        }
    }
    let grading = match (&x.internal_degrees, &d.grading) {
        (Some(deg), Some(g)) => {
            let w = g.differential_degree;
            let mut gens = Vec::new();
            for (k, dk) in deg.iter().enumerate() {
                let n = x.lo + k as i64;
                for a in dk {
                    for b in &g.generator_degrees {
                        gens.push(a + b - n * w);
                    }
                }
            }
            Some(Grading::new(gens, w))
        }
        _ => None,
    };
    DiffModule::new(delta, grading)
}

/// Koszul complex on `elements`, built as the iterated tensor product of
/// the complexes `0 -> R -> R -> 0` given by each element.
pub fn koszul_complex(ring: &Ring, elements: &[RingElem]) -> Result<FreeComplex> {
    let mut k = FreeComplex::single(ring, 0, 1);
    let graded = elements
        .iter()
        .all(|e| ring.is_zero(e) || element_degree(ring, e).is_some());
    for e in elements {
        let deg = element_degree(ring, e).unwrap_or(0);
        let ke = FreeComplex::new(
            ring,
            0,
            vec![1, 1],
            vec![RingMatrix::from_rows(ring, vec![vec![e.clone()]])?],
            graded.then(|| vec![vec![0], vec![deg]]),
        )?;
        k = k.tensor(&ke)?;
    }
    if !graded {
        k.internal_degrees = None;
    }
    Ok(k)
}

/// Compression of the Koszul complex on `elements`, of rank `2^e`.
pub fn koszul(ring: &Ring, elements: &[RingElem]) -> Result<DiffModule> {
    Ok(compress(&koszul_complex(ring, elements)?))
}

/// Base change to the residue field: entries of a local ring reduced
/// modulo the maximal ideal. This is `k (x)_R D` for the residue field `k`.
pub fn residue_module(d: &DiffModule) -> Result<DiffModule> {
    let ring = d.ring();
    let k = ring.residue_field().ok_or_else(|| {
        Error::UnsupportedBackend(format!("{} has no residue field", ring.spec()))
    })?;
    let kr = Ring::new(crate::ring::RingSpec::new(match k {
        crate::ring::BaseField::PrimeField { p } => crate::ring::RingKind::PrimeField { p },
        crate::ring::BaseField::Rationals => crate::ring::RingKind::Rationals,
    }))?;
    let s = d.size();
    let mut delta = RingMatrix::zeros(&kr, s, s);
    for i in 0..s {
        for j in 0..s {
            let r = ring.residue(d.delta.get(i, j)).expect("local ring");
            delta.set(i, j, kr.from_scalar(&r));
        }
    }
    DiffModule::new(delta, None)
}

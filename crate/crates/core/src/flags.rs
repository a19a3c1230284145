//! Free flags on square-zero matrices.
//!
//! A flag is recorded as a basis change `U` together with a block
//! partition `s_0 < s_1 < ... < s_l = s` such that `U A U^-1` vanishes on
//! and below the block diagonal. `F^n` is spanned by the first `s_n` basis
//! vectors and the `n`th fold has rank `s_n - s_{n-1}`; `l` is the number
//! of steps after the first fold.

use crate::error::{Error, Result};
use crate::field::{inverse as field_inverse, nullspace, Echelon, Field};
use crate::module::contract::integer_standard_form;
use crate::module::linear::{from_field_mat, to_field_mat};
use crate::module::{
    is_contractible, peel_to_standard_form, Acyclicity, Contractibility, DiffModule, StandardBasis,
};
use crate::ring::{prime_power_base, Ring, RingMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct FlagCertificate {
    /// `None` when the matrix is used as given.
    pub conjugator: Option<RingMatrix>,
    pub inverse: Option<RingMatrix>,
    pub partition: Vec<usize>,
}

impl FlagCertificate {
    /// Computes the inverse of the conjugator when one is given.
    pub fn new(conjugator: Option<RingMatrix>, partition: Vec<usize>) -> Result<Self> {
        let inverse =
            match &conjugator {
                Some(u) => Some(u.inverse().map_err(|e| {
                    Error::InvalidFlag(format!("conjugator is not invertible: {e}"))
                })?),
                None => None,
            };
        Ok(FlagCertificate {
            conjugator,
            inverse,
            partition,
        })
    }

    pub fn with_inverse(
        conjugator: RingMatrix,
        inverse: RingMatrix,
        partition: Vec<usize>,
    ) -> Self {
        FlagCertificate {
            conjugator: Some(conjugator),
            inverse: Some(inverse),
            partition,
        }
    }

    pub fn plain(partition: Vec<usize>) -> Self {
        FlagCertificate {
            conjugator: None,
            inverse: None,
            partition,
        }
    }

    /// `l`: the flag satisfies `F^l = F`.
    pub fn steps(&self) -> usize {
        self.partition.len().saturating_sub(1)
    }

    pub fn size(&self) -> usize {
        self.partition.last().copied().unwrap_or(0)
    }

    pub fn fold_ranks(&self) -> Vec<usize> {
        let mut prev = 0;
        self.partition
            .iter()
            .map(|&s| {
                let f = s - prev;
                prev = s;
                f
            })
            .collect()
    }

    /// Block index of each basis vector.
    pub fn blocks(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size());
        let mut prev = 0;
        for (n, &s) in self.partition.iter().enumerate() {
            out.extend(std::iter::repeat_n(n, s - prev));
            prev = s;
        }
        out
    }

    /// The matrix in the flag's basis.
    pub fn conjugate(&self, a: &RingMatrix) -> Result<RingMatrix> {
        match (&self.conjugator, &self.inverse) {
            (Some(u), Some(v)) => u.mul(a)?.mul(v),
            (Some(u), None) => u.mul(a)?.mul(&u.inverse()?),
            _ => Ok(a.clone()),
        }
    }

    /// Interleaves the folds of two certificates into one for the direct
    /// sum; the result has `max(l, l')` steps.
    pub fn direct_sum(&self, other: &FlagCertificate, ring: &Ring) -> Result<FlagCertificate> {
        let (s1, s2) = (self.size(), other.size());
        let (b1, b2) = (self.blocks(), other.blocks());
        let l = self.steps().max(other.steps());
        let mut perm = Vec::with_capacity(s1 + s2);
        let mut partition = Vec::with_capacity(l + 1);
        for n in 0..=l {
            perm.extend((0..s1).filter(|&i| b1[i] == n));
            perm.extend((0..s2).filter(|&i| b2[i] == n).map(|i| s1 + i));
            partition.push(perm.len());
        }
        let part = |c: &FlagCertificate, s: usize| -> Result<(RingMatrix, RingMatrix)> {
            Ok(match (&c.conjugator, &c.inverse) {
                (Some(u), Some(v)) => (u.clone(), v.clone()),
                (Some(u), None) => (u.clone(), u.inverse()?),
                _ => (RingMatrix::identity(ring, s), RingMatrix::identity(ring, s)),
            })
        };
        let (u1, v1) = part(self, s1)?;
        let (u2, v2) = part(other, s2)?;
        let p = permutation_matrix(ring, &perm);
        let u = p.mul(&RingMatrix::block_diag(&u1, &u2)?)?;
        let v = RingMatrix::block_diag(&v1, &v2)?.mul(&p.transpose())?;
        Ok(FlagCertificate::with_inverse(u, v, partition))
    }
}

/// Row `k` has its one in column `perm[k]`, so `P A P^T` lists the basis
/// in the order `perm`.
pub fn permutation_matrix(ring: &Ring, perm: &[usize]) -> RingMatrix {
    let mut p = RingMatrix::zeros(ring, perm.len(), perm.len());
    for (k, &old) in perm.iter().enumerate() {
        p.set(k, old, ring.one());
    }
    p
}

/// Checks that `a` vanishes on and below the block diagonal.
pub fn check_partition(a: &RingMatrix, partition: &[usize]) -> Result<()> {
    let s = a.rows();
    let ok_shape = if s == 0 {
        partition.iter().all(|&p| p == 0) && partition.len() <= 1
    } else {
        partition.first().is_some_and(|&p| p >= 1)
            && partition.windows(2).all(|w| w[0] < w[1])
            && partition.last() == Some(&s)
    };
    if !ok_shape {
        return Err(Error::InvalidFlag(format!(
            "partition {partition:?} is not 1 <= s_0 < ... < s_l = {s}"
        )));
    }
    let cert = FlagCertificate::plain(partition.to_vec());
    let blocks = cert.blocks();
    for i in 0..s {
        for j in 0..s {
            if blocks[i] >= blocks[j] && !a.ring().is_zero(a.get(i, j)) {
                return Err(Error::InvalidFlag(format!(
                    "entry ({i}, {j}) = {} lies on or below the block diagonal",
                    a.ring().fmt_elem(a.get(i, j))
                )));
            }
        }
    }
    Ok(())
}

/// Re-verifies a certificate against `D`: the conjugator is invertible and
/// the conjugate is strictly upper block triangular.
pub fn verify_certificate(d: &DiffModule, cert: &FlagCertificate) -> Result<()> {
    if cert.size() != d.size() {
        return Err(Error::InvalidFlag(format!(
            "partition covers {} generators, module has {}",
            cert.size(),
            d.size()
        )));
    }
    if let (Some(u), Some(v)) = (&cert.conjugator, &cert.inverse) {
        if u.mul(v)? != RingMatrix::identity(d.ring(), d.size()) {
            return Err(Error::InvalidFlag(
                "stored inverse does not invert the conjugator".into(),
            ));
        }
    }
    check_partition(&cert.conjugate(d.delta())?, &cert.partition)
}

/// Coarsest refinement-minimal block partition of a strictly upper
/// triangular matrix: each block grows while its diagonal block stays
/// zero. Minimal among partitions of this basis order, not over all
/// conjugates.
pub fn block_partition(a: &RingMatrix) -> Result<FlagCertificate> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "block partition of a non-square matrix".into(),
        ));
    }
    if let Some((row, col)) = a.first_on_or_below_diagonal() {
        return Err(Error::NotStrictlyUpperTriangular { row, col });
    }
    let s = a.rows();
    if s == 0 {
        return Ok(FlagCertificate::plain(vec![0]));
    }
    let ring = a.ring();
    let mut partition = Vec::new();
    let mut start = 0;
    while start < s {
        let mut end = start + 1;
        while end < s && (start..end).all(|i| ring.is_zero(a.get(i, end))) {
            end += 1;
        }
        partition.push(end);
        start = end;
    }
    Ok(FlagCertificate::plain(partition))
}

/// Orders the basis by longest incoming path in the graph `j -> i` for
/// `a_ij != 0`. Succeeds exactly when some permutation makes `a` strictly
/// upper triangular.
pub fn triangularizing_permutation(a: &RingMatrix) -> Option<Vec<usize>> {
    let s = a.rows();
    let ring = a.ring();
    let mut level: Vec<Option<usize>> = vec![None; s];
    let mut on_stack = vec![false; s];
    fn visit(
        j: usize,
        a: &RingMatrix,
        ring: &Ring,
        level: &mut [Option<usize>],
        on_stack: &mut [bool],
    ) -> Option<usize> {
        if let Some(l) = level[j] {
            return Some(l);
        }
        if on_stack[j] {
            return None;
        }
        on_stack[j] = true;
        let mut l = 0;
        for i in 0..a.rows() {
            if !ring.is_zero(a.get(i, j)) {
                l = l.max(visit(i, a, ring, level, on_stack)? + 1);
            }
        }
        on_stack[j] = false;
        level[j] = Some(l);
        Some(l)
    }
    for j in 0..s {
        visit(j, a, ring, &mut level, &mut on_stack)?;
    }
    let mut perm: Vec<usize> = (0..s).collect();
    perm.sort_by_key(|&j| (level[j], j));
    Some(perm)
}

/// Over a field: the basis `Ker delta` followed by a complement. Since
/// `delta(D)` lies in the kernel, the conjugate has at most two folds.
pub fn find_sut_conjugation(d: &DiffModule) -> Result<FlagCertificate> {
    let ring = d.ring();
    let k = ring.as_field().ok_or_else(|| {
        Error::UnsupportedBackend(format!("kernel flags need a field, got {}", ring.spec()))
    })?;
    let s = d.size();
    if d.delta().is_zero() {
        return Ok(FlagCertificate::plain(vec![s]));
    }
    let a = to_field_mat(&k, d.delta());
    let kernel = nullspace(&k, &a);
    let mut span = Echelon::from_vectors(&k, s, &kernel);
    let mut columns = kernel.clone();
    for i in 0..s {
        let mut e = vec![k.zero(); s];
        e[i] = k.one();
        if span.insert(&e) {
            columns.push(e);
        }
    }
    let b = crate::field::Mat::from_columns(s, &columns, k.zero());
    let u = field_inverse(&k, &b).expect("kernel plus complement is a basis");
    Ok(FlagCertificate::with_inverse(
        from_field_mat(ring, &u),
        from_field_mat(ring, &b),
        vec![kernel.len(), s],
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum StandardForm {
    Yes(StandardBasis),
    No(Vec<String>),
    Unknown(String),
}

/// Conjugation to `[[0, 1_r], [0, 0]]` over a local or projective-free
/// backend. Non-local rings give `Unknown`: no finite test is available.
pub fn standard_form_test(d: &DiffModule, cutoff: Option<i64>) -> Result<StandardForm> {
    let ring = d.ring();
    if ring.is_graded() && !ring.is_local_flag() {
        return Ok(StandardForm::Unknown(format!(
            "{} is not marked local; conjugacy over a non-local graded ring is not decided",
            ring.spec()
        )));
    }
    if let Some(n) = ring.modulus() {
        if prime_power_base(n).is_none() {
            return Ok(StandardForm::Unknown(format!(
                "Z/{n} is neither local nor a domain"
            )));
        }
    }
    Ok(match is_contractible(d, cutoff)? {
        Contractibility::Yes(b) => StandardForm::Yes(b),
        Contractibility::No {
            mut reasons,
            acyclic,
            ..
        } => {
            let kernel = match acyclic {
                Some(Acyclicity::Yes) => "Ker = Im holds".to_string(),
                Some(Acyclicity::YesUpToCutoff(c)) => format!("Ker = Im holds up to degree {c}"),
                Some(Acyclicity::No) => "Ker != Im".to_string(),
                None => "Ker = Im not checked".to_string(),
            };
            if d.size() % 2 == 1 {
                reasons.insert(0, format!("size obstruction: s = {} is odd", d.size()));
            }
            reasons.push(kernel);
            reasons.dedup();
            StandardForm::No(reasons)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    Supplied,
    ZeroDifferential,
    BlockPartition,
    Permutation,
    FieldKernel,
    StandardForm,
}

impl BoundSource {
    pub fn name(self) -> &'static str {
        match self {
            BoundSource::Supplied => "supplied certificate",
            BoundSource::ZeroDifferential => "zero differential",
            BoundSource::BlockPartition => "block partition",
            BoundSource::Permutation => "permutation to triangular form",
            BoundSource::FieldKernel => "kernel flag over a field",
            BoundSource::StandardForm => "standard form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassBound {
    pub bound: usize,
    pub certificate: FlagCertificate,
    pub source: BoundSource,
}

/// Least `l` over the certificates this tool can produce (plus one
/// supplied). `None` means no certificate was found; the class is then
/// unknown, never asserted infinite.
pub fn class_upper_bound(
    d: &DiffModule,
    supplied: Option<&FlagCertificate>,
) -> Result<Option<ClassBound>> {
    let ring = d.ring();
    let s = d.size();
    let mut best: Option<ClassBound> = None;
    let mut offer = |cert: FlagCertificate, source: BoundSource| {
        let l = cert.steps();
        if best.as_ref().is_none_or(|b| l < b.bound) {
            best = Some(ClassBound {
                bound: l,
                certificate: cert,
                source,
            });
        }
    };
    if let Some(c) = supplied {
        verify_certificate(d, c)?;
        offer(c.clone(), BoundSource::Supplied);
    }
    if d.delta().is_zero() {
        offer(
            FlagCertificate::plain(vec![s]),
            BoundSource::ZeroDifferential,
        );
        return Ok(best);
    }
    if d.delta().is_strictly_upper_triangular() {
        offer(block_partition(d.delta())?, BoundSource::BlockPartition);
    } else if let Some(perm) = triangularizing_permutation(d.delta()) {
        let p = permutation_matrix(ring, &perm);
        let part = block_partition(&d.delta().permute_symmetric(&perm))?;
        offer(
            FlagCertificate::with_inverse(p.clone(), p.transpose(), part.partition),
            BoundSource::Permutation,
        );
    }
    if ring.is_field() {
        offer(find_sut_conjugation(d)?, BoundSource::FieldKernel);
    }
    if s.is_multiple_of(2) {
        let basis = if ring.is_integers() {
            integer_standard_form(d)?
        } else if ring.residue_field().is_some() && (!ring.is_graded() || ring.is_local_flag()) {
            match peel_to_standard_form(d) {
                Ok(b) => b,
                Err(Error::Precondition(_)) | Err(Error::UnsupportedBackend(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        if let Some(b) = basis {
            offer(
                FlagCertificate::with_inverse(b.conjugator, b.inverse, vec![s / 2, s]),
                BoundSource::StandardForm,
            );
        }
    }
    Ok(best)
}

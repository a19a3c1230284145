//! Checks of the rank formulas, fold bounds and the class and rank
//! inequalities on concrete instances.
//!
//! A violation of a proved statement is an implementation bug and is
//! marked fatal; a violation of the conjectured `rank >= 2^d` is an
//! auditable finding. When the annihilator is only verified up to a cutoff,
//! a failed inequality is reported as a violation only if the homology was
//! seen to have finite length; otherwise it is inconclusive.

mod search;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flags::{block_partition, class_upper_bound, verify_certificate, FlagCertificate};
use crate::module::{homology, homology_with, DiffModule, HomologyPresentation};
use crate::rank::{determinantal_rank, monomial_ideal_height, Height};
use crate::ring::{Ring, RingElem};

pub use search::{search_conjecture, SearchConfig, SearchLedger, SearchMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violation,
    Inconclusive(Option<i64>),
    OutOfHypothesis,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Holds => write!(f, "holds"),
            Status::Violation => write!(f, "VIOLATION"),
            Status::Inconclusive(Some(c)) => write!(f, "inconclusive({c})"),
            Status::Inconclusive(None) => write!(f, "inconclusive"),
            Status::OutOfHypothesis => write!(f, "out-of-hypothesis"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// A violation here contradicts a theorem.
    pub fatal: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InequalityReport {
    pub instance: String,
    pub quantities: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
}

impl InequalityReport {
    fn new(instance: &str) -> Self {
        InequalityReport {
            instance: instance.to_string(),
            ..Default::default()
        }
    }

    fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.quantities.insert(key.to_string(), v.into());
    }

    fn check(&mut self, name: &str, status: Status, fatal: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status,
            fatal,
            detail: detail.into(),
        });
    }

    pub fn status_of(&self, name: &str) -> Option<&Status> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.status)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Violation)
    }

    pub fn fatal_violations(&self) -> impl Iterator<Item = &Check> {
        self.violations().filter(|c| c.fatal)
    }

    pub fn holds(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn merge(&mut self, other: InequalityReport) {
        self.quantities.extend(other.quantities);
        self.checks.extend(other.checks);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "instance": self.instance,
            "quantities": self.quantities,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "status": c.status.to_string(),
                "fatal": c.fatal,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if !self.instance.is_empty() {
            out.push_str(&format!("instance: {}\n", self.instance));
        }
        for (k, v) in &self.quantities {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}\n", c.status, c.name, c.detail));
        }
        out
    }
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Holds
    } else {
        Status::Violation
    }
}

fn require_domain(ring: &Ring) -> Result<()> {
    if ring.is_supported_domain() {
        Ok(())
    } else {
        Err(Error::UnsupportedBackend(format!(
            "rank formulas need a domain backend, got {}",
            ring.spec()
        )))
    }
}

/// `rank D = rank H + 2 rank(delta)`, with the doubling and parity
/// consequences. `rank H` is taken from the homology computation where it
/// is independent of `rank(delta)`.
pub fn verify_rank_formulas(d: &DiffModule, cutoff: Option<i64>) -> Result<InequalityReport> {
    let ring = d.ring();
    require_domain(ring)?;
    let s = d.size();
    let dr = determinantal_rank(d.delta())?.rank;
    let (rank_h, route) = if ring.is_field() {
        let h = homology(d, None)?.field_dim().expect("field homology");
        (h, "dimension over the field".to_string())
    } else if ring.is_integers() {
        let h = homology(d, None)?.free_rank().expect("integer homology");
        (h, "free rank of the integer homology".to_string())
    } else {
        let graded = match cutoff {
            Some(c) => homology(d, Some(c))?.graded().cloned(),
            None => None,
        };
        match graded {
            Some(g) if g.finite_length_detected() => (
                0,
                format!("finite length detected up to degree {}", g.cutoff),
            ),
            _ => (
                s - 2 * dr,
                "nullity minus rank over the fraction field".to_string(),
            ),
        }
    };
    let mut rep = InequalityReport::new("rank formulas");
    rep.set("rank_D", s);
    rep.set("rank_delta", dr);
    rep.set("rank_H", rank_h);
    rep.set("rank_H_route", route);
    rep.check(
        "rank D = rank H + 2 rank delta",
        verdict(s == rank_h + 2 * dr),
        true,
        format!("{s} = {rank_h} + 2*{dr}"),
    );
    rep.check(
        "rank D = 2 rank delta iff rank H = 0",
        verdict((s == 2 * dr) == (rank_h == 0)),
        true,
        format!("{} / {}", s == 2 * dr, rank_h == 0),
    );
    rep.check(
        "rank D = rank H mod 2",
        verdict(s % 2 == rank_h % 2),
        true,
        format!("{} = {} mod 2", s % 2, rank_h % 2),
    );
    Ok(rep)
}

/// Fold bounds for the coarsest partition of the flag's basis: end folds
/// of rank at least 1, middle folds at least 2, `delta(F^n)` not inside
/// `F^{n-2}`, and `rank >= 2l`.
pub fn verify_fold_bounds(d: &DiffModule, flag: &FlagCertificate) -> Result<InequalityReport> {
    require_domain(d.ring())?;
    verify_certificate(d, flag)?;
    let a = flag.conjugate(d.delta())?;
    let cert = block_partition(&a)?;
    let ring = d.ring();
    let folds = cert.fold_ranks();
    let l = cert.steps();
    let mut rep = InequalityReport::new("fold bounds");
    rep.set("rank_D", d.size());
    rep.set("l", l);
    rep.set("l_supplied", flag.steps());
    rep.set("fold_ranks", json!(folds));
    if d.size() == 0 {
        return Ok(rep);
    }
    let ends_ok = folds[0] >= 1 && folds[l] >= 1;
    rep.check(
        "end folds >= 1",
        verdict(ends_ok),
        true,
        format!("f_0 = {}, f_l = {}", folds[0], folds[l]),
    );
    let thin: Vec<usize> = (1..l).filter(|&n| folds[n] < 2).collect();
    rep.check(
        "middle folds >= 2",
        verdict(thin.is_empty()),
        true,
        if thin.is_empty() {
            format!("{:?}", &folds[1..l.max(1)])
        } else {
            format!("folds {thin:?} have rank < 2")
        },
    );
    let mut starts = vec![0];
    starts.extend(cert.partition.iter().copied());
    let degenerate: Vec<usize> = (1..=l)
        .filter(|&n| {
            (starts[n - 1]..starts[n])
                .all(|i| (starts[n]..starts[n + 1]).all(|j| ring.is_zero(a.get(i, j))))
        })
        .collect();
    rep.check(
        "delta(F^n) not in F^(n-2)",
        verdict(degenerate.is_empty()),
        true,
        if degenerate.is_empty() {
            format!("n = 1..{l}")
        } else {
            format!("fails for n in {degenerate:?}")
        },
    );
    rep.check(
        "rank >= 2l",
        verdict(d.size() >= 2 * l),
        true,
        format!("{} >= {}", d.size(), 2 * l),
    );
    Ok(rep)
}

/// Annihilator generators and the height they give, with whether the
/// homology was seen to have finite length.
struct Annihilator {
    generators: Vec<RingElem>,
    height: Option<Height>,
    finite_length: bool,
    cutoff: Option<i64>,
    zero_homology: bool,
}

fn annihilator(
    d: &DiffModule,
    supplied: Option<&[RingElem]>,
    cutoff: Option<i64>,
) -> Result<Annihilator> {
    let ring = d.ring();
    if ring.is_graded() {
        let h = homology_with(d, cutoff, supplied.unwrap_or(&[]))?;
        let g = h.graded().expect("graded homology").clone();
        if let Some(bad) = g.rejected.first() {
            return Err(Error::AnnihilatorNotVerified(ring.fmt_elem(bad)));
        }
        let generators = match supplied {
            Some(s) => s.to_vec(),
            None => g.annihilator.clone(),
        };
        let height = match monomial_ideal_height(ring, &generators) {
            Ok(h) => Some(h),
            Err(Error::NotMonomial(_)) => None,
            Err(e) => return Err(e),
        };
        return Ok(Annihilator {
            generators,
            height,
            finite_length: g.finite_length_detected(),
            cutoff: Some(g.cutoff),
            zero_homology: g.is_zero(),
        });
    }
    let h = homology(d, cutoff)?;
    let zero = h.is_zero();
    // over a field or Z: Ann H is R, a nonzero proper ideal (height 1 in
    // Z), or zero
    let height = if zero {
        Height::UnitIdeal
    } else {
        match &h {
            HomologyPresentation::Integers { invariant_factors } => {
                if invariant_factors.iter().any(|f| f.is_zero()) {
                    Height::Finite(0)
                } else {
                    Height::Finite(1)
                }
            }
            HomologyPresentation::Field { .. } => Height::Finite(0),
            _ => {
                return Err(Error::UnsupportedBackend(format!(
                    "heights over {} are not computed",
                    ring.spec()
                )))
            }
        }
    };
    Ok(Annihilator {
        generators: Vec::new(),
        height: Some(height),
        finite_length: true,
        cutoff: None,
        zero_homology: zero,
    })
}

fn record_annihilator(rep: &mut InequalityReport, ring: &Ring, ann: &Annihilator) {
    rep.set(
        "annihilator",
        json!(ann
            .generators
            .iter()
            .map(|g| ring.fmt_elem(g))
            .collect::<Vec<_>>()),
    );
    rep.set("d", ann.height.map_or(Value::Null, Height::to_json));
    if let Some(c) = ann.cutoff {
        rep.set("cutoff", c);
        rep.set("finite_length_detected", ann.finite_length);
    }
}

/// Status of `lhs >= rhs` given how far the annihilator can be trusted.
fn inequality_status(ok: bool, ann: &Annihilator) -> Status {
    if ok {
        Status::Holds
    } else if ann.finite_length {
        Status::Violation
    } else {
        Status::Inconclusive(ann.cutoff)
    }
}

/// `l >= height Ann H(D)` with `l` the best class bound available.
pub fn verify_class_inequality(
    d: &DiffModule,
    flag: Option<&FlagCertificate>,
    annihilator_generators: Option<&[RingElem]>,
    cutoff: i64,
) -> Result<InequalityReport> {
    let ring = d.ring();
    if !ring.is_graded() {
        return Err(Error::UnsupportedBackend(format!(
            "the class inequality is checked over graded polynomial rings, got {}",
            ring.spec()
        )));
    }
    let ann = annihilator(d, annihilator_generators, Some(cutoff))?;
    let bound = class_upper_bound(d, flag)?;
    let mut rep = InequalityReport::new("class inequality");
    rep.set("rank_D", d.size());
    record_annihilator(&mut rep, ring, &ann);
    let Some(bound) = bound else {
        rep.set("l", Value::Null);
        rep.check(
            "class >= height Ann H",
            Status::OutOfHypothesis,
            true,
            "no flag certificate found",
        );
        return Ok(rep);
    };
    rep.set("l", bound.bound);
    rep.set("l_source", bound.source.name());
    let status = match ann.height {
        _ if ann.zero_homology => Status::OutOfHypothesis,
        None => Status::Inconclusive(ann.cutoff),
        Some(Height::UnitIdeal) => Status::OutOfHypothesis,
        Some(Height::Finite(h)) => inequality_status(bound.bound >= h, &ann),
    };
    let detail = match (ann.zero_homology, ann.height) {
        (true, _) => "H(D) = 0 up to the cutoff".to_string(),
        (_, Some(Height::Finite(h))) if bound.bound == h => {
            format!("{} >= {h}, tight", bound.bound)
        }
        (_, Some(Height::Finite(h))) => format!("{} >= {h}", bound.bound),
        (_, Some(Height::UnitIdeal)) => "annihilator is the unit ideal".to_string(),
        (_, None) => "annihilator is not monomial".to_string(),
    };
    rep.check("class >= height Ann H", status, true, detail);
    Ok(rep)
}

/// `rank >= 2d`, `rank >= 8` when `d >= 3` over a UFD, and the conjectured
/// `rank >= 2^d`. Instances without a flag certificate are outside the
/// hypothesis.
pub fn verify_rank_inequality(
    d: &DiffModule,
    flag: Option<&FlagCertificate>,
    annihilator_generators: Option<&[RingElem]>,
    cutoff: Option<i64>,
) -> Result<InequalityReport> {
    let ring = d.ring();
    let ann = annihilator(d, annihilator_generators, cutoff)?;
    let s = d.size();
    let mut rep = InequalityReport::new("rank inequality");
    rep.set("rank_D", s);
    record_annihilator(&mut rep, ring, &ann);
    let bound = class_upper_bound(d, flag)?;
    rep.set("l", bound.as_ref().map_or(Value::Null, |b| json!(b.bound)));
    let names = ["rank >= 2d", "rank >= 8 (d >= 3, UFD)", "rank >= 2^d"];
    let skip = |rep: &mut InequalityReport, status: Status, why: &str| {
        for (i, n) in names.iter().enumerate() {
            rep.check(n, status.clone(), i < 2, why);
        }
    };
    if bound.is_none() {
        skip(
            &mut rep,
            Status::OutOfHypothesis,
            "no free flag certificate found",
        );
        return Ok(rep);
    }
    if ann.zero_homology {
        skip(&mut rep, Status::OutOfHypothesis, "H(D) = 0");
        return Ok(rep);
    }
    let h = match ann.height {
        Some(Height::Finite(h)) => h,
        Some(Height::UnitIdeal) => {
            skip(
                &mut rep,
                Status::OutOfHypothesis,
                "annihilator is the unit ideal",
            );
            return Ok(rep);
        }
        None => {
            skip(
                &mut rep,
                Status::Inconclusive(ann.cutoff),
                "annihilator is not monomial",
            );
            return Ok(rep);
        }
    };
    rep.check(
        names[0],
        inequality_status(s >= 2 * h, &ann),
        true,
        format!("{s} >= {}", 2 * h),
    );
    let ufd = ring.is_supported_domain();
    if h >= 3 && ufd {
        rep.check(
            names[1],
            inequality_status(s >= 8, &ann),
            true,
            format!("{s} >= 8"),
        );
    } else {
        rep.check(
            names[1],
            Status::OutOfHypothesis,
            true,
            if ufd { "d < 3" } else { "not a UFD backend" },
        );
    }
    let target = 1usize.checked_shl(h as u32).unwrap_or(usize::MAX);
    rep.set("margin_2d", s as i64 - 2 * h as i64);
    rep.set("margin_2_pow_d", s as i64 - target as i64);
    rep.check(
        names[2],
        inequality_status(s >= target, &ann),
        false,
        format!("{s} >= {target}"),
    );
    Ok(rep)
}

//! Acceptance run: one line per criterion, then a nonzero exit if any
//! failed. Budgets are wall-clock seconds under the test profile.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use diffmod::flags::{
    check_partition, class_upper_bound, find_sut_conjugation, standard_form_test,
    verify_certificate, FlagCertificate, StandardForm,
};
use diffmod::harness::{
    search_conjecture, verify_class_inequality, verify_rank_formulas, verify_rank_inequality,
    SearchConfig, Status,
};
use diffmod::module::{
    compress, cone, homology, is_acyclic, is_contractible, koszul, residue_module,
    standard_form_matrix, suspension, tensor, Acyclicity, Contractibility, DiffModule, FreeComplex,
    Grading,
};
use diffmod::rank::{check_height_bound, inner_rank_factor_rank1, monomial_ideal_height, Height};
use diffmod::ring::{Ring, RingElem, RingMatrix};
use diffmod::spectral::{check_convergence, first_page_maps, spectral_pages};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn graded(notation: &str, rows: &[&[&str]], grading: Grading) -> Result<DiffModule, String> {
    let r = Ring::from_notation(notation).map_err(err)?;
    DiffModule::new(RingMatrix::parse(&r, rows).map_err(err)?, Some(grading)).map_err(err)
}

fn example_normal() -> Outcome {
    let d = graded(
        "Q[x,y,z]/(x^2 + y*z)!local",
        &[&["x", "y"], &["z", "-x"]],
        Grading::flat(2, 1),
    )?;
    let acyclic = is_acyclic(&d, Some(10)).map_err(err)?;
    ensure(acyclic == Acyclicity::YesUpToCutoff(10), || {
        format!("acyclicity {acyclic:?}")
    })?;
    match is_contractible(&d, Some(10)).map_err(err)? {
        Contractibility::No {
            residue_rank: Some(0),
            ..
        } => {}
        other => return Err(format!("contractibility {other:?}")),
    }
    let plain = graded(
        "Q[x,y,z]/(x^2 + y*z)",
        &[&["x", "y"], &["z", "-x"]],
        Grading::flat(2, 1),
    )?;
    ensure(
        is_acyclic(&plain, Some(10)).map_err(err)? == Acyclicity::YesUpToCutoff(10),
        || "acyclicity without !local".into(),
    )?;
    Ok("square-zero, H = 0 through degree 10, residue rank 0, not contractible".into())
}

fn dold2() -> Outcome {
    let r = Ring::integers_mod(4).map_err(err)?;
    let d = DiffModule::new(RingMatrix::from_i64(&r, &[&[2]]), None).map_err(err)?;
    ensure(homology(&d, None).map_err(err)?.is_zero(), || {
        "H(Z/4, 2) != 0".into()
    })?;
    let k = residue_module(&d).map_err(err)?;
    let h = homology(&k, None).map_err(err)?.field_dim();
    ensure(h == Some(1), || format!("dim H over Z/2 is {h:?}"))?;
    Ok("H = 0 over Z/4, dim H = 1 after base change to Z/2".into())
}

fn notaflag() -> Outcome {
    let d = graded(
        "Q[x,y]",
        &[&["x*y", "-x^2"], &["y^2", "-x*y"]],
        Grading::flat(2, 2),
    )?;
    let h = homology(&d, Some(8)).map_err(err)?;
    let g = h.graded().ok_or("not graded")?;
    let nonzero: Vec<(i64, usize)> = g
        .hilbert
        .iter()
        .filter(|(_, &v)| v > 0)
        .map(|(&k, &v)| (k, v))
        .collect();
    ensure(nonzero == vec![(1, 1)], || {
        format!("hilbert table {nonzero:?}")
    })?;
    let r = d.ring();
    for v in ["x", "y"] {
        let e = r.parse(v).map_err(err)?;
        ensure(g.annihilator.contains(&e), || {
            format!("{v} not in the verified annihilator")
        })?;
    }
    let formulas = verify_rank_formulas(&d, Some(8)).map_err(err)?;
    let q = &formulas.quantities;
    ensure(
        formulas.holds()
            && q["rank_D"] == json!(2)
            && q["rank_H"] == json!(0)
            && q["rank_delta"] == json!(1),
        || formulas.summary(),
    )?;
    let rank = verify_rank_inequality(&d, None, None, Some(8)).map_err(err)?;
    ensure(
        rank.status_of("rank >= 2d") == Some(&Status::OutOfHypothesis),
        || rank.summary(),
    )?;
    Ok("Hilbert {1: 1}, Ann contains x, y, 2 = 0 + 2*1, out-of-hypothesis".into())
}

fn section_two() -> Outcome {
    let d = graded(
        "Q[x,y]/(x^2, x*y)",
        &[
            &["0", "x", "y", "0"],
            &["0", "0", "x", "y"],
            &["0", "0", "0", "0"],
            &["0", "0", "0", "0"],
        ],
        Grading::flat(4, 1),
    )?;
    let r = d.ring().clone();
    let flag = diffmod::flags::block_partition(d.delta()).map_err(err)?;
    let maps = first_page_maps(&d, &flag).map_err(err)?;
    let want = [
        RingMatrix::parse(&r, &[&["x"]]).map_err(err)?,
        RingMatrix::parse(&r, &[&["x", "y"]]).map_err(err)?,
    ];
    ensure(maps == want, || format!("E1 maps {maps:?}"))?;
    let cutoff = 8;
    let pages = spectral_pages(&d, &flag, flag.steps() + 1, Some(cutoff)).map_err(err)?;
    let e2 = &pages[1].terms[0];
    ensure((0..=cutoff).all(|k| e2.dims.get(&k) == Some(&1)), || {
        format!("E2_0 {:?}", e2.dims)
    })?;
    let h = homology(&d, Some(cutoff)).map_err(err)?;
    ensure(
        h.graded().is_some_and(|g| g.finite_length_detected()),
        || "H(F) not finite length".into(),
    )?;
    let conv = check_convergence(&d, &pages, Some(cutoff)).map_err(err)?;
    ensure(conv.holds(), || format!("{:?}", conv.mismatches))?;
    Ok("E1 = R^2 -> R -> R by (x y), (x); E2_0 = k[y] through 8; H finite length".into())
}

fn koszul_optimal() -> Outcome {
    let r = Ring::from_notation("Q[x,y,z]").map_err(err)?;
    let cutoff = 6;
    let mut margins = Vec::new();
    for e in 1..=3usize {
        let vars: Vec<RingElem> = (0..e).map(|i| r.var(i)).collect();
        let d = koszul(&r, &vars).map_err(err)?;
        ensure(d.size() == 1 << e, || {
            format!("rank {} for d = {e}", d.size())
        })?;
        let bound = class_upper_bound(&d, None).map_err(err)?.ok_or("no flag")?;
        ensure(bound.bound == e, || {
            format!("class bound {} for d = {e}", bound.bound)
        })?;
        let h = homology(&d, Some(cutoff)).map_err(err)?;
        let ann = &h.graded().ok_or("not graded")?.annihilator;
        let height = monomial_ideal_height(&r, ann).map_err(err)?;
        ensure(height == Height::Finite(e), || {
            format!("height {height:?} for d = {e}")
        })?;
        let class = verify_class_inequality(&d, None, None, cutoff).map_err(err)?;
        ensure(
            class.status_of("class >= height Ann H") == Some(&Status::Holds),
            || class.summary(),
        )?;
        ensure(
            class.quantities["l"] == json!(e) && class.quantities["d"] == json!(e),
            || class.summary(),
        )?;
        let rank = verify_rank_inequality(&d, None, None, Some(cutoff)).map_err(err)?;
        ensure(rank.holds(), || rank.summary())?;
        ensure(rank.quantities["margin_2_pow_d"] == json!(0), || {
            rank.summary()
        })?;
        // 2d and 2^d agree for d <= 2; at d = 3 rank 8 exceeds 2d = 6
        let m2d = rank.quantities["margin_2d"].as_i64().ok_or("margin_2d")?;
        ensure(m2d == (1i64 << e) - 2 * e as i64, || rank.summary())?;
        margins.push(m2d);
    }
    Ok(format!(
        "rank 2^d, class d, height d, margin vs 2^d = 0, margin vs 2d = {margins:?}"
    ))
}

fn check_standard_form(d: &DiffModule) -> Result<bool, String> {
    let acyclic = is_acyclic(d, None).map_err(err)? == Acyclicity::Yes;
    let yes = match standard_form_test(d, None).map_err(err)? {
        StandardForm::Yes(b) => {
            let s = d.size();
            let sf = b
                .conjugator
                .mul(d.delta())
                .map_err(err)?
                .mul(&b.inverse)
                .map_err(err)?;
            ensure(sf == standard_form_matrix(d.ring(), s / 2), || {
                format!("bad conjugator for {}", d.delta())
            })?;
            let id = b.conjugator.mul(&b.inverse).map_err(err)?;
            ensure(id == RingMatrix::identity(d.ring(), s), || {
                "conjugator inverse mismatch".into()
            })?;
            true
        }
        StandardForm::No(_) => false,
        StandardForm::Unknown(why) => return Err(why),
    };
    ensure(yes == acyclic, || {
        format!(
            "acyclic = {acyclic}, standard form = {yes} for {}",
            d.delta()
        )
    })?;
    Ok(yes)
}

fn triviality() -> Outcome {
    let f2 = fp(2);
    let (mut total, mut acyclic) = (0usize, 0usize);
    for s in 1..=4usize {
        let n = s * s;
        for bits in 0u32..(1 << n) {
            let bit = |i: usize, j: usize| (bits >> (i * s + j)) & 1;
            let square_zero = (0..s).all(|i| {
                (0..s).all(|j| (0..s).map(|k| bit(i, k) & bit(k, j)).sum::<u32>() % 2 == 0)
            });
            if !square_zero {
                continue;
            }
            let mut m = RingMatrix::zeros(&f2, s, s);
            for i in 0..s {
                for j in 0..s {
                    m.set(i, j, f2.from_i64(bit(i, j) as i64));
                }
            }
            let d = DiffModule::new(m, None).map_err(err)?;
            total += 1;
            acyclic += check_standard_form(&d)? as usize;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut random_acyclic = 0;
    for _ in 0..200 {
        let s = rng.gen_range(1..=6);
        let d = random_square_zero(5, s, &mut rng);
        random_acyclic += check_standard_form(&d)? as usize;
    }
    Ok(format!(
        "F2: {total} square-zero matrices ({acyclic} acyclic); F5: 200 random ({random_acyclic} acyclic)"
    ))
}

fn random_poly(r: &Ring, rng: &mut ChaCha8Rng) -> RingElem {
    let x = r.var(0);
    (0..=2u32).fold(r.zero(), |acc, k| {
        let c = r.from_i64(rng.gen_range(0..7));
        r.add(&acc, &r.mul(&c, &r.pow(&x, k)))
    })
}

fn outer(r: &Ring, col: &[RingElem], row: &[RingElem]) -> RingMatrix {
    let rows = col
        .iter()
        .map(|c| row.iter().map(|v| r.mul(c, v)).collect())
        .collect();
    RingMatrix::from_rows(r, rows).expect("rectangular")
}

fn rank_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let z = Ring::integers();
    let f7x = Ring::from_notation("F7[x]").map_err(err)?;
    for ring in [&z, &f7x] {
        for _ in 0..200 {
            let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let entry = |rng: &mut ChaCha8Rng| {
                if ring.is_integers() {
                    ring.from_i64(rng.gen_range(-9..=9))
                } else {
                    random_poly(ring, rng)
                }
            };
            let col: Vec<RingElem> = (0..m).map(|_| entry(&mut rng)).collect();
            let row: Vec<RingElem> = (0..n).map(|_| entry(&mut rng)).collect();
            let a = outer(ring, &col, &row);
            let f = inner_rank_factor_rank1(&a).map_err(err)?;
            ensure(f.column.mul(&f.row).map_err(err)? == a, || {
                format!("round trip failed for {a}")
            })?;
        }
    }
    // monomial fixtures over F7[x,y,z,w]
    let r = Ring::from_notation("F7[x,y,z,w]").map_err(err)?;
    let monomial = |rng: &mut ChaCha8Rng| {
        (0..4).fold(r.one(), |acc, v| {
            r.mul(&acc, &r.pow(&r.var(v), rng.gen_range(0..=2)))
        })
    };
    let mut unit = 0;
    for _ in 0..100 {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let col: Vec<RingElem> = (0..m).map(|_| monomial(&mut rng)).collect();
        let row: Vec<RingElem> = (0..n).map(|_| monomial(&mut rng)).collect();
        let b = check_height_bound(&outer(&r, &col, &row)).map_err(err)?;
        ensure(b.holds(), || format!("height bound fails: {:?}", b))?;
        unit += b.unit_ideal() as usize;
    }
    Ok(format!("400 factorizations round-trip; 100 monomial fixtures within the height bound ({unit} unit ideal)"))
}

/// A random flag: the kernel flag re-conjugated by an upper unitriangular
/// matrix, which keeps it strictly upper triangular, then a random valid
/// partition of the result.
fn random_flag(d: &DiffModule, rng: &mut ChaCha8Rng) -> Result<FlagCertificate, String> {
    let ring = d.ring();
    let s = d.size();
    let kernel = find_sut_conjugation(d).map_err(err)?;
    let mut t = RingMatrix::identity(ring, s);
    for i in 0..s {
        for j in i + 1..s {
            t.set(i, j, ring.from_i64(rng.gen_range(0..5)));
        }
    }
    let u = match &kernel.conjugator {
        Some(c) => t.mul(c).map_err(err)?,
        None => t,
    };
    let a = u
        .mul(d.delta())
        .map_err(err)?
        .mul(&u.inverse().map_err(err)?)
        .map_err(err)?;
    let partition = loop {
        let mut cuts: Vec<usize> = (1..s).filter(|_| rng.gen_bool(0.6)).collect();
        cuts.push(s);
        if check_partition(&a, &cuts).is_ok() {
            break cuts;
        }
    };
    FlagCertificate::new(Some(u), partition).map_err(err)
}

fn spectral_random() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut steps_seen = std::collections::BTreeSet::new();
    for _ in 0..100 {
        let s = rng.gen_range(1..=8);
        let d = random_square_zero(5, s, &mut rng);
        let flag = random_flag(&d, &mut rng)?;
        verify_certificate(&d, &flag).map_err(err)?;
        let l = flag.steps();
        steps_seen.insert(l);
        let pages = spectral_pages(&d, &flag, l + 3, None).map_err(err)?;
        // E^{l+1} is stable and nothing changes afterwards
        ensure(pages[l].stable(), || {
            format!("E^{} not stable for {}", l + 1, d.delta())
        })?;
        for later in &pages[l + 1..] {
            let same = later
                .terms
                .iter()
                .zip(&pages[l].terms)
                .all(|(a, b)| a.dims == b.dims);
            ensure(same, || {
                format!("page {} differs from E^{}", later.r, l + 1)
            })?;
        }
        let conv = check_convergence(&d, &pages, None).map_err(err)?;
        ensure(conv.holds(), || {
            format!("convergence fails for {}", d.delta())
        })?;
    }
    Ok(format!(
        "100 instances converge and stabilize by E^(l+1); l in {steps_seen:?}"
    ))
}

fn search() -> Outcome {
    let two = search_conjecture(&SearchConfig::exhaustive(2, 2, 4)).map_err(err)?;
    ensure(two.min_rank == Some(4), || {
        format!("d = 2 minimum {:?}", two.min_rank)
    })?;
    let mut cfg = SearchConfig::exhaustive(2, 3, 6);
    cfg.folds = Some(vec![1, 2, 2, 1]);
    let three = search_conjecture(&cfg).map_err(err)?;
    let at6 = three.by_size.get(&6).ok_or("size 6 not searched")?;
    ensure(at6.admissible == 0, || {
        format!("{} admissible at size 6", at6.admissible)
    })?;
    ensure(three.min_rank.is_none_or(|m| m >= 8), || {
        format!("d = 3 minimum {:?}", three.min_rank)
    })?;
    Ok(format!(
        "F2[x,y] min rank 4 ({} scanned); F2[x,y,z] none admissible through size 6 ({} scanned)",
        two.instances_scanned, three.instances_scanned
    ))
}

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let (mut quasi, mut not_quasi) = (0, 0);
    for _ in 0..100 {
        let p = [2, 3, 5, 7][rng.gen_range(0..4)];
        let ring = fp(p);
        let d = random_square_zero(p, rng.gen_range(0..=6), &mut rng);
        let left = tensor(&FreeComplex::single(&ring, 0, 1), &d).map_err(err)?;
        ensure(left.delta() == d.delta(), || "left unit".into())?;

        let len = rng.gen_range(1..=4);
        let ranks: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=3)).collect();
        let x = random_complex(p, &ranks, rng.gen_range(-2..=2), &mut rng);
        let right = tensor(&x, &DiffModule::zero(&ring, 1)).map_err(err)?;
        ensure(right.delta() == compress(&x).delta(), || {
            "right unit".into()
        })?;

        let sd = suspension(&d);
        ensure(suspension(&sd) == d, || "suspension twice".into())?;
        ensure(
            homology(&sd, None).map_err(err)? == homology(&d, None).map_err(err)?,
            || "H(suspension)".into(),
        )?;

        let e = random_square_zero(p, rng.gen_range(0..=6), &mut rng);
        // half the time map into a conjugate of D, where isomorphisms exist
        let (target, phi) = if rng.gen_bool(0.5) {
            let u = random_invertible(&ring, p, d.size(), &mut rng);
            let t = d.conjugate(&u).map_err(err)?;
            let phi = random_morphism(p, &d, &t, &mut rng);
            (t, phi)
        } else {
            let phi = random_morphism(p, &d, &e, &mut rng);
            (e, phi)
        };
        let c = cone(&phi, &d, &target).map_err(err)?;
        let r = induced_rank(p, &phi, &d, &target);
        let (hd, he) = (field_homology(p, &d), field_homology(p, &target));
        let is_quasi = r == hd && r == he;
        let cone_acyclic = is_acyclic(&c, None).map_err(err)? == Acyclicity::Yes;
        ensure(is_quasi == cone_acyclic, || {
            format!("quasi-iso {is_quasi}, acyclic cone {cone_acyclic}")
        })?;
        ensure(field_homology(p, &c) == hd + he - 2 * r, || {
            "cone homology count".into()
        })?;
        if is_quasi {
            quasi += 1
        } else {
            not_quasi += 1
        }
    }
    Ok(format!(
        "100 instances each: left unit, right unit, suspension, cone ({quasi} quasi-isomorphisms, {not_quasi} not)"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "normal example",
            budget: Duration::from_secs(1),
            run: example_normal,
        },
        Criterion {
            id: 2,
            name: "Z/4 with 2",
            budget: Duration::from_secs(1),
            run: dold2,
        },
        Criterion {
            id: 3,
            name: "rank-two non-flag",
            budget: Duration::from_secs(1),
            run: notaflag,
        },
        Criterion {
            id: 4,
            name: "spectral example",
            budget: Duration::from_secs(5),
            run: section_two,
        },
        Criterion {
            id: 5,
            name: "Koszul d = 1..3",
            budget: Duration::from_secs(10),
            run: koszul_optimal,
        },
        Criterion {
            id: 6,
            name: "acyclic iff standard form",
            budget: Duration::from_secs(60),
            run: triviality,
        },
        Criterion {
            id: 7,
            name: "rank-one factorization",
            budget: Duration::from_secs(30),
            run: rank_one,
        },
        Criterion {
            id: 8,
            name: "spectral convergence",
            budget: Duration::from_secs(60),
            run: spectral_random,
        },
        Criterion {
            id: 9,
            name: "small-rank search",
            budget: Duration::from_secs(600),
            run: search,
        },
        Criterion {
            id: 10,
            name: "unit, suspension, cone",
            budget: Duration::from_secs(30),
            run: identities,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed > c.budget {
                Err(format!("{msg}; over budget"))
            } else {
                Ok(msg)
            }
        });
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += outcome.is_err() as usize;
        println!(
            "criterion {:>2} {tag}: {} [{:.2}s of {}s] {msg}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

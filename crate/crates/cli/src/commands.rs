use std::fmt::Write as _;
use std::path::PathBuf;

use diffmod::flags::{
    class_upper_bound, standard_form_test, ClassBound, FlagCertificate, StandardForm,
};
use diffmod::harness::{
    search_conjecture, verify_class_inequality, verify_fold_bounds, verify_rank_formulas,
    verify_rank_inequality, InequalityReport, SearchConfig, SearchMode,
};
use diffmod::json::{
    certificate_from_json, certificate_to_json, complex_from_json, matrix_from_json,
    matrix_to_json, module_from_json, module_to_json,
};
use diffmod::module::{
    compress, cone, homology_with, is_contractible, koszul, tensor, Acyclicity, Contractibility,
    DiffModule, HomologyPresentation,
};
use diffmod::rank::{check_height_bound, determinantal_rank, inner_rank_factor_rank1};
use diffmod::ring::BaseField;
use diffmod::spectral::{check_convergence, spectral_pages};
use diffmod::{Error, Ring, RingElem};
use serde_json::{json, Value};

use crate::input::{read_json, read_json_path, split_list};
use crate::{Command, Common, Failure, Outcome};

type Res = Result<Outcome, Failure>;

fn ok(report: Value, summary: String) -> Res {
    Ok(Outcome {
        report,
        summary,
        code: 0,
    })
}

fn failed(report: Value, summary: String) -> Res {
    Ok(Outcome {
        report,
        summary,
        code: 1,
    })
}

/// The cutoff from the command line or the instance, required for graded
/// rings.
fn cutoff(common: &Common, v: &Value, ring: &Ring) -> Result<Option<i64>, Failure> {
    let c = common
        .cutoff
        .or_else(|| v.get("cutoff").and_then(Value::as_i64));
    if c.is_none() && ring.is_graded() {
        return Err(Failure::usage(format!(
            "{} is graded: pass --cutoff (or a \"cutoff\" key in the input)",
            ring.spec()
        )));
    }
    Ok(c)
}

fn parse_elements(ring: &Ring, list: &str) -> Result<Vec<RingElem>, Failure> {
    split_list(list)
        .iter()
        .map(|s| ring.parse(s).map_err(Failure::from))
        .collect()
}

fn load_module(input: &Option<PathBuf>) -> Result<(Value, DiffModule), Failure> {
    let v = read_json(input.as_deref())?;
    let d = module_from_json(&v)?;
    Ok((v, d))
}

fn load_flag(path: &Option<PathBuf>, d: &DiffModule) -> Result<Option<FlagCertificate>, Failure> {
    path.as_ref()
        .map(|p| certificate_from_json(&read_json_path(p)?, d.ring()).map_err(Failure::from))
        .transpose()
}

fn best_flag(
    d: &DiffModule,
    supplied: Option<&FlagCertificate>,
) -> Result<Option<ClassBound>, Failure> {
    Ok(class_upper_bound(d, supplied)?)
}

fn acyclicity(a: &Acyclicity) -> String {
    match a {
        Acyclicity::Yes => "yes".into(),
        Acyclicity::No => "no".into(),
        Acyclicity::YesUpToCutoff(c) => format!("yes up to degree {c}"),
    }
}

fn base_field(ring: &Ring) -> Option<BaseField> {
    ring.as_field().or_else(|| ring.graded().map(|g| g.base))
}

pub fn run(command: &Command, common: &Common) -> Res {
    match command {
        Command::Check { input } => check(input),
        Command::Homology { input, annihilator } => {
            homology_cmd(input, annihilator.as_deref(), common)
        }
        Command::Contractible { input } => contractible(input, common),
        Command::Flag { input } => flag(input),
        Command::StandardForm { input } => standard_form(input, common),
        Command::Spectral { input, flag, r_max } => spectral(input, flag, *r_max, common),
        Command::Koszul {
            ring,
            vars,
            elements,
        } => koszul_cmd(ring, vars.as_deref(), elements.as_deref()),
        Command::Compress { input } => {
            let x = complex_from_json(&read_json(input.as_deref())?)?;
            let d = compress(&x);
            ok(
                module_to_json(&d),
                format!("compressed module of rank {}\n", d.size()),
            )
        }
        Command::Cone {
            map,
            source,
            target,
        } => {
            let d = module_from_json(&read_json_path(source)?)?;
            let e = module_from_json(&read_json_path(target)?)?;
            let phi = matrix_from_json(&read_json_path(map)?, Some(d.ring()))?;
            match cone(&phi, &d, &e) {
                Ok(c) => ok(module_to_json(&c), format!("cone of rank {}\n", c.size())),
                Err(err @ Error::NotAMorphism { .. }) => {
                    failed(json!({"error": err.to_string()}), format!("{err}\n"))
                }
                Err(err) => Err(err.into()),
            }
        }
        Command::Tensor { complex, module } => {
            let x = complex_from_json(&read_json_path(complex)?)?;
            let d = module_from_json(&read_json_path(module)?)?;
            let t = tensor(&x, &d)?;
            ok(
                module_to_json(&t),
                format!("tensor product of rank {}\n", t.size()),
            )
        }
        Command::Rank { input, height } => rank(input, *height),
        Command::Factor { input } => factor(input),
        Command::Verify {
            input,
            class,
            rank,
            formulas,
            folds,
            flag,
            annihilator,
        } => verify(
            input,
            Selection {
                class: *class,
                rank: *rank,
                formulas: *formulas,
                folds: *folds,
            },
            flag,
            annihilator.as_deref(),
            common,
        ),
        Command::Search {
            ring,
            max_size,
            folds,
            sample,
            jobs,
            max_witnesses,
        } => search(
            ring,
            *max_size,
            folds.as_deref(),
            *sample,
            *jobs,
            *max_witnesses,
            common,
        ),
    }
}

fn check(input: &Option<PathBuf>) -> Res {
    let v = read_json(input.as_deref())?;
    let m = matrix_from_json(&v, None)?;
    match module_from_json(&v) {
        Ok(d) => ok(
            json!({
                "square_zero": true,
                "ring": m.ring().spec().to_string(),
                "size": d.size(),
                "graded": d.grading().is_some(),
                "strictly_upper_triangular": d.delta().is_strictly_upper_triangular(),
            }),
            format!(
                "square-zero: yes\nsize: {}\nring: {}\n",
                d.size(),
                m.ring().spec()
            ),
        ),
        Err(
            e @ (Error::NotSquareZero { .. }
            | Error::DimensionMismatch(_)
            | Error::GradingMismatch { .. }),
        ) => {
            let square_zero =
                !matches!(e, Error::NotSquareZero { .. } | Error::DimensionMismatch(_));
            failed(
                json!({"square_zero": square_zero, "ring": m.ring().spec().to_string(), "reason": e.to_string()}),
                format!(
                    "square-zero: {}\nreason: {e}\n",
                    if square_zero { "yes" } else { "no" }
                ),
            )
        }
        Err(e) => Err(e.into()),
    }
}

fn homology_cmd(input: &Option<PathBuf>, annihilator: Option<&str>, common: &Common) -> Res {
    let (v, d) = load_module(input)?;
    let ring = d.ring();
    let c = cutoff(common, &v, ring)?;
    let candidates = match annihilator {
        Some(list) => parse_elements(ring, list)?,
        None => Vec::new(),
    };
    let h = homology_with(&d, c, &candidates)?;
    let mut summary = String::new();
    match &h {
        HomologyPresentation::Field { dim, .. } => writeln!(summary, "dim H = {dim}").unwrap(),
        HomologyPresentation::Integers { invariant_factors }
        | HomologyPresentation::IntegersMod {
            invariant_factors, ..
        } => {
            let parts: Vec<String> = invariant_factors
                .iter()
                .map(|f| {
                    if f == &0.into() {
                        "Z".to_string()
                    } else {
                        format!("Z/{f}")
                    }
                })
                .collect();
            writeln!(
                summary,
                "H = {}",
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            )
            .unwrap()
        }
        HomologyPresentation::Graded(g) => {
            writeln!(summary, "degree  dim H").unwrap();
            for (k, n) in &g.hilbert {
                writeln!(summary, "{k:>6}  {n}").unwrap();
            }
            let ann: Vec<String> = g.annihilator.iter().map(|a| ring.fmt_elem(a)).collect();
            writeln!(
                summary,
                "annihilator (verified up to degree {}): {}",
                g.cutoff,
                ann.join(", ")
            )
            .unwrap();
            writeln!(
                summary,
                "finite length detected: {}",
                g.finite_length_detected()
            )
            .unwrap();
        }
    }
    let report = h.to_json(ring);
    if let Some(g) = h.graded() {
        if !g.rejected.is_empty() {
            let bad: Vec<String> = g.rejected.iter().map(|a| ring.fmt_elem(a)).collect();
            writeln!(summary, "rejected: {}", bad.join(", ")).unwrap();
            return failed(report, summary);
        }
    }
    ok(report, summary)
}

fn contractible(input: &Option<PathBuf>, common: &Common) -> Res {
    let (v, d) = load_module(input)?;
    let c = cutoff(common, &v, d.ring())?;
    match is_contractible(&d, c)? {
        Contractibility::Yes(b) => ok(
            json!({
                "contractible": true,
                "conjugator": matrix_to_json(&b.conjugator),
                "inverse": matrix_to_json(&b.inverse),
            }),
            "contractible: yes\n".into(),
        ),
        Contractibility::No {
            reasons,
            acyclic,
            residue_rank,
        } => {
            let mut summary = "contractible: no\n".to_string();
            for r in &reasons {
                writeln!(summary, "  {r}").unwrap();
            }
            ok(
                json!({
                    "contractible": false,
                    "reasons": reasons,
                    "acyclic": acyclic.as_ref().map(acyclicity),
                    "residue_rank": residue_rank,
                }),
                summary,
            )
        }
    }
}

fn flag(input: &Option<PathBuf>) -> Res {
    let (_, d) = load_module(input)?;
    match best_flag(&d, None)? {
        Some(b) => ok(
            json!({
                "flag": certificate_to_json(&b.certificate),
                "class_upper_bound": b.bound,
                "source": b.source.name(),
                "fold_ranks": b.certificate.fold_ranks(),
            }),
            format!(
                "class upper bound: {} ({})\nfold ranks: {:?}\n",
                b.bound,
                b.source.name(),
                b.certificate.fold_ranks()
            ),
        ),
        None => ok(
            json!({"flag": Value::Null, "reason": "no flag certificate found"}),
            "no flag certificate found\n".into(),
        ),
    }
}

fn standard_form(input: &Option<PathBuf>, common: &Common) -> Res {
    let (v, d) = load_module(input)?;
    let c = cutoff(common, &v, d.ring()).or(Ok::<_, Failure>(None))?;
    Ok(match standard_form_test(&d, c)? {
        StandardForm::Yes(b) => Outcome {
            report: json!({
                "verdict": "yes",
                "conjugator": matrix_to_json(&b.conjugator),
                "inverse": matrix_to_json(&b.inverse),
            }),
            summary: "standard form: yes\n".into(),
            code: 0,
        },
        StandardForm::No(reasons) => Outcome {
            summary: format!("standard form: no\n  {}\n", reasons.join("\n  ")),
            report: json!({"verdict": "no", "reasons": reasons}),
            code: 0,
        },
        StandardForm::Unknown(reason) => Outcome {
            summary: format!("standard form: unknown\n  {reason}\n"),
            report: json!({"verdict": "unknown", "reason": reason}),
            code: 0,
        },
    })
}

fn spectral(
    input: &Option<PathBuf>,
    flag: &Option<PathBuf>,
    r_max: Option<usize>,
    common: &Common,
) -> Res {
    let (v, d) = load_module(input)?;
    let ring = d.ring();
    let c = cutoff(common, &v, ring)?;
    let cert = match load_flag(flag, &d)? {
        Some(f) => f,
        None => match best_flag(&d, None)? {
            Some(b) => b.certificate,
            None => {
                return failed(
                    json!({"error": "no flag certificate found; supply one with --flag"}),
                    "no flag certificate found\n".into(),
                )
            }
        },
    };
    let r_max = r_max.unwrap_or(cert.steps() + 1).max(1);
    let pages = spectral_pages(&d, &cert, r_max, c)?;
    let base = base_field(ring).expect("spectral pages need a field or graded ring");
    let mut summary = String::new();
    for p in &pages {
        let dims: Vec<String> = p
            .terms
            .iter()
            .map(|t| format!("E{}_{} = {}", p.r, t.i, t.total()))
            .collect();
        writeln!(
            summary,
            "page {}{}: {}",
            p.r,
            if p.stable() { " (stable)" } else { "" },
            dims.join(", ")
        )
        .unwrap();
    }
    let (convergence, code) = match check_convergence(&d, &pages, c) {
        Ok(rep) => {
            writeln!(
                summary,
                "convergence: {}",
                if rep.holds() { "holds" } else { "FAILS" }
            )
            .unwrap();
            let code = u8::from(!rep.holds());
            (rep.to_json(), code)
        }
        Err(Error::NotStabilized(msg)) => {
            writeln!(summary, "convergence: not checked, {msg}").unwrap();
            (json!({"not_stabilized": msg}), 0)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        report: json!({
            "flag": certificate_to_json(&cert),
            "pages": pages.iter().map(|p| p.to_json(&base)).collect::<Vec<_>>(),
            "convergence": convergence,
        }),
        summary,
        code,
    })
}

fn koszul_cmd(ring: &str, vars: Option<&str>, elements: Option<&str>) -> Res {
    let ring = Ring::from_notation(ring)?;
    let elems = match (vars, elements) {
        (Some(v), _) => split_list(v)
            .iter()
            .map(|name| {
                ring.var_by_name(name).ok_or_else(|| {
                    Failure::usage(format!("{name} is not a variable of {}", ring.spec()))
                })
            })
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(e)) => parse_elements(&ring, e)?,
        (None, None) => return Err(Failure::usage("koszul needs --vars or --elements")),
    };
    let d = koszul(&ring, &elems)?;
    let mut report = module_to_json(&d);
    // a default truncation two degrees past the generators, so that
    // finite length can be seen
    if let Some(g) = d.grading() {
        let top = g.generator_degrees.iter().copied().max().unwrap_or(0);
        report["cutoff"] = json!(top + 2);
    }
    ok(
        report,
        format!(
            "Koszul module of rank {} on {} elements\n",
            d.size(),
            elems.len()
        ),
    )
}

fn rank(input: &Option<PathBuf>, height: bool) -> Res {
    let v = read_json(input.as_deref())?;
    let m = matrix_from_json(&v, None)?;
    let rep = determinantal_rank(&m)?;
    let mut report = rep.to_json(m.ring());
    let mut summary = format!(
        "determinantal rank: {}\nwitness rows {:?}, cols {:?}\n",
        rep.rank, rep.witness_rows, rep.witness_cols
    );
    let mut code = 0;
    if height {
        let hb = check_height_bound(&m)?;
        writeln!(
            summary,
            "height I_1 = {} against max(m, n) = {}",
            hb.height.to_json(),
            hb.bound
        )
        .unwrap();
        if !hb.holds() {
            code = 1;
        }
        report["height_bound"] = hb.to_json();
    }
    Ok(Outcome {
        report,
        summary,
        code,
    })
}

fn factor(input: &Option<PathBuf>) -> Res {
    let v = read_json(input.as_deref())?;
    let m = matrix_from_json(&v, None)?;
    match inner_rank_factor_rank1(&m) {
        Ok(f) => {
            let product = f.column.mul(&f.row)?;
            let matches = product == m;
            let report = json!({
                "column": matrix_to_json(&f.column)["entries"],
                "row": matrix_to_json(&f.row)["entries"],
                "product_matches": matches,
            });
            let summary = format!("A = column * row\ncolumn: {}\nrow: {}\n", f.column, f.row);
            if matches {
                ok(report, summary)
            } else {
                failed(report, summary)
            }
        }
        Err(e @ Error::RankTooLarge(_)) => {
            failed(json!({"error": e.to_string()}), format!("{e}\n"))
        }
        Err(e) => Err(e.into()),
    }
}

struct Selection {
    class: bool,
    rank: bool,
    formulas: bool,
    folds: bool,
}

fn verify(
    input: &Option<PathBuf>,
    mut sel: Selection,
    flag: &Option<PathBuf>,
    annihilator: Option<&str>,
    common: &Common,
) -> Res {
    let (v, d) = load_module(input)?;
    let ring = d.ring();
    let c = cutoff(common, &v, ring)?;
    let supplied = load_flag(flag, &d)?;
    let ann = annihilator.map(|a| parse_elements(ring, a)).transpose()?;
    if !(sel.class || sel.rank || sel.formulas || sel.folds) {
        let domain = ring.is_supported_domain();
        sel = Selection {
            class: ring.is_graded(),
            rank: ring.is_graded() || ring.is_integers() || ring.is_field(),
            formulas: domain,
            folds: domain,
        };
    }
    let mut reports: Vec<InequalityReport> = Vec::new();
    let mut notes = Vec::new();
    if sel.formulas {
        reports.push(verify_rank_formulas(&d, c)?);
    }
    if sel.folds {
        match best_flag(&d, supplied.as_ref())? {
            Some(b) => reports.push(verify_fold_bounds(&d, &b.certificate)?),
            None => notes.push("fold bounds skipped: no flag certificate found".to_string()),
        }
    }
    if sel.class {
        let c = c.ok_or_else(|| {
            Failure::usage("the class inequality needs a graded ring and a cutoff")
        })?;
        reports.push(verify_class_inequality(
            &d,
            supplied.as_ref(),
            ann.as_deref(),
            c,
        )?);
    }
    if sel.rank {
        reports.push(verify_rank_inequality(
            &d,
            supplied.as_ref(),
            ann.as_deref(),
            c,
        )?);
    }
    let fatal = reports
        .iter()
        .map(|r| r.fatal_violations().count())
        .sum::<usize>();
    let conjecture: Vec<String> = reports
        .iter()
        .flat_map(|r| r.violations().filter(|c| !c.fatal).map(|c| c.name.clone()))
        .collect();
    let mut summary: String = reports.iter().map(InequalityReport::summary).collect();
    for n in &notes {
        writeln!(summary, "{n}").unwrap();
    }
    if !conjecture.is_empty() {
        eprintln!(
            "diffmod: conjectured bound fails ({}); audit this instance by hand",
            conjecture.join(", ")
        );
    }
    Ok(Outcome {
        report: json!({
            "reports": reports.iter().map(InequalityReport::to_json).collect::<Vec<_>>(),
            "holds": reports.iter().all(InequalityReport::holds),
            "fatal_violations": fatal,
            "notes": notes,
        }),
        summary,
        code: u8::from(fatal > 0),
    })
}

fn search(
    ring: &str,
    max_size: usize,
    folds: Option<&str>,
    sample: Option<usize>,
    jobs: usize,
    max_witnesses: usize,
    common: &Common,
) -> Res {
    let r = Ring::from_notation(ring)?;
    let (prime, nvars) = match (r.graded(), r.graded().map(|g| g.base)) {
        (Some(g), Some(BaseField::PrimeField { p })) if g.relations.is_empty() => (p, g.nvars()),
        _ => {
            return Err(Failure::usage(format!(
                "search needs F_p[x_1..x_n] without relations, got {}",
                r.spec()
            )))
        }
    };
    let folds = folds
        .map(|f| {
            split_list(f)
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Failure::usage(format!("bad fold rank {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let mode = match sample {
        Some(count) => {
            let seed = match std::env::var("DIFFMOD_SEED") {
                Ok(s) => s.parse().map_err(|_| {
                    Failure::usage(format!("DIFFMOD_SEED must be an integer, got {s:?}"))
                })?,
                Err(_) => 0,
            };
            SearchMode::Sample { count, seed }
        }
        None => SearchMode::Exhaustive,
    };
    let mut cfg = SearchConfig::exhaustive(prime, nvars, max_size);
    cfg.folds = folds;
    cfg.mode = mode;
    cfg.jobs = jobs.max(1);
    cfg.max_witnesses = max_witnesses;
    if let Some(c) = common.cutoff {
        cfg.cutoff = c;
    }
    let ledger = search_conjecture(&cfg)?;
    let mut summary = format!(
        "ring {}  d = {}  cutoff {}\n",
        ledger.ring, ledger.d, ledger.cutoff
    );
    writeln!(
        summary,
        "size  pruned  square-zero  passed-points  admissible"
    )
    .unwrap();
    for (s, st) in &ledger.by_size {
        writeln!(
            summary,
            "{s:>4}  {:>6}  {:>11}  {:>13}  {:>10}",
            st.pruned, st.square_zero, st.passed_prefilter, st.admissible
        )
        .unwrap();
    }
    writeln!(
        summary,
        "least admissible rank: {}",
        ledger
            .min_rank
            .map_or("none".to_string(), |r| r.to_string())
    )
    .unwrap();
    // rank >= 2d is a theorem for d <= 3
    let violated = ledger.d <= 3 && ledger.min_rank.is_some_and(|r| r < 2 * ledger.d);
    if ledger.counterexample_candidate() {
        eprintln!(
            "diffmod: COUNTEREXAMPLE CANDIDATE to rank >= 2^d: rank {} with d = {}; audit the witnesses by hand",
            ledger.min_rank.unwrap(),
            ledger.d
        );
    }
    Ok(Outcome {
        report: ledger.to_json(),
        summary,
        code: u8::from(violated),
    })
}

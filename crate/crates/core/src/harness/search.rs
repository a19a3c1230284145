//! Search for small differential modules with finite-length homology over
//! `F_p[x_1..x_n]`, recording the least rank seen.
//!
//! Instances are block strictly upper triangular with homogeneous linear
//! entries (flat grading, differential of degree 1). Entries of a constant
//! unit would only split off a contractible summand, so they cannot lower
//! the minimal rank. Enumeration fills each column bottom-up and checks
//! `delta^2 = 0` entry by entry.
//!
//! A finite-length instance has rank `s/2` at every point of projective
//! space over every extension of `F_p`: at the homogeneous prime of a line
//! the homology vanishes, so some `s/2` minor is nonzero at the point.
//! Points over `F_p`, `F_{p^2}` and `F_{p^3}` are checked, on leading blocks
//! as columns complete and on the whole matrix at the end. What passes goes
//! through exact graded homology.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::module_to_json;
use crate::module::{homology, DiffModule, Grading};
use crate::ring::{is_prime, Ring, RingMatrix};

/// Enumeration strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// `count` random square-zero instances per size.
    Sample {
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub prime: u64,
    pub nvars: usize,
    pub max_size: usize,
    /// Fold ranks used at the size they sum to; other sizes use singleton
    /// blocks.
    pub folds: Option<Vec<usize>>,
    pub mode: SearchMode,
    pub cutoff: i64,
    pub jobs: usize,
    pub max_witnesses: usize,
    /// Rank conditions at points; off only to audit them.
    pub point_filter: bool,
}

impl SearchConfig {
    pub fn exhaustive(prime: u64, nvars: usize, max_size: usize) -> Self {
        SearchConfig {
            prime,
            nvars,
            max_size,
            folds: None,
            mode: SearchMode::Exhaustive,
            cutoff: 6,
            jobs: 1,
            max_witnesses: 8,
            point_filter: true,
        }
    }

    fn ring_notation(&self) -> String {
        let names = var_names(self.nvars);
        format!("F{}[{}]", self.prime, names.join(","))
    }
}

fn var_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SizeStats {
    /// Partial instances cut off by the rank condition at points.
    pub pruned: u64,
    /// Complete square-zero instances that reached the point filter.
    pub square_zero: u64,
    pub passed_prefilter: u64,
    pub admissible: u64,
}

#[derive(Debug, Clone)]
pub struct SearchLedger {
    pub ring: String,
    pub d: usize,
    pub min_rank: Option<usize>,
    pub witnesses: Vec<DiffModule>,
    pub instances_scanned: u64,
    pub cutoff: i64,
    pub by_size: BTreeMap<usize, SizeStats>,
    keys: Vec<Vec<u32>>,
    max_witnesses: usize,
}

impl SearchLedger {
    fn empty(cfg: &SearchConfig) -> Self {
        SearchLedger {
            ring: cfg.ring_notation(),
            d: cfg.nvars,
            min_rank: None,
            witnesses: Vec::new(),
            instances_scanned: 0,
            cutoff: cfg.cutoff,
            by_size: BTreeMap::new(),
            keys: Vec::new(),
            max_witnesses: cfg.max_witnesses,
        }
    }

    /// A witness of rank below `2^d`: a candidate counterexample to the
    /// conjectured bound, to be audited by hand.
    pub fn counterexample_candidate(&self) -> bool {
        self.min_rank
            .is_some_and(|r| (r as u128) < 1u128 << self.d.min(100))
    }

    fn offer(&mut self, rank: usize, key: Vec<u32>, witness: impl FnOnce() -> DiffModule) {
        match self.min_rank {
            Some(m) if rank > m => return,
            Some(m) if rank == m => {}
            _ => {
                self.min_rank = Some(rank);
                self.witnesses.clear();
                self.keys.clear();
            }
        }
        if self.witnesses.len() < self.max_witnesses && !self.keys.contains(&key) {
            self.keys.push(key);
            self.witnesses.push(witness());
        }
    }

    /// Associative merge: least rank wins, witnesses are concatenated.
    pub fn merge(&mut self, other: SearchLedger) {
        self.instances_scanned += other.instances_scanned;
        for (s, st) in other.by_size {
            let e = self.by_size.entry(s).or_default();
            e.pruned += st.pruned;
            e.square_zero += st.square_zero;
            e.passed_prefilter += st.passed_prefilter;
            e.admissible += st.admissible;
        }
        let Some(r) = other.min_rank else { return };
        if self.min_rank.is_none_or(|m| r < m) {
            self.min_rank = Some(r);
            self.witnesses.clear();
            self.keys.clear();
        }
        for (key, w) in other.keys.into_iter().zip(other.witnesses) {
            self.offer(r, key, || w);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring,
            "d": self.d,
            "min_rank": self.min_rank,
            "witnesses": self.witnesses.iter().map(module_to_json).collect::<Vec<_>>(),
            "instances_scanned": self.instances_scanned,
            "cutoff": self.cutoff,
            "counterexample_candidate": self.counterexample_candidate(),
            "by_size": self.by_size.iter().map(|(s, st)| (s.to_string(), json!({
                "pruned": st.pruned,
                "square_zero": st.square_zero,
                "passed_prefilter": st.passed_prefilter,
                "admissible": st.admissible,
            }))).collect::<serde_json::Map<_, _>>(),
        })
    }
}

/// `GF(p^k)` by tables; elements are coefficient vectors in base `p` over
/// a monic irreducible of degree `k`.
struct Gf {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Gf {
    fn new(p: usize, k: usize) -> Self {
        let q = p.pow(k as u32);
        let digits = |mut x: usize| -> Vec<usize> {
            (0..k)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let encode = |c: &[usize]| c.iter().rev().fold(0, |acc, &x| acc * p + x);
        // monic of degree k without roots in F_p; irreducible for k <= 3
        let modulus: Vec<usize> = (0..q)
            .map(digits)
            .find(|low| {
                k == 1 || (0..p).all(|t| low.iter().rev().fold(1, |v, c| (v * t + c) % p) != 0)
            })
            .expect("irreducible polynomial exists");
        let mulpoly = |a: &[usize], b: &[usize]| -> Vec<usize> {
            let mut prod = vec![0; 2 * k];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            // t^k = -(low)
            for deg in (k..2 * k).rev() {
                let c = prod[deg];
                if c != 0 {
                    prod[deg] = 0;
                    for (i, m) in modulus.iter().enumerate() {
                        prod[deg - k + i] = (prod[deg - k + i] + (p - c) * m) % p;
                    }
                }
            }
            prod.truncate(k);
            prod
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&sum) as u8;
                mul[a * q + b] = encode(&mulpoly(&da, &db)) as u8;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..q)
            .map(|a| (1..q).find(|&b| mul[a * q + b] == 1).unwrap_or(0) as u8)
            .collect();
        Gf {
            q,
            add,
            mul,
            neg,
            inv,
        }
    }

    fn rank(&self, mut m: Vec<Vec<u8>>) -> usize {
        let q = self.q;
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = self.inv[m[rank][c] as usize] as usize;
            for r in 0..rows {
                let x = m[r][c] as usize;
                if r != rank && x != 0 {
                    let f = self.neg[self.mul[x * q + inv] as usize] as usize;
                    for k in c..cols {
                        let t = self.mul[f * q + m[rank][k] as usize] as usize;
                        m[r][k] = self.add[m[r][k] as usize * q + t];
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Values of every linear form at the projective points over one field.
struct PointSet {
    gf: Gf,
    /// `eval[pt][form]`.
    eval: Vec<Vec<u8>>,
}

/// Linear forms over `F_p` in `n` variables, encoded in base `p`, with
/// products and point evaluations tabulated.
struct Forms {
    p: u32,
    n: usize,
    count: u32,
    coeffs: Vec<Vec<u32>>,
    /// `prod[a * count + b]`: coefficients of `a*b` on quadratic monomials.
    prod: Vec<Vec<u32>>,
    /// Points over `F_p`, then over extensions of degree 2 and 3 while the
    /// number of points stays small.
    points: Vec<PointSet>,
    scale: Vec<Vec<u32>>,
}

const MAX_POINTS: usize = 800;

impl Forms {
    fn new(p: u32, n: usize) -> Self {
        let count = p.pow(n as u32);
        let coeffs: Vec<Vec<u32>> = (0..count)
            .map(|mut f| {
                (0..n)
                    .map(|_| {
                        let c = f % p;
                        f /= p;
                        c
                    })
                    .collect()
            })
            .collect();
        let nq = n * (n + 1) / 2;
        let qidx = |i: usize, j: usize| {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            i * n - i * (i + 1) / 2 + j
        };
        let mut prod = Vec::with_capacity((count * count) as usize);
        for a in &coeffs {
            for b in &coeffs {
                let mut q = vec![0u32; nq];
                for i in 0..n {
                    for j in 0..n {
                        let t = &mut q[qidx(i, j)];
                        *t = (*t + a[i] * b[j]) % p;
                    }
                }
                prod.push(q);
            }
        }
        let mut points = Vec::new();
        for k in 1..=3usize {
            let q = (p as usize).pow(k as u32);
            if q > 256 || q.pow(n as u32) / (q - 1) > MAX_POINTS {
                break;
            }
            let gf = Gf::new(p as usize, k);
            // projective points: first nonzero coordinate is 1
            let mut eval = Vec::new();
            for code in 0..q.pow(n as u32) {
                let pt: Vec<usize> = (0..n).map(|i| code / q.pow(i as u32) % q).collect();
                if pt.iter().find(|&&x| x != 0) != Some(&1) {
                    continue;
                }
                eval.push(
                    coeffs
                        .iter()
                        .map(|f| {
                            f.iter().zip(&pt).fold(0u8, |acc, (&c, &x)| {
                                gf.add[acc as usize * q + gf.mul[c as usize * q + x] as usize]
                            })
                        })
                        .collect(),
                );
            }
            points.push(PointSet { gf, eval });
        }
        let encode = |c: &[u32]| c.iter().rev().fold(0, |acc, &x| acc * p + x);
        let scale = (0..p)
            .map(|s| {
                coeffs
                    .iter()
                    .map(|c| encode(&c.iter().map(|x| x * s % p).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        Forms {
            p,
            n,
            count,
            coeffs,
            prod,
            points,
            scale,
        }
    }

    fn text(&self, f: u32, names: &[String]) -> String {
        let terms: Vec<String> = self.coeffs[f as usize]
            .iter()
            .zip(names)
            .filter(|(c, _)| **c != 0)
            .map(|(c, v)| {
                if *c == 1 {
                    v.clone()
                } else {
                    format!("{c}*{v}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|b| a * b % p == 1).expect("unit")
}

/// One size's enumeration problem.
struct Layout {
    s: usize,
    block: Vec<usize>,
    /// Leading positions holding row 0 against the second block. A change
    /// of variables and of basis in that block brings them to
    /// `(x_1, .., x_r, 0, .., 0)`, so only those values are tried.
    normal_prefix: usize,
    /// Nonzero positions in fill order: column by column, rows bottom-up.
    positions: Vec<(usize, usize)>,
}

impl Layout {
    fn new(folds: &[usize]) -> Self {
        let block: Vec<usize> = folds
            .iter()
            .enumerate()
            .flat_map(|(b, &f)| std::iter::repeat_n(b, f))
            .collect();
        let s = block.len();
        let mut positions = Vec::new();
        for j in 0..s {
            for i in (0..j).rev() {
                if block[i] < block[j] {
                    positions.push((i, j));
                }
            }
        }
        let normal_prefix = match folds {
            [1, f1, ..] => *f1,
            _ => 0,
        };
        Layout {
            s,
            block,
            normal_prefix,
            positions,
        }
    }
}

struct Searcher<'a> {
    cfg: &'a SearchConfig,
    forms: &'a Forms,
    ring: &'a Ring,
    names: Vec<String>,
}

impl Searcher<'_> {
    /// `delta^2` vanishes at `(i, j)`, given column `j` filled below row `i`.
    fn square_zero_at(&self, a: &[Vec<u32>], i: usize, j: usize) -> bool {
        let f = self.forms;
        let mut acc = vec![0u32; f.n * (f.n + 1) / 2];
        for k in i + 1..j {
            let (x, y) = (a[i][k], a[k][j]);
            if x == 0 || y == 0 {
                continue;
            }
            for (t, q) in acc.iter_mut().zip(&f.prod[(x * f.count + y) as usize]) {
                *t = (*t + q) % f.p;
            }
        }
        acc.iter().all(|&t| t == 0)
    }

    /// With columns `0..=j` filled, each later column adds at most one to
    /// the rank at a point, so the leading block must already reach
    /// `s/2 - (s - 1 - j)`.
    fn leading_rank_ok(&self, a: &[Vec<u32>], j: usize) -> bool {
        let s = a.len();
        let need = (s / 2 + j + 1).saturating_sub(s);
        if need == 0 || !self.cfg.point_filter {
            return true;
        }
        self.forms.points.iter().all(|set| {
            set.eval.iter().all(|ev| {
                let m = a[..=j]
                    .iter()
                    .map(|row| row[..=j].iter().map(|&f| ev[f as usize]).collect())
                    .collect();
                set.gf.rank(m) >= need
            })
        })
    }

    fn prefilter(&self, a: &[Vec<u32>]) -> bool {
        let s = a.len();
        if !self.cfg.point_filter {
            return true;
        }
        self.forms.points.iter().all(|set| {
            set.eval.iter().all(|ev| {
                let m = a
                    .iter()
                    .map(|row| row.iter().map(|&f| ev[f as usize]).collect())
                    .collect();
                set.gf.rank(m) == s / 2
            })
        })
    }

    fn module(&self, a: &[Vec<u32>]) -> DiffModule {
        let rows: Vec<Vec<String>> = a
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&f| self.forms.text(f, &self.names))
                    .collect()
            })
            .collect();
        let refs: Vec<Vec<&str>> = rows
            .iter()
            .map(|r| r.iter().map(String::as_str).collect())
            .collect();
        let refs: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
        let m = RingMatrix::parse(self.ring, &refs).expect("linear forms parse");
        DiffModule::new(m, Some(Grading::flat(a.len(), 1))).expect("square-zero instance")
    }

    /// Least entry vector over basis changes that permute and rescale
    /// within blocks.
    fn canonical_key(&self, a: &[Vec<u32>], layout: &Layout) -> Vec<u32> {
        let s = a.len();
        let p = self.forms.p;
        let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
        let mut start = 0;
        while start < s {
            let end = (start..s)
                .find(|&k| layout.block[k] != layout.block[start])
                .unwrap_or(s);
            let mut next = Vec::new();
            for pre in &perms {
                for tail in permutations(&(start..end).collect::<Vec<_>>()) {
                    let mut v = pre.clone();
                    v.extend(tail);
                    next.push(v);
                }
            }
            perms = next;
            start = end;
        }
        // scalings modulo a global scalar: first coordinate fixed to 1
        let units: Vec<u32> = (1..p).collect();
        let nscal = units.len().pow(s.saturating_sub(1) as u32);
        let mut best: Option<Vec<u32>> = None;
        for perm in &perms {
            for code in 0..nscal {
                let mut c = vec![1u32; s];
                let mut x = code;
                for ci in c.iter_mut().skip(1) {
                    *ci = units[x % units.len()];
                    x /= units.len();
                }
                let key: Vec<u32> = layout
                    .positions
                    .iter()
                    .map(|&(i, j)| {
                        let f = a[perm[i]][perm[j]];
                        let factor = inv_mod(c[i], p) * c[j] % p;
                        self.forms.scale[factor as usize][f as usize]
                    })
                    .collect();
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
        best.unwrap_or_default()
    }

    fn consider(&self, a: &[Vec<u32>], layout: &Layout, ledger: &mut SearchLedger) -> Result<()> {
        let s = a.len();
        let stats = ledger.by_size.entry(s).or_default();
        stats.square_zero += 1;
        if !self.prefilter(a) {
            return Ok(());
        }
        stats.passed_prefilter += 1;
        let d = self.module(a);
        let h = homology(&d, Some(self.cfg.cutoff))?;
        let g = h.graded().expect("graded homology");
        if g.is_zero() || !g.finite_length_detected() {
            return Ok(());
        }
        ledger.by_size.entry(s).or_default().admissible += 1;
        let key = self.canonical_key(a, layout);
        ledger.offer(s, key, || d);
        Ok(())
    }

    fn exhaustive(&self, layout: &Layout, job: usize, ledger: &mut SearchLedger) -> Result<()> {
        let mut a = vec![vec![0u32; layout.s]; layout.s];
        let mut walk = Walk {
            job,
            jobs: self.cfg.jobs.max(1),
            split: layout.positions.len().min(4),
            branch: 0,
            rng: None,
        };
        self.fill(layout, 0, &mut a, ledger, &mut walk)
    }

    /// Values tried at `idx`, in increasing order.
    fn candidates(&self, layout: &Layout, idx: usize, a: &[Vec<u32>]) -> Vec<u32> {
        if idx >= layout.normal_prefix {
            return (0..self.forms.count).collect();
        }
        let var = |t: usize| self.forms.p.pow(t as u32);
        if idx == 0 {
            return vec![0, var(0)];
        }
        let (i, j) = layout.positions[idx - 1];
        match a[i][j] {
            0 => vec![0],
            prev if idx < self.forms.n && prev == var(idx - 1) => vec![0, var(idx)],
            _ => vec![0],
        }
    }

    /// Depth-first fill. Exhaustive walks hand out the subtrees at depth
    /// `split` round-robin to jobs; random walks shuffle the values and stop
    /// at the first complete instance.
    fn fill(
        &self,
        layout: &Layout,
        idx: usize,
        a: &mut Vec<Vec<u32>>,
        ledger: &mut SearchLedger,
        walk: &mut Walk,
    ) -> Result<()> {
        if walk.rng.is_none() && idx == walk.split {
            walk.branch += 1;
            if (walk.branch - 1) % walk.jobs as u64 != walk.job as u64 {
                return Ok(());
            }
        }
        if idx == layout.positions.len() {
            ledger.instances_scanned += 1;
            if walk.rng.is_none() {
                return self.consider(a, layout, ledger);
            }
            return Ok(());
        }
        let (i, j) = layout.positions[idx];
        let mut values = self.candidates(layout, idx, a);
        if let Some(r) = walk.rng.as_mut() {
            values.shuffle(r);
        }
        for v in values {
            a[i][j] = v;
            // the entry just placed completes delta^2 at (i - 1, j)
            if i > 0 && !self.square_zero_at(a, i - 1, j) {
                continue;
            }
            if i == 0 && j + 1 < layout.s && !self.leading_rank_ok(a, j) {
                // prefixes above the split are walked by every job
                if idx >= walk.split || walk.job == 0 {
                    ledger.by_size.entry(layout.s).or_default().pruned += 1;
                }
                continue;
            }
            let before = ledger.instances_scanned;
            self.fill(layout, idx + 1, a, ledger, walk)?;
            if walk.rng.is_some() && ledger.instances_scanned > before {
                return Ok(());
            }
        }
        a[i][j] = 0;
        Ok(())
    }
}

struct Walk {
    job: usize,
    jobs: usize,
    split: usize,
    branch: u64,
    rng: Option<ChaCha8Rng>,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Least rank of an instance with nonzero finite-length homology, over
/// even sizes up to `max_size`; odd sizes are skipped, since finite length
/// forces `rank H = 0` and the rank parity then makes `s` even.
pub fn search_conjecture(cfg: &SearchConfig) -> Result<SearchLedger> {
    if !is_prime(cfg.prime) || cfg.prime > 13 {
        return Err(Error::UnsupportedBackend(format!(
            "search needs a prime field F_p with p <= 13, got p = {}",
            cfg.prime
        )));
    }
    if cfg.nvars == 0 || (cfg.prime as u128).pow(cfg.nvars as u32) > 256 {
        return Err(Error::Precondition(format!(
            "{} variables over F{} give too many linear forms to enumerate",
            cfg.nvars, cfg.prime
        )));
    }
    let forms = Forms::new(cfg.prime as u32, cfg.nvars);
    let ring = Ring::from_notation(&cfg.ring_notation())?;
    let searcher = Searcher {
        cfg,
        forms: &forms,
        ring: &ring,
        names: var_names(cfg.nvars),
    };
    let mut ledger = SearchLedger::empty(cfg);
    for s in (2..=cfg.max_size).step_by(2) {
        let folds = match &cfg.folds {
            Some(f) if f.iter().sum::<usize>() == s => f.clone(),
            _ => vec![1; s],
        };
        let layout = Layout::new(&folds);
        ledger.by_size.entry(s).or_default();
        match cfg.mode {
            SearchMode::Exhaustive => {
                let jobs = cfg.jobs.max(1);
                let parts: Vec<Result<SearchLedger>> = std::thread::scope(|scope| {
                    let handles: Vec<_> = (0..jobs)
                        .map(|job| {
                            let (searcher, layout) = (&searcher, &layout);
                            scope.spawn(move || {
                                let mut l = SearchLedger::empty(cfg);
                                searcher.exhaustive(layout, job, &mut l).map(|_| l)
                            })
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("search thread"))
                        .collect()
                });
                for part in parts {
                    ledger.merge(part?);
                }
            }
            SearchMode::Sample { count, seed } => {
                let mut walk = Walk {
                    job: 0,
                    jobs: 1,
                    split: usize::MAX,
                    branch: 0,
                    rng: Some(ChaCha8Rng::seed_from_u64(seed ^ (s as u64) << 32)),
                };
                let mut a = vec![vec![0u32; s]; s];
                for _ in 0..count {
                    for row in a.iter_mut() {
                        row.fill(0);
                    }
                    let mut scratch = SearchLedger::empty(cfg);
                    searcher.fill(&layout, 0, &mut a, &mut scratch, &mut walk)?;
                    let pruned = scratch.by_size.get(&s).map_or(0, |st| st.pruned);
                    ledger.by_size.entry(s).or_default().pruned += pruned;
                    if scratch.instances_scanned == 0 {
                        continue;
                    }
                    ledger.instances_scanned += 1;
                    searcher.consider(&a, &layout, &mut ledger)?;
                }
            }
        }
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let ledger = search_conjecture(&SearchConfig::exhaustive(2, 1, 2)).unwrap();
        assert_eq!(ledger.min_rank, Some(2));
        assert_eq!(ledger.witnesses.len(), 1);
        assert_eq!(
            ledger.witnesses[0].delta().get(0, 1),
            &ledger.witnesses[0].ring().var(0)
        );
        assert!(!ledger.counterexample_candidate());
    }

    #[test]
    fn two_variables_need_rank_four() {
        let ledger = search_conjecture(&SearchConfig::exhaustive(2, 2, 4)).unwrap();
        assert_eq!(ledger.min_rank, Some(4));
        assert_eq!(ledger.by_size[&2].admissible, 0);
        assert_eq!(
            ledger.instances_scanned,
            ledger.by_size[&2].square_zero + ledger.by_size[&4].square_zero
        );
    }

    #[test]
    fn parallel_runs_agree() {
        let one = search_conjecture(&SearchConfig::exhaustive(3, 2, 4)).unwrap();
        let mut cfg = SearchConfig::exhaustive(3, 2, 4);
        cfg.jobs = 3;
        let three = search_conjecture(&cfg).unwrap();
        assert_eq!(one.min_rank, three.min_rank);
        assert_eq!(one.instances_scanned, three.instances_scanned);
        assert_eq!(one.by_size, three.by_size);
    }

    #[test]
    fn point_filter_keeps_every_admissible_instance() {
        for (p, n) in [(2, 2), (3, 2)] {
            let mut cfg = SearchConfig::exhaustive(p, n, 4);
            let filtered = search_conjecture(&cfg).unwrap();
            cfg.point_filter = false;
            let all = search_conjecture(&cfg).unwrap();
            let admissible =
                |l: &SearchLedger| l.by_size.values().map(|s| s.admissible).collect::<Vec<_>>();
            assert_eq!(
                admissible(&filtered),
                admissible(&all),
                "F{p} with {n} variables"
            );
            assert_eq!(filtered.min_rank, all.min_rank);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let mut cfg = SearchConfig::exhaustive(2, 2, 4);
        cfg.mode = SearchMode::Sample { count: 40, seed: 7 };
        let a = search_conjecture(&cfg).unwrap();
        let b = search_conjecture(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.instances_scanned, 80);
    }

    #[test]
    fn point_rank_prefilter() {
        let f = Forms::new(2, 2);
        // 3, 5 and 9 projective points over F2, F4, F8
        let sizes: Vec<usize> = f.points.iter().map(|s| s.eval.len()).collect();
        assert_eq!(sizes, vec![3, 5, 9]);
        let f3 = Gf::new(3, 1);
        assert_eq!(f3.rank(vec![vec![1, 2], vec![2, 1]]), 1);
        assert_eq!(f3.rank(vec![vec![1, 2], vec![1, 1]]), 2);
        // F4 = F2[t]/(t^2 + t + 1): t * (t + 1) = 1
        let f4 = Gf::new(2, 2);
        assert_eq!(f4.mul[2 * 4 + 3], 1);
        assert_eq!(f4.rank(vec![vec![2, 1], vec![1, 3]]), 1);
    }
}

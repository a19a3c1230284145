//! Generators and field linear algebra shared by the property suites and
//! the acceptance target.
#![allow(dead_code)]

use diffmod::field::{nullspace, rank, Field, Mat, PrimeField};
use diffmod::module::{standard_form_matrix, DiffModule, FreeComplex};
use diffmod::ring::{Ring, RingElem, RingMatrix};

pub fn fp(p: u64) -> Ring {
    Ring::prime_field(p).unwrap()
}

pub fn residues(m: &RingMatrix) -> Mat<u64> {
    let mut out = Mat::filled(m.rows(), m.cols(), 0u64);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            match m.get(i, j) {
                RingElem::Res(v) => out.set(i, j, *v),
                other => panic!("not a residue: {other:?}"),
            }
        }
    }
    out
}

pub fn from_residues(ring: &Ring, m: &Mat<u64>) -> RingMatrix {
    let mut out = RingMatrix::zeros(ring, m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.set(i, j, ring.from_i64(*m.get(i, j) as i64));
        }
    }
    out
}

pub fn random_matrix(
    ring: &Ring,
    p: u64,
    rows: usize,
    cols: usize,
    rng: &mut impl rand::Rng,
) -> RingMatrix {
    let mut m = RingMatrix::zeros(ring, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, ring.from_i64(rng.gen_range(0..p) as i64));
        }
    }
    m
}

pub fn random_invertible(ring: &Ring, p: u64, s: usize, rng: &mut impl rand::Rng) -> RingMatrix {
    let f = PrimeField::new(p);
    loop {
        let m = random_matrix(ring, p, s, s, rng);
        if rank(&f, &residues(&m)) == s {
            return m;
        }
    }
}

/// Every square-zero matrix over a field is conjugate to
/// `[[0, 1_r], [0, 0]] (+) 0`, so conjugating those samples all of them.
pub fn random_square_zero(p: u64, s: usize, rng: &mut impl rand::Rng) -> DiffModule {
    let ring = fp(p);
    let r = rng.gen_range(0..=s / 2);
    let mut base = RingMatrix::zeros(&ring, s, s);
    base.set_block(0, 0, &standard_form_matrix(&ring, r));
    let u = random_invertible(&ring, p, s, rng);
    DiffModule::new(base, None).unwrap().conjugate(&u).unwrap()
}

pub fn field_rank(p: u64, m: &RingMatrix) -> usize {
    rank(&PrimeField::new(p), &residues(m))
}

/// `dim Ker - dim Im`.
pub fn field_homology(p: u64, d: &DiffModule) -> usize {
    let r = field_rank(p, d.delta());
    d.size() - 2 * r
}

/// A random morphism `D -> E`: a random point of the solution space of
/// `delta_E phi = phi delta_D`.
pub fn random_morphism(
    p: u64,
    d: &DiffModule,
    e: &DiffModule,
    rng: &mut impl rand::Rng,
) -> RingMatrix {
    let f = PrimeField::new(p);
    let (s, t) = (d.size(), e.size());
    let (a, b) = (residues(d.delta()), residues(e.delta()));
    // unknown phi[i][k] at index i * s + k; equation (i, j)
    let mut sys = Mat::filled(t * s, t * s, 0u64);
    for i in 0..t {
        for j in 0..s {
            for k in 0..t {
                // (delta_E phi)_{ij} += b[i][k] phi[k][j]
                let idx = k * s + j;
                let v = f.add(sys.get(i * s + j, idx), b.get(i, k));
                sys.set(i * s + j, idx, v);
            }
            for k in 0..s {
                // (phi delta_D)_{ij} += phi[i][k] a[k][j]
                let idx = i * s + k;
                let v = f.sub(sys.get(i * s + j, idx), a.get(k, j));
                sys.set(i * s + j, idx, v);
            }
        }
    }
    let basis = nullspace(&f, &sys);
    let mut phi = Mat::filled(t, s, 0u64);
    for v in &basis {
        let c = rng.gen_range(0..p);
        for i in 0..t {
            for k in 0..s {
                let x = f.add(phi.get(i, k), &f.mul(&c, &v[i * s + k]));
                phi.set(i, k, x);
            }
        }
    }
    from_residues(d.ring(), &phi)
}

/// Rank of the map induced on homology by a morphism over `F_p`.
pub fn induced_rank(p: u64, phi: &RingMatrix, d: &DiffModule, e: &DiffModule) -> usize {
    let f = PrimeField::new(p);
    let cycles = nullspace(&f, &residues(d.delta()));
    let t = e.size();
    let phi = residues(phi);
    let b = residues(e.delta());
    let mut columns: Vec<Vec<u64>> = (0..b.cols).map(|j| b.column(j)).collect();
    let rb = rank(&f, &Mat::from_columns(t, &columns, 0));
    for z in &cycles {
        columns.push(diffmod::field::mat_vec(&f, &phi, z));
    }
    rank(&f, &Mat::from_columns(t, &columns, 0)) - rb
}

/// Random complex `lo .. lo + ranks.len() - 1` with `d_n d_{n+1} = 0`.
pub fn random_complex(p: u64, ranks: &[usize], lo: i64, rng: &mut impl rand::Rng) -> FreeComplex {
    let ring = fp(p);
    let f = PrimeField::new(p);
    let mut diffs: Vec<RingMatrix> = Vec::new();
    for k in 0..ranks.len().saturating_sub(1) {
        let (rows, cols) = (ranks[k], ranks[k + 1]);
        let m = match diffs.last() {
            None => random_matrix(&ring, p, rows, cols, rng),
            Some(prev) => {
                // columns drawn from the kernel of the previous map
                let kernel = nullspace(&f, &residues(prev));
                let mut m = RingMatrix::zeros(&ring, rows, cols);
                for j in 0..cols {
                    for v in &kernel {
                        let c = ring.from_i64(rng.gen_range(0..p) as i64);
                        for i in 0..rows {
                            let x =
                                ring.add(m.get(i, j), &ring.mul(&c, &ring.from_i64(v[i] as i64)));
                            m.set(i, j, x);
                        }
                    }
                }
                m
            }
        };
        diffs.push(m);
    }
    FreeComplex::new(&ring, lo, ranks.to_vec(), diffs, None).unwrap()
}

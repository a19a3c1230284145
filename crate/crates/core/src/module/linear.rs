//! Degreewise linear algebra for graded free modules.
//!
//! A free module with generator degrees `g` has degree-`d` component
//! `(+)_j R_{d - g_j}`, a finite-dimensional space over the base field.
//! Fields are treated as graded rings concentrated in degree 0, so the same
//! code serves ungraded field computations (one generator degree, `d = 0`).

use crate::error::{Error, Result};
use crate::field::{Field, Mat};
use crate::ring::{BaseField, Ring, RingElem, RingMatrix, Scalar};

/// Entries of a matrix over a field as scalars.
pub(crate) fn to_field_mat(k: &BaseField, m: &RingMatrix) -> Mat<Scalar> {
    let ring = m.ring();
    let mut out = Mat::filled(m.rows(), m.cols(), k.zero());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, ring.residue(m.get(i, j)).expect("field element"));
        }
    }
    out
}

pub(crate) fn from_field_mat(ring: &Ring, m: &Mat<Scalar>) -> RingMatrix {
    let mut out = RingMatrix::zeros(ring, m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.set(i, j, ring.from_scalar(m.get(i, j)));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub offsets: Vec<usize>,
    pub dims: Vec<usize>,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct GradedModel {
    ring: Ring,
    base: BaseField,
}

impl GradedModel {
    pub fn new(ring: &Ring) -> Result<Self> {
        let base = if let Some(k) = ring.as_field() {
            k
        } else if let Some(g) = ring.graded() {
            g.base
        } else {
            return Err(Error::UnsupportedBackend(format!(
                "degreewise linear algebra needs a field or a graded ring, got {}",
                ring.spec()
            )));
        };
        Ok(GradedModel {
            ring: ring.clone(),
            base,
        })
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn ring_dim(&self, k: i64) -> usize {
        if k < 0 {
            return 0;
        }
        match self.ring.graded() {
            Some(g) => g.degree_data(k as u32).basis.len(),
            None => usize::from(k == 0),
        }
    }

    /// Basis of `R_k` as ring elements.
    pub fn ring_basis(&self, k: i64) -> Vec<RingElem> {
        if k < 0 {
            return Vec::new();
        }
        if self.ring.is_graded() {
            self.ring.graded_component_elems(k as u32).expect("graded")
        } else if k == 0 {
            vec![self.ring.one()]
        } else {
            Vec::new()
        }
    }

    /// Coordinates of a homogeneous element of degree `k` (or zero).
    pub fn coords(&self, k: i64, a: &RingElem) -> Vec<Scalar> {
        let n = self.ring_dim(k);
        if self.ring.is_zero(a) {
            return vec![self.base.zero(); n];
        }
        match (self.ring.graded(), a) {
            (Some(g), RingElem::Poly(p)) => {
                debug_assert_eq!(p.homogeneous_degree(), Some(k as u32));
                g.degree_data(k as u32).coordinates(&self.base, p)
            }
            (None, RingElem::Res(v)) => vec![Scalar::Fp(*v)],
            (None, RingElem::Rat(q)) => vec![Scalar::Q(q.clone())],
            _ => panic!("element does not match the ring"),
        }
    }

    /// Element of `R_k` with the given coordinates.
    pub fn elem(&self, k: i64, coords: &[Scalar]) -> RingElem {
        let basis = self.ring_basis(k);
        let mut out = self.ring.zero();
        for (b, c) in basis.iter().zip(coords) {
            if !self.base.is_zero(c) {
                out = self
                    .ring
                    .add(&out, &self.ring.mul(&self.ring.from_scalar(c), b));
            }
        }
        out
    }

    pub fn layout(&self, gens: &[i64], d: i64) -> Layout {
        let mut offsets = Vec::with_capacity(gens.len());
        let mut dims = Vec::with_capacity(gens.len());
        let mut total = 0;
        for &g in gens {
            offsets.push(total);
            let n = self.ring_dim(d - g);
            dims.push(n);
            total += n;
        }
        Layout {
            offsets,
            dims,
            total,
        }
    }

    /// Matrix over the base field of the degree-preserving map
    /// `m : F(src) -> F(tgt)` restricted to degree `d`. Entry `(i, j)` of `m`
    /// must be homogeneous of degree `src_j - tgt_i`.
    pub fn map_at(&self, m: &RingMatrix, src: &[i64], tgt: &[i64], d: i64) -> Mat<Scalar> {
        let ls = self.layout(src, d);
        let lt = self.layout(tgt, d);
        let mut out = Mat::filled(lt.total, ls.total, self.base.zero());
        for (j, &gj) in src.iter().enumerate() {
            if ls.dims[j] == 0 {
                continue;
            }
            let basis = self.ring_basis(d - gj);
            for i in 0..tgt.len() {
                let a = m.get(i, j);
                if self.ring.is_zero(a) || lt.dims[i] == 0 {
                    continue;
                }
                for (b_idx, b) in basis.iter().enumerate() {
                    let prod = self.ring.mul(a, b);
                    let c = self.coords(d - tgt[i], &prod);
                    for (k, ck) in c.into_iter().enumerate() {
                        out.set(lt.offsets[i] + k, ls.offsets[j] + b_idx, ck);
                    }
                }
            }
        }
        out
    }

    /// `c * v` for `v` in degree `d` of `F(gens)` and `c` homogeneous of
    /// degree `e`; the result lives in degree `d + e`.
    pub fn scale_vector(
        &self,
        c: &RingElem,
        e: i64,
        gens: &[i64],
        d: i64,
        v: &[Scalar],
    ) -> Vec<Scalar> {
        let elems = self.vector_to_elems(gens, d, v);
        let scaled: Vec<RingElem> = elems.iter().map(|x| self.ring.mul(c, x)).collect();
        self.elems_to_vector(gens, d + e, &scaled)
    }

    pub fn vector_to_elems(&self, gens: &[i64], d: i64, v: &[Scalar]) -> Vec<RingElem> {
        let l = self.layout(gens, d);
        gens.iter()
            .enumerate()
            .map(|(j, &g)| self.elem(d - g, &v[l.offsets[j]..l.offsets[j] + l.dims[j]]))
            .collect()
    }

    pub fn elems_to_vector(&self, gens: &[i64], d: i64, elems: &[RingElem]) -> Vec<Scalar> {
        let mut out = Vec::new();
        for (j, &g) in gens.iter().enumerate() {
            out.extend(self.coords(d - g, &elems[j]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_dimensions() {
        let r = Ring::from_notation("Q[x,y]").unwrap();
        let m = GradedModel::new(&r).unwrap();
        let l = m.layout(&[0, 1, 3], 2);
        assert_eq!(l.dims, vec![3, 2, 0]);
        assert_eq!(l.total, 5);
    }

    #[test]
    fn multiplication_by_x_in_degree_one() {
        let r = Ring::from_notation("F3[x,y]").unwrap();
        let m = GradedModel::new(&r).unwrap();
        let a = RingMatrix::parse(&r, &[&["x"]]).unwrap();
        // R(-1) -> R in degree 1 is k -> span{x, y}
        let mat = m.map_at(&a, &[1], &[0], 1);
        assert_eq!((mat.rows, mat.cols), (2, 1));
        assert_eq!(mat.column(0), vec![Scalar::Fp(1), Scalar::Fp(0)]);
    }

    #[test]
    fn field_is_concentrated_in_degree_zero() {
        let r = Ring::prime_field(5).unwrap();
        let m = GradedModel::new(&r).unwrap();
        assert_eq!(m.ring_dim(0), 1);
        assert_eq!(m.ring_dim(1), 0);
        let a = RingMatrix::from_i64(&r, &[&[1, 2], &[3, 4]]);
        let mat = m.map_at(&a, &[0, 0], &[0, 0], 0);
        assert_eq!(mat.get(1, 0), &Scalar::Fp(3));
    }
}

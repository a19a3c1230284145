//! Degreewise normal forms in a quotient of a polynomial ring by
//! homogeneous relations.
//!
//! In degree `d` the relation ideal is spanned by `m * r` for relations `r`
//! and monomials `m` of complementary degree. Reducing that span to row
//! echelon form (pivots on the largest monomials) gives canonical normal
//! forms and the standard monomial basis of the degree-`d` component.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::poly::{monomials_of_degree, BaseField, Monomial, Poly, Scalar};
use crate::field::{rref, Field, Mat};

#[derive(Debug)]
pub struct DegreeData {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
    /// Echelon rows of the relation span, one per pivot column.
    pub pivot_rows: Vec<(usize, Vec<Scalar>)>,
    /// Standard monomials (non-pivots), descending.
    pub basis: Vec<Monomial>,
    pub basis_index: HashMap<Monomial, usize>,
}

impl DegreeData {
    fn build(base: &BaseField, nvars: usize, relations: &[Poly], d: u32) -> Self {
        let monomials = monomials_of_degree(nvars, d);
        let index: HashMap<Monomial, usize> = monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let mut generators: Vec<Vec<Scalar>> = Vec::new();
        for r in relations {
            let Some(e) = r.homogeneous_degree() else {
                continue;
            };
            if e > d {
                continue;
            }
            for m in monomials_of_degree(nvars, d - e) {
                let mut row = vec![base.zero(); monomials.len()];
                for (t, c) in &r.terms {
                    row[index[&t.mul(&m)]] = c.clone();
                }
                generators.push(row);
            }
        }
        let mut pivot_rows = Vec::new();
        let mut is_pivot = vec![false; monomials.len()];
        if !generators.is_empty() {
            let mut mat = Mat {
                rows: generators.len(),
                cols: monomials.len(),
                data: generators.into_iter().flatten().collect(),
            };
            let pivots = rref(base, &mut mat);
            for (r, &pc) in pivots.iter().enumerate() {
                is_pivot[pc] = true;
                let row = (0..mat.cols).map(|c| mat.get(r, c).clone()).collect();
                pivot_rows.push((pc, row));
            }
        }
        let basis: Vec<Monomial> = monomials
            .iter()
            .enumerate()
            .filter(|(i, _)| !is_pivot[*i])
            .map(|(_, m)| m.clone())
            .collect();
        let basis_index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        DegreeData {
            degree: d,
            monomials,
            index,
            pivot_rows,
            basis,
            basis_index,
        }
    }

    fn dense(&self, base: &BaseField, p: &Poly) -> Vec<Scalar> {
        let mut v = vec![base.zero(); self.monomials.len()];
        for (m, c) in &p.terms {
            let i = self.index[m];
            v[i] = base.add(&v[i], c);
        }
        for (pc, row) in &self.pivot_rows {
            let a = v[*pc].clone();
            if base.is_zero(&a) {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                if !base.is_zero(ri) {
                    *vi = base.sub(vi, &base.mul(&a, ri));
                }
            }
        }
        v
    }

    /// Normal form of a homogeneous polynomial of this degree.
    pub fn reduce(&self, base: &BaseField, p: &Poly) -> Poly {
        if self.pivot_rows.is_empty() {
            return p.clone();
        }
        let v = self.dense(base, p);
        Poly {
            terms: self
                .monomials
                .iter()
                .zip(v)
                .filter(|(_, c)| !base.is_zero(c))
                .map(|(m, c)| (m.clone(), c))
                .collect(),
        }
    }

    /// Coordinates of a normal-form polynomial of this degree in [`Self::basis`].
    pub fn coordinates(&self, base: &BaseField, nf: &Poly) -> Vec<Scalar> {
        let mut v = vec![base.zero(); self.basis.len()];
        for (m, c) in &nf.terms {
            let i = *self
                .basis_index
                .get(m)
                .expect("polynomial is not in normal form");
            v[i] = c.clone();
        }
        v
    }
}

/// Polynomial quotient data shared by every element of a graded ring.
#[derive(Debug)]
pub struct GradedData {
    pub base: BaseField,
    pub vars: Vec<String>,
    pub relations: Vec<Poly>,
    cache: RwLock<HashMap<u32, Arc<DegreeData>>>,
}

impl GradedData {
    pub fn new(base: BaseField, vars: Vec<String>, relations: Vec<Poly>) -> Self {
        GradedData {
            base,
            vars,
            relations,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Memoized reduction data for degree `d`.
    pub fn degree_data(&self, d: u32) -> Arc<DegreeData> {
        if let Some(data) = self.cache.read().expect("cache poisoned").get(&d) {
            return Arc::clone(data);
        }
        let data = Arc::new(DegreeData::build(
            &self.base,
            self.nvars(),
            &self.relations,
            d,
        ));
        self.cache
            .write()
            .expect("cache poisoned")
            .entry(d)
            .or_insert(data)
            .clone()
    }

    /// Normal form of an arbitrary polynomial, reduced degree by degree.
    pub fn reduce(&self, p: &Poly) -> Poly {
        if self.relations.is_empty() || p.is_zero() {
            return p.clone();
        }
        let mut degrees: Vec<u32> = p.terms.iter().map(|(m, _)| m.degree()).collect();
        degrees.dedup();
        let mut out = Poly::zero();
        for d in degrees {
            let comp = p.component(d);
            out = out.add(&self.base, &self.degree_data(d).reduce(&self.base, &comp));
        }
        out
    }
}

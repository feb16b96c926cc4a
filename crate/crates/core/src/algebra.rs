//! The truncated jet algebra `S_N` and its matrix version `Mat_r(S_N)` as
//! finite-basis algebras over `x`-polynomials.
//!
//! Basis elements are `y^m E_{ij}`, except that `E_{rr}` (with `m = 1`) is
//! replaced by the identity, so the unit is itself a basis element and
//! normalized (co)chains are exactly those supported on the other basis
//! elements. For `r = 1` this is the monomial basis of `S_N`.

use std::collections::HashMap;

use num_traits::One;

use crate::endo::EndJet;
use crate::error::{Error, Result};
use crate::form::{FormJet, FormKey, JetShape};
use crate::monomial::{monomial_basis, YMono};
use crate::poly::PolyX;
use crate::rational::Rational;

pub type Index = u16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisElement {
    Unit,
    Entry { mono: usize, row: usize, col: usize },
}

#[derive(Debug)]
pub struct MatAlgebra {
    shape: JetShape,
    rank: usize,
    monos: Vec<YMono>,
    mono_index: HashMap<YMono, usize>,
    elements: Vec<BasisElement>,
    entry_index: HashMap<(usize, usize, usize), Index>,
    unit: Index,
    degrees: Vec<usize>,
    mul: Vec<Vec<Vec<(Index, Rational)>>>,
    factors: Vec<Vec<(Index, Index, Rational)>>,
}

impl MatAlgebra {
    pub fn new(shape: JetShape, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Config("rank must be positive".into()));
        }
        let monos = monomial_basis(shape.dim, shape.order, true);
        let mono_index: HashMap<YMono, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut elements = Vec::new();
        let mut entry_index = HashMap::new();
        let mut unit = 0;
        for (mi, m) in monos.iter().enumerate() {
            for i in 0..rank {
                for j in 0..rank {
                    if m.is_one() && i == rank - 1 && j == rank - 1 {
                        unit = elements.len() as Index;
                        elements.push(BasisElement::Unit);
                    } else {
                        entry_index.insert((mi, i, j), elements.len() as Index);
                        elements.push(BasisElement::Entry { mono: mi, row: i, col: j });
                    }
                }
            }
        }
        if elements.len() > Index::MAX as usize {
            return Err(Error::Config("algebra basis too large".into()));
        }
        let degrees = elements
            .iter()
            .map(|e| match e {
                BasisElement::Unit => 0,
                BasisElement::Entry { mono, .. } => monos[*mono].degree(),
            })
            .collect();
        let mut alg = Self {
            shape,
            rank,
            monos,
            mono_index,
            elements,
            entry_index,
            unit,
            degrees,
            mul: Vec::new(),
            factors: Vec::new(),
        };
        alg.build_tables();
        Ok(alg)
    }

    fn build_tables(&mut self) {
        let n = self.elements.len();
        let mut mul = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                mul[a][b] = self.product(a as Index, b as Index);
            }
        }
        let mut factors = vec![Vec::new(); n];
        for a in 0..n as Index {
            if a == self.unit {
                continue;
            }
            for b in 0..n as Index {
                if b == self.unit {
                    continue;
                }
                for (c, k) in &mul[a as usize][b as usize] {
                    factors[*c as usize].push((a, b, k.clone()));
                }
            }
        }
        self.mul = mul;
        self.factors = factors;
    }

    fn product(&self, a: Index, b: Index) -> Vec<(Index, Rational)> {
        match (&self.elements[a as usize], &self.elements[b as usize]) {
            (BasisElement::Unit, _) => vec![(b, Rational::one())],
            (_, BasisElement::Unit) => vec![(a, Rational::one())],
            (BasisElement::Entry { mono: m1, row: i, col: j }, BasisElement::Entry { mono: m2, row: k, col: l }) => {
                if j != k {
                    return Vec::new();
                }
                let m = self.monos[*m1].mul(&self.monos[*m2]);
                if m.degree() > self.shape.order {
                    return Vec::new();
                }
                self.entry(self.mono_index[&m], *i, *l)
            }
        }
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unit(&self) -> Index {
        self.unit
    }

    pub fn element(&self, i: Index) -> &BasisElement {
        &self.elements[i as usize]
    }

    pub fn degree(&self, i: Index) -> usize {
        self.degrees[i as usize]
    }

    pub fn monomials(&self) -> &[YMono] {
        &self.monos
    }

    pub fn mono_index(&self, m: &YMono) -> Option<usize> {
        self.mono_index.get(m).copied()
    }

    /// Basis elements other than the unit.
    pub fn non_unit(&self) -> impl Iterator<Item = Index> + '_ {
        (0..self.len() as Index).filter(move |&i| i != self.unit)
    }

    pub fn mul(&self, a: Index, b: Index) -> &[(Index, Rational)] {
        &self.mul[a as usize][b as usize]
    }

    /// All `(x, y, k)` with `x, y` non-unit and `x·y` containing `k·c`.
    pub fn factors(&self, c: Index) -> &[(Index, Index, Rational)] {
        &self.factors[c as usize]
    }

    /// `y^m E_{ij}` in the basis.
    pub fn entry(&self, mono: usize, i: usize, j: usize) -> Vec<(Index, Rational)> {
        if let Some(&idx) = self.entry_index.get(&(mono, i, j)) {
            return vec![(idx, Rational::one())];
        }
        // E_rr = Id - Σ_{k<r} E_kk
        let mut out = vec![(self.unit, Rational::one())];
        for k in 0..self.rank - 1 {
            out.push((self.entry_index[&(mono, k, k)], -Rational::one()));
        }
        out
    }

    /// Matrix entries `(mono, row, col)` of a basis element.
    pub fn entries_of(&self, i: Index) -> Vec<(usize, usize, usize)> {
        match &self.elements[i as usize] {
            BasisElement::Unit => (0..self.rank).map(|k| (0, k, k)).collect(),
            BasisElement::Entry { mono, row, col } => vec![(*mono, *row, *col)],
        }
    }

    /// Coefficients `(basis, dy mask) -> PolyX` of a matrix of forms.
    pub fn decompose(&self, u: &EndJet) -> Result<Vec<((Index, u32), PolyX)>> {
        if u.rank() != self.rank || u.shape() != self.shape {
            return Err(Error::ShapeMismatch("matrix jet does not match the algebra".into()));
        }
        let mut out = Vec::new();
        for i in 0..self.rank {
            for j in 0..self.rank {
                for (key, coeff) in u.get(i, j).terms() {
                    if key.dx != 0 {
                        return Err(Error::Precondition("dx components cannot be represented".into()));
                    }
                    let mono = self.mono_index[&key.y];
                    for (b, k) in self.entry(mono, i, j) {
                        out.push(((b, key.dy), coeff.scale(&k)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`decompose`](Self::decompose) for a single term.
    pub fn to_end_jet(&self, b: Index, mask: u32, coeff: &PolyX) -> EndJet {
        let mut out = EndJet::zero(self.rank, self.shape);
        for (mono, i, j) in self.entries_of(b) {
            let key = FormKey { y: self.monos[mono].clone(), dx: 0, dy: mask };
            let mut t = FormJet::zero(self.shape);
            t.add_term(key, coeff);
            out = out.add(&EndJet::unit(self.rank, i, j, &t)).expect("same shape");
        }
        out
    }

    /// Image of a basis element under `u ↦ Σ_k U^k ∂u/∂y^k` applied entrywise.
    pub fn vector_field_image(&self, comps: &[FormJet], b: Index) -> Vec<((Index, u32), PolyX)> {
        let mut out = Vec::new();
        let BasisElement::Entry { mono, row, col } = self.elements[b as usize] else {
            return out;
        };
        let m = &self.monos[mono];
        for (k, comp) in comps.iter().enumerate() {
            let Some((e, dm)) = m.deriv(k) else { continue };
            let e = Rational::from_integer(e.into());
            for (key, coeff) in comp.terms() {
                let y = key.y.mul(&dm);
                if y.degree() > self.shape.order {
                    continue;
                }
                let c = coeff.scale(&e);
                for (t, s) in self.entry(self.mono_index[&y], row, col) {
                    out.push(((t, key.dy), c.scale(&s)));
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }

    /// `mono` rendered for reports, e.g. `y1^2*y2` or `1`.
    pub fn render(&self, b: Index) -> String {
        match &self.elements[b as usize] {
            BasisElement::Unit => "Id".into(),
            BasisElement::Entry { mono, row, col } => {
                let m = self.monos[*mono].to_string();
                if self.rank == 1 {
                    m
                } else {
                    format!("{m}E{}{}", row + 1, col + 1)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn expand(alg: &MatAlgebra, v: &[(Index, Rational)]) -> HashMap<(usize, usize, usize), Rational> {
        let mut out: HashMap<(usize, usize, usize), Rational> = HashMap::new();
        for (b, k) in v {
            for e in alg.entries_of(*b) {
                *out.entry(e).or_insert_with(Rational::zero) += k;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    #[test]
    fn basis_sizes() {
        let a = MatAlgebra::new(JetShape::new(2, 3), 1).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a.non_unit().count(), 9);
        let b = MatAlgebra::new(JetShape::new(2, 4), 2).unwrap();
        assert_eq!(b.len(), 60);
        assert_eq!(b.element(b.unit()), &BasisElement::Unit);
    }

    #[test]
    fn products_match_matrix_multiplication() {
        let alg = MatAlgebra::new(JetShape::new(1, 2), 2).unwrap();
        let n = alg.len() as Index;
        for a in 0..n {
            for b in 0..n {
                let got = expand(&alg, alg.mul(a, b));
                let mut want: HashMap<(usize, usize, usize), Rational> = HashMap::new();
                for (m1, i, j) in alg.entries_of(a) {
                    for (m2, k, l) in alg.entries_of(b) {
                        let m = alg.monomials()[m1].mul(&alg.monomials()[m2]);
                        if j == k && m.degree() <= 2 {
                            *want.entry((alg.mono_index(&m).unwrap(), i, l)).or_insert_with(Rational::zero) +=
                                Rational::one();
                        }
                    }
                }
                want.retain(|_, v| !v.is_zero());
                assert_eq!(got, want, "{} * {}", alg.render(a), alg.render(b));
            }
        }
    }

    #[test]
    fn associativity() {
        let alg = MatAlgebra::new(JetShape::new(1, 2), 2).unwrap();
        let n = alg.len() as Index;
        let times = |v: &[(Index, Rational)], w: Index, left: bool| {
            let mut acc: HashMap<Index, Rational> = HashMap::new();
            for (b, k) in v {
                let prod = if left { alg.mul(w, *b) } else { alg.mul(*b, w) };
                for (c, l) in prod {
                    *acc.entry(*c).or_insert_with(Rational::zero) += k * l;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            acc
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ab_c = times(alg.mul(a, b), c, false);
                    let a_bc = times(alg.mul(b, c), a, true);
                    assert_eq!(ab_c, a_bc);
                }
            }
        }
    }

    #[test]
    fn decompose_round_trip() {
        let s = JetShape::new(2, 3);
        let alg = MatAlgebra::new(s, 2).unwrap();
        let u = EndJet::identity(2, s).add(&EndJet::unit(2, 1, 1, &FormJet::dy(s, 0))).unwrap();
        let mut back = EndJet::zero(2, s);
        for ((b, m), c) in alg.decompose(&u).unwrap() {
            back = back.add(&alg.to_end_jet(b, m, &c)).unwrap();
        }
        assert_eq!(back, u);
    }
}

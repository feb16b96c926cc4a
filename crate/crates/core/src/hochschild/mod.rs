//! Normalized Hochschild cochains and chains of a finite-basis algebra with
//! coefficients in `dy`-forms, with the coboundary `∂`, the boundary `b`,
//! the Gerstenhaber bracket and the action `R` of cochains on chains.
//!
//! A cochain is stored as its value table on tuples of non-unit basis
//! elements; a chain as a sum of basis tuples whose slots after the first
//! are non-unit. The degree of a term is its form degree plus `arity - 1`
//! for cochains; algebra elements are cochains of arity 0.

mod chain;
mod cochain;
pub mod sample;
pub mod twisted;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::algebra::{Index, MatAlgebra};
use crate::form::format_mask;
use crate::monomial::merge_sign;
use crate::poly::PolyX;

pub use twisted::{FedosovComplex, TwistedComplex};

pub(crate) fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

fn signed(c: &PolyX, negative: bool) -> PolyX {
    if negative {
        -c
    } else {
        c.clone()
    }
}

/// Product of two `dy`-monomials: the merged mask and whether the sign is
/// negative, or `None` if they share a generator.
pub(crate) fn wedge(left: u32, right: u32) -> Option<(u32, bool)> {
    merge_sign(left, right).map(|neg| (left | right, neg))
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, PolyX>, key: K, c: &PolyX) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Values `(output basis element, dy mask) -> coefficient`.
pub type Values = BTreeMap<(Index, u32), PolyX>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cochain {
    table: BTreeMap<Vec<Index>, Values>,
}

impl Cochain {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds `coeff · dy^mask ⊗ (args ↦ out)`.
    pub fn add_term(&mut self, args: Vec<Index>, out: Index, mask: u32, coeff: &PolyX) {
        if coeff.is_zero() {
            return;
        }
        let values = self.table.entry(args.clone()).or_default();
        add_into(values, (out, mask), coeff);
        if values.is_empty() {
            self.table.remove(&args);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Index>, Index, u32, &PolyX)> {
        self.table.iter().flat_map(|(a, v)| v.iter().map(move |((o, m), c)| (a, *o, *m, c)))
    }

    pub fn values(&self, args: &[Index]) -> Option<&Values> {
        self.table.get(args)
    }

    pub fn arities(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.table.keys().map(Vec::len).collect();
        a.dedup();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.table.values().map(BTreeMap::len).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, o, m, c) in other.terms() {
            out.add_term(a.clone(), o, m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-crate::rational::int(1))
    }

    pub fn scale(&self, k: &crate::Rational) -> Self {
        let mut out = Self::zero();
        for (a, o, m, c) in self.terms() {
            out.add_term(a.clone(), o, m, &c.scale(k));
        }
        out
    }

    pub fn filter<F: Fn(&[Index], Index, u32) -> bool>(&self, keep: F) -> Self {
        let mut out = Self::zero();
        for (a, o, m, c) in self.terms() {
            if keep(a, o, m) {
                out.add_term(a.clone(), o, m, c);
            }
        }
        out
    }

    /// Total degree of every term, if they agree.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms().map(|(a, _, m, _)| m.count_ones() as i64 + a.len() as i64 - 1);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn leading_term(&self, alg: &MatAlgebra) -> Option<String> {
        self.terms().next().map(|(a, o, m, c)| {
            let mut s = format!("({c})");
            if m != 0 {
                let _ = write!(s, " {}", format_mask("dy", m));
            }
            let args: Vec<String> = a.iter().map(|&i| alg.render(i)).collect();
            let _ = write!(s, " [{}] -> {}", args.join(", "), alg.render(o));
            s
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Chain {
    terms: BTreeMap<(Vec<Index>, u32), PolyX>,
}

impl Chain {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds `coeff · dy^mask ⊗ (slots)`; callers must not put the unit in a
    /// barred slot.
    pub fn add_term(&mut self, slots: Vec<Index>, mask: u32, coeff: &PolyX) {
        add_into(&mut self.terms, (slots, mask), coeff);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Index>, u32, &PolyX)> {
        self.terms.iter().map(|((s, m), c)| (s, *m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, m, c) in other.terms() {
            out.add_term(s.clone(), m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, m, c) in other.terms() {
            out.add_term(s.clone(), m, &-c);
        }
        out
    }

    pub fn scale(&self, k: &crate::Rational) -> Self {
        let mut out = Self::zero();
        for (s, m, c) in self.terms() {
            out.add_term(s.clone(), m, &c.scale(k));
        }
        out
    }

    pub fn filter<F: Fn(&[Index], u32) -> bool>(&self, keep: F) -> Self {
        let mut out = Self::zero();
        for (s, m, c) in self.terms() {
            if keep(s, m) {
                out.add_term(s.clone(), m, c);
            }
        }
        out
    }

    pub fn leading_term(&self, alg: &MatAlgebra) -> Option<String> {
        self.terms().next().map(|(s, m, c)| {
            let mut out = format!("({c})");
            if m != 0 {
                let _ = write!(out, " {}", format_mask("dy", m));
            }
            let slots: Vec<String> = s.iter().map(|&i| alg.render(i)).collect();
            let _ = write!(out, " ({})", slots.join(" | "));
            out
        })
    }
}

/// Operations of the Hochschild complexes of one algebra.
#[derive(Clone, Debug)]
pub struct Hochschild {
    alg: Arc<MatAlgebra>,
    flip_bracket_sign: bool,
}

impl Hochschild {
    pub fn new(alg: Arc<MatAlgebra>) -> Self {
        Self { alg, flip_bracket_sign: false }
    }

    /// Deliberately wrong sign in the second term of the bracket, for
    /// mutation testing.
    pub fn with_flipped_bracket_sign(mut self) -> Self {
        self.flip_bracket_sign = true;
        self
    }

    pub fn algebra(&self) -> &Arc<MatAlgebra> {
        &self.alg
    }

    /// `dy^i ∂/∂x^i` on coefficients.
    pub fn horizontal_cochain(&self, p: &Cochain) -> Cochain {
        let mut out = Cochain::zero();
        for (a, o, m, c) in p.terms() {
            for (mask, coeff) in horizontal_terms(self.alg.shape().dim, m, c) {
                out.add_term(a.clone(), o, mask, &coeff);
            }
        }
        out
    }

    pub fn horizontal_chain(&self, ch: &Chain) -> Chain {
        let mut out = Chain::zero();
        for (s, m, c) in ch.terms() {
            for (mask, coeff) in horizontal_terms(self.alg.shape().dim, m, c) {
                out.add_term(s.clone(), mask, &coeff);
            }
        }
        out
    }
}

fn horizontal_terms(dim: usize, mask: u32, c: &PolyX) -> Vec<(u32, PolyX)> {
    let mut out = Vec::new();
    for i in 0..dim {
        if let Some((m, neg)) = wedge(1 << i, mask) {
            let d = c.deriv(i);
            if !d.is_zero() {
                out.push((m, signed(&d, neg)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;

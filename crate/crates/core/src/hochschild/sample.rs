//! Seeded random cochains and chains, and basis enumeration, used as
//! spanning sets by the identity checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Chain, Cochain};
use crate::algebra::{Index, MatAlgebra};
use crate::poly::PolyX;
use crate::rational::int;

pub struct Sampler<'a> {
    alg: &'a MatAlgebra,
    rng: ChaCha8Rng,
    non_unit: Vec<Index>,
}

impl<'a> Sampler<'a> {
    pub fn new(alg: &'a MatAlgebra, seed: u64) -> Self {
        Self { alg, rng: ChaCha8Rng::seed_from_u64(seed), non_unit: alg.non_unit().collect() }
    }

    /// A small nonzero coefficient, affine in `x`.
    pub fn coefficient(&mut self) -> PolyX {
        let dim = self.alg.shape().dim;
        loop {
            let mut p = PolyX::constant(dim, int(self.rng.gen_range(-3..=3)));
            if self.rng.gen_bool(0.3) {
                let i = self.rng.gen_range(0..dim);
                p += &PolyX::var(dim, i).scale(&int(self.rng.gen_range(-2..=2)));
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A random `dy`-monomial of exactly `form_degree` generators.
    pub fn mask(&mut self, form_degree: usize) -> u32 {
        let dim = self.alg.shape().dim;
        let mut bits: Vec<usize> = (0..dim).collect();
        bits.shuffle(&mut self.rng);
        bits[..form_degree.min(dim)].iter().fold(0, |m, b| m | (1 << b))
    }

    /// Restricts arguments, chain slots and (where degrees allow) outputs to
    /// a random subset of `size` non-unit basis elements, so that sparse
    /// samples compose nontrivially.
    pub fn with_pool(mut self, size: usize) -> Self {
        self.non_unit.shuffle(&mut self.rng);
        self.non_unit.truncate(size.max(1));
        self.non_unit.sort_unstable();
        self
    }

    pub fn non_unit(&mut self) -> Index {
        *self.non_unit.choose(&mut self.rng).expect("algebra has non-unit elements")
    }

    /// Any basis element whose degree is at least `min_degree`.
    fn output(&mut self, min_degree: usize) -> Option<Index> {
        let pooled: Vec<Index> = self.non_unit.iter().copied().filter(|&i| self.alg.degree(i) >= min_degree).collect();
        if self.non_unit.len() < self.alg.len() - 1 && !pooled.is_empty() && self.rng.gen_bool(0.8) {
            return pooled.choose(&mut self.rng).copied();
        }
        let candidates: Vec<Index> =
            (0..self.alg.len() as Index).filter(|&i| self.alg.degree(i) >= min_degree).collect();
        candidates.choose(&mut self.rng).copied()
    }

    /// A sparse homogeneous cochain of the given arity and form degree. With `filtered`, every value has
    /// `y`-degree at least the total degree of its arguments.
    pub fn cochain(&mut self, arity: usize, terms: usize, form_degree: usize, filtered: bool) -> Cochain {
        let mut out = Cochain::zero();
        for _ in 0..terms {
            let args: Vec<Index> = (0..arity).map(|_| self.non_unit()).collect();
            let floor = if filtered { args.iter().map(|&a| self.alg.degree(a)).sum() } else { 0 };
            let Some(o) = self.output(floor) else { continue };
            let m = self.mask(form_degree);
            let c = self.coefficient();
            out.add_term(args, o, m, &c);
        }
        out
    }

    /// A sparse homogeneous chain with `slots` tensor factors.
    pub fn chain(&mut self, slots: usize, terms: usize, form_degree: usize) -> Chain {
        let mut out = Chain::zero();
        for _ in 0..terms {
            let mut s = Vec::with_capacity(slots);
            s.push(if self.rng.gen_bool(0.2) { self.alg.unit() } else { self.non_unit() });
            for _ in 1..slots {
                s.push(self.non_unit());
            }
            let m = self.mask(form_degree);
            let c = self.coefficient();
            out.add_term(s, m, &c);
        }
        out
    }
}

/// Every basis chain with `slots` factors and no form part, in
/// lexicographic order of the slot tuple.
pub fn basis_chains(alg: &MatAlgebra, slots: usize) -> Vec<Chain> {
    let all: Vec<Index> = (0..alg.len() as Index).collect();
    let non_unit: Vec<Index> = alg.non_unit().collect();
    let mut tuples: Vec<Vec<Index>> = all.iter().map(|&a| vec![a]).collect();
    for _ in 1..slots {
        tuples =
            tuples.into_iter().flat_map(|t| non_unit.iter().map(move |&b| [t.clone(), vec![b]].concat())).collect();
    }
    let one = PolyX::one(alg.shape().dim);
    tuples
        .into_iter()
        .map(|t| {
            let mut c = Chain::zero();
            c.add_term(t, 0, &one);
            c
        })
        .collect()
}

/// How many and which random inputs an identity check draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub seeds: Vec<u64>,
    /// Largest cochain arity.
    pub arity_cap: usize,
    /// Largest chain degree; chains have up to `chain_degree + 1` slots.
    pub chain_degree: usize,
    /// Terms per random cochain or chain.
    pub terms: usize,
    /// Terms per filtration-preserving random cochain.
    pub filtered_terms: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { seeds: vec![1, 2, 3], arity_cap: 2, chain_degree: 3, terms: 6, filtered_terms: 40 }
    }
}

use std::collections::HashMap;

use super::{odd, signed, wedge, Cochain, Hochschild};
use crate::algebra::Index;

fn degree(args: &[Index], mask: u32) -> i64 {
    mask.count_ones() as i64 + args.len() as i64 - 1
}

impl Hochschild {
    /// `∂P = [μ, P]`: for `P` of degree `p`,
    /// `(-1)^p a₀P(a₁…) + P(a₀…a_p)a_{p+1} - (-1)^p Σ_i (-1)^i P(…, a_i a_{i+1}, …)`,
    /// with `∂(ωP) = (-1)^{|ω|} ω ∂P`.
    pub fn coboundary(&self, p: &Cochain) -> Cochain {
        let alg = &self.alg;
        let mut out = Cochain::zero();
        for (args, o, mask, c) in p.terms() {
            let pd = args.len() as i64 - 1;
            let form_neg = odd(mask.count_ones() as i64);
            for x in alg.non_unit() {
                let mut left = Vec::with_capacity(args.len() + 1);
                left.push(x);
                left.extend_from_slice(args);
                for (t, k) in alg.mul(x, o) {
                    out.add_term(left.clone(), *t, mask, &signed(&c.scale(k), form_neg ^ odd(pd)));
                }
                let mut right = args.clone();
                right.push(x);
                for (t, k) in alg.mul(o, x) {
                    out.add_term(right.clone(), *t, mask, &signed(&c.scale(k), form_neg));
                }
            }
            for (i, &a) in args.iter().enumerate() {
                let neg = !(odd(pd) ^ odd(i as i64)) ^ form_neg;
                for (x, y, k) in alg.factors(a) {
                    let mut split = Vec::with_capacity(args.len() + 1);
                    split.extend_from_slice(&args[..i]);
                    split.push(*x);
                    split.push(*y);
                    split.extend_from_slice(&args[i + 1..]);
                    out.add_term(split, o, mask, &signed(&c.scale(k), neg));
                }
            }
        }
        out
    }

    /// Pre-Lie composition `P∘Q = Σ_i (-1)^{iq} P(…, Q(a_i…a_{i+q}), …)`,
    /// with `(ωP)∘(ηQ) = (-1)^{p|η|} ωη (P∘Q)`. `extra` may flip the sign of
    /// a term pair given the total degrees of the `P` and `Q` terms.
    fn compose_with<F: Fn(i64, i64) -> bool>(&self, p: &Cochain, q: &Cochain, extra: F) -> Cochain {
        let mut slots: HashMap<Index, Vec<(&Vec<Index>, usize)>> = HashMap::new();
        for args in p.table.keys() {
            for (i, &a) in args.iter().enumerate() {
                slots.entry(a).or_default().push((args, i));
            }
        }
        let mut out = Cochain::zero();
        for (qa, qo, qm, qc) in q.terms() {
            let Some(places) = slots.get(&qo) else { continue };
            let qd = qa.len() as i64 - 1;
            let qt = degree(qa, qm);
            for (pa, i) in places {
                let pd = pa.len() as i64 - 1;
                let mut args = Vec::with_capacity(pa.len() + qa.len());
                args.extend_from_slice(&pa[..*i]);
                args.extend_from_slice(qa);
                args.extend_from_slice(&pa[i + 1..]);
                for ((po, pm), pc) in &p.table[*pa] {
                    let Some((mask, wneg)) = wedge(*pm, qm) else { continue };
                    let neg =
                        odd(*i as i64 * qd) ^ odd(pd * qm.count_ones() as i64) ^ wneg ^ extra(degree(pa, *pm), qt);
                    out.add_term(args.clone(), *po, mask, &signed(&(pc * qc), neg));
                }
            }
        }
        out
    }

    pub fn compose(&self, p: &Cochain, q: &Cochain) -> Cochain {
        self.compose_with(p, q, |_, _| false)
    }

    /// `[X, Y] = X∘Y - (-1)^{|X||Y|} Y∘X`, term by term in total degree.
    pub fn bracket(&self, x: &Cochain, y: &Cochain) -> Cochain {
        let flip = self.flip_bracket_sign;
        let xy = self.compose(x, y);
        let yx = self.compose_with(y, x, |dy, dx| !odd(dx * dy) ^ flip);
        xy.add(&yx)
    }
}

use super::{odd, signed, wedge, Chain, Cochain, Hochschild};
use crate::algebra::Index;

impl Hochschild {
    /// `b(a₀|…|a_n) = Σ_{i<n} (-1)^i (…|a_i a_{i+1}|…) + (-1)^n (a_n a₀|a₁|…|a_{n-1})`,
    /// with `b(ηc) = (-1)^{|η|} η bc`.
    pub fn boundary(&self, ch: &Chain) -> Chain {
        let alg = &self.alg;
        let unit = alg.unit();
        let mut out = Chain::zero();
        for (s, mask, c) in ch.terms() {
            let n = s.len() - 1;
            let form_neg = odd(mask.count_ones() as i64);
            for i in 0..n {
                for (t, k) in alg.mul(s[i], s[i + 1]) {
                    if i > 0 && *t == unit {
                        continue;
                    }
                    let mut slots = Vec::with_capacity(n);
                    slots.extend_from_slice(&s[..i]);
                    slots.push(*t);
                    slots.extend_from_slice(&s[i + 2..]);
                    out.add_term(slots, mask, &signed(&c.scale(k), form_neg ^ odd(i as i64)));
                }
            }
            if n > 0 {
                for (t, k) in alg.mul(s[n], s[0]) {
                    let mut slots = Vec::with_capacity(n);
                    slots.push(*t);
                    slots.extend_from_slice(&s[1..n]);
                    out.add_term(slots, mask, &signed(&c.scale(k), form_neg ^ odd(n as i64)));
                }
            }
        }
        out
    }

    /// Action of a cochain on chains. For `P` of arity `k = p + 1` acting on
    /// `(a₀|…|a_n)`: internal insertions `(a₀|…|a_i|P(a_{i+1}…a_{i+k})|…)`
    /// with sign `(-1)^{p(i+1)}`, and wrap-around terms
    /// `(P(a_{i+1}…a_n, a₀…a_{m-1})|a_m|…|a_i)` with sign `(-1)^{n(n-i)}`.
    /// On forms `R_{ωP}(ηc) = (-1)^{p|η|} ωη R_P c`.
    pub fn chain_action(&self, p: &Cochain, ch: &Chain) -> Chain {
        let unit = self.alg.unit();
        let arities = p.arities();
        let mut out = Chain::zero();
        let emit = |out: &mut Chain,
                    args: &[Index],
                    slots_of: &dyn Fn(Index) -> Vec<Index>,
                    barred: bool,
                    base_neg: bool,
                    eta: u32,
                    cc: &crate::poly::PolyX| {
            let Some(values) = p.values(args) else { return };
            let pd = args.len() as i64 - 1;
            for ((o, om), pc) in values {
                if barred && *o == unit {
                    continue;
                }
                let Some((mask, wneg)) = wedge(*om, eta) else { continue };
                let neg = base_neg ^ wneg ^ odd(pd * eta.count_ones() as i64);
                out.add_term(slots_of(*o), mask, &signed(&(pc * cc), neg));
            }
        };
        for (s, eta, cc) in ch.terms() {
            let n = s.len() - 1;
            for &k in &arities {
                let pd = k as i64 - 1;
                if k <= n {
                    for i in 0..=n - k {
                        let args = &s[i + 1..i + 1 + k];
                        let build = |o: Index| {
                            let mut v = Vec::with_capacity(s.len() + 1 - k);
                            v.extend_from_slice(&s[..=i]);
                            v.push(o);
                            v.extend_from_slice(&s[i + 1 + k..]);
                            v
                        };
                        emit(&mut out, args, &build, true, odd(pd * (i as i64 + 1)), eta, cc);
                    }
                }
                let start = (n + 1).saturating_sub(k);
                for i in start..=n {
                    let rem = k as i64 - (n - i) as i64;
                    if rem < 1 || rem > i as i64 + 1 {
                        continue;
                    }
                    let rem = rem as usize;
                    let mut args = Vec::with_capacity(k);
                    args.extend_from_slice(&s[i + 1..]);
                    args.extend_from_slice(&s[..rem]);
                    let build = |o: Index| {
                        let mut v = Vec::with_capacity(i + 2 - rem);
                        v.push(o);
                        v.extend_from_slice(&s[rem..=i]);
                        v
                    };
                    emit(&mut out, &args, &build, false, odd(n as i64 * (n - i) as i64), eta, cc);
                }
            }
        }
        out
    }
}

//! Trace and cotrace between the Hochschild complexes of `S_N` and
//! `Mat_r(S_N)`, their twists by the connection form, and the commuting
//! diagram checks.

use std::sync::Arc;

use crate::algebra::{BasisElement, Index, MatAlgebra};
use crate::endo::{gauge_shift, EndJet, GammaE};
use crate::error::{Error, Result};
use crate::fedosov::FedosovOperator;
use crate::hochschild::sample::{SampleSpec, Sampler};
use crate::hochschild::twisted::element_cochain;
use crate::hochschild::{Chain, Cochain, FedosovComplex, Hochschild, TwistedComplex};
use crate::residual::Residual;

fn mono_of(alg: &MatAlgebra, b: Index) -> usize {
    match alg.element(b) {
        BasisElement::Unit => 0,
        BasisElement::Entry { mono, .. } => *mono,
    }
}

/// `tr(M₀|…|M_k) = Σ (M₀)_{i₀i₁} | (M₁)_{i₁i₂} | … | (M_k)_{i_k i₀}`.
pub fn trace(scalar: &MatAlgebra, matrix: &MatAlgebra, c: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (s, mask, coeff) in c.terms() {
        let entries: Vec<Vec<(usize, usize, usize)>> = s.iter().map(|&b| matrix.entries_of(b)).collect();
        let mut stack: Vec<(usize, usize, usize, Vec<Index>)> = Vec::new();
        for &(m, i, j) in &entries[0] {
            stack.push((1, i, j, vec![scalar.entry(m, 0, 0)[0].0]));
        }
        while let Some((t, start, cur, slots)) = stack.pop() {
            if t == entries.len() {
                if cur == start {
                    out.add_term(slots, mask, coeff);
                }
                continue;
            }
            for &(m, i, j) in &entries[t] {
                if i != cur || m == 0 {
                    continue;
                }
                let mut next = slots.clone();
                next.push(scalar.entry(m, 0, 0)[0].0);
                stack.push((t + 1, start, j, next));
            }
        }
    }
    out
}

/// `cotr(P)(M₀,…,M_k)_{ij} = Σ P((M₀)_{i i₁}, …, (M_k)_{i_k j})`.
pub fn cotrace(scalar: &MatAlgebra, matrix: &MatAlgebra, p: &Cochain) -> Cochain {
    let r = matrix.rank();
    let mut out = Cochain::zero();
    for (args, o, mask, coeff) in p.terms() {
        let monos: Vec<usize> = args.iter().map(|&a| mono_of(scalar, a)).collect();
        let out_mono = mono_of(scalar, o);
        let len = args.len();
        let mut path = vec![0usize; len + 1];
        loop {
            let margs: Vec<Index> = (0..len).map(|t| matrix.entry(monos[t], path[t], path[t + 1])[0].0).collect();
            for (b, k) in matrix.entry(out_mono, path[0], path[len]) {
                out.add_term(margs.clone(), b, mask, &coeff.scale(&k));
            }
            // next index path in [r]^{len+1}
            let mut t = 0;
            while t <= len {
                path[t] += 1;
                if path[t] < r {
                    break;
                }
                path[t] = 0;
                t += 1;
            }
            if t > len {
                break;
            }
        }
    }
    out
}

/// Scalar and matrix complexes over one Fedosov operator, optionally
/// twisted by a connection form.
#[derive(Clone, Debug)]
pub struct TraceContext {
    scalar: FedosovComplex,
    matrix: FedosovComplex,
    twist: Option<TwistedComplex>,
}

impl TraceContext {
    pub fn new(op: &FedosovOperator, rank: usize, gamma: Option<&GammaE>) -> Result<Self> {
        let s = Arc::new(MatAlgebra::new(op.shape(), 1)?);
        let m = Arc::new(MatAlgebra::new(op.shape(), rank)?);
        let scalar = FedosovComplex::new(Hochschild::new(s), op)?;
        let matrix = FedosovComplex::new(Hochschild::new(m), op)?;
        let twist = gamma.map(|g| TwistedComplex::new(matrix.clone(), g)).transpose()?;
        Ok(Self { scalar, matrix, twist })
    }

    pub fn from_parts(scalar: FedosovComplex, matrix: FedosovComplex, twist: Option<TwistedComplex>) -> Self {
        Self { scalar, matrix, twist }
    }

    /// Same complexes with `γ` replaced by the element cochain `g`.
    pub fn with_gamma_cochain(&self, g: Cochain) -> Self {
        Self {
            scalar: self.scalar.clone(),
            matrix: self.matrix.clone(),
            twist: Some(TwistedComplex::from_element(self.matrix.clone(), g)),
        }
    }

    /// The context for `γ + Δ`.
    pub fn gauge_shifted(&self, gamma: &GammaE, delta: &EndJet) -> Result<Self> {
        let shifted = gauge_shift(gamma, delta)?;
        Ok(self.with_gamma_cochain(element_cochain(self.matrix.algebra(), shifted.value())?))
    }

    pub fn scalar(&self) -> &FedosovComplex {
        &self.scalar
    }

    pub fn matrix(&self) -> &FedosovComplex {
        &self.matrix
    }

    pub fn twist(&self) -> Result<&TwistedComplex> {
        self.twist.as_ref().ok_or_else(|| Error::Precondition("twisted maps need a connection form".into()))
    }

    pub fn trace(&self, c: &Chain) -> Chain {
        trace(self.scalar.algebra(), self.matrix.algebra(), c)
    }

    pub fn cotrace(&self, p: &Cochain) -> Cochain {
        cotrace(self.scalar.algebra(), self.matrix.algebra(), p)
    }

    /// `exp(-[γ, ·]) ∘ cotr`.
    pub fn twisted_cotrace(&self, p: &Cochain) -> Result<Cochain> {
        self.twist()?.exp_neg_ad(&self.cotrace(p))
    }

    /// `tr ∘ exp(R_γ)`.
    pub fn twisted_trace(&self, c: &Chain) -> Result<Chain> {
        Ok(self.trace(&self.twist()?.exp_r(c)?))
    }
}

/// Basis elements per pooled sample, see [`Sampler::with_pool`].
const POOL: usize = 4;

/// One named family of residuals from [`verify_diagrams`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramCheck {
    pub name: &'static str,
    pub anchor: &'static str,
    pub residual: Residual,
}

struct Acc {
    checks: Vec<DiagramCheck>,
}

impl Acc {
    fn add(&mut self, name: &'static str, anchor: &'static str, r: Residual) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.residual.absorb(r),
            None => self.checks.push(DiagramCheck { name, anchor, residual: r }),
        }
    }
}

/// Runs every trace/cotrace compatibility check on seeded samples.
pub fn verify_diagrams(ctx: &TraceContext, spec: &SampleSpec) -> Result<Vec<DiagramCheck>> {
    let sa = ctx.scalar.algebra().clone();
    let ma = ctx.matrix.algebra().clone();
    let hs = ctx.scalar.hochschild();
    let hm = ctx.matrix.hochschild();
    let tw = ctx.twist()?;
    let mut acc = Acc { checks: Vec::new() };
    let cs = |p: &Cochain| Residual::of_cochain(p, &ma);
    let ch_s = |c: &Chain| Residual::of_chain(c, &sa);
    for &seed in &spec.seeds {
        let mut ss = Sampler::new(&sa, seed);
        let mut sm = Sampler::new(&ma, seed ^ 0x9e37_79b9);
        let mut sp = Sampler::new(&sa, seed ^ 0x5bd1_e995).with_pool(POOL);
        for arity in 0..=spec.arity_cap {
            for form in 0..=1 {
                let p = ss.cochain(arity, spec.terms, form, false);
                let (bp, bq) = (
                    sp.cochain(arity, spec.terms, form, false),
                    sp.cochain(spec.arity_cap - arity, spec.terms, 1 - form, false),
                );
                let cp = ctx.cotrace(&p);
                acc.add(
                    "cotrace_coboundary",
                    "cotr commutes with the Hochschild coboundary",
                    cs(&hm.coboundary(&cp).sub(&ctx.cotrace(&hs.coboundary(&p)))),
                );
                acc.add(
                    "cotrace_fedosov",
                    "cotr commutes with D",
                    cs(&ctx.matrix.d_cochain(&cp).sub(&ctx.cotrace(&ctx.scalar.d_cochain(&p)))),
                );
                let (cbp, cbq) = (ctx.cotrace(&bp), ctx.cotrace(&bq));
                acc.add(
                    "cotrace_bracket",
                    "cotr is a morphism of Gerstenhaber brackets",
                    cs(&hm.bracket(&cbp, &cbq).sub(&ctx.cotrace(&hs.bracket(&bp, &bq)))),
                );
                let tp = ctx.twisted_cotrace(&bp)?;
                let tq = ctx.twisted_cotrace(&bq)?;
                acc.add(
                    "twisted_cotrace_bracket",
                    "cotr^tw is a morphism of Gerstenhaber brackets",
                    cs(&hm.bracket(&tp, &tq).sub(&ctx.twisted_cotrace(&hs.bracket(&bp, &bq))?)),
                );

                let f = ss.cochain(arity, spec.filtered_terms, form, true);
                let dd_s = ctx.scalar.d_cochain(&f).add(&hs.coboundary(&f));
                let tf = ctx.twisted_cotrace(&f)?;
                let lhs = tw.d_tilde_cochain(&tf).add(&hm.coboundary(&tf));
                acc.add(
                    "twisted_cotrace_chain_map",
                    "cotr^tw intertwines D+∂ with D̃+∂",
                    cs(&ctx.matrix.cochain_window(&lhs.sub(&ctx.twisted_cotrace(&dd_s)?))),
                );

                let g = sm.cochain(arity, spec.filtered_terms, form, true);
                let e = tw.exp_neg_ad(&g)?;
                let lhs = tw.d_tilde_cochain(&e).add(&hm.coboundary(&e));
                let rhs = tw.exp_neg_ad(&ctx.matrix.d_cochain(&g).add(&hm.coboundary(&g)))?;
                acc.add(
                    "exp_ad_intertwiner",
                    "(D̃+∂)∘exp(-ad γ) = exp(-ad γ)∘(D+∂)",
                    cs(&ctx.matrix.cochain_window(&lhs.sub(&rhs))),
                );
            }
        }
        for slots in 1..=spec.chain_degree + 1 {
            for form in 0..=1 {
                let c = sm.chain(slots, spec.terms, form);
                let tc = ctx.trace(&c);
                acc.add(
                    "trace_boundary",
                    "tr commutes with the Hochschild boundary",
                    ch_s(&hs.boundary(&tc).sub(&ctx.trace(&hm.boundary(&c)))),
                );
                acc.add(
                    "trace_fedosov",
                    "tr commutes with D",
                    ch_s(&ctx.scalar.d_chain(&tc).sub(&ctx.trace(&ctx.matrix.d_chain(&c)))),
                );

                let arity = (slots - 1).min(spec.arity_cap);
                let p = sp.cochain(arity, spec.terms, 1 - form, false);
                let lhs = ctx.trace(&hm.chain_action(&ctx.cotrace(&p), &c));
                acc.add("trace_module", "tr(R_{cotr P} c) = R_P tr(c)", ch_s(&lhs.sub(&hs.chain_action(&p, &tc))));
                let ttc = ctx.twisted_trace(&c)?;
                let lhs = ctx.twisted_trace(&hm.chain_action(&ctx.twisted_cotrace(&p)?, &c))?;
                acc.add(
                    "twisted_trace_module",
                    "tr^tw(R_{cotr^tw P} c) = R_P tr^tw(c)",
                    ch_s(&lhs.sub(&hs.chain_action(&p, &ttc))),
                );

                // windowed checks only see the margin, see `chain_margin`
                let m = ctx.matrix.n_rep();
                let cm = ctx.matrix.chain_margin(&c);
                let e = tw.exp_r_truncated(&cm, m + 1)?;
                let x = tw.d_tilde_chain(&cm).add(&hm.boundary(&cm));
                let ex = tw.exp_r_truncated(&x, m)?;
                let te = ctx.trace(&e);
                let lhs = ctx.scalar.d_chain(&te).add(&hs.boundary(&te));
                acc.add(
                    "twisted_trace_chain_map",
                    "tr^tw intertwines D̃+b with D+b",
                    ch_s(&ctx.scalar.chain_window(&lhs.sub(&ctx.trace(&ex)))),
                );
                let lhs = ctx.matrix.d_chain(&e).add(&hm.boundary(&e));
                acc.add(
                    "exp_r_intertwiner",
                    "(D+b)∘exp(R_γ) = exp(R_γ)∘(D̃+b)",
                    Residual::of_chain(&ctx.matrix.chain_window(&lhs.sub(&ex)), &ma),
                );
            }
        }
    }
    Ok(acc.checks)
}

/// For each shifted context, the difference of its twisted trace and
/// cotrace outputs from those of `ctx` on the same samples.
pub fn gauge_residuals(ctx: &TraceContext, shifted: &[TraceContext], spec: &SampleSpec) -> Result<Vec<Residual>> {
    let sa = ctx.scalar.algebra().clone();
    let ma = ctx.matrix.algebra().clone();
    let mut totals = vec![Residual::zero(); shifted.len()];
    for &seed in &spec.seeds {
        let mut ss = Sampler::new(&sa, seed);
        let mut sm = Sampler::new(&ma, seed ^ 0x9e37_79b9);
        for arity in 0..=spec.arity_cap {
            for form in 0..=1 {
                let p = ss.cochain(arity, spec.terms, form, false);
                let base = ctx.twisted_cotrace(&p)?;
                for (t, sh) in totals.iter_mut().zip(shifted) {
                    t.absorb(Residual::of_cochain(&base.sub(&sh.twisted_cotrace(&p)?), &ma));
                }
            }
        }
        for slots in 1..=spec.chain_degree + 1 {
            for form in 0..=1 {
                let c = sm.chain(slots, spec.terms, form);
                let base = ctx.twisted_trace(&c)?;
                for (t, sh) in totals.iter_mut().zip(shifted) {
                    t.absorb(Residual::of_chain(&base.sub(&sh.twisted_trace(&c)?), &sa));
                }
            }
        }
    }
    Ok(totals)
}

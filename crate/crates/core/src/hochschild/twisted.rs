//! The Fedosov differential `D = X + [W, ·]` on cochains and `X + R_W` on
//! chains, and its twist by the connection form `γ`:
//! `D̃ = D + [∂γ, ·]` on cochains and `D + R_{∂γ}` on chains.

use std::sync::Arc;

use num_traits::One;

use super::{Chain, Cochain, Hochschild};
use crate::algebra::MatAlgebra;
use crate::endo::{EndJet, GammaE};
use crate::error::{Error, Result};
use crate::fedosov::FedosovOperator;
use crate::form::FormJet;
use crate::rational::{self, Rational};

/// The arity-1 cochain `a ↦ Σ_k U^k ∂a/∂y^k`, applied entrywise.
pub fn vector_field_cochain(alg: &MatAlgebra, comps: &[FormJet]) -> Result<Cochain> {
    if comps.iter().any(|c| c.terms().any(|(k, _)| k.dx != 0)) {
        return Err(Error::Precondition("vector field has dx components".into()));
    }
    let mut out = Cochain::zero();
    for b in alg.non_unit() {
        for ((o, m), c) in alg.vector_field_image(comps, b) {
            out.add_term(vec![b], o, m, &c);
        }
    }
    Ok(out)
}

/// The arity-0 cochain of a matrix jet. Elements enter with a minus sign, so
/// that `[∂ι(u), ι(v)] = ι([u, v])` for the graded commutator of matrix
/// forms.
pub fn element_cochain(alg: &MatAlgebra, u: &EndJet) -> Result<Cochain> {
    let mut out = Cochain::zero();
    for ((b, m), c) in alg.decompose(u)? {
        out.add_term(Vec::new(), b, m, &-&c);
    }
    Ok(out)
}

/// Inverse of [`element_cochain`] on arity-0 cochains.
pub fn element_from_cochain(alg: &MatAlgebra, c: &Cochain) -> Result<EndJet> {
    let mut out = EndJet::zero(alg.rank(), alg.shape());
    for (a, o, m, k) in c.terms() {
        if !a.is_empty() {
            return Err(Error::Precondition("cochain is not an element".into()));
        }
        out = out.add(&alg.to_end_jet(o, m, &-k))?;
    }
    Ok(out)
}

/// `Σ_k c^k/k! · f^k(x)` for a nilpotent `f`.
fn exp_series<T: Clone, F: Fn(&T) -> T, Z: Fn(&T) -> bool, A: Fn(&T, &T, &Rational) -> T>(
    x: &T,
    c: &Rational,
    f: F,
    is_zero: Z,
    axpy: A,
    bound: usize,
) -> Result<T> {
    let mut sum = x.clone();
    let mut term = x.clone();
    let mut factor = Rational::one();
    for k in 1..=bound + 1 {
        term = f(&term);
        if is_zero(&term) {
            return Ok(sum);
        }
        factor = factor * c / rational::int(k as i64);
        sum = axpy(&sum, &term, &factor);
    }
    Err(Error::NotNilpotent(bound))
}

#[derive(Clone, Debug)]
pub struct FedosovComplex {
    h: Hochschild,
    w: Cochain,
    n_rep: usize,
}

impl FedosovComplex {
    pub fn new(h: Hochschild, op: &FedosovOperator) -> Result<Self> {
        if h.algebra().shape() != op.shape() {
            return Err(Error::ShapeMismatch("algebra and Fedosov operator have different jet shapes".into()));
        }
        let w = vector_field_cochain(h.algebra(), op.fiber_field().components())?;
        Ok(Self { h, w, n_rep: op.n_rep() })
    }

    pub fn hochschild(&self) -> &Hochschild {
        &self.h
    }

    pub fn algebra(&self) -> &Arc<MatAlgebra> {
        self.h.algebra()
    }

    pub fn field(&self) -> &Cochain {
        &self.w
    }

    pub fn n_rep(&self) -> usize {
        self.n_rep
    }

    pub fn d_cochain(&self, p: &Cochain) -> Cochain {
        self.h.horizontal_cochain(p).add(&self.h.bracket(&self.w, p))
    }

    pub fn d_chain(&self, c: &Chain) -> Chain {
        self.h.horizontal_chain(c).add(&self.h.chain_action(&self.w, c))
    }

    /// Values of `y`-degree at most `N_rep`.
    pub fn cochain_window(&self, p: &Cochain) -> Cochain {
        let alg = self.algebra();
        p.filter(|_, o, _| alg.degree(o) <= self.n_rep)
    }

    /// Terms whose slots all have `y`-degree at most `N_rep`.
    pub fn chain_window(&self, c: &Chain) -> Chain {
        self.chain_truncate(c, self.n_rep)
    }

    /// Terms whose slots all have `y`-degree at most `m`.
    pub fn chain_truncate(&self, c: &Chain, m: usize) -> Chain {
        let alg = self.algebra();
        c.filter(|s, _| s.iter().all(|&i| alg.degree(i) <= m))
    }

    /// Terms whose slots all have `y`-degree at most `N_rep + 1`. `D` lowers
    /// the degree of at most one slot by one and `b` never lowers degrees,
    /// so `(D + b)c` and `(D̃ + b)c` agree with their values on this margin
    /// inside the window.
    pub fn chain_margin(&self, c: &Chain) -> Chain {
        self.chain_truncate(c, self.n_rep + 1)
    }
}

#[derive(Clone, Debug)]
pub struct TwistedComplex {
    base: FedosovComplex,
    gamma: Cochain,
    dgamma: Cochain,
}

impl TwistedComplex {
    pub fn new(base: FedosovComplex, gamma: &GammaE) -> Result<Self> {
        if gamma.value().rank() != base.algebra().rank() {
            return Err(Error::ShapeMismatch(format!(
                "connection form has rank {}, algebra has rank {}",
                gamma.value().rank(),
                base.algebra().rank()
            )));
        }
        let g = element_cochain(base.algebra(), gamma.value())?;
        Ok(Self::from_element(base, g))
    }

    pub fn untwisted(base: FedosovComplex) -> Self {
        Self::from_element(base, Cochain::zero())
    }

    pub fn from_element(base: FedosovComplex, gamma: Cochain) -> Self {
        let dgamma = base.h.coboundary(&gamma);
        Self { base, gamma, dgamma }
    }

    pub fn base(&self) -> &FedosovComplex {
        &self.base
    }

    pub fn hochschild(&self) -> &Hochschild {
        &self.base.h
    }

    pub fn gamma(&self) -> &Cochain {
        &self.gamma
    }

    pub fn dgamma(&self) -> &Cochain {
        &self.dgamma
    }

    pub fn d_tilde_cochain(&self, p: &Cochain) -> Cochain {
        self.base.d_cochain(p).add(&self.base.h.bracket(&self.dgamma, p))
    }

    pub fn d_tilde_chain(&self, c: &Chain) -> Chain {
        self.base.d_chain(c).add(&self.base.h.chain_action(&self.dgamma, c))
    }

    pub fn ad_gamma(&self, y: &Cochain) -> Cochain {
        self.base.h.bracket(&self.gamma, y)
    }

    pub fn r_gamma(&self, c: &Chain) -> Chain {
        self.base.h.chain_action(&self.gamma, c)
    }

    fn bound(&self) -> usize {
        self.base.algebra().shape().dim + 1
    }

    /// `exp(-[γ, ·])`.
    pub fn exp_neg_ad(&self, y: &Cochain) -> Result<Cochain> {
        exp_series(
            y,
            &-Rational::one(),
            |t| self.ad_gamma(t),
            Cochain::is_zero,
            |s, t, k| s.add(&t.scale(k)),
            self.bound(),
        )
    }

    /// `exp(R_γ)`.
    pub fn exp_r(&self, c: &Chain) -> Result<Chain> {
        exp_series(c, &Rational::one(), |t| self.r_gamma(t), Chain::is_zero, |s, t, k| s.add(&t.scale(k)), self.bound())
    }

    /// `exp(R_γ)c` restricted to terms whose slots all have degree `≤ m`.
    /// `R_γ` only inserts slots, so truncating at every step is exact.
    pub fn exp_r_truncated(&self, c: &Chain, m: usize) -> Result<Chain> {
        let alg = self.base.algebra();
        let g = self.gamma.filter(|_, o, _| alg.degree(o) <= m);
        let h = &self.base.h;
        exp_series(
            &self.base.chain_truncate(c, m),
            &Rational::one(),
            |t| h.chain_action(&g, t),
            Chain::is_zero,
            |s, t, k| s.add(&t.scale(k)),
            self.bound(),
        )
    }

    /// `Dγ + ½[∂γ, γ]` on values of degree `≤ N_rep`.
    pub fn maurer_cartan(&self) -> Cochain {
        let half = rational::frac(1, 2);
        let r = self.base.d_cochain(&self.gamma).add(&self.base.h.bracket(&self.dgamma, &self.gamma).scale(&half));
        self.base.cochain_window(&r)
    }

    /// `[∂γ, γ]`.
    pub fn curvature_term(&self) -> Cochain {
        self.base.h.bracket(&self.dgamma, &self.gamma)
    }

    /// `[D + b, R_γ]c - R_{∂γ}c + ½R_{[∂γ,γ]}c`, windowed.
    pub fn chain_identity_residual(&self, c: &Chain) -> Chain {
        let h = &self.base.h;
        let db = |x: &Chain| self.base.d_chain(x).add(&h.boundary(x));
        let comm = db(&self.r_gamma(c)).sub(&self.r_gamma(&db(c)));
        let half = rational::frac(1, 2);
        let r = comm.sub(&h.chain_action(&self.dgamma, c)).add(&h.chain_action(&self.curvature_term(), c).scale(&half));
        self.base.chain_window(&r)
    }

    /// `[D + ∂, ad_γ]P - ad_{∂γ}P + ½ad_{[∂γ,γ]}P`, windowed.
    pub fn cochain_identity_residual(&self, p: &Cochain) -> Cochain {
        let h = &self.base.h;
        let dd = |x: &Cochain| self.base.d_cochain(x).add(&h.coboundary(x));
        let comm = dd(&self.ad_gamma(p)).sub(&self.ad_gamma(&dd(p)));
        let half = rational::frac(1, 2);
        let r = comm.sub(&h.bracket(&self.dgamma, p)).add(&h.bracket(&self.curvature_term(), p).scale(&half));
        self.base.cochain_window(&r)
    }

    /// `[[∂γ, γ], γ]`.
    pub fn triple_bracket(&self) -> Cochain {
        self.base.h.bracket(&self.curvature_term(), &self.gamma)
    }
}

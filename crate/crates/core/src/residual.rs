//! Exact residual summaries: a term count and the first nonzero term.

use serde::Serialize;

use crate::algebra::MatAlgebra;
use crate::endo::EndJet;
use crate::form::FormJet;
use crate::graded::GradedElement;
use crate::hochschild::{Chain, Cochain};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<String>,
}

impl Residual {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms == 0
    }

    pub fn message(msg: impl Into<String>) -> Self {
        Self { terms: 1, first: Some(msg.into()) }
    }

    /// Accumulates another residual, keeping the first nonzero term seen.
    pub fn absorb(&mut self, other: Residual) {
        self.terms += other.terms;
        if self.first.is_none() {
            self.first = other.first;
        }
    }

    pub fn of_form(u: &FormJet) -> Self {
        Self { terms: u.len(), first: u.leading_term() }
    }

    pub fn of_end(u: &EndJet) -> Self {
        Self { terms: u.term_count(), first: u.leading_term() }
    }

    pub fn of_graded(u: &GradedElement) -> Self {
        Self { terms: u.support_size(), first: u.leading_term() }
    }

    pub fn of_cochain(p: &Cochain, alg: &MatAlgebra) -> Self {
        Self { terms: p.term_count(), first: p.leading_term(alg) }
    }

    pub fn of_chain(c: &Chain, alg: &MatAlgebra) -> Self {
        Self { terms: c.term_count(), first: c.leading_term(alg) }
    }
}

use std::sync::Arc;

use super::sample::{basis_chains, Sampler};
use super::twisted::{element_cochain, element_from_cochain, vector_field_cochain};
use super::*;
use crate::endo::{build_gamma_e, twisted_d_element, ConnectionFormE, EndJet};
use crate::fedosov::{ChristoffelData, FedosovOperator};
use crate::form::{FormJet, JetShape};
use crate::rational::{int, Rational};

fn sgn(e: i64) -> Rational {
    if odd(e) {
        int(-1)
    } else {
        int(1)
    }
}

fn scalar() -> Hochschild {
    Hochschild::new(Arc::new(MatAlgebra::new(JetShape::new(2, 3), 1).unwrap()))
}

fn matrix() -> Hochschild {
    Hochschild::new(Arc::new(MatAlgebra::new(JetShape::new(1, 2), 2).unwrap()))
}

fn both() -> [Hochschild; 2] {
    [scalar(), matrix()]
}

#[test]
fn coboundary_squares_to_zero() {
    for h in both() {
        let mut s = Sampler::new(h.algebra(), 1);
        for arity in 0..=3 {
            for form in 0..=1 {
                let p = s.cochain(arity, 6, form, false);
                assert!(h.coboundary(&h.coboundary(&p)).is_zero(), "arity {arity}");
            }
        }
    }
}

#[test]
fn boundary_squares_to_zero() {
    for h in both() {
        let mut s = Sampler::new(h.algebra(), 2);
        for slots in 1..=4 {
            let c = s.chain(slots, 8, 1);
            assert!(h.boundary(&h.boundary(&c)).is_zero(), "{slots} slots");
        }
    }
}

#[test]
fn boundary_examples() {
    let h = scalar();
    let alg = h.algebra();
    let y = |i| alg.mono_index(&crate::YMono::var(2, i)).unwrap() as Index;
    let one = PolyX::one(2);
    let mut c = Chain::zero();
    c.add_term(vec![y(0), y(1)], 0, &one);
    assert!(h.boundary(&c).is_zero());

    let h = matrix();
    let alg = h.algebra().clone();
    let e = |m: usize, i: usize, j: usize| alg.entry(m, i, j)[0].0;
    // (y E12 | E21) -> y E11 - y E22, written in the basis
    let mut c = Chain::zero();
    c.add_term(vec![e(1, 0, 1), e(0, 1, 0)], 0, &PolyX::one(1));
    let mut want = Chain::zero();
    want.add_term(vec![e(1, 0, 0)], 0, &PolyX::one(1));
    want.add_term(vec![e(1, 1, 1)], 0, &-&PolyX::one(1));
    assert_eq!(h.boundary(&c), want);
}

#[test]
fn euler_derivation_is_a_cocycle() {
    // y^1 ∂/∂y^1 preserves degree, so it is an exact derivation of S_N
    for h in both() {
        let alg = h.algebra();
        let s = alg.shape();
        let mut comps = vec![FormJet::zero(s); s.dim];
        comps[0] = FormJet::y(s, 0);
        let p = vector_field_cochain(alg, &comps).unwrap();
        assert!(!p.is_zero());
        assert!(h.coboundary(&p).is_zero());
    }
}

#[test]
fn coboundary_matches_direct_evaluation() {
    // P(u) = y^1 u on non-constant monomials; (∂P)(a, b) = a P(b) + P(a) b - P(ab)
    let h = scalar();
    let alg = h.algebra();
    let y1 = crate::YMono::var(2, 0);
    let mut p = Cochain::zero();
    let one = PolyX::one(2);
    let times_y1 = |i: Index| -> Option<Index> {
        let m = &alg.monomials()[match alg.element(i) {
            crate::algebra::BasisElement::Entry { mono, .. } => *mono,
            crate::algebra::BasisElement::Unit => 0,
        }];
        let prod = m.mul(&y1);
        (prod.degree() <= 3).then(|| alg.mono_index(&prod).unwrap() as Index)
    };
    for a in alg.non_unit() {
        if let Some(o) = times_y1(a) {
            p.add_term(vec![a], o, 0, &one);
        }
    }
    let dp = h.coboundary(&p);
    let mut want = Cochain::zero();
    for a in alg.non_unit() {
        for b in alg.non_unit() {
            let ma = &alg.monomials()[a as usize];
            let mb = &alg.monomials()[b as usize];
            let ab = ma.mul(mb);
            if ab.degree() + 1 <= 3 {
                // a·y1·b + y1·a·b - y1·(a·b) = y1·a·b
                let o = alg.mono_index(&ab.mul(&y1)).unwrap() as Index;
                want.add_term(vec![a, b], o, 0, &one);
            }
        }
    }
    assert_eq!(dp, want);
}

#[test]
fn bracket_examples() {
    for h in both() {
        let mut s = Sampler::new(h.algebra(), 3);
        // even degree: arity 1 with no form, arity 2 with one form
        for (arity, form) in [(1, 0), (2, 1), (0, 1)] {
            let p = s.cochain(arity, 5, form, false);
            assert!(h.bracket(&p, &p).is_zero());
        }
        // degree-0 cochains: the bracket is the commutator of operators
        let p = s.cochain(1, 5, 0, false);
        let q = s.cochain(1, 5, 0, false);
        let pq = h.compose(&p, &q);
        let qp = h.compose(&q, &p);
        assert_eq!(h.bracket(&p, &q), pq.sub(&qp));
    }
}

#[test]
fn graded_jacobi() {
    for h in both() {
        let mut s = Sampler::new(h.algebra(), 4);
        for (ax, ay, az) in [(0, 1, 2), (1, 1, 1), (2, 0, 1), (1, 2, 0), (0, 0, 2)] {
            for (fx, fy, fz) in [(0, 0, 0), (1, 0, 1), (1, 1, 0)] {
                let x = s.cochain(ax, 4, fx, false);
                let y = s.cochain(ay, 4, fy, false);
                let z = s.cochain(az, 4, fz, false);
                let (dx, dy) = (x.degree().unwrap_or(0), y.degree().unwrap_or(0));
                let lhs = h.bracket(&x, &h.bracket(&y, &z));
                let rhs =
                    h.bracket(&h.bracket(&x, &y), &z).add(&h.bracket(&y, &h.bracket(&x, &z)).scale(&sgn(dx * dy)));
                assert_eq!(lhs, rhs, "arities {ax} {ay} {az}");
            }
        }
    }
}

#[test]
fn chain_action_is_a_lie_morphism() {
    for h in both() {
        let mut s = Sampler::new(h.algebra(), 5);
        for (ap, aq) in [(0, 0), (0, 1), (1, 1), (2, 0), (1, 2), (2, 2)] {
            for (fp, fq, fc) in [(0, 0, 0), (1, 0, 1), (1, 1, 0)] {
                let p = s.cochain(ap, 4, fp, false);
                let q = s.cochain(aq, 4, fq, false);
                let (dp, dq) = (p.degree().unwrap_or(0), q.degree().unwrap_or(0));
                for slots in 1..=4 {
                    let c = s.chain(slots, 4, fc);
                    let lhs = h.chain_action(&h.bracket(&p, &q), &c);
                    let rpq = h.chain_action(&p, &h.chain_action(&q, &c));
                    let rqp = h.chain_action(&q, &h.chain_action(&p, &c));
                    assert_eq!(lhs, rpq.sub(&rqp.scale(&sgn(dp * dq))), "arities {ap} {aq}, {slots} slots");
                }
            }
        }
    }
}

#[test]
fn boundary_intertwines_action_and_coboundary() {
    for h in both() {
        let mut s = Sampler::new(h.algebra(), 6);
        for arity in 0..=3 {
            for (fp, fc) in [(0, 0), (1, 0), (1, 1)] {
                let p = s.cochain(arity, 5, fp, false);
                let dp = p.degree().unwrap_or(0);
                for slots in 1..=4 {
                    let c = s.chain(slots, 5, fc);
                    let lhs =
                        h.boundary(&h.chain_action(&p, &c)).sub(&h.chain_action(&p, &h.boundary(&c)).scale(&sgn(dp)));
                    assert_eq!(lhs, h.chain_action(&h.coboundary(&p), &c), "arity {arity}, {slots} slots");
                }
            }
        }
    }
}

#[test]
fn outputs_stay_normalized() {
    let h = matrix();
    let alg = h.algebra().clone();
    let unit = alg.unit();
    let mut s = Sampler::new(&alg, 7);
    let p = s.cochain(1, 6, 0, false);
    let q = s.cochain(0, 6, 1, false);
    for c in [h.coboundary(&p), h.bracket(&p, &q), h.coboundary(&q)] {
        assert!(c.terms().all(|(a, ..)| !a.contains(&unit)));
    }
    for slots in 1..=3 {
        for c in basis_chains(&alg, slots).iter().take(200) {
            for r in [h.boundary(c), h.chain_action(&q, c), h.chain_action(&p, c)] {
                assert!(r.terms().all(|(sl, ..)| !sl[1..].contains(&unit)));
            }
        }
    }
}

fn curved_op(order: usize) -> FedosovOperator {
    let g = ChristoffelData::from_entries(2, [(0, 0, 0, PolyX::var(2, 1)), (1, 0, 1, PolyX::var(2, 0))]).unwrap();
    FedosovOperator::build(g, order, None).unwrap()
}

fn curved_conn() -> ConnectionFormE {
    let x = |i| PolyX::var(2, i);
    let c = |n| PolyX::constant(2, int(n));
    ConnectionFormE::zero(2, 2)
        .with_matrix(0, vec![vec![x(1), c(1)], vec![PolyX::zero(), c(-1)]])
        .unwrap()
        .with_matrix(1, vec![vec![PolyX::zero(), x(0)], vec![c(2), PolyX::zero()]])
        .unwrap()
}

fn twisted(order: usize) -> (FedosovOperator, crate::endo::GammaE, TwistedComplex) {
    let op = curved_op(order);
    let gamma = build_gamma_e(&op, &curved_conn()).unwrap();
    let alg = Arc::new(MatAlgebra::new(op.shape(), 2).unwrap());
    let base = FedosovComplex::new(Hochschild::new(alg), &op).unwrap();
    let tw = TwistedComplex::new(base, &gamma).unwrap();
    (op, gamma, tw)
}

#[test]
fn elements_embed_compatibly() {
    let (op, gamma, tw) = twisted(3);
    let alg = tw.base().algebra().clone();
    let s = op.shape();
    let u = EndJet::unit(2, 0, 1, &(&FormJet::y(s, 0) * &FormJet::x(s, 1)))
        .add(&EndJet::unit(2, 1, 1, &(&FormJet::y(s, 1) * &FormJet::dy(s, 0))))
        .unwrap();
    let iu = element_cochain(&alg, &u).unwrap();
    assert_eq!(element_from_cochain(&alg, &iu).unwrap(), u);
    let d = element_from_cochain(&alg, &tw.base().d_cochain(&iu)).unwrap();
    assert_eq!(d, u.map(|e| op.apply(e)));
    let dt = element_from_cochain(&alg, &tw.d_tilde_cochain(&iu)).unwrap();
    assert_eq!(dt, twisted_d_element(&gamma, &op, &u).unwrap());
}

#[test]
fn maurer_cartan_in_cochain_form() {
    let (_, _, tw) = twisted(4);
    assert!(!tw.gamma().is_zero());
    assert!(tw.maurer_cartan().is_zero());
    assert!(tw.triple_bracket().is_zero());
}

#[test]
fn structure_identities_hold_on_samples() {
    let (_, _, tw) = twisted(4);
    let alg = tw.base().algebra().clone();
    let mut s = Sampler::new(&alg, 8);
    for arity in 0..=2 {
        let p = s.cochain(arity, 40, 0, true);
        let r = tw.cochain_identity_residual(&p);
        assert!(r.is_zero(), "arity {arity}: {:?}", r.leading_term(&alg));
    }
    for slots in 1..=3 {
        let c = s.chain(slots, 4, 0);
        let r = tw.chain_identity_residual(&c);
        assert!(r.is_zero(), "{slots} slots: {:?}", r.leading_term(&alg));
    }
}

#[test]
fn differentials_square_to_zero_on_window() {
    let (_, _, tw) = twisted(4);
    let base = tw.base();
    let h = tw.hochschild();
    let alg = base.algebra().clone();
    let mut s = Sampler::new(&alg, 9);
    for arity in 0..=2 {
        let p = s.cochain(arity, 40, 0, true);
        let dd = |x: &Cochain| base.d_cochain(x).add(&h.coboundary(x));
        let tt = |x: &Cochain| tw.d_tilde_cochain(x).add(&h.coboundary(x));
        assert!(base.cochain_window(&dd(&dd(&p))).is_zero(), "D+∂, arity {arity}");
        assert!(base.cochain_window(&tt(&tt(&p))).is_zero(), "D̃+∂, arity {arity}");
    }
    for slots in 1..=3 {
        let c = s.chain(slots, 4, 0);
        let dd = |x: &Chain| base.d_chain(x).add(&h.boundary(x));
        let tt = |x: &Chain| tw.d_tilde_chain(x).add(&h.boundary(x));
        assert!(base.chain_window(&dd(&dd(&c))).is_zero(), "D+b, {slots} slots");
        assert!(base.chain_window(&tt(&tt(&c))).is_zero(), "D̃+b, {slots} slots");
    }
}

#[test]
fn flipped_bracket_sign_breaks_jacobi_or_squares() {
    let h = scalar().with_flipped_bracket_sign();
    let mut s = Sampler::new(h.algebra(), 10);
    let p = s.cochain(1, 5, 0, false);
    let q = s.cochain(2, 5, 0, false);
    // with the flip, the bracket of degree-0 and degree-1 cochains is symmetric
    assert_ne!(h.bracket(&p, &q), h.bracket(&q, &p).scale(&int(-1)));
}

#[test]
fn truncated_twist_matches_full_twist() {
    let (_, _, tw) = twisted(4);
    let base = tw.base();
    let h = tw.hochschild();
    let mut s = Sampler::new(base.algebra(), 12);
    for slots in 1..=3 {
        let c = s.chain(slots, 2, 0);
        for m in 1..=3 {
            assert_eq!(tw.exp_r_truncated(&c, m).unwrap(), base.chain_truncate(&tw.exp_r(&c).unwrap(), m));
        }
        let db = |x: &Chain| tw.d_tilde_chain(x).add(&h.boundary(x));
        assert_eq!(base.chain_window(&db(&c)), base.chain_window(&db(&base.chain_margin(&c))));
        let dd = |x: &Chain| base.d_chain(x).add(&h.boundary(x));
        assert_eq!(base.chain_window(&dd(&c)), base.chain_window(&dd(&base.chain_margin(&c))));
    }
}

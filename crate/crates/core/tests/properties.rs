mod common;

use std::sync::Arc;

use hochfed::algebra::MatAlgebra;
use hochfed::fedosov::{delta, delta_inv, sigma};
use hochfed::graded;
use hochfed::hochschild::sample::Sampler;
use hochfed::hochschild::Hochschild;
use hochfed::monomial::monomial_basis;
use hochfed::rational::{frac, int};
use hochfed::tracemaps::{cotrace, trace};
use hochfed::{FormJet, JetShape, PolyX, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn big(r: &Rational) -> BigRational {
    r.to_string().parse().unwrap()
}

fn big_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 1 {
        int(-1)
    } else {
        int(1)
    }
}

fn rational() -> impl Strategy<Value = (i64, i64)> {
    prop_oneof![
        (-50i64..50, 1i64..50),
        (
            any::<i64>().prop_filter("min", |n| *n != i64::MIN),
            any::<i64>().prop_filter("nonzero", |d| *d != 0 && *d != i64::MIN)
        ),
    ]
}

fn poly(dim: usize) -> impl Strategy<Value = PolyX> {
    prop::collection::vec((prop::collection::vec(0u32..3, dim), -4i64..=4), 0..5)
        .prop_map(|terms| PolyX::from_terms(terms.into_iter().map(|(e, c)| (e, int(c)))))
}

fn form(d: usize, n: usize) -> impl Strategy<Value = FormJet> {
    let basis = monomial_basis(d, n, true);
    let masks = 1u32 << d;
    prop::collection::vec((0..basis.len(), 0..masks, 0..masks, -5i64..=5), 1..8).prop_map(move |terms| {
        let shape = JetShape::new(d, n);
        let mut u = FormJet::zero(shape);
        for (m, dx, dy, c) in terms {
            u += &FormJet::term(shape, basis[m].clone(), dx, dy, PolyX::constant(d, int(c)));
        }
        u
    })
}

fn hochschild(d: usize, n: usize, r: usize) -> Hochschild {
    Hochschild::new(Arc::new(MatAlgebra::new(JetShape::new(d, n), r).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rational_arithmetic_matches_big_rationals(a in rational(), b in rational()) {
        let (x, y) = (frac(a.0, a.1), frac(b.0, b.1));
        let (bx, by) = (big_frac(a.0, a.1), big_frac(b.0, b.1));
        prop_assert_eq!(big(&(&x + &y)), &bx + &by);
        prop_assert_eq!(big(&(&x - &y)), &bx - &by);
        prop_assert_eq!(big(&(&x * &y)), &bx * &by);
        prop_assert_eq!(big(&(&x / &y)), &bx / &by);
        prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
    }

    #[test]
    fn polynomial_ring_laws(p in poly(2), q in poly(2), s in poly(2)) {
        prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
        prop_assert_eq!(&p * &(&q + &s), &(&p * &q) + &(&p * &s));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn derivative_is_a_derivation(p in poly(2), q in poly(2), i in 0usize..2) {
        prop_assert_eq!((&p * &q).deriv(i), &(&p.deriv(i) * &q) + &(&p * &q.deriv(i)));
    }

    #[test]
    fn delta_homotopy_on_random_forms(u in (1usize..=3, 1usize..=4).prop_flat_map(|(d, n)| form(d, n))) {
        let u = u.with_order(u.shape().order + 1);
        let rebuilt = &(&sigma(&u) + &delta(&delta_inv(&u))) + &delta_inv(&delta(&u));
        prop_assert_eq!(rebuilt, u.clone());
        prop_assert!(delta(&delta(&u)).is_zero());
        prop_assert!(delta_inv(&delta_inv(&u)).is_zero());
    }

    #[test]
    fn form_product_is_graded_commutative(u in form(2, 2), v in form(2, 2)) {
        let shape = u.shape();
        for (ku, cu) in u.terms() {
            for (kv, cv) in v.terms() {
                let a = FormJet::term(shape, ku.y.clone(), ku.dx, ku.dy, cu.clone());
                let b = FormJet::term(shape, kv.y.clone(), kv.dx, kv.dy, cv.clone());
                let s = sign((ku.form_degree() * kv.form_degree()) as i64);
                prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap().scale(&s));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn lemma_and_proposition_on_random_instances(seed in any::<u64>(), size in 2usize..=4) {
        let inst = graded::random_nilpotent_instance(seed, size, 2 * size).unwrap();
        let (b, c) = graded::lemma1_quadruple(&inst.a, &inst.d).unwrap();
        prop_assert!(graded::check_lemma1(&inst.a, &b, &c, &inst.d).unwrap().is_zero());
        prop_assert!(graded::check_prop1_forward(&inst.a, &inst.d).unwrap().is_zero());
        prop_assert!(graded::check_prop1_reverse(&inst.a, &inst.d).unwrap().is_zero());
        let bf = graded::prop1_forward_b(&inst.a, &inst.d).unwrap();
        let br = graded::prop1_reverse_b(&inst.a, &inst.d).unwrap();
        prop_assert!(bf.sub(&br).is_zero());
    }

    #[test]
    fn todd_coefficients_match_oracle(order in 1usize..=16) {
        let lib = graded::todd_coefficients(order);
        let oracle = common::todd_oracle(order);
        prop_assert_eq!(&lib.coeffs[..], &oracle[1..]);
    }

    #[test]
    fn hochschild_differentials_square_to_zero(seed in any::<u64>(), r in 1usize..=2) {
        let h = hochschild(2, 2, r);
        let mut s = Sampler::new(h.algebra(), seed);
        for arity in 0..=2 {
            let p = s.cochain(arity, 4, 1, false);
            prop_assert!(h.coboundary(&h.coboundary(&p)).is_zero());
        }
        for slots in 1..=3 {
            let c = s.chain(slots, 4, 1);
            prop_assert!(h.boundary(&h.boundary(&c)).is_zero());
        }
    }

    #[test]
    fn bracket_is_graded_antisymmetric(seed in any::<u64>(), a in 0usize..=2, b in 0usize..=2, fp in 0usize..=1, fq in 0usize..=1) {
        let h = hochschild(1, 2, 2);
        let mut s = Sampler::new(h.algebra(), seed).with_pool(4);
        let p = s.cochain(a, 4, fp, false);
        let q = s.cochain(b, 4, fq, false);
        let e = p.degree().unwrap_or(0) * q.degree().unwrap_or(0);
        prop_assert!(h.bracket(&p, &q).add(&h.bracket(&q, &p).scale(&sign(e))).is_zero());
    }

    #[test]
    fn trace_and_cotrace_are_morphisms(seed in any::<u64>()) {
        let hs = hochschild(1, 2, 1);
        let hm = hochschild(1, 2, 2);
        let (sa, ma) = (hs.algebra().clone(), hm.algebra().clone());
        let mut ss = Sampler::new(&sa, seed).with_pool(3);
        let mut sm = Sampler::new(&ma, seed ^ 1);
        for slots in 1..=3 {
            let c = sm.chain(slots, 4, 1);
            prop_assert_eq!(hs.boundary(&trace(&sa, &ma, &c)), trace(&sa, &ma, &hm.boundary(&c)));
        }
        for arity in 0..=2 {
            let p = ss.cochain(arity, 4, 1, false);
            prop_assert_eq!(hm.coboundary(&cotrace(&sa, &ma, &p)), cotrace(&sa, &ma, &hs.coboundary(&p)));
            let q = ss.cochain(1, 4, 0, false);
            prop_assert_eq!(
                hm.bracket(&cotrace(&sa, &ma, &p), &cotrace(&sa, &ma, &q)),
                cotrace(&sa, &ma, &hs.bracket(&p, &q))
            );
        }
    }
}

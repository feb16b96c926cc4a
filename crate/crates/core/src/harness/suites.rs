//! Suite orchestration: builds the instance once, runs the requested suites
//! in dependency order and records one entry per check.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{InstanceConfig, Mutation};
use super::report::{CheckRecord, Status, VerificationReport};
use crate::algebra::MatAlgebra;
use crate::endo::{build_gamma_e, check_maurer_cartan, twisted_d_element, ConnectionFormE, EndJet, GammaE};
use crate::error::{Error, Result};
use crate::fedosov::{correction_residual, delta, delta_inv, sigma, FedosovOperator, FiberVectorFieldForm};
use crate::form::{FormJet, FormKey, JetShape};
use crate::graded::{self, random_nilpotent_instance};
use crate::hochschild::sample::{basis_chains, SampleSpec, Sampler};
use crate::hochschild::{Chain, Cochain, FedosovComplex, Hochschild, TwistedComplex};
use crate::monomial::{monomial_basis, YMono};
use crate::poly::PolyX;
use crate::rational::{self, Rational};
use crate::residual::Residual;
use crate::tracemaps::{gauge_residuals, verify_diagrams, TraceContext};

/// Basis chains are enumerated in full only below this count.
const BASIS_CHAIN_LIMIT: usize = 4096;
/// Basis elements per pooled sample, see [`Sampler::with_pool`].
const POOL: usize = 4;
const TODD_ORDER: usize = 12;
const GAUGE_SHIFTS: usize = 3;

/// The built geometric data shared by the suites.
struct Instance {
    op: FedosovOperator,
    gamma: GammaE,
    twisted: TwistedComplex,
}

struct Runner<'a> {
    cfg: &'a InstanceConfig,
    checks: Vec<CheckRecord>,
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

impl<'a> Runner<'a> {
    fn base_params(&self) -> Vec<(&'static str, String)> {
        let c = self.cfg;
        vec![("d", c.d.to_string()), ("r", c.r.to_string()), ("N", c.n.to_string()), ("N_rep", c.n_rep().to_string())]
    }

    fn record(
        &mut self,
        suite: &'static str,
        name: &str,
        anchor: &str,
        extra: &[(&str, String)],
        f: impl FnOnce() -> Result<Residual>,
    ) {
        let mut p = self.base_params();
        p.extend(extra.iter().map(|(k, v)| (*k, v.clone())));
        let start = Instant::now();
        let (status, residual) = match f() {
            Ok(r) if r.is_zero() => (Status::Pass, r),
            Ok(r) => (Status::Fail, r),
            Err(e) => (Status::Fail, Residual::message(format!("error: {e}"))),
        };
        self.checks.push(CheckRecord {
            suite,
            name: name.to_string(),
            anchor: anchor.to_string(),
            params: params(&p),
            status,
            residual,
            elapsed: start.elapsed(),
            elapsed_ms: None,
        });
    }

    fn skip(&mut self, suite: &'static str, reason: &str) {
        self.checks.push(CheckRecord {
            suite,
            name: "suite".into(),
            anchor: String::new(),
            params: params(&self.base_params()),
            status: Status::Skipped,
            residual: Residual::message(reason),
            elapsed: Default::default(),
            elapsed_ms: None,
        });
    }

    fn spec(&self) -> SampleSpec {
        let c = self.cfg;
        SampleSpec {
            seeds: c.seeds.clone(),
            arity_cap: c.arity_cap,
            chain_degree: c.chain_degree,
            terms: c.sample_terms,
            filtered_terms: c.filtered_terms,
        }
    }

    fn flip(&self) -> bool {
        self.cfg.mutation == Some(Mutation::FlipBracketSign)
    }
}

fn make_hochschild(alg: Arc<MatAlgebra>, flip: bool) -> Hochschild {
    let h = Hochschild::new(alg);
    if flip {
        h.with_flipped_bracket_sign()
    } else {
        h
    }
}

/// Runs the configured suites and assembles the report.
pub fn run_suites(cfg: &InstanceConfig) -> VerificationReport {
    let mut run = Runner { cfg, checks: Vec::new() };
    let suites = cfg.ordered_suites();
    let needs_instance = suites.iter().any(|s| *s != "lemmas");
    let mut instance = None;
    if needs_instance {
        let mut built = None;
        run.record("setup", "build_instance", "Fedosov correction and twisting form", &[], || {
            built = Some(build_instance(cfg)?);
            Ok(Residual::zero())
        });
        instance = built;
    }
    for suite in suites {
        match (suite, &instance) {
            ("lemmas", _) => lemmas(&mut run),
            (_, None) => run.skip(suite, "instance could not be built"),
            ("fedosov", Some(inst)) => fedosov(&mut run, inst),
            ("gamma", Some(inst)) => gamma(&mut run, inst),
            ("hochschild", Some(inst)) => hochschild(&mut run, inst),
            ("tracemaps", Some(inst)) => tracemaps(&mut run, inst),
            _ => unreachable!("suite names are validated"),
        }
    }
    VerificationReport::new(run.checks)
}

/// Subtracts twice the leading term, or adds a fresh term when `u` is zero.
fn corrupt_form(u: &FormJet, fallback: FormKey) -> FormJet {
    let mut out = u.clone();
    match u.terms().next() {
        Some((k, c)) => out.add_term_scaled(k.clone(), c, &rational::int(-2)),
        None => out.add_term(fallback, &PolyX::one(u.shape().dim)),
    }
    out
}

fn fallback_key(shape: JetShape) -> FormKey {
    FormKey { y: YMono::var(shape.dim, 0).times_var(0), dx: 0, dy: 1 }
}

fn build_instance(cfg: &InstanceConfig) -> Result<Instance> {
    let christoffel = cfg.christoffel()?;
    let mut op = FedosovOperator::build(christoffel.clone(), cfg.n, Some(cfg.n_rep()))?;
    if cfg.mutation == Some(Mutation::CorruptA) {
        let a = op.correction();
        let mut comps = a.components().to_vec();
        let i = comps.iter().position(|c| !c.is_zero()).unwrap_or(0);
        comps[i] = corrupt_form(&comps[i], fallback_key(op.shape()));
        let a = FiberVectorFieldForm::from_components(op.shape(), comps)?;
        op = FedosovOperator::with_correction(christoffel, a, cfg.n_rep());
    }
    let mut gamma = build_gamma_e(&op, &cfg.connection()?)?;
    if cfg.mutation == Some(Mutation::CorruptGamma) {
        let corr = gamma.correction();
        let mut entries = corr.entries().to_vec();
        let i = entries.iter().position(|c| !c.is_zero()).unwrap_or(0);
        entries[i] = corrupt_form(&entries[i], fallback_key(op.shape()));
        let corr = EndJet::from_entries(cfg.r, op.shape(), entries)?;
        gamma = GammaE::from_parts(gamma.base().add(&corr)?, gamma.base().clone())?;
    }
    let alg = Arc::new(MatAlgebra::new(op.shape(), cfg.r)?);
    let h = make_hochschild(alg, cfg.mutation == Some(Mutation::FlipBracketSign));
    let base = FedosovComplex::new(h, &op)?;
    let twisted = TwistedComplex::new(base, &gamma)?;
    Ok(Instance { op, gamma, twisted })
}

fn lemmas(run: &mut Runner) {
    let cfg = run.cfg;
    let size = cfg.lemma_size;
    let instances = || cfg.seeds.iter().map(move |&s| random_nilpotent_instance(s, size, 2 * size));
    let extra = [("seeds", cfg.seeds.len().to_string()), ("matrix_size", size.to_string())];
    run.record("lemmas", "todd_series", "x/(e^x-1) inverts (e^x-1)/x", &[("order", TODD_ORDER.to_string())], || {
        let f = graded::todd_coefficients(TODD_ORDER);
        let g = graded::exp_quotient_series(TODD_ORDER);
        let mut r = Residual::zero();
        for n in 0..=TODD_ORDER {
            let mut acc = if n == 0 { Rational::one() } else { f.coeffs[n - 1].clone() };
            for k in 1..=n {
                let fk = if n == k { Rational::one() } else { f.coeffs[n - k - 1].clone() };
                acc += &g[k] * fk;
            }
            let want = if n == 0 { Rational::one() } else { Rational::zero() };
            if acc != want {
                r.absorb(Residual::message(format!("x^{n}: {}", rational::format(&(acc - want)))));
            }
        }
        Ok(r)
    });
    run.record("lemmas", "lemma1", "exp(a) conjugates d into d+b", &extra, || {
        let mut r = Residual::zero();
        for inst in instances() {
            let inst = inst?;
            let (b, c) = graded::lemma1_quadruple(&inst.a, &inst.d)?;
            r.absorb(Residual::of_graded(&graded::check_lemma1(&inst.a, &b, &c, &inst.d)?));
        }
        Ok(r)
    });
    run.record("lemmas", "prop1_forward", "b = g(ad_a)[a,d] gives exp(a)d = (d+b)exp(a)", &extra, || {
        let mut r = Residual::zero();
        for inst in instances() {
            let inst = inst?;
            r.absorb(Residual::of_graded(&graded::check_prop1_forward(&inst.a, &inst.d)?));
        }
        Ok(r)
    });
    run.record("lemmas", "prop1_reverse", "conjugation gives [a,d] = f(ad_a)b", &extra, || {
        let mut r = Residual::zero();
        for inst in instances() {
            let inst = inst?;
            r.absorb(Residual::of_graded(&graded::check_prop1_reverse(&inst.a, &inst.d)?));
        }
        Ok(r)
    });
    run.record("lemmas", "prop1_iff", "both constructions of b agree", &extra, || {
        let mut r = Residual::zero();
        for inst in instances() {
            let inst = inst?;
            let bf = graded::prop1_forward_b(&inst.a, &inst.d)?;
            let br = graded::prop1_reverse_b(&inst.a, &inst.d)?;
            r.absorb(Residual::of_graded(&graded::prop1_series_residual(&inst.a, &bf, &inst.d)?));
            r.absorb(Residual::of_graded(&graded::prop1_exp_residual(&inst.a, &br, &inst.d)?));
            r.absorb(Residual::of_graded(&bf.sub(&br)));
        }
        Ok(r)
    });
}

/// All `y^m dx^S dy^T` with `|m| ≤ order`.
fn form_basis(shape: JetShape, order: usize, with_dx: bool) -> Vec<FormKey> {
    let masks = 1u32 << shape.dim;
    let dx_masks = if with_dx { masks } else { 1 };
    let mut out = Vec::new();
    for m in monomial_basis(shape.dim, order, true) {
        for dx in 0..dx_masks {
            for dy in 0..masks {
                out.push(FormKey { y: m.clone(), dx, dy });
            }
        }
    }
    out
}

/// Coefficients `1, x^1, …, x^d, (x^1)^2` used to probe `x`-dependence.
fn probe_coefficients(dim: usize) -> Vec<PolyX> {
    let mut out = vec![PolyX::one(dim)];
    out.extend((0..dim).map(|i| PolyX::var(dim, i)));
    out.push(&PolyX::var(dim, 0) * &PolyX::var(dim, 0));
    out
}

fn fedosov(run: &mut Runner, inst: &Instance) {
    let op = &inst.op;
    let shape = op.shape();
    run.record("fedosov", "delta_homotopy", "u = σu + δδ⁻¹u + δ⁻¹δu", &[], || {
        let lifted = shape.order + 1;
        let mut r = Residual::zero();
        for k in form_basis(shape, shape.order, true) {
            let u = FormJet::term(shape, k.y, k.dx, k.dy, PolyX::one(shape.dim)).with_order(lifted);
            let rebuilt = &(&sigma(&u) + &delta(&delta_inv(&u))) + &delta_inv(&delta(&u));
            r.absorb(Residual::of_form(&(&rebuilt - &u)));
        }
        Ok(r)
    });
    run.record("fedosov", "delta_nilpotent", "δ² = 0 and (δ⁻¹)² = 0", &[], || {
        let mut r = Residual::zero();
        for k in form_basis(shape, shape.order, true) {
            let u = FormJet::term(shape, k.y, k.dx, k.dy, PolyX::one(shape.dim));
            r.absorb(Residual::of_form(&delta(&delta(&u))));
            r.absorb(Residual::of_form(&delta_inv(&delta_inv(&u))));
        }
        Ok(r)
    });
    run.record("fedosov", "correction_recursion", "A = δ⁻¹(R + ∇A + A²)", &[], || {
        let res = correction_residual(op);
        Ok(res.components().iter().fold(Residual::zero(), |mut acc, c| {
            acc.absorb(Residual::of_form(c));
            acc
        }))
    });
    run.record("fedosov", "correction_normalized", "δ⁻¹A = 0", &[], || {
        let mut r = Residual::zero();
        for c in op.correction().components() {
            r.absorb(Residual::of_form(&delta_inv(c)));
        }
        Ok(r)
    });
    let n_rep = op.n_rep();
    run.record("fedosov", "d_squared", "D² = 0 up to N_rep", &[("basis_degree", n_rep.to_string())], || {
        let mut r = Residual::zero();
        for k in form_basis(shape, n_rep, false) {
            for c in probe_coefficients(shape.dim) {
                let u = FormJet::term(shape, k.y.clone(), k.dx, k.dy, c);
                r.absorb(Residual::of_form(&op.apply(&op.apply(&u)).up_to_degree(n_rep)));
            }
        }
        Ok(r)
    });
}

fn gamma(run: &mut Runner, inst: &Instance) {
    let op = &inst.op;
    let g = &inst.gamma;
    let shape = op.shape();
    let rank = run.cfg.r;
    run.record("gamma", "maurer_cartan", "Dγ + ½[γ,γ] = 0 up to N_rep", &[], || {
        Ok(Residual::of_end(&check_maurer_cartan(g, op)?))
    });
    run.record("gamma", "gamma_normalized", "δ⁻¹(γ - Γ^E) = 0", &[], || {
        Ok(Residual::of_end(&g.correction().map(delta_inv)))
    });
    run.record(
        "gamma",
        "d_tilde_squared",
        "D̃² = 0 up to N_rep",
        &[("basis_degree", op.n_rep().to_string())],
        || {
            let mut r = Residual::zero();
            for k in form_basis(shape, op.n_rep(), false) {
                for c in probe_coefficients(shape.dim).into_iter().take(2) {
                    let e = FormJet::term(shape, k.y.clone(), k.dx, k.dy, c);
                    for i in 0..rank {
                        for j in 0..rank {
                            let u = EndJet::unit(rank, i, j, &e);
                            let dd = twisted_d_element(g, op, &twisted_d_element(g, op, &u)?)?;
                            r.absorb(Residual::of_end(&dd.up_to_degree(op.n_rep())));
                        }
                    }
                }
            }
            Ok(r)
        },
    );
}

fn sgn(e: i64) -> Rational {
    rational::sign(e.rem_euclid(2) as usize)
}

fn hochschild(run: &mut Runner, inst: &Instance) {
    let tw = &inst.twisted;
    let base = tw.base();
    let h = tw.hochschild();
    let alg = base.algebra().clone();
    let spec = run.spec();
    let cap = spec.arity_cap;
    let slot_max = spec.chain_degree + 1;
    let extra = [
        ("seeds", spec.seeds.len().to_string()),
        ("arity_cap", cap.to_string()),
        ("chain_degree", spec.chain_degree.to_string()),
    ];
    let of_co = |p: &Cochain| Residual::of_cochain(p, &alg);
    let of_ch = |c: &Chain| Residual::of_chain(c, &alg);

    run.record("hochschild", "coboundary_squared", "∂² = 0", &extra, || {
        let mut r = Residual::zero();
        for &seed in &spec.seeds {
            let mut s = Sampler::new(&alg, seed);
            for arity in 0..=cap {
                for form in 0..=1 {
                    let p = s.cochain(arity, spec.terms, form, false);
                    r.absorb(of_co(&h.coboundary(&h.coboundary(&p))));
                }
            }
        }
        Ok(r)
    });
    run.record("hochschild", "boundary_squared", "b² = 0", &extra, || {
        let mut r = Residual::zero();
        for slots in 1..=slot_max {
            if alg.len().checked_pow(slots as u32).is_some_and(|n| n <= BASIS_CHAIN_LIMIT) {
                for c in basis_chains(&alg, slots) {
                    r.absorb(of_ch(&h.boundary(&h.boundary(&c))));
                }
            }
        }
        for &seed in &spec.seeds {
            let mut s = Sampler::new(&alg, seed);
            for slots in 1..=slot_max {
                for form in 0..=1 {
                    let c = s.chain(slots, spec.terms, form);
                    r.absorb(of_ch(&h.boundary(&h.boundary(&c))));
                }
            }
        }
        Ok(r)
    });
    run.record("hochschild", "bracket_antisymmetry", "[P,Q] = -(-1)^{|P||Q|}[Q,P]", &extra, || {
        let mut r = Residual::zero();
        for &seed in &spec.seeds {
            let mut s = Sampler::new(&alg, seed).with_pool(POOL);
            for a in 0..=cap {
                for b in 0..=cap {
                    for (fp, fq) in [(0, 0), (1, 0), (1, 1)] {
                        let p = s.cochain(a, spec.terms, fp, false);
                        let q = s.cochain(b, spec.terms, fq, false);
                        let sign = sgn(p.degree().unwrap_or(0) * q.degree().unwrap_or(0));
                        r.absorb(of_co(&h.bracket(&p, &q).add(&h.bracket(&q, &p).scale(&sign))));
                    }
                }
            }
        }
        Ok(r)
    });
    run.record("hochschild", "jacobi", "graded Jacobi identity", &extra, || {
        let mut r = Residual::zero();
        for &seed in &spec.seeds {
            let mut s = Sampler::new(&alg, seed).with_pool(POOL);
            for ax in 0..=cap {
                for ay in 0..=cap {
                    for az in 0..=cap {
                        let forms = [ax % 2, (ax + ay) % 2, ay % 2];
                        let x = s.cochain(ax, spec.terms, forms[0], false);
                        let y = s.cochain(ay, spec.terms, forms[1], false);
                        let z = s.cochain(az, spec.terms, forms[2], false);
                        let (dx, dy) = (x.degree().unwrap_or(0), y.degree().unwrap_or(0));
                        let lhs = h.bracket(&x, &h.bracket(&y, &z));
                        let rhs = h
                            .bracket(&h.bracket(&x, &y), &z)
                            .add(&h.bracket(&y, &h.bracket(&x, &z)).scale(&sgn(dx * dy)));
                        r.absorb(of_co(&lhs.sub(&rhs)));
                    }
                }
            }
        }
        Ok(r)
    });
    run.record("hochschild", "module_bracket", "R_[P,Q] = [R_P, R_Q]", &extra, || {
        let mut r = Residual::zero();
        for &seed in &spec.seeds {
            let mut s = Sampler::new(&alg, seed).with_pool(POOL);
            for ap in 0..=cap {
                for aq in 0..=cap {
                    for (fp, fq, fc) in [(0, 0, 0), (1, 0, 1), (1, 1, 0)] {
                        let p = s.cochain(ap, spec.terms, fp, false);
                        let q = s.cochain(aq, spec.terms, fq, false);
                        let sign = sgn(p.degree().unwrap_or(0) * q.degree().unwrap_or(0));
                        for slots in 1..=slot_max {
                            let c = s.chain(slots, spec.terms, fc);
                            let lhs = h.chain_action(&h.bracket(&p, &q), &c);
                            let rpq = h.chain_action(&p, &h.chain_action(&q, &c));
                            let rqp = h.chain_action(&q, &h.chain_action(&p, &c));
                            r.absorb(of_ch(&lhs.sub(&rpq.sub(&rqp.scale(&sign)))));
                        }
                    }
                }
            }
        }
        Ok(r)
    });
    run.record("hochschild", "module_boundary", "R_∂P = [b, R_P]", &extra, || {
        let mut r = Residual::zero();
        for &seed in &spec.seeds {
            let mut s = Sampler::new(&alg, seed);
            for arity in 0..=cap {
                for (fp, fc) in [(0, 0), (1, 0), (1, 1)] {
                    let p = s.cochain(arity, spec.terms, fp, false);
                    let sign = sgn(p.degree().unwrap_or(0));
                    for slots in 1..=slot_max {
                        let c = s.chain(slots, spec.terms, fc);
                        let lhs =
                            h.boundary(&h.chain_action(&p, &c)).sub(&h.chain_action(&p, &h.boundary(&c)).scale(&sign));
                        r.absorb(of_ch(&lhs.sub(&h.chain_action(&h.coboundary(&p), &c))));
                    }
                }
            }
        }
        Ok(r)
    });

    run.record("hochschild", "maurer_cartan_cochain", "Dγ + ½[∂γ,γ] = 0 on cochains up to N_rep", &[], || {
        Ok(of_co(&tw.maurer_cartan()))
    });
    run.record("hochschild", "bianchi", "[[∂γ,γ],γ] = 0", &[], || {
        Ok(of_co(&base.cochain_window(&tw.triple_bracket())))
    });
    run.record(
        "hochschild",
        "twisted_cochain_identity",
        "[D+∂, ad_γ] = ad_∂γ - ½ad_[∂γ,γ] up to N_rep",
        &extra,
        || {
            let mut r = Residual::zero();
            for &seed in &spec.seeds {
                let mut s = Sampler::new(&alg, seed);
                for arity in 0..=cap {
                    for form in 0..=1 {
                        let p = s.cochain(arity, spec.filtered_terms, form, true);
                        r.absorb(of_co(&tw.cochain_identity_residual(&p)));
                    }
                }
            }
            Ok(r)
        },
    );
    run.record(
        "hochschild",
        "twisted_chain_identity",
        "[D+b, R_γ] = R_∂γ - ½R_[∂γ,γ] up to N_rep",
        &extra,
        || {
            let mut r = Residual::zero();
            for &seed in &spec.seeds {
                let mut s = Sampler::new(&alg, seed);
                for slots in 1..=slot_max {
                    for form in 0..=1 {
                        let c = s.chain(slots, spec.terms, form);
                        r.absorb(of_ch(&tw.chain_identity_residual(&c)));
                    }
                }
            }
            Ok(r)
        },
    );
    run.record(
        "hochschild",
        "differentials_squared",
        "(D+∂)², (D̃+∂)², (D+b)², (D̃+b)² vanish up to N_rep",
        &extra,
        || {
            let mut r = Residual::zero();
            let dd = |x: &Cochain| base.d_cochain(x).add(&h.coboundary(x));
            let tt = |x: &Cochain| tw.d_tilde_cochain(x).add(&h.coboundary(x));
            let db = |x: &Chain| base.d_chain(x).add(&h.boundary(x));
            let tb = |x: &Chain| tw.d_tilde_chain(x).add(&h.boundary(x));
            for &seed in &spec.seeds {
                let mut s = Sampler::new(&alg, seed);
                for arity in 0..=cap {
                    for form in 0..=1 {
                        let p = s.cochain(arity, spec.filtered_terms, form, true);
                        r.absorb(of_co(&base.cochain_window(&dd(&dd(&p)))));
                        r.absorb(of_co(&base.cochain_window(&tt(&tt(&p)))));
                    }
                }
                for slots in 1..=slot_max {
                    for form in 0..=1 {
                        let c = s.chain(slots, spec.terms, form);
                        r.absorb(of_ch(&base.chain_window(&db(&db(&c)))));
                        r.absorb(of_ch(&base.chain_window(&tb(&tb(&c)))));
                    }
                }
            }
            Ok(r)
        },
    );
}

fn trace_context(
    flip: bool,
    op: &FedosovOperator,
    rank: usize,
    twist: Option<&TwistedComplex>,
) -> Result<TraceContext> {
    let scalar = FedosovComplex::new(make_hochschild(Arc::new(MatAlgebra::new(op.shape(), 1)?), flip), op)?;
    let matrix = match twist {
        Some(t) => t.base().clone(),
        None => FedosovComplex::new(make_hochschild(Arc::new(MatAlgebra::new(op.shape(), rank)?), flip), op)?,
    };
    Ok(TraceContext::from_parts(scalar, matrix, twist.cloned()))
}

/// A random `y`-independent matrix 1-form with entries affine in `x`.
fn random_shift(seed: u64, rank: usize, shape: JetShape) -> EndJet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = shape.dim;
    let mut entries = Vec::with_capacity(rank * rank);
    for _ in 0..rank * rank {
        let mut e = FormJet::zero(shape);
        for k in 0..d {
            let mut p = PolyX::constant(d, rational::int(rng.gen_range(-2..=2)));
            for i in 0..d {
                p += &PolyX::var(d, i).scale(&rational::int(rng.gen_range(-1..=1)));
            }
            e.add_term(FormKey { y: YMono::one(d), dx: 0, dy: 1 << k }, &p);
        }
        entries.push(e);
    }
    EndJet::from_entries(rank, shape, entries).expect("entries match rank")
}

/// A closed `x`-dependent line-bundle connection, for which `γ` stays
/// `y`-independent.
fn closed_line_connection(dim: usize) -> Result<ConnectionFormE> {
    let mut conn = ConnectionFormE::zero(dim, 1);
    for i in 0..dim {
        let p = if dim == 1 { PolyX::constant(1, rational::int(2)) } else { PolyX::var(dim, (i + 1) % dim) };
        conn = conn.with_matrix(i, vec![vec![p]])?;
    }
    Ok(conn)
}

fn tracemaps(run: &mut Runner, inst: &Instance) {
    let spec = run.spec();
    let extra = [
        ("seeds", spec.seeds.len().to_string()),
        ("arity_cap", spec.arity_cap.to_string()),
        ("chain_degree", spec.chain_degree.to_string()),
    ];
    let ctx = match trace_context(run.flip(), &inst.op, run.cfg.r, Some(&inst.twisted)) {
        Ok(c) => c,
        Err(e) => {
            run.record("tracemaps", "context", "trace maps", &[], || Err(e));
            return;
        }
    };
    let start = Instant::now();
    match verify_diagrams(&ctx, &spec) {
        Ok(checks) => {
            let share = start.elapsed() / checks.len().max(1) as u32;
            for c in checks {
                run.record("tracemaps", c.name, c.anchor, &extra, || Ok(c.residual));
                if let Some(last) = run.checks.last_mut() {
                    last.elapsed = share;
                }
            }
        }
        Err(e) => run.record("tracemaps", "diagrams", "trace and cotrace identities", &extra, || Err(e)),
    }
    let shape = inst.op.shape();
    let rank = run.cfg.r;
    let flip = run.flip();
    let seeds: Vec<u64> = (0..GAUGE_SHIFTS as u64).map(|k| spec.seeds[0].wrapping_mul(31).wrapping_add(k)).collect();
    let start = Instant::now();
    let shifted: Result<Vec<TraceContext>> =
        seeds.iter().map(|&s| ctx.gauge_shifted(&inst.gamma, &random_shift(s, rank, shape))).collect();
    let outcome = shifted.and_then(|sh| gauge_residuals(&ctx, &sh, &spec));
    let share = start.elapsed() / GAUGE_SHIFTS as u32;
    for (k, &seed) in seeds.iter().enumerate() {
        let res = match &outcome {
            Ok(r) => Ok(r[k].clone()),
            Err(e) => Err(Error::Internal(e.to_string())),
        };
        run.record(
            "tracemaps",
            &format!("gauge_invariance_{}", k + 1),
            "twisted maps are unchanged under γ -> γ + Δ",
            &[("shift_seed", seed.to_string())],
            || res,
        );
        if let Some(last) = run.checks.last_mut() {
            last.elapsed = share;
        }
    }
    run.record(
        "tracemaps",
        "rank_one_degeneration",
        "for a closed line-bundle connection the twisted maps are the plain ones",
        &extra,
        || {
            let g = build_gamma_e(&inst.op, &closed_line_connection(shape.dim)?)?;
            if !g.correction().is_zero() {
                return Err(Error::Internal("closed line-bundle connection acquired y-dependence".into()));
            }
            let base = trace_context(flip, &inst.op, 1, None)?;
            let tw = TwistedComplex::new(base.matrix().clone(), &g)?;
            let ctx1 = TraceContext::from_parts(base.scalar().clone(), base.matrix().clone(), Some(tw));
            let alg = ctx1.scalar().algebra().clone();
            let mut r = Residual::zero();
            for &seed in &spec.seeds {
                let mut s = Sampler::new(&alg, seed);
                for arity in 0..=spec.arity_cap {
                    for form in 0..=1 {
                        let p = s.cochain(arity, spec.terms, form, false);
                        r.absorb(Residual::of_cochain(&ctx1.twisted_cotrace(&p)?.sub(&p), &alg));
                    }
                }
                for slots in 1..=spec.chain_degree + 1 {
                    for form in 0..=1 {
                        let c = s.chain(slots, spec.terms, form);
                        r.absorb(Residual::of_chain(&ctx1.twisted_trace(&c)?.sub(&c), &alg));
                    }
                }
            }
            Ok(r)
        },
    );
}

//! Finite-dimensional graded associative algebras and the exponential
//! conjugation identities for a nilpotent degree-0 element.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Matrix form of a basis element, kept for instances built from matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisMatrix {
    Identity,
    Unit(usize, usize),
}

/// Graded associative algebra given by structure constants
/// `e_i · e_j = Σ_k c^k_{ij} e_k`.
#[derive(Debug, PartialEq)]
pub struct GradedAlgebraInstance {
    degrees: Vec<i64>,
    table: Vec<Vec<Vec<(usize, Rational)>>>,
    unit: Option<usize>,
    matrix_model: Option<(usize, Vec<BasisMatrix>)>,
}

impl GradedAlgebraInstance {
    /// Builds an instance, checking the grading and associativity on every
    /// basis triple.
    pub fn new(degrees: Vec<i64>, table: Vec<Vec<Vec<(usize, Rational)>>>, unit: Option<usize>) -> Result<Self> {
        let n = degrees.len();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Config("structure table has wrong size".into()));
        }
        for i in 0..n {
            for j in 0..n {
                for (k, c) in &table[i][j] {
                    if *k >= n {
                        return Err(Error::Config(format!("basis index {k} out of range")));
                    }
                    if !c.is_zero() && degrees[*k] != degrees[i] + degrees[j] {
                        return Err(Error::Degree(format!("e{i}·e{j} has a component e{k} of the wrong degree")));
                    }
                }
            }
        }
        let inst = Self { degrees, table, unit, matrix_model: None };
        inst.audit_associativity()?;
        if let Some(u) = unit {
            for i in 0..n {
                let e = inst.basis(i).coeffs;
                let ue = inst.mul_coeffs(&inst.basis(u).coeffs, &e);
                let eu = inst.mul_coeffs(&e, &inst.basis(u).coeffs);
                if ue != e || eu != e {
                    return Err(Error::Config(format!("e{u} is not a unit")));
                }
            }
        }
        Ok(inst)
    }

    /// Subalgebra of `m×m` matrices spanned by the given basis, graded by
    /// `deg E_ij = g_i - g_j`.
    pub fn from_matrices(dim: usize, grading: &[i64], basis: Vec<BasisMatrix>) -> Result<Self> {
        let n = basis.len();
        let index_of = |b: BasisMatrix| basis.iter().position(|&c| c == b);
        let mut degrees = Vec::with_capacity(n);
        for b in &basis {
            degrees.push(match *b {
                BasisMatrix::Identity => 0,
                BasisMatrix::Unit(i, j) => grading[i] - grading[j],
            });
        }
        let mut table = vec![vec![Vec::new(); n]; n];
        for (a, ba) in basis.iter().enumerate() {
            for (b, bb) in basis.iter().enumerate() {
                let prod = match (*ba, *bb) {
                    (BasisMatrix::Identity, x) | (x, BasisMatrix::Identity) => Some(x),
                    (BasisMatrix::Unit(i, j), BasisMatrix::Unit(k, l)) => (j == k).then_some(BasisMatrix::Unit(i, l)),
                };
                if let Some(p) = prod {
                    let k = index_of(p).ok_or_else(|| Error::Config("basis is not closed under products".into()))?;
                    table[a][b].push((k, Rational::one()));
                }
            }
        }
        let unit = index_of(BasisMatrix::Identity);
        let mut inst = Self::new(degrees, table, unit)?;
        inst.matrix_model = Some((dim, basis));
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn matrix_model(&self) -> Option<(usize, &[BasisMatrix])> {
        self.matrix_model.as_ref().map(|(m, b)| (*m, b.as_slice()))
    }

    fn basis(&self, i: usize) -> RawElement {
        let mut coeffs = vec![Rational::zero(); self.dim()];
        coeffs[i] = Rational::one();
        RawElement { coeffs }
    }

    fn mul_coeffs(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (i, ca) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, cb) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (k, c) in &self.table[i][j] {
                    out[*k] += ca * cb * c;
                }
            }
        }
        out
    }

    fn audit_associativity(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul_coeffs(&self.basis(i).coeffs, &self.basis(j).coeffs);
                for k in 0..n {
                    let ek = self.basis(k).coeffs;
                    let left = self.mul_coeffs(&ij, &ek);
                    let jk = self.mul_coeffs(&self.basis(j).coeffs, &ek);
                    let right = self.mul_coeffs(&self.basis(i).coeffs, &jk);
                    if left != right {
                        return Err(Error::Config(format!("associativity fails on (e{i}, e{j}, e{k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

struct RawElement {
    coeffs: Vec<Rational>,
}

/// Coefficient vector over the basis of an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    alg: Arc<GradedAlgebraInstance>,
    coeffs: Vec<Rational>,
}

impl GradedElement {
    pub fn zero(alg: &Arc<GradedAlgebraInstance>) -> Self {
        Self { alg: alg.clone(), coeffs: vec![Rational::zero(); alg.dim()] }
    }

    pub fn one(alg: &Arc<GradedAlgebraInstance>) -> Result<Self> {
        let u = alg.unit.ok_or_else(|| Error::Precondition("instance has no unit".into()))?;
        Ok(Self::basis(alg, u))
    }

    pub fn basis(alg: &Arc<GradedAlgebraInstance>, i: usize) -> Self {
        let mut e = Self::zero(alg);
        e.coeffs[i] = Rational::one();
        e
    }

    pub fn from_coeffs(alg: &Arc<GradedAlgebraInstance>, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), alg.dim());
        Self { alg: alg.clone(), coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn instance(&self) -> &Arc<GradedAlgebraInstance> {
        &self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Degree of a nonzero homogeneous element; `Some(None)`-free: zero has
    /// every degree and reports `None`.
    pub fn degree(&self) -> Result<Option<i64>> {
        let mut deg = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.alg.degrees[i];
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Err(Error::Degree("element is not homogeneous".into())),
                _ => {}
            }
        }
        Ok(deg)
    }

    fn has_degree(&self, want: i64) -> bool {
        matches!(self.degree(), Ok(None)) || matches!(self.degree(), Ok(Some(d)) if d == want)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { alg: self.alg.clone(), coeffs: self.alg.mul_coeffs(&self.coeffs, &other.coeffs) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { alg: self.alg.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { alg: self.alg.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Renders the first nonzero coefficient for reports.
    pub fn leading_term(&self) -> Option<String> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*e{}", rational::format(c), i))
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

/// `u·v - (-1)^{deg u · deg v} v·u` for homogeneous `u`, `v`.
pub fn graded_commutator(u: &GradedElement, v: &GradedElement) -> Result<GradedElement> {
    let du = u.degree()?.unwrap_or(0);
    let dv = v.degree()?.unwrap_or(0);
    let vu = v.mul(u);
    Ok(if (du * dv).rem_euclid(2) == 1 { u.mul(v).add(&vu) } else { u.mul(v).sub(&vu) })
}

fn nilpotency_index(a: &GradedElement) -> Option<usize> {
    let n = a.alg.dim();
    let mut p = a.clone();
    for k in 1..=n + 1 {
        if p.is_zero() {
            return Some(k - 1);
        }
        p = p.mul(a);
    }
    None
}

/// `Σ a^k / k!` for a nilpotent degree-0 `a`.
pub fn exp_nilpotent(a: &GradedElement) -> Result<GradedElement> {
    if !a.has_degree(0) {
        return Err(Error::Degree("exponent must have degree 0".into()));
    }
    let n = a.alg.dim();
    nilpotency_index(a).ok_or(Error::NotNilpotent(n))?;
    let one = GradedElement::one(&a.alg)?;
    let mut sum = one.clone();
    let mut power = one;
    for k in 1..=n {
        power = power.mul(a);
        if power.is_zero() {
            break;
        }
        sum = sum.add(&power.scale(&(Rational::one() / rational::factorial(k))));
    }
    Ok(sum)
}

/// Taylor coefficients `α_1..α_K` of `x / (e^x - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToddSeries {
    pub coeffs: Vec<Rational>,
}

/// Coefficients `1/(k+1)!` of `(e^x - 1)/x`, constant term included.
pub fn exp_quotient_series(order: usize) -> Vec<Rational> {
    (0..=order).map(|k| Rational::one() / rational::factorial(k + 1)).collect()
}

/// Inverts `(e^x - 1)/x` as a power series to order `K`.
pub fn todd_coefficients(order: usize) -> ToddSeries {
    let g = exp_quotient_series(order);
    let mut f = vec![Rational::one()];
    for n in 1..=order {
        let mut acc = Rational::zero();
        for k in 1..=n {
            acc -= &g[k] * &f[n - k];
        }
        f.push(acc);
    }
    ToddSeries { coeffs: f.into_iter().skip(1).collect() }
}

fn ad(a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
    graded_commutator(a, b)
}

/// Smallest `m` with `ad_a^m = 0` on the whole algebra.
pub fn ad_nilpotency_order(a: &GradedElement) -> Result<usize> {
    let n = a.alg.dim();
    let mut images: Vec<GradedElement> = (0..n).map(|i| GradedElement::basis(&a.alg, i)).collect();
    for m in 0..=2 * n + 1 {
        if images.iter().all(GradedElement::is_zero) {
            return Ok(m);
        }
        images = images.iter().map(|e| ad(a, e)).collect::<Result<_>>()?;
    }
    Err(Error::NotNilpotent(n))
}

/// `b + Σ_k coeffs[k-1] · ad_a^k(b)`.
pub fn apply_ad_series(coeffs: &[Rational], a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
    let order = ad_nilpotency_order(a)?;
    let need = order.saturating_sub(1);
    if coeffs.len() < need {
        return Err(Error::InsufficientOrder { have: coeffs.len(), need });
    }
    let mut out = b.clone();
    let mut term = b.clone();
    for c in coeffs.iter().take(need) {
        term = ad(a, &term)?;
        out = out.add(&term.scale(c));
    }
    Ok(out)
}

fn require_degrees(pairs: &[(&GradedElement, i64, &str)]) -> Result<()> {
    for (e, want, name) in pairs {
        if !e.has_degree(*want) {
            return Err(Error::Degree(format!("{name} must have degree {want}")));
        }
    }
    Ok(())
}

/// `d·exp(a) - exp(a)·(d + b)` after checking `[d,a] = b - c/2`,
/// `[b,a] = c` and `[c,a] = 0`.
pub fn check_lemma1(
    a: &GradedElement,
    b: &GradedElement,
    c: &GradedElement,
    d: &GradedElement,
) -> Result<GradedElement> {
    require_degrees(&[(a, 0, "a"), (b, 1, "b"), (c, 1, "c"), (d, 1, "d")])?;
    let half = rational::frac(1, 2);
    if !graded_commutator(d, a)?.sub(&b.sub(&c.scale(&half))).is_zero() {
        return Err(Error::Precondition("[d,a] = b - c/2 fails".into()));
    }
    if !graded_commutator(b, a)?.sub(c).is_zero() {
        return Err(Error::Precondition("[b,a] = c fails".into()));
    }
    if !graded_commutator(c, a)?.is_zero() {
        return Err(Error::Precondition("[c,a] = 0 fails".into()));
    }
    let e = exp_nilpotent(a)?;
    Ok(d.mul(&e).sub(&e.mul(&d.add(b))))
}

/// The pair `(b, c)` with `c = [[d,a],a]` and `b = [d,a] + c/2`.
pub fn lemma1_quadruple(a: &GradedElement, d: &GradedElement) -> Result<(GradedElement, GradedElement)> {
    let da = graded_commutator(d, a)?;
    let c = graded_commutator(&da, a)?;
    let b = da.add(&c.scale(&rational::frac(1, 2)));
    Ok((b, c))
}

fn series_len(a: &GradedElement) -> usize {
    a.alg.dim()
}

/// `b = g(ad_a)[a,d]` with `g(x) = (e^x - 1)/x`.
pub fn prop1_forward_b(a: &GradedElement, d: &GradedElement) -> Result<GradedElement> {
    require_degrees(&[(a, 0, "a"), (d, 1, "d")])?;
    let g = exp_quotient_series(series_len(a));
    apply_ad_series(&g[1..], a, &graded_commutator(a, d)?)
}

/// `b = exp(a)·d·exp(-a) - d`.
pub fn prop1_reverse_b(a: &GradedElement, d: &GradedElement) -> Result<GradedElement> {
    require_degrees(&[(a, 0, "a"), (d, 1, "d")])?;
    let e = exp_nilpotent(a)?;
    let e_inv = exp_nilpotent(&a.scale(&-Rational::one()))?;
    Ok(e.mul(d).mul(&e_inv).sub(d))
}

/// `exp(a)·d - (d + b)·exp(a)` for `b` from the forward construction.
pub fn check_prop1_forward(a: &GradedElement, d: &GradedElement) -> Result<GradedElement> {
    let b = prop1_forward_b(a, d)?;
    prop1_exp_residual(a, &b, d)
}

/// `[a,d] - f(ad_a)(b)` for `b` from conjugation, `f(x) = x/(e^x - 1)`.
pub fn check_prop1_reverse(a: &GradedElement, d: &GradedElement) -> Result<GradedElement> {
    let b = prop1_reverse_b(a, d)?;
    prop1_series_residual(a, &b, d)
}

/// Residual of `exp(a)·d = (d + b)·exp(a)`.
pub fn prop1_exp_residual(a: &GradedElement, b: &GradedElement, d: &GradedElement) -> Result<GradedElement> {
    let e = exp_nilpotent(a)?;
    Ok(e.mul(d).sub(&d.add(b).mul(&e)))
}

/// Residual of `[a,d] = f(ad_a) b`.
pub fn prop1_series_residual(a: &GradedElement, b: &GradedElement, d: &GradedElement) -> Result<GradedElement> {
    let f = todd_coefficients(series_len(a));
    Ok(graded_commutator(a, d)?.sub(&apply_ad_series(&f.coeffs, a, b)?))
}

/// A generated test instance: the algebra and elements `a` (degree 0,
/// nilpotent) and `d` (degree 1).
pub struct NilpotentInstance {
    pub algebra: Arc<GradedAlgebraInstance>,
    pub a: GradedElement,
    pub d: GradedElement,
}

/// Identity plus strictly upper triangular `size×size` matrices, graded by a
/// seeded non-increasing block grading. Deterministic in `seed`.
pub fn random_nilpotent_instance(seed: u64, size: usize, nilpotency_bound: usize) -> Result<NilpotentInstance> {
    if size < 2 {
        return Err(Error::Precondition("instance size must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = vec![BasisMatrix::Identity];
    for i in 0..size {
        for j in i + 1..size {
            basis.push(BasisMatrix::Unit(i, j));
        }
    }
    for _attempt in 0..64 {
        let mut grading = vec![0i64; size];
        let mut g = rng.gen_range(1..=size as i64 / 2 + 1);
        for slot in grading.iter_mut() {
            *slot = g;
            if rng.gen_bool(0.4) && g > 0 {
                g -= 1;
            }
        }
        let alg = Arc::new(GradedAlgebraInstance::from_matrices(size, &grading, basis.clone())?);
        let mut a = GradedElement::zero(&alg);
        let mut d = GradedElement::zero(&alg);
        for (k, b) in basis.iter().enumerate() {
            if let BasisMatrix::Unit(_, _) = b {
                let c = rational::int(rng.gen_range(-3..=3));
                match alg.degrees[k] {
                    0 => a.coeffs[k] = c,
                    1 => d.coeffs[k] = c,
                    _ => {}
                }
            }
        }
        let mut probe = d.clone();
        for _ in 0..nilpotency_bound {
            probe = graded_commutator(&a, &probe)?;
        }
        if probe.is_zero() {
            return Ok(NilpotentInstance { algebra: alg, a, d });
        }
    }
    Err(Error::Internal("could not generate an instance within the nilpotency bound".into()))
}

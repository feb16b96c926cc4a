//! Bigraded exterior forms with jet coefficients.
//!
//! A [`FormJet`] is a finite sum of terms `f(x) · y^α · dx^S · dy^T`, with the
//! `dx` generators written before the `dy` generators and each group in
//! increasing index order. Components of `y`-degree above the truncation
//! order are discarded by every product.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::monomial::{bits_below, merge_sign, YMono};
use crate::poly::PolyX;
use crate::rational::{self, Rational};

/// Dimension of the chart and truncation order of the jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JetShape {
    pub dim: usize,
    pub order: usize,
}

impl JetShape {
    pub fn new(dim: usize, order: usize) -> Self {
        Self { dim, order }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormKey {
    pub y: YMono,
    pub dx: u32,
    pub dy: u32,
}

impl FormKey {
    pub fn form_degree(&self) -> usize {
        (self.dx.count_ones() + self.dy.count_ones()) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormJet {
    shape: JetShape,
    terms: BTreeMap<FormKey, PolyX>,
}

impl FormJet {
    pub fn zero(shape: JetShape) -> Self {
        Self { shape, terms: BTreeMap::new() }
    }

    pub fn one(shape: JetShape) -> Self {
        Self::term(shape, YMono::one(shape.dim), 0, 0, PolyX::one(shape.dim))
    }

    pub fn from_poly(shape: JetShape, p: PolyX) -> Self {
        Self::term(shape, YMono::one(shape.dim), 0, 0, p)
    }

    pub fn term(shape: JetShape, y: YMono, dx: u32, dy: u32, coeff: PolyX) -> Self {
        let mut out = Self::zero(shape);
        out.add_term(FormKey { y, dx, dy }, &coeff);
        out
    }

    pub fn monomial(shape: JetShape, y: YMono) -> Self {
        Self::term(shape, y, 0, 0, PolyX::one(shape.dim))
    }

    /// The fiber coordinate `y^i` (0-based).
    pub fn y(shape: JetShape, i: usize) -> Self {
        Self::monomial(shape, YMono::var(shape.dim, i))
    }

    pub fn x(shape: JetShape, i: usize) -> Self {
        Self::from_poly(shape, PolyX::var(shape.dim, i))
    }

    pub fn dx(shape: JetShape, i: usize) -> Self {
        Self::term(shape, YMono::one(shape.dim), 1 << i, 0, PolyX::one(shape.dim))
    }

    pub fn dy(shape: JetShape, i: usize) -> Self {
        Self::term(shape, YMono::one(shape.dim), 0, 1 << i, PolyX::one(shape.dim))
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn add_term(&mut self, key: FormKey, coeff: &PolyX) {
        if coeff.is_zero() || key.y.degree() > self.shape.order {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += coeff;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff.clone());
            }
        }
    }

    pub fn add_term_scaled(&mut self, key: FormKey, coeff: &PolyX, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            self.add_term(key, coeff);
        } else {
            self.add_term(key, &coeff.scale(c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormKey, &PolyX)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_y_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.y.degree()).max()
    }

    pub fn min_y_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.y.degree()).min()
    }

    /// Total form degree if all terms agree on it.
    pub fn form_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(FormKey::form_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn check_shape(&self, other: &FormJet) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }

    pub fn filter<F: Fn(&FormKey) -> bool>(&self, keep: F) -> Self {
        Self {
            shape: self.shape,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Components of `y`-degree at most `n`.
    pub fn up_to_degree(&self, n: usize) -> Self {
        self.filter(|k| k.y.degree() <= n)
    }

    /// The same jet viewed at another truncation order (dropping terms above it).
    pub fn with_order(&self, order: usize) -> Self {
        let shape = JetShape::new(self.shape.dim, order);
        Self {
            shape,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.y.degree() <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        Self { shape: self.shape, terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect() }
    }

    pub fn scale_poly(&self, p: &PolyX) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(v * p));
        }
        out
    }

    /// Graded product with truncation at the jet order.
    pub fn multiply(&self, other: &FormJet) -> Result<FormJet> {
        self.check_shape(other)?;
        let mut out = Self::zero(self.shape);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                if k1.y.degree() + k2.y.degree() > self.shape.order {
                    continue;
                }
                let Some(key_sign) = product_key(k1, k2) else { continue };
                let (key, negative) = key_sign;
                let c = c1 * c2;
                if negative {
                    out.add_term(key, &(-&c));
                } else {
                    out.add_term(key, &c);
                }
            }
        }
        Ok(out)
    }

    /// `∂/∂y^i`.
    pub fn deriv_y(&self, i: usize) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            if let Some((m, y)) = k.y.deriv(i) {
                out.add_term(FormKey { y, dx: k.dx, dy: k.dy }, &v.scale(&rational::int(m as i64)));
            }
        }
        out
    }

    /// `∂/∂x^i` applied to the coefficients.
    pub fn deriv_x(&self, i: usize) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &v.deriv(i));
        }
        out
    }

    /// Left multiplication by `dy^i`.
    pub fn left_dy(&self, i: usize) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            if k.dy & (1 << i) != 0 {
                continue;
            }
            let flips = k.dx.count_ones() + bits_below(k.dy, i);
            let key = FormKey { y: k.y.clone(), dx: k.dx, dy: k.dy | (1 << i) };
            if flips % 2 == 1 {
                out.add_term(key, &(-v));
            } else {
                out.add_term(key, v);
            }
        }
        out
    }

    /// Multiplication by `y^i` (truncating).
    pub fn times_y(&self, i: usize) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            out.add_term(FormKey { y: k.y.times_var(i), dx: k.dx, dy: k.dy }, v);
        }
        out
    }

    /// Left derivative with respect to the anticommuting generator `dy^i`.
    pub fn left_deriv_dy(&self, i: usize) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            if k.dy & (1 << i) == 0 {
                continue;
            }
            let flips = k.dx.count_ones() + bits_below(k.dy, i);
            let key = FormKey { y: k.y.clone(), dx: k.dx, dy: k.dy & !(1 << i) };
            if flips % 2 == 1 {
                out.add_term(key, &(-v));
            } else {
                out.add_term(key, v);
            }
        }
        out
    }

    /// Graded commutator `u·v - (-1)^{|u||v|} v·u`, term by term in form degree.
    pub fn graded_commutator(&self, other: &FormJet) -> Result<FormJet> {
        let mut out = self.multiply(other)?;
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let single_u = FormJet { shape: self.shape, terms: [(k1.clone(), c1.clone())].into() };
                let single_v = FormJet { shape: self.shape, terms: [(k2.clone(), c2.clone())].into() };
                let vu = single_v.multiply(&single_u)?;
                if k1.form_degree() * k2.form_degree() % 2 == 1 {
                    out += &vu;
                } else {
                    out -= &vu;
                }
            }
        }
        Ok(out)
    }

    /// First term in the canonical order, rendered exactly.
    pub fn leading_term(&self) -> Option<String> {
        self.terms.iter().next().map(|(k, v)| format_term(k, v))
    }
}

fn product_key(k1: &FormKey, k2: &FormKey) -> Option<(FormKey, bool)> {
    // dx1 dy1 dx2 dy2 -> dx1 dx2 dy1 dy2
    let pass = k1.dy.count_ones() * k2.dx.count_ones();
    let sx = merge_sign(k1.dx, k2.dx)?;
    let sy = merge_sign(k1.dy, k2.dy)?;
    let negative = (pass % 2 == 1) ^ sx ^ sy;
    Some((FormKey { y: k1.y.mul(&k2.y), dx: k1.dx | k2.dx, dy: k1.dy | k2.dy }, negative))
}

pub fn format_mask(prefix: &str, mask: u32) -> String {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| format!("{prefix}{}", i + 1)).collect::<Vec<_>>().join("^")
}

pub fn format_term(k: &FormKey, v: &PolyX) -> String {
    let mut s = format!("({v})*{}", k.y);
    if k.dx != 0 {
        s.push('*');
        s.push_str(&format_mask("dx", k.dx));
    }
    if k.dy != 0 {
        s.push('*');
        s.push_str(&format_mask("dy", k.dy));
    }
    s
}

impl AddAssign<&FormJet> for FormJet {
    fn add_assign(&mut self, rhs: &FormJet) {
        debug_assert_eq!(self.shape, rhs.shape);
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), v);
        }
    }
}

impl SubAssign<&FormJet> for FormJet {
    fn sub_assign(&mut self, rhs: &FormJet) {
        debug_assert_eq!(self.shape, rhs.shape);
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), &(-v));
        }
    }
}

impl Add for &FormJet {
    type Output = FormJet;
    fn add(self, rhs: &FormJet) -> FormJet {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &FormJet {
    type Output = FormJet;
    fn sub(self, rhs: &FormJet) -> FormJet {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &FormJet {
    type Output = FormJet;
    fn neg(self) -> FormJet {
        self.scale(&-Rational::one())
    }
}

impl Mul for &FormJet {
    type Output = FormJet;
    fn mul(self, rhs: &FormJet) -> FormJet {
        self.multiply(rhs).expect("jet shapes must agree")
    }
}

impl fmt::Display for FormJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, v)| format_term(k, v)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
